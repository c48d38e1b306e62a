import sys

from dexfocus.cli import main

sys.exit(main())
