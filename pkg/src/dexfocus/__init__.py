"""Stabilized, hand-focused crops of egocentric video.

Pipeline: hand detections -> per-frame focal point -> smoothed trajectory
-> square crop windows -> cropped and resized video.
"""

__version__ = "0.1.0"

from dexfocus.detections import (
    BBox,
    DetectionTrack,
    FilterConfig,
    FrameDetections,
    HandDetection,
    Resolution,
    filter_frame,
    parse_track,
    serialize_track,
)
from dexfocus.focus import FocusPoint, Trajectory, build_trajectory, select_focus
from dexfocus.geometry import CropConfig, CropPlan, CropWindow, build_plan, crop_side, crop_window
from dexfocus.kernels import BACKEND
from dexfocus.metrics import coverage, trajectory_stats
from dexfocus.sampling import SampleSpec, sample_indices, warp_dt
from dexfocus.stabilize import Kernel, SmoothingConfig, make_kernel, smooth_trajectory
