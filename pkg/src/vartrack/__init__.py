"""vartrack: moving-object detection and tracking under variable background.

Detects and tracks moving objects in grayscale sequences captured by a moving
camera: phase-correlation camera-motion compensation, history-based acting
background, flicker-aware foreground classification, morphological blob
refinement, and Kalman multi-object tracking, plus synthetic scenes and an
evaluation harness.
"""

from .background_model import ActingBackground, build_background, intersect_pair, quantize
from .blob_refinement import (
    Blob,
    DetectedObject,
    connected_components,
    detect_edges,
    dilate_blob,
    extract_features,
    refine_blobs,
    trim_and_intersect,
)
from .estimator import MovingObjectTracker
from .evaluation import EvalReport, FrameJudgement, aggregate, judge_frame, measure_fps
from .foreground import LevelBands, classify_moving, difference_foreground
from .motion_compensation import (
    HistoryWindow,
    ShiftEstimate,
    align_history,
    compensate,
    forward_transform,
    inverse_transform,
    phase_correlate,
)
from .pipeline import PipelineConfig, PipelineResult, TrackSnapshot, track_sequence
from .sequence_io import (
    Frame,
    GroundTruthBox,
    load_ground_truth,
    load_sequence,
    write_detections,
)
from .synthetic import SceneSpec, render
from .tracker import MultiObjectTracker, Track

__version__ = "0.1.0"

__all__ = [
    "ActingBackground",
    "Blob",
    "DetectedObject",
    "EvalReport",
    "Frame",
    "FrameJudgement",
    "GroundTruthBox",
    "HistoryWindow",
    "LevelBands",
    "MovingObjectTracker",
    "MultiObjectTracker",
    "PipelineConfig",
    "PipelineResult",
    "SceneSpec",
    "ShiftEstimate",
    "Track",
    "TrackSnapshot",
    "aggregate",
    "align_history",
    "build_background",
    "classify_moving",
    "compensate",
    "connected_components",
    "detect_edges",
    "difference_foreground",
    "dilate_blob",
    "extract_features",
    "forward_transform",
    "intersect_pair",
    "inverse_transform",
    "judge_frame",
    "load_ground_truth",
    "load_sequence",
    "measure_fps",
    "phase_correlate",
    "quantize",
    "refine_blobs",
    "render",
    "track_sequence",
    "trim_and_intersect",
    "write_detections",
]
