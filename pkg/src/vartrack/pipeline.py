"""Per-frame orchestration of the full detect-and-track pipeline.

For each frame past the history window: align the eta predecessors, build the
acting background, difference and classify the foreground, refine blobs into
detected objects, and feed them to the tracker. Frames 1..eta only prime the
history and never produce output.
"""

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .background_model import build_background
from .blob_refinement import refine_blobs
from .errors import ConfigurationError, InsufficientFramesError
from .foreground import LevelBands, classify_moving, difference_foreground
from .motion_compensation import align_history
from .tracker import MultiObjectTracker
from .validation import check_frame_stack


@dataclass(frozen=True)
class PipelineConfig:
    """Tunable pipeline parameters with the defaults used throughout."""

    eta: int = 4
    alpha: float = 1.5
    phi: float = 1e6
    min_blob_area: int = 9
    min_object_side: int = 2
    invisible_max: int | None = None  # None -> 2 * eta

    def validate(self) -> None:
        if self.eta < 2:
            raise ConfigurationError(f"eta must be >= 2, got {self.eta}")
        if not self.alpha > 1:
            raise ConfigurationError(f"alpha must be > 1, got {self.alpha}")
        if not self.phi > 255:
            raise ConfigurationError(f"phi must be > 255, got {self.phi}")
        if self.min_blob_area < 1:
            raise ConfigurationError(
                f"min_blob_area must be >= 1, got {self.min_blob_area}"
            )
        if self.min_object_side < 1:
            raise ConfigurationError(
                f"min_object_side must be >= 1, got {self.min_object_side}"
            )
        if self.effective_invisible_max < 1:
            raise ConfigurationError("invisible_max must be >= 1")

    @property
    def effective_invisible_max(self) -> int:
        return 2 * self.eta if self.invisible_max is None else self.invisible_max


@dataclass(frozen=True)
class TrackSnapshot:
    """State of one live track at one frame; box is 1-based (x, y, w, h)."""

    track_id: int
    box: tuple[int, int, int, int]
    coasting: bool
    centroid: tuple[float, float]  # (row, col), 0-based


@dataclass
class PipelineResult:
    observations: list[tuple[int, int, int, int, int, int]] = field(default_factory=list)
    snapshots: dict[int, list[TrackSnapshot]] = field(default_factory=dict)
    operated_frames: int = 0
    compute_seconds: float = 0.0
    track_ids: set[int] = field(default_factory=set)


def _track_box(track) -> tuple[int, int, int, int]:
    """1-based output box for a track: its associated detection when visible,
    else its last dimensions centered on the predicted centroid."""
    if track.invisible_count == 0 and track.bbox is not None:
        x, y, w, h = track.bbox
        return (x + 1, y + 1, w, h)
    r, c = track.centroid
    w, h = track.width, track.height
    x = int(round(c - (w - 1) / 2.0))
    y = int(round(r - (h - 1) / 2.0))
    return (x + 1, y + 1, w, h)


def track_sequence(
    frames,
    config: PipelineConfig | None = None,
    debug_sink: Callable[[int, str, np.ndarray], None] | None = None,
) -> PipelineResult:
    """Run the pipeline over a frame stack.

    `frames` is anything `check_frame_stack` accepts. Detections are reported
    only for tracks associated with a detection in that frame; snapshots also
    carry coasting tracks for annotation. `debug_sink(frame_index, name,
    image)` receives intermediate images when provided and never influences
    the result.
    """
    config = config or PipelineConfig()
    config.validate()
    stack = check_frame_stack(frames)
    total = stack.shape[0]
    if total <= config.eta:
        raise InsufficientFramesError(
            f"need more than eta={config.eta} frames, got {total}"
        )
    bands = LevelBands(eta=config.eta)
    tracker = MultiObjectTracker(
        alpha=config.alpha,
        invisible_max=config.effective_invisible_max,
        phi=config.phi,
    )
    result = PipelineResult()
    for t in range(config.eta + 1, total + 1):
        start = time.perf_counter()
        current = stack[t - 1]
        predecessors = [stack[t - 1 - i] for i in range(1, config.eta + 1)]
        window = align_history(current, predecessors)
        bg = build_background(window)
        fg = difference_foreground(current, bg)
        mask = classify_moving(fg, bg.weight, bg.dissimilarity, bands)
        objects = refine_blobs(
            mask,
            current,
            alpha=config.alpha,
            min_blob_area=config.min_blob_area,
            min_object_side=config.min_object_side,
        )
        visible = tracker.step(objects)
        result.compute_seconds += time.perf_counter() - start
        for track in visible:
            x, y, w, h = _track_box(track)
            result.observations.append((t, track.id, x, y, w, h))
            result.track_ids.add(track.id)
        result.snapshots[t] = [
            TrackSnapshot(
                track_id=track.id,
                box=_track_box(track),
                coasting=track.invisible_count > 0,
                centroid=track.centroid,
            )
            for track in tracker.tracks
        ]
        result.operated_frames += 1
        if debug_sink is not None:
            debug_sink(t, "background", bg.background)
            debug_sink(t, "dissimilarity", bg.dissimilarity)
            debug_sink(t, "weight", bg.weight * (255.0 / max(config.eta - 1, 1)))
            debug_sink(t, "foreground", fg)
            debug_sink(t, "mask", mask * 255.0)
    result.observations.sort(key=lambda r: (r[0], r[1]))
    return result
