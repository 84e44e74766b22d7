"""Deterministic moving-camera test sequences with exact ground truth.

A scene is a textured world background circularly shifted along a camera
path, with rectangular objects following image-space trajectories, optional
occluders active over frame windows, and an optional per-pixel flicker region
anchored to the world background. The same spec and seed always render
bit-identical sequences.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import ConfigurationError
from .sequence_io import GroundTruthBox


@dataclass(frozen=True)
class BackgroundSpec:
    """`low`/`high` bound the texture intensities for both kinds."""

    kind: str = "noise"  # noise | checker
    block: int = 8
    low: float = 0.0
    high: float = 255.0


@dataclass(frozen=True)
class ObjectSpec:
    """A rectangle of `width` x `height` moving through image coordinates.

    Either `positions` lists the 0-based top-left corner per frame, or the
    object starts at `start` and advances by `velocity` each frame, reflecting
    off the frame bounds. `texture_amplitude` adds fixed per-pixel uniform
    texture that travels with the object.
    """

    width: int
    height: int
    intensity: float
    start: tuple[int, int] = (0, 0)
    velocity: tuple[int, int] = (0, 0)
    positions: tuple[tuple[int, int], ...] | None = None
    texture_amplitude: float = 0.0
    texture_kind: str = "noise"  # noise | row_stripes | col_stripes
    # Optional reflection rectangle (xmin, ymin, xmax, ymax) for the top-left
    # corner; keeps trajectories away from the wrap-around frame borders.
    bounce_bounds: tuple[int, int, int, int] | None = None


@dataclass(frozen=True)
class OccluderSpec:
    """A static piece of scenery drawn over everything while active.

    `x`, `y` are world-background coordinates: the rectangle scrolls with the
    camera like the background does. `start_frame` and `end_frame` are
    1-based and inclusive (defaults: whole sequence).
    """

    x: int
    y: int
    w: int
    h: int
    intensity: float = 0.0
    start_frame: int = 1
    end_frame: int | None = None


@dataclass(frozen=True)
class FlickerSpec:
    """Per-frame uniform noise of +-amplitude over a world-anchored region."""

    x: int
    y: int
    w: int
    h: int
    amplitude: float


@dataclass(frozen=True)
class SceneSpec:
    width: int
    height: int
    frame_count: int
    seed: int = 0
    background: BackgroundSpec = field(default_factory=BackgroundSpec)
    camera_velocity: tuple[int, int] = (0, 0)
    camera_steps: tuple[tuple[int, int], ...] | None = None  # per-frame, len T-1
    objects: tuple[ObjectSpec, ...] = ()
    occluders: tuple[OccluderSpec, ...] = ()
    flicker: FlickerSpec | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "SceneSpec":
        try:
            background = BackgroundSpec(**data.get("background", {}))
            objects = tuple(
                ObjectSpec(
                    width=o["width"],
                    height=o["height"],
                    intensity=o["intensity"],
                    start=tuple(o.get("start", (0, 0))),
                    velocity=tuple(o.get("velocity", (0, 0))),
                    positions=(
                        tuple(tuple(p) for p in o["positions"])
                        if "positions" in o
                        else None
                    ),
                    texture_amplitude=o.get("texture_amplitude", 0.0),
                    texture_kind=o.get("texture_kind", "noise"),
                    bounce_bounds=(
                        tuple(o["bounce_bounds"]) if "bounce_bounds" in o else None
                    ),
                )
                for o in data.get("objects", [])
            )
            occluders = tuple(OccluderSpec(**o) for o in data.get("occluders", []))
            flicker = FlickerSpec(**data["flicker"]) if data.get("flicker") else None
            camera = data.get("camera", {})
            return cls(
                width=data["width"],
                height=data["height"],
                frame_count=data["frame_count"],
                seed=data.get("seed", 0),
                background=background,
                camera_velocity=tuple(camera.get("velocity", (0, 0))),
                camera_steps=(
                    tuple(tuple(s) for s in camera["steps"])
                    if "steps" in camera
                    else None
                ),
                objects=objects,
                occluders=occluders,
                flicker=flicker,
            )
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(f"bad scene spec: {exc}") from exc

    @classmethod
    def from_json(cls, path) -> "SceneSpec":
        try:
            with open(path) as fh:
                return cls.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read scene spec {path}: {exc}") from exc

    def to_dict(self) -> dict:
        """JSON-ready form accepted back by `from_dict`."""
        data: dict = {
            "width": self.width,
            "height": self.height,
            "frame_count": self.frame_count,
            "seed": self.seed,
            "background": {
                "kind": self.background.kind,
                "block": self.background.block,
                "low": self.background.low,
                "high": self.background.high,
            },
        }
        camera: dict = {"velocity": list(self.camera_velocity)}
        if self.camera_steps is not None:
            camera = {"steps": [list(s) for s in self.camera_steps]}
        data["camera"] = camera
        data["objects"] = [
            {
                "width": o.width,
                "height": o.height,
                "intensity": o.intensity,
                "start": list(o.start),
                "velocity": list(o.velocity),
                **({"positions": [list(p) for p in o.positions]} if o.positions else {}),
                "texture_amplitude": o.texture_amplitude,
                "texture_kind": o.texture_kind,
                **(
                    {"bounce_bounds": list(o.bounce_bounds)}
                    if o.bounce_bounds is not None
                    else {}
                ),
            }
            for o in self.objects
        ]
        data["occluders"] = [
            {
                "x": o.x,
                "y": o.y,
                "w": o.w,
                "h": o.h,
                "intensity": o.intensity,
                "start_frame": o.start_frame,
                **({"end_frame": o.end_frame} if o.end_frame is not None else {}),
            }
            for o in self.occluders
        ]
        if self.flicker is not None:
            f = self.flicker
            data["flicker"] = {
                "x": f.x,
                "y": f.y,
                "w": f.w,
                "h": f.h,
                "amplitude": f.amplitude,
            }
        return data


def _render_background(spec: SceneSpec, rng: np.random.Generator) -> np.ndarray:
    bg = spec.background
    if bg.kind == "noise":
        # Box-smoothed seeded noise with wrap so circular shifts stay exact
        # and the spectrum stays full-rank.
        texture = rng.uniform(bg.low, bg.high, (spec.height, spec.width))
        return ndimage.uniform_filter(texture, size=3, mode="wrap")
    if bg.kind == "checker":
        rows = np.arange(spec.height)[:, None] // bg.block
        cols = np.arange(spec.width)[None, :] // bg.block
        return np.where((rows + cols) % 2 == 0, bg.low, bg.high).astype(np.float64)
    raise ConfigurationError(f"unknown background kind {bg.kind!r}")


def _object_texture(obj: ObjectSpec, rng: np.random.Generator) -> np.ndarray:
    """Per-pixel intensities of one object, anchored to the object so the
    pattern travels with it."""
    amp = obj.texture_amplitude
    if amp <= 0:
        pattern = np.full((obj.height, obj.width), obj.intensity)
    elif obj.texture_kind == "noise":
        pattern = obj.intensity + rng.uniform(-amp, amp, (obj.height, obj.width))
    elif obj.texture_kind == "row_stripes":
        rows = np.arange(obj.height)[:, None]
        pattern = np.where(rows % 2 == 0, obj.intensity - amp, obj.intensity + amp)
        pattern = np.broadcast_to(pattern, (obj.height, obj.width)).astype(np.float64)
    elif obj.texture_kind == "col_stripes":
        cols = np.arange(obj.width)[None, :]
        pattern = np.where(cols % 2 == 0, obj.intensity - amp, obj.intensity + amp)
        pattern = np.broadcast_to(pattern, (obj.height, obj.width)).astype(np.float64)
    else:
        raise ConfigurationError(f"unknown texture kind {obj.texture_kind!r}")
    return np.clip(pattern, 0.0, 255.0)


def camera_path(spec: SceneSpec) -> list[tuple[int, int]]:
    """Per-frame steps (dx, dy) between consecutive frames, length T-1."""
    if spec.camera_steps is not None:
        steps = [tuple(int(v) for v in s) for s in spec.camera_steps]
        if len(steps) != spec.frame_count - 1:
            raise ConfigurationError(
                f"camera steps must have length T-1={spec.frame_count - 1}, "
                f"got {len(steps)}"
            )
        return steps
    vx, vy = spec.camera_velocity
    return [(int(vx), int(vy))] * (spec.frame_count - 1)


def object_positions(obj: ObjectSpec, spec: SceneSpec) -> list[tuple[int, int]]:
    """0-based top-left corner of the object per frame, reflecting velocity
    trajectories off the frame bounds."""
    frame_xmax = spec.width - obj.width
    frame_ymax = spec.height - obj.height
    if frame_xmax < 0 or frame_ymax < 0:
        raise ConfigurationError("object larger than the frame")
    if obj.positions is not None:
        positions = [tuple(int(v) for v in p) for p in obj.positions]
        if len(positions) != spec.frame_count:
            raise ConfigurationError(
                f"object positions must have length T={spec.frame_count}"
            )
        for t, (x, y) in enumerate(positions, start=1):
            if not (0 <= x <= frame_xmax and 0 <= y <= frame_ymax):
                raise ConfigurationError(
                    f"object leaves the frame at frame {t}: position ({x}, {y})"
                )
        return positions
    xmin = ymin = 0
    xmax, ymax = frame_xmax, frame_ymax
    if obj.bounce_bounds is not None:
        xmin, ymin, bx, by = obj.bounce_bounds
        xmax, ymax = min(xmax, bx), min(ymax, by)
        if xmin < 0 or ymin < 0 or xmin > xmax or ymin > ymax:
            raise ConfigurationError(f"bad bounce bounds {obj.bounce_bounds}")
    x, y = (int(v) for v in obj.start)
    if not (xmin <= x <= xmax and ymin <= y <= ymax):
        raise ConfigurationError(f"object start ({x}, {y}) outside its bounds")
    vx, vy = (int(v) for v in obj.velocity)
    positions = [(x, y)]
    for _ in range(spec.frame_count - 1):
        x += vx
        if x < xmin:
            x, vx = 2 * xmin - x, -vx
        elif x > xmax:
            x, vx = 2 * xmax - x, -vx
        y += vy
        if y < ymin:
            y, vy = 2 * ymin - y, -vy
        elif y > ymax:
            y, vy = 2 * ymax - y, -vy
        if not (xmin <= x <= xmax and ymin <= y <= ymax):
            raise ConfigurationError("object velocity exceeds its bounds")
        positions.append((x, y))
    return positions


def _active_occluders(spec: SceneSpec, frame_index: int) -> list[OccluderSpec]:
    active = []
    for occ in spec.occluders:
        end = occ.end_frame if occ.end_frame is not None else spec.frame_count
        if occ.start_frame <= frame_index <= end:
            active.append(occ)
    return active


def render(spec: SceneSpec) -> tuple[list[np.ndarray], list[list[GroundTruthBox | None]]]:
    """Render the scene.

    Returns (frames, truths) where frames[t-1] is the float image of frame t
    and truths[i][t-1] is object i's 1-based ground-truth box at frame t, or
    None while the object is fully occluded.
    """
    if spec.frame_count < 1:
        raise ConfigurationError("frame_count must be at least 1")
    if spec.flicker is not None:
        f = spec.flicker
        if f.x < 0 or f.y < 0 or f.x + f.w > spec.width or f.y + f.h > spec.height:
            raise ConfigurationError("flicker region outside the background")
    rng = np.random.default_rng(spec.seed)
    world = _render_background(spec, rng)
    textures = [_object_texture(obj, rng) for obj in spec.objects]
    trajectories = [object_positions(obj, spec) for obj in spec.objects]
    steps = camera_path(spec)
    frames: list[np.ndarray] = []
    truths: list[list[GroundTruthBox | None]] = [[] for _ in spec.objects]
    cx = cy = 0
    for t in range(1, spec.frame_count + 1):
        if t > 1:
            dx, dy = steps[t - 2]
            cx, cy = cx + dx, cy + dy
        canvas = world
        if spec.flicker is not None:
            f = spec.flicker
            canvas = world.copy()
            canvas[f.y : f.y + f.h, f.x : f.x + f.w] += rng.uniform(
                -f.amplitude, f.amplitude, (f.h, f.w)
            )
        frame = np.roll(canvas, shift=(cy, cx), axis=(0, 1))  # fresh array
        covered = np.zeros(frame.shape, dtype=bool)
        for i, obj in enumerate(spec.objects):
            x, y = trajectories[i][t - 1]
            frame[y : y + obj.height, x : x + obj.width] = textures[i]
        for occ in _active_occluders(spec, t):
            # scrolls with the background; clipped at the view edges
            ix0 = max(0, occ.x + cx)
            iy0 = max(0, occ.y + cy)
            ix1 = min(spec.width, occ.x + cx + occ.w)
            iy1 = min(spec.height, occ.y + cy + occ.h)
            if ix0 < ix1 and iy0 < iy1:
                frame[iy0:iy1, ix0:ix1] = occ.intensity
                covered[iy0:iy1, ix0:ix1] = True
        for i, obj in enumerate(spec.objects):
            x, y = trajectories[i][t - 1]
            fully_occluded = bool(covered[y : y + obj.height, x : x + obj.width].all())
            truths[i].append(
                None
                if fully_occluded
                else GroundTruthBox(
                    frame_index=t, x=x + 1, y=y + 1, w=obj.width, h=obj.height
                )
            )
        frames.append(np.clip(frame, 0.0, 255.0))
    return frames, truths
