"""Frame and ground-truth I/O: PGM/PNG sequences, annotation files, detection CSVs.

Conventions: frames are indexed 1..T in lexicographic filename order; ground
truth and detection CSVs use 1-based pixel coordinates with the origin at the
top-left corner.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import EmptySequenceError, SequenceFormatError, SequenceIOError

# ITU-R BT.601 luma weights for color ingest.
_BT601 = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class Frame:
    """One grayscale frame. Pixels are float64 so that shift compensation can
    produce fractional intensities; clamping to [0, 255] happens at ingest only.
    """

    index: int
    pixels: np.ndarray  # (height, width), float64

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class GroundTruthBox:
    """Annotated object box; x, y are the 1-based top-left pixel."""

    frame_index: int
    x: int
    y: int
    w: int
    h: int


def _to_gray(arr: np.ndarray, path: Path) -> np.ndarray:
    """Collapse color planes with BT.601 weights, round half up."""
    if arr.ndim == 2:
        return arr.astype(np.float64)
    if arr.ndim == 3 and arr.shape[2] in (3, 4):
        luma = arr[:, :, :3].astype(np.float64) @ _BT601
        return np.floor(luma + 0.5)
    raise SequenceFormatError(f"{path}: unsupported pixel layout {arr.shape}")


def read_image(path) -> np.ndarray:
    """Read one 8-bit PGM (P2/P5) or PNG image as a float64 gray array."""
    path = Path(path)
    try:
        with Image.open(path) as img:
            if img.mode == "P":
                img = img.convert("RGB")
            if img.mode not in ("L", "RGB", "RGBA"):
                raise SequenceFormatError(f"{path}: unsupported mode {img.mode!r}")
            arr = np.asarray(img)
    except (OSError, Image.UnidentifiedImageError) as exc:
        raise SequenceFormatError(f"{path}: cannot decode image: {exc}") from exc
    gray = _to_gray(arr, path)
    return np.clip(gray, 0.0, 255.0)


def write_image(path, pixels: np.ndarray) -> None:
    """Write a gray array as PGM (.pgm) or PNG (.png), rounding half up."""
    path = Path(path)
    data = np.floor(np.asarray(pixels, dtype=np.float64) + 0.5)
    data = np.clip(data, 0, 255).astype(np.uint8)
    fmt = "PPM" if path.suffix.lower() == ".pgm" else "PNG"
    try:
        Image.fromarray(data, mode="L").save(path, format=fmt)
    except OSError as exc:
        raise SequenceIOError(f"{path}: cannot write image: {exc}") from exc


def load_sequence(dir_path, pattern: str = "*") -> list[Frame]:
    """Load every image matching `pattern` under `dir_path`, in lexicographic
    order, as frames indexed from 1. All frames must share one resolution.
    """
    directory = Path(dir_path)
    if not directory.is_dir():
        raise SequenceIOError(f"not a directory: {directory}")
    paths = sorted(p for p in directory.glob(pattern) if p.is_file())
    if not paths:
        raise EmptySequenceError(f"no files match {pattern!r} in {directory}")
    frames: list[Frame] = []
    shape = None
    for i, p in enumerate(paths, start=1):
        gray = read_image(p)
        if shape is None:
            shape = gray.shape
        elif gray.shape != shape:
            raise SequenceFormatError(
                f"{p}: resolution {gray.shape[::-1]} differs from first frame "
                f"{shape[::-1]}"
            )
        frames.append(Frame(index=i, pixels=gray))
    return frames


def load_ground_truth(file_path) -> list[GroundTruthBox]:
    """Parse one "x,y,w,h" annotation per line; line k annotates frame k.

    Separators may be commas or tabs. An all-zero line marks a frame where the
    object is absent (fully occluded) and yields no box.
    """
    path = Path(file_path)
    if not path.is_file():
        raise SequenceIOError(f"ground-truth file not found: {path}")
    boxes: list[GroundTruthBox] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.replace("\t", ",").split(",")
        parts = [p for p in (s.strip() for s in parts) if p]
        if len(parts) != 4:
            raise SequenceFormatError(
                f"{path}:{lineno}: expected 4 fields 'x,y,w,h', got {len(parts)}"
            )
        try:
            x, y, w, h = (int(round(float(p))) for p in parts)
        except ValueError as exc:
            raise SequenceFormatError(f"{path}:{lineno}: non-numeric field") from exc
        if (x, y, w, h) == (0, 0, 0, 0):
            continue  # object absent this frame
        if w <= 0 or h <= 0:
            raise SequenceFormatError(
                f"{path}:{lineno}: non-positive box dimensions {w}x{h}"
            )
        boxes.append(GroundTruthBox(frame_index=lineno, x=x, y=y, w=w, h=h))
    return boxes


def write_detections(path, rows) -> None:
    """Write per-frame detections as CSV with header frame,id,x,y,w,h.

    `rows` holds (frame_index, track_id, x, y, w, h) tuples; output is ordered
    by (frame, id).
    """
    path = Path(path)
    ordered = sorted(rows, key=lambda r: (r[0], r[1]))
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["frame", "id", "x", "y", "w", "h"])
            for row in ordered:
                writer.writerow([int(v) for v in row])
    except OSError as exc:
        raise SequenceIOError(f"{path}: cannot write detections: {exc}") from exc


def read_detections(path) -> list[tuple[int, int, int, int, int, int]]:
    """Read a detections CSV written by `write_detections`."""
    path = Path(path)
    if not path.is_file():
        raise SequenceIOError(f"detections file not found: {path}")
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["frame", "id", "x", "y", "w", "h"]:
            raise SequenceFormatError(f"{path}: unexpected header {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 6:
                raise SequenceFormatError(f"{path}:{lineno}: expected 6 fields")
            try:
                out.append(tuple(int(v) for v in row))
            except ValueError as exc:
                raise SequenceFormatError(f"{path}:{lineno}: non-integer field") from exc
    return out
