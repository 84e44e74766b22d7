"""Input validation helpers for array-facing entry points."""

import numpy as np


def check_gray_image(image, name: str = "image") -> np.ndarray:
    """Coerce to a 2-D float64 array and reject degenerate or non-finite input."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D (rows, cols), got shape {arr.shape}")
    if arr.shape[0] < 2 or arr.shape[1] < 2:
        raise ValueError(f"{name} must be at least 2x2, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray, names: str = "inputs") -> None:
    if a.shape != b.shape:
        raise ValueError(f"{names} must share one shape, got {a.shape} vs {b.shape}")


def check_frame_stack(X, name: str = "X") -> np.ndarray:
    """Coerce a sequence of frames to a (T, rows, cols) float64 stack.

    Accepts a 3-D array or an iterable of equally sized 2-D arrays. Intensities
    must be finite; range is not clamped here (ingest owns clamping).
    """
    if isinstance(X, np.ndarray) and X.ndim == 3:
        stack = np.asarray(X, dtype=np.float64)
    else:
        frames = [check_gray_image(f, f"{name}[{i}]") for i, f in enumerate(X)]
        if not frames:
            raise ValueError(f"{name} is empty")
        shape = frames[0].shape
        for i, f in enumerate(frames):
            if f.shape != shape:
                raise ValueError(
                    f"{name}[{i}] has shape {f.shape}, expected {shape}"
                )
        stack = np.stack(frames)
    if stack.shape[0] < 1 or stack.shape[1] < 2 or stack.shape[2] < 2:
        raise ValueError(f"{name} must be (T, rows>=2, cols>=2), got {stack.shape}")
    if not np.all(np.isfinite(stack)):
        raise ValueError(f"{name} contains non-finite values")
    return stack


def check_positive(value, name: str) -> None:
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
