"""Acting-background construction from a motion-compensated history window.

Each history frame is quantized to ten intensity buckets. Consecutive pairs
whose buckets differ by at most one "agree" at a pixel: agreeing pairs
contribute their mean intensity to the background, disagreeing pairs
contribute their absolute difference to the dissimilarity history, and the
per-pixel weight counts the agreements.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientHistoryError

_BUCKET_EDGES = np.arange(1, 10) / 10  # upper bounds of buckets 1..9


@dataclass(frozen=True)
class ActingBackground:
    """Per-pixel background model for one frame.

    background: mean of agreeing pair intensities (0 where none agreed)
    dissimilarity: mean absolute difference of disagreeing pairs, over eta
    weight: number of consecutive history pairs that agreed, in [0, eta-1]
    """

    background: np.ndarray
    dissimilarity: np.ndarray
    weight: np.ndarray
    eta: int


def quantize(frame: np.ndarray) -> np.ndarray:
    """Map intensities [0, 255] to buckets 1..10.

    Bucket j is the smallest j with intensity/255 <= j/10; an intensity of 0
    (left open by the bucket inequality) lands in bucket 1.
    """
    normalized = np.asarray(frame, dtype=np.float64) / 255.0
    return (np.digitize(normalized, _BUCKET_EDGES, right=True) + 1).astype(np.uint8)


def intersect_pair(
    h_a: np.ndarray, h_b: np.ndarray, q_a: np.ndarray, q_b: np.ndarray
) -> np.ndarray:
    """Commonality of two aligned history frames: the pair mean where their
    buckets differ by at most one, else 0."""
    agree = np.abs(q_a.astype(np.int16) - q_b.astype(np.int16)) <= 1
    return np.where(agree, (h_a + h_b) / 2.0, 0.0)


def build_background(window) -> ActingBackground:
    """Fold the eta-1 consecutive pair comparisons of a HistoryWindow into the
    acting background, dissimilarity history, and weight matrix."""
    eta = window.eta
    if eta < 2:
        raise InsufficientHistoryError(f"need at least 2 history frames, got {eta}")
    shape = window.frames[0].shape
    union_sum = np.zeros(shape)
    union_count = np.zeros(shape, dtype=np.int32)
    diff_sum = np.zeros(shape)
    weight = np.zeros(shape, dtype=np.int32)
    for i in range(eta - 1):
        h_a, h_b = window.frames[i], window.frames[i + 1]
        q_a, q_b = window.quantized[i], window.quantized[i + 1]
        agree = np.abs(q_a.astype(np.int16) - q_b.astype(np.int16)) <= 1
        intersection = np.where(agree, (h_a + h_b) / 2.0, 0.0)
        nonzero = intersection != 0.0
        union_sum += np.where(nonzero, intersection, 0.0)
        union_count += nonzero
        diff_sum += np.where(agree, 0.0, np.abs(h_a - h_b))
        weight += agree
    background = np.divide(
        union_sum,
        union_count,
        out=np.zeros(shape),
        where=union_count > 0,
    )
    # The history of dissimilarities divides by eta even though only eta-1
    # pair terms exist.
    dissimilarity = diff_sum / eta
    return ActingBackground(
        background=background,
        dissimilarity=dissimilarity,
        weight=weight,
        eta=eta,
    )
