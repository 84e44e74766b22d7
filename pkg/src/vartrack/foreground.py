"""Binary moving-object mask from frame differencing and level comparison.

Pixels whose weight says "stable background" are zeroed before differencing.
The remaining difference image is compared, level-wise (low/medium/high),
against the dissimilarity history to separate coherent object motion from
flickering background.
"""

from dataclasses import dataclass

import numpy as np

from .validation import check_same_shape

_CHI = 255  # highest gray value
_LOW_MAX = _CHI // 3  # 85
_HIGH_MIN = 2 * _CHI // 3  # 170


@dataclass(frozen=True)
class LevelBands:
    """Three-level banding for the weight matrix (depends on eta) and for
    gray-valued difference images (fixed 85/170 boundaries)."""

    eta: int

    @property
    def weight_low_max(self) -> int:
        return (self.eta - 1) // 3

    @property
    def weight_high(self) -> int:
        return self.eta - 1

    def weight_level(self, w: np.ndarray) -> np.ndarray:
        """0 = low, 1 = medium, 2 = high."""
        w = np.asarray(w)
        return (w > self.weight_low_max).astype(np.int8) + (w == self.weight_high)

    @staticmethod
    def gray_level(values: np.ndarray) -> np.ndarray:
        """0 = low (<= 85), 1 = medium, 2 = high (>= 170)."""
        values = np.asarray(values)
        return (values > _LOW_MAX).astype(np.int8) + (values >= _HIGH_MIN)


def difference_foreground(current: np.ndarray, bg) -> np.ndarray:
    """Absolute difference of the current frame and the acting background,
    with fully stable pixels (weight == eta-1) zeroed in both first."""
    check_same_shape(current, bg.background, "current frame and background")
    stable = bg.weight == bg.eta - 1
    frame = np.where(stable, 0.0, current)
    model = np.where(stable, 0.0, bg.background)
    return np.abs(frame - model)


def classify_moving(
    foreground: np.ndarray,
    weight: np.ndarray,
    dissimilarity: np.ndarray,
    bands: LevelBands,
) -> np.ndarray:
    """Keep a foreground pixel only where its motion energy is consistent with
    its history; every case not positively identified is background (0).

    Medium-weight pixels require level(F) >= level(D). Low-weight pixels with
    medium-or-high dissimilarity are flickering background; with low
    dissimilarity they need strictly level(F) > level(D).
    """
    check_same_shape(foreground, weight, "foreground and weight")
    check_same_shape(foreground, dissimilarity, "foreground and dissimilarity")
    w_level = bands.weight_level(weight)
    f_level = bands.gray_level(foreground)
    d_level = bands.gray_level(dissimilarity)
    medium = (w_level == 1) & (f_level >= d_level)
    low_clean = (w_level == 0) & (d_level == 0) & (f_level > d_level)
    return (medium | low_clean).astype(np.uint8)
