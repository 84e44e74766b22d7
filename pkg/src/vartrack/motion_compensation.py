"""Camera-motion estimation and removal via phase correlation.

The apparent (pseudo) motion of the background between two frames of a moving
camera is modelled as a pure integer translation. The normalized cross-power
spectrum of two frames inverse-transforms to an impulse whose position gives
that translation; multiplying the moved frame's spectrum by the matching
complex exponential undoes it. All shifts use circular (wrap-around)
semantics; positive dx is rightward, positive dy is downward.
"""

from dataclasses import dataclass

import numpy as np

from .background_model import quantize
from .errors import NoSignalError
from .validation import check_gray_image

# Bins with cross-power magnitude below this contribute nothing.
_NORM_EPS = 1e-12


@dataclass(frozen=True)
class ShiftEstimate:
    """Integer translation of a moved frame relative to a reference."""

    dx: int
    dy: int
    peak_value: float


@dataclass(frozen=True)
class HistoryWindow:
    """The eta motion-compensated predecessors of a frame, most recent first,
    with their quantized (bucket 1..10) forms and per-frame shift estimates.
    """

    frames: list  # of (rows, cols) float arrays, aligned to the current frame
    quantized: list  # of matching uint8 bucket images
    shifts: list  # of ShiftEstimate

    @property
    def eta(self) -> int:
        return len(self.frames)


def forward_transform(frame) -> np.ndarray:
    """2-D DFT of a gray image (complex spectrum, same shape)."""
    pixels = check_gray_image(frame, "frame")
    return np.fft.fft2(pixels)


def inverse_transform(spectrum: np.ndarray) -> np.ndarray:
    """Inverse 2-D DFT, discarding the imaginary residue."""
    return np.fft.ifft2(spectrum).real


def phase_correlate(reference: np.ndarray, moved: np.ndarray) -> ShiftEstimate:
    """Estimate the integer shift of `moved` relative to `reference`.

    Both arguments are spectra from `forward_transform` and must share a shape.
    The impulse location is read 1-based and wrapped into (-M/2, M/2] x
    (-N/2, N/2]: dx = x-M-1 when x > M/2 else x-1, and likewise for dy.
    """
    if reference.shape != moved.shape:
        raise ValueError(
            f"spectra must share a shape, got {reference.shape} vs {moved.shape}"
        )
    cross = np.conj(reference) * moved
    magnitude = np.abs(cross)
    if not np.any(magnitude > _NORM_EPS):
        raise NoSignalError("phase correlation of all-zero spectra")
    spectrum = np.where(magnitude > _NORM_EPS, cross / np.maximum(magnitude, _NORM_EPS), 0)
    surface = np.fft.ifft2(spectrum).real
    rows, cols = surface.shape  # rows = N, cols = M
    peak = int(np.argmax(surface))  # ties -> smallest row-major index
    row0, col0 = divmod(peak, cols)
    x_bar = col0 + 1
    y_bar = row0 + 1
    dx = x_bar - cols - 1 if x_bar > cols / 2 else x_bar - 1
    dy = y_bar - rows - 1 if y_bar > rows / 2 else y_bar - 1
    return ShiftEstimate(dx=dx, dy=dy, peak_value=float(surface[row0, col0]))


def _shift_exponential(shape: tuple[int, int], dx: int, dy: int) -> np.ndarray:
    rows, cols = shape
    fy = np.fft.fftfreq(rows)[:, None]
    fx = np.fft.fftfreq(cols)[None, :]
    return np.exp(2j * np.pi * (fx * dx + fy * dy))


def compensate(moved: np.ndarray, shift: ShiftEstimate) -> np.ndarray:
    """Undo an estimated shift: returns the moved frame aligned to its
    reference, computed in the frequency domain with circular wrap.
    """
    rows, cols = moved.shape
    if abs(shift.dx) >= cols or abs(shift.dy) >= rows:
        raise ValueError(f"shift {shift.dx, shift.dy} exceeds frame size {cols, rows}")
    aligned = np.fft.ifft2(moved * _shift_exponential(moved.shape, shift.dx, shift.dy))
    return aligned.real


def align_history(current, predecessors) -> HistoryWindow:
    """Shift-compensate each predecessor onto the current frame's coordinates.

    `predecessors` must be ordered most recent first; each is phase-correlated
    against the current frame, compensated, and quantized.
    """
    reference = forward_transform(current)
    frames = []
    quantized = []
    shifts = []
    for pred in predecessors:
        pred = check_gray_image(pred, "predecessor")
        if pred.shape != reference.shape:
            raise ValueError(
                f"history frame shape {pred.shape} differs from current "
                f"{reference.shape}"
            )
        spectrum = np.fft.fft2(pred)
        estimate = phase_correlate(reference, spectrum)
        aligned = compensate(spectrum, estimate)
        frames.append(aligned)
        quantized.append(quantize(aligned))
        shifts.append(estimate)
    return HistoryWindow(frames=frames, quantized=quantized, shifts=shifts)
