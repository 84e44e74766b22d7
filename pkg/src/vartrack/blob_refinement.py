"""Blob extraction, morphological refinement, and feature vectors.

A detected blob is dilated (bridging fragments and closing holes), its edge
pixels are located by local intensity range against the blob's own intensity
spread, and everything outside the first/last edge pixel of each row and
column is trimmed away. The surviving region yields the object's feature
vector: centroid, bounding-box dimensions, and the three dominant gray
levels.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

_EIGHT = np.ones((3, 3), dtype=bool)
_RING = _EIGHT.copy()
_RING[1, 1] = False
_FAR = 10**9


@dataclass(frozen=True)
class Blob:
    """A set of mask pixels as an (K, 2) array of (row, col) coordinates."""

    pixels: np.ndarray

    @property
    def area(self) -> int:
        return len(self.pixels)

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        """(x, y, w, h) with 0-based top-left corner."""
        rows = self.pixels[:, 0]
        cols = self.pixels[:, 1]
        y0, y1 = int(rows.min()), int(rows.max())
        x0, x1 = int(cols.min()), int(cols.max())
        return (x0, y0, x1 - x0 + 1, y1 - y0 + 1)

    @property
    def centroid(self) -> tuple[float, float]:
        """(row, col) mean of the pixel set."""
        r, c = self.pixels.mean(axis=0)
        return (float(r), float(c))


@dataclass(frozen=True)
class DetectedObject:
    """Feature vector of one refined moving object."""

    centroid: tuple[float, float]  # (row, col)
    height: int
    width: int
    peaks: tuple[int, int, int]
    bbox: tuple[int, int, int, int]  # (x, y, w, h), 0-based
    area: int


def _blob_from_mask(mask: np.ndarray, r0: int = 0, c0: int = 0) -> Blob:
    rows, cols = np.nonzero(mask)
    return Blob(pixels=np.column_stack((rows + r0, cols + c0)))


def _local_mask(pixels: np.ndarray, r0: int, c0: int, shape) -> np.ndarray:
    mask = np.zeros(shape, dtype=bool)
    mask[pixels[:, 0] - r0, pixels[:, 1] - c0] = True
    return mask


def connected_components(mask: np.ndarray, min_blob_area: int = 9) -> list[Blob]:
    """8-connected components of a binary mask, discarding those smaller than
    `min_blob_area` pixels."""
    labels, count = ndimage.label(np.asarray(mask) != 0, structure=_EIGHT)
    blobs = []
    for sl, index in zip(ndimage.find_objects(labels), range(1, count + 1)):
        local = labels[sl] == index
        if int(local.sum()) < min_blob_area:
            continue
        blobs.append(_blob_from_mask(local, sl[0].start, sl[1].start))
    return blobs


def _axial_distance(mask: np.ndarray) -> np.ndarray:
    """Per cell, distance along its row to the nearest True cell (huge where
    the row has none)."""
    n = mask.shape[1]
    idx = np.arange(n)
    left = np.maximum.accumulate(np.where(mask, idx[None, :], -_FAR), axis=1)
    right = np.minimum.accumulate(
        np.where(mask, idx[None, :], _FAR)[:, ::-1], axis=1
    )[:, ::-1]
    return np.minimum(idx[None, :] - left, right - idx[None, :])


def dilation_radius(blob: Blob) -> float:
    """Half the smallest centroid-to-boundary distance (1.0 for degenerate
    blobs whose centroid sits on the boundary)."""
    x0, y0, w, h = blob.bbox
    local = _local_mask(blob.pixels, y0, x0, (h, w))
    interior = ndimage.binary_erosion(local, structure=_EIGHT, border_value=0)
    boundary = np.argwhere(local & ~interior)
    centroid = np.array(blob.centroid) - (y0, x0)
    d = float(np.sqrt(((boundary - centroid) ** 2).sum(axis=1)).min())
    return d / 2.0 if d > 0 else 1.0


def dilate_blob(blob: Blob, frame_shape, alpha: float = 1.5) -> Blob:
    """Grow a blob inside its alpha-scaled bounding box: a candidate pixel
    joins when its row-wise or column-wise gap to the blob is within the
    dilation radius."""
    x0, y0, w, h = blob.bbox
    margin_w = math.ceil((alpha - 1.0) * w / 2.0)
    margin_h = math.ceil((alpha - 1.0) * h / 2.0)
    r0 = max(0, y0 - margin_h)
    r1 = min(frame_shape[0], y0 + h + margin_h)
    c0 = max(0, x0 - margin_w)
    c1 = min(frame_shape[1], x0 + w + margin_w)
    local = _local_mask(blob.pixels, r0, c0, (r1 - r0, c1 - c0))
    radius = dilation_radius(blob)
    gap = np.minimum(_axial_distance(local), _axial_distance(local.T).T)
    return _blob_from_mask(local | (gap <= radius), r0, c0)


def detect_edges(dilated: Blob, frame: np.ndarray, original: Blob) -> np.ndarray:
    """Edge pixels of a dilated blob: those whose 8-neighborhood intensity
    range (in the original frame) reaches the intensity standard deviation of
    the original blob. Returns (K, 2) coordinates."""
    sigma = float(np.std(frame[original.pixels[:, 0], original.pixels[:, 1]]))
    x0, y0, w, h = dilated.bbox
    r0, c0 = max(0, y0 - 1), max(0, x0 - 1)
    r1, c1 = min(frame.shape[0], y0 + h + 1), min(frame.shape[1], x0 + w + 1)
    crop = frame[r0:r1, c0:c1]
    hi = ndimage.maximum_filter(crop, footprint=_RING, mode="constant", cval=-np.inf)
    lo = ndimage.minimum_filter(crop, footprint=_RING, mode="constant", cval=np.inf)
    span = hi - lo
    rows = dilated.pixels[:, 0] - r0
    cols = dilated.pixels[:, 1] - c0
    keep = span[rows, cols] >= sigma
    return dilated.pixels[keep]


def trim_and_intersect(dilated: Blob, edges: np.ndarray) -> Blob | None:
    """Keep only dilated pixels lying between the first and last edge pixel of
    both their row and their column; rows or columns without edge pixels
    contribute nothing. Returns None when nothing survives."""
    if len(edges) == 0:
        return None
    x0, y0, w, h = dilated.bbox
    dmask = _local_mask(dilated.pixels, y0, x0, (h, w))
    emask = _local_mask(edges, y0, x0, (h, w))

    def span_mask(edge_mask: np.ndarray) -> np.ndarray:
        has = edge_mask.any(axis=1)
        first = edge_mask.argmax(axis=1)
        last = edge_mask.shape[1] - 1 - edge_mask[:, ::-1].argmax(axis=1)
        cols = np.arange(edge_mask.shape[1])[None, :]
        return has[:, None] & (cols >= first[:, None]) & (cols <= last[:, None])

    kept = dmask & span_mask(emask) & span_mask(emask.T).T
    if not kept.any():
        return None
    return _blob_from_mask(kept, y0, x0)


def extract_features(blob: Blob, frame: np.ndarray) -> DetectedObject:
    """Centroid, bounding-box dimensions, and top-3 histogram gray levels of a
    refined blob. Ties rank by ascending gray value; fewer than three distinct
    grays repeat the dominant one."""
    values = frame[blob.pixels[:, 0], blob.pixels[:, 1]]
    grays = np.clip(np.floor(values + 0.5), 0, 255).astype(np.int64)
    counts = np.bincount(grays, minlength=256)
    present = np.nonzero(counts)[0]
    order = present[np.lexsort((present, -counts[present]))]
    peaks = list(order[:3])
    while len(peaks) < 3:
        peaks.append(peaks[0])
    x, y, w, h = blob.bbox
    return DetectedObject(
        centroid=blob.centroid,
        height=h,
        width=w,
        peaks=(int(peaks[0]), int(peaks[1]), int(peaks[2])),
        bbox=(x, y, w, h),
        area=blob.area,
    )


def refine_blobs(
    mask: np.ndarray,
    frame: np.ndarray,
    alpha: float = 1.5,
    min_blob_area: int = 9,
    min_object_side: int = 2,
) -> list[DetectedObject]:
    """Full refinement of a foreground mask into detected objects.

    Blobs are dilated independently; dilations that overlap or touch merge
    into one object. Edge trimming then shrinks each merged region, and
    undersized survivors are dropped.
    """
    mask = np.asarray(mask) != 0
    blobs = connected_components(mask, min_blob_area)
    if not blobs:
        return []
    canvas = np.zeros(mask.shape, dtype=bool)
    for blob in blobs:
        dilated = dilate_blob(blob, mask.shape, alpha)
        canvas[dilated.pixels[:, 0], dilated.pixels[:, 1]] = True
    labels, count = ndimage.label(canvas, structure=_EIGHT)
    objects = []
    for sl, index in zip(ndimage.find_objects(labels), range(1, count + 1)):
        region = labels[sl] == index
        merged = _blob_from_mask(region, sl[0].start, sl[1].start)
        core = _blob_from_mask(region & mask[sl], sl[0].start, sl[1].start)
        if core.area == 0:
            continue
        edges = detect_edges(merged, frame, core)
        refined = trim_and_intersect(merged, edges)
        if refined is None or refined.area < min_blob_area:
            continue
        obj = extract_features(refined, frame)
        if obj.height < min_object_side or obj.width < min_object_side:
            continue
        objects.append(obj)
    return objects
