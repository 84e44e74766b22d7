"""Scoring tracker output against ground truth: TD/FD/MD rates, FPS, and the
precision curve.

Boxes are (x, y, w, h) tuples; any consistent pixel-coordinate convention
works since only overlaps and centroid distances are used. A truth box counts
as truly detected when some detection box overlaps it; matching is greedy by
descending overlap area, one detection per truth box.
"""

from collections import defaultdict
from dataclasses import dataclass

from .errors import EvaluationError

PRECISION_THRESHOLDS = tuple(range(0, 51))


@dataclass(frozen=True)
class FrameJudgement:
    """Outcome for one box-level event in one frame."""

    frame_index: int
    outcome: str  # TD | FD | MD | TN
    centroid_error: float | None = None


@dataclass(frozen=True)
class EvalReport:
    td_pct: float
    fd_pct: float
    md_pct: float
    fps: float | None
    precision: tuple[tuple[int, float], ...]

    def to_dict(self) -> dict:
        return {
            "td_pct": self.td_pct,
            "fd_pct": self.fd_pct,
            "md_pct": self.md_pct,
            "fps": self.fps,
            "precision": [[t, f] for t, f in self.precision],
        }


def _overlap_area(a, b) -> float:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    w = min(ax + aw, bx + bw) - max(ax, bx)
    h = min(ay + ah, by + bh) - max(ay, by)
    return max(0.0, w) * max(0.0, h)


def _center(box) -> tuple[float, float]:
    x, y, w, h = box
    return (x + w / 2.0, y + h / 2.0)


def judge_frame(frame_index: int, detections, truths) -> list[FrameJudgement]:
    """Classify one frame's detections against its truth boxes.

    Pairs are matched greedily by descending overlap area. Matched truths are
    TD (with centroid error), surplus detections FD, unmatched truths MD; a
    frame with neither yields a single TN judgement.
    """
    detections = [tuple(d) for d in detections]
    truths = [tuple(t) for t in truths]
    if not detections and not truths:
        return [FrameJudgement(frame_index, "TN")]
    pairs = []
    for ti, t in enumerate(truths):
        for di, d in enumerate(detections):
            area = _overlap_area(t, d)
            if area > 0:
                pairs.append((-area, ti, di))
    pairs.sort()
    used_t: set[int] = set()
    used_d: set[int] = set()
    judgements = []
    for neg_area, ti, di in pairs:
        if ti in used_t or di in used_d:
            continue
        used_t.add(ti)
        used_d.add(di)
        tx, ty = _center(truths[ti])
        dx, dy = _center(detections[di])
        error = ((tx - dx) ** 2 + (ty - dy) ** 2) ** 0.5
        judgements.append(FrameJudgement(frame_index, "TD", error))
    for di in range(len(detections)):
        if di not in used_d:
            judgements.append(FrameJudgement(frame_index, "FD"))
    for ti in range(len(truths)):
        if ti not in used_t:
            judgements.append(FrameJudgement(frame_index, "MD"))
    return judgements


def aggregate(
    judgements,
    fps: float | None = None,
    frame_td_rule: str = "all",
) -> EvalReport:
    """Frame-level TD/FD/MD percentages and the precision curve.

    A frame is TD when its truth boxes are matched ("all" requires every
    truth matched, "any" at least one), FD when it carries any surplus
    detection, MD when it has truth but is not TD. The precision curve is the
    fraction of frames bearing detections whose best matched centroid error
    falls within each threshold 0..50.
    """
    judgements = list(judgements)
    if not judgements:
        raise EvaluationError("nothing to aggregate")
    if frame_td_rule not in ("all", "any"):
        raise ValueError(f"frame_td_rule must be 'all' or 'any', got {frame_td_rule!r}")
    by_frame: dict[int, list[FrameJudgement]] = defaultdict(list)
    for j in judgements:
        by_frame[j.frame_index].append(j)
    n_frames = len(by_frame)
    n_td = n_fd = n_md = 0
    detection_frame_errors = []
    for frame_judgements in by_frame.values():
        outcomes = [j.outcome for j in frame_judgements]
        has_truth = any(o in ("TD", "MD") for o in outcomes)
        matched = outcomes.count("TD")
        missed = outcomes.count("MD")
        if frame_td_rule == "all":
            is_td = has_truth and missed == 0
        else:
            is_td = matched > 0
        is_fd = "FD" in outcomes
        if is_td:
            n_td += 1
        if is_fd:
            n_fd += 1
        if has_truth and not is_td:
            n_md += 1
        if matched > 0 or is_fd:
            errors = [j.centroid_error for j in frame_judgements if j.outcome == "TD"]
            detection_frame_errors.append(min(errors) if errors else float("inf"))
    td_pct = 100.0 * n_td / n_frames if n_frames else 0.0
    fd_pct = 100.0 * n_fd / (n_td + n_fd) if n_td + n_fd else 0.0
    md_pct = 100.0 * n_md / (n_td + n_md) if n_td + n_md else 0.0
    denom = len(detection_frame_errors)
    precision = tuple(
        (
            t,
            (sum(1 for e in detection_frame_errors if e <= t) / denom) if denom else 0.0,
        )
        for t in PRECISION_THRESHOLDS
    )
    return EvalReport(td_pct=td_pct, fd_pct=fd_pct, md_pct=md_pct, fps=fps, precision=precision)


def measure_fps(frame_count: int, elapsed_seconds: float) -> float:
    """Frames per second of wall-clock compute time."""
    if elapsed_seconds <= 0:
        raise EvaluationError(f"elapsed time must be positive, got {elapsed_seconds}")
    return frame_count / elapsed_seconds
