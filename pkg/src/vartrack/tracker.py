"""Multi-object tracking: constant-velocity Kalman filters, appearance-cost
association, and occlusion-tolerant track lifecycle.

State is (row, col, row-velocity, col-velocity). Association cost between a
track and a detection is the mean absolute difference of their histogram
peaks, gated by the track's predicted centroid and dimensions; infeasible
pairs carry the sentinel cost PHI. Assignment is a greedy per-track minimum
in ascending track-id order.
"""

from dataclasses import dataclass, field

import numpy as np

PHI = 1e6  # sentinel cost; any real peak difference is <= 255

# Constant-velocity transition: position += velocity.
_A = np.array(
    [
        [1.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
)
_H = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])
_Q = 0.01 * np.eye(4)
_R = np.eye(2)
_INITIAL_P = 100.0 * np.eye(4)


@dataclass
class KalmanState:
    """Centroid-plus-velocity state with its error covariance."""

    state: np.ndarray  # (4,)
    covariance: np.ndarray  # (4, 4)

    @property
    def centroid(self) -> tuple[float, float]:
        return (float(self.state[0]), float(self.state[1]))


@dataclass
class Track:
    """A persistent object identity."""

    id: int
    height: int
    width: int
    peaks: tuple[int, int, int]
    kalman: KalmanState
    invisible_count: int = 0
    age: int = 0
    total_visible: int = 0
    bbox: tuple[int, int, int, int] | None = None  # last associated detection

    @property
    def centroid(self) -> tuple[float, float]:
        return self.kalman.centroid


def _new_kalman(centroid) -> KalmanState:
    state = np.array([centroid[0], centroid[1], 0.0, 0.0])
    return KalmanState(state=state, covariance=_INITIAL_P.copy())


def predict(track: Track) -> tuple[float, float]:
    """Advance the track one frame under the constant-velocity model; returns
    the predicted centroid."""
    k = track.kalman
    k.state = _A @ k.state
    k.covariance = _A @ k.covariance @ _A.T + _Q
    return k.centroid


def update_assigned(track: Track, detection) -> None:
    """Fold an associated detection into the track: Kalman measurement update
    on the centroid, features overwritten, invisibility reset."""
    k = track.kalman
    innovation_cov = _H @ k.covariance @ _H.T + _R
    gain = k.covariance @ _H.T @ np.linalg.inv(innovation_cov)
    measurement = np.array(detection.centroid)
    k.state = k.state + gain @ (measurement - _H @ k.state)
    k.covariance = (np.eye(4) - gain @ _H) @ k.covariance
    track.height = detection.height
    track.width = detection.width
    track.peaks = detection.peaks
    track.bbox = detection.bbox
    track.invisible_count = 0
    track.total_visible += 1


def update_unassigned(track: Track) -> None:
    """Coast on the prediction and count the invisible frame."""
    track.invisible_count += 1


def build_cost_matrix(
    tracks: list[Track], detections, alpha: float = 1.5, phi: float = PHI
) -> np.ndarray:
    """(K tracks, L detections) appearance costs. A pair is feasible when the
    detection centroid lies within alpha * (track height, track width) of the
    track's predicted centroid, per axis."""
    costs = np.full((len(tracks), len(detections)), phi)
    for k, track in enumerate(tracks):
        tr, tc = track.centroid
        for l, det in enumerate(detections):
            dr, dc = det.centroid
            if abs(dr - tr) <= alpha * track.height and abs(dc - tc) <= alpha * track.width:
                diffs = [abs(a - b) for a, b in zip(track.peaks, det.peaks)]
                costs[k, l] = sum(diffs) / 3.0
    return costs


def associate(
    costs: np.ndarray, phi: float = PHI
) -> tuple[dict[int, int], list[int], list[int], list[int]]:
    """Greedy per-track assignment over a cost matrix.

    Tracks are served in row order (ascending id); each claims its
    minimum-cost feasible detection, which leaves the pool. Returns
    (assignments row->col, unassigned rows, new-detection cols, discarded
    cols). Leftover detections that were feasible for some already-served
    track are discarded as erroneous; those infeasible everywhere are new.
    """
    n_tracks, n_dets = costs.shape
    assignments: dict[int, int] = {}
    unassigned: list[int] = []
    available = np.ones(n_dets, dtype=bool)
    for k in range(n_tracks):
        row = np.where(available, costs[k], phi)
        if n_dets == 0 or row.min() >= phi:
            unassigned.append(k)
            continue
        l = int(row.argmin())
        assignments[k] = l
        available[l] = False
    new_detections: list[int] = []
    discarded: list[int] = []
    for l in range(n_dets):
        if not available[l]:
            continue
        if n_tracks > 0 and costs[:, l].min() < phi:
            discarded.append(l)
        else:
            new_detections.append(l)
    return assignments, unassigned, new_detections, discarded


@dataclass
class MultiObjectTracker:
    """Frame-by-frame tracker state. One `step` per frame is a single logical
    transaction: predict, associate, update, create, delete."""

    alpha: float = 1.5
    invisible_max: int = 8  # delete a track once unseen for more than this
    phi: float = PHI
    tracks: list[Track] = field(default_factory=list)
    next_id: int = 1

    def _create(self, detection) -> Track:
        track = Track(
            id=self.next_id,
            height=detection.height,
            width=detection.width,
            peaks=detection.peaks,
            kalman=_new_kalman(detection.centroid),
            bbox=detection.bbox,
            total_visible=1,
        )
        self.next_id += 1
        self.tracks.append(track)
        return track

    def initialize_tracks(self, detections) -> list[Track]:
        """Create one track per detection on the first operating frame."""
        return [self._create(det) for det in detections]

    def step(self, detections) -> list[Track]:
        """Process one frame's detections; returns tracks that were associated
        with a detection this frame."""
        if not self.tracks:
            return self.initialize_tracks(detections)
        for track in self.tracks:
            track.age += 1
            predict(track)
        costs = build_cost_matrix(self.tracks, detections, self.alpha, self.phi)
        assignments, unassigned, new_ids, _ = associate(costs, self.phi)
        visible = []
        for k, l in assignments.items():
            update_assigned(self.tracks[k], detections[l])
            visible.append(self.tracks[k])
        for k in unassigned:
            update_unassigned(self.tracks[k])
        for l in new_ids:
            visible.append(self._create(detections[l]))
        self.tracks = [t for t in self.tracks if t.invisible_count <= self.invisible_max]
        return visible
