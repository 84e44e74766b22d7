"""scikit-learn style front end for the detect-and-track pipeline.

The method needs no training, so `fit` only validates input and parameters;
`transform`/`predict` run detection and tracking over a whole sequence. The
estimator composes with sklearn tooling (`get_params`, `set_params`,
`clone`).
"""

from sklearn.base import BaseEstimator

from .pipeline import PipelineConfig, track_sequence
from .validation import check_frame_stack


class MovingObjectTracker(BaseEstimator):
    """Detects and tracks moving objects in a grayscale frame stack.

    Parameters mirror the pipeline defaults: `eta` history frames, gate and
    dilation factor `alpha`, infeasible-cost sentinel `phi`, blob size floors,
    and the coasting limit `invisible_max` (None means 2 * eta).
    """

    def __init__(
        self,
        eta: int = 4,
        alpha: float = 1.5,
        phi: float = 1e6,
        min_blob_area: int = 9,
        min_object_side: int = 2,
        invisible_max: int | None = None,
    ):
        self.eta = eta
        self.alpha = alpha
        self.phi = phi
        self.min_blob_area = min_blob_area
        self.min_object_side = min_object_side
        self.invisible_max = invisible_max

    def _config(self) -> PipelineConfig:
        config = PipelineConfig(
            eta=self.eta,
            alpha=self.alpha,
            phi=self.phi,
            min_blob_area=self.min_blob_area,
            min_object_side=self.min_object_side,
            invisible_max=self.invisible_max,
        )
        config.validate()
        return config

    def fit(self, X=None, y=None):
        """Validate parameters (and X when given); no training happens."""
        self._config()
        if X is not None:
            check_frame_stack(X)
        self.is_fitted_ = True
        return self

    def transform(self, X) -> list[list[tuple[int, int, int, int, int]]]:
        """Run the pipeline over a (T, rows, cols) stack.

        Returns one list per input frame of (track_id, x, y, w, h) tuples with
        1-based top-left coordinates; frames 1..eta are always empty.
        """
        stack = check_frame_stack(X)
        result = track_sequence(stack, self._config())
        per_frame: list[list[tuple[int, int, int, int, int]]] = [
            [] for _ in range(stack.shape[0])
        ]
        for frame, track_id, x, y, w, h in result.observations:
            per_frame[frame - 1].append((track_id, x, y, w, h))
        return per_frame

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)

    def predict(self, X):
        """Alias of `transform` for predictor-style call sites."""
        return self.transform(X)
