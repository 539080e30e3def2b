"""Sample-by-feature data container used across the package."""

from dataclasses import dataclass, field

import numpy as np

from .errors import BadDims


@dataclass
class DataMatrix:
    """n samples (rows) by d features (columns), with optional row labels."""

    values: np.ndarray
    labels: list[str] | None = field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise BadDims(f"expected a 2-D matrix, got ndim={self.values.ndim}")
        n, d = self.values.shape
        if n < 3 or d < 1:
            raise BadDims(f"need at least 3 samples and 1 feature, got {n}x{d}")
        if not np.all(np.isfinite(self.values)):
            raise BadDims("data matrix contains non-finite entries")
        if self.labels is not None:
            self.labels = [str(s) for s in self.labels]
            if len(self.labels) != n:
                raise BadDims(
                    f"{len(self.labels)} labels for {n} rows"
                )

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def as_values(X) -> np.ndarray:
    """Accept a DataMatrix or a plain array-like and return the float matrix."""
    if isinstance(X, DataMatrix):
        return X.values
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise BadDims(f"expected a 2-D matrix, got ndim={arr.ndim}")
    return arr
