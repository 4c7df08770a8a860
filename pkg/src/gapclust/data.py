"""Datasets, pairwise distances, and the shared parameter bundle.

The whole pipeline consumes nothing but a symmetric dissimilarity matrix, so
this module is the only place that ever looks at raw features.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, ParameterError, ParseError

METRICS = ("euclidean", "hamming")


@dataclass
class Dataset:
    """Points plus optional ground-truth labels.

    ``points`` is an (n, m) array: float64 for coordinate data, strings for
    categorical attribute data. Labels, when present, are kept verbatim.
    """

    points: np.ndarray
    labels: list[str] | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points)
        if self.points.ndim != 2:
            raise InputError("points must form a 2-d array (one row per point)")
        if self.labels is not None and len(self.labels) != self.n:
            raise InputError(
                f"got {len(self.labels)} labels for {self.n} points"
            )

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def m(self) -> int:
        return self.points.shape[1]

    @property
    def is_categorical(self) -> bool:
        return not np.issubdtype(self.points.dtype, np.number)

    def subsample(self, size: int, seed: int = 0) -> "Dataset":
        """Fixed-seed random subsample without replacement (order preserved)."""
        if size >= self.n:
            return self
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(self.n, size=size, replace=False))
        labels = [self.labels[i] for i in keep] if self.labels is not None else None
        return Dataset(self.points[keep], labels)


@dataclass
class DistanceMatrix:
    """Symmetric pairwise dissimilarities with a zero diagonal."""

    d: np.ndarray

    def __post_init__(self):
        self.d = np.ascontiguousarray(self.d, dtype=np.float64)
        if self.d.ndim != 2 or self.d.shape[0] != self.d.shape[1]:
            raise InputError("distance matrix must be square")

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def validate(self) -> None:
        """Assert symmetry, zero diagonal, and non-negativity (exact checks)."""
        if np.any(np.diagonal(self.d) != 0.0):
            raise InputError("distance matrix has a nonzero diagonal entry")
        if np.any(self.d < 0.0):
            raise InputError("distance matrix has a negative entry")
        if not np.array_equal(self.d, self.d.T):
            raise InputError("distance matrix is not symmetric")


@dataclass(frozen=True)
class GapParams:
    """Kernel scale, preference constant, and message-passing controls.

    ``sigma`` scales both the potential kernel (squared distances) and the
    path-length similarities; ``alpha`` is the negative proportionality
    constant turning summed incoming similarities into preferences. The
    remaining fields control the AP loop. ``jitter_seed`` feeds the tiny
    deterministic tie-breaking noise; set ``jitter=False`` to disable it.
    """

    sigma: float
    alpha: float
    damping: float = 0.9
    max_iterations: int = 1000
    convergence_window: int = 50
    jitter: bool = True
    jitter_seed: int = 0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ParameterError(f"sigma must be positive, got {self.sigma}")
        if not self.alpha < 0:
            raise ParameterError(f"alpha must be negative, got {self.alpha}")
        if not 0.5 <= self.damping < 1:
            raise ParameterError(
                f"damping must lie in [0.5, 1), got {self.damping}"
            )
        if self.max_iterations < 1:
            raise ParameterError("max_iterations must be at least 1")
        if self.convergence_window < 1:
            raise ParameterError("convergence_window must be at least 1")


def compute_distance_matrix(data: Dataset, metric: str = "euclidean") -> DistanceMatrix:
    """Dense pairwise distances under the requested metric.

    ``euclidean`` needs coordinate features, ``hamming`` categorical ones;
    hamming counts disagreeing attributes, so every entry is an integer in
    [0, m]. Deterministic: identical input gives bit-identical output.
    """
    if data.n == 0:
        raise InputError("cannot compute distances for an empty dataset")
    if metric not in METRICS:
        raise ParameterError(f"unknown metric {metric!r}, expected one of {METRICS}")
    if metric == "euclidean":
        if data.is_categorical:
            raise InputError("euclidean metric requires real-valued features")
        return DistanceMatrix(_euclidean(data.points.astype(np.float64)))
    if not data.is_categorical:
        raise InputError("hamming metric requires categorical features")
    return DistanceMatrix(_hamming(data.points))


def _euclidean(x: np.ndarray, block: int = 512) -> np.ndarray:
    # Per-pair sqrt of summed squared differences. (a-b)**2 == (b-a)**2
    # bitwise and the reduction order per pair is fixed, so the result is
    # exactly symmetric with an exactly zero diagonal.
    n = x.shape[0]
    d = np.empty((n, n), dtype=np.float64)
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        diff = x[lo:hi, None, :] - x[None, :, :]
        np.sqrt(np.einsum("ijk,ijk->ij", diff, diff), out=d[lo:hi])
    return d


def _hamming(x: np.ndarray, block: int = 512) -> np.ndarray:
    n, m = x.shape
    codes = np.empty((n, m), dtype=np.int32)
    for col in range(m):
        _, codes[:, col] = np.unique(x[:, col], return_inverse=True)
    d = np.empty((n, n), dtype=np.float64)
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        neq = codes[lo:hi, None, :] != codes[None, :, :]
        d[lo:hi] = neq.sum(axis=2)
    return d


def _split_row(line: str, delimiter: str | None) -> list[str]:
    if delimiter is None:
        return line.split()
    return [f.strip() for f in line.split(delimiter)]


def load_csv(path, has_labels: bool = False, label_column: int = -1) -> Dataset:
    """Load a delimited numeric point file, one point per row.

    Comma-delimited if the first data row contains a comma, otherwise
    whitespace-delimited. With ``has_labels`` the designated column is kept
    verbatim as the label and excluded from the coordinates.
    """
    with open(path) as fh:
        raw = [line.strip() for line in fh]
    lines = [(i + 1, line) for i, line in enumerate(raw) if line]
    if not lines:
        raise ParseError(f"no data rows in {path}")
    delimiter = "," if "," in lines[0][1] else None
    width = None
    data_rows = []
    label_rows: list[str] = []
    for rownum, line in lines:
        fields = _split_row(line, delimiter)
        if width is None:
            width = len(fields)
            if has_labels:
                if not -width <= label_column < width:
                    raise ParseError(
                        f"label column {label_column} out of range for "
                        f"{width} columns"
                    )
                label_index = label_column % width
        elif len(fields) != width:
            raise ParseError(
                f"expected {width} fields, got {len(fields)}", row=rownum
            )
        if has_labels:
            label_rows.append(fields[label_index])
            fields = [f for i, f in enumerate(fields) if i != label_index]
        if not fields:
            raise ParseError("no coordinate columns left", row=rownum)
        try:
            data_rows.append([float(f) for f in fields])
        except ValueError as exc:
            raise ParseError(str(exc), row=rownum) from None
    points = np.asarray(data_rows, dtype=np.float64)
    return Dataset(points, label_rows if has_labels else None)


def load_mushroom(path) -> Dataset:
    """Load a UCI agaricus-lepiota style file: class label plus 22 categorical attributes.

    The missing-value token "?" counts as an ordinary category, so two
    missing entries match.
    """
    attrs: list[list[str]] = []
    labels: list[str] = []
    with open(path) as fh:
        raw = [line.strip() for line in fh]
    records = [(i + 1, line) for i, line in enumerate(raw) if line]
    if not records:
        raise ParseError(f"no records in {path}")
    for recnum, line in records:
        fields = line.split(",")
        if len(fields) != 23:
            raise ParseError(
                f"expected 23 comma-separated fields, got {len(fields)}", row=recnum
            )
        labels.append(fields[0])
        attrs.append(fields[1:])
    return Dataset(np.asarray(attrs, dtype=str), labels)
