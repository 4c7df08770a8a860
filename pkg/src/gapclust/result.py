"""Cluster assignments, quality metrics, and plot-data export."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError


@dataclass
class Clustering:
    """Exemplar-based partition: every node points at an exemplar node.

    Exemplars point at themselves, so ``assignment`` is idempotent and the
    cluster count equals the number of distinct assignment values.
    ``trace`` holds (iteration, net similarity, exemplar count) rows when
    the producing engine was asked to record them.
    """

    assignment: np.ndarray
    exemplars: np.ndarray
    converged: bool = True
    iterations: int = 0
    mp_seconds: float = 0.0
    trace: list = field(default_factory=list)

    def __post_init__(self):
        self.assignment = np.asarray(self.assignment, dtype=np.int64)
        self.exemplars = np.unique(np.asarray(self.exemplars, dtype=np.int64))

    @property
    def n(self) -> int:
        return self.assignment.shape[0]

    @property
    def k(self) -> int:
        return int(self.exemplars.shape[0])

    def labels(self) -> np.ndarray:
        """Compact cluster ids in [0, k), ordered by exemplar index."""
        return np.searchsorted(self.exemplars, self.assignment)

    @classmethod
    def from_labels(cls, labels, **kw) -> "Clustering":
        """Adapt plain component labels (e.g. from the cut baselines).

        The smallest member of each component stands in as its exemplar.
        """
        labels = np.asarray(labels)
        n = labels.shape[0]
        assignment = np.empty(n, dtype=np.int64)
        reps: dict[int, int] = {}
        for i in range(n):
            reps.setdefault(int(labels[i]), i)
        for i in range(n):
            assignment[i] = reps[int(labels[i])]
        return cls(assignment=assignment, exemplars=np.unique(assignment), **kw)


def error_rate(clustering: Clustering, labels) -> float:
    """Fraction of points disagreeing with their cluster's majority label.

    Majority ties go to the lexicographically smallest label. Singleton
    clusters are always pure, so read this jointly with the cluster count.
    """
    if labels is None:
        raise InputError("error_rate needs ground-truth labels")
    labels = list(labels)
    if len(labels) != clustering.n:
        raise InputError(
            f"got {len(labels)} labels for {clustering.n} points"
        )
    errors = 0
    members: dict[int, list[int]] = {}
    for i, e in enumerate(clustering.assignment):
        members.setdefault(int(e), []).append(i)
    for group in members.values():
        counts: dict[str, int] = {}
        for i in group:
            counts[labels[i]] = counts.get(labels[i], 0) + 1
        tag = min(counts, key=lambda lab: (-counts[lab], lab))
        errors += sum(1 for i in group if labels[i] != tag)
    return errors / clustering.n


def _pair_count(counts: np.ndarray) -> float:
    return float((counts * (counts - 1) // 2).sum())


def partition_agreement(clustering, labels) -> float:
    """Adjusted Rand index between a clustering and a reference labeling.

    Accepts a :class:`Clustering` or any label sequence for either side.
    1.0 iff the partitions are identical; 0.0 expected for random
    agreement.
    """
    a = clustering.assignment if isinstance(clustering, Clustering) else clustering
    b = labels.assignment if isinstance(labels, Clustering) else labels
    _, x = np.unique(np.asarray(a), return_inverse=True)
    _, y = np.unique(np.asarray(b), return_inverse=True)
    if x.shape[0] != y.shape[0]:
        raise InputError("partitions must cover the same points")
    n = x.shape[0]
    nx = x.max() + 1
    ny = y.max() + 1
    contingency = np.bincount(x * ny + y, minlength=nx * ny).reshape(nx, ny)
    sum_ij = _pair_count(contingency.ravel())
    sum_a = _pair_count(contingency.sum(axis=1))
    sum_b = _pair_count(contingency.sum(axis=0))
    total = n * (n - 1) / 2
    expected = sum_a * sum_b / total if total else 0.0
    maximum = (sum_a + sum_b) / 2
    if maximum == expected:
        # Only happens when both partitions are all-singletons or both are
        # one cluster, which makes them identical.
        return 1.0
    return (sum_ij - expected) / (maximum - expected)


def export_exemplar_graph(clustering: Clustering, edges_path, nodes_path, points=None):
    """Write the trimmed graph: one edge per non-exemplar, plus a node table.

    The node table carries coordinates only for 2-d point data, which is
    what the scatter-style figures need.
    """
    with open(edges_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "exemplar"])
        for i, e in enumerate(clustering.assignment):
            if i != e:
                writer.writerow([i, int(e)])
    labels = clustering.labels()
    has_xy = (
        points is not None
        and np.asarray(points).ndim == 2
        and np.asarray(points).shape[1] == 2
        and np.issubdtype(np.asarray(points).dtype, np.number)
    )
    with open(nodes_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if has_xy:
            writer.writerow(["node", "x", "y", "cluster"])
            pts = np.asarray(points, dtype=np.float64)
            for i in range(clustering.n):
                writer.writerow([i, repr(pts[i, 0]), repr(pts[i, 1]), int(labels[i])])
        else:
            writer.writerow(["node", "cluster"])
            for i in range(clustering.n):
                writer.writerow([i, int(labels[i])])


def write_labels_csv(clustering: Clustering, path) -> None:
    labels = clustering.labels()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "cluster", "exemplar"])
        for i in range(clustering.n):
            writer.writerow([i, int(labels[i]), int(clustering.assignment[i])])
