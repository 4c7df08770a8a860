"""In-tree construction and the edge-cutting baselines.

The in-tree links every node to its nearest strictly-lower-potential
neighbor, giving a directed forest with a single root (the global potential
minimum) and exactly n-1 edges. Edges that span clusters tend to be long
and to start at locally dense nodes, which is what the cutting baselines
and the decision-graph export exploit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DistanceMatrix
from .errors import ParameterError
from .potential import PotentialField

ROOT = -1


@dataclass
class InTree:
    """Parent links, edge lengths, and depths of the directed tree.

    ``parent[root] == ROOT`` and ``edge_length[root] == 0``; every other
    node's parent precedes it in the potential total order, so parent
    chains terminate at the root.
    """

    parent: np.ndarray
    edge_length: np.ndarray
    root: int
    depth: np.ndarray

    @property
    def n(self) -> int:
        return self.parent.shape[0]


@dataclass
class DecisionGraphPoint:
    node: int
    potential_magnitude: float
    edge_length: float
    product: float


def build_in_tree(dist: DistanceMatrix, field: PotentialField) -> InTree:
    """Link each node to the nearest node that precedes it in the total order.

    Distance ties are broken toward the smallest node index. The unique
    order-minimal node becomes the root.
    """
    d = dist.d
    n = dist.n
    order = field.sorted_nodes
    parent = np.full(n, ROOT, dtype=np.int64)
    edge_length = np.zeros(n, dtype=np.float64)
    depth = np.zeros(n, dtype=np.int64)
    for t in range(1, n):
        i = order[t]
        cands = order[:t]
        row = d[i, cands]
        best = row.min()
        parent[i] = cands[row == best].min()
        edge_length[i] = d[i, parent[i]]
        depth[i] = depth[parent[i]] + 1
    return InTree(parent=parent, edge_length=edge_length, root=field.root, depth=depth)


def _component_labels(tree: InTree, cut_nodes: np.ndarray) -> np.ndarray:
    """Labels after removing the parent edges of ``cut_nodes`` (plus the root)."""
    n = tree.n
    cut = np.zeros(n, dtype=bool)
    cut[cut_nodes] = True
    labels = np.full(n, -1, dtype=np.int64)
    next_label = 0
    # Depth-ordered traversal visits parents before children.
    for i in np.argsort(tree.depth, kind="stable"):
        if tree.parent[i] == ROOT or cut[i]:
            labels[i] = next_label
            next_label += 1
        else:
            labels[i] = labels[tree.parent[i]]
    return labels


def _check_k(tree: InTree, k: int) -> None:
    if not 0 <= k <= tree.n - 1:
        raise ParameterError(f"k must lie in [0, {tree.n - 1}], got {k}")


def k_cut(tree: InTree, k: int) -> np.ndarray:
    """Remove the k longest edges (ties by start-node index) and label components."""
    _check_k(tree, k)
    starts = np.flatnonzero(tree.parent != ROOT)
    ranked = starts[np.lexsort((starts, -tree.edge_length[starts]))]
    return _component_labels(tree, ranked[:k])


def k_dcc_cut(tree: InTree, field: PotentialField, k: int) -> np.ndarray:
    """Remove the edges of the k nodes with largest |edge length x potential|."""
    _check_k(tree, k)
    starts = np.flatnonzero(tree.parent != ROOT)
    product = tree.edge_length[starts] * np.abs(field.p[starts])
    ranked = starts[np.lexsort((starts, -product))]
    return _component_labels(tree, ranked[:k])


def decision_graph(tree: InTree, field: PotentialField) -> list[DecisionGraphPoint]:
    """Per-node (|potential|, edge length, product) records, largest product first.

    The root has no outgoing edge and is omitted. Product ties order by
    node index.
    """
    starts = np.flatnonzero(tree.parent != ROOT)
    mags = np.abs(field.p[starts])
    lengths = tree.edge_length[starts]
    products = mags * lengths
    ranked = np.lexsort((starts, -products))
    return [
        DecisionGraphPoint(
            node=int(starts[r]),
            potential_magnitude=float(mags[r]),
            edge_length=float(lengths[r]),
            product=float(products[r]),
        )
        for r in ranked
    ]


def write_decision_graph_csv(points: list[DecisionGraphPoint], path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "abs_potential", "edge_length", "product"])
        for pt in points:
            writer.writerow(
                [pt.node, repr(pt.potential_magnitude), repr(pt.edge_length), repr(pt.product)]
            )
