"""Belief graph: the reachability expansion of an in-tree.

Every node gains a directed arc to each of its ancestors, weighted by the
summed edge lengths of the unique connecting path. Arc counts equal the sum
of node depths, which for anything but a degenerate chain stays far below
the n*(n-1) pairs a dense method would touch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .intree import ROOT, InTree


@dataclass
class BeliefGraph:
    """Sparse ancestor arcs in CSR-like layout.

    Node i's arcs occupy ``targets[indptr[i]:indptr[i+1]]`` in path order
    (parent first), with matching cumulative path lengths in ``weights``.
    """

    n: int
    indptr: np.ndarray
    targets: np.ndarray
    weights: np.ndarray

    @property
    def edge_count(self) -> int:
        return int(self.targets.shape[0])

    def ancestors(self, i: int) -> np.ndarray:
        return self.targets[self.indptr[i] : self.indptr[i + 1]]

    def arc_weights(self, i: int) -> np.ndarray:
        return self.weights[self.indptr[i] : self.indptr[i + 1]]


def build_belief_graph(tree: InTree) -> BeliefGraph:
    """Expand the tree in one root-to-leaves pass.

    Each node's ancestor list extends its parent's by one hop; weights are
    the running sums of edge lengths walking away from the node, so a naive
    per-node walk reproduces them bit for bit.
    """
    n = tree.n
    order = np.argsort(tree.depth, kind="stable")  # parents before children
    empty_i = np.empty(0, dtype=np.int64)
    empty_f = np.empty(0, dtype=np.float64)
    anc = [empty_i] * n
    lens = [empty_f] * n
    cums = [empty_f] * n
    for i in order:
        par = tree.parent[i]
        if par != ROOT:
            anc[i] = np.concatenate(([par], anc[par]))
            lens[i] = np.concatenate(([tree.edge_length[i]], lens[par]))
            cums[i] = np.cumsum(lens[i])
    counts = np.fromiter((a.shape[0] for a in anc), dtype=np.int64, count=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    targets = np.concatenate(anc) if n else np.empty(0, dtype=np.int64)
    weights = np.concatenate(cums) if n else np.empty(0, dtype=np.float64)
    return BeliefGraph(n=n, indptr=indptr, targets=targets, weights=weights)
