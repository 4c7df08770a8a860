"""Brute-force reference solvers used only for verification.

Everything here is deliberately naive and shares nothing with the main
pipeline beyond the input types, so agreement between the two is evidence,
not tautology. No performance goals apply.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DistanceMatrix, GapParams
from .engine import SimilarityModel
from .errors import ParameterError

MAX_EXHAUSTIVE_N = 15


@dataclass
class ValidConfiguration:
    """A self-consistent assignment, its net value, and the win margin.

    ``margin`` is the gap to the best configuration with a different
    exemplar subset; near-zero margins mean the optimum is effectively
    tied.
    """

    assignment: np.ndarray
    net_similarity: float
    margin: float = np.inf


def brute_force_exemplars(model: SimilarityModel) -> ValidConfiguration:
    """Exhaustive maximizer of net value over valid configurations.

    Enumerates every exemplar subset (ascending bitmask order, so ties
    resolve deterministically), gives each remaining node its best
    candidate inside the subset, and keeps the best total. Subsets leaving
    some node without a reachable exemplar are invalid.
    """
    n = model.n
    if n > MAX_EXHAUSTIVE_N:
        raise ParameterError(
            f"exhaustive search refuses n = {n} > {MAX_EXHAUSTIVE_N}"
        )
    pref = model.preference
    cand_ids = [model.candidates(i) for i in range(n)]
    cand_s = [
        model.values[model.row_ptr[i] + 1 : model.row_ptr[i + 1]] for i in range(n)
    ]
    best_net = -np.inf
    second_net = -np.inf
    best_assignment = None
    for mask in range(1, 1 << n):
        net = 0.0
        assignment = np.empty(n, dtype=np.int64)
        valid = True
        for i in range(n):
            if mask & (1 << i):
                assignment[i] = i
                net += pref[i]
                continue
            pick = -1
            pick_s = -np.inf
            for k, sv in zip(cand_ids[i], cand_s[i]):
                if mask & (1 << int(k)) and sv > pick_s:
                    pick = int(k)
                    pick_s = sv
            if pick < 0:
                valid = False
                break
            assignment[i] = pick
            net += pick_s
        if not valid:
            continue
        if net > best_net:
            second_net = best_net
            best_net = net
            best_assignment = assignment
        elif net > second_net:
            second_net = net
    return ValidConfiguration(
        assignment=best_assignment,
        net_similarity=float(best_net),
        margin=float(best_net - second_net),
    )


def brute_force_exemplars_dense(s_matrix: np.ndarray) -> ValidConfiguration:
    """Unconstrained variant: any node may serve any other as exemplar.

    ``s_matrix`` carries preferences on its diagonal. Used to verify the
    dense baseline.
    """
    s = np.asarray(s_matrix, dtype=np.float64)
    n = s.shape[0]
    if n > MAX_EXHAUSTIVE_N:
        raise ParameterError(
            f"exhaustive search refuses n = {n} > {MAX_EXHAUSTIVE_N}"
        )
    best_net = -np.inf
    best_assignment = None
    for mask in range(1, 1 << n):
        net = 0.0
        assignment = np.empty(n, dtype=np.int64)
        for i in range(n):
            if mask & (1 << i):
                assignment[i] = i
                net += s[i, i]
                continue
            pick = -1
            pick_s = -np.inf
            for k in range(n):
                if k != i and mask & (1 << k) and s[i, k] > pick_s:
                    pick = k
                    pick_s = s[i, k]
            assignment[i] = pick
            net += pick_s
        if net > best_net:
            best_net = net
            best_assignment = assignment
    return ValidConfiguration(assignment=best_assignment, net_similarity=float(best_net))


@dataclass
class NaiveStages:
    """Reference recomputation of every pipeline stage."""

    potentials: np.ndarray
    root: int
    parent: np.ndarray
    edge_length: np.ndarray
    ancestors: list[list[int]]
    path_weights: list[list[float]]


def naive_stage_oracles(dist: DistanceMatrix, params: GapParams) -> NaiveStages:
    """Recompute potentials, parents, and path sums the slow, obvious way.

    Potentials accumulate per-row in index order; parents come from a full
    scan with explicit order comparisons; path weights from per-node walks
    to the root.
    """
    d = dist.d
    n = dist.n
    p = np.empty(n, dtype=np.float64)
    for i in range(n):
        row = np.exp(-(d[i] ** 2) / params.sigma)
        acc = 0.0
        for j in range(n):
            acc += row[j]
        p[i] = -acc
    root = 0
    for i in range(1, n):
        if (p[i], i) < (p[root], root):
            root = i
    parent = np.full(n, -1, dtype=np.int64)
    edge_length = np.zeros(n, dtype=np.float64)
    for i in range(n):
        if i == root:
            continue
        best = -1
        for k in range(n):
            if (p[k], k) < (p[i], i) and (best < 0 or d[i, k] < d[i, best]):
                best = k
        parent[i] = best
        edge_length[i] = d[i, best]
    ancestors: list[list[int]] = []
    path_weights: list[list[float]] = []
    for i in range(n):
        anc: list[int] = []
        wts: list[float] = []
        acc = 0.0
        cur = i
        while parent[cur] != -1:
            acc += edge_length[cur]
            cur = int(parent[cur])
            anc.append(cur)
            wts.append(float(acc))
        ancestors.append(anc)
        path_weights.append(wts)
    return NaiveStages(
        potentials=p,
        root=root,
        parent=parent,
        edge_length=edge_length,
        ancestors=ancestors,
        path_weights=path_weights,
    )
