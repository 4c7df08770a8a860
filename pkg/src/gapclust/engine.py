"""Similarity model and the affinity-propagation engines.

The sparse engine passes messages only along belief-graph arcs (plus each
node's self pair), so every node ends up represented by itself or one of
its tree ancestors. The dense engine is the classical baseline over all
pairs with negative squared distances; both share the same update rules,
damping, convergence detection, and exemplar extraction.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import backend as _backend
from .belief import BeliefGraph, build_belief_graph
from .data import DistanceMatrix, GapParams
from .errors import ConvergenceWarning, ParameterError
from .intree import InTree, build_in_tree
from .potential import PotentialField, compute_potentials
from .result import Clustering

JITTER_SCALE = 1e-12


@dataclass
class SimilarityModel:
    """Sparse message-passing input in CSR layout.

    Row i holds its self pair first (carrying the preference), then one
    pair per ancestor in path order. ``values`` are what the engines
    consume: negative scaled path lengths on arcs (the log of the
    similarity, mirroring the dense baseline's negative squared distances)
    and preferences on self pairs. ``sim`` keeps the plain similarities
    exp(-path_length / sigma) per arc, aligned with the belief graph's arc
    order. ``forced`` flags single-candidate rows (the tree root): such a
    node can only ever represent itself.
    """

    n: int
    row_ptr: np.ndarray
    col: np.ndarray
    values: np.ndarray
    sim: np.ndarray
    self_pos: np.ndarray
    forced: np.ndarray

    @property
    def pair_count(self) -> int:
        return int(self.values.shape[0])

    @property
    def preference(self) -> np.ndarray:
        return self.values[self.self_pos]

    def support(self, i: int) -> np.ndarray:
        return self.col[self.row_ptr[i] : self.row_ptr[i + 1]]

    def candidates(self, i: int) -> np.ndarray:
        """Ancestors of i (its non-self exemplar candidates), path order."""
        return self.col[self.row_ptr[i] + 1 : self.row_ptr[i + 1]]

    def candidate_values(self, i: int) -> np.ndarray:
        return self.values[self.row_ptr[i] + 1 : self.row_ptr[i + 1]]


@dataclass
class ApState:
    """Messages over the support pairs plus loop diagnostics."""

    responsibility: np.ndarray
    availability: np.ndarray
    iterations: int
    converged: bool
    exemplar_mask: np.ndarray
    mp_seconds: float
    trace: list[tuple[int, float, int]] = field(default_factory=list)


def build_similarity_model(bg: BeliefGraph, params: GapParams) -> SimilarityModel:
    """Turn belief-graph path sums into message values and preferences.

    Each node's preference is alpha times the similarity mass it collects
    from the nodes that can reach it, its own unit mass included, so an
    unreached leaf gets preference alpha: a node joins an ancestor exactly
    when the scaled path there costs less than staying its own exemplar,
    which is what makes the cluster count track |alpha|. Warns when
    |alpha| <= sigma, which tends to over-divide.
    """
    if not params.alpha < 0:
        raise ParameterError(f"alpha must be negative, got {params.alpha}")
    if abs(params.alpha) <= params.sigma:
        warnings.warn(
            f"|alpha| = {abs(params.alpha)} should normally exceed sigma = "
            f"{params.sigma}; expect many clusters",
            UserWarning,
            stacklevel=2,
        )
    n = bg.n
    arc_sims = np.exp(-bg.weights / params.sigma)
    pref = params.alpha * (
        1.0 + np.bincount(bg.targets, weights=arc_sims, minlength=n)
    )
    row_ptr = bg.indptr + np.arange(n + 1, dtype=np.int64)
    self_pos = row_ptr[:-1].copy()
    nnz = bg.edge_count + n
    col = np.empty(nnz, dtype=np.int64)
    values = np.empty(nnz, dtype=np.float64)
    arc_slot = np.ones(nnz, dtype=bool)
    arc_slot[self_pos] = False
    col[self_pos] = np.arange(n)
    col[arc_slot] = bg.targets
    values[self_pos] = pref
    values[arc_slot] = -bg.weights / params.sigma
    forced = (np.diff(row_ptr) == 1).astype(np.uint8)
    return SimilarityModel(
        n=n, row_ptr=row_ptr, col=col, values=values, sim=arc_sims,
        self_pos=self_pos, forced=forced,
    )


def _jittered(values: np.ndarray, params: GapParams) -> np.ndarray:
    """Deterministic relative noise that breaks exact similarity ties."""
    out = values.copy()
    if params.jitter:
        rng = np.random.default_rng(params.jitter_seed)
        out *= 1.0 + JITTER_SCALE * rng.standard_normal(out.shape)
    return out


def _row_argmax(u: np.ndarray, row_ptr: np.ndarray) -> np.ndarray:
    """First position attaining each row's maximum of a CSR-flat array."""
    starts = row_ptr[:-1]
    counts = np.diff(row_ptr)
    m = np.maximum.reduceat(u, starts)
    pos = np.arange(u.shape[0])
    hit = np.where(u == np.repeat(m, counts), pos, u.shape[0])
    return np.minimum.reduceat(hit, starts)


def sparse_ap(model: SimilarityModel, params: GapParams, *, backend: str | None = None,
              trace: bool = False) -> ApState:
    """Run damped message passing over the support pairs until stable.

    Stops once the exemplar indicator is nonempty and identical for
    ``convergence_window`` consecutive iterations, else at
    ``max_iterations`` with a :class:`ConvergenceWarning`.
    """
    kernel = _backend.get_backend(backend)
    n = model.n
    s_run = _jittered(model.values, params)
    r = np.zeros_like(s_run)
    a = np.zeros_like(s_run)
    colsum = np.empty(n, dtype=np.float64)
    forced_mask = model.forced.view(np.bool_)
    prev = None
    stable = 0
    converged = False
    iteration = 0
    rows = []
    t0 = time.perf_counter()
    for iteration in range(1, params.max_iterations + 1):
        kernel.sparse_iteration(
            s_run, r, a, model.row_ptr, model.col, model.self_pos,
            model.forced, colsum, params.damping,
        )
        diag = r[model.self_pos] + a[model.self_pos]
        exemplar = (diag > 0.0) | forced_mask
        if trace:
            best = _row_argmax(a + r, model.row_ptr)
            rows.append(
                (iteration, float(model.values[best].sum()), int(exemplar.sum()))
            )
        if prev is not None and np.array_equal(exemplar, prev):
            stable += 1
        else:
            stable = 1
        prev = exemplar
        # a nonempty set is required: an all-negative transient is not
        # convergence, it just has not produced an exemplar yet
        if stable >= params.convergence_window and exemplar.any():
            converged = True
            break
    mp_seconds = time.perf_counter() - t0
    if not converged:
        warnings.warn(
            f"message passing did not converge within {params.max_iterations} "
            "iterations",
            ConvergenceWarning,
            stacklevel=2,
        )
    return ApState(
        responsibility=r,
        availability=a,
        iterations=iteration,
        converged=converged,
        exemplar_mask=prev if prev is not None else np.zeros(n, dtype=bool),
        mp_seconds=mp_seconds,
        trace=rows,
    )


def extract_exemplars(state: ApState, model: SimilarityModel) -> Clustering:
    """Read the final messages into a self-consistent clustering.

    Exemplars are the nodes whose self evidence is positive (the root is
    always one). Every other node takes its best-evidence candidate,
    falling back to the best candidate that actually is an exemplar, and
    becomes a singleton exemplar when none of its candidates made the cut.
    """
    n = model.n
    u = state.availability + state.responsibility
    exemplar = state.exemplar_mask.copy()
    best = _row_argmax(u, model.row_ptr)
    chosen = model.col[best]
    # Best candidate restricted to current exemplars.
    u_masked = np.where(exemplar[model.col], u, -np.inf)
    best_e = _row_argmax(u_masked, model.row_ptr)
    has_e = u_masked[best_e] > -np.inf
    chosen_e = model.col[best_e]
    assignment = np.empty(n, dtype=np.int64)
    for i in range(n):
        if exemplar[i]:
            assignment[i] = i
        elif exemplar[chosen[i]]:
            assignment[i] = chosen[i]
        elif has_e[i]:
            assignment[i] = chosen_e[i]
        else:
            assignment[i] = i
            exemplar[i] = True
    return Clustering(
        assignment=assignment,
        exemplars=np.flatnonzero(exemplar),
        converged=state.converged,
        iterations=state.iterations,
        mp_seconds=state.mp_seconds,
    )


def net_similarity(model: SimilarityModel, assignment: np.ndarray) -> float:
    """Objective value: summed message values to exemplars, preferences for self."""
    total = 0.0
    for i in range(model.n):
        k = assignment[i]
        if k == i:
            total += model.values[model.self_pos[i]]
        else:
            seg = slice(model.row_ptr[i] + 1, model.row_ptr[i + 1])
            idx = np.flatnonzero(model.col[seg] == k)
            if idx.size == 0:
                return -np.inf
            total += model.values[seg][idx[0]]
    return float(total)


def _dense_message_loop(s_run: np.ndarray, params: GapParams, kernel,
                        trace_s: np.ndarray | None = None):
    """Shared dense loop; ``s_run`` already carries preferences on its diagonal."""
    n = s_run.shape[0]
    r = np.zeros_like(s_run)
    a = np.zeros_like(s_run)
    colsum = np.empty(n, dtype=np.float64)
    diag_idx = np.arange(n)
    prev = None
    stable = 0
    converged = False
    iteration = 0
    rows = []
    t0 = time.perf_counter()
    for iteration in range(1, params.max_iterations + 1):
        kernel.dense_iteration(s_run, r, a, colsum, params.damping)
        exemplar = (r[diag_idx, diag_idx] + a[diag_idx, diag_idx]) > 0.0
        if trace_s is not None:
            chosen = np.argmax(a + r, axis=1)
            rows.append(
                (iteration, float(trace_s[diag_idx, chosen].sum()), int(exemplar.sum()))
            )
        if prev is not None and np.array_equal(exemplar, prev):
            stable += 1
        else:
            stable = 1
        prev = exemplar
        if stable >= params.convergence_window and exemplar.any():
            converged = True
            break
    mp_seconds = time.perf_counter() - t0
    if not converged:
        warnings.warn(
            f"message passing did not converge within {params.max_iterations} "
            "iterations",
            ConvergenceWarning,
            stacklevel=3,
        )
    return r, a, prev, iteration, converged, mp_seconds, rows


def _extract_dense(r: np.ndarray, a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = r.shape[0]
    diag_idx = np.arange(n)
    u = a + r
    exemplar = u[diag_idx, diag_idx] > 0.0
    if not exemplar.any():
        return diag_idx.astype(np.int64), diag_idx.astype(np.int64)
    e_idx = np.flatnonzero(exemplar)
    chosen = np.argmax(u, axis=1)
    best_e = e_idx[np.argmax(u[:, e_idx], axis=1)]
    assignment = np.where(exemplar[chosen], chosen, best_e).astype(np.int64)
    assignment[e_idx] = e_idx
    return assignment, e_idx


def run_dense_messages(s_matrix: np.ndarray, params: GapParams, *,
                       backend: str | None = None, trace: bool = False) -> Clustering:
    """Dense AP over an arbitrary prepared similarity matrix.

    ``s_matrix`` must already hold preferences on its diagonal; no jitter
    is applied here. Mainly useful for cross-checking the sparse engine.
    """
    kernel = _backend.get_backend(backend)
    s_run = np.ascontiguousarray(s_matrix, dtype=np.float64)
    r, a, _, iterations, converged, mp_seconds, rows = _dense_message_loop(
        s_run, params, kernel, trace_s=s_run if trace else None
    )
    assignment, exemplars = _extract_dense(r, a)
    c = Clustering(
        assignment=assignment,
        exemplars=exemplars,
        converged=converged,
        iterations=iterations,
        mp_seconds=mp_seconds,
    )
    c.trace = rows
    return c


def dense_ap(dist: DistanceMatrix, shared_preference: float | None = None,
             params: GapParams | None = None, *, backend: str | None = None,
             trace: bool = False) -> Clustering:
    """Classical dense AP baseline with s(i,j) = -d(i,j)^2.

    The shared preference defaults to the median off-diagonal similarity,
    the standard choice for a moderate number of clusters.
    """
    if params is None:
        params = GapParams(sigma=1.0, alpha=-1.0)
    n = dist.n
    if n == 1:
        return Clustering(assignment=[0], exemplars=[0], converged=True)
    s_mat = -(dist.d.astype(np.float64) ** 2)
    off_diag = s_mat[~np.eye(n, dtype=bool)]
    if shared_preference is None:
        shared_preference = float(np.median(off_diag))
    np.fill_diagonal(s_mat, shared_preference)
    if params.jitter:
        rng = np.random.default_rng(params.jitter_seed)
        s_mat *= 1.0 + JITTER_SCALE * rng.standard_normal(s_mat.shape)
    kernel = _backend.get_backend(backend)
    clean = s_mat if trace else None
    r, a, _, iterations, converged, mp_seconds, rows = _dense_message_loop(
        s_mat, params, kernel, trace_s=clean
    )
    assignment, exemplars = _extract_dense(r, a)
    c = Clustering(
        assignment=assignment,
        exemplars=exemplars,
        converged=converged,
        iterations=iterations,
        mp_seconds=mp_seconds,
    )
    c.trace = rows
    return c


@dataclass
class GapResult:
    """Everything produced by one end-to-end sparse pipeline run."""

    field: PotentialField
    tree: InTree
    graph: BeliefGraph
    model: SimilarityModel
    state: ApState
    clustering: Clustering


def gap_cluster(dist: DistanceMatrix, params: GapParams, *,
                backend: str | None = None, trace: bool = False) -> GapResult:
    """Full pipeline: potentials, in-tree, belief graph, sparse AP, extraction."""
    pf = compute_potentials(dist, params.sigma)
    tree = build_in_tree(dist, pf)
    graph = build_belief_graph(tree)
    model = build_similarity_model(graph, params)
    state = sparse_ap(model, params, backend=backend, trace=trace)
    clustering = extract_exemplars(state, model)
    return GapResult(
        field=pf, tree=tree, graph=graph, model=model, state=state,
        clustering=clustering,
    )
