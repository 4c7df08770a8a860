"""Command-line surface: cluster, benchmark, and sweep.

All artifacts are plain CSV/JSON so results can be plotted with any tool.
Exit codes: 0 success, 1 usage error, 2 data error, 3 non-convergence
(only under ``--strict``).
"""

from __future__ import annotations

import csv
import json
import os
import sys
from dataclasses import dataclass

import click
import numpy as np

from . import __version__
from . import backend as _backend
from .belief import build_belief_graph
from .data import (
    Dataset,
    GapParams,
    compute_distance_matrix,
    load_csv,
    load_mushroom,
)
from .engine import (
    build_similarity_model,
    dense_ap,
    extract_exemplars,
    gap_cluster,
    net_similarity,
    sparse_ap,
)
from .errors import GapClustError, InputError, ParameterError
from .intree import build_in_tree, decision_graph, k_cut, k_dcc_cut, write_decision_graph_csv
from .oracle import brute_force_exemplars
from .potential import compute_potentials
from .result import (
    Clustering,
    error_rate,
    export_exemplar_graph,
    write_labels_csv,
)

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

METHODS = ("gap", "dense_ap", "k_cut", "k_dcc_cut", "decision_graph")


@dataclass
class RunConfig:
    """Merged configuration from flags and an optional key=value file."""

    input: str
    method: str
    format: str = "csv"
    metric: str | None = None
    sigma: float | None = None
    alpha: float | None = None
    shared_preference: float | None = None
    k: int | None = None
    damping: float = 0.9
    max_iterations: int = 1000
    convergence_window: int = 50
    seed: int = 0
    output_dir: str | None = None
    has_labels: bool = False
    label_column: int = -1
    verbose: bool = False
    strict: bool = False
    threads: int = 1
    backend: str = "auto"


_BOOLS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}

_FIELD_TYPES = {
    "input": str, "method": str, "format": str, "metric": str,
    "sigma": float, "alpha": float, "shared_preference": float,
    "k": int, "damping": float, "max_iterations": int,
    "convergence_window": int, "seed": int, "output_dir": str,
    "has_labels": bool, "label_column": int, "verbose": bool,
    "strict": bool, "threads": int, "backend": str,
}


def _read_config_file(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise click.UsageError(
                    f"{path}:{lineno}: expected key=value, got {line!r}"
                )
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in _FIELD_TYPES:
                raise click.UsageError(f"{path}:{lineno}: unknown key {key!r}")
            caster = _FIELD_TYPES[key]
            value = value.strip()
            try:
                values[key] = _BOOLS[value.lower()] if caster is bool else caster(value)
            except (KeyError, ValueError):
                raise click.UsageError(
                    f"{path}:{lineno}: bad value {value!r} for {key}"
                ) from None
    return values


def _merge_config(cli_values: dict, config_path: str | None) -> RunConfig:
    file_values = _read_config_file(config_path) if config_path else {}
    merged = dict(file_values)
    merged.update({k: v for k, v in cli_values.items() if v is not None})
    if "input" not in merged:
        raise click.UsageError("missing --input")
    if "method" not in merged:
        raise click.UsageError("missing --method")
    try:
        cfg = RunConfig(**merged)
    except TypeError as exc:
        raise click.UsageError(str(exc)) from None
    if cfg.method not in METHODS:
        raise click.UsageError(f"unknown method {cfg.method!r}")
    if cfg.format not in ("csv", "mushroom"):
        raise click.UsageError(f"unknown format {cfg.format!r}")
    return cfg


def _validate_method_params(cfg: RunConfig) -> None:
    needs_sigma = cfg.method in ("gap", "k_cut", "k_dcc_cut", "decision_graph")
    if needs_sigma and cfg.sigma is None:
        raise click.UsageError(f"method {cfg.method} requires --sigma")
    if cfg.method == "gap" and cfg.alpha is None:
        raise click.UsageError("method gap requires --alpha")
    if cfg.method in ("k_cut", "k_dcc_cut") and cfg.k is None:
        raise click.UsageError(f"method {cfg.method} requires --k")


def _load_dataset(cfg: RunConfig) -> Dataset:
    if cfg.format == "mushroom":
        return load_mushroom(cfg.input)
    return load_csv(cfg.input, has_labels=cfg.has_labels, label_column=cfg.label_column)


def _metric_for(cfg: RunConfig, data: Dataset) -> str:
    if cfg.metric is not None:
        return cfg.metric
    return "hamming" if data.is_categorical else "euclidean"


def _output_dir(cfg: RunConfig) -> str:
    out = cfg.output_dir or os.environ.get("GAPCLUST_OUTPUT_DIR") or "."
    os.makedirs(out, exist_ok=True)
    return out


def _gap_params(cfg: RunConfig, need_alpha: bool = True) -> GapParams:
    # dense_ap ignores sigma/alpha; placeholders keep the bundle valid.
    sigma = cfg.sigma if cfg.sigma is not None else 1.0
    alpha = cfg.alpha if (need_alpha and cfg.alpha is not None) else -1.0
    return GapParams(
        sigma=sigma,
        alpha=alpha,
        damping=cfg.damping,
        max_iterations=cfg.max_iterations,
        convergence_window=cfg.convergence_window,
        jitter_seed=cfg.seed,
    )


class _Stage:
    """Names the failing pipeline stage in surfaced errors."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, GapClustError):
            exc.stage = self.name
        return False


def _write_trace(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "net_similarity", "exemplar_count"])
        for row in rows:
            writer.writerow([row[0], repr(row[1]), row[2]])


def _summary_skeleton(cfg: RunConfig, n: int, metric: str) -> dict:
    return {
        "method": cfg.method,
        "input": cfg.input,
        "format": cfg.format,
        "metric": metric,
        "n": n,
        "sigma": cfg.sigma,
        "alpha": cfg.alpha,
        "shared_preference": cfg.shared_preference,
        "k_edges_removed": cfg.k if cfg.method in ("k_cut", "k_dcc_cut") else None,
        "cluster_count": None,
        "error_rate": None,
        "converged": None,
        "iterations": None,
        "mp_seconds": None,
        "belief_edge_count": None,
        "support_pair_count": None,
        "net_similarity": None,
        "backend": _backend.active_backend_name() if cfg.backend == "auto" else cfg.backend,
        "seed": cfg.seed,
        "threads": cfg.threads,
        "outputs": {},
    }


def _fill_clustering_summary(summary: dict, clustering: Clustering, data: Dataset) -> None:
    summary["cluster_count"] = clustering.k
    summary["converged"] = bool(clustering.converged)
    summary["iterations"] = clustering.iterations
    summary["mp_seconds"] = clustering.mp_seconds
    if data.labels is not None:
        summary["error_rate"] = error_rate(clustering, data.labels)


def run(cfg: RunConfig) -> dict:
    """Execute one configured run end to end; returns the written summary."""
    _validate_method_params(cfg)
    out = _output_dir(cfg)
    with _Stage("load"):
        data = _load_dataset(cfg)
    metric = _metric_for(cfg, data)
    with _Stage("distance"):
        dist = compute_distance_matrix(data, metric)
    summary = _summary_skeleton(cfg, data.n, metric)
    outputs = summary["outputs"]
    clustering = None

    if cfg.method == "gap":
        params = _gap_params(cfg)
        with _Stage("pipeline"):
            res = gap_cluster(dist, params, backend=cfg.backend, trace=cfg.verbose)
        clustering = res.clustering
        summary["belief_edge_count"] = res.graph.edge_count
        summary["support_pair_count"] = res.model.pair_count
        summary["net_similarity"] = net_similarity(
            res.model, clustering.assignment
        )
        edges_path = os.path.join(out, "exemplar_edges.csv")
        nodes_path = os.path.join(out, "nodes.csv")
        with _Stage("export"):
            export_exemplar_graph(clustering, edges_path, nodes_path,
                                  points=None if data.is_categorical else data.points)
        outputs["exemplar_edges"] = edges_path
        outputs["nodes"] = nodes_path
        if cfg.verbose:
            trace_path = os.path.join(out, "trace.csv")
            _write_trace(res.state.trace, trace_path)
            outputs["trace"] = trace_path
    elif cfg.method == "dense_ap":
        params = _gap_params(cfg, need_alpha=False)
        with _Stage("dense-ap"):
            clustering = dense_ap(
                dist, cfg.shared_preference, params,
                backend=cfg.backend, trace=cfg.verbose,
            )
        pref = cfg.shared_preference
        if pref is None:
            s_offdiag = -(dist.d[~np.eye(dist.n, dtype=bool)] ** 2)
            pref = float(np.median(s_offdiag)) if dist.n > 1 else 0.0
        summary["shared_preference"] = pref
        self_mask = clustering.assignment == np.arange(dist.n)
        d_to_e = dist.d[np.arange(dist.n), clustering.assignment]
        summary["net_similarity"] = float(
            -(d_to_e[~self_mask] ** 2).sum() + pref * self_mask.sum()
        )
        edges_path = os.path.join(out, "exemplar_edges.csv")
        nodes_path = os.path.join(out, "nodes.csv")
        with _Stage("export"):
            export_exemplar_graph(clustering, edges_path, nodes_path,
                                  points=None if data.is_categorical else data.points)
        outputs["exemplar_edges"] = edges_path
        outputs["nodes"] = nodes_path
        if cfg.verbose:
            trace_path = os.path.join(out, "trace.csv")
            _write_trace(clustering.trace, trace_path)
            outputs["trace"] = trace_path
    elif cfg.method in ("k_cut", "k_dcc_cut"):
        params = _gap_params(cfg, need_alpha=False)
        with _Stage("potential"):
            field = compute_potentials(dist, params.sigma)
        with _Stage("in-tree"):
            tree = build_in_tree(dist, field)
        with _Stage("cut"):
            if cfg.method == "k_cut":
                labels = k_cut(tree, cfg.k)
            else:
                labels = k_dcc_cut(tree, field, cfg.k)
        clustering = Clustering.from_labels(labels)
    else:  # decision_graph
        params = _gap_params(cfg, need_alpha=False)
        with _Stage("potential"):
            field = compute_potentials(dist, params.sigma)
        with _Stage("in-tree"):
            tree = build_in_tree(dist, field)
        with _Stage("decision-graph"):
            points = decision_graph(tree, field)
        dg_path = os.path.join(out, "decision_graph.csv")
        write_decision_graph_csv(points, dg_path)
        outputs["decision_graph"] = dg_path

    if clustering is not None:
        _fill_clustering_summary(summary, clustering, data)
        labels_path = os.path.join(out, "labels.csv")
        write_labels_csv(clustering, labels_path)
        outputs["labels"] = labels_path

    summary_path = os.path.join(out, "summary.json")
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    summary["outputs"]["summary"] = summary_path

    if cfg.strict and clustering is not None and not clustering.converged:
        raise _NonConvergence("message passing did not converge (strict mode)")
    return summary


class _NonConvergence(Exception):
    pass


def _common_options(f):
    options = [
        click.option("--input", "input", type=click.Path(), help="Input data file."),
        click.option("--format", "format", type=click.Choice(["csv", "mushroom"]),
                     default=None, help="Input format (default csv)."),
        click.option("--metric", type=click.Choice(["euclidean", "hamming"]),
                     default=None, help="Distance metric (default fits the data)."),
        click.option("--sigma", type=float, default=None,
                     help="Kernel scale for potentials and similarities."),
        click.option("--alpha", type=float, default=None,
                     help="Negative preference constant."),
        click.option("--shared-preference", type=float, default=None,
                     help="Shared preference for dense_ap (default: median)."),
        click.option("--k", type=int, default=None,
                     help="Edge count for the cut methods."),
        click.option("--damping", type=float, default=None, help="Message damping in [0.5, 1)."),
        click.option("--max-iterations", type=int, default=None),
        click.option("--convergence-window", type=int, default=None,
                     help="Iterations the exemplar set must stay unchanged."),
        click.option("--seed", type=int, default=None,
                     help="Seed for the tie-breaking jitter (and subsampling)."),
        click.option("--output-dir", type=click.Path(), default=None,
                     help="Artifact directory (env GAPCLUST_OUTPUT_DIR, default '.')."),
        click.option("--has-labels", is_flag=True, default=None,
                     help="CSV contains a ground-truth label column."),
        click.option("--label-column", type=int, default=None,
                     help="Label column index (default: last)."),
        click.option("--verbose", is_flag=True, default=None,
                     help="Also write the per-iteration trace CSV."),
        click.option("--strict", is_flag=True, default=None,
                     help="Exit 3 when message passing fails to converge."),
        click.option("--threads", type=int, default=None,
                     help="Parallelism cap; current kernels are sequential either way."),
        click.option("--backend", type=click.Choice(["auto", "compiled", "python"]),
                     default=None, help="Message-passing kernel backend."),
        click.option("--config", "config_path", type=click.Path(exists=True),
                     default=None, help="key=value config file; flags win."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


@click.group()
@click.version_option(version=__version__, prog_name="gapclust")
def cli():
    """Exemplar clustering on in-tree structures with sparse affinity propagation.

    The sparse method keeps message passing on the belief graph, whose size
    for deep chains can approach n^2 arcs but normally stays far below the
    dense n*(n-1); degenerate chain-shaped trees cost accordingly more
    memory.
    """


@cli.command()
@_common_options
@click.option("--method", type=click.Choice(list(METHODS)), default=None)
def cluster(config_path, **cli_values):
    """Run one clustering method end to end and write its artifacts."""
    cfg = _merge_config(cli_values, config_path)
    summary = run(cfg)
    click.echo(json.dumps(summary, indent=2))


@cli.command()
@_common_options
@click.option("--repeats", type=int, default=3, show_default=True,
              help="Timing repetitions per method.")
@click.option("--subsample", type=int, default=0, show_default=True,
              help="Fixed-seed subsample size (0 = full dataset).")
@click.option("--compare-backends", is_flag=True, default=False,
              help="Benchmark every available kernel backend.")
def benchmark(config_path, repeats, subsample, compare_backends, **cli_values):
    """Time sparse vs dense message passing on one dataset."""
    cli_values.setdefault("method", None)
    cli_values["method"] = cli_values.get("method") or "gap"
    cfg = _merge_config(cli_values, config_path)
    if cfg.sigma is None or cfg.alpha is None:
        raise click.UsageError("benchmark requires --sigma and --alpha")
    if repeats < 1:
        raise click.UsageError("--repeats must be positive")
    if subsample < 0:
        raise click.UsageError("--subsample must be non-negative")
    out = _output_dir(cfg)
    with _Stage("load"):
        data = _load_dataset(cfg)
    if subsample:
        data = data.subsample(subsample, seed=cfg.seed)
    metric = _metric_for(cfg, data)
    with _Stage("distance"):
        dist = compute_distance_matrix(data, metric)
    params = _gap_params(cfg)
    backends = list(_backend.available_backends()) if compare_backends else [cfg.backend]

    with _Stage("pipeline"):
        field = compute_potentials(dist, params.sigma)
        tree = build_in_tree(dist, field)
        graph = build_belief_graph(tree)
        model = build_similarity_model(graph, params)

    n = data.n
    dense_pairs = n * (n - 1)
    report = {
        "input": cfg.input,
        "n": n,
        "metric": metric,
        "sigma": params.sigma,
        "alpha": params.alpha,
        "repeats": repeats,
        "subsample": subsample or None,
        "full_dataset": not bool(subsample),
        "belief_edge_count": graph.edge_count,
        "support_pair_count": model.pair_count,
        "dense_pair_count": dense_pairs,
        "support_fraction": model.pair_count / dense_pairs if dense_pairs else None,
        "results": [],
    }
    rows = []
    for backend_name in backends:
        for method in ("gap", "dense_ap"):
            samples = []
            for rep in range(repeats):
                if method == "gap":
                    state = sparse_ap(model, params, backend=backend_name)
                    clustering = extract_exemplars(state, model)
                else:
                    clustering = dense_ap(dist, cfg.shared_preference, params,
                                          backend=backend_name)
                err = (error_rate(clustering, data.labels)
                       if data.labels is not None else None)
                samples.append(clustering)
                rows.append({
                    "method": method,
                    "backend": backend_name,
                    "run": rep,
                    "mp_seconds": clustering.mp_seconds,
                    "iterations": clustering.iterations,
                    "converged": bool(clustering.converged),
                    "cluster_count": clustering.k,
                    "error_rate": err,
                })
            times = [c.mp_seconds for c in samples]
            report["results"].append({
                "method": method,
                "backend": backend_name,
                "mp_seconds": times,
                "mp_mean": float(np.mean(times)),
                "mp_std": float(np.std(times, ddof=1)) if len(times) > 1 else 0.0,
                "cluster_counts": [c.k for c in samples],
                "error_rates": [
                    error_rate(c, data.labels) if data.labels is not None else None
                    for c in samples
                ],
                "converged": [bool(c.converged) for c in samples],
            })
    json_path = os.path.join(out, "benchmark.json")
    with open(json_path, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    csv_path = os.path.join(out, "benchmark.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    for res in report["results"]:
        click.echo(
            f"{res['method']:>9} [{res['backend']}]: "
            f"{res['mp_mean']:.3f} ± {res['mp_std']:.3f} s over {repeats} runs, "
            f"clusters {res['cluster_counts']}"
        )
    click.echo(
        f"support pairs {report['support_pair_count']} of {dense_pairs} dense "
        f"({100 * report['support_fraction']:.2f}%)"
    )
    click.echo(f"report: {json_path}")


@cli.command()
@_common_options
@click.option("--alphas", required=True,
              help="Comma-separated preference magnitudes to sweep.")
def sweep(config_path, alphas, **cli_values):
    """Run the sparse method across preference magnitudes, one CSV row each."""
    cli_values["method"] = "gap"
    cfg = _merge_config(cli_values, config_path)
    if cfg.sigma is None:
        raise click.UsageError("sweep requires --sigma")
    try:
        magnitudes = [abs(float(v)) for v in alphas.split(",") if v.strip()]
    except ValueError:
        raise click.UsageError(f"bad --alphas list: {alphas!r}") from None
    if not magnitudes:
        raise click.UsageError("--alphas is empty")
    out = _output_dir(cfg)
    with _Stage("load"):
        data = _load_dataset(cfg)
    metric = _metric_for(cfg, data)
    with _Stage("distance"):
        dist = compute_distance_matrix(data, metric)
    with _Stage("pipeline"):
        field = compute_potentials(dist, cfg.sigma)
        tree = build_in_tree(dist, field)
        graph = build_belief_graph(tree)
    rows = []
    for mag in magnitudes:
        params = GapParams(
            sigma=cfg.sigma, alpha=-mag, damping=cfg.damping,
            max_iterations=cfg.max_iterations,
            convergence_window=cfg.convergence_window, jitter_seed=cfg.seed,
        )
        model = build_similarity_model(graph, params)
        state = sparse_ap(model, params, backend=cfg.backend)
        clustering = extract_exemplars(state, model)
        err = error_rate(clustering, data.labels) if data.labels is not None else None
        rows.append({
            "alpha_magnitude": mag,
            "cluster_count": clustering.k,
            "error_rate": err,
            "converged": bool(clustering.converged),
            "iterations": clustering.iterations,
            "mp_seconds": clustering.mp_seconds,
        })
        click.echo(
            f"|alpha|={mag:g}: {clustering.k} clusters"
            + (f", error {err:.4f}" if err is not None else "")
        )
    csv_path = os.path.join(out, "sweep.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    click.echo(f"sweep: {csv_path}")


@cli.command(hidden=True)
@_common_options
def oracle(config_path, **cli_values):
    """Exhaustive exemplar search on a tiny dataset (verification aid)."""
    cli_values["method"] = "gap"
    cfg = _merge_config(cli_values, config_path)
    if cfg.sigma is None or cfg.alpha is None:
        raise click.UsageError("oracle requires --sigma and --alpha")
    with _Stage("load"):
        data = _load_dataset(cfg)
    with _Stage("distance"):
        dist = compute_distance_matrix(data, _metric_for(cfg, data))
    params = _gap_params(cfg)
    with _Stage("pipeline"):
        field = compute_potentials(dist, params.sigma)
        tree = build_in_tree(dist, field)
        model = build_similarity_model(build_belief_graph(tree), params)
    best = brute_force_exemplars(model)
    click.echo(json.dumps({
        "assignment": [int(v) for v in best.assignment],
        "net_similarity": best.net_similarity,
    }))


def main(argv=None):
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        sys.exit(EXIT_USAGE)
    except click.ClickException as exc:
        exc.show()
        sys.exit(EXIT_USAGE)
    except ParameterError as exc:
        click.echo(f"parameter error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    except _NonConvergence as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_NUMERIC)
    except InputError as exc:
        stage = getattr(exc, "stage", None)
        where = f" [{stage}]" if stage else ""
        click.echo(f"data error{where}: {exc}", err=True)
        sys.exit(EXIT_DATA)
    except GapClustError as exc:
        stage = getattr(exc, "stage", None)
        where = f" [{stage}]" if stage else ""
        click.echo(f"error{where}: {exc}", err=True)
        sys.exit(EXIT_DATA)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(EXIT_DATA)


if __name__ == "__main__":
    main()
