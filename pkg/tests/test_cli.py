import csv
import json
import os

import numpy as np
import pytest

from gapclust.cli import main
from gapclust.datasets import make_bridged_blobs


def run_cli(args):
    """Invoke the entry point in-process; returns (exit_code)."""
    try:
        main(list(args))
    except SystemExit as exc:
        return int(exc.code or 0)
    return 0


@pytest.fixture
def blob_csv(tmp_path):
    data = make_bridged_blobs()
    path = tmp_path / "blobs.csv"
    rows = []
    for i in range(data.n):
        rows.append(f"{data.points[i,0]},{data.points[i,1]},{data.labels[i]}")
    path.write_text("\n".join(rows) + "\n")
    return str(path)


@pytest.fixture
def two_point_csv(tmp_path):
    path = tmp_path / "two.csv"
    path.write_text("0.0,0.0\n1.0,0.0\n")
    return str(path)


def read_summary(outdir):
    with open(os.path.join(outdir, "summary.json")) as fh:
        return json.load(fh)


class TestCluster:
    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_gap_two_points(self, two_point_csv, tmp_path):
        out = str(tmp_path / "out")
        code = run_cli(["cluster", "--input", two_point_csv, "--method", "gap",
                        "--sigma", "1", "--alpha", "-1", "--output-dir", out])
        assert code == 0
        summary = read_summary(out)
        assert summary["cluster_count"] >= 1
        assert summary["converged"] is True
        assert os.path.exists(os.path.join(out, "labels.csv"))
        assert os.path.exists(os.path.join(out, "exemplar_edges.csv"))
        assert os.path.exists(os.path.join(out, "nodes.csv"))

    def test_k_cut_on_bridged_blobs(self, blob_csv, tmp_path):
        out = str(tmp_path / "out")
        code = run_cli(["cluster", "--input", blob_csv, "--method", "k_cut",
                        "--sigma", "1", "--k", "1", "--has-labels",
                        "--output-dir", out])
        assert code == 0
        summary = read_summary(out)
        assert summary["cluster_count"] == 2
        assert summary["error_rate"] == 0.0

    def test_k_dcc_cut(self, blob_csv, tmp_path):
        out = str(tmp_path / "out")
        code = run_cli(["cluster", "--input", blob_csv, "--method", "k_dcc_cut",
                        "--sigma", "1", "--k", "1", "--has-labels",
                        "--output-dir", out])
        assert code == 0
        assert read_summary(out)["cluster_count"] == 2

    def test_dense_ap(self, blob_csv, tmp_path):
        out = str(tmp_path / "out")
        code = run_cli(["cluster", "--input", blob_csv, "--method", "dense_ap",
                        "--has-labels", "--output-dir", out])
        assert code == 0
        summary = read_summary(out)
        assert summary["shared_preference"] is not None
        assert summary["cluster_count"] >= 1

    def test_decision_graph(self, blob_csv, tmp_path):
        out = str(tmp_path / "out")
        code = run_cli(["cluster", "--input", blob_csv, "--method",
                        "decision_graph", "--sigma", "1", "--has-labels",
                        "--output-dir", out])
        assert code == 0
        rows = list(csv.DictReader(open(os.path.join(out, "decision_graph.csv"))))
        assert len(rows) == 39
        assert set(rows[0].keys()) == {"node", "abs_potential", "edge_length", "product"}

    def test_verbose_writes_trace(self, two_point_csv, tmp_path):
        out = str(tmp_path / "out")
        code = run_cli(["cluster", "--input", two_point_csv, "--method", "gap",
                        "--sigma", "1", "--alpha", "-3", "--verbose",
                        "--output-dir", out])
        assert code == 0
        rows = list(csv.DictReader(open(os.path.join(out, "trace.csv"))))
        assert rows
        assert set(rows[0].keys()) == {"iteration", "net_similarity", "exemplar_count"}

    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_mushroom_format(self, tmp_path):
        path = tmp_path / "mush.data"
        recs = []
        for i in range(6):
            label = "e" if i % 2 else "p"
            attrs = [chr(ord("a") + (i + j) % 3) for j in range(22)]
            recs.append(label + "," + ",".join(attrs))
        path.write_text("\n".join(recs) + "\n")
        out = str(tmp_path / "out")
        code = run_cli(["cluster", "--input", str(path), "--format", "mushroom",
                        "--method", "gap", "--sigma", "4", "--alpha", "-4",
                        "--output-dir", out])
        assert code == 0
        summary = read_summary(out)
        assert summary["metric"] == "hamming"
        assert summary["error_rate"] is not None


class TestExitCodes:
    def test_missing_alpha_is_usage_error(self, two_point_csv, tmp_path):
        code = run_cli(["cluster", "--input", two_point_csv, "--method", "gap",
                        "--sigma", "1", "--output-dir", str(tmp_path)])
        assert code == 1

    def test_missing_k_is_usage_error(self, two_point_csv, tmp_path):
        code = run_cli(["cluster", "--input", two_point_csv, "--method", "k_cut",
                        "--sigma", "1", "--output-dir", str(tmp_path)])
        assert code == 1

    def test_bad_data_is_data_error(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n3,nope\n")
        code = run_cli(["cluster", "--input", str(path), "--method", "gap",
                        "--sigma", "1", "--alpha", "-3",
                        "--output-dir", str(tmp_path)])
        assert code == 2

    def test_strict_nonconvergence_is_exit_3(self, blob_csv, tmp_path):
        code = run_cli(["cluster", "--input", blob_csv, "--method", "gap",
                        "--sigma", "1", "--alpha", "-6", "--has-labels",
                        "--max-iterations", "2", "--strict",
                        "--output-dir", str(tmp_path)])
        assert code == 3

    def test_nonstrict_nonconvergence_is_exit_0(self, blob_csv, tmp_path):
        code = run_cli(["cluster", "--input", blob_csv, "--method", "gap",
                        "--sigma", "1", "--alpha", "-6", "--has-labels",
                        "--max-iterations", "2",
                        "--output-dir", str(tmp_path)])
        assert code == 0


class TestConfigHandling:
    def test_config_file_provides_values(self, two_point_csv, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"input={two_point_csv}\nmethod=gap\nsigma=1\nalpha=-3\n"
            f"output_dir={tmp_path / 'out'}\n"
        )
        code = run_cli(["cluster", "--config", str(cfg)])
        assert code == 0
        assert read_summary(str(tmp_path / "out"))["alpha"] == -3.0

    def test_flags_win_over_config(self, two_point_csv, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"input={two_point_csv}\nmethod=gap\nsigma=1\nalpha=-3\n"
            f"output_dir={tmp_path / 'out'}\n"
        )
        code = run_cli(["cluster", "--config", str(cfg), "--alpha", "-7"])
        assert code == 0
        assert read_summary(str(tmp_path / "out"))["alpha"] == -7.0

    def test_unknown_config_key(self, two_point_csv, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("inptu=whoops\n")
        code = run_cli(["cluster", "--config", str(cfg), "--input", two_point_csv,
                        "--method", "gap", "--sigma", "1", "--alpha", "-3"])
        assert code == 1

    def test_backend_flag(self, two_point_csv, tmp_path):
        out = str(tmp_path / "out")
        code = run_cli(["cluster", "--input", two_point_csv, "--method", "gap",
                        "--sigma", "1", "--alpha", "-3", "--backend", "python",
                        "--output-dir", out])
        assert code == 0
        assert read_summary(out)["backend"] == "python"

    def test_env_var_output_dir(self, two_point_csv, tmp_path, monkeypatch):
        out = str(tmp_path / "envout")
        monkeypatch.setenv("GAPCLUST_OUTPUT_DIR", out)
        code = run_cli(["cluster", "--input", two_point_csv, "--method", "gap",
                        "--sigma", "1", "--alpha", "-3"])
        assert code == 0
        assert os.path.exists(os.path.join(out, "summary.json"))


class TestSchemaAndDeterminism:
    def test_summary_schema_stable_across_methods(self, blob_csv, tmp_path):
        keysets = []
        for i, args in enumerate([
            ["--method", "gap", "--sigma", "1", "--alpha", "-6"],
            ["--method", "dense_ap"],
            ["--method", "k_cut", "--sigma", "1", "--k", "1"],
            ["--method", "decision_graph", "--sigma", "1"],
        ]):
            out = str(tmp_path / f"out{i}")
            code = run_cli(["cluster", "--input", blob_csv, "--has-labels",
                            "--output-dir", out] + args)
            assert code == 0
            keysets.append(frozenset(read_summary(out).keys()))
        assert len(set(keysets)) == 1

    def test_rerun_identical_artifacts(self, blob_csv, tmp_path):
        outs = []
        for i in range(2):
            out = str(tmp_path / f"run{i}")
            code = run_cli(["cluster", "--input", blob_csv, "--method", "gap",
                            "--sigma", "1", "--alpha", "-6", "--has-labels",
                            "--seed", "3", "--verbose", "--output-dir", out])
            assert code == 0
            outs.append(out)
        for name in ("labels.csv", "exemplar_edges.csv", "nodes.csv", "trace.csv"):
            a = open(os.path.join(outs[0], name)).read()
            b = open(os.path.join(outs[1], name)).read()
            assert a == b, name
        sa = read_summary(outs[0])
        sb = read_summary(outs[1])
        for skip in ("mp_seconds", "outputs"):
            sa.pop(skip), sb.pop(skip)
        assert sa == sb


class TestBenchmarkAndSweep:
    def test_benchmark_repeats(self, blob_csv, tmp_path):
        out = str(tmp_path / "bench")
        code = run_cli(["benchmark", "--input", blob_csv, "--sigma", "1",
                        "--alpha", "-6", "--has-labels", "--repeats", "3",
                        "--output-dir", out])
        assert code == 0
        report = json.load(open(os.path.join(out, "benchmark.json")))
        assert report["repeats"] == 3
        methods = {r["method"] for r in report["results"]}
        assert methods == {"gap", "dense_ap"}
        for res in report["results"]:
            assert len(res["mp_seconds"]) == 3
        assert report["support_pair_count"] < report["dense_pair_count"]
        rows = list(csv.DictReader(open(os.path.join(out, "benchmark.csv"))))
        assert len(rows) == 6  # 2 methods x 3 repeats

    def test_benchmark_compare_backends(self, blob_csv, tmp_path):
        out = str(tmp_path / "bench")
        code = run_cli(["benchmark", "--input", blob_csv, "--sigma", "1",
                        "--alpha", "-6", "--repeats", "1", "--has-labels",
                        "--compare-backends", "--output-dir", out])
        assert code == 0
        report = json.load(open(os.path.join(out, "benchmark.json")))
        from gapclust import available_backends

        assert {r["backend"] for r in report["results"]} == set(available_backends())

    def test_benchmark_subsample(self, blob_csv, tmp_path):
        out = str(tmp_path / "bench")
        code = run_cli(["benchmark", "--input", blob_csv, "--sigma", "1",
                        "--alpha", "-6", "--repeats", "1", "--subsample", "20",
                        "--has-labels", "--output-dir", out])
        assert code == 0
        report = json.load(open(os.path.join(out, "benchmark.json")))
        assert report["n"] == 20
        assert report["full_dataset"] is False

    def test_sweep(self, blob_csv, tmp_path):
        out = str(tmp_path / "sweep")
        code = run_cli(["sweep", "--input", blob_csv, "--sigma", "1",
                        "--alphas", "2,6,20", "--has-labels",
                        "--output-dir", out])
        assert code == 0
        rows = list(csv.DictReader(open(os.path.join(out, "sweep.csv"))))
        assert [r["alpha_magnitude"] for r in rows] == ["2.0", "6.0", "20.0"]
        ks = [int(r["cluster_count"]) for r in rows]
        assert ks == sorted(ks, reverse=True)  # more negative alpha, fewer clusters

    def test_oracle_subcommand(self, tmp_path):
        path = tmp_path / "tiny.csv"
        path.write_text("0,0\n1,0\n5,0\n")
        code = run_cli(["oracle", "--input", str(path), "--sigma", "1",
                        "--alpha", "-3", "--output-dir", str(tmp_path)])
        assert code == 0


def test_readme_example_claim():
    # the quick-start example promises k=2 at ARI 1.0 on the bundled moons
    from gapclust import GapParams, compute_distance_matrix, gap_cluster, partition_agreement
    from gapclust.datasets import make_two_moons

    data = make_two_moons()
    dist = compute_distance_matrix(data, "euclidean")
    res = gap_cluster(dist, GapParams(sigma=1.0, alpha=-10.0))
    assert res.clustering.k == 2
    assert partition_agreement(res.clustering, data.labels) == 1.0
