import os

import numpy as np
import pytest

from gapclust.data import Dataset, compute_distance_matrix

MUSHROOM_ENV = "GAPCLUST_MUSHROOM"


def mushroom_path():
    """Path to the UCI agaricus-lepiota records, if the user supplied them."""
    candidates = [os.environ.get(MUSHROOM_ENV)]
    here = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    candidates.append(os.path.join(here, "data", "agaricus-lepiota.data"))
    for cand in candidates:
        if cand and os.path.exists(cand):
            return cand
    return None


def require_mushroom():
    path = mushroom_path()
    if path is None:
        pytest.skip(
            "mushroom dataset not available: download agaricus-lepiota.data "
            f"from the UCI repository and set {MUSHROOM_ENV} or place it "
            "under data/ (no dataset downloading is built in)"
        )
    return path


def random_points(n, m=2, seed=0, spread=4.0):
    rng = np.random.default_rng(seed)
    return Dataset(spread * rng.standard_normal((n, m)))


def random_distance_matrix(n, seed=0):
    return compute_distance_matrix(random_points(n, seed=seed), "euclidean")


@pytest.fixture
def tmp_csv(tmp_path):
    def write(rows, name="points.csv"):
        path = tmp_path / name
        path.write_text("\n".join(",".join(str(v) for v in row) for row in rows) + "\n")
        return str(path)

    return write
