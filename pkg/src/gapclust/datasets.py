"""Synthetic dataset generators for demos and verification.

Coordinates come out at a scale where kernel widths around 1 are sensible,
matching the parameter ranges the nonspherical examples are quoted at.
"""

from __future__ import annotations

import numpy as np

from .data import Dataset


def make_two_spirals(n: int = 300, noise: float = 0.05, scale: float = 1.0,
                     seed: int = 7) -> Dataset:
    """Two interleaved Archimedean spiral arms, labeled "0" and "1".

    One full turn per arm starting a half-turn out, sampled uniformly by
    arc length so density stays even along the arms.
    """
    rng = np.random.default_rng(seed)
    per = n // 2
    t = np.sqrt(np.linspace(np.pi ** 2, (2.0 * np.pi) ** 2, per))
    pts = []
    labels = []
    for arm, phase in enumerate((0.0, np.pi)):
        x = scale * t * np.cos(t + phase)
        y = scale * t * np.sin(t + phase)
        arm_pts = np.column_stack([x, y])
        arm_pts += noise * rng.standard_normal(arm_pts.shape)
        pts.append(arm_pts)
        labels.extend([str(arm)] * per)
    return Dataset(np.vstack(pts), labels)


def make_two_moons(n: int = 300, noise: float = 0.02, radius: float = 2.5,
                   ygap: float = 0.3, seed: int = 11) -> Dataset:
    """Two interleaving half circles, labeled "0" and "1"."""
    rng = np.random.default_rng(seed)
    per = n // 2
    t = np.linspace(0.0, np.pi, per)
    upper = np.column_stack([radius * np.cos(t), radius * np.sin(t)])
    lower = np.column_stack(
        [radius - radius * np.cos(t), radius * ygap - radius * np.sin(t)]
    )
    pts = np.vstack([upper, lower])
    pts += noise * rng.standard_normal(pts.shape)
    labels = ["0"] * per + ["1"] * per
    return Dataset(pts, labels)


def make_bridged_blobs(per_blob: int = 20, separation: float = 12.0,
                       spread: float = 0.6, seed: int = 3) -> Dataset:
    """Two tight Gaussian blobs far apart; the in-tree must bridge them once."""
    rng = np.random.default_rng(seed)
    a = spread * rng.standard_normal((per_blob, 2))
    b = spread * rng.standard_normal((per_blob, 2)) + np.array([separation, 0.0])
    labels = ["a"] * per_blob + ["b"] * per_blob
    return Dataset(np.vstack([a, b]), labels)


def make_categorical_blobs(n: int = 800, n_attrs: int = 22, n_clusters: int = 12,
                           flip_prob: float = 0.12, n_values: int = 6,
                           seed: int = 5) -> Dataset:
    """Categorical points mutated from random cluster templates.

    Structure mimics attribute-vector data with latent groups: each point
    copies its cluster's template and flips each attribute to a random
    value with probability ``flip_prob``. Labels name the template.
    """
    rng = np.random.default_rng(seed)
    alphabet = np.array([chr(ord("a") + v) for v in range(n_values)])
    templates = rng.integers(0, n_values, size=(n_clusters, n_attrs))
    owner = rng.integers(0, n_clusters, size=n)
    codes = templates[owner]
    flips = rng.random((n, n_attrs)) < flip_prob
    codes = np.where(flips, rng.integers(0, n_values, size=(n, n_attrs)), codes)
    points = alphabet[codes]
    labels = [str(c) for c in owner]
    return Dataset(points.astype(str), labels)
