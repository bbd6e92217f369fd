"""Seeded synthetic measures: smooth/random point clouds and grid images.

The grid-image classes mimic a density-image benchmark: several smooth
families (isotropic and anisotropic bump mixtures, ridges, heavy-tailed
bumps), structured shapes, and unstructured noise.
"""

from __future__ import annotations

import zlib

import numpy as np

from .errors import InputError
from .measures import DiscreteMeasure


def generate_synthetic(kind: str, n: int, d: int = 2,
                       seed: int = 0) -> DiscreteMeasure:
    """Point cloud on [0, 1]^d with smooth or unstructured random weights.

    ``smooth`` evaluates a seeded mixture of 3..10 isotropic Gaussian bumps
    at uniformly drawn points; ``random`` draws independent uniform weights.
    Both are normalized to the simplex and deterministic per seed.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    if d < 1:
        raise InputError("d must be >= 1")
    rng = np.random.default_rng(seed)
    positions = rng.random((n, d))
    if kind == "random":
        weights = rng.uniform(0.2, 1.0, size=n)
    elif kind == "smooth":
        n_bumps = int(rng.integers(3, 11))
        centers = rng.random((n_bumps, d))
        sigmas = rng.uniform(0.08, 0.25, size=n_bumps)
        amps = rng.uniform(0.5, 1.5, size=n_bumps)
        weights = np.full(n, 1e-3)
        for c, s, a in zip(centers, sigmas, amps):
            sq = ((positions - c) ** 2).sum(axis=1)
            weights = weights + a * np.exp(-sq / (2.0 * s * s))
    else:
        raise InputError(f"unknown synthetic kind {kind!r}")
    return DiscreteMeasure(positions, weights / weights.sum())


#: Names of the synthetic grid-image classes used by the benchmark command.
GRID_CLASSES = (
    "bumps3",
    "bumps10",
    "aniso",
    "ridge",
    "rings",
    "cauchy",
    "shapes",
    "gradient",
    "noise",
    "noisybumps",
)


def generate_grid_image(class_name: str, size: int, seed: int = 0) -> np.ndarray:
    """One (size, size) nonnegative density image of the requested class."""
    if class_name not in GRID_CLASSES:
        raise InputError(f"unknown image class {class_name!r}; "
                         f"choose from {', '.join(GRID_CLASSES)}")
    # crc32 instead of hash(): string hashing is salted per process.
    rng = np.random.default_rng([zlib.crc32(class_name.encode()), seed])
    coords = (np.arange(size) + 0.5) / size
    gx, gy = np.meshgrid(coords, coords, indexing="ij")

    def bumps(k, sig_lo, sig_hi):
        img = np.zeros((size, size))
        for _ in range(k):
            cx, cy = rng.random(2)
            s = rng.uniform(sig_lo, sig_hi)
            img += rng.uniform(0.5, 1.5) * np.exp(
                -((gx - cx) ** 2 + (gy - cy) ** 2) / (2 * s * s))
        return img

    if class_name == "bumps3":
        img = bumps(3, 0.08, 0.2)
    elif class_name == "bumps10":
        img = bumps(10, 0.04, 0.12)
    elif class_name == "aniso":
        img = np.zeros((size, size))
        for _ in range(4):
            cx, cy = rng.random(2)
            sx = rng.uniform(0.03, 0.08)
            sy = rng.uniform(0.12, 0.3)
            th = rng.uniform(0, np.pi)
            u = (gx - cx) * np.cos(th) + (gy - cy) * np.sin(th)
            v = -(gx - cx) * np.sin(th) + (gy - cy) * np.cos(th)
            img += np.exp(-(u / sx) ** 2 / 2 - (v / sy) ** 2 / 2)
    elif class_name == "ridge":
        th = rng.uniform(0, np.pi)
        off = rng.uniform(0.3, 0.7)
        dist = np.abs((gx - off) * np.cos(th) + (gy - off) * np.sin(th))
        img = np.exp(-(dist / rng.uniform(0.05, 0.15)) ** 2)
    elif class_name == "rings":
        cx, cy = rng.uniform(0.3, 0.7, 2)
        r = np.sqrt((gx - cx) ** 2 + (gy - cy) ** 2)
        img = np.exp(-((r - rng.uniform(0.15, 0.35)) / 0.05) ** 2)
    elif class_name == "cauchy":
        img = np.zeros((size, size))
        for _ in range(3):
            cx, cy = rng.random(2)
            g = rng.uniform(0.02, 0.1)
            img += g * g / (g * g + (gx - cx) ** 2 + (gy - cy) ** 2)
    elif class_name == "shapes":
        img = np.zeros((size, size))
        for _ in range(int(rng.integers(2, 6))):
            if rng.random() < 0.5:
                x0, y0 = rng.uniform(0, 0.7, 2)
                w, h = rng.uniform(0.1, 0.3, 2)
                img += ((gx >= x0) & (gx <= x0 + w)
                        & (gy >= y0) & (gy <= y0 + h)).astype(float)
            else:
                cx, cy = rng.uniform(0.2, 0.8, 2)
                r = rng.uniform(0.05, 0.2)
                img += ((gx - cx) ** 2 + (gy - cy) ** 2 <= r * r).astype(float)
    elif class_name == "gradient":
        a, b = rng.uniform(-1, 1, 2)
        img = 1.0 + a * gx + b * gy - min(0.0, a, b, a + b)
    elif class_name == "noise":
        img = rng.uniform(0.05, 1.0, (size, size))
    else:  # noisybumps
        img = bumps(5, 0.06, 0.15) * rng.uniform(0.2, 1.0, (size, size))
    img = img + 1e-6 * img.max()
    return img
