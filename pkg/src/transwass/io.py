"""File formats: point clouds, CSV grid images, sparse plans and reports.

Point cloud (format ``cloud``): one atom per line, ``w x_1 ... x_d``,
``#`` comments and blank lines ignored.  Grid image (format
``csv-image``): a CSV matrix of nonnegative pixel values; pixel (r, c)
becomes an atom at position (c + 0.5, r + 0.5) with weight value/total.
Plans are stored as 0-based ``i j mass`` triplets.
"""

from __future__ import annotations

import logging

import numpy as np

from .errors import InputError
from .measures import DiscreteMeasure, TransportPlan

logger = logging.getLogger(__name__)

#: Loaded weights further than this from unit mass trigger a warning
#: before being normalized.
NORMALIZE_WARN_TOL = 1e-6

FORMATS = ("cloud", "csv-image")


def _significant_lines(path):
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield lineno, line


def load_point_cloud(path) -> DiscreteMeasure:
    """Read a ``w x_1 ... x_d`` cloud file, normalizing weights to mass 1."""
    rows = []
    dim = None
    for lineno, line in _significant_lines(path):
        fields = line.split()
        if len(fields) < 2:
            raise InputError(f"{path}:{lineno}: expected 'w x_1 ... x_d', "
                             f"got {len(fields)} field(s)")
        try:
            values = [float(f) for f in fields]
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
        if dim is None:
            dim = len(values) - 1
        elif len(values) - 1 != dim:
            raise InputError(f"{path}:{lineno}: expected {dim} coordinates, "
                             f"got {len(values) - 1}")
        if values[0] < 0:
            raise InputError(f"{path}:{lineno}: negative weight {values[0]}")
        rows.append(values)
    if not rows:
        raise InputError(f"{path}: no atoms found")
    data = np.array(rows)
    return _normalized_measure(data[:, 1:], data[:, 0], path)


def save_point_cloud(path, measure: DiscreteMeasure) -> None:
    data = np.column_stack([measure.weights, measure.positions])
    np.savetxt(path, data, fmt="%.17g",
               header="w " + " ".join(f"x_{s+1}" for s in range(measure.dim)))


def load_grid_image(path) -> DiscreteMeasure:
    """Read a CSV pixel matrix as a measure on half-integer pixel centers."""
    rows = []
    width = None
    for lineno, line in _significant_lines(path):
        try:
            values = [float(f) for f in line.split(",")]
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise InputError(f"{path}:{lineno}: expected {width} columns, "
                             f"got {len(values)}")
        if any(v < 0 for v in values):
            raise InputError(f"{path}:{lineno}: negative pixel value")
        rows.append(values)
    if not rows:
        raise InputError(f"{path}: empty image")
    return measure_from_grid(np.array(rows), origin=path)


def measure_from_grid(image: np.ndarray, origin="<array>") -> DiscreteMeasure:
    """Pixel (r, c) -> atom at (c + 0.5, r + 0.5), weight value / total."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise InputError(f"{origin}: image must be 2-d, got shape {image.shape}")
    if np.any(image < 0):
        raise InputError(f"{origin}: negative pixel value")
    r, c = np.nonzero(image > 0)
    if r.size == 0:
        raise InputError(f"{origin}: image carries no mass")
    positions = np.column_stack([c + 0.5, r + 0.5])
    # Weight = value / total by definition of the format: no warning.
    return _normalized_measure(positions, image[r, c], origin, warn=False)


def save_grid_image(path, image: np.ndarray) -> None:
    np.savetxt(path, np.asarray(image, dtype=np.float64),
               fmt="%.17g", delimiter=",")


def _normalized_measure(positions, weights, origin,
                        warn: bool = True) -> DiscreteMeasure:
    total = float(np.sum(weights))
    if total <= 0:
        raise InputError(f"{origin}: weights carry no mass")
    if warn and abs(total - 1.0) > NORMALIZE_WARN_TOL:
        logger.warning("%s: weights sum to %.9g, normalizing to 1", origin, total)
    return DiscreteMeasure(positions, np.asarray(weights) / total)


def load_measure(path, fmt: str = "cloud") -> DiscreteMeasure:
    if fmt == "cloud":
        return load_point_cloud(path)
    if fmt == "csv-image":
        return load_grid_image(path)
    raise InputError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def save_plan(path, plan: TransportPlan) -> None:
    """Write the sparse coupling as 0-based ``i j mass`` lines."""
    with open(path, "w") as fh:
        fh.write(f"# {plan.shape[0]} {plan.shape[1]}\n")
        for i, j, v in zip(plan.rows, plan.cols, plan.vals):
            fh.write(f"{i} {j} {v:.17g}\n")


def load_plan(path, shape: tuple[int, int] | None = None) -> TransportPlan:
    """Read ``i j mass`` triplets; the shape header comment is honored."""
    rows, cols, vals = [], [], []
    header_shape = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            stripped = raw.strip()
            if stripped.startswith("#"):
                fields = stripped[1:].split()
                if header_shape is None and len(fields) == 2:
                    try:
                        header_shape = (int(fields[0]), int(fields[1]))
                    except ValueError:
                        pass
                continue
            if not stripped:
                continue
            fields = stripped.split()
            if len(fields) != 3:
                raise InputError(f"{path}:{lineno}: expected 'i j mass'")
            try:
                rows.append(int(fields[0]))
                cols.append(int(fields[1]))
                vals.append(float(fields[2]))
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from None
    if shape is None:
        shape = header_shape
    if shape is None:
        if not rows:
            raise InputError(f"{path}: empty plan and no shape given")
        shape = (max(rows) + 1, max(cols) + 1)
    return TransportPlan(shape, np.array(rows, dtype=np.int64),
                         np.array(cols, dtype=np.int64), np.array(vals))
