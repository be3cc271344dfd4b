"""Coding-gain metrics for rotation angles and a grid search over them.

The rotated-combining matrix Theta determines how far apart two distinct
symbol groups land after spreading.  The product distance of the rotated
difference vector is the coding-gain criterion the search maximizes by
default; the per-component Euclidean alternative is kept because it is the
literal "minimum distance" reading, even though it turns out to be
angle-invariant for unit-modulus spreading matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .codec import build_theta
from .core import CapExceededError, constellation_points, hadamard, is_power_of_two

MIN_PRODUCT_DISTANCE = "min_product_distance"
MIN_COMPONENT_EUCLIDEAN = "min_component_euclidean"
METRIC_NAMES = (MIN_PRODUCT_DISTANCE, MIN_COMPONENT_EUCLIDEAN)

DEFAULT_EVAL_CAP = 10 ** 7

# Largest difference-vector table we will enumerate exhaustively; QPSK with
# pl=4 needs 9**4 = 6561 rows, the next power of two would need 9**8.
_MAX_DIFF_VECTORS = 10 ** 6


@dataclass
class AngleSearchReport:
    best_angles: tuple
    metric_name: str
    metric_value: float
    grid_resolution: float
    evaluations: int


@lru_cache(maxsize=8)
def component_differences(constellation: str) -> np.ndarray:
    """Distinct values of a - b over all constellation point pairs."""
    points = constellation_points(constellation)
    diffs = np.unique((points[:, None] - points[None, :]).ravel())
    diffs.flags.writeable = False
    return diffs

@lru_cache(maxsize=8)
def difference_vectors(constellation: str, pl: int) -> np.ndarray:
    """All nonzero length-pl difference vectors, one row per vector.

    Every pair of distinct symbol vectors s != s' produces one of these rows
    as s - s', and every row is realized by some pair, so minimizing over the
    rows is the same as minimizing over pairs.
    """
    comp = component_differences(constellation)
    if len(comp) ** pl > _MAX_DIFF_VECTORS:
        raise ValueError(
            f"difference enumeration for {constellation} at pl={pl} needs "
            f"{len(comp) ** pl} vectors; not supported"
        )
    grids = np.meshgrid(*([comp] * pl), indexing="ij")
    vecs = np.stack([g.ravel() for g in grids], axis=1)
    vecs = vecs[np.any(vecs != 0, axis=1)]
    vecs.flags.writeable = False
    return vecs

@lru_cache(maxsize=8)
def _single_position_vectors(constellation: str, pl: int) -> np.ndarray:
    """Difference vectors for pairs differing in exactly one position."""
    comp = component_differences(constellation)
    comp = comp[comp != 0]
    vecs = np.zeros((len(comp) * pl, pl), dtype=complex)
    for k in range(pl):
        vecs[k * len(comp) : (k + 1) * len(comp), k] = comp
    vecs.flags.writeable = False
    return vecs


def _batch_metric(angle_rows: np.ndarray, constellation: str, pl: int, metric_name: str) -> np.ndarray:
    """Metric value for each row of angle tuples, vectorized and chunked."""
    if metric_name == MIN_PRODUCT_DISTANCE:
        diffs = difference_vectors(constellation, pl)
    elif metric_name == MIN_COMPONENT_EUCLIDEAN:
        diffs = _single_position_vectors(constellation, pl)
    else:
        raise ValueError(f"unknown metric {metric_name!r}")
    u = hadamard(pl).astype(float)
    n = angle_rows.shape[0]
    out = np.empty(n)
    chunk = max(1, 4_000_000 // (diffs.shape[0] * pl))
    for start in range(0, n, chunk):
        rows = angle_rows[start : start + chunk]
        phases = np.concatenate(
            [np.ones((rows.shape[0], 1)), np.exp(1j * rows)], axis=1
        )
        # v[n, d, k] = sum_m U[k, m] * phases[n, m] * diffs[d, m]
        v = (diffs[None, :, :] * phases[:, None, :]) @ u.T
        mags = np.abs(v)
        if metric_name == MIN_PRODUCT_DISTANCE:
            out[start : start + chunk] = mags.prod(axis=2).min(axis=1)
        else:
            out[start : start + chunk] = mags.min(axis=2).min(axis=1)
    return out


def coding_gain_metric(
    angles, constellation: str, pl: int, metric_name: str = MIN_PRODUCT_DISTANCE
) -> float:
    """Worst-case separation of the combined constellation under Theta.

    min_product_distance: minimum over all distinct vector pairs of the
    product of component magnitudes of Theta(s - s').  Zero whenever some
    rotated difference has a vanishing component.

    min_component_euclidean: minimum single-component magnitude over pairs
    that differ in exactly one position.
    """
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    if not is_power_of_two(pl):
        raise ValueError(f"pl must be a power of two, got {pl}")
    if angles.shape != (pl - 1,):
        raise ValueError(f"expected {pl - 1} angles, got {angles.shape}")
    # build_theta validates the same preconditions; calling it keeps the
    # metric consistent with the encoder's matrix construction.
    build_theta(angles, pl)
    return float(_batch_metric(angles[None, :], constellation, pl, metric_name)[0])


def optimize_angles(
    constellation: str,
    pl: int,
    metric_name: str = MIN_PRODUCT_DISTANCE,
    resolution: float = np.pi / 36,
    cap: int = DEFAULT_EVAL_CAP,
) -> AngleSearchReport:
    """Exhaustive grid search over [0, pi)^(pl-1) plus one refinement pass.

    The refinement is a single round of coordinate descent scanning each
    angle over +/- resolution around the grid optimum in steps of
    resolution/10.  Ties always go to the lexicographically smallest angle
    tuple, so results are deterministic regardless of evaluation order.
    """
    if not is_power_of_two(pl):
        raise ValueError(f"pl must be a power of two, got {pl}")
    if metric_name not in METRIC_NAMES:
        raise ValueError(f"unknown metric {metric_name!r}")
    steps = np.pi / resolution
    n = int(round(steps))
    if n < 1 or abs(steps - n) > 1e-9:
        raise ValueError(f"resolution {resolution} must divide pi")
    num_axes = pl - 1
    total = n ** num_axes
    if total > cap:
        raise CapExceededError(
            f"grid search needs {total} evaluations, cap is {cap}"
        )
    axis = np.arange(n) * resolution
    mesh = np.meshgrid(*([axis] * num_axes), indexing="ij")
    rows = np.stack([g.ravel() for g in mesh], axis=1)
    metrics = _batch_metric(rows, constellation, pl, metric_name)
    best_idx = int(np.argmax(metrics))
    best = rows[best_idx].copy()
    best_value = float(metrics[best_idx])
    evaluations = total

    fine = resolution / 10.0
    offsets = np.arange(-10, 11) * fine
    for k in range(num_axes):
        cands = np.repeat(best[None, :], len(offsets), axis=0)
        cands[:, k] = np.mod(best[k] + offsets, np.pi)
        cands = cands[np.argsort(cands[:, k], kind="stable")]
        values = _batch_metric(cands, constellation, pl, metric_name)
        evaluations += len(cands)
        j = int(np.argmax(values))
        if values[j] > best_value or (values[j] == best_value and cands[j, k] < best[k]):
            best_value = float(values[j])
            best = cands[j].copy()
    return AngleSearchReport(
        best_angles=tuple(float(a) for a in best),
        metric_name=metric_name,
        metric_value=best_value,
        grid_resolution=float(resolution),
        evaluations=evaluations,
    )


def format_report(report: AngleSearchReport) -> str:
    """Render a search report as key: value lines."""
    angles = ", ".join(repr(a) for a in report.best_angles)
    lines = [
        f"metric_name: {report.metric_name}",
        f"metric_value: {report.metric_value!r}",
        f"best_angles: {angles}",
        f"grid_resolution: {report.grid_resolution!r}",
        f"evaluations: {report.evaluations}",
    ]
    return "\n".join(lines) + "\n"
