"""
Discrete Hölder Seminorm Estimation
===================================

Lower-bound estimate of [f]_α = sup |f(p) - f(q)| / |p - q|^α over sampled
node pairs. Points live in (t, x1, y, z) with the Euclidean metric on ℝ⁴ and
minimum-image distances in the periodic directions.

The pair sequence is fixed by the grid and the seed: a short structured
prefix (extreme and halving separations along each axis) followed by
pseudo-random pairs drawn in fixed-size chunks. A larger budget only extends
the sequence, so the estimate is nondecreasing in the budget.
"""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike

from inflowlab.constants import DEFAULT_SEED, HOLDER_CHUNK
from inflowlab.core.exceptions import ConfigError
from inflowlab.geometry.domain import ChannelDomain, FloatArray


def _structured_pairs(shape: tuple[int, ...], periodic: Sequence[bool]) -> FloatArray:
    """Pairs of flat indices separated along a single axis, x1 first."""
    pairs: list[tuple[int, int]] = []
    order = [1, 2, 3, 0]
    for axis in order:
        n = shape[axis]
        if n < 2:
            continue
        offset = n // 2 if periodic[axis] else n - 1
        while offset >= 1:
            end = [0, 0, 0, 0]
            end[axis] = offset
            pairs.append((0, int(np.ravel_multi_index(tuple(end), shape))))
            offset //= 2
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


def holder_seminorm(values: ArrayLike, domain: ChannelDomain, alpha: float,
                    pair_budget: int, seed: int = DEFAULT_SEED,
                    times: ArrayLike | None = None) -> float:
    """
    Estimates the α-Hölder seminorm of a grid field.

    Args:
        values: Scalar field of shape (Nx+1, Ny, Nz), vector field
            (C, Nx+1, Ny, Nz), or a time series (n_t, C, Nx+1, Ny, Nz) when
            `times` is given.
        alpha: Exponent in (0, 1].
        pair_budget: Number of node pairs examined.
        seed: Seed of the pair sampler.
        times: Snapshot times of a time series.

    Returns:
        float: A lower bound of the seminorm.

    Raises:
        ConfigError: On a non-positive budget or α outside (0, 1].
    """
    if pair_budget <= 0:
        raise ConfigError("Hölder pair budget must be positive", key="pair_budget")
    if not 0.0 < alpha <= 1.0:
        raise ConfigError(f"Hölder exponent must lie in (0, 1], got {alpha}", key="alpha")

    arr = np.asarray(values, dtype=np.float64)
    if times is None:
        if arr.ndim == 3:
            arr = arr[None]
        arr = arr[None]
        t_axis = np.zeros(1)
    else:
        t_axis = np.asarray(times, dtype=np.float64)
        if arr.ndim == 4:
            arr = arr[:, None]

    # (n_t, C, Nx+1, Ny, Nz) -> samples indexed by (t, x1, y, z)
    samples = np.moveaxis(arr, 1, -1)
    shape = samples.shape[:-1]
    flat = samples.reshape(-1, samples.shape[-1])
    coords = (t_axis, domain.x1, domain.x2, domain.x3)
    periods = (None, None, domain.Ly, domain.Lz)

    def ratios(pairs: FloatArray) -> FloatArray:
        idx_a = np.unravel_index(pairs[:, 0], shape)
        idx_b = np.unravel_index(pairs[:, 1], shape)
        dist2 = np.zeros(len(pairs))
        for axis in range(4):
            d = coords[axis][idx_a[axis]] - coords[axis][idx_b[axis]]
            if periods[axis] is not None:
                d = np.abs(d)
                d = np.minimum(d, periods[axis] - d)
            dist2 += d * d
        diff = np.linalg.norm(flat[pairs[:, 0]] - flat[pairs[:, 1]], axis=-1)
        out = np.zeros(len(pairs))
        ok = dist2 > 0.0
        out[ok] = diff[ok] / dist2[ok] ** (0.5 * alpha)
        return out

    structured = _structured_pairs(shape, (False, False, True, True))[:pair_budget]
    best = float(np.max(ratios(structured), initial=0.0))
    remaining = pair_budget - len(structured)

    rng = np.random.default_rng(seed)
    total = flat.shape[0]
    while remaining > 0:
        chunk = rng.integers(0, total, size=(HOLDER_CHUNK, 2))[:remaining]
        best = max(best, float(np.max(ratios(chunk), initial=0.0)))
        remaining -= len(chunk)
    return best
