"""Maximal operators, averaging operators and Calderón-Zygmund cubes.

All cube averages go through :func:`power_prefix` and the cube-volume
expression of :meth:`Grid.cube_volume`, so the exact fast paths here and
any cube-by-cube search return identical floating point values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .grid import Cube, DyadicFamily, Grid, GridFunction, dyadic_levels

__all__ = [
    "MaximalSpec", "power_prefix", "cube_power_mean", "maximal",
    "default_zmax", "shift_lattice", "shifted_dyadic_average_bound",
    "averaging", "split_at_level", "CZCube", "cz_decompose",
    "dyadic_parent", "vector_maximal",
]


@dataclass(frozen=True)
class MaximalSpec:
    """Which maximal operator to apply.

    ``family`` is ``"all"`` (every cube) or a :class:`DyadicFamily`; dyadic
    families set ``local``, their cube sizes being fixed by the family.
    """

    local: bool = False
    q: float = 1.0
    family: object = "all"
    budget: int = 10**9

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if isinstance(self.family, DyadicFamily):
            object.__setattr__(self, "local", True)
        elif self.family != "all":
            raise ValueError(f"unknown cube family {self.family!r}")

    @property
    def dyadic(self) -> bool:
        return isinstance(self.family, DyadicFamily)


def power_prefix(f: GridFunction, q: float = 1.0) -> np.ndarray:
    """Prefix sums of ``|f|^q * volume`` with a leading zero row/column."""
    a = np.abs(f.values)
    v = a if q == 1 else a ** q
    m = v * f.grid.volumes
    if f.grid.dim == 1:
        return np.concatenate([[0.0], np.cumsum(m)])
    S = np.zeros((m.shape[0] + 1, m.shape[1] + 1))
    S[1:, 1:] = np.cumsum(np.cumsum(m, axis=0), axis=1)
    return S


def _box_sum(S, lo, hi):
    if len(lo) == 1:
        return S[hi[0]] - S[lo[0]]
    return S[hi[0], hi[1]] - S[lo[0], hi[1]] - S[hi[0], lo[1]] + S[lo[0], lo[1]]


def cube_power_mean(grid: Grid, S, Q: Cube) -> float:
    """Mean of ``|f|^q`` over Q from the prefix array ``S`` (no 1/q root)."""
    return float(_box_sum(S, Q.lo, Q.hi) / grid.cube_volume(Q.lo, Q.hi))


def _root(x, q):
    return x if q == 1 else x ** (1.0 / q)


def _all_intervals_1d(grid, S, cap, block=256):
    n = grid.shape[0]
    cw = grid.cumwidths[0]
    if cap is None:
        bmax = np.full(n, n)
    else:
        from .grid import _interval_limits
        bmax = _interval_limits(grid, cap)
    M = np.full(n, -np.inf)
    for a0 in range(0, n, block):
        a = np.arange(a0, min(a0 + block, n))
        c_hi = int(bmax[a].max())
        b = np.arange(a0 + 1, c_hi + 1)
        valid = (b[None, :] > a[:, None]) & (b[None, :] <= bmax[a][:, None])
        num = S[b][None, :] - S[a][:, None]
        den = (1.0 * (cw[b][None, :] - cw[a][:, None]))
        A = np.where(valid, num / np.where(valid, den, 1.0), -np.inf)
        # R[:, j] = best interval starting at row a that covers cell a0 + j
        R = np.maximum.accumulate(A[:, ::-1], axis=1)[:, ::-1]
        x = np.arange(a0, c_hi)
        R = np.where(x[None, :] >= a[:, None], R, -np.inf)
        np.maximum(M[a0:c_hi], R.max(axis=0), out=M[a0:c_hi])
    return M


def _all_squares_2d(grid, S, cap):
    from .grid import _square_sides
    nx, ny = grid.shape
    cwx, cwy = grid.cumwidths
    M = np.full((nx, ny), -np.inf)
    for k in _square_sides(grid, cap):
        mx, my = nx - k + 1, ny - k + 1
        i = np.arange(mx)
        j = np.arange(my)
        sums = (S[i[:, None] + k, j[None, :] + k] - S[i[:, None], j[None, :] + k]
                - S[i[:, None] + k, j[None, :]] + S[i[:, None], j[None, :]])
        vol = (1.0 * (cwx[i + k] - cwx[i]))[:, None] * (cwy[j + k] - cwy[j])[None, :]
        avg = sums / vol
        rows = np.full((nx, my), -np.inf)
        for d in range(k):
            np.maximum(rows[d:d + mx], avg, out=rows[d:d + mx])
        best = np.full((nx, ny), -np.inf)
        for d in range(k):
            np.maximum(best[:, d:d + my], rows, out=best[:, d:d + my])
        np.maximum(M, best, out=M)
    return M


def _dyadic_level_means(grid, S, family):
    """Yield (z, k, lo, hi, means) for each lattice level."""
    for i, (k, lo, hi) in enumerate(dyadic_levels(grid, family)):
        z = i + family.min_level
        if grid.dim == 1:
            sums = S[hi[:, 0]] - S[lo[:, 0]]
            vol = 1.0 * (grid.cumwidths[0][hi[:, 0]] - grid.cumwidths[0][lo[:, 0]])
        else:
            a0, a1, b0, b1 = lo[:, 0], lo[:, 1], hi[:, 0], hi[:, 1]
            sums = S[b0, b1] - S[a0, b1] - S[b0, a1] + S[a0, a1]
            cwx, cwy = grid.cumwidths
            vol = (1.0 * (cwx[b0] - cwx[a0])) * (cwy[b1] - cwy[a1])
        yield z, k, lo, hi, sums / vol


def _spread(grid, lo, hi, means):
    """Paint per-cube values of one (covering, disjoint) level onto cells."""
    if grid.dim == 1:
        return np.repeat(means, hi[:, 0] - lo[:, 0])
    xs = np.unique(np.stack([lo[:, 0], hi[:, 0]], 1), axis=0)
    ys = np.unique(np.stack([lo[:, 1], hi[:, 1]], 1), axis=0)
    grid_means = means.reshape(xs.shape[0], ys.shape[0])
    out = np.repeat(grid_means, xs[:, 1] - xs[:, 0], axis=0)
    return np.repeat(out, ys[:, 1] - ys[:, 0], axis=1)


def maximal(f: GridFunction, spec: MaximalSpec = MaximalSpec()) -> GridFunction:
    """Exact maximal function of ``f`` over the cube family of ``spec``.

    Per cell, the largest ``(|Q|^{-1} int_Q |f|^q)^{1/q}`` over the cubes of
    the family that contain the cell.  On 1D grids the all-cubes family is
    every index interval (O(n^2) work, O(n/h) when local); on 2D grids every
    index square.  Cubes are restricted to the grid's domain.
    """
    g = f.grid
    S = power_prefix(f, spec.q)
    if spec.dyadic:
        M = np.full(g.shape, -np.inf)
        for _, _, lo, hi, means in _dyadic_level_means(g, S, spec.family):
            np.maximum(M, _spread(g, lo, hi, means), out=M)
    else:
        cap = g.local_cap if spec.local else None
        M = _all_intervals_1d(g, S, cap) if g.dim == 1 else _all_squares_2d(g, S, cap)
    return GridFunction(g, _root(M, spec.q))


def default_zmax(grid: Grid) -> int:
    """Finest dyadic level whose cubes are still at least one cell wide."""
    h = min(float(w.max()) for w in grid.widths)
    return max(0, int(math.floor(math.log2(1.0 / h) + 1e-9))) if h <= 1 else 0


def shift_lattice(count: int, dim: int = 1, half_width: float = 4.0):
    """``count`` equispaced shifts per axis covering ``[-4, 4]^dim``."""
    ts = np.linspace(-half_width, half_width, count)
    if dim == 1:
        return [(float(t),) for t in ts]
    return [(float(a), float(b)) for a in ts for b in ts]


def shifted_dyadic_average_bound(f: GridFunction, q: float, shifts: Sequence,
                                 z_max: int | None = None, z_min: int = 0) -> GridFunction:
    """Cellwise mean over ``shifts`` of the shifted dyadic local maximal function.

    Riemann-sum version of averaging the shifted dyadic operators over
    ``t in [-4, 4]^n``; compare against ``maximal(f, local q)`` to estimate
    the constant linking the two.  ``z_min = -1`` also admits dyadic cubes
    of side 2.
    """
    shifts = list(shifts)
    if not shifts:
        raise ValueError("need at least one shift")
    z = default_zmax(f.grid) if z_max is None else z_max
    stack = [maximal(f, MaximalSpec(q=q, family=DyadicFamily(z, tuple(np.atleast_1d(t)), z_min))).values
             for t in shifts]
    return GridFunction(f.grid, np.mean(stack, axis=0))


def averaging(f: GridFunction, part) -> GridFunction:
    """``T_Q f``: replace f on each cube of the partition by its mean.

    Cubes on which f is constant keep that value exactly.
    """
    g = f.grid
    if g.dim == 1:
        order = sorted(part.cubes, key=lambda Q: Q.lo[0])
        starts = np.array([Q.lo[0] for Q in order])
        lengths = np.array([Q.hi[0] - Q.lo[0] for Q in order])
        v = f.values
        w = g.volumes
        mean = np.add.reduceat(v * w, starts) / np.add.reduceat(w, starts)
        hi = np.maximum.reduceat(v, starts)
        const = hi == np.minimum.reduceat(v, starts)
        mean = np.where(const, hi, mean)
        return GridFunction(g, np.repeat(mean, lengths))
    out = np.empty(g.shape)
    vols = g.volumes
    for Q in part.cubes:
        v = f.values[Q.slices]
        first = v.flat[0]
        if np.all(v == first):
            out[Q.slices] = first
        else:
            w = vols[Q.slices]
            out[Q.slices] = math.fsum((v * w).ravel()) / math.fsum(w.ravel())
    return GridFunction(g, out)


def split_at_level(f: GridFunction, lam: float):
    """``(f chi_{|f| <= lam}, f chi_{|f| > lam})``."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    low = np.abs(f.values) <= lam
    return (GridFunction(f.grid, np.where(low, f.values, 0.0)),
            GridFunction(f.grid, np.where(low, 0.0, f.values)))


class CZCube(NamedTuple):
    cube: Cube
    level: int
    index: tuple
    mean: float


def cz_decompose(f: GridFunction, lam: float, q: float = 1.0,
                 shift=(0.0,), z_max: int | None = None):
    """Maximal shifted dyadic cubes whose q-mean of |f| exceeds ``lam/2``.

    Scans levels from volume 1 downwards and keeps a cube when its mean
    passes the threshold and no coarser kept cube contains it.  The union
    of the result is ``{maximal(f, dyadic) > lam/2}``.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if q < 1:
        raise ValueError("q must be >= 1")
    g = f.grid
    z_max = default_zmax(g) if z_max is None else z_max
    fam = DyadicFamily(z_max, tuple(np.atleast_1d(shift)))
    S = power_prefix(f, q)
    covered = np.zeros(g.shape, dtype=bool)
    out = []
    thr = lam / 2.0
    for z, k, lo, hi, means in _dyadic_level_means(g, S, fam):
        roots = _root(means, q)
        for r in np.nonzero(roots > thr)[0]:
            sl = tuple(slice(a, b) for a, b in zip(lo[r], hi[r]))
            if covered[sl].flat[0]:
                continue
            covered[sl] = True
            out.append(CZCube(g.cube(tuple(lo[r]), tuple(hi[r])), z,
                              tuple(int(v) for v in k[r]), float(roots[r])))
    return out


def dyadic_parent(grid: Grid, family: DyadicFamily, level: int, index):
    """Parent cube (clipped to the domain) or None at level 0."""
    if level == 0:
        return None
    k, lo, hi = dyadic_levels(grid, DyadicFamily(level - 1, family.shift))[level - 1]
    want = np.floor_divide(np.asarray(index), 2)
    hit = np.nonzero(np.all(k == want, axis=1))[0]
    if hit.size == 0:
        return None
    r = hit[0]
    return grid.cube(tuple(lo[r]), tuple(hi[r]))


def vector_maximal(fs: Sequence[GridFunction], q: float,
                   spec: MaximalSpec = MaximalSpec(local=True)) -> GridFunction:
    """Cellwise ``(sum_j (M f_j)^q)^{1/q}``."""
    fs = list(fs)
    if not fs:
        raise ValueError("need at least one function")
    if not q >= 1:
        raise ValueError("q must be >= 1")
    acc = np.zeros(fs[0].grid.shape)
    for f in fs:
        acc = acc + maximal(f, spec).values ** q
    return GridFunction(fs[0].grid, acc ** (1.0 / q))
