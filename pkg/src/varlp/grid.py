"""Cell decompositions of 1D/2D boxes, cubes, partitions and dyadic lattices.

Every function in the toolkit is piecewise constant on the cells of a
:class:`Grid`, so integrals of such functions are finite sums and exact up
to floating point rounding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Grid", "GridFunction", "Cube", "Partition", "DyadicFamily",
    "make_grid", "uniform_grid", "integrate", "enum_cubes", "dyadic_cubes",
    "dyadic_levels", "make_partition", "partition_to_json",
    "partition_from_json",
]

# Relative tolerance used when matching lattice points against cell edges.
_ALIGN_RTOL = 1e-9


def _readonly(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


class Grid:
    """Tensor-product cell decomposition of a box in R^1 or R^2.

    Parameters
    ----------
    boundaries : sequence of array_like
        Strictly increasing cell edges, one sequence per axis.  In 2D the
        spacing must be uniform on each axis.
    """

    def __init__(self, boundaries: Sequence[Sequence[float]]):
        bnds = tuple(_readonly(b) for b in boundaries)
        if len(bnds) not in (1, 2):
            raise ValueError(f"only dim 1 or 2 supported, got {len(bnds)}")
        for ax, b in enumerate(bnds):
            if b.ndim != 1 or b.size < 2:
                raise ValueError(f"axis {ax}: need at least two edges")
            if not np.all(np.isfinite(b)):
                raise ValueError(f"axis {ax}: edges must be finite")
            if not np.all(np.diff(b) > 0):
                raise ValueError(f"axis {ax}: edges must be strictly increasing")
        if len(bnds) == 2:
            for ax, b in enumerate(bnds):
                w = np.diff(b)
                if not np.allclose(w, w[0], rtol=1e-12, atol=0):
                    raise ValueError(
                        f"axis {ax}: 2D grids must have uniform spacing")
        self.boundaries = bnds
        self.dim = len(bnds)
        self.shape = tuple(b.size - 1 for b in bnds)
        self.widths = tuple(_readonly(np.diff(b)) for b in bnds)
        # Cumulative widths; every cube volume is a difference of these.
        self.cumwidths = tuple(
            _readonly(np.concatenate([[0.0], np.cumsum(w)])) for w in self.widths)
        self.midpoints = tuple(_readonly(0.5 * (b[:-1] + b[1:])) for b in bnds)
        if self.dim == 1:
            vol = self.widths[0]
        else:
            vol = np.multiply.outer(self.widths[0], self.widths[1])
        self.volumes = _readonly(vol)
        if not np.all(self.volumes > 0) or not np.all(np.isfinite(self.volumes)):
            raise ValueError("cell volumes must be positive and finite")

    @property
    def ncells(self) -> int:
        return int(np.prod(self.shape))

    @property
    def lo(self):
        return tuple(float(b[0]) for b in self.boundaries)

    @property
    def hi(self):
        return tuple(float(b[-1]) for b in self.boundaries)

    @property
    def total_volume(self) -> float:
        return math.prod(float(cw[-1]) for cw in self.cumwidths)

    @property
    def slack(self) -> float:
        """Tolerance added to the unit volume cap of local cubes."""
        return float(self.volumes.min())

    @property
    def local_cap(self) -> float:
        return 1.0 + self.slack

    @property
    def is_uniform(self) -> bool:
        return all(np.allclose(w, w[0], rtol=1e-12, atol=0) for w in self.widths)

    @property
    def spacing(self):
        if not self.is_uniform:
            raise ValueError("grid is not uniform")
        return tuple(float(w[0]) for w in self.widths)

    def centers(self) -> np.ndarray:
        """Cell midpoints; shape ``shape`` in 1D, ``shape + (2,)`` in 2D."""
        if self.dim == 1:
            return np.array(self.midpoints[0])
        X, Y = np.meshgrid(*self.midpoints, indexing="ij")
        return np.stack([X, Y], axis=-1)

    def center_norms(self) -> np.ndarray:
        """Euclidean norm of each cell midpoint."""
        c = self.centers()
        return np.abs(c) if self.dim == 1 else np.linalg.norm(c, axis=-1)

    def cube(self, lo, hi) -> "Cube":
        lo = (int(lo),) if np.isscalar(lo) else tuple(int(v) for v in lo)
        hi = (int(hi),) if np.isscalar(hi) else tuple(int(v) for v in hi)
        if len(lo) != self.dim or len(hi) != self.dim:
            raise ValueError("cube rank does not match grid dimension")
        for a, b, n in zip(lo, hi, self.shape):
            if not 0 <= a < b <= n:
                raise ValueError(f"invalid cube range [{a}, {b}) for {n} cells")
        return Cube(lo, hi, self.cube_volume(lo, hi))

    def cube_volume(self, lo, hi) -> float:
        # The same expression is used by every averaging kernel, which is
        # what makes fast paths and brute-force oracles agree bit for bit.
        vol = 1.0
        for cw, a, b in zip(self.cumwidths, lo, hi):
            vol = vol * (cw[b] - cw[a])
        return float(vol)

    def locate(self, x) -> np.ndarray:
        """Index of the cell containing each 1D point, clipped to the grid."""
        e = self.boundaries[0]
        idx = np.searchsorted(e, np.asarray(x, dtype=float), side="right") - 1
        return np.clip(idx, 0, self.shape[0] - 1)

    def edge_index(self, axis: int, x: float) -> int:
        """Index of the edge at coordinate ``x``; raises if none matches."""
        e = self.boundaries[axis]
        i = int(np.searchsorted(e, x))
        tol = _ALIGN_RTOL * max(1.0, abs(x), float(self.widths[axis].min()))
        for j in (i - 1, i):
            if 0 <= j < e.size and abs(e[j] - x) <= tol:
                return j
        raise ValueError(f"coordinate {x!r} is not a cell edge on axis {axis}")

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return self.dim == other.dim and all(
            a.shape == b.shape and np.array_equal(a, b)
            for a, b in zip(self.boundaries, other.boundaries))

    def __hash__(self):
        return hash(tuple(b.tobytes() for b in self.boundaries))

    def __repr__(self):
        return f"Grid(dim={self.dim}, shape={self.shape}, box={self.lo}..{self.hi})"

    def to_dict(self):
        return {"dim": self.dim, "boundaries": [b.tolist() for b in self.boundaries]}


def make_grid(dim: int, boundaries) -> Grid:
    """Build a grid; in 1D ``boundaries`` may be a single edge sequence."""
    if dim == 1 and np.ndim(boundaries[0]) == 0:
        boundaries = [boundaries]
    if len(boundaries) != dim:
        raise ValueError(f"expected {dim} boundary sequences, got {len(boundaries)}")
    return Grid(boundaries)


def uniform_grid(lo, hi, cells) -> Grid:
    """Uniform grid on ``[lo, hi)``; pass tuples for a 2D box."""
    if np.isscalar(lo):
        return Grid([np.linspace(lo, hi, int(cells) + 1)])
    cells = (cells, cells) if np.isscalar(cells) else cells
    return Grid([np.linspace(a, b, int(n) + 1) for a, b, n in zip(lo, hi, cells)])


class GridFunction:
    """Real piecewise-constant function on the cells of a grid."""

    def __init__(self, grid: Grid, values):
        v = np.array(values, dtype=float)
        if v.shape != grid.shape:
            if v.size == grid.ncells:
                v = v.reshape(grid.shape)
            else:
                raise ValueError(
                    f"expected {grid.ncells} values for grid {grid.shape}, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        v.flags.writeable = False
        self.grid = grid
        self.values = v

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "GridFunction":
        """Sample ``fn`` at the cell midpoints."""
        if grid.dim == 1:
            return cls(grid, fn(np.asarray(grid.midpoints[0])))
        X, Y = np.meshgrid(*grid.midpoints, indexing="ij")
        return cls(grid, fn(X, Y))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid, c):
        return cls(grid, np.full(grid.shape, float(c)))

    @classmethod
    def indicator(cls, grid, cube: "Cube"):
        v = np.zeros(grid.shape)
        v[cube.slices] = 1.0
        return cls(grid, v)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values)

    def _coerce(self, other):
        if isinstance(other, GridFunction):
            if other.grid is not self.grid and other.grid != self.grid:
                raise ValueError("grid functions live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return self.with_values(self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.with_values(self.values - self._coerce(other))

    def __mul__(self, other):
        return self.with_values(self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.with_values(self.values / self._coerce(other))

    def __neg__(self):
        return self.with_values(-self.values)

    def __abs__(self):
        return self.with_values(np.abs(self.values))

    def __repr__(self):
        return f"GridFunction({self.grid!r})"

    def to_dict(self):
        d = self.grid.to_dict()
        d["values"] = self.values.tolist()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        return cls(make_grid(d["dim"], d["boundaries"]), d["values"])

    @classmethod
    def from_json(cls, s: str):
        return cls.from_dict(json.loads(s))


def integrate(f: GridFunction) -> float:
    """Exact integral of a piecewise-constant function (compensated sum)."""
    return math.fsum((f.values * f.grid.volumes).ravel())


@dataclass(frozen=True)
class Cube:
    """Half-open box of cell indices ``[lo, hi)`` on every axis."""

    lo: tuple
    hi: tuple
    volume: float

    @property
    def slices(self):
        return tuple(slice(a, b) for a, b in zip(self.lo, self.hi))

    @property
    def ncells(self) -> int:
        return math.prod(b - a for a, b in zip(self.lo, self.hi))

    def contains(self, other: "Cube") -> bool:
        return all(a <= c and d <= b for a, b, c, d in
                   zip(self.lo, self.hi, other.lo, other.hi))

    def overlaps(self, other: "Cube") -> bool:
        return all(a < d and c < b for a, b, c, d in
                   zip(self.lo, self.hi, other.lo, other.hi))

    def to_dict(self):
        return {"lo": list(self.lo), "hi": list(self.hi)}

    def label(self) -> str:
        return "x".join(f"[{a},{b})" for a, b in zip(self.lo, self.hi))


@dataclass(frozen=True)
class Partition:
    """Disjoint family of cubes covering every cell of the grid."""

    grid: Grid
    cubes: tuple
    local_flag: bool

    def __post_init__(self):
        count = np.zeros(self.grid.shape, dtype=int)
        for q in self.cubes:
            count[q.slices] += 1
        if np.any(count > 1):
            raise ValueError("partition cubes overlap")
        if np.any(count == 0):
            raise ValueError("partition leaves cells uncovered")

    def __len__(self):
        return len(self.cubes)

    def labels(self) -> np.ndarray:
        """Cube index of every cell."""
        lab = np.empty(self.grid.shape, dtype=int)
        for i, q in enumerate(self.cubes):
            lab[q.slices] = i
        return lab


@dataclass(frozen=True)
class DyadicFamily:
    """Cubes ``2^-z((0,1)^n + k) - shift`` for ``min_level <= z <= max_level``.

    ``min_level`` defaults to 0 (cube side at most 1); a negative value
    admits coarser cubes of side ``2^-min_level``.
    """

    max_level: int
    shift: tuple = (0.0,)
    min_level: int = 0

    def __post_init__(self):
        if self.max_level < 0:
            raise ValueError("max_level must be >= 0")
        if self.min_level > self.max_level:
            raise ValueError("min_level must not exceed max_level")
        object.__setattr__(self, "shift", tuple(float(s) for s in np.atleast_1d(self.shift)))

    def shift_for(self, dim):
        if len(self.shift) == dim:
            return self.shift
        if len(self.shift) == 1:
            return self.shift * dim
        raise ValueError("shift rank does not match grid dimension")


# -- cube enumeration -------------------------------------------------------

def _interval_limits(grid: Grid, cap):
    """For each left index a, the largest right index b with vol <= cap.

    A single cell is always admissible, even when wider than ``cap``: it is
    the finest cube the grid resolves around each of its points.
    """
    cw = grid.cumwidths[0]
    n = grid.shape[0]
    if cap is None:
        return np.full(n, n)
    # largest b with cw[b] - cw[a] <= cap, at least a + 1 when allowed
    b = np.searchsorted(cw, cw[:-1] + cap, side="right") - 1
    b = np.minimum(b, n)
    # guard against rounding in cw[:-1] + cap versus the subtraction used
    # for volumes: re-check with the exact volume expression
    for a in range(n):
        while b[a] > a and cw[b[a]] - cw[a] > cap:
            b[a] -= 1
        while b[a] < n and cw[b[a] + 1] - cw[a] <= cap:
            b[a] += 1
    return np.maximum(b, np.arange(1, n + 1))


def _square_sides(grid: Grid, cap):
    if grid.dim != 2:
        raise ValueError("square enumeration is for 2D grids")
    hx, hy = grid.spacing
    if not math.isclose(hx, hy, rel_tol=1e-12):
        raise ValueError("cube enumeration in 2D needs square cells")
    kmax = min(grid.shape)
    sides = [k for k in range(1, kmax + 1)
             if cap is None or grid.cube_volume((0, 0), (k, k)) <= cap]
    return sides


def count_cubes(grid: Grid, max_volume=None) -> int:
    if grid.dim == 1:
        b = _interval_limits(grid, max_volume)
        return int(np.sum(b - np.arange(grid.shape[0])))
    nx, ny = grid.shape
    return sum((nx - k + 1) * (ny - k + 1) for k in _square_sides(grid, max_volume))


def enum_cubes(grid: Grid, max_volume=None, budget: int = 10**6, seed: int = 0):
    """All index-aligned cubes, or a seeded sample when there are too many.

    In 1D the cubes are all index intervals; in 2D all index squares (the
    grid must have square cells).  ``max_volume`` caps cube volume.

    When the family exceeds ``budget`` the result is a deterministic sample
    of ``budget`` cubes that contains every single-cell cube (if the grid has
    more cells than ``budget``, a seeded sample of ``budget`` single cells).
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    total = count_cubes(grid, max_volume)
    if grid.dim == 1:
        n = grid.shape[0]
        bmax = _interval_limits(grid, max_volume)
        if total <= budget:
            return [grid.cube(a, b) for a in range(n) for b in range(a + 1, bmax[a] + 1)]
        rng = np.random.default_rng(seed)
        if n >= budget:
            keep = np.sort(rng.choice(n, budget, replace=False))
            return [grid.cube(int(a), int(a) + 1) for a in keep]
        chosen = {(a, a + 1) for a in range(n)}
        multi = [a for a in range(n) if bmax[a] > a + 1]
        while len(chosen) < budget and multi:
            a = multi[rng.integers(len(multi))]
            b = int(rng.integers(a + 2, bmax[a] + 1))
            chosen.add((a, b))
        return [grid.cube(a, b) for a, b in sorted(chosen)]

    nx, ny = grid.shape
    sides = _square_sides(grid, max_volume)
    if total <= budget:
        return [grid.cube((i, j), (i + k, j + k))
                for k in sides for i in range(nx - k + 1) for j in range(ny - k + 1)]
    rng = np.random.default_rng(seed)
    if nx * ny >= budget:
        keep = np.sort(rng.choice(nx * ny, budget, replace=False))
        return [grid.cube((int(c) // ny, int(c) % ny), (int(c) // ny + 1, int(c) % ny + 1))
                for c in keep]
    chosen = {(i, j, 1) for i in range(nx) for j in range(ny)}
    big = [k for k in sides if k > 1]
    while len(chosen) < budget and big:
        k = big[rng.integers(len(big))]
        i = int(rng.integers(nx - k + 1))
        j = int(rng.integers(ny - k + 1))
        chosen.add((i, j, k))
    return [grid.cube((i, j), (i + k, j + k)) for k, i, j in
            sorted((k, i, j) for i, j, k in chosen)]


# -- dyadic lattices --------------------------------------------------------

def _dyadic_axis(grid: Grid, axis: int, z: int, t: float):
    """Lattice intervals at level z on one axis: (k, lo_idx, hi_idx) arrays.

    Results are memoised on the (immutable) grid.
    """
    cache = grid.__dict__.setdefault("_dyadic_cache", {})
    key = (axis, z, t)
    if key not in cache:
        cache[key] = _dyadic_axis_uncached(grid, axis, z, t)
    return cache[key]


def _dyadic_axis_uncached(grid, axis, z, t):
    e = grid.boundaries[axis]
    side = 2.0 ** (-z)
    k0 = math.floor((e[0] + t) / side)
    k1 = math.ceil((e[-1] + t) / side)
    ks, los, his = [], [], []
    for k in range(k0, k1):
        a = max(k * side - t, e[0])
        b = min((k + 1) * side - t, e[-1])
        if b - a <= _ALIGN_RTOL * side:
            continue
        try:
            ia = grid.edge_index(axis, a)
            ib = grid.edge_index(axis, b)
        except ValueError as err:
            raise ValueError(
                f"grid is not aligned with the dyadic lattice at level {z}, "
                f"shift {t}: {err}") from None
        if ib <= ia:
            continue
        ks.append(k)
        los.append(ia)
        his.append(ib)
    out = (np.array(ks, dtype=np.int64), np.array(los, dtype=int), np.array(his, dtype=int))
    for a in out:
        a.flags.writeable = False
    return out


def dyadic_levels(grid: Grid, family: DyadicFamily):
    """Per-level lattice cubes as arrays.

    Returns a list indexed by ``z - family.min_level``; each entry is a tuple
    ``(k, lo, hi)`` of integer arrays with shape ``(m, dim)`` holding the
    lattice multi-index and the cell-index ranges of the ``m`` cubes at that
    level which meet the domain.
    """
    shift = family.shift_for(grid.dim)
    levels = []
    for z in range(family.min_level, family.max_level + 1):
        per_axis = [_dyadic_axis(grid, ax, z, shift[ax]) for ax in range(grid.dim)]
        if grid.dim == 1:
            k, lo, hi = per_axis[0]
            levels.append((k[:, None], lo[:, None], hi[:, None]))
        else:
            (kx, lx, hx), (ky, ly, hy) = per_axis
            I, J = np.meshgrid(np.arange(kx.size), np.arange(ky.size), indexing="ij")
            I, J = I.ravel(), J.ravel()
            levels.append((np.stack([kx[I], ky[J]], 1),
                           np.stack([lx[I], ly[J]], 1),
                           np.stack([hx[I], hy[J]], 1)))
    return levels


def dyadic_cubes(grid: Grid, family: DyadicFamily):
    """Shifted dyadic cubes of volume <= 1 meeting the domain, coarse first.

    Cubes are clipped to the domain; the grid must have an edge at every
    lattice point inside the domain up to ``family.max_level``.
    """
    out = []
    for k, lo, hi in dyadic_levels(grid, family):
        out.extend(grid.cube(tuple(a), tuple(b)) for a, b in zip(lo, hi))
    return out


# -- partitions -------------------------------------------------------------

def _finish(grid, cubes, cap=None):
    cap = grid.local_cap if cap is None else cap
    return Partition(grid, tuple(cubes), all(q.volume <= cap for q in cubes))


def _equal_cubes(grid: Grid, side: float):
    per_axis = []
    for ax in range(grid.dim):
        e = grid.boundaries[ax]
        k0 = math.floor(e[0] / side + 1e-12)
        k1 = math.ceil(e[-1] / side - 1e-12)
        ranges = []
        for k in range(k0, k1):
            a = max(k * side, e[0])
            b = min((k + 1) * side, e[-1])
            if b - a <= _ALIGN_RTOL * side:
                continue
            ia, ib = grid.edge_index(ax, a), grid.edge_index(ax, b)
            gap = 0.0 if a <= 0.0 <= b else min(abs(a), abs(b))
            ranges.append((ia, ib, gap))
        per_axis.append(ranges)
    if grid.dim == 1:
        combos = [((r,), r[2]) for r in per_axis[0]]
    else:
        combos = [((rx, ry), math.hypot(rx[2], ry[2]))
                  for rx in per_axis[0] for ry in per_axis[1]]
    # ordered by distance of the cube from the origin, ties by position
    combos.sort(key=lambda c: (c[1], tuple(r[0] for r in c[0])))
    return [grid.cube(tuple(r[0] for r in rs), tuple(r[1] for r in rs))
            for rs, _ in combos]


def _random_local_1d(grid, rng):
    cw = grid.cumwidths[0]
    cap = grid.local_cap
    out = []
    stack = [(0, grid.shape[0])]
    while stack:
        a, b = stack.pop()
        vol = cw[b] - cw[a]
        must = vol > cap
        if b - a > 1 and (must or rng.random() < 0.35):
            m = int(rng.integers(a + 1, b))
            stack.append((m, b))
            stack.append((a, m))
        else:
            out.append((a, b))
    return [grid.cube(a, b) for a, b in sorted(out)]


def _random_global_1d(grid, rng):
    cw = grid.cumwidths[0]
    n = grid.shape[0]
    total = float(cw[-1])
    lo_len = float(grid.widths[0].min())
    out = []
    a = 0
    while a < n:
        length = math.exp(rng.uniform(math.log(lo_len), math.log(total)))
        b = int(np.searchsorted(cw, cw[a] + length, side="left"))
        b = min(max(b, a + 1), n)
        out.append((a, b))
        a = b
    return [grid.cube(a, b) for a, b in out]


def _quadtree_2d(grid, rng, tile, split_prob):
    nx, ny = grid.shape
    cubes = []

    def split(i, j, k):
        if k > 1 and rng.random() < split_prob:
            h = k // 2
            for di in (0, h):
                for dj in (0, h):
                    split(i + di, j + dj, h)
        else:
            cubes.append(grid.cube((i, j), (i + k, j + k)))

    covered = np.zeros(grid.shape, dtype=bool)
    for i in range(0, nx - tile + 1, tile):
        for j in range(0, ny - tile + 1, tile):
            split(i, j, tile)
            covered[i:i + tile, j:j + tile] = True
    for i, j in zip(*np.nonzero(~covered)):
        cubes.append(grid.cube((int(i), int(j)), (int(i) + 1, int(j) + 1)))
    return cubes


def _tile_size(grid, cap):
    k = 1
    while 2 * k <= min(grid.shape) and (cap is None or grid.cube_volume((0, 0), (2 * k, 2 * k)) <= cap):
        k *= 2
    return k


def make_partition(grid: Grid, spec) -> Partition:
    """Build a partition from a spec dict.

    Supported kinds::

        {"kind": "equal-cubes", "side": s}     lattice s*((0,1)^n + k), ordered
                                               by distance from the origin
        {"kind": "random-local", "seed": n}    random splits down to |Q| <= 1
        {"kind": "random-global", "seed": n}   log-uniform random cube sizes
        {"kind": "explicit", "cubes": [...]}   cubes as Cube or {"lo","hi"}

    ``local_flag`` compares volumes with ``grid.local_cap``; an explicit
    spec may pass ``"cap"`` to use another bound (e.g. exactly 1).
    """
    kind = spec["kind"]
    if kind == "equal-cubes":
        return _finish(grid, _equal_cubes(grid, float(spec["side"])))
    if kind == "explicit":
        cubes = [q if isinstance(q, Cube) else grid.cube(q["lo"], q["hi"])
                 for q in spec["cubes"]]
        return _finish(grid, cubes, spec.get("cap"))
    rng = np.random.default_rng(spec.get("seed", 0))
    if kind == "random-local":
        if grid.dim == 1:
            return _finish(grid, _random_local_1d(grid, rng))
        return _finish(grid, _quadtree_2d(grid, rng, _tile_size(grid, grid.local_cap), 0.4))
    if kind == "random-global":
        if grid.dim == 1:
            return _finish(grid, _random_global_1d(grid, rng))
        tile = _tile_size(grid, None)
        tile = 2 ** int(rng.integers(0, int(math.log2(tile)) + 1))
        return _finish(grid, _quadtree_2d(grid, rng, tile, 0.3))
    raise ValueError(f"unknown partition kind {kind!r}")


def partition_to_json(part: Partition) -> str:
    return json.dumps([q.to_dict() for q in part.cubes])


def partition_from_json(grid: Grid, s: str) -> Partition:
    return make_partition(grid, {"kind": "explicit", "cubes": json.loads(s)})


def cubes_from_ranges(grid: Grid, ranges: Iterable):
    return [grid.cube(a, b) for a, b in ranges]
