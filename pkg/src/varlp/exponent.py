"""Exponent functions p(.) and their regularity diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Cube, Grid, GridFunction

__all__ = [
    "Exponent", "PiecewiseLinearMap", "RegularityReport", "build_exponent",
    "lerner_p0", "lerner_exponent", "lerner_intervals", "lerner_grid",
    "remap_exponent", "conjugate_exponent", "cube_mean_exponent",
    "regularity_report",
]

BASEL = math.pi ** 2 / 6


@dataclass(frozen=True)
class Exponent:
    """Exponent sampled on a grid, with global bounds p_minus <= p <= p_plus.

    ``p_minus``/``p_plus`` are the infimum/supremum over the whole space when
    an analytic descriptor is known, which may be strictly outside the range
    of the samples (e.g. a limit attained only at infinity).
    """

    samples: GridFunction
    p_minus: float
    p_plus: float
    descriptor: dict | None = None

    def __post_init__(self):
        v = self.samples.values
        if not self.p_minus > 1.0:
            raise ValueError(f"p_minus must exceed 1, got {self.p_minus}")
        if not math.isfinite(self.p_plus):
            raise ValueError("p_plus must be finite")
        lo, hi = float(v.min()), float(v.max())
        eps = 1e-12 * max(1.0, hi)
        if lo < self.p_minus - eps or hi > self.p_plus + eps:
            raise ValueError(
                f"samples [{lo}, {hi}] escape bounds [{self.p_minus}, {self.p_plus}]")

    @property
    def grid(self) -> Grid:
        return self.samples.grid

    @property
    def values(self) -> np.ndarray:
        return self.samples.values

    def evaluate(self, x):
        """Exponent at points ``x`` (1D); analytic when a descriptor allows."""
        fn = _analytic(self.descriptor)
        if fn is not None:
            return fn(np.asarray(x, dtype=float))
        if self.grid.dim != 1:
            raise ValueError("pointwise lookup is implemented for 1D exponents")
        return self.values[self.grid.locate(x)]


@dataclass(frozen=True)
class PiecewiseLinearMap:
    """Continuous strictly increasing piecewise-linear map of the line.

    Outside the breakpoint range the map continues with slope 1, so it is a
    translation there (the identity when the end breakpoints are fixed).
    """

    xs: tuple
    ys: tuple

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.size < 1 or xs.shape != ys.shape:
            raise ValueError("need matching, non-empty breakpoint lists")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
            raise ValueError("map must be strictly increasing")
        object.__setattr__(self, "xs", tuple(xs.tolist()))
        object.__setattr__(self, "ys", tuple(ys.tolist()))

    @classmethod
    def from_pairs(cls, pairs):
        xs, ys = zip(*pairs)
        return cls(tuple(xs), tuple(ys))

    @classmethod
    def identity(cls):
        return cls((0.0,), (0.0,))

    @staticmethod
    def _apply(x, src, dst):
        x = np.asarray(x, dtype=float)
        src, dst = np.asarray(src), np.asarray(dst)
        y = np.interp(x, src, dst)
        y = np.where(x < src[0], x - src[0] + dst[0], y)
        return np.where(x > src[-1], x - src[-1] + dst[-1], y)

    def __call__(self, x):
        return self._apply(x, self.xs, self.ys)

    def inverse(self, y):
        return self._apply(y, self.ys, self.xs)


# -- analytic profiles -----------------------------------------------------

def lerner_intervals(k_max: int):
    """Log-coordinates (log a_k, log b_k) of the first k_max Lerner intervals."""
    k = np.arange(1, k_max + 1, dtype=float)
    return k ** 3, k ** 3 * np.exp(1.0 / k ** 2)


def lerner_p0(x, k_max: int = 3):
    """Lerner's decreasing profile, exact via the antiderivative log log t.

    Intervals ``k <= k_max`` are integrated exactly above ``|x|``; the
    intervals beyond ``k_max`` contribute the constant tail
    ``sum_{k > k_max} 1/k^2``.  Works in log coordinates so no interval
    endpoint is ever exponentiated.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    with np.errstate(divide="ignore"):
        L = np.log(ax)[..., None]
    la, lb = lerner_intervals(k_max)
    k = np.arange(1, k_max + 1, dtype=float)
    full = 1.0 / k ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        partial = 3.0 * np.log(k) + full - np.log(np.maximum(L, 1e-300))
    contrib = np.where(L <= la, full, np.where(L < lb, partial, 0.0))
    tail = BASEL - math.fsum(full.tolist())
    out = contrib.sum(axis=-1) + tail
    return float(out) if out.ndim == 0 else out


def _analytic(desc):
    if not desc:
        return None
    kind = desc["kind"]
    if kind == "constant":
        q = float(desc["q"])
        return lambda x: np.full(np.shape(x), q)
    if kind == "log-holder":
        p_inf, c = float(desc["p_inf"]), float(desc["c"])
        prof = desc.get("profile", "reciprocal-log")
        if prof == "reciprocal-log":
            return lambda x: p_inf + c / np.log(math.e + np.abs(x))
        if prof == "bump":
            w = float(desc.get("width", 1.0))
            return lambda x: p_inf + c * np.exp(-(np.asarray(x) / w) ** 2)
        raise ValueError(f"unknown log-Hölder profile {prof!r}")
    if kind == "lerner-p0":
        a, b, km = float(desc["alpha"]), float(desc["beta"]), int(desc["k_max"])
        return lambda x: b * (lerner_p0(x, km) + a)
    if kind == "remapped":
        base = _analytic(desc["base"])
        if base is None:
            return None
        omega = PiecewiseLinearMap(tuple(desc["xs"]), tuple(desc["ys"]))
        return lambda x: base(omega.inverse(x))
    return None


def _bounds(desc, values):
    kind = desc["kind"]
    if kind == "constant":
        q = float(desc["q"])
        return q, q
    if kind == "log-holder":
        p_inf, c = float(desc["p_inf"]), float(desc["c"])
        return min(p_inf, p_inf + c), max(p_inf, p_inf + c)
    if kind == "lerner-p0":
        a, b = float(desc["alpha"]), float(desc["beta"])
        return b * a, b * (BASEL + a)
    return float(values.min()), float(values.max())


def _radial(grid):
    return grid.center_norms()


def build_exponent(grid: Grid, spec) -> Exponent:
    """Build an exponent from a ``{"kind": ..., **params}`` spec.

    Kinds
    -----
    constant : ``q``
    log-holder : ``p_inf``, ``c``, optional ``profile`` ("reciprocal-log",
        ``p_inf + c/log(e+|x|)``, or "bump", ``p_inf + c exp(-(x/width)^2)``)
    ac : ``base`` and ``density`` (values on the grid, 1D only);
        ``p(x) = base + int_{-inf}^x density``
    lerner : ``alpha``, ``beta``, optional ``k_max``
    remapped : ``base`` (an exponent spec, built on ``source`` boundaries or
        on ``grid``) and ``xs``/``ys`` breakpoints of the map
    step : ``values`` given per cell (no analytic form)

    Samples are taken at cell midpoints.
    """
    spec = dict(spec)
    kind = spec.pop("kind")
    if kind == "constant":
        desc = {"kind": "constant", "q": float(spec["q"])}
    elif kind in ("log-holder", "log-hölder"):
        desc = {"kind": "log-holder", "p_inf": float(spec["p_inf"]),
                "c": float(spec.get("c", 1.0)),
                "profile": spec.get("profile", "reciprocal-log")}
        if desc["profile"] == "bump":
            desc["width"] = float(spec.get("width", 1.0))
    elif kind == "lerner":
        return lerner_exponent(grid, float(spec["alpha"]), float(spec["beta"]),
                               int(spec.get("k_max", 3)))
    elif kind == "ac":
        return _ac_exponent(grid, float(spec["base"]), spec["density"])
    elif kind == "remapped":
        src = grid
        if "source" in spec:
            from .grid import make_grid
            src = make_grid(1, spec["source"])
        base = build_exponent(src, spec["base"])
        omega = PiecewiseLinearMap(tuple(spec["xs"]), tuple(spec["ys"]))
        return remap_exponent(base, omega, grid)
    elif kind == "step":
        v = np.asarray(spec["values"], dtype=float)
        return Exponent(GridFunction(grid, v), float(v.min()), float(v.max()),
                        {"kind": "step"})
    else:
        raise ValueError(f"unknown exponent kind {kind!r}")
    values = _analytic(desc)(_radial(grid))
    if not np.all(np.isfinite(values)):
        raise ValueError("exponent is not finite on the grid")
    lo, hi = _bounds(desc, values)
    return Exponent(GridFunction(grid, values), lo, hi, desc)


def _ac_exponent(grid, base, density) -> Exponent:
    if grid.dim != 1:
        raise ValueError("absolutely continuous exponents are 1D")
    dens = density.values if isinstance(density, GridFunction) else np.asarray(density, float)
    if dens.shape != grid.shape:
        raise ValueError("density must have one value per cell")
    if not np.all(np.isfinite(dens)):
        raise ValueError("density is not integrable on the grid")
    w = grid.widths[0]
    edge_vals = base + np.concatenate([[0.0], np.cumsum(dens * w)])
    # p is linear on each cell, so the midpoint value is also the cell mean
    mids = edge_vals[:-1] + 0.5 * dens * w
    lo, hi = float(min(edge_vals.min(), base)), float(max(edge_vals.max(), base))
    return Exponent(GridFunction(grid, mids), lo, hi,
                    {"kind": "ac", "base": base, "l1": float(np.sum(np.abs(dens) * w))})


def lerner_exponent(grid: Grid, alpha: float, beta: float, k_max: int = 3) -> Exponent:
    """Samples of ``beta * (p0(|x|) + alpha)``; requires ``beta*alpha > 1``."""
    if not alpha > 1:
        raise ValueError("alpha must exceed 1")
    if not beta * alpha > 1:
        raise ValueError(f"beta*alpha = {beta * alpha} must exceed 1")
    desc = {"kind": "lerner-p0", "alpha": float(alpha), "beta": float(beta),
            "k_max": int(k_max)}
    values = _analytic(desc)(_radial(grid))
    lo, hi = _bounds(desc, values)
    return Exponent(GridFunction(grid, values), lo, hi, desc)


def lerner_grid(k_max: int = 3, h: float = 0.125, per_efold: int = 8,
                symmetric: bool = True, margin: float = 1.0) -> Grid:
    """Nonuniform 1D grid resolving the Lerner intervals up to ``k_max``.

    Uniform cells of width ``h`` on ``[0, 1]``, then log-spaced cells with
    ``per_efold`` cells per e-fold, with every interval endpoint
    ``e^{k^3}``, ``e^{k^3 e^{1/k^2}}`` inserted as an edge.  The grid extends
    ``margin`` e-folds past the last interval.
    """
    la, lb = lerner_intervals(k_max)
    top = float(lb[-1]) + margin
    logs = np.linspace(0.0, top, int(math.ceil(top * per_efold)) + 1)
    logs = np.union1d(logs, np.concatenate([la, lb]))
    # drop log-edges that nearly coincide with an inserted endpoint
    keep = np.concatenate([[True], np.diff(logs) > 0.25 / per_efold])
    logs = np.union1d(logs[keep], np.concatenate([la, lb]))
    pos = np.union1d(np.arange(0.0, 1.0, h), np.exp(logs))
    if symmetric:
        edges = np.concatenate([-pos[:0:-1], pos])
    else:
        edges = pos
    return Grid([edges])


def remap_exponent(p: Exponent, omega: PiecewiseLinearMap, target: Grid) -> Exponent:
    """Exponent ``x -> p(omega^{-1}(x))`` sampled on ``target``.

    Uses the analytic descriptor when available, otherwise looks up the
    piecewise-constant samples of ``p`` (clamped to its domain).
    """
    if target.dim != 1 or p.grid.dim != 1:
        raise ValueError("remapping is implemented in 1D")
    pre = omega.inverse(np.asarray(target.midpoints[0]))
    values = p.evaluate(pre)
    desc = None
    if p.descriptor is not None and _analytic(p.descriptor) is not None:
        desc = {"kind": "remapped", "base": p.descriptor,
                "xs": list(omega.xs), "ys": list(omega.ys)}
    return Exponent(GridFunction(target, values), p.p_minus, p.p_plus, desc)


def conjugate_exponent(p: Exponent) -> Exponent:
    """Pointwise dual exponent ``p' = p/(p-1)``."""
    if not p.p_minus > 1:
        raise ValueError("conjugate exponent is unbounded when p_minus <= 1")
    v = p.values
    conj = v / (v - 1.0)
    desc = None if p.descriptor is None else {"kind": "conjugate", "of": p.descriptor}
    return Exponent(GridFunction(p.grid, conj), p.p_plus / (p.p_plus - 1.0),
                    p.p_minus / (p.p_minus - 1.0), desc)


def cube_mean_exponent(p: Exponent, Q: Cube) -> float:
    """Harmonic volume-weighted mean: ``1/p_Q = |Q|^{-1} int_Q 1/p``."""
    vol = p.grid.volumes[Q.slices]
    inv = math.fsum((vol / p.values[Q.slices]).ravel()) / math.fsum(vol.ravel())
    return 1.0 / inv


@dataclass(frozen=True)
class RegularityReport:
    local_modulus: float
    decay_modulus: float
    nekvinda_value: float
    pairs_checked: int = field(default=0, compare=False)


def _pair_max(pts, vals, pairs_i, pairs_j):
    d = pts[pairs_i] - pts[pairs_j]
    dist = np.abs(d) if d.ndim == 1 else np.linalg.norm(d, axis=-1)
    ok = (dist < 0.5) & (dist > 0)
    if not np.any(ok):
        return 0.0
    dp = np.abs(vals[pairs_i] - vals[pairs_j])[ok]
    return float(np.max(dp * np.log(1.0 / dist[ok])))


def regularity_report(p: Exponent, p_inf: float, c: float = 0.5,
                      budget: int = 200_000, seed: int = 0,
                      full_limit: int = 2048) -> RegularityReport:
    """Log-Hölder moduli and the Nekvinda integral of an exponent.

    ``local_modulus`` is the largest ``|p(x)-p(y)| log(1/|x-y|)`` over
    midpoint pairs closer than 1/2: all pairs when the grid has at most
    ``full_limit`` cells, otherwise all adjacent pairs plus ``budget``
    random pairs.  ``decay_modulus`` is ``max |p(x)-p_inf| log(e+|x|)`` and
    ``nekvinda_value`` is ``int c^{1/|p(x)-p_inf|}`` (zero where p = p_inf).
    """
    if not 0 < c < 1:
        raise ValueError("Nekvinda constant must lie in (0, 1)")
    g = p.grid
    vals = p.values.ravel()
    pts = g.centers().reshape(g.ncells, -1)
    if g.dim == 1:
        pts = pts[:, 0]
    n = vals.size
    local = 0.0
    checked = 0
    if n <= full_limit:
        for start in range(0, n, 256):
            i = np.arange(start, min(start + 256, n))
            I, J = np.meshgrid(i, np.arange(n), indexing="ij")
            I, J = I.ravel(), J.ravel()
            keep = J > I
            local = max(local, _pair_max(pts, vals, I[keep], J[keep]))
            checked += int(keep.sum())
    else:
        idx = np.arange(n).reshape(g.shape)
        pi, pj = [], []
        for ax in range(g.dim):
            a = np.take(idx, np.arange(g.shape[ax] - 1), axis=ax).ravel()
            b = np.take(idx, np.arange(1, g.shape[ax]), axis=ax).ravel()
            pi.append(a)
            pj.append(b)
        rng = np.random.default_rng(seed)
        pi.append(rng.integers(0, n, budget))
        pj.append(rng.integers(0, n, budget))
        I, J = np.concatenate(pi), np.concatenate(pj)
        local = _pair_max(pts, vals, I, J)
        checked = I.size
    r = g.center_norms().ravel()
    dev = np.abs(vals - p_inf)
    decay = float(np.max(dev * np.log(math.e + r)))
    with np.errstate(divide="ignore"):
        integrand = np.where(dev > 0, np.exp(math.log(c) / np.where(dev > 0, dev, 1.0)), 0.0)
    nek = math.fsum((integrand * g.volumes.ravel()).tolist())
    return RegularityReport(local, decay, nek, checked)
