"""Modulars, Luxemburg norms and the N-functions built from t^{p(x)}.

Norms are found by bisection on ``u = log(lambda)`` of the log-modular

    G(u) = log sum_i w_i |t_i|^{p_i} e^{-p_i u},

which is evaluated with a log-sum-exp and therefore never overflows.
``G`` is strictly decreasing with slope between ``-p_max`` and ``-p_min``,
which gives a tight initial bracket from a single evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from .exponent import Exponent
from .grid import Cube, GridFunction

__all__ = [
    "modular", "luxemburg_norm", "luxemburg_batch", "seq_norm",
    "indicator_norms", "restricted_norms", "phi_star_eval", "msq", "msq_table",
    "NFunctionTable", "conj_transform", "legendre_at", "alpha_s",
    "AlphaValue", "OVERFLOW_LOG",
]

OVERFLOW_LOG = 700.0
DEFAULT_RTOL = 1e-10


def _rowsum(a):
    # sequential sum: trailing zero padding cannot change the result
    return np.cumsum(a, axis=-1)[..., -1]


def _log_modular(loga, exps, logw, u, m_active):
    terms = exps * (loga - u[:, None]) + logw
    m = np.max(terms, axis=1)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(under="ignore"):
        s = _rowsum(np.exp(terms - m[:, None]))
    return m + np.log(s)


def luxemburg_batch(abs_vals, exps, weights, rtol: float = DEFAULT_RTOL):
    """Luxemburg norms of many weighted sequences at once.

    Row ``r`` returns ``inf{lam > 0 : sum_i w_ri |a_ri / lam|^{p_ri} <= 1}``.
    Entries with ``a = 0`` or ``w = 0`` are inactive, so rows of different
    length can be padded with zeros at the end.  Each row is bisected
    independently and is not affected by the other rows of the batch.

    Parameters
    ----------
    abs_vals, exps, weights : array_like, shape (rows, width)
    rtol : float
        Relative accuracy of each returned norm.

    Returns
    -------
    ndarray, shape (rows,)
    """
    a = np.abs(np.atleast_2d(np.asarray(abs_vals, dtype=float)))
    p = np.broadcast_to(np.atleast_2d(np.asarray(exps, dtype=float)), a.shape)
    w = np.broadcast_to(np.atleast_2d(np.asarray(weights, dtype=float)), a.shape)
    active = (a > 0) & (w > 0)
    with np.errstate(divide="ignore"):
        loga = np.where(active, np.log(np.where(active, a, 1.0)), -np.inf)
        logw = np.where(active, np.log(np.where(active, w, 1.0)), 0.0)
    p = np.where(active, p, 1.0)
    if np.any(p[active] <= 0):
        raise ValueError("exponents must be positive")
    nz = active.any(axis=1)
    out = np.zeros(a.shape[0])
    if not nz.any():
        return out
    loga, p, logw, act = loga[nz], p[nz], logw[nz], active[nz]
    pmin = np.where(act, p, np.inf).min(axis=1)
    pmax = np.where(act, p, -np.inf).max(axis=1)

    def G(u):
        return _log_modular(loga, p, logw, u, act)

    u0 = loga.max(axis=1)
    g0 = G(u0)
    lo = u0 + np.where(g0 >= 0, g0 / pmax, g0 / pmin)
    hi = u0 + np.where(g0 >= 0, g0 / pmin, g0 / pmax)
    pad = 1e-12 * (1.0 + np.abs(u0)) + 1e-12
    lo, hi = lo - pad, hi + pad
    # verify the bracket, widening geometrically if rounding spoilt it
    step = np.maximum(hi - lo, 1e-6)
    for _ in range(200):
        bad_lo = G(lo) < 0
        bad_hi = G(hi) > 0
        if not (bad_lo.any() or bad_hi.any()):
            break
        lo = np.where(bad_lo, lo - step, lo)
        hi = np.where(bad_hi, hi + step, hi)
        step = step * 2
    tol = rtol
    for _ in range(200):
        open_ = (hi - lo) > tol
        if not open_.any():
            break
        mid = 0.5 * (lo + hi)
        gm = G(mid)
        # converged rows keep their bracket untouched
        lo = np.where(open_ & (gm > 0), mid, lo)
        hi = np.where(open_ & (gm <= 0), mid, hi)
    out[nz] = np.exp(0.5 * (lo + hi))
    return out


def modular(f: GridFunction, p: Exponent) -> float:
    """``int |f|^{p(x)} dx``; returns ``inf`` if any cell term overflows."""
    _check_same_grid(f, p)
    a = np.abs(f.values).ravel()
    pv = p.values.ravel()
    vol = f.grid.volumes.ravel()
    nz = a > 0
    if not nz.any():
        return 0.0
    logt = pv[nz] * np.log(a[nz]) + np.log(vol[nz])
    if np.any(logt > OVERFLOW_LOG):
        return math.inf
    return math.fsum((a[nz] ** pv[nz] * vol[nz]).tolist())


def _check_same_grid(f, p):
    if f.grid is not p.grid and f.grid != p.grid:
        raise ValueError("function and exponent live on different grids")


def luxemburg_norm(f: GridFunction, p: Exponent, rtol: float = DEFAULT_RTOL) -> float:
    """``inf{lam > 0 : modular(f/lam) <= 1}``; 0 for the zero function."""
    _check_same_grid(f, p)
    return float(luxemburg_batch(f.values.ravel(), p.values.ravel(),
                                 f.grid.volumes.ravel(), rtol)[0])


def seq_norm(t, exps, weights=None, rtol: float = DEFAULT_RTOL) -> float:
    """Luxemburg norm of a sequence: ``inf{lam : sum w_i|t_i/lam|^{p_i} <= 1}``."""
    t = np.asarray(t, dtype=float).ravel()
    exps = np.asarray(exps, dtype=float).ravel()
    weights = np.ones_like(t) if weights is None else np.asarray(weights, float).ravel()
    if not (t.size == exps.size == weights.size):
        raise ValueError("sequence, exponents and weights must have equal length")
    if np.any(exps <= 1):
        raise ValueError("sequence exponents must exceed 1")
    return float(luxemburg_batch(t, exps, weights, rtol)[0])


def indicator_norms(p: Exponent, cubes, rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """``||chi_Q||_{p(.)}`` for every cube, solved as one padded batch.

    Rows are the cells of each cube in C order, so the result for a cube
    does not depend on which other cubes are in the list.
    """
    return restricted_norms(None, p, cubes, rtol)


def restricted_norms(f: GridFunction | None, p: Exponent, cubes,
                     rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """``||f chi_Q||_{p(.)}`` for every cube (``f = None`` means ``f = 1``)."""
    cubes = list(cubes)
    if not cubes:
        return np.zeros(0)
    g = p.grid
    if f is not None:
        _check_same_grid(f, p)
    width = max(q.ncells for q in cubes)
    A = np.zeros((len(cubes), width))
    P = np.ones((len(cubes), width))
    W = np.zeros((len(cubes), width))
    for r, q in enumerate(cubes):
        pv = p.values[q.slices].ravel()
        k = pv.size
        A[r, :k] = 1.0 if f is None else f.values[q.slices].ravel()
        P[r, :k] = pv
        W[r, :k] = g.volumes[q.slices].ravel()
    return luxemburg_batch(A, P, W, rtol)


# -- N-functions -------------------------------------------------------------

def phi_star_eval(p_val, t):
    """Complementary function ``(p-1) p^{-p'} t^{p'}`` with ``p' = p/(p-1)``."""
    p_val = np.asarray(p_val, dtype=float)
    if np.any(p_val <= 1):
        raise ValueError("p must exceed 1")
    t = np.asarray(t, dtype=float)
    pp = p_val / (p_val - 1.0)
    out = (p_val - 1.0) * p_val ** (-pp) * t ** pp
    return float(out) if out.ndim == 0 else out


def _log_phi(pv, logt, which):
    if which == "phi":
        return pv * logt
    if which == "phi_star":
        pp = pv / (pv - 1.0)
        return np.log(pv - 1.0) - pp * np.log(pv) + pp * logt
    raise ValueError(f"which must be 'phi' or 'phi_star', got {which!r}")


def msq(p: Exponent, Q: Cube, s: float, t, which: str = "phi"):
    """s-mean over Q of ``phi(x, t) = t^{p(x)}`` (or of its complement).

    ``((1/|Q|) int_Q phi(x,t)^s dx)^{1/s}``; vectorised in ``t``.  Values
    beyond ``exp(700)`` saturate to ``inf``.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    pv = p.values[Q.slices].ravel()
    logvol = np.log(p.grid.volumes[Q.slices].ravel())
    flat = t.ravel()
    pos = flat > 0
    out = np.zeros(flat.shape)
    if pos.any():
        logt = np.log(flat[pos])[:, None]
        lphi = _log_phi(pv[None, :], logt, which)
        lm = (logsumexp(s * lphi + logvol[None, :], axis=1) - math.log(Q.volume)) / s
        out[pos] = np.where(lm > OVERFLOW_LOG, np.inf, np.exp(np.minimum(lm, OVERFLOW_LOG)))
    out = out.reshape(t.shape)
    return float(out) if out.ndim == 0 else out


def default_t_grid(per_decade: int = 512, t_min: float = 1e-6, t_max: float = 1e6):
    decades = math.log10(t_max) - math.log10(t_min)
    n = int(round(decades * per_decade)) + 1
    return np.logspace(math.log10(t_min), math.log10(t_max), n)


@dataclass(frozen=True, eq=False)
class NFunctionTable:
    """Sampled N-function on a log-spaced grid of positive reals.

    The function is taken to vanish at ``t = 0``, so the Legendre conjugate
    is ``max(0, max_i (u t_i - g_i))``.
    """

    t_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 3:
            raise ValueError("table needs matching 1D arrays of length >= 3")
        if np.any(np.diff(t) <= 0) or t[0] <= 0:
            raise ValueError("t_grid must be positive and strictly increasing")
        if t[0] > 1e-6 * (1 + 1e-9) or t[-1] < 1e6 * (1 - 1e-9):
            raise ValueError("t_grid must span [1e-6, 1e6]")
        if np.any(v < 0) or np.any(np.isnan(v)):
            raise ValueError("values must be non-negative")
        fin = v[np.isfinite(v)]
        if np.any(np.diff(fin) < -1e-12 * np.maximum(np.abs(fin[1:]), 1e-300)):
            raise ValueError("values must be non-decreasing")
        t.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, fn, per_decade: int = 512):
        t = default_t_grid(per_decade)
        return cls(t, fn(t))

    @cached_property
    def convex(self) -> bool:
        t, v = self.t_grid, self.values
        if not np.all(np.isfinite(v)):
            return False
        s = np.diff(v) / np.diff(t)
        return bool(np.all(np.diff(s) >= -1e-9 * np.maximum(np.abs(s[1:]), 1e-300)))

    @cached_property
    def _hull(self):
        """Lower convex hull of the finite samples plus the origin."""
        t, v = self.t_grid, self.values
        fin = np.isfinite(v)
        idx = np.concatenate([[-1], np.nonzero(fin)[0]])
        xs = np.concatenate([[0.0], t[fin]])
        ys = np.concatenate([[0.0], v[fin]])
        hull = []
        for i in range(xs.size):
            while len(hull) >= 2:
                a, b = hull[-2], hull[-1]
                cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a])
                if cross <= 0:
                    hull.pop()
                else:
                    break
            hull.append(i)
        hull = np.array(hull)
        slopes = np.diff(ys[hull]) / np.diff(xs[hull])
        return xs[hull], ys[hull], idx[hull], slopes

    def argmax_index(self, u):
        """Grid index of the maximiser of ``u t - g(t)`` (-1 means t = 0)."""
        xs, ys, idx, slopes = self._hull
        k = np.searchsorted(slopes, np.asarray(u, dtype=float), side="left")
        return idx[k]

    def __call__(self, t):
        """Piecewise-linear interpolation (log-log inside the table)."""
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            lv = np.log(self.values)
            out = np.exp(np.interp(np.log(t), np.log(self.t_grid), lv))
        return np.where(t > 0, out, 0.0)


def legendre_at(g: NFunctionTable, u):
    """Discrete Legendre conjugate ``max(0, max_i(u t_i - g_i))`` at ``u``.

    Uses the lower convex hull of the table, so each query is a binary
    search; the result equals the brute-force maximum over the samples.
    """
    xs, ys, _, slopes = g._hull
    u = np.asarray(u, dtype=float)
    k = np.searchsorted(slopes, u, side="left")
    out = u * xs[k] - ys[k]
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def conj_transform(g: NFunctionTable) -> NFunctionTable:
    """Legendre conjugate tabulated on the same grid."""
    return NFunctionTable(g.t_grid, legendre_at(g, g.t_grid))


def msq_table(p: Exponent, Q: Cube, s: float, which: str,
              per_decade: int = 512) -> NFunctionTable:
    t = default_t_grid(per_decade)
    return NFunctionTable(t, msq(p, Q, s, t, which))


class AlphaValue(NamedTuple):
    value: float
    valid: bool


def alpha_s(p: Exponent, Q: Cube, s: float, t: float, table: NFunctionTable | None = None,
            per_decade: int = 512) -> AlphaValue:
    """``M_{s,Q phi}(t) / (M_{s,Q phi*})^*(t)``.

    ``valid`` is False when the conjugate's maximiser lies within one cell of
    either end of the table, where truncation dominates.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if table is None:
        table = msq_table(p, Q, s, "phi_star", per_decade)
    den = legendre_at(table, t)
    if not den > 1e-300:
        raise ValueError("conjugate vanishes at t")
    num = msq(p, Q, s, t, "phi")
    k = int(table.argmax_index(t))
    n = table.t_grid.size
    valid = 1 <= k <= n - 2
    return AlphaValue(float(num / den), bool(valid))
