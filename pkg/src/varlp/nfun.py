"""Checks of the inequalities linking the s-means of t^{p(x)} and their conjugates.

Each check returns ``(name, kind, samples, value, witness)``:

``kind == "ratio"``
    ``value`` is the worst ``lhs / rhs`` of an inequality ``lhs <= rhs``;
    it holds on the samples when ``value <= 1 + 1e-6``.
``kind == "relerr"``
    ``value`` is the worst relative error of an identity.
``kind == "bracket"``
    ``value`` is ``C = max(max, 1/min)`` of a quantity claimed to be ~ 1.
"""

from __future__ import annotations

import math

import numpy as np

from .exponent import Exponent, build_exponent
from .grid import GridFunction, enum_cubes
from .modular import (alpha_s, indicator_norms, legendre_at, msq, msq_table)

__all__ = [
    "check_conj_half_bound", "check_conj_mean_bound", "check_conj_witness_lower", "check_double_conjugate",
    "check_unit_scale", "check_alpha", "run_checks",
]


def _random_exponents(p: Exponent, rng, count):
    out = [p]
    g = p.grid
    for _ in range(count - 1):
        v = rng.uniform(1.2, 4.0, g.shape)
        out.append(build_exponent(g, {"kind": "step", "values": v}))
    return out


def _setups(p, samples, seed, per_t, per_decade):
    """(exponent, cube, s, star table) combos, ``per_t`` t-values each."""
    rng = np.random.default_rng(seed)
    n = max(1, math.ceil(samples / per_t))
    exps = _random_exponents(p, rng, min(n, 10))
    cubes = enum_cubes(p.grid, p.grid.local_cap)
    for i in range(n):
        q = exps[i % len(exps)]
        Q = cubes[int(rng.integers(len(cubes)))]
        s = float(rng.choice([1.0, rng.uniform(1.0, 3.0)]))
        yield i, q, Q, s, msq_table(q, Q, s, "phi_star", per_decade), rng


def check_conj_half_bound(p, samples=10_000, seed=0, per_decade=512, per_t=100):
    """``(M*)^*(u/2) <= M(u)`` for sampled (p, Q, s, u)."""
    worst, wit, count = -math.inf, "", 0
    for i, q, Q, s, tab, rng in _setups(p, samples, seed, per_t, per_decade):
        u = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), per_t))
        r = legendre_at(tab, u / 2) / msq(q, Q, s, u, "phi")
        k = int(np.argmax(r))
        count += u.size
        if r[k] > worst:
            worst, wit = float(r[k]), f"set{i}/{Q.label()}/s={s:.3g}/u={u[k]:.4g}"
    return "conj-half-bound", "ratio", count, worst, wit


def check_conj_mean_bound(p, samples=2_000, seed=0, per_decade=512, per_t=20):
    """``(M*)^*(M_{s,Q} f / 2) <= M_{s,Q}(|f|^{p(x)})`` on random f."""
    worst, wit, count = -math.inf, "", 0
    for i, q, Q, s, tab, rng in _setups(p, samples, seed + 1, per_t, per_decade):
        vol = q.grid.volumes[Q.slices].ravel()
        pv = q.values[Q.slices].ravel()
        for j in range(per_t):
            f = np.exp(rng.uniform(math.log(1e-2), math.log(1e2), vol.size))
            mean = (np.sum(f ** s * vol) / Q.volume) ** (1 / s)
            lhs = legendre_at(tab, 0.5 * mean)
            rhs = (np.sum(f ** (pv * s) * vol) / Q.volume) ** (1 / s)
            count += 1
            if lhs / rhs > worst:
                worst, wit = float(lhs / rhs), f"set{i}/{Q.label()}/f{j}"
    return "conj-mean-bound", "ratio", count, worst, wit


def check_conj_witness_lower(p, samples=2_000, seed=0, per_decade=512, per_t=20):
    """``(M*)^*(2 M_{s,Q} f_t) >= M_{s,Q}(phi(f_t))`` for ``f_t = phi*(x,t)/t`` on Q."""
    worst, wit, count = -math.inf, "", 0
    for i, q, Q, s, tab, rng in _setups(p, samples, seed + 2, per_t, per_decade):
        vol = q.grid.volumes[Q.slices].ravel()
        pv = q.values[Q.slices].ravel()
        pp = pv / (pv - 1)
        for t in np.exp(rng.uniform(math.log(1e-2), math.log(1e2), per_t)):
            ft = (pv - 1) * pv ** (-pp) * t ** (pp - 1)
            mean = (np.sum(ft ** s * vol) / Q.volume) ** (1 / s)
            lhs = legendre_at(tab, 2 * mean)
            rhs = (np.sum(ft ** (pv * s) * vol) / Q.volume) ** (1 / s)
            count += 1
            if rhs / lhs > worst:
                worst, wit = float(rhs / lhs), f"set{i}/{Q.label()}/t={t:.4g}"
    return "conj-witness-lower", "ratio", count, worst, wit


def check_double_conjugate(grid, qs=(1.5, 2.0, 3.0), s_values=(1.0, 2.0), per_decade=512):
    """Constant p: conjugate of the tabulated s-mean of phi* equals t^p."""
    worst, wit, count = -math.inf, "", 0
    Q = grid.cube((0,) * grid.dim, (1,) * grid.dim)
    for qv in qs:
        p = build_exponent(grid, {"kind": "constant", "q": qv})
        for s in s_values:
            tab = msq_table(p, Q, s, "phi_star", per_decade)
            u = np.geomspace(1e-3, 1e3, 200)
            # only where the maximiser is an interior table point
            k = tab.argmax_index(u)
            u = u[(k >= 1) & (k <= tab.t_grid.size - 2)]
            err = np.abs(legendre_at(tab, u) / u ** qv - 1)
            k = int(np.argmax(err))
            count += u.size
            if err[k] > worst:
                worst, wit = float(err[k]), f"q={qv}/s={s}/u={u[k]:.4g}"
    return "double-conjugate", "relerr", count, worst, wit


def _bracket_row(name, vals, labels):
    vals = np.asarray(vals)
    C = np.maximum(vals, 1 / vals)
    k = int(np.argmax(C))
    return name, "bracket", int(vals.size), float(C[k]), labels[k]


def _local_tables(p, s, per_decade):
    cubes = enum_cubes(p.grid, p.grid.local_cap)
    return cubes, [msq_table(p, Q, s, "phi_star", per_decade) for Q in cubes]


def check_unit_scale(p, s=1.0, per_decade=512, tables=None):
    """``|Q| M(1/||chi_Q||)`` and ``|Q| (M*)^*(1/||chi_Q||)`` over all local cubes."""
    cubes, tabs = tables or _local_tables(p, s, per_decade)
    norms = indicator_norms(p, cubes)
    a, b = [], []
    for Q, n, tab in zip(cubes, norms, tabs):
        a.append(Q.volume * msq(p, Q, s, 1 / n, "phi"))
        b.append(Q.volume * legendre_at(tab, 1 / n))
    labels = [Q.label() for Q in cubes]
    return [_bracket_row("unit-scale-phi", a, labels), _bracket_row("unit-scale-star", b, labels)]


def check_alpha(p, s=1.0, per_decade=512, n_t=16, tables=None):
    """alpha_s at t = 1 and t = 1/||chi_Q|| over all local cubes, plus the
    bracket of alpha over the t-range between them."""
    cubes, tabs = tables or _local_tables(p, s, per_decade)
    norms = indicator_norms(p, cubes)
    a1, an, arange_, labels = [], [], [], []
    invalid = 0
    mono = -math.inf
    mono_wit = ""
    for Q, n, tab in zip(cubes, norms, tabs):
        v1 = alpha_s(p, Q, s, 1.0, tab)
        vn = alpha_s(p, Q, s, 1.0 / n, tab)
        invalid += (not v1.valid) + (not vn.valid)
        a1.append(v1.value)
        an.append(vn.value)
        ts = np.geomspace(min(1.0, 1 / n), max(1.0, 1 / n), n_t)
        arange_.append(max(alpha_s(p, Q, s, t, tab).value for t in ts))
        # smallest C with alpha(t2) <= C (alpha(t1) + 1) for t1 <= t2 <= 1
        tt = np.geomspace(1e-2, 1.0, n_t)
        al = np.array([alpha_s(p, Q, s, t, tab).value for t in tt])
        ratio = max(al[j] / (al[i] + 1) for i in range(n_t) for j in range(i, n_t))
        if ratio > mono:
            mono, mono_wit = ratio, Q.label()
        labels.append(Q.label())
    rows = [_bracket_row("alpha(Q,1)", a1, labels),
            _bracket_row("alpha(Q,1/||chi_Q||)", an, labels)]
    k = int(np.argmax(arange_))
    rows.append(("alpha-window", "bracket", len(cubes), float(arange_[k]), labels[k]))
    rows.append(("alpha-growth", "bracket", len(cubes), float(mono), mono_wit))
    rows.append(("alpha-invalid", "count", 2 * len(cubes), float(invalid), ""))
    return rows


def run_checks(p: Exponent, samples=10_000, seed=0, per_decade=512):
    rows = [check_conj_half_bound(p, samples, seed, per_decade),
            check_conj_mean_bound(p, max(1, samples // 5), seed, per_decade),
            check_conj_witness_lower(p, max(1, samples // 5), seed, per_decade),
            check_double_conjugate(p.grid, per_decade=per_decade)]
    tables = _local_tables(p, 1.0, per_decade)
    rows += check_unit_scale(p, per_decade=per_decade, tables=tables)
    rows += check_alpha(p, per_decade=per_decade, tables=tables)
    return rows
