"""Acceptance criteria, runnable from ``varlp check`` and from pytest.

Each criterion function returns ``(passed, detail)``; :func:`run_all` wraps
them in :class:`Result` objects that print as one PASS/FAIL line.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .conditions import apx_constant, apx_values
from .exponent import build_exponent, lerner_intervals, lerner_p0
from .grid import (DyadicFamily, GridFunction, dyadic_cubes, enum_cubes,
                   integrate, make_grid, uniform_grid)
from .harness import make_config, run_experiment
from .lpaley import build_filterbank
from .maximal import (MaximalSpec, cube_power_mean, cz_decompose, default_zmax,
                      dyadic_parent, maximal, power_prefix)
from .modular import luxemburg_norm, seq_norm
from . import nfun

__all__ = ["Result", "CRITERIA", "run_criterion", "run_all"]

BASEL = math.pi ** 2 / 6


@dataclass
class Result:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.title}: {self.detail} ({self.seconds:.1f}s)"


def _rel_change(a, b):
    return abs(b - a) / abs(a) if math.isfinite(a) and math.isfinite(b) else math.inf


def _table(experiment, **kw):
    return run_experiment(make_config({"experiment": experiment, **kw}))


def _random_grid(rng, n, lo=-4.0, hi=4.0):
    inner = np.sort(rng.uniform(lo, hi, n - 1))
    return make_grid(1, np.concatenate([[lo], inner, [hi]]))


# -- 1 ------------------------------------------------------------------------

def constant_reduction():
    """Luxemburg norm of a constant exponent equals the closed-form L^q norm."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for q in (1.5, 2.0, 3.0):
        for _ in range(200):
            g = _random_grid(rng, int(rng.integers(1, 200)))
            f = GridFunction(g, rng.normal(size=g.shape) * rng.choice([1e-3, 1.0, 1e3]))
            if not np.any(f.values):
                continue
            p = build_exponent(g, {"kind": "constant", "q": q})
            exact = math.fsum((np.abs(f.values) ** q * g.volumes).tolist()) ** (1 / q)
            worst = max(worst, abs(luxemburg_norm(f, p) / exact - 1))
    dt = time.perf_counter() - t0
    return worst <= 1e-8 and dt < 5.0, f"max relerr {worst:.2e}, {dt:.2f}s for 600 norms"


# -- 2 ------------------------------------------------------------------------

def _p0_quadrature(kmax=20_000, nodes=8):
    """p0(0) by Gauss-Legendre in u = log t of 1/u over each E-interval."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    la, lb = lerner_intervals(kmax)
    mid, half = (la + lb) / 2, (lb - la) / 2
    u = mid[:, None] + half[:, None] * x[None, :]
    return math.fsum((half[:, None] * w[None, :] / u).ravel().tolist())


def lerner_closed_form():
    a = abs(lerner_p0(0.0) - BASEL)
    b = abs(_p0_quadrature() - BASEL)
    c = abs(lerner_p0(math.exp(8.0)) - (BASEL - 1))
    ok = a <= 1e-9 and b <= 1e-4 and c <= 1e-9
    return ok, f"|p0(0)-pi^2/6| {a:.1e}, quadrature {b:.1e}, |p0(e^8)-(pi^2/6-1)| {c:.1e}"


# -- 3 ------------------------------------------------------------------------

def _brute_maximal(fs, spec):
    """Maximal functions of all ``fs`` by scanning every cube of the family."""
    g = fs[0].grid
    S = np.stack([power_prefix(f, spec.q) for f in fs], axis=-1)
    if spec.dyadic:
        cubes = dyadic_cubes(g, spec.family)
    else:
        cubes = enum_cubes(g, g.local_cap if spec.local else None, budget=10**9)
    M = np.full(g.shape + (len(fs),), -np.inf)
    for Q in cubes:
        if g.dim == 1:
            s = S[Q.hi[0]] - S[Q.lo[0]]
        else:
            (a, c), (b, d) = Q.lo, Q.hi
            s = S[b, d] - S[a, d] - S[b, c] + S[a, c]
        m = s / g.cube_volume(Q.lo, Q.hi)
        M[Q.slices] = np.maximum(M[Q.slices], m)
    return M if spec.q == 1 else M ** (1.0 / spec.q)


def _random_functions(g, rng, count):
    out = []
    for i in range(count):
        if i % 3 == 0:
            v = rng.integers(0, 3, g.shape).astype(float)  # ties and zeros
        else:
            v = rng.normal(size=g.shape) * rng.choice([1e-3, 1.0, 1e3])
        out.append(GridFunction(g, v))
    return out


def _oracle_grids(rng):
    grids = []
    for n in (1, 2, 3, 5, 8, 13, 21, 32, 47, 64):
        grids.append((uniform_grid(0.0, n / 16, n), True))
        grids.append((_random_grid(rng, n, 0.0, n / 8), False))
    for shape in ((1, 1), (2, 2), (4, 4), (8, 8), (16, 8), (16, 16)):
        grids.append((uniform_grid((0.0, 0.0), (shape[0] / 4, shape[1] / 4), shape), True))
    return grids


def maximal_oracle():
    rng = np.random.default_rng(3)
    checked, bad = 0, []
    for g, aligned in _oracle_grids(rng):
        fs = _random_functions(g, rng, 50)
        specs = [MaximalSpec(local=loc, q=q) for loc in (False, True) for q in (1.0, 2.0)]
        if aligned:
            z = default_zmax(g)
            specs += [MaximalSpec(q=q, family=DyadicFamily(z, (t,)))
                      for q in (1.0, 2.0) for t in (0.0, 0.25)]
        for spec in specs:
            want = _brute_maximal(fs, spec)
            got = np.stack([maximal(f, spec).values for f in fs], axis=-1)
            checked += len(fs)
            if not np.array_equal(got, want):
                bad.append(f"{g.shape}/{spec}")
    return not bad, f"{checked} maximal functions, {len(bad)} mismatches" + (
        f" (first {bad[0]})" if bad else "")


# -- 4 ------------------------------------------------------------------------

def separation_example():
    rows, ok = [], True
    for h in (1 / 16, 1 / 64):
        g = uniform_grid(-2.0, 3.0, round(5 / h))
        f = GridFunction.from_callable(g, lambda x: ((x >= 0) & (x < 1)).astype(float))
        i = int(g.locate(1.5))
        Mg = maximal(f, MaximalSpec()).values[i]
        Ml = maximal(f, MaximalSpec(local=True)).values[i]
        eg, el = abs(Mg - 2 / 3), abs(Ml - 0.5)
        ok &= eg <= 2 * h and el <= 2 * h
        rows.append(f"h={h:g}: M {Mg:.5f} (err {eg:.1e}), Mloc {Ml:.5f} (err {el:.1e})")
    return ok, "; ".join(rows)


# -- 5 ------------------------------------------------------------------------

def apx_identities():
    g = uniform_grid(-2.0, 2.0, 32)
    worst_const = 0.0
    for q in (1.2, 2.0, 3.5):
        p = build_exponent(g, {"kind": "constant", "q": q})
        for local in (True, False):
            r = apx_constant(p, local, budget=10**6)
            worst_const = max(worst_const, abs(r.estimate - 1))
    rng = np.random.default_rng(5)
    low, nested_ok = math.inf, True
    for _ in range(1000):
        gr = _random_grid(rng, int(rng.integers(2, 17)), -1.5, 1.5)
        p = build_exponent(gr, {"kind": "step", "values": rng.uniform(1.05, 6.0, gr.shape)})
        every = enum_cubes(gr, None, budget=10**6)
        vals = apx_values(p, every)
        low = min(low, float(vals.min()))
        loc = [Q for Q in every if Q.volume <= gr.local_cap]
        if loc:
            vloc = apx_values(p, loc)
            nested_ok &= float(vloc.max()) <= float(vals.max())
    ok = worst_const <= 1e-9 and low >= 0.5 and nested_ok
    return ok, (f"constant |A-1| {worst_const:.1e}; min cube value over 1000 exponents "
                f"{low:.4f}; local <= global {'always' if nested_ok else 'VIOLATED'}")


# -- 6 ------------------------------------------------------------------------

def power_identities():
    rng = np.random.default_rng(6)
    e17 = e18 = 0.0
    for _ in range(500):
        g = _random_grid(rng, int(rng.integers(1, 40)))
        p = build_exponent(g, {"kind": "step", "values": rng.uniform(1.1, 5.0, g.shape)})
        beta = rng.uniform(1 / p.values.min(), 1.0)
        f = GridFunction(g, np.abs(rng.normal(size=g.shape)) + 1e-3)
        pb = build_exponent(g, {"kind": "step", "values": beta * p.values})
        lhs = luxemburg_norm(GridFunction(g, f.values ** (1 / beta)), pb) ** beta
        e17 = max(e17, abs(lhs - luxemburg_norm(f, p)))
        m = int(rng.integers(1, 40))
        t = rng.normal(size=m)
        ps = rng.uniform(1.1, 5.0, m)
        w = rng.uniform(0.1, 2.0, m)
        beta = rng.uniform(1 / ps.min(), 1.0)
        lhs = seq_norm(np.abs(t) ** (1 / beta), beta * ps, w) ** beta
        e18 = max(e18, abs(lhs - seq_norm(t, ps, w)))
    return max(e17, e18) <= 1e-6, f"function identity err {e17:.1e}, sequence identity err {e18:.1e}"


# -- 7 ------------------------------------------------------------------------

def _refine_C(table, key=None):
    rows = {}
    for r in table.rows:
        d = dict(zip(table.columns, r))
        rows[(d.get("exponent", ""), d["refine"])] = d["C"] if "C" in d else None
    return rows


def partition_bracket():
    parts = []
    ok = True
    t = _table("partition-ratio")
    C = _refine_C(t)
    for name in ("p", "p'"):
        ch = _rel_change(C[(name, 1)], C[(name, 2)])
        ok &= ch <= 0.2
        parts.append(f"{name}: C {C[(name, 1)]:.5f} -> {C[(name, 2)]:.5f} ({ch:.1%})")
    lg = _table("local-global")
    Cl = {d["refine"]: d["C"] for d in (dict(zip(lg.columns, r)) for r in lg.rows)}
    ch = _rel_change(Cl[1], Cl[2])
    ok &= ch <= 0.2
    parts.append(f"local-global: C {Cl[1]:.5f} -> {Cl[2]:.5f} ({ch:.1%})")
    dev = 0.0
    for exp, tab in (("partition-ratio", "exponent"), ("local-global", None)):
        tt = _table(exp, exponent={"kind": "constant", "q": 3.0 if tab else 2.0},
                    params={"refinements": [1]})
        for col in ("ratio_min", "ratio_max"):
            dev = max(dev, max(abs(v - 1) for v in tt.column(col)))
    ok &= dev <= 1e-8
    parts.append(f"constant exponent |ratio-1| {dev:.1e}")
    return ok, "; ".join(parts)


# -- 8 ------------------------------------------------------------------------

def nfunction_checks():
    t = _table("nfun-checks")
    rows = {d["check"]: d for d in (dict(zip(t.columns, r)) for r in t.rows)}
    ok = True
    parts = []
    for name in ("conj-half-bound", "conj-mean-bound", "conj-witness-lower"):
        v = rows[name]["value"]
        ok &= v <= 1 + 1e-6
        parts.append(f"{name} {v:.4f}")
    ok &= rows["conj-half-bound"]["samples"] >= 10_000
    dc = rows["double-conjugate"]["value"]
    ok &= dc <= 1e-3
    parts.append(f"double-conjugate {dc:.1e}")
    ok &= rows["alpha-invalid"]["value"] == 0
    # the alpha brackets must be finite and agree within 20% on a refined grid
    g2 = uniform_grid(-4.0, 4.0, 128)
    p2 = build_exponent(g2, {"kind": "log-holder", "p_inf": 2.0, "c": 1.0})
    fine = {r[0]: r[3] for r in nfun.check_alpha(p2, per_decade=128, n_t=4)}
    for name in ("alpha(Q,1)", "alpha(Q,1/||chi_Q||)"):
        a, b = rows[name]["value"], fine[name]
        ch = _rel_change(a, b)
        ok &= ch <= 0.2
        parts.append(f"{name} C {a:.4f} (64 cells) vs {b:.4f} (128)")
    return ok, "; ".join(parts)


# -- 9 ------------------------------------------------------------------------

def shifted_dyadic():
    t = _table("shift-dyadic")
    rows = [dict(zip(t.columns, r)) for r in t.rows]
    C = {(d["max_side"], d["shifts"]): d for d in rows}
    a, b = C[(1, 33)], C[(1, 65)]
    ch = _rel_change(a["C"], b["C"])
    detail = (f"side<=1: C {a['C']:.4g} (33 shifts, {a['zero_cells']} cells with zero average)"
              f" -> {b['C']:.4g} (65 shifts, {b['zero_cells']}), change {ch:.1%}")
    if (2, 33) in C and (2, 65) in C:
        c2, d2 = C[(2, 33)]["C"], C[(2, 65)]["C"]
        detail += f"; side<=2 diagnostic: {c2:.4g} -> {d2:.4g} ({_rel_change(c2, d2):.1%})"
    return math.isfinite(a["C"]) and ch <= 0.2, detail


# -- 10 -----------------------------------------------------------------------

def cz_checks():
    rng = np.random.default_rng(10)
    counts = [0, 0]
    failures = []
    for trial in range(200):
        n = int(rng.choice([16, 32, 64]))
        g = uniform_grid(-2.0, 2.0, n)
        q = float(rng.choice([1.0, 2.0]))
        shift = float(rng.choice([0.0, 0.25, 0.5, -0.75]))
        f = GridFunction(g, rng.exponential(size=n) * (rng.random(n) < 0.6))
        lam = float(rng.uniform(0.05, 3.0))
        fam = DyadicFamily(default_zmax(g), (shift,))
        S = power_prefix(f, q)
        cubes = cz_decompose(f, lam, q, (shift,))
        counts[0] += 1
        counts[1] += len(cubes)
        cover = np.zeros(g.shape, dtype=int)
        for c in cubes:
            cover[c.cube.slices] += 1
            if not cube_power_mean(g, S, c.cube) ** (1 / q) > lam / 2:
                failures.append(f"trial {trial}: mean")
            par = dyadic_parent(g, fam, c.level, c.index)
            if par is not None and cube_power_mean(g, S, par) ** (1 / q) > lam / 2:
                failures.append(f"trial {trial}: parent passes")
        if np.any(cover > 1):
            failures.append(f"trial {trial}: overlap")
        sup = maximal(f, MaximalSpec(q=q, family=fam)).values > lam / 2
        if not np.array_equal(cover > 0, sup):
            failures.append(f"trial {trial}: union")
    return not failures, (f"{counts[0]} (f, lambda) pairs, {counts[1]} cubes, "
                          f"{len(failures)} violations" + (f" ({failures[0]})" if failures else ""))


# -- 11 -----------------------------------------------------------------------

def square_function():
    parts, ok = [], True
    fb = build_filterbank(uniform_grid(-6.0, 6.0, 6144), 6, 2.0)
    mean = abs(integrate(fb.phi))
    ok &= mean <= 1e-6
    parts.append(f"int phi {mean:.1e}")
    t = _table("sf-equiv")
    rows = [dict(zip(t.columns, r)) for r in t.rows]
    for kind in dict.fromkeys(d["exponent"] for d in rows):
        rs = [d for d in rows if d["exponent"] == kind]
        base = next(d for d in rs if d["refine"] == 1 and d["J"] == min(x["J"] for x in rs))
        ok &= base["recon_error"] <= 0.05
        ch = max(_rel_change(base[c], d[c]) for d in rs for c in ("c_low", "c_high"))
        ok &= ch <= 0.2
        parts.append(f"{kind}: [{base['c_low']:.4f}, {base['c_high']:.4f}] recon "
                     f"{base['recon_error']:.1e}, max change {ch:.1%}")
    fs = _table("fs-vector")
    r = {d["refine"]: d for d in (dict(zip(fs.columns, x)) for x in fs.rows)}
    ch = max(_rel_change(r[1][c], r[2][c]) for c in ("c_low", "c_high"))
    finite = all(math.isfinite(r[k][c]) for k in r for c in ("c_low", "c_high"))
    ok &= finite and ch <= 0.2
    parts.append(f"vector maximal [{r[1]['c_low']:.4f}, {r[1]['c_high']:.4f}] change {ch:.1%}")
    return ok, "; ".join(parts)


# -- 12 -----------------------------------------------------------------------

def lerner_trend():
    t = _table("lerner-scan")
    rows = [dict(zip(t.columns, r)) for r in t.rows]
    ok = True
    parts = []
    for beta in dict.fromkeys(d["beta"] for d in rows):
        g = [d["global_estimate"] for d in sorted(
            (d for d in rows if d["beta"] == beta), key=lambda d: d["intervals"])]
        ok &= all(b > a for a, b in zip(g, g[1:]))
        parts.append(f"beta {beta:g}: " + " < ".join(f"{v:.4f}" for v in g))
    loc = [d["local_estimate"] for d in rows]
    spread = max(loc) / min(loc)
    ok &= spread < 2
    parts.append(f"local spread {spread:.4f}")
    return ok, "; ".join(parts)


CRITERIA = {
    1: ("constant-exponent reduction", constant_reduction),
    2: ("Lerner profile closed form", lerner_closed_form),
    3: ("maximal oracle equivalence", maximal_oracle),
    4: ("M vs local M separation", separation_example),
    5: ("A_p(.) identities", apx_identities),
    6: ("power identities", power_identities),
    7: ("partition-norm bracket", partition_bracket),
    8: ("N-function inequalities", nfunction_checks),
    9: ("shifted-dyadic bound", shifted_dyadic),
    10: ("Calderon-Zygmund cubes", cz_checks),
    11: ("square function", square_function),
    12: ("Lerner separation trend", lerner_trend),
}


def run_criterion(number: int) -> Result:
    title, fn = CRITERIA[number]
    t0 = time.perf_counter()
    passed, detail = fn()
    return Result(number, title, bool(passed), detail, time.perf_counter() - t0)


def run_all(only=None):
    return [run_criterion(n) for n in (only or sorted(CRITERIA))]
