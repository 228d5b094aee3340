"""Registry of named experiments run by the harness and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .conditions import (apx_constant, domination_probe, estimate_ratio,
                         local_to_global_ratio, operator_norm_probe,
                         sample_partitions, spanning_partition)
from .exponent import (conjugate_exponent, lerner_exponent, lerner_intervals)
from .families import make_family
from .grid import GridFunction, enum_cubes, integrate
from .harness import ResultTable
from .lpaley import build_filterbank, convolve, sf_equivalence
from .maximal import (MaximalSpec, maximal, shift_lattice,
                      shifted_dyadic_average_bound, vector_maximal)
from .modular import indicator_norms, luxemburg_norm
from . import nfun

__all__ = ["EXPERIMENTS", "Experiment"]


class _Params(BaseModel):
    model_config = ConfigDict(extra="forbid")


@dataclass(frozen=True)
class Experiment:
    id: str
    anchor: str
    summary: str
    params: type
    run: object
    defaults: dict


EXPERIMENTS: dict[str, Experiment] = {}


def _register(id, anchor, summary, params, defaults):
    def deco(fn):
        EXPERIMENTS[id] = Experiment(id, anchor, summary, params, fn, defaults)
        return fn
    return deco


LOG_HOLDER = {"kind": "log-holder", "p_inf": 2.0, "c": 1.0}


def _bracket(vals):
    """(min, max, C) with C = max(max, 1/min)."""
    lo, hi = float(np.min(vals)), float(np.max(vals))
    return lo, hi, max(hi, 1.0 / lo)


# -- partition-ratio ---------------------------------------------------------

class PartitionRatioParams(_Params):
    partitions: int = Field(100, ge=1)
    kind: str = Field("local", pattern="^(local|global)$")
    refinements: list[int] = [1, 2]


@_register("partition-ratio", "partition norm equivalence",
           "partition-sum norm against its sequence-space counterpart, for p and p'",
           PartitionRatioParams,
           {"grid": {"lo": -32.0, "hi": 32.0, "cells": 512}, "exponent": LOG_HOLDER})
def _partition_ratio(cfg, prm):
    t = ResultTable(["exponent", "refine", "samples", "ratio_min", "ratio_max", "C",
                     "witness_min", "witness_max"],
                    ["str", "int", "int", "float", "float", "float", "str", "str"])
    for refine in prm.refinements:
        g = cfg.build_grid(refine)
        p = cfg.build_exponent(g)
        parts = sample_partitions(g, prm.kind, prm.partitions, cfg.seed)
        rng = np.random.default_rng(cfg.seed)
        tv = [rng.normal(size=len(P.cubes)) for P in parts]
        for name, q in (("p", p), ("p'", conjugate_exponent(p))):
            r = np.array([estimate_ratio(tq, P, q).ratio for tq, P in zip(tv, parts)])
            lo, hi, C = _bracket(r)
            t.add(name, refine, len(r), lo, hi, C, f"P{int(np.argmin(r))}", f"P{int(np.argmax(r))}")
    return t


# -- local-global -------------------------------------------------------------

class LocalGlobalParams(_Params):
    p_inf: float = Field(2.0, gt=1)
    side: float = Field(1.0, gt=0)
    functions: int = Field(50, ge=1)
    refinements: list[int] = [1, 2]


@_register("local-global", "l^p_inf decomposition",
           "norm against the l^{p_inf} sum of norms over equal cubes ordered by distance",
           LocalGlobalParams,
           {"grid": {"lo": -32.0, "hi": 32.0, "cells": 512}, "exponent": LOG_HOLDER})
def _local_global(cfg, prm):
    t = ResultTable(["refine", "samples", "ratio_min", "ratio_max", "C", "witness_min",
                     "witness_max"],
                    ["int", "int", "float", "float", "float", "str", "str"])
    for refine in prm.refinements:
        g = cfg.build_grid(refine)
        p = cfg.build_exponent(g)
        fs = make_family(g, {"kinds": ["random-steps", "smooth", "cube-indicators"],
                             "count": prm.functions}, cfg.seed, p)
        r = np.array([local_to_global_ratio(f, p, prm.p_inf, prm.side).ratio for f in fs])
        lo, hi, C = _bracket(r)
        t.add(refine, len(r), lo, hi, C, f"f{int(np.argmin(r))}", f"f{int(np.argmax(r))}")
    return t


# -- lerner-scan --------------------------------------------------------------

class LernerParams(_Params):
    alpha: float = Field(2.0, gt=1)
    betas: list[float] = [1.0, 0.85, 0.7, 0.55]
    left_edges: int = Field(9, ge=1)
    local_partitions: int = Field(20, ge=1)


def _extremal(p, pc, Q, mu=None):
    """L^p function attaining the dual norm of chi_Q: mu^{1-p'(x)} on Q, mu = ||chi_Q||_{p'}."""
    if mu is None:
        mu = float(indicator_norms(pc, [Q])[0])
    v = np.zeros(p.grid.shape)
    v[Q.slices] = mu ** (1.0 - pc.values[Q.slices])
    return v


def _region_ends(g, m, k_max):
    """Edge indices x > 0 spanning exactly m Lerner intervals on [0, x)."""
    la, lb = lerner_intervals(k_max)
    e = g.boundaries[0]
    with np.errstate(divide="ignore"):
        lx = np.log(np.where(e > 0, e, np.nan))
    lo_ = -np.inf if m == 0 else lb[m - 1]
    hi_ = la[m] if m < k_max else np.inf
    sel = (e > 0) & (lx > lo_ - 1e-12) & (lx <= hi_ + 1e-12)
    return np.nonzero(sel)[0]


def _e_indicator(g, k_max, upto):
    la, lb = lerner_intervals(k_max)
    ax = np.abs(g.midpoints[0])
    with np.errstate(divide="ignore"):
        lx = np.log(ax)
    v = np.zeros(g.shape)
    for k in range(upto):
        v[(lx > la[k]) & (lx < lb[k])] = 1.0
    return v


@_register("lerner-scan", "Lerner separation",
           "averaging-operator probes for Lerner's exponent, by number of E-intervals spanned",
           LernerParams,
           {"grid": {"kind": "lerner", "k_max": 3, "h": 0.125, "per_efold": 8},
            "exponent": {"kind": "lerner", "alpha": 2.0, "beta": 1.0}, "budget": 400})
def _lerner(cfg, prm):
    g = cfg.build_grid()
    k_max = cfg.grid.k_max
    i0 = g.edge_index(0, 0.0)
    t = ResultTable(["beta", "intervals", "global_estimate", "global_witness", "global_samples",
                     "local_estimate", "local_witness", "local_samples"],
                    ["float", "int", "float", "str", "int", "float", "str", "int"])
    parts_loc = sample_partitions(g, "local", prm.local_partitions, cfg.seed)
    lefts = list(range(i0, min(i0 + prm.left_edges, g.shape[0])))
    for beta in prm.betas:
        p = lerner_exponent(g, prm.alpha, beta, k_max)
        pc = conjugate_exponent(p)
        # extremal functions of every cube of the local partitions, batched
        ext_loc = [[_extremal(p, pc, Q, mu) for Q, mu in zip(P.cubes, indicator_norms(pc, P.cubes))]
                   for P in parts_loc]
        for m in range(0, k_max + 1):
            ends = _region_ends(g, m, k_max)
            pairs = [(a, b) for b in ends for a in lefts if b > a]
            if len(pairs) > cfg.budget:
                rng = np.random.default_rng([cfg.seed, m])
                pick = np.sort(rng.choice(len(pairs), cfg.budget, replace=False))
                pairs = [pairs[i] for i in pick]
            best, wit = -math.inf, ""
            for a, b in pairs:
                P = spanning_partition(g, a, b)
                Q = P.cubes[a]
                fs = [GridFunction(g, _extremal(p, pc, Q))]
                ind = _e_indicator(g, k_max, m)
                mask = np.zeros(g.shape)
                mask[Q.slices] = 1.0
                if np.any(ind * mask):
                    fs.append(GridFunction(g, ind * mask))
                r = operator_norm_probe("T-partition", p, fs, partitions=[P])
                if r.estimate > best:
                    best, wit = r.estimate, f"[{a},{b})/{r.witnesses[0][0]}"
            # local partitions acting on functions supported where [0, x) spans m intervals
            stop = int(ends[-1])
            loc_best, loc_wit = -math.inf, ""
            for j, P in enumerate(parts_loc):
                v = np.zeros(g.shape)
                for Q, e in zip(P.cubes, ext_loc[j]):
                    if Q.hi[0] <= stop and Q.lo[0] >= 2 * i0 - stop:
                        v += e
                fs = [GridFunction(g, v)]
                if m > 0:
                    fs.append(GridFunction(g, _e_indicator(g, k_max, m)))
                r = operator_norm_probe("T-partition", p, fs, partitions=[P])
                if r.estimate > loc_best:
                    loc_best, loc_wit = r.estimate, f"P{j}/{r.witnesses[0][0]}"
            t.add(beta, m, best, wit, len(pairs), loc_best, loc_wit, len(parts_loc))
    return t


# -- sf-equiv -----------------------------------------------------------------

class SFParams(_Params):
    J: int = Field(6, ge=0)
    radius: float = Field(2.0, gt=0)
    functions: int = Field(20, ge=1)
    level0: str = Field("phi0", pattern="^(phi0|phi)$")
    exponents: list[dict] = [{"kind": "constant", "q": 2.0}, LOG_HOLDER]


@_register("sf-equiv", "square-function equivalence",
           "square-function norm against the norm, under J -> J+2 and h -> h/2",
           SFParams,
           {"grid": {"lo": -6.0, "hi": 6.0, "cells": 6144}})
def _sf(cfg, prm):
    t = ResultTable(["exponent", "J", "refine", "c_low", "c_high", "witness_low",
                     "witness_high", "recon_error"],
                    ["str", "int", "int", "float", "float", "str", "str", "float"])
    margin = 2 * prm.radius + 0.5
    for spec in prm.exponents:
        for J, refine in ((prm.J, 1), (prm.J + 2, 1), (prm.J, 2)):
            g = cfg.build_grid(refine)
            p = cfg.build_exponent(g, spec)
            fb = build_filterbank(g, J, prm.radius, prm.level0)
            fam = {"kinds": ["smooth", "random-steps"], "count": prm.functions, "margin": margin}
            rec = sf_equivalence(p, fb, fam, prm.functions, cfg.seed)
            f = GridFunction.from_callable(g, lambda x: np.exp(-x ** 2) * np.cos(2 * x))
            d = convolve(f, fb.psi_J) - f
            err = math.sqrt(integrate(d * d) / integrate(f * f))
            t.add(spec["kind"], J, refine, rec.c_low, rec.c_high, rec.low_witness,
                  rec.high_witness, err)
    return t


# -- fs-vector ----------------------------------------------------------------

class FSParams(_Params):
    q: float = Field(2.0, gt=1)
    components: int = Field(3, ge=1)
    families: int = Field(30, ge=1)
    refinements: list[int] = [1, 2]


@_register("fs-vector", "vector maximal inequality",
           "vector-valued local maximal inequality ratio over random families",
           FSParams,
           {"grid": {"lo": -8.0, "hi": 8.0, "cells": 256}, "exponent": LOG_HOLDER})
def _fs(cfg, prm):
    t = ResultTable(["refine", "samples", "c_low", "c_high", "witness_low", "witness_high"],
                    ["int", "int", "float", "float", "str", "str"])
    for refine in prm.refinements:
        g = cfg.build_grid(refine)
        p = cfg.build_exponent(g)
        fs = make_family(g, {"kinds": ["random-steps", "cube-indicators", "smooth"],
                             "count": prm.families * prm.components}, cfg.seed, p)
        r = []
        for i in range(prm.families):
            group = fs[i * prm.components:(i + 1) * prm.components]
            lhs = luxemburg_norm(vector_maximal(group, prm.q), p)
            inner = sum(np.abs(f.values) ** prm.q for f in group) ** (1 / prm.q)
            r.append(lhs / luxemburg_norm(GridFunction(g, inner), p))
        r = np.array(r)
        t.add(refine, len(r), float(r.min()), float(r.max()),
              f"F{int(np.argmin(r))}", f"F{int(np.argmax(r))}")
    return t


# -- apx-report ---------------------------------------------------------------

class ApxParams(_Params):
    pass


@_register("apx-report", "A_p(.) condition",
           "lower bounds for the A_p(.) constant over small cubes and over all cubes",
           ApxParams, {"grid": {"lo": -8.0, "hi": 8.0, "cells": 128}, "exponent": LOG_HOLDER,
                       "budget": 100000})
def _apx(cfg, prm):
    g = cfg.build_grid()
    p = cfg.build_exponent(g)
    t = ResultTable(["family", "estimate", "witness", "cubes", "exhaustive"],
                    ["str", "float", "str", "int", "int"])
    from .grid import count_cubes
    for local in (True, False):
        r = apx_constant(p, local, cfg.budget, cfg.seed)
        total = count_cubes(g, g.local_cap if local else None)
        t.add("local" if local else "global", r.estimate, r.witnesses[0][0],
              r.sample_counts["samples"], int(total <= cfg.budget))
    return t


# -- shift-dyadic -------------------------------------------------------------

class ShiftParams(_Params):
    q: float = Field(1.0, ge=1)
    functions: int = Field(100, ge=1)
    shift_counts: list[int] = [33, 65]
    max_sides: list[int] = [1, 2]

    @field_validator("max_sides")
    @classmethod
    def _powers_of_two(cls, v):
        if not v or any(s < 1 or s & (s - 1) for s in v):
            raise ValueError("max_sides must be powers of two")
        return v


@_register("shift-dyadic", "shifted dyadic domination",
           "local maximal function against the average of shifted dyadic maximal functions",
           ShiftParams, {"grid": {"lo": -8.0, "hi": 8.0, "cells": 256}})
def _shift(cfg, prm):
    g = cfg.build_grid()
    fs = make_family(g, {"kinds": ["random-steps"], "count": prm.functions}, cfg.seed)
    loc = [maximal(f, MaximalSpec(local=True, q=prm.q)).values for f in fs]
    t = ResultTable(["max_side", "shifts", "C", "witness", "zero_cells"],
                    ["int", "int", "float", "str", "int"])
    for side in prm.max_sides:
        z_min = -int(round(math.log2(side)))
        for count in prm.shift_counts:
            best, wit, zeros = -math.inf, "", 0
            for i, f in enumerate(fs):
                avg = shifted_dyadic_average_bound(f, prm.q, shift_lattice(count, g.dim),
                                                   z_min=z_min).values
                nz = loc[i] > 0
                # a zero average under a positive maximal value is an unbounded ratio
                zeros += int(np.count_nonzero(nz & (avg <= 0)))
                with np.errstate(divide="ignore", invalid="ignore"):
                    ratio = np.where(nz, loc[i] / avg, 0.0)
                k = int(np.argmax(ratio))
                if ratio.flat[k] > best:
                    best, wit = float(ratio.flat[k]), f"f{i}/cell{k}"
            t.add(side, count, best, wit, zeros)
    return t


# -- nfun-checks --------------------------------------------------------------

class NfunParams(_Params):
    samples: int = Field(10000, ge=1)
    per_decade: int = Field(512, ge=8)


@_register("nfun-checks", "N-function inequalities",
           "N-function inequalities, double conjugate and alpha brackets",
           NfunParams, {"grid": {"lo": -4.0, "hi": 4.0, "cells": 64}, "exponent": LOG_HOLDER})
def _nfun(cfg, prm):
    g = cfg.build_grid()
    p = cfg.build_exponent(g)
    t = ResultTable(["check", "kind", "samples", "value", "witness"],
                    ["str", "str", "int", "float", "str"])
    for row in nfun.run_checks(p, prm.samples, cfg.seed, prm.per_decade):
        t.add(*row)
    return t


# -- domination ---------------------------------------------------------------

class DomParams(_Params):
    s: float = Field(1.0, ge=1)
    A1: float = Field(1.0, gt=0)
    partitions: int = Field(200, ge=1)
    per_decade: int = Field(128, ge=8)


@_register("domination", "domination",
           "empirical domination constant A2 for a hypothesis level A1",
           DomParams, {"grid": {"lo": -8.0, "hi": 8.0, "cells": 64}, "exponent": LOG_HOLDER})
def _dom(cfg, prm):
    g = cfg.build_grid()
    p = cfg.build_exponent(g)
    t = ResultTable(["partitions", "A1", "A2", "witness", "unattainable"],
                    ["str", "float", "float", "str", "int"])
    for kind in ("local", "global"):
        r = domination_probe(p, prm.s, kind, prm.A1, prm.partitions, cfg.seed, prm.per_decade)
        wit = r.witnesses[0][0] if r.witnesses else ""
        t.add(kind, prm.A1, r.estimate, wit, r.sample_counts["unattainable"])
    return t
