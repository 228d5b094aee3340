"""Boundedness conditions as seeded lower-bound probes.

Every supremum here runs over an infinite family in the continuum, so the
functions only ever report the best value found on the samples they drew,
together with the samples ("witnesses") that achieved it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .exponent import Exponent, conjugate_exponent, cube_mean_exponent
from .families import make_family
from .grid import Cube, Grid, GridFunction, Partition, enum_cubes, make_partition
from .maximal import MaximalSpec, averaging, cz_decompose, maximal, split_at_level
from .modular import (NFunctionTable, legendre_at, luxemburg_norm, msq, msq_table,
                      restricted_norms, indicator_norms, seq_norm)

__all__ = [
    "Weight", "ProbeReport", "RatioRecord", "apx_constant", "apx_values",
    "aploc_weight_constant", "operator_norm_probe", "estimate_ratio",
    "local_to_global_ratio", "domination_probe", "cz_domination_sums",
    "ainfty_probe", "sample_partitions", "spanning_partition",
]


@dataclass(frozen=True)
class Weight:
    """Nonnegative, not identically zero weight on a grid."""

    samples: GridFunction

    def __post_init__(self):
        v = self.samples.values
        if np.any(v < 0):
            raise ValueError("weights must be nonnegative")
        if not np.any(v > 0):
            raise ValueError("weight vanishes identically")

    @property
    def grid(self) -> Grid:
        return self.samples.grid


@dataclass(frozen=True)
class ProbeReport:
    """Best value found by a probe, with the samples that achieved it.

    ``kind`` is "sup" for maxima and "inf" for minima; ``witnesses`` holds
    the top-k ``(label, value)`` pairs, best first.
    """

    estimate: float
    witnesses: tuple
    sample_counts: dict
    seed: int
    budget: int
    kind: str = "sup"
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.witnesses and self.witnesses[0][1] != self.estimate:
            raise ValueError("estimate must equal the best witness value")

    def to_dict(self):
        return {"estimate": _jsonable(self.estimate),
                "witnesses": [[w, _jsonable(v)] for w, v in self.witnesses],
                "seed": self.seed, "budget": self.budget, "kind": self.kind,
                "sample_counts": dict(self.sample_counts)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["estimate"]), tuple((w, float(v)) for w, v in d["witnesses"]),
                   dict(d.get("sample_counts", {})), int(d["seed"]), int(d["budget"]),
                   d.get("kind", "sup"))


def _jsonable(x):
    return "inf" if x == math.inf else x


def _report(values, labels, seed, budget, kind="sup", top_k=5, counts=None, extra=None):
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("probe drew no samples")
    key = -values if kind == "sup" else values
    # stable sort keeps the lowest sample index first among ties
    order = np.argsort(key, kind="stable")[:top_k]
    wit = tuple((labels[i], float(values[i])) for i in order)
    counts = {"samples": int(values.size)} if counts is None else counts
    return ProbeReport(wit[0][1], wit, counts, int(seed), int(budget), kind, extra or {})


# -- A_p(.) constants -------------------------------------------------------

def apx_values(p: Exponent, cubes) -> np.ndarray:
    """``|Q|^{-1} ||chi_Q||_p ||chi_Q||_{p'}`` for each cube."""
    cubes = list(cubes)
    a = indicator_norms(p, cubes)
    b = indicator_norms(conjugate_exponent(p), cubes)
    vol = np.array([q.volume for q in cubes])
    return a * b / vol


def apx_constant(p: Exponent, local: bool, budget: int = 10**5, seed: int = 0,
                 top_k: int = 5) -> ProbeReport:
    """Lower bound for the A_p(.) constant over (small, when ``local``) cubes."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    g = p.grid
    cubes = enum_cubes(g, g.local_cap if local else None, budget, seed)
    vals = apx_values(p, cubes)
    return _report(vals, [q.label() for q in cubes], seed, budget, top_k=top_k)


def aploc_weight_constant(w: Weight, p0: float, budget: int = 10**5, seed: int = 0,
                          top_k: int = 5) -> ProbeReport:
    """Lower bound for the local A_p weight constant of ``w``.

    Per cube ``|Q|^{-p} (int_Q w) (int_Q w^{-p'/p})^{p/p'}``; a cube on
    which ``w`` vanishes somewhere gets the sentinel ``inf``.
    """
    if not p0 > 1:
        raise ValueError("p0 must exceed 1")
    g = w.grid
    cubes = enum_cubes(g, g.local_cap, budget, seed)
    wv = w.samples.values
    vols = g.volumes
    expo = -1.0 / (p0 - 1.0)          # -p'/p
    vals = np.empty(len(cubes))
    for i, Q in enumerate(cubes):
        ww = wv[Q.slices]
        vv = vols[Q.slices]
        if np.any(ww == 0):
            vals[i] = math.inf
            continue
        i1 = math.fsum((ww * vv).ravel()) / Q.volume
        i2 = math.fsum((ww ** expo * vv).ravel()) / Q.volume
        vals[i] = i1 * i2 ** (p0 - 1.0)
    return _report(vals, [q.label() for q in cubes], seed, budget, top_k=top_k)


# -- operator probes ---------------------------------------------------------

def sample_partitions(grid: Grid, kind: str, count: int, seed: int = 0):
    """``count`` seeded partitions, ``kind`` is "local" or "global"."""
    pk = {"local": "random-local", "global": "random-global"}[kind]
    ss = np.random.SeedSequence(seed).spawn(count)
    return [make_partition(grid, {"kind": pk, "seed": int(s.generate_state(1)[0])})
            for s in ss]


def spanning_partition(grid: Grid, lo: int, hi: int) -> Partition:
    """One big 1D cube ``[lo, hi)`` (cell indices), single cells elsewhere."""
    n = grid.shape[0]
    cubes = [grid.cube(i, i + 1) for i in range(lo)]
    cubes.append(grid.cube(lo, hi))
    cubes += [grid.cube(i, i + 1) for i in range(hi, n)]
    return make_partition(grid, {"kind": "explicit", "cubes": cubes})


def _family(p, family, seed):
    if isinstance(family, dict):
        return make_family(p.grid, family, seed, p)
    return list(family)


def operator_norm_probe(op: str, p: Exponent, family, budget: int = 1000,
                        seed: int = 0, partitions=None, top_k: int = 5) -> ProbeReport:
    """Largest ``||op f|| / ||f||`` over a test family.

    Parameters
    ----------
    op : {"M-global", "M-local", "T-partition"}
    family : dict or list of GridFunction
        A :func:`make_family` spec or explicit functions.
    partitions : "local", "global" or list of Partition, optional
        Only for "T-partition"; the default samples local partitions.
        The probe evaluates at most ``budget`` (function, partition) pairs.
    """
    fs = _family(p, family, seed)
    norms = np.array([luxemburg_norm(f, p) for f in fs])
    if np.any(norms == 0):
        raise ValueError("family contains a zero function")
    vals, labels = [], []
    if op in ("M-global", "M-local"):
        spec = MaximalSpec(local=(op == "M-local"))
        for i, f in enumerate(fs[:budget]):
            vals.append(luxemburg_norm(maximal(f, spec), p) / norms[i])
            labels.append(f"f{i}")
        counts = {"functions": len(vals)}
    elif op == "T-partition":
        if partitions is None or isinstance(partitions, str):
            kind = partitions or "local"
            n_part = max(1, budget // len(fs))
            parts = sample_partitions(p.grid, kind, n_part, seed + 1)
        else:
            parts = list(partitions)
        for j, P in enumerate(parts):
            for i, f in enumerate(fs):
                if len(vals) >= budget:
                    break
                vals.append(luxemburg_norm(averaging(f, P), p) / norms[i])
                labels.append(f"f{i}/P{j}")
        counts = {"functions": len(fs), "partitions": len(parts), "pairs": len(vals)}
    else:
        raise ValueError(f"unknown operator {op!r}")
    return _report(vals, labels, seed, budget, top_k=top_k, counts=counts)


# -- norm equivalences -------------------------------------------------------

@dataclass(frozen=True)
class RatioRecord:
    lhs: float
    rhs: float
    ratio: float


def _ratio(lhs, rhs):
    if rhs == 0:
        if lhs != 0:
            raise ValueError("right-hand side vanishes but left-hand side does not")
        return 1.0
    return lhs / rhs


def estimate_ratio(tvals, part: Partition, p: Exponent) -> RatioRecord:
    """Compare ``||sum t_Q chi_Q||_p`` with its sequence-space counterpart.

    The right side is the Luxemburg norm of ``(t_Q ||chi_Q||_p)_Q`` with
    exponent ``p_Q``, the harmonic mean of ``p`` over ``Q``.
    """
    t = np.asarray(tvals, dtype=float).ravel()
    if t.size != len(part.cubes):
        raise ValueError("need one value per cube")
    vals = np.empty(p.grid.shape)
    for tq, Q in zip(t, part.cubes):
        vals[Q.slices] = tq
    lhs = luxemburg_norm(GridFunction(p.grid, vals), p)
    chi = indicator_norms(p, part.cubes)
    pq = np.array([cube_mean_exponent(p, Q) for Q in part.cubes])
    rhs = seq_norm(np.abs(t) * chi, pq)
    return RatioRecord(lhs, rhs, _ratio(lhs, rhs))


def local_to_global_ratio(f: GridFunction, p: Exponent, p_inf: float,
                          side: float = 1.0) -> RatioRecord:
    """``||f||_p`` against the l^{p_inf} sum of ``||f chi_Q||_p`` over equal cubes.

    Cubes of side ``side`` are ordered by their distance from the origin.
    """
    if not side > 0:
        raise ValueError("side must be positive")
    if not p_inf >= 1:
        raise ValueError("p_inf must be >= 1")
    part = make_partition(f.grid, {"kind": "equal-cubes", "side": side})
    lhs = luxemburg_norm(f, p)
    per = restricted_norms(f, p, part.cubes)
    nz = per[per > 0]
    if nz.size == 0:
        rhs = 0.0
    elif nz.size == 1:
        rhs = float(nz[0])
    else:
        m = float(nz.max())
        rhs = m * math.fsum(((nz / m) ** p_inf).tolist()) ** (1.0 / p_inf)
    return RatioRecord(lhs, rhs, _ratio(lhs, rhs))


# -- domination ---------------------------------------------------------------

class _TableCache:
    def __init__(self, p, s, per_decade):
        self.p, self.s, self.per_decade = p, s, per_decade
        self._tab = {}

    def star(self, Q: Cube) -> NFunctionTable:
        key = (Q.lo, Q.hi)
        if key not in self._tab:
            self._tab[key] = msq_table(self.p, Q, self.s, "phi_star", self.per_decade)
        return self._tab[key]


def _hyp_sum(cache, cubes, t):
    return math.fsum(Q.volume * legendre_at(cache.star(Q), tq) for Q, tq in zip(cubes, t))


def _concl_sum(p, s, cubes, t):
    return math.fsum(Q.volume * msq(p, Q, s, tq, "phi") for Q, tq in zip(cubes, t))


def domination_probe(p: Exponent, s: float = 1.0, partitions="local", A1: float = 1.0,
                     budget: int = 200, seed: int = 0, per_decade: int = 128,
                     top_k: int = 5) -> ProbeReport:
    """Empirical domination constant A2 for a given hypothesis level A1.

    For each sampled partition, random positive directions ``t_Q`` are
    scaled by ``c`` (bisection on ``log c``) until the hypothesis sum
    ``sum |Q| (M_{s,Q phi*})^*(c t_Q)`` equals ``A1``; the conclusion sum
    ``sum |Q| M_{s,Q phi}(c t_Q)`` at that scale is one sample of A2.
    Partitions where the hypothesis cannot reach A1 inside the tables are
    counted in ``sample_counts["unattainable"]`` instead of raising.
    """
    if not A1 > 0:
        raise ValueError("A1 must be positive")
    if s < 1:
        raise ValueError("s must be >= 1")
    if isinstance(partitions, str):
        parts = sample_partitions(p.grid, partitions, budget, seed)
    else:
        parts = list(partitions)[:budget]
    rng = np.random.default_rng(seed)
    cache = _TableCache(p, s, per_decade)
    vals, labels = [], []
    bad = 0
    for j, P in enumerate(parts):
        direction = np.exp(rng.normal(0.0, 1.0, len(P.cubes)))
        c = _scale_to(lambda c: _hyp_sum(cache, P.cubes, c * direction), A1)
        if c is None:
            bad += 1
            continue
        vals.append(_concl_sum(p, s, P.cubes, c * direction))
        labels.append(f"P{j}")
    counts = {"partitions": len(parts), "unattainable": bad}
    if not vals:
        return ProbeReport(math.nan, (), counts, seed, budget)
    return _report(vals, labels, seed, budget, top_k=top_k, counts=counts)


def _scale_to(H, target, lo=-40.0, hi=40.0, iters=100):
    """Solve ``H(e^u) = target`` for increasing H; None when out of reach."""
    if not (H(math.exp(lo)) <= target <= H(math.exp(hi))):
        return None
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if H(math.exp(mid)) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    return math.exp(0.5 * (lo + hi))


def cz_domination_sums(f: GridFunction, p: Exponent, s: float = 1.0, q: float = 1.0,
                       lambdas=None, shift=(0.0,), per_decade: int = 128):
    """Both sums of the CZ domination argument, integrated in ``d lambda / lambda``.

    For each ``lambda`` the cubes come from the CZ decomposition of the part
    of ``f`` below ``lambda``.  Returns ``(hypothesis, conclusion)`` as
    trapezoid integrals over ``log lambda``.
    """
    if lambdas is None:
        top = float(np.max(np.abs(f.values)))
        lambdas = np.geomspace(top * 1e-3, top * 2.0, 40)
    lambdas = np.asarray(lambdas, dtype=float)
    cache = _TableCache(p, s, per_decade)
    hyp, con = [], []
    for lam in lambdas:
        low, _ = split_at_level(f, lam)
        cubes = [c.cube for c in cz_decompose(low, lam, q, shift)]
        hyp.append(_hyp_sum(cache, cubes, [lam] * len(cubes)))
        con.append(_concl_sum(p, s, cubes, [lam] * len(cubes)))
    x = np.log(lambdas)
    return float(np.trapezoid(hyp, x)), float(np.trapezoid(con, x))


# -- A_infinity --------------------------------------------------------------

def ainfty_probe(p: Exponent, eps: float, budget: int = 200, seed: int = 0,
                 partitions="local", top_k: int = 5) -> ProbeReport:
    """Empirical delta(eps): smallest ``||sum t chi_{Q&N}|| / ||sum t chi_Q||``.

    For each sampled partition, ``N`` keeps a random set of cells in every
    cube, adding cells until at least ``eps`` of the cube's volume is kept.
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    g = p.grid
    if isinstance(partitions, str):
        parts = sample_partitions(g, partitions, budget, seed)
    else:
        parts = list(partitions)[:budget]
    rng = np.random.default_rng(seed)
    vals, labels = [], []
    for j, P in enumerate(parts):
        t = np.exp(rng.normal(0.0, 1.0, len(P.cubes)))
        full = np.empty(g.shape)
        sub = np.zeros(g.shape)
        for tq, Q in zip(t, P.cubes):
            full[Q.slices] = tq
            if eps == 1:
                sub[Q.slices] = tq
                continue
            vol = g.volumes[Q.slices].ravel()
            order = rng.permutation(vol.size)
            kept = np.cumsum(vol[order])
            m = int(np.searchsorted(kept, eps * Q.volume * (1 - 1e-12))) + 1
            mask = np.zeros(vol.size, dtype=bool)
            mask[order[:m]] = True
            block = sub[Q.slices]
            block[mask.reshape(block.shape)] = tq
            sub[Q.slices] = block
        den = luxemburg_norm(GridFunction(g, full), p)
        num = luxemburg_norm(GridFunction(g, sub), p)
        vals.append(num / den)
        labels.append(f"P{j}")
    return _report(vals, labels, seed, budget, kind="inf", top_k=top_k,
                   counts={"partitions": len(parts)})
