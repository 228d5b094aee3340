import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from varlp.exponent import build_exponent
from varlp.grid import GridFunction, enum_cubes, make_grid, uniform_grid
from varlp.modular import (NFunctionTable, alpha_s, conj_transform, default_t_grid,
                           indicator_norms, legendre_at, luxemburg_norm, modular, msq,
                           msq_table, phi_star_eval, restricted_norms, seq_norm)

GOLDEN_ROOT = math.sqrt((1 + math.sqrt(5)) / 2)


def _const(g, q):
    return build_exponent(g, {"kind": "constant", "q": q})


def _step(g, v):
    return build_exponent(g, {"kind": "step", "values": v})


def _scalar_norm(vals, exps, vols):
    """Independent oracle: root of sum vol |v/lam|^p = 1 by Brent's method."""
    F = lambda lam: sum(w * (abs(v) / lam) ** p for v, p, w in zip(vals, exps, vols)) - 1
    return brentq(F, 1e-6, 1e6, xtol=1e-15, rtol=1e-14)


def test_modular_examples():
    g = uniform_grid(0.0, 2.0, 2)
    assert modular(GridFunction(g, [1, 0]), _const(g, 3.0)) == 1.0
    assert modular(GridFunction(g, [2, 0]), _const(g, 3.0)) == 8.0
    assert modular(GridFunction(g, [2, 3]), _step(g, [2.0, 3.0])) == 31.0


def test_luxemburg_examples():
    g = uniform_grid(0.0, 2.0, 2)
    assert luxemburg_norm(GridFunction(g, [1, 0]), _const(g, 2.0)) == pytest.approx(1, rel=1e-10)
    assert luxemburg_norm(GridFunction(g, [2, 0]), _const(g, 3.0)) == pytest.approx(2, rel=1e-10)
    n = luxemburg_norm(GridFunction(g, [1, 1]), _step(g, [2.0, 4.0]))
    assert n == pytest.approx(GOLDEN_ROOT, rel=1e-10)
    assert n == pytest.approx(_scalar_norm([1, 1], [2, 4], [1, 1]), rel=1e-10)


def test_luxemburg_zero():
    g = uniform_grid(0.0, 1.0, 3)
    assert luxemburg_norm(GridFunction(g, np.zeros(3)), _const(g, 2.0)) == 0.0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(1.05, 8.0), st.floats(0.01, 3.0)),
                min_size=1, max_size=12))
def test_luxemburg_matches_scalar_oracle(cells):
    v, p, w = map(np.array, zip(*cells))
    if not np.any(np.abs(v) > 1e-3):
        return
    g = make_grid(1, np.concatenate([[0.0], np.cumsum(w)]))
    n = luxemburg_norm(GridFunction(g, v), _step(g, p))
    assert n == pytest.approx(_scalar_norm(v, p, g.widths[0]), rel=1e-9)
    # unit modular at the norm
    assert modular(GridFunction(g, v / n), _step(g, p)) == pytest.approx(1.0, rel=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.floats(-1e3, 1e3).filter(lambda c: abs(c) > 1e-3), st.integers(0, 10**6))
def test_luxemburg_homogeneous(c, seed):
    rng = np.random.default_rng(seed)
    g = uniform_grid(-2.0, 2.0, 16)
    p = _step(g, rng.uniform(1.1, 5.0, 16))
    f = GridFunction(g, rng.normal(size=16))
    assert luxemburg_norm(GridFunction(g, c * f.values), p) == pytest.approx(
        abs(c) * luxemburg_norm(f, p), rel=1e-9)


def test_seq_norm_examples():
    assert seq_norm([1, 1], [2, 2], [1, 1]) == pytest.approx(math.sqrt(2), rel=1e-10)
    assert seq_norm([3.5], [2.7]) == pytest.approx(3.5, rel=1e-10)
    assert seq_norm([1, 1], [2, 4], [1, 1]) == pytest.approx(GOLDEN_ROOT, rel=1e-10)
    assert seq_norm([0, 0], [2, 3]) == 0.0
    with pytest.raises(ValueError):
        seq_norm([1, 2], [2])


def test_indicator_norms_batch_is_list_independent():
    g = make_grid(1, np.sort(np.random.default_rng(0).uniform(-3, 3, 41)))
    p = build_exponent(g, {"kind": "log-holder", "p_inf": 2.0, "c": 1.0})
    cubes = enum_cubes(g, g.local_cap)
    together = indicator_norms(p, cubes)
    alone = np.array([indicator_norms(p, [Q])[0] for Q in cubes[::7]])
    np.testing.assert_array_equal(together[::7], alone)


def test_restricted_norms_match_full_norm():
    g = uniform_grid(-2.0, 2.0, 16)
    p = build_exponent(g, {"kind": "log-holder", "p_inf": 2.0, "c": 1.0})
    f = GridFunction(g, np.random.default_rng(1).normal(size=16))
    Q = g.cube(3, 11)
    v = np.zeros(16)
    v[3:11] = f.values[3:11]
    r = restricted_norms(f, p, [Q])[0]
    assert r == pytest.approx(luxemburg_norm(GridFunction(g, v), p), rel=1e-10)


def test_phi_star_eval():
    t = np.linspace(0, 5, 11)
    np.testing.assert_allclose(phi_star_eval(2.0, t), t ** 2 / 4, rtol=1e-15)
    assert phi_star_eval(3.0, 1.0) == pytest.approx(2 * 3 ** -1.5, rel=1e-12)
    assert phi_star_eval(1.7, 0.0) == 0.0


def test_msq_examples():
    g = uniform_grid(0.0, 2.0, 2)
    Q = g.cube(0, 2)
    t = np.array([0.3, 1.0, 7.0])
    np.testing.assert_allclose(msq(_const(g, 2.0), Q, 1.0, t), t ** 2, rtol=1e-14)
    np.testing.assert_allclose(msq(_const(g, 2.0), Q, 2.0, t), t ** 2, rtol=1e-14)
    assert msq(_step(g, [2.0, 4.0]), Q, 1.0, 2.0) == pytest.approx(10.0, rel=1e-14)


def _dense_conjugate(fn, u):
    """Brute-force sup over a dense linear grid, independent of the table."""
    t = np.linspace(0, 200, 400_001)
    return np.max(u[:, None] * t[None, :] - fn(t)[None, :], axis=1)


@pytest.mark.parametrize("fn,want", [(lambda t: t ** 2 / 4, lambda u: u ** 2),
                                     (lambda t: t ** 2, lambda u: u ** 2 / 4)])
def test_legendre_table(fn, want):
    tab = NFunctionTable.from_function(fn)
    u = np.geomspace(1e-2, 1e2, 41)
    got = legendre_at(tab, u)
    np.testing.assert_allclose(got, want(u), rtol=1e-3)
    big = u >= 0.5  # the dense oracle resolves maximisers away from 0
    np.testing.assert_allclose(got[big], _dense_conjugate(fn, u[big]), rtol=1e-3)


def test_legendre_zero_function_is_truncated_linear():
    t = default_t_grid()
    tab = NFunctionTable(t, np.zeros_like(t))
    u = np.array([0.5, 2.0])
    np.testing.assert_allclose(legendre_at(tab, u), u * t[-1], rtol=1e-15)


def test_legendre_hull_equals_brute_force():
    rng = np.random.default_rng(3)
    t = default_t_grid(64)
    v = np.cumsum(rng.exponential(size=t.size)) * t
    tab = NFunctionTable(t, v)
    u = np.geomspace(1e-3, 1e5, 300)
    brute = np.maximum(0, np.max(u[:, None] * t[None, :] - v[None, :], axis=1))
    np.testing.assert_allclose(legendre_at(tab, u), brute, rtol=1e-12)


def test_conj_transform_tabulates_conjugate():
    tab = NFunctionTable.from_function(lambda t: t ** 3)
    ct = conj_transform(tab)
    mid = (ct.t_grid > 1e-2) & (ct.t_grid < 1e2)
    np.testing.assert_allclose(ct.values[mid], legendre_at(tab, ct.t_grid[mid]), rtol=1e-15)


def test_table_validation():
    t = default_t_grid(8)
    with pytest.raises(ValueError):
        NFunctionTable(t, -np.ones_like(t))
    with pytest.raises(ValueError):
        NFunctionTable(t[:10], t[:10])


def test_alpha_constant_two():
    g = uniform_grid(0.0, 2.0, 4)
    p = _const(g, 2.0)
    Q = g.cube(0, 2)
    tab = msq_table(p, Q, 1.0, "phi_star")
    for t in (1e-2, 0.5, 1.0, 30.0):
        a = alpha_s(p, Q, 1.0, t, tab)
        assert a.valid
        assert a.value == pytest.approx(1.0, rel=1e-3)


def test_alpha_flags_table_edge():
    g = uniform_grid(0.0, 2.0, 4)
    p = _const(g, 2.0)
    a = alpha_s(p, g.cube(0, 2), 1.0, 1e6)
    assert not a.valid
