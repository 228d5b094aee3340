import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varlp.exponent import (PiecewiseLinearMap, build_exponent, conjugate_exponent,
                            cube_mean_exponent, lerner_exponent, lerner_grid, lerner_intervals,
                            lerner_p0, regularity_report, remap_exponent)
from varlp.grid import make_grid, uniform_grid

BASEL = math.pi ** 2 / 6


def test_constant():
    g = uniform_grid(-1.0, 1.0, 8)
    p = build_exponent(g, {"kind": "constant", "q": 2.0})
    assert np.all(p.values == 2.0)
    assert p.p_minus == p.p_plus == 2.0


def test_absolutely_continuous():
    g = uniform_grid(-1.0, 2.0, 12)
    dens = ((g.midpoints[0] > 0) & (g.midpoints[0] < 1)).astype(float)
    p = build_exponent(g, {"kind": "ac", "base": 2.0, "density": dens})
    x = g.midpoints[0]
    want = np.clip(2.0 + x, 2.0, 3.0)
    np.testing.assert_allclose(p.values, want, atol=1e-14)
    assert (p.p_minus, p.p_plus) == (2.0, 3.0)


def test_log_holder_profile():
    g = uniform_grid(-4.0, 4.0, 64)
    p = build_exponent(g, {"kind": "log-holder", "p_inf": 2.0, "c": 1.0})
    x = g.midpoints[0]
    np.testing.assert_allclose(p.values, 2 + 1 / np.log(math.e + np.abs(x)), rtol=1e-15)
    assert p.p_plus == 3.0
    assert p.p_minus == 2.0


def test_unknown_kind():
    with pytest.raises(ValueError):
        build_exponent(uniform_grid(0, 1, 2), {"kind": "nope"})


def test_lerner_p0_values():
    assert lerner_p0(0.0) == pytest.approx(BASEL, abs=1e-12)
    assert lerner_p0(math.exp(8.0)) == pytest.approx(BASEL - 1, abs=1e-12)
    la, lb = lerner_intervals(3)
    tail = BASEL - (1 + 1 / 4 + 1 / 9)
    assert lerner_p0(math.exp(lb[-1] + 1.0)) == pytest.approx(tail, abs=1e-12)


def test_lerner_p0_each_interval_contributes_inverse_square():
    la, lb = lerner_intervals(3)
    for k in range(3):
        inside = lerner_p0(math.exp(la[k])) - lerner_p0(math.exp(lb[k]))
        assert inside == pytest.approx(1 / (k + 1) ** 2, rel=1e-12)


def test_lerner_p0_decreasing():
    x = np.exp(np.linspace(-1, 30, 400))
    v = lerner_p0(x)
    assert np.all(np.diff(v) <= 1e-15)


def test_lerner_exponent():
    g = lerner_grid()
    p = lerner_exponent(g, 2.0, 1.0)
    near0 = np.abs(g.midpoints[0]) < 1
    np.testing.assert_allclose(p.values[near0], 2 + BASEL, rtol=1e-14)
    q = lerner_exponent(g, 2.0, 0.6)
    assert q.p_minus == pytest.approx(1.2)
    # symmetric grid, values depend on |x|
    np.testing.assert_array_equal(q.values, q.values[::-1])
    with pytest.raises(ValueError):
        lerner_exponent(g, 2.0, 0.4)


def test_lerner_grid_has_interval_edges():
    g = lerner_grid(3)
    la, lb = lerner_intervals(3)
    for a, b in zip(la, lb):
        g.edge_index(0, math.exp(a))
        g.edge_index(0, math.exp(b))


def test_remap_identity():
    g = uniform_grid(-2.0, 2.0, 16)
    p = build_exponent(g, {"kind": "log-holder", "p_inf": 2.0, "c": 1.0})
    r = remap_exponent(p, PiecewiseLinearMap.identity(), g)
    np.testing.assert_array_equal(r.values, p.values)


def test_remap_doubling_moves_plateaus():
    src = uniform_grid(-2.0, 2.0, 8)
    v = np.where((src.midpoints[0] >= 0) & (src.midpoints[0] < 1), 3.0, 2.0)
    p = build_exponent(src, {"kind": "step", "values": v})
    omega = PiecewiseLinearMap((-2.0, 2.0), (-4.0, 4.0))
    tgt = uniform_grid(-4.0, 4.0, 16)
    r = remap_exponent(p, omega, tgt)
    x = tgt.midpoints[0]
    np.testing.assert_array_equal(r.values, np.where((x >= 0) & (x < 2), 3.0, 2.0))
    assert (r.p_minus, r.p_plus) == (p.p_minus, p.p_plus)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.1, 2.0), min_size=2, max_size=6))
def test_remap_keeps_bounds(slopes):
    xs = np.linspace(-3, 3, len(slopes) + 1)
    ys = np.concatenate([[-3.0], -3.0 + np.cumsum(np.diff(xs) * slopes)])
    g = uniform_grid(-4.0, 4.0, 32)
    p = build_exponent(g, {"kind": "log-holder", "p_inf": 2.0, "c": 1.0})
    r = remap_exponent(p, PiecewiseLinearMap(tuple(xs), tuple(ys)), g)
    assert (r.p_minus, r.p_plus) == (p.p_minus, p.p_plus)
    assert r.values.min() >= p.p_minus and r.values.max() <= p.p_plus


def test_piecewise_map_inverse():
    m = PiecewiseLinearMap((0.0, 1.0, 3.0), (0.0, 2.0, 2.5))
    x = np.linspace(-5, 5, 101)
    np.testing.assert_allclose(m.inverse(m(x)), x, atol=1e-12)
    with pytest.raises(ValueError):
        PiecewiseLinearMap((0.0, 1.0), (1.0, 0.0))


@pytest.mark.parametrize("q,want", [(2.0, 2.0), (3.0, 1.5), (4 / 3, 4.0)])
def test_conjugate(q, want):
    g = uniform_grid(0.0, 1.0, 4)
    pc = conjugate_exponent(build_exponent(g, {"kind": "constant", "q": q}))
    np.testing.assert_allclose(pc.values, want, rtol=1e-14)


def test_conjugate_needs_p_minus_above_one():
    g = uniform_grid(0.0, 1.0, 2)
    with pytest.raises(ValueError):
        conjugate_exponent(build_exponent(g, {"kind": "step", "values": [1.0, 2.0]}))


def test_cube_mean_exponent():
    g = uniform_grid(0.0, 2.0, 2)
    p = build_exponent(g, {"kind": "step", "values": [2.0, 4.0]})
    assert cube_mean_exponent(p, g.cube(0, 2)) == pytest.approx(8 / 3, rel=1e-15)
    assert cube_mean_exponent(p, g.cube(1, 2)) == 4.0
    c = build_exponent(g, {"kind": "constant", "q": 1.7})
    assert cube_mean_exponent(c, g.cube(0, 2)) == pytest.approx(1.7, rel=1e-15)


def test_regularity_constant_is_zero():
    g = uniform_grid(-4.0, 4.0, 64)
    r = regularity_report(build_exponent(g, {"kind": "constant", "q": 2.0}), 2.0)
    assert (r.local_modulus, r.decay_modulus, r.nekvinda_value) == (0.0, 0.0, 0.0)


def test_regularity_log_holder_decay():
    g = uniform_grid(-64.0, 64.0, 1024)
    r = regularity_report(build_exponent(g, {"kind": "log-holder", "p_inf": 2.0, "c": 1.0}), 2.0)
    assert r.decay_modulus == pytest.approx(1.0, abs=1e-12)


def test_regularity_jump_detected():
    mods = []
    for n in (16, 64, 256):
        g = uniform_grid(-1.0, 1.0, n)
        v = np.where(g.midpoints[0] < 0, 2.0, 2.5)
        r = regularity_report(build_exponent(g, {"kind": "step", "values": v}), 2.0)
        h = 2.0 / n
        assert r.local_modulus >= 0.5 * math.log(1 / h) - 1e-12
        mods.append(r.local_modulus)
    assert mods[0] < mods[1] < mods[2]
