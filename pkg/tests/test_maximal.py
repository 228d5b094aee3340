import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varlp.grid import DyadicFamily, GridFunction, make_grid, make_partition, uniform_grid
from varlp.maximal import (MaximalSpec, averaging, cz_decompose, default_zmax, maximal,
                           shift_lattice, shifted_dyadic_average_bound, split_at_level,
                           vector_maximal)


def _naive(f, local=False, q=1.0):
    """Per-cell loop over every interval containing the cell.

    Local intervals have volume at most the cap; single cells always count.
    """
    g = f.grid
    n = g.shape[0]
    w = g.widths[0]
    a = np.abs(f.values) ** q
    out = np.zeros(n)
    for i in range(n):
        best = 0.0
        for lo in range(i + 1):
            for hi in range(i + 1, n + 1):
                vol = w[lo:hi].sum()
                if local and vol > g.local_cap and hi - lo > 1:
                    break
                best = max(best, (a[lo:hi] * w[lo:hi]).sum() / vol)
        out[i] = best ** (1 / q)
    return out


def _indicator(g, lo, hi):
    return GridFunction.from_callable(g, lambda x: ((x >= lo) & (x < hi)).astype(float))


@pytest.mark.parametrize("spec", [MaximalSpec(), MaximalSpec(local=True),
                                  MaximalSpec(q=2.0), MaximalSpec(family=DyadicFamily(3))])
def test_constant_is_fixed(spec):
    g = uniform_grid(-2.0, 2.0, 32)
    out = maximal(GridFunction(g, np.full(32, -1.5)), spec)
    np.testing.assert_allclose(out.values, 1.5, rtol=1e-15)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.05, 1.5), min_size=1, max_size=14), st.integers(0, 999),
       st.booleans(), st.sampled_from([1.0, 2.0, 3.5]))
def test_matches_naive_oracle(widths, seed, local, q):
    g = make_grid(1, np.concatenate([[0.0], np.cumsum(widths)]))
    f = GridFunction(g, np.random.default_rng(seed).normal(size=g.shape))
    got = maximal(f, MaximalSpec(local=local, q=q)).values
    np.testing.assert_allclose(got, _naive(f, local, q), rtol=1e-12)


def test_separation_example():
    g = uniform_grid(-2.0, 3.0, 320)
    f = _indicator(g, 0.0, 1.0)
    i = int(g.locate(1.5))
    h = 1 / 64
    assert abs(maximal(f).values[i] - 2 / 3) <= 2 * h
    assert abs(maximal(f, MaximalSpec(local=True)).values[i] - 0.5) <= 2 * h


def test_unshifted_dyadic_misses_across_one():
    g = uniform_grid(-2.0, 3.0, 80)
    f = _indicator(g, 0.0, 1.0)
    out = maximal(f, MaximalSpec(family=DyadicFamily(default_zmax(g)))).values
    x = g.midpoints[0]
    assert np.all(out[(x > 1) & (x < 2)] == 0.0)


def test_pointwise_domination():
    rng = np.random.default_rng(2)
    g = uniform_grid(-4.0, 4.0, 64)
    for _ in range(20):
        f = GridFunction(g, rng.normal(size=64))
        glob = maximal(f).values
        loc = maximal(f, MaximalSpec(local=True)).values
        assert np.all(loc <= glob)
        for t in (0.0, 0.375):
            dy = maximal(f, MaximalSpec(family=DyadicFamily(default_zmax(g), (t,)))).values
            assert np.all(dy <= loc)


def test_2d_maximal_of_point_mass():
    g = uniform_grid((0.0, 0.0), (2.0, 2.0), (4, 4))
    v = np.zeros((4, 4))
    v[0, 0] = 1.0
    out = maximal(GridFunction(g, v)).values
    # from cell (i, j) the best square is the smallest containing both cells
    k = np.maximum.outer(np.arange(4), np.arange(4)) + 1
    np.testing.assert_allclose(out, 1.0 / k ** 2, rtol=1e-15)


def test_shift_average_constant():
    g = uniform_grid(-4.0, 4.0, 64)
    f = GridFunction(g, np.full(64, 2.0))
    out = shifted_dyadic_average_bound(f, 1.0, shift_lattice(9))
    np.testing.assert_allclose(out.values, 2.0, rtol=1e-15)
    with pytest.raises(ValueError):
        shifted_dyadic_average_bound(f, 1.0, [])


def test_single_shift_underestimates():
    g = uniform_grid(-2.0, 3.0, 80)
    f = _indicator(g, 0.0, 1.0)
    loc = maximal(f, MaximalSpec(local=True)).values
    avg = shifted_dyadic_average_bound(f, 1.0, [(0.0,)]).values
    i = int(g.locate(1.2))
    assert loc[i] > 0 and avg[i] == 0.0


def test_side_two_cubes_bound_local_maximal():
    rng = np.random.default_rng(4)
    g = uniform_grid(-4.0, 4.0, 64)
    f = GridFunction(g, rng.exponential(size=64) * (rng.random(64) < 0.3))
    loc = maximal(f, MaximalSpec(local=True)).values
    avg = shifted_dyadic_average_bound(f, 1.0, shift_lattice(33), z_min=-1).values
    assert np.all(avg[loc > 0] > 0)


def test_shift_lattice():
    s = shift_lattice(33)
    assert len(s) == 33 and s[0] == (-4.0,) and s[-1] == (4.0,)
    assert len(shift_lattice(5, 2)) == 25


def test_averaging_examples():
    g = uniform_grid(0.0, 2.0, 2)
    f = GridFunction(g, [0.5, 1.5])
    singles = make_partition(g, {"kind": "equal-cubes", "side": 1.0})
    np.testing.assert_array_equal(averaging(f, singles).values, [0.5, 1.5])
    whole = make_partition(g, {"kind": "explicit", "cubes": [g.cube(0, 2)]})
    np.testing.assert_array_equal(averaging(f, whole).values, [1.0, 1.0])


def test_averaging_preserves_integral_and_constants():
    rng = np.random.default_rng(5)
    g = make_grid(1, np.sort(rng.uniform(-3, 3, 50)))
    P = make_partition(g, {"kind": "random-global", "seed": 1})
    f = GridFunction(g, rng.normal(size=g.shape))
    Tf = averaging(f, P)
    assert math.fsum((Tf.values * g.volumes).tolist()) == pytest.approx(
        math.fsum((f.values * g.volumes).tolist()), abs=1e-12)
    np.testing.assert_allclose(averaging(Tf, P).values, Tf.values, rtol=1e-14)
    c = GridFunction(g, np.full(g.shape, 0.1))
    assert np.all(averaging(c, P).values == 0.1)


def test_averaging_2d():
    g = uniform_grid((0.0, 0.0), (2.0, 2.0), (2, 2))
    P = make_partition(g, {"kind": "explicit", "cubes": [g.cube((0, 0), (2, 2))]})
    out = averaging(GridFunction(g, [[1.0, 2.0], [3.0, 6.0]]), P)
    np.testing.assert_array_equal(out.values, np.full((2, 2), 3.0))


def test_split_at_level():
    g = uniform_grid(0.0, 2.0, 2)
    f = GridFunction(g, [0.2, 0.8])
    lo, hi = split_at_level(f, 0.5)
    np.testing.assert_array_equal(lo.values, [0.2, 0.0])
    np.testing.assert_array_equal(hi.values, [0.0, 0.8])
    lo, hi = split_at_level(f, 1.0)
    assert np.all(hi.values == 0) and np.all(lo.values == f.values)
    lo, hi = split_at_level(f, 0.8)
    np.testing.assert_array_equal(lo.values, [0.2, 0.8])
    with pytest.raises(ValueError):
        split_at_level(f, 0.0)


def test_cz_examples():
    g = uniform_grid(0.0, 2.0, 8)
    f = _indicator(g, 0.0, 1.0)
    cubes = cz_decompose(f, 0.6)
    assert [(c.cube.lo, c.cube.hi) for c in cubes] == [((0,), (4,))]
    assert cubes[0].level == 0 and cubes[0].mean == 1.0
    assert cz_decompose(f, 2.5) == []


def test_cz_union_is_superlevel_set():
    rng = np.random.default_rng(6)
    g = uniform_grid(-2.0, 2.0, 32)
    for _ in range(30):
        f = GridFunction(g, rng.exponential(size=32) * (rng.random(32) < 0.5))
        lam = float(rng.uniform(0.1, 2.0))
        cover = np.zeros(32, dtype=int)
        for c in cz_decompose(f, lam, 2.0, (0.25,)):
            cover[c.cube.slices] += 1
            assert c.mean > lam / 2
        fam = DyadicFamily(default_zmax(g), (0.25,))
        sup = maximal(f, MaximalSpec(q=2.0, family=fam)).values > lam / 2
        assert cover.max(initial=0) <= 1
        np.testing.assert_array_equal(cover > 0, sup)


def test_vector_maximal():
    rng = np.random.default_rng(7)
    g = uniform_grid(-2.0, 2.0, 32)
    f1 = GridFunction(g, rng.normal(size=32))
    f2 = GridFunction(g, rng.normal(size=32))
    spec = MaximalSpec(local=True)
    m1, m2 = maximal(f1, spec).values, maximal(f2, spec).values
    np.testing.assert_allclose(vector_maximal([f1], 2.0).values, m1, rtol=1e-15)
    np.testing.assert_allclose(vector_maximal([f1, f1], 2.0).values, math.sqrt(2) * m1,
                               rtol=1e-14)
    np.testing.assert_allclose(vector_maximal([f1, f2], 2.0).values, np.hypot(m1, m2),
                               rtol=1e-14)
    with pytest.raises(ValueError):
        vector_maximal([], 2.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        MaximalSpec(q=0.5)
    with pytest.raises(ValueError):
        MaximalSpec(family="triangles")
