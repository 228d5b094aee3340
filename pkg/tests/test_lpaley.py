import math

import numpy as np
import pytest

from varlp.exponent import build_exponent
from varlp.grid import GridFunction, integrate, make_grid, uniform_grid
from varlp.lpaley import build_filterbank, bump, convolve, sf_equivalence, square_function


@pytest.fixture(scope="module")
def grid():
    return uniform_grid(-4.0, 4.0, 512)


@pytest.fixture(scope="module")
def fb(grid):
    return build_filterbank(grid, J=4)


def _smooth(g, center=0.0, width=0.5):
    return GridFunction.from_callable(g, lambda x: np.exp(-((x - center) / width) ** 2))


def _kernel(h, values):
    n = len(values) // 2
    return GridFunction(uniform_grid(-(n + 0.5) * h, (n + 0.5) * h, 2 * n + 1), values)


def test_bump_support():
    r2 = np.array([0.0, 0.5, 0.99, 1.0, 4.0])
    v = bump(r2)
    assert v[0] == pytest.approx(math.exp(-1))
    assert v[3] == v[4] == 0.0 and v[2] > 0


def test_filter_integrals(fb):
    assert integrate(fb.phi0) == pytest.approx(1.0, abs=1e-6)
    assert integrate(fb.phi) == pytest.approx(0.0, abs=1e-6)
    m = integrate(GridFunction(fb.phi.grid, np.abs(fb.phi.values)))
    for d in fb.dilations:
        assert integrate(GridFunction(d.grid, np.abs(d.values))) == pytest.approx(m, abs=1e-6)


def test_dilation_support(fb):
    x = fb.phi.grid.midpoints[0]
    base = np.abs(x[fb.phi.values != 0]).max()
    for j, d in enumerate(fb.dilations, start=1):
        xj = d.grid.midpoints[0]
        assert np.abs(xj[d.values != 0]).max() <= base * 2.0 ** -j * (1 + 1e-12)


def test_kernels_telescope(fb):
    total = np.sum([k.values for k in fb.kernels], axis=0)
    np.testing.assert_allclose(total, fb.psi_J.values, atol=1e-6)


def test_approximate_identity():
    g = uniform_grid(-4.0, 4.0, 2048)
    f = _smooth(g)
    bank = build_filterbank(g, J=6)
    errs = []
    for J in range(7):
        psi = np.sum([k.values for k in bank.kernels[:J + 1]], axis=0)
        r = convolve(f, GridFunction(bank.psi_J.grid, psi)).values - f.values
        errs.append(np.linalg.norm(r) / np.linalg.norm(f.values))
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 0.05


def test_too_coarse():
    g = uniform_grid(-4.0, 4.0, 64)
    with pytest.raises(ValueError, match="too coarse"):
        build_filterbank(g, J=4)
    with pytest.raises(ValueError):
        build_filterbank(make_grid(1, [0.0, 1.0, 3.0]), J=0)


def test_convolve_delta(grid):
    h = grid.spacing[0]
    rng = np.random.default_rng(0)
    k = _kernel(h, rng.normal(size=21))
    v = np.zeros(512)
    v[200] = 1 / h
    out = convolve(GridFunction(grid, v), k).values
    want = np.zeros(512)
    want[190:211] = k.values
    np.testing.assert_allclose(out, want, atol=1e-10)


def test_convolve_zero(grid, fb):
    out = convolve(GridFunction(grid, np.zeros(512)), fb.kernels[1])
    assert np.all(out.values == 0)


def test_convolve_commutes():
    rng = np.random.default_rng(1)
    g = uniform_grid(-3.5, 3.5, 7)
    for _ in range(10):
        a, b = rng.normal(size=7), rng.normal(size=7)
        ab = convolve(GridFunction(g, a), GridFunction(g, b)).values
        ba = convolve(GridFunction(g, b), GridFunction(g, a)).values
        np.testing.assert_allclose(ab, ba, atol=1e-10)


def test_convolve_direct_matches_fft():
    rng = np.random.default_rng(2)
    g = uniform_grid(-8.0, 8.0, 1024)
    f = GridFunction(g, rng.normal(size=1024))
    k = _kernel(g.spacing[0], rng.normal(size=101))
    d = convolve(f, k, "direct").values
    np.testing.assert_allclose(convolve(f, k, "fft").values, d, atol=1e-10)
    np.testing.assert_allclose(convolve(f, k).values, d, atol=1e-10)


def test_convolve_spacing_mismatch(grid):
    with pytest.raises(ValueError, match="spacing"):
        convolve(_smooth(grid), _kernel(0.5, np.ones(3)))


def test_convolve_2d_delta():
    g = uniform_grid((-2.0, -2.0), (2.0, 2.0), (16, 16))
    h = g.spacing[0]
    kg = uniform_grid((-1.5 * h, -1.5 * h), (1.5 * h, 1.5 * h), (3, 3))
    kv = np.arange(9.0).reshape(3, 3)
    v = np.zeros((16, 16))
    v[5, 7] = 1 / h ** 2
    out = convolve(GridFunction(g, v), GridFunction(kg, kv)).values
    np.testing.assert_allclose(out[4:7, 6:9], kv, atol=1e-12)


def test_square_function_zero_and_homogeneous(grid, fb):
    assert np.all(square_function(GridFunction(grid, np.zeros(512)), fb).values == 0)
    f = _smooth(grid, 0.3)
    s = square_function(f, fb).values
    for c in (-2.5, 0.1):
        cf = GridFunction(grid, c * f.values)
        np.testing.assert_allclose(square_function(cf, fb).values, abs(c) * s, atol=1e-10)


def test_energy_split(grid, fb):
    f = _smooth(grid, -0.4, 0.3)
    s = square_function(f, fb).values
    parts = [np.sum(convolve(f, k, "direct").values ** 2) for k in fb.kernels]
    assert np.sum(s ** 2) == pytest.approx(math.fsum(parts), rel=1e-9)


def test_level0_phi_kills_constants():
    g = uniform_grid(-8.0, 8.0, 256)
    bank = build_filterbank(g, J=2, level0="phi")
    c = GridFunction(g, np.ones(256))
    s = square_function(c, bank).values
    inner = np.abs(g.midpoints[0]) < 4
    assert np.max(s[inner]) < 1e-6
    assert np.min(square_function(c, build_filterbank(g, J=2)).values[inner]) > 0.99


def test_sf_single_function(grid, fb):
    p = build_exponent(grid, {"kind": "log-holder", "p_inf": 2.0, "c": 1.0})
    rec = sf_equivalence(p, fb, [_smooth(grid)])
    assert rec.c_low == rec.c_high == rec.ratios[0]
    with pytest.raises(ValueError):
        sf_equivalence(p, fb, [])


def test_sf_translation_invariance(grid, fb):
    p = build_exponent(grid, {"kind": "constant", "q": 2.0})
    f = _smooth(grid, -0.5, 0.3)
    shifted = GridFunction(grid, np.roll(f.values, 37))
    rec = sf_equivalence(p, fb, [f, shifted])
    assert rec.ratios[0] == pytest.approx(rec.ratios[1], rel=1e-10)
