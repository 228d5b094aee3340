import numpy as np

from varlp.exponent import build_exponent
from varlp.grid import uniform_grid
from varlp.nfun import (check_alpha, check_conj_half_bound, check_conj_mean_bound,
                        check_conj_witness_lower, check_double_conjugate, check_unit_scale,
                        run_checks)


def _p():
    g = uniform_grid(-2.0, 2.0, 16)
    return build_exponent(g, {"kind": "log-holder", "p_inf": 2.0, "c": 1.0})


def test_inequalities_hold_on_samples():
    p = _p()
    for check in (check_conj_half_bound, check_conj_mean_bound, check_conj_witness_lower):
        name, kind, count, value, wit = check(p, samples=200, per_decade=128)
        assert kind == "ratio" and count >= 200 and wit
        assert value <= 1 + 1e-6, name


def test_double_conjugate_identity():
    name, kind, count, value, _ = check_double_conjugate(uniform_grid(0.0, 2.0, 4),
                                                        per_decade=512)
    assert kind == "relerr" and count > 0
    assert value <= 1e-3


def test_unit_scale_constant_exponent():
    g = uniform_grid(-1.0, 1.0, 8)
    p = build_exponent(g, {"kind": "constant", "q": 2.0})
    rows = check_unit_scale(p, per_decade=128)
    # |Q| (1/||chi_Q||)^2 = 1 for every cube when p = 2
    assert abs(rows[0][3] - 1) <= 1e-10
    assert abs(rows[1][3] - 1) <= 1e-2


def test_alpha_rows():
    rows = check_alpha(_p(), per_decade=128, n_t=4)
    names = [r[0] for r in rows]
    assert names == ["alpha(Q,1)", "alpha(Q,1/||chi_Q||)", "alpha-window", "alpha-growth",
                     "alpha-invalid"]
    assert all(np.isfinite(r[3]) for r in rows)
    assert rows[-1][3] == 0


def test_run_checks_shape():
    rows = run_checks(_p(), samples=100, per_decade=64)
    assert len(rows) == 4 + 2 + 5
    assert all(len(r) == 5 for r in rows)
