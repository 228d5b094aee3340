import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varlp.grid import (Cube, DyadicFamily, GridFunction, count_cubes, dyadic_cubes,
                        enum_cubes, integrate, make_grid, make_partition,
                        partition_from_json, partition_to_json, uniform_grid)


def test_single_cell_grid():
    g = make_grid(1, [0.0, 1.0])
    assert g.shape == (1,)
    assert g.volumes[0] == 1.0


def test_two_half_cells():
    g = make_grid(1, [0.0, 0.5, 1.0])
    np.testing.assert_array_equal(g.widths[0], [0.5, 0.5])


def test_nonuniform_widths():
    e = math.e
    g = make_grid(1, [1.0, e, e * e])
    np.testing.assert_allclose(g.widths[0], [e - 1, e * e - e], rtol=1e-15)


@pytest.mark.parametrize("edges", [[0.0], [0.0, 0.0, 1.0], [1.0, 0.0], [0.0, np.inf]])
def test_bad_edges_rejected(edges):
    with pytest.raises(ValueError):
        make_grid(1, edges)


def test_2d_needs_uniform_spacing():
    with pytest.raises(ValueError):
        make_grid(2, [[0, 1, 3], [0, 1, 2]])


def test_integrate_examples():
    g = uniform_grid(0.0, 2.0, 4)
    assert integrate(GridFunction(g, np.zeros(4))) == 0.0
    assert integrate(GridFunction(g, [1, 1, 0, 0])) == 1.0
    h = make_grid(1, [0.0, 0.5, 1.0])
    assert integrate(GridFunction(h, [2.0, 3.0])) == 2.5


def test_grid_function_rejects_nonfinite():
    g = uniform_grid(0.0, 1.0, 2)
    with pytest.raises(ValueError):
        GridFunction(g, [1.0, np.nan])
    with pytest.raises(ValueError):
        GridFunction(g, [1.0, 2.0, 3.0])


def test_enum_all_intervals():
    g = uniform_grid(0.0, 3.0, 3)
    cubes = enum_cubes(g, None, budget=100)
    assert len(cubes) == 6 == count_cubes(g)


def test_enum_volume_cap():
    g = uniform_grid(0.0, 3.0, 3)
    cubes = enum_cubes(g, 1.0)
    assert [(c.lo, c.hi) for c in cubes] == [((0,), (1,)), ((1,), (2,)), ((2,), (3,))]


def test_enum_budget_deterministic():
    g = uniform_grid(0.0, 8.0, 64)
    a = enum_cubes(g, None, budget=50, seed=4)
    b = enum_cubes(g, None, budget=50, seed=4)
    assert a == b
    assert len(a) == 50
    c = enum_cubes(g, None, budget=100, seed=4)
    assert len(c) == 100
    assert sum(q.ncells == 1 for q in c) == 64


def test_enum_2d_squares():
    g = uniform_grid((0.0, 0.0), (1.0, 1.0), (3, 3))
    cubes = enum_cubes(g)
    assert len(cubes) == 9 + 4 + 1 == count_cubes(g)


def _labels(cubes):
    return sorted((c.lo[0], c.hi[0]) for c in cubes)


def test_dyadic_two_levels():
    g = uniform_grid(0.0, 2.0, 4)
    cubes = dyadic_cubes(g, DyadicFamily(1))
    assert _labels(cubes) == sorted([(0, 2), (2, 4), (0, 1), (1, 2), (2, 3), (3, 4)])


def test_dyadic_one_generation():
    g = uniform_grid(0.0, 1.0, 4)
    assert _labels(dyadic_cubes(g, DyadicFamily(0))) == [(0, 4)]


def test_dyadic_shifted_half():
    g = uniform_grid(0.0, 2.0, 4)
    cubes = dyadic_cubes(g, DyadicFamily(0, (0.5,)))
    # [-1/2, 1/2) and [3/2, 5/2) are clipped to the domain
    assert _labels(cubes) == [(0, 1), (1, 3), (3, 4)]
    assert [c.volume for c in sorted(cubes, key=lambda c: c.lo)] == [0.5, 1.0, 0.5]


def test_dyadic_coarser_levels():
    g = uniform_grid(0.0, 4.0, 8)
    cubes = dyadic_cubes(g, DyadicFamily(0, (0.0,), -1))
    assert _labels(cubes) == sorted([(0, 4), (4, 8), (0, 2), (2, 4), (4, 6), (6, 8)])
    with pytest.raises(ValueError):
        DyadicFamily(0, (0.0,), 1)


def test_dyadic_misaligned_grid_rejected():
    g = uniform_grid(0.0, 2.0, 3)
    with pytest.raises(ValueError, match="not aligned"):
        dyadic_cubes(g, DyadicFamily(1))


def test_equal_cubes_partition():
    g = uniform_grid(0.0, 3.0, 6)
    P = make_partition(g, {"kind": "equal-cubes", "side": 1.0})
    assert _labels(P.cubes) == [(0, 2), (2, 4), (4, 6)]
    assert P.local_flag


def test_explicit_partition_local_flag():
    g = uniform_grid(0.0, 3.0, 3)
    P = make_partition(g, {"kind": "explicit", "cubes": [{"lo": [0], "hi": [2]},
                                                         {"lo": [2], "hi": [3]}],
                                 "cap": 1.0})
    assert not P.local_flag
    # the default cap allows one cell of slack, here a full unit cell
    Q = make_partition(g, {"kind": "explicit", "cubes": list(P.cubes)})
    assert Q.local_flag


def test_partition_validation():
    g = uniform_grid(0.0, 3.0, 3)
    with pytest.raises(ValueError, match="overlap"):
        make_partition(g, {"kind": "explicit", "cubes": [g.cube(0, 2), g.cube(1, 3)]})
    with pytest.raises(ValueError, match="uncovered"):
        make_partition(g, {"kind": "explicit", "cubes": [g.cube(0, 2)]})


@pytest.mark.parametrize("kind", ["random-local", "random-global"])
def test_random_partitions_deterministic(kind):
    g = uniform_grid(-8.0, 8.0, 128)
    a = make_partition(g, {"kind": kind, "seed": 7})
    b = make_partition(g, {"kind": kind, "seed": 7})
    assert a.cubes == b.cubes
    if kind == "random-local":
        assert a.local_flag
        assert all(c.volume <= g.local_cap for c in a.cubes)


def test_random_local_2d():
    g = uniform_grid((-2.0, -2.0), (2.0, 2.0), (16, 16))
    P = make_partition(g, {"kind": "random-local", "seed": 1})
    assert P.local_flag


def test_partition_json_round_trip():
    g = uniform_grid(-4.0, 4.0, 32)
    P = make_partition(g, {"kind": "random-global", "seed": 3})
    assert partition_from_json(g, partition_to_json(P)).cubes == P.cubes


def test_cube_volume_and_label():
    g = make_grid(1, [0.0, 0.5, 2.0, 2.25])
    Q = g.cube(1, 3)
    assert Q.volume == 1.75
    assert Q.label() == "[1,3)"
    with pytest.raises(ValueError):
        g.cube(2, 2)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.01, 3.0), min_size=1, max_size=30))
def test_count_matches_enumeration(widths):
    edges = np.concatenate([[0.0], np.cumsum(widths)])
    g = make_grid(1, edges)
    cubes = enum_cubes(g, g.local_cap, budget=10**6)
    assert len(cubes) == count_cubes(g, g.local_cap)
    assert all(c.volume <= g.local_cap or c.ncells == 1 for c in cubes)
    assert all(isinstance(c, Cube) for c in cubes)
