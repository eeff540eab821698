import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latticegrow import (
    ExactShape,
    brute_force_lpp,
    constant,
    exact_g,
    exact_shape_for,
    exponential,
    geometric,
    lpp_dp,
    lpp_geodesic,
    lpp_time_between,
    make_field,
    martin_asymptote,
    uniform,
)
from latticegrow.lpp import _dp_2d


def test_axis_rows_are_cumulative_sums():
    f = make_field(exponential(1.0), 2, "vertex", 2)
    lmap = lpp_dp(f, (6, 0))
    grid = np.stack([np.arange(7), np.zeros(7, dtype=np.int64)], axis=-1)
    w = f.vertex_weights(grid)
    acc = 0.0
    for n in range(1, 7):
        acc = acc + w[n]
        assert lmap.time_to((n, 0)) == acc
    assert lmap.time_to((0, 0)) == 0.0


def test_constant_weights_table_is_coordinate_sum():
    f = make_field(constant(1.0), 0, "vertex", 2)
    lmap = lpp_dp(f, (5, 4))
    for i in range(6):
        for j in range(5):
            assert lmap.time_to((i, j)) == i + j


def test_recursion_identity_every_cell():
    f = make_field(uniform(0.5, 1.5), 11, "vertex", 2)
    lmap = lpp_dp(f, (9, 7))
    grid = np.stack(np.meshgrid(np.arange(10), np.arange(8), indexing="ij"), axis=-1)
    w = f.vertex_weights(grid)
    t = lmap.table
    for i in range(10):
        for j in range(8):
            if i == 0 and j == 0:
                assert t[0, 0] == 0.0
                continue
            up = t[i - 1, j] if i > 0 else -math.inf
            left = t[i, j - 1] if j > 0 else -math.inf
            assert t[i, j] == w[i, j] + max(up, left)


@pytest.mark.parametrize("spec", [uniform(0.5, 1.5), geometric(0.5)], ids=lambda s: s.token())
def test_agrees_with_enumeration_oracle(spec):
    for seed in (11, 12, 13):
        f = make_field(spec, seed, "vertex", 2)
        lmap = lpp_dp(f, (6, 6))
        for tgt in [(6, 6), (3, 5), (1, 1), (6, 0), (0, 4)]:
            assert lmap.time_to(tgt) == brute_force_lpp(f, tgt)


def test_superadditivity_on_random_triples():
    f = make_field(exponential(1.0), 19, "vertex", 2)
    lmap = lpp_dp(f, (12, 12))
    rng = np.random.default_rng(0)
    for _ in range(50):
        y = tuple(int(c) for c in rng.integers(0, 7, size=2))
        z = tuple(int(c) for c in rng.integers(6, 13, size=2))
        if not all(a <= b for a, b in zip(y, z)):
            continue
        t_yz = lpp_time_between(f, y, z)
        assert lmap.time_to(z) >= lmap.time_to(y) + t_yz - 1e-12


def test_transposed_weights_give_transposed_table():
    f = make_field(exponential(1.0), 8, "vertex", 2)
    grid = np.stack(np.meshgrid(np.arange(7), np.arange(5), indexing="ij"), axis=-1)
    w = f.vertex_weights(grid)
    assert np.array_equal(_dp_2d(w.T), _dp_2d(w).T)


def test_general_dimension_recursion():
    f = make_field(uniform(0.5, 1.5), 3, "vertex", 3)
    lmap = lpp_dp(f, (3, 2, 2))
    axes = [np.arange(4), np.arange(3), np.arange(3)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    w = f.vertex_weights(grid)
    t = lmap.table
    for idx in np.ndindex(t.shape):
        if idx == (0, 0, 0):
            assert t[idx] == 0.0
            continue
        best = -math.inf
        for j in range(3):
            if idx[j] > 0:
                prev = idx[:j] + (idx[j] - 1,) + idx[j + 1 :]
                best = max(best, t[prev])
        assert t[idx] == w[idx] + best


def test_rejects_bad_corners_and_fields():
    f = make_field(exponential(1.0), 0, "vertex", 2)
    with pytest.raises(ValueError):
        lpp_dp(f, (-1, 3))
    fe = make_field(exponential(1.0), 0, "edge", 2)
    with pytest.raises(ValueError):
        lpp_dp(fe, (3, 3))


# -- geodesics ------------------------------------------------------------------

def test_geodesic_axis_target():
    f = make_field(exponential(1.0), 6, "vertex", 2)
    lmap = lpp_dp(f, (5, 3))
    path = lpp_geodesic(lmap, f, (4, 0))
    assert path.vertices == ((1, 0), (2, 0), (3, 0), (4, 0))


def test_geodesic_origin_is_empty():
    f = make_field(exponential(1.0), 6, "vertex", 2)
    lmap = lpp_dp(f, (3, 3))
    path = lpp_geodesic(lmap, f, (0, 0))
    assert path.vertices == ()
    assert path.total_time == 0.0


def test_geodesic_weight_sum_matches_table_and_oracle():
    f = make_field(uniform(0.5, 1.5), 11, "vertex", 2)
    lmap = lpp_dp(f, (6, 6))
    path = lpp_geodesic(lmap, f, (6, 6))
    grid = np.stack(np.meshgrid(np.arange(7), np.arange(7), indexing="ij"), axis=-1)
    w = f.vertex_weights(grid)
    acc = 0.0
    for v in path.vertices:
        acc = acc + w[v]
    assert acc == lmap.time_to((6, 6)) == brute_force_lpp(f, (6, 6))


def test_geodesic_is_oriented():
    f = make_field(geometric(0.5), 21, "vertex", 2)
    lmap = lpp_dp(f, (8, 8))
    path = lpp_geodesic(lmap, f, (8, 8))
    prev = (0, 0)
    for v in path.vertices:
        assert sum(v) == sum(prev) + 1
        assert all(a <= b for a, b in zip(prev, v))
        prev = v


def test_geodesic_tie_break_prefers_first_axis():
    f = make_field(constant(1.0), 0, "vertex", 2)
    lmap = lpp_dp(f, (2, 2))
    path = lpp_geodesic(lmap, f, (2, 2))
    # backtracking from (2,2): constant weights tie everywhere, so each
    # backtrack step drops the first axis, pinning this exact path
    assert path.vertices == ((0, 1), (0, 2), (1, 2), (2, 2))


def test_geodesic_rejects_out_of_rectangle():
    f = make_field(exponential(1.0), 0, "vertex", 2)
    lmap = lpp_dp(f, (3, 3))
    with pytest.raises(ValueError):
        lpp_geodesic(lmap, f, (4, 0))


# -- exact shapes ------------------------------------------------------------------

def test_exact_g_exponential_values():
    shape = ExactShape("exponential")
    assert exact_g(shape, (1.0, 1.0)) == 4.0
    assert exact_g(shape, (1.0, 0.0)) == 1.0
    assert exact_g(shape, (0.0, 1.0)) == 1.0


def test_exact_g_geometric_value():
    shape = ExactShape("geometric", p=0.5)
    assert exact_g(shape, (1.0, 1.0)) == pytest.approx(4.0 + 2.0 * math.sqrt(2.0), rel=1e-15)
    # axis value equals the weight mean 1/p
    assert exact_g(shape, (1.0, 0.0)) == pytest.approx(2.0, rel=1e-15)


@pytest.mark.parametrize("shape", [ExactShape("exponential"), ExactShape("geometric", p=0.3)])
def test_exact_g_homogeneous_and_symmetric(shape):
    rng = np.random.default_rng(1)
    for _ in range(50):
        x = rng.uniform(0.01, 5.0, size=2)
        g = exact_g(shape, x)
        assert exact_g(shape, x[::-1]) == pytest.approx(g, rel=1e-12)
        for a in (0.5, 2.0, 10.0):
            assert exact_g(shape, a * x) == pytest.approx(a * g, rel=1e-12)


def test_exact_g_rejects_negative():
    with pytest.raises(ValueError):
        exact_g(ExactShape("exponential"), (-0.5, 1.0))


def test_exact_shape_for_specs():
    assert exact_shape_for(exponential(1.0)).model == "exponential"
    assert exact_shape_for(geometric(0.25)).p == 0.25
    with pytest.raises(ValueError):
        exact_shape_for(uniform(0.5, 1.5))
    with pytest.raises(ValueError):
        exact_shape_for(exponential(2.0))


def test_martin_asymptote_values():
    assert martin_asymptote(1.0, 1.0, 0.04) == pytest.approx(1.4, rel=1e-15)
    assert martin_asymptote(2.5, 0.0, 0.3) == 2.5
    with pytest.raises(ValueError):
        martin_asymptote(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        martin_asymptote(1.0, -1.0, 0.1)


@given(st.floats(1e-6, 1.0))
@settings(max_examples=50)
def test_exponential_martin_gap_is_exactly_a(a):
    shape = ExactShape("exponential")
    gap = exact_g(shape, (1.0, a)) - martin_asymptote(1.0, 1.0, a)
    assert gap == pytest.approx(a, rel=1e-9, abs=1e-12)


def test_monotone_approach_toward_shape_value():
    # sample means of T(0,(n,n))/n grow toward 4 and respect the supremum
    means = {}
    ses = {}
    for n in (8, 32):
        vals = []
        for i in range(60):
            f = make_field(exponential(1.0), 10_000 + 97 * i + n, "vertex", 2)
            vals.append(lpp_dp(f, (n, n)).time_to((n, n)) / n)
        means[n] = float(np.mean(vals))
        ses[n] = float(np.std(vals, ddof=1) / math.sqrt(len(vals)))
    assert means[32] >= means[8] - 2 * math.hypot(ses[8], ses[32])
    for n in (8, 32):
        assert means[n] <= 4.0 + 2 * ses[n]
