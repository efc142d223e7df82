import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dispersia.cubature import (CubatureRule, ErrorSeriesReport, estimate_gamma, exponential,
                                fibonacci_cubature, fibonacci_rule, first_active_level,
                                frolov_cubature, frolov_error_series, frolov_rule,
                                frolov_tail_bound, gamma_minimizers, hyperbolic_product,
                                phi_weight, random_hat_boxes, shell_count_bound, shell_counts)
from dispersia.geometry import fibonacci_number, frolov_matrix, frolov_set, hyperbolic_cross
from dispersia.hatfun import HatSpec, eval_hat_box

from oracles import lattice_min_product


def test_fibonacci_rule_weights():
    rule = fibonacci_rule(9)
    assert rule.meta["weight"] == Fraction(1, 55)
    assert math.fsum(rule.weights) == pytest.approx(1.0, abs=1e-15)
    assert rule.convention == "periodic_2pi"
    with pytest.raises(ValueError):
        CubatureRule(rule.nodes, rule.weights[:-1], "line")


def test_fibonacci_cubature_examples():
    assert fibonacci_cubature(5, lambda Y: np.ones(len(Y))) == pytest.approx(1.0)
    assert fibonacci_cubature(5, exponential((3, 1))) == pytest.approx(1.0, abs=1e-12)
    assert abs(fibonacci_cubature(5, exponential((1, 0)))) <= 1e-12


def test_phi_weight_examples():
    assert phi_weight(5, (3, 1)) == 1
    assert phi_weight(5, (1, 1)) == 0
    for n in (3, 8, 20, 60):
        assert phi_weight(n, (0, 0)) == 1


def test_phi_weight_large_integers_no_overflow():
    n = 80
    bn, bn1 = fibonacci_number(n), fibonacci_number(n - 1)
    k = np.array([[-bn1, 1], [bn, 0], [bn - 1, 1], [10**15, -3]], dtype=np.int64)
    expect = [int((int(a) + bn1 * int(b)) % bn == 0) for a, b in k]
    assert phi_weight(n, k).tolist() == expect


@pytest.mark.parametrize("n", range(3, 13))
def test_cubature_on_exponentials_matches_phi(n):
    K = np.array([(k1, k2) for k1 in range(-64, 65) for k2 in range(-64, 65)])
    Y = 2 * math.pi * fibonacci_rule(n).nodes.points
    vals = np.exp(1j * (Y @ K.T)).mean(axis=0)
    assert np.allclose(vals, phi_weight(n, K), atol=1e-10)


@pytest.mark.parametrize("n,expected", [(5, Fraction(3, 8)), (3, Fraction(1, 3))])
def test_gamma_examples(n, expected):
    assert estimate_gamma(n) == expected


def test_gamma_n5_minimizers():
    M = {tuple(k) for k in gamma_minimizers(5)}
    assert M and all(math.prod(max(abs(v), 1) for v in k) == 3 for k in M)
    assert (3, 1) in M or (-3, -1) in M


@pytest.mark.parametrize("n", range(3, 12))
def test_gamma_matches_exhaustive_oracle(n):
    assert estimate_gamma(n) == Fraction(lattice_min_product(n), fibonacci_number(n))


def test_gamma_range_lower_bound():
    for n in range(4, 19):
        assert estimate_gamma(n) >= 0.3


def test_gamma_search_bound_validation():
    assert estimate_gamma(8, search_bound=100) == estimate_gamma(8)
    with pytest.raises(ValueError):
        estimate_gamma(8, search_bound=5)


@pytest.mark.parametrize("n", range(4, 14))
def test_exactness_equivalence_on_hyperbolic_cross(n):
    g = estimate_gamma(n)
    N = math.ceil(g * fibonacci_number(n)) - 1  # strictly below the minimal product
    K = hyperbolic_cross(N, 2)
    w = phi_weight(n, K)
    assert w[np.all(K == 0, axis=1)].tolist() == [1]
    assert w.sum() == 1


@given(st.integers(4, 11), st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_coefficient_filtering_identity(n, seed):
    rng = np.random.default_rng(seed)
    K = rng.integers(-16, 17, size=(30, 2))
    c = rng.normal(size=30) + 1j * rng.normal(size=30)
    Y = 2 * math.pi * fibonacci_rule(n).nodes.points
    lhs = fibonacci_cubature(n, lambda Y: np.exp(1j * (Y @ K.T)) @ c)
    rhs = np.sum(c * phi_weight(n, K))
    assert abs(lhs - rhs) <= 1e-10


def test_hyperbolic_product():
    assert hyperbolic_product([[0, 0], [3, -2], [0, 5]]).tolist() == [1, 6, 5]


# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def lat2():
    return frolov_matrix(2)


def test_frolov_rule_weight(lat2):
    rule = frolov_rule(lat2, 4)
    assert rule.weights[0] == pytest.approx(1 / (16 * lat2.detA))
    assert rule.convention == "line"


@pytest.mark.parametrize("a", [3, 5, 8, 12])
def test_frolov_constant_integrand(lat2, a):
    val = frolov_cubature(lat2, a, lambda X: np.ones(len(X)))
    assert abs(val - 1) <= 3 / a


def test_frolov_empty_box_gives_zero(lat2):
    a = 3
    T = frolov_set(lat2, a)
    xs = np.sort(np.unique(np.r_[0.0, T.points[:, 0], 1.0]))
    gap = np.argmax(np.diff(xs))
    spec = HatSpec.from_box([xs[gap], 0.0], [xs[gap + 1], 1.0], 2)
    assert not np.any(eval_hat_box(spec, T.points))
    assert frolov_cubature(lat2, a, lambda X: eval_hat_box(spec, X)) == 0.0


def test_frolov_matches_direct_sum(lat2):
    a = 5
    T = frolov_set(lat2, a)
    spec = HatSpec.from_box([0.1, 0.2], [0.7, 0.6], 2)
    direct = math.fsum(eval_hat_box(spec, T.points)) / (a**2 * lat2.detA)
    assert frolov_cubature(lat2, a, lambda X: eval_hat_box(spec, X)) == pytest.approx(direct)


def test_frolov_point_at_center(lat2):
    a = 4
    T = frolov_set(lat2, a)
    z = T.points[np.argmin(np.sum((T.points - 0.5) ** 2, axis=1))]
    u = np.minimum(z, 1 - z) / 2 * 0.9
    spec = HatSpec(2, u, z)
    assert spec.inside_cube()
    phi = frolov_cubature(lat2, a, lambda X: eval_hat_box(spec, X))
    w = 1 / (a**2 * lat2.detA)
    assert phi >= w * np.prod(u) ** 2 > 0
    rep = frolov_error_series(lat2, a, spec, first_active_level(a, 2) + 6)
    assert rep.direct_error == pytest.approx(phi - spec.integral)


def test_low_shells_are_empty(lat2):
    for a in (3, 5):
        for row in shell_counts(lat2, a, first_active_level(a, 2) + 4):
            assert row["count"] <= row["bound"]
        v0 = first_active_level(a, 2)
        for v in range(v0):
            assert shell_count_bound((v, 0), a, 2) == 0


def test_shell_count_bound_vectorized():
    S = np.array([[3, 3], [6, 0], [0, 0]])
    b = shell_count_bound(S, 3, 2)
    assert b.tolist() == [shell_count_bound(s, 3, 2) for s in S]
    assert b[2] == 0


@pytest.mark.parametrize("a", [3, 5])
def test_error_series_consistent_20_boxes(lat2, a):
    pts = frolov_set(lat2, a)
    v_max = first_active_level(a, 2) + 10
    for spec in random_hat_boxes(2, 2, 20, seed=11):
        rep = frolov_error_series(lat2, a, spec, v_max, points=pts)
        assert isinstance(rep, ErrorSeriesReport)
        assert rep.consistent, (rep.residual, rep.tail_bound)
        assert rep.imag_part < 1e-9 + rep.tail_bound


def test_error_series_cauchy_in_v_max(lat2):
    a = 3
    pts = frolov_set(lat2, a)
    v0 = first_active_level(a, 2) + 4
    for spec in random_hat_boxes(2, 3, 6, seed=5):
        lo = frolov_error_series(lat2, a, spec, v0, points=pts)
        hi = frolov_error_series(lat2, a, spec, v0 + 4, points=pts)
        assert abs(hi.series_sum - lo.series_sum) <= lo.tail_bound
        assert hi.tail_bound <= lo.tail_bound


def test_error_series_d3():
    lat = frolov_matrix(3)
    a = 2.5
    spec = HatSpec.from_box([0.2, 0.1, 0.3], [0.8, 0.7, 0.9], 3)
    rep = frolov_error_series(lat, a, spec, first_active_level(a, 3) + 6)
    assert rep.consistent


def test_error_series_validation(lat2):
    spec = HatSpec.from_box([0.1, 0.1], [0.5, 0.5], 2)
    with pytest.raises(ValueError):
        frolov_error_series(lat2, 3, HatSpec.from_box([0.1, 0.1], [0.5, 0.5], 1), 8)
    with pytest.raises(ValueError):
        frolov_error_series(lat2, 3, HatSpec(2, [0.3, 0.3], [0.1, 0.5]), 8)
    with pytest.raises(ValueError):
        frolov_error_series(frolov_matrix(3), 3, spec, 8)
    rec = frolov_error_series(lat2, 3, spec, 8).to_record()
    assert set(rec) == {"a", "r", "u", "x0", "direct_error", "series_sum",
                        "tail_bound", "v_max"}


def test_tail_bound_decreases():
    spec = HatSpec.from_box([0.1, 0.1], [0.5, 0.5], 3)
    vals = [frolov_tail_bound(spec, 3, 2, v) for v in range(4, 20, 3)]
    assert all(x > y for x, y in zip(vals, vals[1:]))
