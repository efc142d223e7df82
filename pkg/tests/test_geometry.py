import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dispersia import BudgetExceeded
from dispersia.geometry import (PointSet, dual_lattice_in_shell, enumerate_frequency_set,
                                fibonacci_number, fibonacci_set, frolov_matrix,
                                frolov_polynomial, frolov_set, hyperbolic_cross,
                                in_dyadic_shell)
from dispersia.cubature import first_active_level


def as_set(points):
    return {tuple(np.round(p, 12)) for p in points}


@pytest.mark.parametrize("n,b", [(0, 1), (1, 1), (5, 8), (10, 89), (90, 4660046610375530309)])
def test_fibonacci_number(n, b):
    assert fibonacci_number(n) == b


def test_fibonacci_number_overflow():
    with pytest.raises(OverflowError):
        fibonacci_number(91)


@pytest.mark.parametrize("n,expected", [
    (2, [(0.5, 0.5), (0, 0)]),
    (3, [(1 / 3, 2 / 3), (2 / 3, 1 / 3), (0, 0)]),
    (4, [(0.2, 0.6), (0.4, 0.2), (0.6, 0.8), (0.8, 0.4), (0, 0)]),
])
def test_fibonacci_set_small(n, expected):
    T = fibonacci_set(n)
    assert as_set(T.points) == as_set(expected)
    assert T.tag == f"fibonacci({n})"


@pytest.mark.parametrize("n", range(2, 20))
def test_fibonacci_set_cardinality_and_exact_numerators(n):
    T = fibonacci_set(n)
    bn = fibonacci_number(n)
    assert len(T) == bn
    num = T.meta["numerators"]
    assert np.array_equal(T.points, num / bn)
    assert len(np.unique(num, axis=0)) == bn


def test_pointset_validation():
    with pytest.raises(ValueError):
        PointSet(np.array([[1.0, 0.2]]))
    with pytest.raises(ValueError):
        PointSet(np.array([[0.1, 0.2], [0.1, 0.2]]))
    assert len(PointSet.empty(3)) == 0


def test_pointset_text_roundtrip():
    T = fibonacci_set(7)
    text = T.to_text()
    assert text.splitlines()[0] == "d=2 n=21 tag=fibonacci(7)"
    back = PointSet.from_text(text)
    assert np.array_equal(back.points, T.points)
    assert back.tag == T.tag


def test_frolov_polynomial_coefficients():
    # prod (x - (2j-1)) - 1, highest degree first
    assert frolov_polynomial(2) == [1, -4, 2]
    assert frolov_polynomial(3) == [1, -9, 23, -16]


def test_frolov_matrix_d2():
    lat = frolov_matrix(2)
    assert np.allclose(sorted(lat.roots), [2 - math.sqrt(2), 2 + math.sqrt(2)], atol=1e-14)
    assert lat.detA == pytest.approx(2 * math.sqrt(2), rel=1e-13)
    assert lat.norm_form([1, 1]) == pytest.approx(7, abs=1e-12)
    assert lat.norm_form([1, -1]) == pytest.approx(-1, abs=1e-12)
    assert np.allclose(lat.A @ lat.Ainv_T.T, np.eye(2), atol=1e-12)


@pytest.mark.parametrize("d", [2, 3])
def test_norm_form_integrality(d):
    lat = frolov_matrix(d)
    rng = range(-20, 21) if d == 2 else range(-8, 9)
    M = np.array([m for m in itertools.product(rng, repeat=d) if any(m)], float)
    vals = lat.norm_form(M)
    rounded = np.round(vals)
    assert np.all(np.abs(vals - rounded) < 1e-6)
    assert np.all(rounded != 0)


@pytest.mark.parametrize("d", [4, 5])
def test_frolov_matrix_higher_dims(d):
    lat = frolov_matrix(d)
    assert np.allclose(lat.A @ lat.Ainv_T.T, np.eye(d), atol=1e-9)
    rng = np.random.default_rng(d)
    M = rng.integers(-3, 4, size=(200, d))
    M = M[np.any(M != 0, axis=1)]
    assert np.all(np.abs(lat.norm_form(M)) >= 1 - 1e-9)


def test_frolov_matrix_bad_dimension():
    with pytest.raises(ValueError):
        frolov_matrix(6)


@pytest.mark.parametrize("a", [1.01, 3, 4.5, 8])
def test_frolov_set_complete_and_density(a):
    lat = frolov_matrix(2)
    T = frolov_set(lat, a)
    assert (0.0, 0.0) in as_set(T.points)
    wide = frolov_set(lat, a, pad=3)
    assert np.array_equal(T.points, wide.points)
    density = a**2 * lat.detA
    assert abs(len(T) - density) <= 6 * a


def test_frolov_set_d2_a3_count_near_density():
    lat = frolov_matrix(2)
    T = frolov_set(lat, 3)
    assert abs(len(T) - 25.455844) <= 3 * 3


def test_frolov_set_budget():
    with pytest.raises(BudgetExceeded):
        frolov_set(frolov_matrix(2), 60)


def test_hyperbolic_cross_small_counts():
    assert len(hyperbolic_cross(1, 2)) == 9
    assert len(hyperbolic_cross(2, 2)) == 21


@given(st.integers(1, 40), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_hyperbolic_cross_predicate_and_symmetry(N, d):
    K = hyperbolic_cross(N, d)
    assert np.all(np.prod(np.maximum(np.abs(K), 1), axis=1) <= N)
    keyset = {tuple(k) for k in K}
    assert len(keyset) == len(K)
    for k in K[:50]:
        assert tuple(-k) in keyset
        assert tuple(k[::-1]) in keyset
    if d <= 2:
        brute = sum(1 for k in itertools.product(range(-N, N + 1), repeat=d)
                    if math.prod(max(abs(v), 1) for v in k) <= N)
        assert brute == len(K)
    assert len(hyperbolic_cross(N + 1, d)) >= len(K)


def test_lattice_L_contains_known_vector():
    F = enumerate_frequency_set("lattice_L", n=5, window=8)
    assert (3, 1) in {tuple(k) for k in F.vectors}
    assert (0, 0) not in {tuple(k) for k in F.vectors}


def test_rectangle_and_shell_predicates():
    R = enumerate_frequency_set("rectangle", s=(2, 1)).vectors
    assert len(R) == 7 * 3 and np.all(np.abs(R) < [4, 2])
    S = enumerate_frequency_set("shell", s=(2, 0)).vectors
    assert {tuple(k) for k in S} == {(-3, 0), (-2, 0), (2, 0), (3, 0)}


def test_dual_shell_membership_and_emptiness():
    lat = frolov_matrix(2)
    a = 3
    v0 = first_active_level(a, 2)
    for v in range(1, v0 + 5):
        for s0 in range(v + 1):
            s = (s0, v - s0)
            F = dual_lattice_in_shell(lat, a, s, include_zero=False)
            if 2**v < a**2:
                assert len(F) == 0
            assert np.all(in_dyadic_shell(F.vectors, s))
            assert np.allclose(F.preimages @ (a * lat.A).T, F.vectors)
    origin = dual_lattice_in_shell(lat, a, (0, 0))
    assert len(origin) == 1 and np.all(origin.vectors == 0)


def test_dual_shell_counts_constant():
    lat = frolov_matrix(2)
    for a in (3, 4, 5):
        v0 = first_active_level(a, 2)
        for v in range(v0, v0 + 7):
            for s0 in range(v + 1):
                cnt = len(dual_lattice_in_shell(lat, a, (s0, v - s0), include_zero=False))
                assert cnt <= 4 * 2 ** (v - v0)
