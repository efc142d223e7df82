import json
import math

import numpy as np
import pytest

from dispersia.cubature import fibonacci_rule, frolov_rule, phi_weight
from dispersia.discretization import (admissible_r, discrete_norm, exactness_check,
                                      kernel_reproduction, linf_offset_search,
                                      marcinkiewicz_ratios, ratio_window, rectangle_poly,
                                      reports_json, universality_sweep)
from dispersia.geometry import PointSet, frolov_matrix
from dispersia.hatfun import compositions
from dispersia.kernels import TrigPoly, trig_eval


@pytest.fixture(scope="module")
def F12():
    return fibonacci_rule(12)


def test_exactness_single_node_constants():
    assert exactness_check(PointSet(np.zeros((1, 2))), [1.0], [0, 0])


def test_exactness_fails_n5_on_31():
    rule = fibonacci_rule(5)
    res = exactness_check(rule.nodes, rule.weights, [1, 1])
    assert not res
    assert phi_weight(5, res.failing) == 1 and any(res.failing)
    assert phi_weight(5, (3, 1)) == 1


def test_exactness_numeric_path_agrees(F12):
    # perturbing one weight forces the numeric branch; tiny changes keep the verdicts
    w = F12.weights.copy()
    w[0] *= 1 + 1e-13
    for s in [(3, 0), (1, 2), (4, 0)]:
        N = [2**v for v in s]
        assert bool(exactness_check(F12.nodes, w, N)) == bool(
            exactness_check(F12.nodes, F12.weights, N))


def test_admissible_r_values():
    assert admissible_r(12) == 4
    assert admissible_r(10) == 3


@pytest.mark.parametrize("n,r", [(10, 2), (12, 3), (13, 4)])
def test_one_below_admissible_is_exact(n, r):
    rule = fibonacci_rule(n)
    for s in compositions(r, 2):
        assert exactness_check(rule.nodes, rule.weights, [2**int(v) for v in s])


def test_admissible_r_not_sufficient_at_n12(F12):
    # the 3 * 2^r condition leaves T(3N) exactness failing on the skewed rectangles
    bad = {tuple(int(v) for v in s) for s in compositions(4, 2)
           if not exactness_check(F12.nodes, F12.weights, [2**int(v) for v in s])}
    assert bad == {(0, 4), (1, 3), (3, 1), (4, 0)}


def test_constant_ratio_is_one(F12):
    for q in (1, 2, 3, math.inf):
        rep = marcinkiewicz_ratios(F12.nodes, F12.weights, (0, 0), q, trials=5)
        assert rep.min_ratio == pytest.approx(1.0, abs=1e-12)
        assert rep.max_ratio == pytest.approx(1.0, abs=1e-12)


def test_discrete_parseval_exact(F12):
    for s in compositions(3, 2):
        rep = marcinkiewicz_ratios(F12.nodes, F12.weights, s, 2, trials=100)
        assert rep.exactness_verified
        assert abs(rep.min_ratio - 1) <= 1e-9 and abs(rep.max_ratio - 1) <= 1e-9


def test_ratio_requires_exactness(F12):
    with pytest.raises(ValueError):
        marcinkiewicz_ratios(F12.nodes, F12.weights, (4, 0), 2, trials=2)
    rep = marcinkiewicz_ratios(F12.nodes, F12.weights, (4, 0), 2, trials=2, waive=True)
    assert rep.waived and not rep.exactness_verified and rep.failing_k is not None


def test_ratio_window_and_bounds(F12):
    lo, hi = ratio_window(2)
    assert lo == pytest.approx(0.95 / 9) and hi == pytest.approx(9 * 1.05)
    for q in (1, math.inf):
        rep = marcinkiewicz_ratios(F12.nodes, F12.weights, (2, 1), q, trials=30, seed=4)
        assert rep.bounds_ok
        assert 1 / 9 <= rep.min_ratio <= rep.max_ratio <= 9


def test_linf_ratio_stable_across_n():
    mins = []
    for n, r in [(10, 2), (12, 3), (13, 4)]:
        rule = fibonacci_rule(n)
        worst = min(marcinkiewicz_ratios(rule.nodes, rule.weights, s, math.inf,
                                         trials=20).min_ratio
                    for s in compositions(r, 2))
        mins.append(worst)
    assert min(mins) >= 1 / 9
    assert max(mins) / min(mins) <= 1.5


@pytest.mark.parametrize("q", [1, 2, math.inf])
def test_refinement_guard(q):
    # F_12 -> F_13 on the same rectangles
    prev = fibonacci_rule(12)
    nxt = fibonacci_rule(13)
    for s in [(3, 0), (2, 1), (0, 3)]:
        a = marcinkiewicz_ratios(prev.nodes, prev.weights, s, q, trials=20).max_ratio
        b = marcinkiewicz_ratios(nxt.nodes, nxt.weights, s, q, trials=20).max_ratio
        assert b <= 1.5 * a


def test_universality_sweep_records(F12):
    sums = universality_sweep(F12.nodes, F12.weights, 3, 2, (1, 2), trials=10)
    assert [s.q for s in sums] == [1, 2]
    for summ in sums:
        assert summ.all_exact and summ.universal and len(summ.reports) == 4
    rec = json.loads(reports_json(sums[0].reports))
    assert set(rec[0]) == {"nodes", "q", "s", "trials", "min_ratio", "max_ratio", "exact"}


def test_universality_sweep_reports_exactness_failure(F12):
    (summ,) = universality_sweep(F12.nodes, F12.weights, 4, 2, (2,), trials=3)
    assert not summ.all_exact and not summ.universal
    skipped = [r for r in summ.reports if not r.exactness_verified]
    assert len(skipped) == 4 and all(r.trials == 0 for r in skipped)
    assert json.loads(json.dumps(summ.to_record(), allow_nan=False))


def test_universality_waived_r4(F12):
    (summ,) = universality_sweep(F12.nodes, F12.weights, 4, 2, (math.inf,), trials=10,
                                 waive=True)
    assert len(summ.reports) == 5 and summ.min_ratio > 0


def test_kernel_reproduction(F12):
    rng = np.random.default_rng(8)
    for s in [(2, 1), (0, 3)]:
        p = rectangle_poly(s, rng)
        x = rng.uniform(0, 2 * math.pi, size=(25, 2))
        rep = kernel_reproduction(F12.nodes, F12.weights, p, x)
        assert np.max(np.abs(rep - trig_eval(p, x))) <= 1e-8


def test_discrete_norm():
    v = np.array([1.0, -2.0, 2j])
    w = np.array([0.5, 0.25, 0.25])
    assert discrete_norm(v, w, 2) == pytest.approx(math.sqrt(0.5 + 1 + 1))
    assert discrete_norm(v, w, math.inf) == 2.0


def test_rectangle_poly_support():
    p = rectangle_poly((2, 0), np.random.default_rng(0))
    assert isinstance(p, TrigPoly)
    assert len(p.coefs) == 7 and np.all(np.abs(p.freqs[:, 0]) <= 3) and np.all(p.freqs[:, 1] == 0)


def test_frolov_linf_route():
    rule = frolov_rule(frolov_matrix(2), 8)
    out = linf_offset_search(rule.nodes, r_max=4, trials=10)
    assert out["m"] == len(rule.nodes)
    assert out["r_max"] == 4
    assert all(row["min_ratio"] >= 1 / 9 for row in out["levels"])
