"""Marcinkiewicz-type discretization checks on the torus.

Nodes are points of ``[0, 1)^d`` mapped to angles ``2 pi x``. A weighted node
set discretizes ``T(R(s))`` in ``L_q`` when the discrete norm
``(sum_nu w_nu |f(xi^nu)|^q)^{1/q}`` is within constant factors of ``||f||_q``
for every polynomial with frequencies in the rectangle ``|k_j| < 2^{s_j}``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._errors import BudgetExceeded
from .cubature import estimate_gamma, phi_weight
from .geometry import PointSet, enumerate_frequency_set, fibonacci_number
from .hatfun import compositions
from .kernels import TrigPoly, product_kernel, trig_eval, trig_norm

EXACTNESS_BUDGET = 10**6
RATIO_TOL = 0.05


def _node_id(nodes: PointSet) -> str:
    return nodes.tag


def _fibonacci_index(nodes: PointSet, weights) -> int | None:
    """``n`` when the nodes are ``F_n`` with equal weights, else ``None``."""
    if nodes.meta.get("family") != "fibonacci":
        return None
    w = np.asarray(weights, float)
    if not np.allclose(w, 1.0 / len(nodes), rtol=1e-14, atol=0):
        return None
    return int(nodes.meta["n"])


@dataclass(frozen=True)
class ExactnessResult:
    ok: bool
    N: tuple
    failing: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def exactness_check(nodes: PointSet, weights, N) -> ExactnessResult:
    """Does the rule integrate every ``e^{i<k,x>}`` with ``|k_j| <= 3 N_j`` exactly?

    For equally weighted Fibonacci nodes the test is the integer congruence;
    otherwise the weighted exponential sums are compared with ``[k = 0]`` to
    ``1e-9``. The first failing ``k`` in lexicographic order is returned.
    """
    N = tuple(int(v) for v in np.atleast_1d(N))
    d = nodes.d
    if len(N) != d:
        raise ValueError("N has the wrong dimension")
    win = [3 * v for v in N]
    if math.prod(2 * v + 1 for v in win) > EXACTNESS_BUDGET:
        raise BudgetExceeded("T(3N) exceeds the exactness budget")
    axes = [np.arange(-v, v + 1) for v in win]
    K = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    n = _fibonacci_index(nodes, weights)
    if n is not None:
        bad = (phi_weight(n, K) == 1) & np.any(K != 0, axis=1)
    else:
        w = np.asarray(weights, float)
        ang = 2 * np.pi * nodes.points
        # separable sums: prod_j e^{i k_j x_j}, contracted one axis at a time
        S = w.astype(complex)[:, None]
        for j in range(d):
            E = np.exp(1j * np.outer(ang[:, j], axes[j]))
            S = (S[:, :, None] * E[:, None, :]).reshape(len(w), -1)
        vals = S.sum(axis=0)
        target = np.all(K == 0, axis=1).astype(float)
        bad = np.abs(vals - target) > 1e-9
    if np.any(bad):
        return ExactnessResult(False, N, tuple(int(v) for v in K[np.argmax(bad)]))
    return ExactnessResult(True, N)


def rectangle_poly(s, rng) -> TrigPoly:
    """Random ``f in T(R(s))`` with i.i.d. standard complex Gaussian coefficients."""
    K = enumerate_frequency_set("rectangle", s=s).vectors
    c = (rng.standard_normal(len(K)) + 1j * rng.standard_normal(len(K))) / math.sqrt(2)
    N = np.array([2**int(v) - 1 for v in s])
    return TrigPoly(K, c, N)


def discrete_norm(values, weights, q: float) -> float:
    a = np.abs(values)
    if math.isinf(q):
        return float(a.max())
    return float(np.sum(np.asarray(weights) * a**q) ** (1.0 / q))


@dataclass
class DiscretizationReport:
    q: float
    s: tuple
    nodes: str
    trials: int
    min_ratio: float
    max_ratio: float
    exactness_verified: bool
    waived: bool = False
    bounds_ok: bool = True
    failing_k: tuple | None = None

    def to_record(self) -> dict:
        return {"nodes": self.nodes, "q": _q_label(self.q), "s": list(self.s),
                "trials": self.trials, "min_ratio": _finite(self.min_ratio),
                "max_ratio": _finite(self.max_ratio), "exact": self.exactness_verified}


def _finite(x):
    return x if math.isfinite(x) else None


def _q_label(q):
    return "inf" if math.isinf(q) else q


def ratio_window(d: int, tol: float = RATIO_TOL) -> tuple[float, float]:
    return 3.0**-d * (1 - tol), 3.0**d * (1 + tol)


def marcinkiewicz_ratios(nodes: PointSet, weights, s, q: float, trials: int = 200,
                         seed: int = 0, waive: bool = False,
                         grid_res: int | None = None) -> DiscretizationReport:
    """Ratios ``discrete norm / ||f||_q`` over random ``f in T(R(s))``.

    Requires exactness on ``T(3N)``, ``N_j = 2^{s_j}``, unless ``waive`` is
    set. ``q = inf`` uses the node maximum (weights play no role) against the
    grid sup polished from the top grid cells and the best node.
    """
    s = tuple(int(v) for v in s)
    N = [2**v for v in s]
    ex = exactness_check(nodes, weights, N)
    if not ex and not waive:
        raise ValueError(f"exactness on T(3N) fails at k={ex.failing}; pass waive=True")
    rng = np.random.default_rng([seed, *s, 0 if math.isinf(q) else int(q * 1000)])
    ang = 2 * np.pi * nodes.points
    w = np.asarray(weights, float)
    ratios = np.empty(trials)
    for t in range(trials):
        p = rectangle_poly(s, rng)
        vals = trig_eval(p, ang)
        start = ang[np.argmax(np.abs(vals))] if math.isinf(q) else None
        ratios[t] = discrete_norm(vals, w, q) / trig_norm(p, q, grid_res, starts=start)
    lo, hi = ratio_window(nodes.d)
    mn, mx = float(ratios.min()), float(ratios.max())
    return DiscretizationReport(q, s, _node_id(nodes), trials, mn, mx, ex.ok,
                               waived=waive and not ex.ok,
                               bounds_ok=bool(lo <= mn and mx <= hi),
                               failing_k=ex.failing)


def admissible_r(n: int, gamma=None) -> int:
    """Largest ``r`` with ``3 * 2^r <= gamma b_n`` (``gamma`` defaults to ``gamma_n``)."""
    g = estimate_gamma(n) if gamma is None else gamma
    bound = g * fibonacci_number(n)
    r = -1
    while 3 * 2 ** (r + 1) <= bound:
        r += 1
    return r


@dataclass
class SweepSummary:
    r_total: int
    q: float
    reports: list = field(default_factory=list)
    min_ratio: float = math.inf
    max_ratio: float = -math.inf
    all_exact: bool = True
    universal: bool = True

    def to_record(self) -> dict:
        return {"r_total": self.r_total, "q": _q_label(self.q),
                "min_ratio": _finite(self.min_ratio), "max_ratio": _finite(self.max_ratio),
                "all_exact": self.all_exact, "universal": self.universal,
                "reports": [r.to_record() for r in self.reports]}


def universality_sweep(nodes: PointSet, weights, r_total: int, d: int = 2,
                       q_list=(1, 2, math.inf), trials: int = 200, seed: int = 0,
                       waive: bool = False, grid_res: int | None = None) -> list[SweepSummary]:
    """One node set against every rectangle ``R(s)``, ``||s||_1 = r_total``.

    Rectangles failing exactness are skipped (and mark ``all_exact`` false)
    unless ``waive`` is set. ``universal`` means every evaluated rectangle
    stayed inside the ``3^{+-d}`` window.
    """
    if d != nodes.d:
        raise ValueError("node dimension mismatch")
    out = []
    for q in q_list:
        summ = SweepSummary(r_total, q)
        for s in compositions(r_total, d):
            s = tuple(int(v) for v in s)
            ex = exactness_check(nodes, weights, [2**v for v in s])
            if not ex:
                summ.all_exact = False
                if not waive:
                    summ.reports.append(DiscretizationReport(
                        q, s, _node_id(nodes), 0, math.nan, math.nan, False,
                        bounds_ok=False, failing_k=ex.failing))
                    summ.universal = False
                    continue
            rep = marcinkiewicz_ratios(nodes, weights, s, q, trials, seed, waive, grid_res)
            summ.reports.append(rep)
            summ.min_ratio = min(summ.min_ratio, rep.min_ratio)
            summ.max_ratio = max(summ.max_ratio, rep.max_ratio)
            summ.universal &= rep.bounds_ok
        out.append(summ)
    return out


def linf_offset_search(nodes: PointSet, r_max: int, trials: int = 50, seed: int = 0,
                       floor: float | None = None, grid_res: int | None = None) -> dict:
    """Largest ``r`` whose whole collection keeps the ``L_inf`` ratio above ``floor``.

    Exactness is not required (the route is dispersion based). Reports the
    offset ``r - log2(m)`` with ``m`` the number of nodes.
    """
    d = nodes.d
    floor = 3.0**-d if floor is None else floor
    w = np.full(len(nodes), 1.0 / len(nodes))
    best, rows = None, []
    for r in range(0, r_max + 1):
        worst = math.inf
        for s in compositions(r, d):
            rep = marcinkiewicz_ratios(nodes, w, s, math.inf, trials, seed,
                                       waive=True, grid_res=grid_res)
            worst = min(worst, rep.min_ratio)
        rows.append({"r": r, "min_ratio": worst})
        if worst >= floor:
            best = r
        else:
            break
    off = None if best is None else best - math.log2(len(nodes))
    return {"nodes": _node_id(nodes), "m": len(nodes), "floor": floor,
            "r_max": best, "offset": off, "levels": rows}


def kernel_reproduction(nodes: PointSet, weights, p: TrigPoly, x) -> np.ndarray:
    """``sum_nu w_nu f(xi^nu) V_N(x - xi^nu)`` with ``N`` the degree bound of ``p``.

    Equals ``f(x)`` whenever the rule is exact on ``T(3N)``.
    """
    ang = 2 * np.pi * nodes.points
    vals = trig_eval(p, ang) * np.asarray(weights, float)
    x = np.atleast_2d(np.asarray(x, float))
    N = np.maximum(p.N, 1)
    K = product_kernel("vpoussin", N, x[:, None, :] - ang[None, :, :])
    return K @ vals


def reports_json(objs) -> str:
    return json.dumps([o.to_record() for o in objs], indent=2, sort_keys=True)
