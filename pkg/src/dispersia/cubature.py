"""Fibonacci and Frolov cubature, the lattice indicator and the Frolov error series.

Two harmonic conventions coexist here. Fibonacci work lives on the
``2 pi``-torus: integrands are functions of angles ``y = 2 pi x`` and
exponentials are ``exp(i <k, y>)``. Frolov work uses the line transform
``f^(y) = int f(x) exp(-2 pi i <y, x>) dx``. Point sets themselves always
stay in ``[0, 1)^d``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._errors import BudgetExceeded
from .geometry import (FrolovLattice, PointSet, dual_fibonacci_lattice,
                       dual_lattice_in_shell, fibonacci_number, fibonacci_set,
                       frolov_set)
from .hatfun import HatSpec, compositions, eval_hat_box, hat_box_fourier

TAIL_EXTRA_SHELLS = 200


@dataclass(frozen=True, eq=False)
class CubatureRule:
    nodes: PointSet
    weights: np.ndarray
    convention: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.weights, float)
        if w.shape != (len(self.nodes),):
            raise ValueError("one weight per node is required")
        if np.any(w <= 0):
            raise ValueError("cubature weights must be positive")
        if self.convention not in ("periodic_2pi", "line"):
            raise ValueError(f"unknown convention {self.convention!r}")
        object.__setattr__(self, "weights", w)

    def apply(self, values) -> complex | float:
        """Weighted sum of precomputed node values (numpy pairwise summation)."""
        total = np.sum(self.weights * np.asarray(values))
        return complex(total) if np.iscomplexobj(total) else float(total)


def fibonacci_rule(n: int) -> CubatureRule:
    T = fibonacci_set(n)
    bn = T.meta["b_n"]
    return CubatureRule(T, np.full(bn, 1.0 / bn), "periodic_2pi",
                        {"weight": Fraction(1, bn)})


def frolov_rule(lat: FrolovLattice, a: float) -> CubatureRule:
    T = frolov_set(lat, a)
    w = T.meta["weight"]
    return CubatureRule(T, np.full(len(T), w), "line", {"weight": w})


def _as_scalar(x):
    return complex(x) if np.iscomplexobj(x) else float(x)


def fibonacci_cubature(n: int, f):
    """``b_n^{-1} sum_mu f(y^mu)`` with angular nodes ``y^mu = 2 pi x^mu``.

    ``f`` is called once on the ``(b_n, 2)`` array of nodes and must return
    the ``b_n`` values.
    """
    Y = 2 * math.pi * fibonacci_set(n).points
    vals = np.asarray(f(Y))
    return _as_scalar(np.sum(vals) / len(Y))


def exponential(k):
    """``y -> exp(i <k, y>)`` for use with ``fibonacci_cubature``."""
    k = np.asarray(k, float)
    return lambda Y: np.exp(1j * (Y @ k))


def phi_weight(n: int, k):
    """``1`` if ``k_1 + b_{n-1} k_2 = 0 (mod b_n)`` else ``0`` (exact integers).

    Accepts one 2-vector or an array of shape ``(..., 2)``.
    """
    bn, bn1 = fibonacci_number(n), fibonacci_number(n - 1)
    k = np.asarray(k)
    if k.dtype.kind not in "iu":
        if not np.all(k == np.round(k)):
            raise ValueError("phi_weight needs integer frequencies")
        k = k.astype(np.int64)
    # reduce first so the products cannot overflow
    res = ((k[..., 0] % bn) + (bn1 * (k[..., 1] % bn)) % bn) % bn
    out = (res == 0).astype(np.int64)
    return int(out) if out.ndim == 0 else out


def hyperbolic_product(k) -> np.ndarray:
    return np.prod(np.maximum(np.abs(np.asarray(k)), 1), axis=-1)


def estimate_gamma(n: int, search_bound: int | None = None) -> Fraction:
    """``min_{k in L(n)\\{0}} prod_j max(|k_j|, 1) / b_n``, certified.

    The search covers ``|k_j| <= search_bound``; with ``search_bound >= b_n``
    the window minimum is global, since ``(b_n, 0)`` lies in ``L(n)`` and any
    vector leaving the window already has product above ``b_n``.
    """
    bn = fibonacci_number(n)
    if search_bound is None:
        search_bound = bn
    if search_bound < bn:
        raise ValueError(f"search_bound must be >= b_n = {bn} for a certified minimum")
    K = dual_fibonacci_lattice(n, int(search_bound))
    return Fraction(int(hyperbolic_product(K).min()), bn)


def gamma_minimizers(n: int) -> np.ndarray:
    bn = fibonacci_number(n)
    K = dual_fibonacci_lattice(n, bn)
    p = hyperbolic_product(K)
    return K[p == p.min()]


# ---------------------------------------------------------------------------
# Frolov
# ---------------------------------------------------------------------------

def frolov_cubature(lat: FrolovLattice, a: float, f, points: PointSet | None = None):
    """``(a^d |det A|)^{-1} sum f(z)`` over the Frolov points in the cube.

    ``f`` maps an ``(N, d)`` array to ``N`` values and must vanish outside
    ``[0, 1]^d``. A precomputed ``frolov_set`` may be passed as ``points``.
    """
    T = frolov_set(lat, a) if points is None else points
    w = 1.0 / (a**lat.d * lat.detA)
    if len(T) == 0:
        return 0.0
    return _as_scalar(w * np.sum(np.asarray(f(T.points))))


def shell_count_bound(s, a: float, d: int):
    """Upper bound on the number of points ``aAm`` in the shell ``rho(s)``.

    Two distinct dual points differ by ``aAm'`` with ``|prod_j (aAm')_j| >= a^d``,
    so a half-open box of volume at most ``a^d`` holds at most one of them.
    Each orthant piece of the shell is cut into ``ceil(vol / a^d)`` such
    slabs. A shell whose sup of ``prod |y_j|`` is at most ``a^d`` holds no
    nonzero point. ``s`` may be one exponent vector or a stack of them.
    """
    s = np.asarray(s, dtype=np.int64)
    nz = np.count_nonzero(s, axis=-1)
    # s_j = 0 gives the interval (-1, 1); s_j >= 1 gives two pieces of length 2^{s_j-1}
    log_vol = (d - nz) + np.sum(np.where(s > 0, s - 1, 0), axis=-1)
    per_piece = np.ceil(np.exp2(log_vol.astype(float)) / a**d)
    out = per_piece * np.exp2(nz.astype(float))
    out = np.where(np.exp2(s.sum(axis=-1).astype(float)) <= a**d, 0.0, out)
    return int(out) if out.ndim == 0 else out


def shell_envelope(s, spec: HatSpec):
    """``sup |h^_B|`` on ``rho(s)`` via ``|h^(y)| <= min(u^r, (pi |y|)^{-r})``."""
    s = np.asarray(s, dtype=np.int64)
    r, u = spec.r, spec.u
    low = np.where(s > 0, np.exp2((s - 1).astype(float)), 1.0)
    decay = np.where(s > 0, (math.pi * low) ** (-float(r)), np.inf)
    out = np.prod(np.minimum(u**r, decay), axis=-1)
    return float(out) if out.ndim == 0 else out


def frolov_tail_bound(spec: HatSpec, a: float, d: int, v_max: int,
                      extra: int = TAIL_EXTRA_SHELLS) -> float:
    """Bound on ``sum |h^_B(aAm)|`` over shells with ``||s||_1 > v_max``.

    Summation stops ``extra`` levels beyond ``v_max``; for ``r >= 2`` the
    neglected levels decay like ``2^{-(r-1) v}`` and fall below double
    precision long before that.
    """
    total = []
    for v in range(v_max + 1, v_max + extra + 1):
        S = compositions(v, d)
        total.append(math.fsum(shell_count_bound(S, a, d) * shell_envelope(S, spec)))
    return math.fsum(total)


_DUAL_CACHE: dict = {}


def dual_points_upto(lat: FrolovLattice, a: float, v_max: int) -> np.ndarray:
    """All nonzero ``aAm`` in shells with ``||s||_1 <= v_max`` (cached)."""
    key = (lat.A.tobytes(), float(a), int(v_max))
    if key not in _DUAL_CACHE:
        parts = [np.zeros((0, lat.d))]
        for v in range(first_active_level(a, lat.d), v_max + 1):
            for s in compositions(v, lat.d):
                parts.append(dual_lattice_in_shell(lat, a, s, include_zero=False).vectors)
        if len(_DUAL_CACHE) > 16:
            _DUAL_CACHE.clear()
        arr = np.concatenate(parts)
        arr.setflags(write=False)
        _DUAL_CACHE[key] = arr
    return _DUAL_CACHE[key]


def first_active_level(a: float, d: int) -> int:
    """Smallest ``v`` with ``2^v >= a^d``; lower shells hold no dual point."""
    return max(0, math.ceil(d * math.log2(a) - 1e-12))


@dataclass(frozen=True)
class ErrorSeriesReport:
    a: float
    r: int
    u: tuple
    x0: tuple
    direct_error: float
    series_sum: float
    tail_bound: float
    v_max: int
    n_terms: int
    imag_part: float

    @property
    def residual(self) -> float:
        return abs(self.direct_error - self.series_sum)

    @property
    def consistent(self) -> bool:
        return self.residual <= self.tail_bound

    def to_record(self) -> dict:
        return {"a": self.a, "r": self.r, "u": list(self.u), "x0": list(self.x0),
                "direct_error": self.direct_error, "series_sum": self.series_sum,
                "tail_bound": self.tail_bound, "v_max": self.v_max}


def frolov_error_series(lat: FrolovLattice, a: float, spec: HatSpec, v_max: int,
                        points: PointSet | None = None) -> ErrorSeriesReport:
    """Dual-lattice expansion of the Frolov cubature error of ``h^r_B``.

    The partial sum runs over nonzero ``aAm`` in shells ``||s||_1 <= v_max``
    and is compared with the direct error ``Phi(h) - pr(u)^r``.
    """
    d = lat.d
    if spec.d != d:
        raise ValueError("hat dimension does not match the lattice")
    if not spec.inside_cube():
        raise ValueError("hat box must lie inside the unit cube")
    if spec.r < 2:
        raise ValueError("the error series needs r >= 2 for absolute convergence")
    if not 0 <= v_max <= 40:
        raise BudgetExceeded("v_max must lie in 0..40")

    Y = dual_points_upto(lat, a, v_max)
    series = complex(np.sum(hat_box_fourier(spec, Y))) if len(Y) else 0j

    phi = frolov_cubature(lat, a, lambda X: eval_hat_box(spec, X), points)
    direct = float(np.real(phi)) - spec.integral
    return ErrorSeriesReport(float(a), spec.r, tuple(spec.u.tolist()),
                             tuple(spec.x0.tolist()), direct, series.real,
                             frolov_tail_bound(spec, a, d, v_max), v_max,
                             len(Y), abs(series.imag))


def random_hat_boxes(d: int, r: int, count: int, seed: int = 0,
                     min_side: float = 0.05) -> list[HatSpec]:
    """Random hat boxes inside the unit cube (corners uniform, sides >= ``min_side``)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        c = np.sort(rng.random((d, 2)), axis=1)
        if np.all(c[:, 1] - c[:, 0] >= min_side):
            out.append(HatSpec.from_box(c[:, 0], c[:, 1], r))
    return out


def shell_counts(lat: FrolovLattice, a: float, v_max: int) -> list[dict]:
    """Observed nonzero dual points per shell next to ``2^v / a^d``.

    The ratio column is an empirical look at the shell-count constant.
    """
    d = lat.d
    rows = []
    for v in range(first_active_level(a, d), v_max + 1):
        for s in compositions(v, d):
            cnt = len(dual_lattice_in_shell(lat, a, s, include_zero=False))
            rows.append({"s": tuple(int(x) for x in s), "count": cnt,
                         "bound": shell_count_bound(s, a, d),
                         "ratio": cnt * a**d / 2.0**v})
    return rows


__all__ = [
    "CubatureRule", "ErrorSeriesReport", "dual_points_upto", "estimate_gamma", "exponential",
    "fibonacci_cubature", "fibonacci_rule", "first_active_level",
    "frolov_cubature", "frolov_error_series", "frolov_rule",
    "frolov_tail_bound", "gamma_minimizers", "hyperbolic_product",
    "phi_weight", "random_hat_boxes", "shell_count_bound", "shell_counts",
    "shell_envelope",
]
