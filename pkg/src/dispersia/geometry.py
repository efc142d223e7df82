"""Point sets in the unit cube and integer / dual-lattice frequency sets.

Fibonacci sets are built with exact integer arithmetic; Frolov sets come
from the Vandermonde matrix of the roots of ``prod_j (x - (2j - 1)) - 1``,
whose norm form is a nonzero integer off the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._errors import BudgetExceeded

MAX_FIBONACCI_INDEX = 90
ENUMERATION_BUDGET = 10**9
FREQUENCY_BUDGET = 10**8
PREFIX_BUDGET = 5 * 10**7


# ---------------------------------------------------------------------------
# point sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PointSet:
    """Finite set of points in ``[0, 1)^d``.

    ``points`` has shape ``(N, d)``. ``tag`` records how the set was made
    (``fibonacci(n)``, ``frolov(d,a)`` or ``explicit``) and ``meta`` keeps
    the generating parameters in machine-readable form.
    """

    points: np.ndarray
    tag: str = "explicit"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-d array of shape (N, d)")
        if pts.size and (np.any(pts < 0.0) or np.any(pts >= 1.0)):
            raise ValueError("every coordinate must lie in [0, 1)")
        if len(pts) > 1 and len(np.unique(pts, axis=0)) != len(pts):
            raise ValueError("points must be pairwise distinct")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def empty(cls, d: int) -> "PointSet":
        return cls(np.empty((0, d)))

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def to_text(self) -> str:
        lines = [f"d={self.d} n={len(self)} tag={self.tag}"]
        lines += [" ".join(f"{c:.17g}" for c in p) for p in self.points]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PointSet":
        rows = [ln for ln in text.splitlines() if ln.strip()]
        header = dict(tok.split("=", 1) for tok in rows[0].split())
        d, n = int(header["d"]), int(header["n"])
        pts = np.array([[float(c) for c in ln.split()] for ln in rows[1:]],
                       dtype=float).reshape(-1, d)
        if len(pts) != n:
            raise ValueError(f"header announces {n} points, found {len(pts)}")
        return cls(pts, tag=header.get("tag", "explicit"))


def fibonacci_number(n: int) -> int:
    """Fibonacci number with ``b_0 = b_1 = 1``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > MAX_FIBONACCI_INDEX:
        raise OverflowError(f"b_{n} does not fit a signed 64-bit integer")
    a, b = 1, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def fibonacci_set(n: int) -> PointSet:
    """The ``b_n`` points ``(mu/b_n, {mu b_{n-1}/b_n})``, ``mu = 1..b_n``.

    Coordinates are reduced modulo ``b_n`` in integers and divided once, so
    the point for ``mu = b_n`` is the origin.
    """
    if n < 2:
        raise ValueError("fibonacci_set needs n >= 2")
    bn, bn1 = fibonacci_number(n), fibonacci_number(n - 1)
    mu = np.arange(1, bn + 1, dtype=np.int64)
    num = np.column_stack([mu % bn, (mu * bn1) % bn])
    return PointSet(num / bn, tag=f"fibonacci({n})",
                    meta={"family": "fibonacci", "n": n, "b_n": bn,
                          "numerators": num})


# ---------------------------------------------------------------------------
# Frolov lattice
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FrolovLattice:
    """Generator matrix ``A`` (rows ``L_j``) with cached inverse data."""

    d: int
    A: np.ndarray
    Ainv_T: np.ndarray
    detA: float
    roots: np.ndarray
    a: float | None = None

    def norm_form(self, m) -> np.ndarray:
        """``prod_j L_j(m)`` for integer vectors ``m`` of shape ``(..., d)``."""
        m = np.asarray(m, dtype=float)
        return np.prod(m @ self.A.T, axis=-1)

    def with_dilation(self, a: float) -> "FrolovLattice":
        return FrolovLattice(self.d, self.A, self.Ainv_T, self.detA,
                             self.roots, float(a))


def frolov_polynomial(d: int) -> list[int]:
    """Integer coefficients (highest degree first) of prod(x-(2j-1)) - 1."""
    coeffs = [1]
    for j in range(1, d + 1):
        c = -(2 * j - 1)
        coeffs = [x + c * y for x, y in zip(coeffs + [0], [0] + coeffs)]
    coeffs[-1] -= 1
    return coeffs


def frolov_matrix(d: int, tol: float = 1e-13) -> FrolovLattice:
    """Vandermonde matrix of the ``d`` real roots of the Frolov polynomial.

    ``tol`` bounds the residual ``|P(xi)|`` relative to ``sum_k |c_k||xi|^k``
    (the rounding scale of evaluating ``P`` in double precision).
    """
    if not 2 <= d <= 5:
        raise ValueError("frolov_matrix supports 2 <= d <= 5")
    coeffs = frolov_polynomial(d)
    p = np.array(coeffs, dtype=float)
    dp = np.polyder(p)
    roots = np.roots(p)
    if np.max(np.abs(roots.imag)) > 1e-6:
        raise ArithmeticError("Frolov polynomial has non-real roots")
    roots = np.sort(roots.real)
    for _ in range(6):
        roots = roots - np.polyval(p, roots) / np.polyval(dp, roots)
    scale = np.polyval(np.abs(p), np.abs(roots))
    resid = np.abs(np.polyval(p, roots)) / scale
    if np.max(resid) > tol:
        raise ArithmeticError(f"root refinement failed, residual {resid.max():.3g}")
    A = np.vander(roots, d, increasing=True)
    det = math.prod(roots[j] - roots[i] for i in range(d) for j in range(i + 1, d))
    Ainv_T = np.linalg.inv(A).T
    return FrolovLattice(d, A, Ainv_T, float(det), roots)


def _lattice_candidates(B: np.ndarray, lo, hi, pad: int = 1,
                        budget: int = ENUMERATION_BUDGET,
                        box_check: bool = True) -> np.ndarray:
    """Integer ``m`` with ``lo <= B m <= hi`` (a superset, ``pad`` wide).

    The first ``d - 1`` coordinates range over the bounding box of the
    preimage; the last one over the interval cut out by all ``d``
    constraints. Callers apply their exact membership predicate. With
    ``box_check`` the whole padded box must fit the budget; otherwise only
    the candidates actually generated count against it.
    """
    B = np.asarray(B, dtype=float)
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    d = B.shape[0]
    Binv = np.linalg.inv(B)
    mlo = np.sum(np.minimum(Binv * lo, Binv * hi), axis=1)
    mhi = np.sum(np.maximum(Binv * lo, Binv * hi), axis=1)
    mlo = np.floor(mlo).astype(np.int64) - pad
    mhi = np.ceil(mhi).astype(np.int64) + pad
    spans = (mhi - mlo + 1).astype(float)
    if (box_check and np.prod(spans) > budget) or np.prod(spans[:-1]) > PREFIX_BUDGET:
        raise BudgetExceeded(
            f"padded lattice box holds {np.prod(spans):.3g} candidates")
    if d == 1:
        return np.arange(mlo[0], mhi[0] + 1, dtype=np.int64)[:, None]

    axes = [np.arange(mlo[k], mhi[k] + 1, dtype=np.int64) for k in range(d - 1)]
    prefix = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d - 1)
    partial = prefix @ B[:, :-1].T
    last = B[:, -1]
    with np.errstate(divide="ignore"):
        t1 = (lo - partial) / last
        t2 = (hi - partial) / last
    tl = np.max(np.minimum(t1, t2), axis=1)
    th = np.min(np.maximum(t1, t2), axis=1)
    start = np.floor(tl).astype(np.int64) - pad
    stop = np.ceil(th).astype(np.int64) + pad
    counts = np.clip(stop - start + 1, 0, None)
    total = int(counts.sum())
    if total > budget:
        raise BudgetExceeded(f"lattice enumeration needs {total} candidates")
    rows = np.repeat(np.arange(len(prefix)), counts)
    offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    return np.column_stack([prefix[rows], start[rows] + offs])


def _lex_sorted(arr: np.ndarray) -> np.ndarray:
    if len(arr) == 0:
        return arr
    return arr[np.lexsort(arr.T[::-1])]


def frolov_set(lat: FrolovLattice, a: float, pad: int = 1) -> PointSet:
    """Points ``(A^{-1})^T m / a`` lying in ``[0, 1)^d``.

    Points with a coordinate exactly 1 are excluded (half-open cube).
    """
    if a <= 1:
        raise ValueError("dilation a must exceed 1")
    if a > 50:
        raise BudgetExceeded("frolov_set supports a <= 50")
    B = lat.Ainv_T / a
    m = _lattice_candidates(B, np.zeros(lat.d), np.ones(lat.d), pad=pad)
    z = m @ B.T
    keep = np.all((z >= 0.0) & (z < 1.0), axis=1)
    m, z = m[keep], z[keep]
    order = np.lexsort(z.T[::-1])
    return PointSet(z[order], tag=f"frolov({lat.d},{a:g})",
                    meta={"family": "frolov", "d": lat.d, "a": float(a),
                          "m": m[order], "weight": 1.0 / (a**lat.d * lat.detA)})


# ---------------------------------------------------------------------------
# frequency sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FrequencySet:
    """Frequency vectors of one shape, sorted lexicographically.

    ``vectors`` is integer for hyperbolic crosses, rectangles, dyadic shells
    and ``L(n)``; for dual-lattice shells it holds the real points ``aAm``
    and ``preimages`` the integer ``m``.
    """

    d: int
    vectors: np.ndarray
    shape: str
    preimages: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.vectors)

    def to_text(self) -> str:
        if self.vectors.dtype.kind == "f":
            rows = (" ".join(f"{c:.17g}" for c in v) for v in self.vectors)
        else:
            rows = (" ".join(str(int(c)) for c in v) for v in self.vectors)
        return "\n".join(rows) + ("\n" if len(self) else "")


@lru_cache(maxsize=None)
def _hyperbolic_count(N: int, d: int) -> int:
    if d == 1:
        return 2 * N + 1
    total = _hyperbolic_count(N, d - 1)
    for t in range(1, N + 1):
        total += 2 * _hyperbolic_count(N // t, d - 1)
    return total


def _hyperbolic(N: int, d: int, cache: dict) -> np.ndarray:
    key = (N, d)
    if key in cache:
        return cache[key]
    if d == 1:
        out = np.arange(-N, N + 1, dtype=np.int64)[:, None]
    else:
        parts = []
        for t in range(0, N + 1):
            sub = _hyperbolic(N // max(t, 1), d - 1, cache)
            for k in ((0,) if t == 0 else (t, -t)):
                parts.append(np.column_stack([np.full(len(sub), k, np.int64), sub]))
        out = np.concatenate(parts)
    cache[key] = out
    return out


def hyperbolic_cross(N: int, d: int = 2) -> np.ndarray:
    """Integer vectors with ``prod_j max(|k_j|, 1) <= N``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if _hyperbolic_count(N, d) > FREQUENCY_BUDGET:
        raise BudgetExceeded(f"|Gamma({N})| exceeds {FREQUENCY_BUDGET}")
    return _lex_sorted(_hyperbolic(N, d, {}))


def _product_grid(ranges) -> np.ndarray:
    grids = np.meshgrid(*ranges, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1).astype(np.int64)


def _shell_values(s: int) -> np.ndarray:
    if s == 0:
        return np.array([0], dtype=np.int64)
    pos = np.arange(2 ** (s - 1), 2**s, dtype=np.int64)
    return np.sort(np.concatenate([-pos, pos]))


def enumerate_frequency_set(shape: str, d: int = 2, *, N: int | None = None,
                            s=None, n: int | None = None, window: int | None = None,
                            include_zero: bool = False) -> FrequencySet:
    """Exact enumeration of a frequency set.

    ``shape`` is one of ``hyperbolic`` (needs ``N``), ``rectangle`` and
    ``shell`` (need the dyadic exponents ``s``), or ``lattice_L`` (needs
    ``n`` and the search ``window`` ``|k_j| <= window``; only ``d = 2``).
    """
    if shape == "hyperbolic":
        vecs = hyperbolic_cross(N, d)
        tag = f"hyperbolic({N})"
    elif shape in ("rectangle", "shell"):
        s = tuple(int(x) for x in s)
        d = len(s)
        if shape == "rectangle":
            ranges = [np.arange(-(2**sj) + 1, 2**sj, dtype=np.int64) for sj in s]
        else:
            ranges = [_shell_values(sj) for sj in s]
        if math.prod(len(r) for r in ranges) > FREQUENCY_BUDGET:
            raise BudgetExceeded(f"{shape}{s} exceeds {FREQUENCY_BUDGET} vectors")
        vecs = _product_grid(ranges)
        tag = f"{shape}{s}"
    elif shape == "lattice_L":
        if window is None:
            raise ValueError("lattice_L needs a search window")
        vecs = dual_fibonacci_lattice(n, window, include_zero=include_zero)
        d = 2
        tag = f"lattice_L({n})"
    else:
        raise ValueError(f"unknown frequency shape {shape!r}")
    return FrequencySet(d, _lex_sorted(vecs), tag)


def dual_fibonacci_lattice(n: int, window: int, include_zero: bool = False) -> np.ndarray:
    """``k`` with ``|k_j| <= window`` and ``k_1 + b_{n-1} k_2 = 0 (mod b_n)``."""
    bn, bn1 = fibonacci_number(n), fibonacci_number(n - 1)
    if (2 * window + 1) * (2 * window // bn + 2) > FREQUENCY_BUDGET:
        raise BudgetExceeded("lattice_L window too large")
    k2 = np.arange(-window, window + 1, dtype=np.int64)
    r = (-bn1 * k2) % bn
    # k1 = r + j*b_n for every j keeping |k1| <= window
    jlo = -((window + r) // bn)
    jhi = (window - r) // bn
    counts = np.clip(jhi - jlo + 1, 0, None)
    rows = np.repeat(np.arange(len(k2)), counts)
    offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    k1 = r[rows] + (jlo[rows] + offs) * bn
    vecs = np.column_stack([k1, k2[rows]])
    if not include_zero:
        vecs = vecs[np.any(vecs != 0, axis=1)]
    return _lex_sorted(vecs)


def in_dyadic_shell(y: np.ndarray, s) -> np.ndarray:
    """Membership of real vectors in ``{[2^{s_j-1}] <= |y_j| < 2^{s_j}}``."""
    s = np.asarray(s, dtype=np.int64)
    lower = np.where(s >= 1, np.ldexp(1.0, s - 1), 0.0)
    upper = np.ldexp(1.0, s)
    ay = np.abs(y)
    return np.all((ay >= lower) & (ay < upper), axis=-1)


def dual_lattice_in_shell(lat: FrolovLattice, a: float, s,
                          include_zero: bool = True) -> FrequencySet:
    """Dual-lattice points ``aAm`` falling in the dyadic shell ``rho(s)``."""
    s = tuple(int(x) for x in s)
    if len(s) != lat.d:
        raise ValueError("shell exponent vector has the wrong dimension")
    if sum(s) > 40:
        raise BudgetExceeded("dual_lattice_in_shell supports ||s||_1 <= 40")
    B = a * lat.A
    bound = np.ldexp(1.0, np.array(s))
    m = _lattice_candidates(B, -bound, bound, box_check=False)
    y = m @ B.T
    keep = in_dyadic_shell(y, s)
    if not include_zero:
        keep &= np.any(m != 0, axis=1)
    m, y = m[keep], y[keep]
    order = np.lexsort(m.T[::-1])
    return FrequencySet(lat.d, y[order], f"dual_shell{s}", preimages=m[order])
