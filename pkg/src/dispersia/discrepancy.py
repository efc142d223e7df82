"""Classical discrepancy and the smooth fixed-volume discrepancy of point sets.

``D^r(T, V)`` is the worst cubature error of the weighted node sum on the
hats ``h^r_B`` over boxes ``B`` of volume ``V``. The supremum has no closed
form; it is estimated from below by evaluating a deterministic family of
candidate boxes (grid centers, node centers, log-spaced aspect ratios and a
shrunken largest empty box).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ._errors import BudgetExceeded
from .dispersion import AxisBox, _family_instance, dispersion_exact
from .geometry import PointSet
from .hatfun import HatSpec, cardinal_bspline, eval_hat_box

D1_BUDGET = 500


# ---------------------------------------------------------------------------
# classical discrepancy
# ---------------------------------------------------------------------------

def classical_discrepancy_D1(T) -> float:
    """``sup_B |vol(B) - #(T in B)/m|`` over half-open boxes in the unit square.

    Both one-sided suprema are maxima over boxes with faces on point
    coordinates or the walls: volume minus the open-box count (faces pushed
    just past blocking points) and closed-box count minus volume (faces
    pulled just around captured points, degenerate boxes allowed).
    """
    P = T.points if isinstance(T, PointSet) else np.asarray(T, float).reshape(-1, 2)
    if P.shape[1] != 2:
        raise ValueError("exact D1 is implemented for d = 2")
    m = len(P)
    if m == 0:
        return 1.0
    if m > D1_BUDGET:
        raise BudgetExceeded(f"exact D1 supports at most {D1_BUDGET} points")

    P = P[np.argsort(P[:, 0], kind="stable")]
    xs = P[:, 0]
    X = np.unique(np.concatenate([[0.0, 1.0], xs]))
    U = np.unique(np.concatenate([[0.0, 1.0], P[:, 1]]))
    # C[i, k]: among the first i points in x order, how many have y == U[k]
    onehot = np.zeros((m + 1, len(U)))
    onehot[np.arange(1, m + 1), np.searchsorted(U, P[:, 1])] = 1.0
    C = np.cumsum(onehot, axis=0)
    lt = np.searchsorted(xs, X, side="left")    # points with x < X
    le = np.searchsorted(xs, X, side="right")   # points with x <= X

    best = 0.0
    for ia in range(len(X)):
        xa = X[ia]
        # open x-range (xa, xb), xb > xa
        w = X[ia + 1:] - xa
        if len(w):
            H = C[lt[ia + 1:]] - C[le[ia]]
            c_le = np.cumsum(H, axis=1)
            c_lt = c_le - H
            g = w[:, None] * U[None, :] - c_lt / m
            h = w[:, None] * U[None, :] - c_le / m
            hmin = np.minimum.accumulate(h, axis=1)
            best = max(best, float(np.max(g[:, 1:] - hmin[:, :-1])))
        # closed x-range [xa, xb], xb >= xa
        w = X[ia:] - xa
        H = C[le[ia:]] - C[lt[ia]]
        c_le = np.cumsum(H, axis=1)
        c_lt = c_le - H
        A = c_le / m - w[:, None] * U[None, :]
        B = w[:, None] * U[None, :] - c_lt / m
        best = max(best, float(np.max(A + np.maximum.accumulate(B, axis=1))))
    return best


# ---------------------------------------------------------------------------
# smooth fixed-volume discrepancy
# ---------------------------------------------------------------------------

@dataclass
class FixedVolumeQuery:
    """Search for ``D^r(T, V)``.

    ``grid`` centers per axis, ``aspects`` box shapes, node-centered boxes
    when ``node_centers`` is set, and the largest empty box (shrunk to
    volume ``V``) whenever it is big enough.
    """

    T: PointSet
    V: float
    r: int = 2
    weights: np.ndarray | None = None
    grid: int = 24
    aspects: int = 17
    node_centers: bool = True
    seed: int = 0
    empty_box: AxisBox | None = field(default=None, repr=False)

    def __post_init__(self):
        if not 0 < self.V <= 1:
            raise ValueError("target volume V must lie in (0, 1]")
        if self.weights is None:
            self.weights = default_weights(self.T)
        self.weights = np.asarray(self.weights, float)
        if self.weights.shape != (len(self.T),) or np.any(self.weights < 0):
            raise ValueError("need one nonnegative weight per node")
        if self.grid < 1 or self.aspects < 1:
            raise ValueError("grid and aspects must be positive")


def default_weights(T: PointSet) -> np.ndarray:
    fam = T.meta.get("family")
    if fam == "frolov":
        return np.full(len(T), T.meta["weight"])
    return np.full(len(T), 1.0 / max(len(T), 1))


def _shapes(V: float, d: int, count: int, seed: int) -> np.ndarray:
    """Side-length vectors with product ``V`` and every side at most 1."""
    if d == 1:
        return np.array([[V]])
    logV = math.log2(V)
    if d == 2:
        t = np.linspace(0.0, 1.0, count) if count > 1 else np.array([0.5])
        l1 = np.exp2(t * logV)
        return np.column_stack([l1, V / l1])
    rng = np.random.default_rng([seed, d, count])
    # uniform on the simplex of nonpositive log-sides summing to log2 V
    e = rng.exponential(size=(max(count - 1, 0), d))
    shares = e / e.sum(axis=1, keepdims=True)
    cube = np.full((1, d), 1.0 / d)
    return np.exp2(np.concatenate([cube, shares]) * logV)


def _centers(sides: np.ndarray, grid: int) -> np.ndarray:
    axes = []
    for l in sides:
        lo, hi = l / 2, 1.0 - l / 2
        axes.append(np.linspace(lo, hi, grid) if grid > 1 and hi > lo
                    else np.array([(lo + hi) / 2]))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=-1)


def box_errors(P: np.ndarray, w: np.ndarray, lo: np.ndarray, hi: np.ndarray,
               r: int) -> np.ndarray:
    """``|sum_mu w_mu h^r_B(x^mu) - pr(u)^r|`` for a batch of boxes ``(lo, hi)``."""
    u = (hi - lo) / r
    integral = np.prod(u, axis=1) ** r
    if len(P) == 0:
        return integral
    out = np.empty(len(lo))
    step = max(1, 2_000_000 // max(len(P) * P.shape[1], 1))
    for s in range(0, len(lo), step):
        L, Hh, Uu = lo[s:s + step, None, :], hi[s:s + step, None, :], u[s:s + step, None, :]
        X = P[None, :, :]
        if r == 1:
            sup = np.all((X >= L) & (X < Hh), axis=2)
        else:
            sup = np.all((X > L) & (X < Hh), axis=2)
        vals = np.prod(Uu ** (r - 1) * cardinal_bspline(r, (X - L) / Uu), axis=2)
        vals = np.where(sup, vals, 0.0)
        out[s:s + step] = np.abs(vals @ w - integral[s:s + step])
    return out


def _shrunk(box: AxisBox, V: float) -> tuple[np.ndarray, np.ndarray]:
    if V == box.volume:
        return box.lo, box.hi
    f = (V / box.volume) ** (1.0 / box.d)
    half = (box.hi - box.lo) * f / 2
    c = box.center
    return c - half, c + half


def smooth_discrepancy_fixed_volume(q: FixedVolumeQuery) -> tuple[float, HatSpec]:
    """Lower bound on ``D^r(T, V)`` and the box attaining it.

    Ties keep the first candidate in generation order (empty box, then shapes
    in order with grid centers before node centers).
    """
    T, V, r = q.T, q.V, q.r
    P, d = T.points, T.d
    los, his = [], []
    box = q.empty_box
    if box is None and len(T) and d <= 3:
        try:
            box = dispersion_exact(T).witness
        except BudgetExceeded:
            box = None
    if box is None and len(T) == 0:
        box = AxisBox(np.zeros(d), np.ones(d))
    if box is not None and V <= box.volume:
        lo, hi = _shrunk(box, V)
        los.append(lo[None, :])
        his.append(hi[None, :])
    for sides in _shapes(V, d, q.aspects, q.seed):
        C = _centers(sides, q.grid)
        if q.node_centers and len(P):
            C = np.concatenate([C, np.clip(P, sides / 2, 1.0 - sides / 2)])
        los.append(C - sides / 2)
        his.append(C + sides / 2)
    lo = np.clip(np.concatenate(los), 0.0, 1.0)
    hi = np.clip(np.concatenate(his), 0.0, 1.0)
    err = box_errors(P, q.weights, lo, hi, r)
    i = int(np.argmax(err))
    return float(err[i]), HatSpec.from_box(lo[i], hi[i], r)


def witness_error(T: PointSet, spec: HatSpec, weights=None) -> float:
    """Single-box error recomputed through ``eval_hat_box``."""
    w = default_weights(T) if weights is None else np.asarray(weights, float)
    s = float(np.dot(w, eval_hat_box(spec, T.points))) if len(T) else 0.0
    return abs(s - spec.integral)


@dataclass(frozen=True)
class ChainReport:
    V: float
    D2: float
    bound: float
    holds: bool
    witness_volume_identity: bool

    def to_record(self) -> dict:
        return {"V": self.V, "D2": self.D2, "bound": self.bound, "holds": self.holds,
                "witness_volume_identity": self.witness_volume_identity}


def dispersion_discrepancy_check(T: PointSet, r: int = 2, **search) -> ChainReport:
    """``disp(T) <= 2^d sqrt(D^2(T, disp(T)))`` with the empty witness included."""
    if len(T):
        box = dispersion_exact(T).witness
    else:
        box = AxisBox(np.zeros(T.d), np.ones(T.d))
    V = box.volume
    q = FixedVolumeQuery(T, V, r=r, empty_box=box, **search)
    D, _ = smooth_discrepancy_fixed_volume(q)
    spec = HatSpec.from_box(box.lo, box.hi, r)
    ident = V == 2**T.d * float(np.prod(spec.u)) if r == 2 else \
        math.isclose(V, r**T.d * float(np.prod(spec.u)), rel_tol=1e-15)
    bound = 2**T.d * math.sqrt(D)
    return ChainReport(V, D, bound, V <= bound if r == 2 else True, ident)


# ---------------------------------------------------------------------------
# decay sweeps
# ---------------------------------------------------------------------------

DISCREPANCY_COLUMNS = ("family", "param", "r", "V", "V0", "value", "normalized",
                       "witness_u", "witness_x0")


def discrepancy_decay_report(family: str, r: int, params, multipliers=range(6),
                             d: int = 2, **search) -> list[dict]:
    """Sampled ``D^r`` over a parameter range and volumes ``V = 2^j V0``.

    ``V0 = c / N`` for Fibonacci and ``c a^{-d}`` for Frolov, with ``c`` fixed
    by the exact dispersion of the first instance. The normalized column is
    ``D scale^r / log2(2V/V0)^{d-1}`` (``scale = b_n`` or ``a^d``), divided by
    its value on the first row.
    """
    params = list(params)
    mult = list(multipliers)
    rows, anchor, c = [], None, None
    for p in params:
        T = _family_instance(family, p, d)
        scale = len(T) if family == "fibonacci" else float(p) ** d
        disp = dispersion_exact(T).witness if d <= 3 else None
        if c is None:
            c = disp.volume * scale
        V0 = c / scale
        for j in mult:
            V = 2.0**j * V0
            if V > 1:
                continue
            D, wit = smooth_discrepancy_fixed_volume(
                FixedVolumeQuery(T, V, r=r, empty_box=disp, **search))
            raw = D * scale**r / math.log2(2 * V / V0) ** (d - 1)
            if anchor is None:
                anchor = raw
            rows.append({"family": family, "param": p, "r": r, "V": V, "V0": V0,
                         "value": D, "normalized": raw / anchor,
                         "witness_u": " ".join(f"{x:.17g}" for x in wit.u),
                         "witness_x0": " ".join(f"{x:.17g}" for x in wit.x0)})
    return rows


def rows_to_csv(rows: list[dict], columns=DISCREPANCY_COLUMNS) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(columns)
    for row in rows:
        wr.writerow([f"{row[c]:.17g}" if isinstance(row[c], float) else row[c]
                     for c in columns])
    return buf.getvalue()
