"""Largest empty axis-parallel box (dispersion) of a point set.

Exact mode enumerates maximal empty boxes: in 2-d every such box has each
face supported by a point or by the cube wall, and a sweep from every
supporting point with a running staircase of blockers visits all of them in
``O(n^2)``. Higher dimensions reduce to 2-d through slabs along the last
axis. The supremum over half-open boxes equals the maximum over open boxes
with faces on candidate coordinates; witnesses are therefore checked for
emptiness of their open interior.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from ._errors import BudgetExceeded
from .geometry import PointSet, fibonacci_set, frolov_matrix, frolov_set

EXACT_BUDGET = {1: 10**7, 2: 2000, 3: 300}


@dataclass(frozen=True, eq=False)
class AxisBox:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo, hi = np.asarray(self.lo, float), np.asarray(self.hi, float)
        if lo.shape != hi.shape or np.any(lo >= hi):
            raise ValueError("AxisBox needs lo < hi coordinate-wise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def d(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    @property
    def center(self) -> np.ndarray:
        return (self.lo + self.hi) / 2

    def contains(self, points, mode: str = "half_open") -> np.ndarray:
        """Membership mask; ``mode`` is ``half_open`` ([lo, hi)) or ``open``."""
        p = np.asarray(points, float).reshape(-1, self.d)
        if mode == "half_open":
            inside = (p >= self.lo) & (p < self.hi)
        elif mode == "open":
            inside = (p > self.lo) & (p < self.hi)
        else:
            raise ValueError(f"unknown membership mode {mode!r}")
        return np.all(inside, axis=1)

    def is_empty(self, points, mode: str = "open") -> bool:
        return not np.any(self.contains(points, mode))


@dataclass(frozen=True)
class DispersionResult:
    volume: float
    witness: AxisBox
    mode: str


def _points(T) -> np.ndarray:
    return T.points if isinstance(T, PointSet) else np.asarray(T, float)


def _lex_key(lo, hi):
    return tuple(lo) + tuple(hi)


class _Best:
    """Running maximum with lexicographic (lo, hi) tie-break."""

    def __init__(self):
        self.area = -1.0
        self.lo = self.hi = None

    def offer(self, areas, los, his):
        if len(areas) == 0:
            return
        top = areas.max()
        if top < self.area:
            return
        idx = np.flatnonzero(areas == top)
        if len(idx) > 1:
            keys = np.column_stack([los[idx], his[idx]])
            idx = idx[np.lexsort(keys.T[::-1])]
        i = idx[0]
        if top > self.area or _lex_key(los[i], his[i]) < _lex_key(self.lo, self.hi):
            self.area, self.lo, self.hi = float(top), los[i].copy(), his[i].copy()


def _max_empty_1d(x: np.ndarray):
    v = np.unique(np.concatenate([[0.0], x, [1.0]]))
    gaps = np.diff(v)
    i = int(np.argmax(gaps))
    return float(gaps[i]), v[i:i + 1].copy(), v[i + 1:i + 2].copy()


def _sweep(xs, ys, i, forward, best):
    xi, yi = xs[i], ys[i]
    if forward:
        start = np.searchsorted(xs, xi, side="right")
        ox, oy, wall = xs[start:], ys[start:], 1.0
    else:
        stop = np.searchsorted(xs, xi, side="left")
        ox, oy, wall = xs[:stop][::-1], ys[:stop][::-1], 0.0
    eq = np.flatnonzero(oy == yi)
    cut = int(eq[0]) if eq.size else len(oy)
    ay = oy[:cut]
    tops = np.concatenate([[1.0], np.minimum.accumulate(np.where(ay > yi, ay, 1.0))])
    bots = np.concatenate([[0.0], np.maximum.accumulate(np.where(ay < yi, ay, 0.0))])
    edges = np.append(ox[:cut], ox[cut] if cut < len(ox) else wall)
    areas = np.abs(edges - xi) * (tops - bots)
    xlo, xhi = np.minimum(edges, xi), np.maximum(edges, xi)
    ok = xhi > xlo
    los = np.column_stack([xlo, bots])[ok]
    his = np.column_stack([xhi, tops])[ok]
    best.offer(areas[ok], los, his)


def _max_empty_2d(P: np.ndarray):
    best = _Best()
    # strips touching both x-walls
    v = np.unique(np.concatenate([[0.0], P[:, 1], [1.0]]))
    gaps = np.diff(v)
    los = np.column_stack([np.zeros(len(gaps)), v[:-1]])
    his = np.column_stack([np.ones(len(gaps)), v[1:]])
    best.offer(gaps, los, his)
    if len(P):
        order = np.lexsort((P[:, 1], P[:, 0]))
        xs, ys = P[order, 0], P[order, 1]
        for i in range(len(xs)):
            _sweep(xs, ys, i, True, best)
            _sweep(xs, ys, i, False, best)
    return best.area, best.lo, best.hi


def _max_empty_box(P: np.ndarray):
    d = P.shape[1]
    if d == 1:
        return _max_empty_1d(P[:, 0])
    if d == 2:
        return _max_empty_2d(P)
    z = P[:, -1]
    zs = np.unique(z)
    best = _Best()
    for zlo in np.concatenate([[0.0], zs[zs > 0.0]]):
        if 1.0 - zlo < best.area:
            continue
        uppers = np.append(zs[zs > zlo], 1.0)
        area = 1.0
        for zhi in uppers:
            # the slab only gains points as zhi grows, so the last area bounds this one
            if area * (zhi - zlo) < best.area:
                continue
            inside = (z > zlo) & (z < zhi)
            area, lo, hi = _max_empty_box(P[inside, :-1])
            vol = area * (zhi - zlo)
            best.offer(np.array([vol]), np.append(lo, zlo)[None, :],
                       np.append(hi, zhi)[None, :])
            if (1.0 - zlo) * area < best.area:
                break
    return best.area, best.lo, best.hi


def dispersion_exact(T) -> DispersionResult:
    """Exact dispersion of ``T`` (``d <= 3``; see ``EXACT_BUDGET``)."""
    P = _points(T)
    d = P.shape[1]
    if d not in EXACT_BUDGET:
        raise BudgetExceeded(f"exact dispersion unsupported for d={d}; "
                             "use dispersion_sampled")
    if len(P) > EXACT_BUDGET[d]:
        raise BudgetExceeded(f"{len(P)} points exceed the exact budget "
                             f"{EXACT_BUDGET[d]} for d={d}; use dispersion_sampled")
    vol, lo, hi = _max_empty_box(P)
    box = AxisBox(lo, hi)
    return DispersionResult(box.volume, box, "exact")


def dispersion_sampled(T, trials: int = 10_000, seed: int = 0,
                       batch: int = 512) -> DispersionResult:
    """Lower bound on the dispersion from randomly grown empty boxes.

    Each trial inflates a cube around a uniform random center until it
    touches a point (Chebyshev distance), then pushes the faces outward one
    axis at a time until blocked.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    P = _points(T)
    d = P.shape[1]
    rng = np.random.default_rng(seed)
    best = _Best()
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        c = rng.random((b, d))
        axes = rng.permutation(d)
        if len(P):
            cheb = np.max(np.abs(P[None, :, :] - c[:, None, :]), axis=2)
            t = cheb.min(axis=1)
        else:
            t = np.ones(b)
        lo = np.clip(c - t[:, None], 0.0, 1.0)
        hi = np.clip(c + t[:, None], 0.0, 1.0)
        for j in axes:
            if not len(P):
                lo[:, j], hi[:, j] = 0.0, 1.0
                continue
            others = np.delete(np.arange(d), j)
            inside = np.all((P[None, :, others] > lo[:, None, others])
                            & (P[None, :, others] < hi[:, None, others]), axis=2)
            pj = P[None, :, j]
            # split blockers at the center, which stays inside the box; comparing
            # against the cube faces breaks when c - (c - p) rounds past p
            cj = c[:, j:j + 1]
            below = np.where(inside & (pj <= cj), pj, 0.0)
            above = np.where(inside & (pj > cj), pj, 1.0)
            lo[:, j] = below.max(axis=1)
            hi[:, j] = above.min(axis=1)
        vols = np.prod(hi - lo, axis=1)
        ok = vols > 0
        best.offer(vols[ok], lo[ok], hi[ok])
        done += b
    box = AxisBox(best.lo, best.hi)
    return DispersionResult(box.volume, box, "sampled")


def _family_instance(family: str, param, d: int = 2):
    if family == "fibonacci":
        return fibonacci_set(int(param))
    if family == "frolov":
        return frolov_set(frolov_matrix(d), float(param))
    raise ValueError(f"unknown family {family!r}")


def decay_report(family: str, params, d: int = 2, mode: str = "exact",
                 trials: int = 100_000, seed: int = 0) -> list[dict]:
    """Dispersion of a family across parameters.

    Rows carry ``param, N, disp, disp_times_N, lower_bound`` where the lower
    bound is the trivial ``1/(N+1)``.
    """
    rows = []
    for p in params:
        T = _family_instance(family, p, d)
        if mode == "exact":
            res = dispersion_exact(T)
        else:
            res = dispersion_sampled(T, trials=trials, seed=seed)
        N = len(T)
        rows.append({"param": p, "N": N, "disp": res.volume,
                     "disp_times_N": res.volume * N, "lower_bound": 1.0 / (N + 1)})
    return rows


def rows_to_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([f"{r[c]:.17g}" if isinstance(r[c], float) else r[c]
                    for c in columns])
    return buf.getvalue()


DECAY_COLUMNS = ("param", "N", "disp", "disp_times_N", "lower_bound")
