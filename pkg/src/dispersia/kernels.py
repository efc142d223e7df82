"""Dirichlet, Fejer and de la Vallee Poussin kernels and trigonometric polynomials."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

SINGULAR = 1e-6


def _with_series(x, closed, weights):
    """Closed form away from ``x = 0 (mod 2 pi)``; cosine series near it."""
    x = np.asarray(x, dtype=float)
    s = np.sin(x / 2)
    near = np.abs(s) < SINGULAR
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.atleast_1d(np.asarray(closed(x, s), dtype=float)).copy()
    if np.any(near):
        xs = np.atleast_1d(x)[np.atleast_1d(near)]
        k = np.arange(1, len(weights) + 1)
        out[np.atleast_1d(near)] = 1 + 2 * (np.cos(np.multiply.outer(xs, k)) * weights).sum(axis=-1)
    return float(out[0]) if x.ndim == 0 else out.reshape(x.shape)


def dirichlet(n: int, x):
    """``D_n(x) = sum_{|k| <= n} e^{ikx} = sin((n + 1/2) x) / sin(x/2)``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return _with_series(x, lambda x, s: np.sin((n + 0.5) * x) / s, np.ones(n))


def fejer(n: int, x):
    """``K_n(x) = n^{-1} sum_{k<n} D_k(x) = sin^2(nx/2) / (n sin^2(x/2))``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _with_series(x, lambda x, s: np.sin(n * x / 2) ** 2 / (n * s * s),
                        1 - np.arange(1, n) / n)


def vpoussin(n: int, x):
    """``V_n = 2 K_{2n} - K_n``; coefficients are 1 for ``|k| <= n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = 2 * np.asarray(fejer(2 * n, x)) - np.asarray(fejer(n, x))
    return float(out) if out.ndim == 0 else out


KERNELS = {"dirichlet": dirichlet, "fejer": fejer, "vpoussin": vpoussin}


def product_kernel(kind: str, N, x):
    """``prod_j kernel_{N_j}(x_j)`` at points ``x`` of shape ``(..., d)``."""
    f = KERNELS[kind]
    x = np.asarray(x, float)
    out = np.ones(x.shape[:-1])
    for j, nj in enumerate(np.atleast_1d(N)):
        out = out * np.asarray(f(int(nj), x[..., j]))
    return float(out) if out.ndim == 0 else out


def kernel_degree(kind: str, n: int) -> int:
    return {"dirichlet": n, "fejer": n - 1, "vpoussin": 2 * n - 1}[kind]


def fourier_coefficients(f, degree: int, nodes: int | None = None) -> np.ndarray:
    """Coefficients ``c_k``, ``|k| <= degree``, of a univariate trig polynomial.

    Direct equispaced quadrature with ``4 * degree`` nodes (at least 4), exact
    for polynomials of that degree.
    """
    M = nodes or max(4, 4 * degree)
    t = 2 * np.pi * np.arange(M) / M
    vals = np.asarray(f(t), dtype=complex)
    k = np.arange(-degree, degree + 1)
    return np.exp(-1j * np.outer(k, t)) @ vals / M


def kernel_l1(kind: str, n: int, nodes: int | None = None) -> float:
    """``(2 pi)^{-1} int |kernel_n|`` by the midpoint rule on a fine grid."""
    M = nodes or max(4096, 64 * n)
    t = 2 * np.pi * (np.arange(M) + 0.5) / M
    return float(np.mean(np.abs(KERNELS[kind](n, t))))


# ---------------------------------------------------------------------------
# trigonometric polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TrigPoly:
    """``sum_k c_k e^{i<k,x>}`` stored as parallel frequency/coefficient arrays."""

    freqs: np.ndarray
    coefs: np.ndarray
    N: np.ndarray | None = None

    def __post_init__(self):
        k = np.atleast_2d(np.asarray(self.freqs, dtype=np.int64))
        c = np.asarray(self.coefs, dtype=complex).ravel()
        if len(k) != len(c):
            raise ValueError("one coefficient per frequency")
        bound = np.max(np.abs(k), axis=0) if len(k) else np.zeros(k.shape[1], np.int64)
        N = bound if self.N is None else np.asarray(self.N, dtype=np.int64)
        if np.any(bound > N):
            raise ValueError("coefficients outside the declared support bound")
        object.__setattr__(self, "freqs", k)
        object.__setattr__(self, "coefs", c)
        object.__setattr__(self, "N", N)

    @classmethod
    def from_dict(cls, coeffs: dict, N=None) -> "TrigPoly":
        keys = list(coeffs)
        return cls(np.array(keys, dtype=np.int64).reshape(len(keys), -1),
                   np.array([coeffs[k] for k in keys]), N)

    @classmethod
    def constant(cls, d: int, value=1.0) -> "TrigPoly":
        return cls(np.zeros((1, d), np.int64), [value])

    @property
    def d(self) -> int:
        return self.freqs.shape[1]

    @property
    def coeffs(self) -> dict:
        return {tuple(int(v) for v in k): complex(c) for k, c in zip(self.freqs, self.coefs)}


def trig_eval(p: TrigPoly, x) -> np.ndarray:
    """Direct summation at points ``x`` of shape ``(..., d)``."""
    x = np.asarray(x, float)
    flat = x.reshape(-1, p.d)
    out = np.empty(len(flat), complex)
    step = max(1, 4_000_000 // max(len(p.coefs), 1))
    for s in range(0, len(flat), step):
        out[s:s + step] = np.exp(1j * (flat[s:s + step] @ p.freqs.T)) @ p.coefs
    out = out.reshape(x.shape[:-1])
    return complex(out) if out.ndim == 0 else out


def default_grid(p: TrigPoly) -> int:
    """Smallest power of two at least ``max(64, 8 max_j N_j)``."""
    need = max(64, 8 * int(np.max(p.N, initial=0)))
    return 1 << (need - 1).bit_length()


def trig_grid_values(p: TrigPoly, grid_res: int) -> np.ndarray:
    """Values on the uniform grid ``2 pi j / grid_res`` in every axis (FFT)."""
    M = int(grid_res)
    if np.any(2 * p.N + 1 > M):
        raise ValueError("grid too coarse for the polynomial degree")
    A = np.zeros((M,) * p.d, complex)
    np.add.at(A, tuple((p.freqs % M).T), p.coefs)
    return np.fft.ifftn(A) * M**p.d


def _polish_max(p: TrigPoly, x0: np.ndarray, h: float) -> float:
    """Local max of ``|p|`` in the cell ``x0 +- h`` (bounded L-BFGS on ``-|p|^2``)."""
    def fun(x):
        e = np.exp(1j * (p.freqs @ x)) * p.coefs
        f = e.sum()
        grad = 2 * np.real(np.conj(f) * (1j * p.freqs.T @ e))
        return -abs(f) ** 2, -grad

    res = minimize(fun, x0, jac=True, method="L-BFGS-B",
                   bounds=[(c - h, c + h) for c in x0],
                   options={"ftol": 1e-15, "gtol": 1e-12})
    return float(max(abs(trig_eval(p, res.x)), abs(trig_eval(p, x0))))


def trig_norm(p: TrigPoly, q: float, grid_res: int | None = None, polish: int = 4,
              starts=None) -> float:
    """``L_q`` norm w.r.t. normalized measure on the torus.

    ``q = 2`` is exact on any grid finer than ``2N + 1``. ``q = inf`` returns
    the grid maximum refined by a bounded local ascent around the ``polish``
    largest grid values and any extra ``starts``; it is a lower bound on the
    sup.
    """
    M = grid_res or default_grid(p)
    vals = np.abs(trig_grid_values(p, M))
    if q == 2:
        return float(np.sqrt(np.mean(vals**2)))
    if math.isinf(q):
        best = float(vals.max())
        if polish:
            top = np.argsort(vals, axis=None)[-polish:]
            h = 2 * np.pi / M
            for idx in top:
                x0 = np.array(np.unravel_index(idx, vals.shape)) * h
                best = max(best, _polish_max(p, x0, h))
            for x0 in np.atleast_2d(starts) if starts is not None else ():
                best = max(best, _polish_max(p, np.asarray(x0, float), h))
        return best
    if q <= 0:
        raise ValueError("q must be positive")
    return float(np.mean(vals**q) ** (1.0 / q))


def parseval_norm(p: TrigPoly) -> float:
    return float(np.sqrt(np.sum(np.abs(p.coefs) ** 2)))
