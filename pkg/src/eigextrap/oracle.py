"""Reference eigensolvers used to check the iterative methods.

Nothing here shares code paths with :mod:`eigextrap.solvers`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateSpectrumError, EigextrapError, UsageError
from .linop import MatrixHandle

__all__ = [
    "SpectrumResult",
    "jacobi_symmetric_eigen",
    "triangular_dominant_pair",
    "spectral_ratio",
    "simulate_ideal_recurrence",
]


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    # Columns are eigenvectors, in the order of ``eigenvalues``.
    eigenvectors: Optional[np.ndarray] = None


def _dense(A):
    if isinstance(A, MatrixHandle) or hasattr(A, "to_dense"):
        A = A.to_dense()
    return np.array(A, dtype=np.float64)


def jacobi_symmetric_eigen(A, sweep_tol=1e-14, max_sweeps=100) -> SpectrumResult:
    """Cyclic-by-row Jacobi eigenvalue algorithm.

    Sweeps over all ``(p, q)`` pairs with ``p < q`` until the off-diagonal
    Frobenius norm drops below ``sweep_tol * ||A||_F``.  Returns every
    eigenpair, sorted by descending magnitude.
    """
    a = _dense(A)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise UsageError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    fro = np.linalg.norm(a)
    if np.abs(a - a.T).max() > 1e-12 * max(fro, np.finfo(float).tiny):
        raise UsageError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(n)

    def off(m):
        # direct sum; subtracting the diagonal from ||m||_F^2 cancels badly
        return float(np.linalg.norm(m - np.diag(np.diag(m))))

    target = sweep_tol * fro
    for _ in range(max_sweeps):
        if off(a) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        if off(a) > target:
            raise EigextrapError(f"Jacobi did not converge in {max_sweeps} sweeps")

    w = np.diag(a).copy()
    order = np.lexsort((-w, -np.abs(w)))
    return SpectrumResult(w[order], v[:, order])


def triangular_dominant_pair(A):
    """Largest diagonal entry of an upper triangular matrix and its unit eigenvector.

    The eigenvector solves ``(A - lam I) v = 0`` by back-substitution with
    ``v[j] = 1`` at the position of the maximum.
    """
    a = _dense(A)
    n = a.shape[0]
    if np.any(np.tril(a, -1) != 0.0):
        raise UsageError("matrix is not upper triangular")
    d = np.diag(a)
    lam = float(d.max())
    hits = np.flatnonzero(d == lam)
    if hits.size > 1:
        raise DegenerateSpectrumError(f"maximal diagonal entry {lam} is repeated")
    j = int(hits[0])
    v = np.zeros(n)
    v[j] = 1.0
    for i in range(j - 1, -1, -1):
        v[i] = -(a[i, i + 1:j + 1] @ v[i + 1:j + 1]) / (d[i] - lam)
    return lam, v / np.linalg.norm(v)


def spectral_ratio(spec: SpectrumResult) -> float:
    w = np.asarray(spec.eigenvalues)
    if w.size < 2:
        raise UsageError("need at least two eigenvalues")
    mags = np.sort(np.abs(w))[::-1]
    if mags[0] == 0.0:
        raise DegenerateSpectrumError("dominant eigenvalue is zero")
    return float(mags[1] / mags[0])


def simulate_ideal_recurrence(r, c, m, steps, lam=1.0):
    """Run the idealized extrapolation on explicit 2-vectors.

    Works in the orthonormal basis ``(phi, psi)`` of ``A = diag(lam, r*lam)``.
    Iterates are normalized by ``lam``; ``m + 1`` power steps from
    ``phi + c psi`` are followed by extrapolation with ``gamma_{m+k} = -r^k``.
    Returns the ``psi`` coefficient of ``u_{m+k+1}`` for ``k = 1..steps`` and
    the matching ``phi`` coefficients.

    Arithmetic is exact (rationals built from the binary inputs): each step
    subtracts nearly equal terms, and in floating point the lost digits
    compound to roughly ``eps * r^(-steps^2/2)``.
    """
    r, c, lam = Fraction(r), Fraction(c), Fraction(lam)
    diag = (lam, r * lam)

    def apply(x):
        return [d * xi / lam for d, xi in zip(diag, x)]

    u = [Fraction(1), c]
    for _ in range(m + 1):
        u = apply(u)
    v_prev = u
    second, first = [], []
    for k in range(1, steps + 1):
        v = apply(u)
        g = -(r ** k)
        u = [(1 - g) * a + g * b for a, b in zip(v, v_prev)]
        v_prev = v
        first.append(float(u[0]))
        second.append(float(u[1]))
    return np.array(second), np.array(first)
