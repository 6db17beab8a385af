"""Benchmark matrices and start vectors.

Small problems (n <= 100) are stored dense, larger ones as CSR.  Random
starts come from numpy's PCG64 bit generator, so a ``(n, seed)`` pair names
the same vector on every platform and numpy release that keeps PCG64.
"""

import numpy as np

from .linop import CsrMatrix, MatrixHandle

__all__ = [
    "wilkinson_w21",
    "clustered_diag",
    "linspace_diag",
    "nonnormal_t",
    "random_init",
    "ones_init",
    "GENERATORS",
]


def wilkinson_w21() -> MatrixHandle:
    """Symmetric tridiagonal W21+: diagonal ``|(-10..10)|``, unit off-diagonals."""
    n = 21
    a = np.diag(np.abs(np.arange(-10, 11, dtype=np.float64)))
    idx = np.arange(n - 1)
    a[idx, idx + 1] = 1.0
    a[idx + 1, idx] = 1.0
    return MatrixHandle.dense(a, "wilkinson")


def clustered_diag(n=50, r=0.9, pad=0.5) -> MatrixHandle:
    """``diag([1, r, pad, ..., pad])``; the defaults give the 50x50 r = 0.9 case."""
    d = np.full(n, pad, dtype=np.float64)
    d[0], d[1] = 1.0, r
    return MatrixHandle.dense(np.diag(d), "clustered-diag")


def _sparse_diag(d, label):
    n = d.shape[0]
    return MatrixHandle(CsrMatrix(n, n, np.arange(n + 1), np.arange(n), d), label)


def linspace_diag() -> MatrixHandle:
    """Leading 1 followed by 1000 points from 0.75 to 0.999 inclusive (order 1001)."""
    d = np.concatenate(([1.0], np.linspace(0.75, 0.999, 1000)))
    return _sparse_diag(d, "linspace-diag")


def nonnormal_t(t: float) -> MatrixHandle:
    """Upper bidiagonal ``A_t``: diagonal 1..100, superdiagonal ``t`` on rows 1..50."""
    n = 100
    a = np.diag(np.arange(1, n + 1, dtype=np.float64))
    rows = np.arange(50)
    a[rows, rows + 1] = t * 1.0
    return MatrixHandle.dense(a, f"nonnormal(t={t:g})")


def random_init(n: int, seed: int) -> np.ndarray:
    """i.i.d. uniform entries on ``[-0.5, 0.5)`` from ``PCG64(seed mod 2**64)``."""
    rng = np.random.Generator(np.random.PCG64(int(seed) % 2**64))
    return rng.random(n) - 0.5


def ones_init(n: int) -> np.ndarray:
    return np.ones(n, dtype=np.float64)


GENERATORS = {
    "wilkinson": wilkinson_w21,
    "clustered-diag": clustered_diag,
    "linspace-diag": linspace_diag,
    "nonnormal": nonnormal_t,
}
