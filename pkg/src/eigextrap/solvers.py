"""Power iteration and the one-step extrapolated variants.

All three iterations share one loop.  At step ``k`` the current iterate
``u_k`` is normalized to ``x_k = u_k / h_k`` and pushed through the operator,
``v_{k+1} = A x_k``.  Power steps take ``u_{k+1} = v_{k+1}``; extrapolated
steps blend the last two images,

    u_{k+1} = (1 - gamma_k) v_{k+1} + gamma_k v_k,

with the matching preimage ``x^g_k = (1 - gamma_k) x_k + gamma_k x_{k-1}``.
The Rayleigh quotient of ``x^g_k`` gives ``lambda_k`` and the stop test uses
``d_{k+1} = u_{k+1} - lambda_k x^g_k``.

The simple method takes ``gamma_k = -|d_k| / |d_{k-1}|``.  The augmented
method adds the projection ``p_k = (v_{k+1} - u_k, x_k)`` to numerator and
(scaled by ``eta``) denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

from .errors import BreakdownError, UsageError
from .linop import LinearOperator, as_vector, dot, lincomb, norm

__all__ = [
    "SolverConfig",
    "TraceRow",
    "IterationTrace",
    "EigenResult",
    "power_iterate",
    "simple_extrapolation",
    "augmented_extrapolation",
    "solve",
    "METHODS",
    "ideal_extrapolation",
    "rayleigh_quotient",
]

# Below this the extrapolation ratio is not trusted and a plain power step is taken.
DENOMINATOR_FLOOR = 1e-300


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls.

    ``warmup_m`` counts plain power iterations run *before* the simple
    method starts.  The simple method itself opens with two power steps to
    obtain two residuals, so its first extrapolated step is step
    ``warmup_m + 3`` (operator application number).  ``warmup_m = 0`` is the
    bare two-step start.
    """

    tol: float = 1e-7
    max_iter: int = 6000
    warmup_m: int = 40
    eta: float = 40.0
    record_trace: bool = True

    def __post_init__(self):
        if not self.tol >= 0:
            raise UsageError(f"tol must be nonnegative, got {self.tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise UsageError(f"max_iter must be a positive integer, got {self.max_iter}")
        if int(self.warmup_m) != self.warmup_m or self.warmup_m < 0:
            raise UsageError(f"warmup_m must be a nonnegative integer, got {self.warmup_m}")
        if not self.eta >= 1:
            raise UsageError(f"eta must be >= 1, got {self.eta}")


class TraceRow(NamedTuple):
    k: int
    method: str
    lam: float
    residual_norm: float
    gamma: float
    p: float
    h: float


@dataclass
class IterationTrace:
    """Per-step history.  Entry ``i`` describes operator application ``k[i]``.

    For application ``k = j + 1`` the row holds ``lambda_j``, ``|d_{j+1}|``,
    ``gamma_j``, ``p_j`` and ``h_j``, the norm of the iterate that was
    normalized and fed to the operator.  ``gamma`` and ``p`` are 0 where the
    active algorithm does not define them.
    """

    k: list = field(default_factory=list)
    lam: list = field(default_factory=list)
    residual_norm: list = field(default_factory=list)
    gamma: list = field(default_factory=list)
    p: list = field(default_factory=list)
    h: list = field(default_factory=list)

    def append(self, k, lam, residual_norm, gamma, p, h):
        self.k.append(k)
        self.lam.append(lam)
        self.residual_norm.append(residual_norm)
        self.gamma.append(gamma)
        self.p.append(p)
        self.h.append(h)

    def __len__(self):
        return len(self.k)

    def rows(self, method="") -> Iterator[TraceRow]:
        for vals in zip(self.k, self.lam, self.residual_norm, self.gamma, self.p, self.h):
            k, lam, res, gamma, p, h = vals
            yield TraceRow(k, method, lam, res, gamma, p, h)


@dataclass
class EigenResult:
    converged: bool
    eigenvalue: float
    eigenvector: np.ndarray
    iterations: int
    final_residual: float
    trace: IterationTrace
    method: str = ""
    # Last iterate u and its preimage x^g; final_residual == |u - eigenvalue * x^g|.
    final_iterate: np.ndarray = None
    final_preimage: np.ndarray = None


def rayleigh_quotient(op: LinearOperator, x) -> float:
    x = as_vector(x, op.n)
    xx = dot(x, x)
    if xx == 0.0:
        raise UsageError("Rayleigh quotient of the zero vector")
    return dot(op.apply(x), x) / xx


def _gamma_simple(d_cur, d_prev, p_cur, p_prev, eta):
    if d_prev < DENOMINATOR_FLOOR:
        return 0.0
    return -d_cur / d_prev


def _gamma_augmented(d_cur, d_prev, p_cur, p_prev, eta):
    den = math.hypot(d_prev, eta * p_prev)
    if den < DENOMINATOR_FLOOR:
        return 0.0
    return -math.hypot(d_cur, p_cur) / den


def _iterate(op: LinearOperator, u0, cfg: SolverConfig, method: str) -> EigenResult:
    if method == "power":
        n_power, gamma_rule = None, None
    elif method == "simple":
        n_power, gamma_rule = cfg.warmup_m + 2, _gamma_simple
    elif method == "augmented":
        n_power, gamma_rule = 2, _gamma_augmented
    else:
        raise UsageError(f"unknown method {method!r}")
    track_p = method == "augmented"

    u = np.array(as_vector(u0, op.n))
    h = norm(u)
    if h == 0.0:
        raise UsageError("initial vector is zero")

    trace = IterationTrace()
    x_prev = v_prev = None
    d_prev = d_cur = 0.0
    p_prev = p_cur = 0.0
    lam = res = 0.0
    xg = u / h
    k = 0
    while k < cfg.max_iter:
        x = u / h
        v = op.apply(x)
        if track_p:
            p_prev, p_cur = p_cur, dot(v - u, x)
        if n_power is None or k < n_power:
            gamma = 0.0
        else:
            gamma = gamma_rule(d_cur, d_prev, p_cur, p_prev, cfg.eta)
        if gamma == 0.0:
            u_next, xg = v, x
            lam = dot(u_next, x)
        else:
            u_next = lincomb(1.0 - gamma, v, gamma, v_prev)
            xg = lincomb(1.0 - gamma, x, gamma, x_prev)
            xgxg = dot(xg, xg)
            if xgxg == 0.0:
                raise BreakdownError(f"extrapolated preimage vanished at step {k + 1}")
            lam = dot(u_next, xg) / xgxg
        res = norm(lincomb(1.0, u_next, -lam, xg))
        h_next = norm(u_next)
        if h_next == 0.0:
            raise BreakdownError(f"operator annihilated the iterate at step {k + 1}")
        if not (math.isfinite(res) and math.isfinite(h_next)):
            raise BreakdownError(f"non-finite iterate at step {k + 1}")
        if cfg.record_trace:
            trace.append(k + 1, lam, res, gamma, p_cur if track_p else 0.0, h)
        d_prev, d_cur = d_cur, res
        x_prev, v_prev = x, v
        u, h = u_next, h_next
        k += 1
        if res < cfg.tol:
            break

    return EigenResult(
        converged=res < cfg.tol,
        eigenvalue=lam,
        eigenvector=u / h,
        iterations=k,
        final_residual=res,
        trace=trace,
        method=method,
        final_iterate=u,
        final_preimage=xg,
    )


def power_iterate(op: LinearOperator, u0, cfg: SolverConfig = SolverConfig()) -> EigenResult:
    """Plain power method with the residual stop test ``|d_{k+1}| < tol``."""
    return _iterate(op, u0, cfg, "power")


def simple_extrapolation(op: LinearOperator, u0, cfg: SolverConfig = SolverConfig()) -> EigenResult:
    """Power warmup of ``cfg.warmup_m`` steps, then residual-ratio extrapolation."""
    return _iterate(op, u0, cfg, "simple")


def augmented_extrapolation(op: LinearOperator, u0, cfg: SolverConfig = SolverConfig()) -> EigenResult:
    """Two power steps, then extrapolation stabilized by the projection ``p_k``.

    Large ``cfg.eta`` drives ``gamma_k`` to zero and recovers the power method.
    """
    return _iterate(op, u0, cfg, "augmented")


METHODS = {
    "power": power_iterate,
    "simple": simple_extrapolation,
    "augmented": augmented_extrapolation,
}


def solve(method: str, op: LinearOperator, u0, cfg: SolverConfig = SolverConfig()) -> EigenResult:
    try:
        fn = METHODS[method]
    except KeyError:
        raise UsageError(f"unknown method {method!r}; choose from {sorted(METHODS)}") from None
    return fn(op, u0, cfg)


def ideal_extrapolation(r: float, c: float, m: int, steps: int) -> np.ndarray:
    """Second-eigencomponent coefficients of the idealized extrapolation.

    Starting from ``phi + c psi`` with iterates normalized by the dominant
    eigenvalue and ``gamma_{m+k} = -r^k``, entry ``k-1`` is the coefficient
    of ``psi`` in ``u_{m+k+1}``, namely ``c * r^(m + 1 + 2 + ... + (k+1))``.
    """
    if not 0 < r < 1:
        raise UsageError(f"ratio must lie in (0, 1), got {r}")
    k = np.arange(1, steps + 1)
    exponents = m + (k + 1) * (k + 2) // 2
    return c * np.power(float(r), exponents.astype(np.float64))
