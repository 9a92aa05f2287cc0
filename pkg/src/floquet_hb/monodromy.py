"""Fixed-step RK4 baseline: one-period integration and monodromy exponents.

The integrator is classical fourth-order Runge-Kutta with step ``h = T/steps``
(no adaptivity), so results are deterministic and convergence can be checked
by step doubling.  For a linear system each RK4 step is a 2x2 transfer matrix
built from ``A`` at ``t``, ``t + h/2`` and ``t + h``; the per-step matrices are
assembled in one vectorised batch and combined by an associative product tree,
which keeps long integrations (reference runs use 10x the default step count)
fast without changing the method.

Exponents come from the principal logarithm of the monodromy multipliers:
``lambda = (ln|mu| + i Arg mu)/T`` with ``Arg`` in ``(-pi, pi]``, so a negative
real multiplier yields ``Im lambda = pi/T`` exactly.
"""

import math
from dataclasses import dataclass

import numpy as np

from .numerics import eig2x2

__all__ = [
    "MonodromyResult",
    "integrate_rk4",
    "monodromy_matrix",
    "fundamental_on_grid",
    "reference_solution",
]

_MIN_STEPS = 16


@dataclass(frozen=True)
class MonodromyResult:
    C: np.ndarray
    multipliers: tuple
    exponents: tuple
    steps: int
    period: float
    defective: bool


def _transfer_matrices(sys, t0, h, steps):
    """Per-step RK4 transfer matrices ``S_k`` with ``x_{k+1} = S_k x_k``."""
    ts = t0 + (h / 2.0) * np.arange(2 * steps + 1)
    A = sys.values(ts)
    A1 = A[0:-1:2]
    A2 = A[1::2]
    A3 = A[2::2]
    K1 = A1
    K2 = A2 + (h / 2.0) * (A2 @ K1)
    K3 = A2 + (h / 2.0) * (A2 @ K2)
    K4 = A3 + h * (A3 @ K3)
    S = (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4)
    S[:, 0, 0] += 1.0
    S[:, 1, 1] += 1.0
    return S


def _chain(S):
    """Ordered product ``S[-1] @ ... @ S[0]`` by pairwise tree reduction."""
    while S.shape[0] > 1:
        m = S.shape[0] // 2
        paired = S[1 : 2 * m : 2] @ S[0 : 2 * m : 2]
        if S.shape[0] % 2:
            S = np.concatenate([paired, S[2 * m :]])
        else:
            S = paired
    return S[0]


def integrate_rk4(sys, x0, steps):
    """State at ``t = T`` from ``x(0) = x0`` by fixed-step RK4 over one period."""
    steps = int(steps)
    if steps < _MIN_STEPS:
        raise ValueError(f"need at least {_MIN_STEPS} steps, got {steps}")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (2,):
        raise ValueError("initial state must have shape (2,)")
    h = sys.period / steps
    return _chain(_transfer_matrices(sys, 0.0, h, steps)) @ x0


def _principal_log(mu, T):
    r = abs(mu)
    if r == 0.0:
        raise ArithmeticError("zero Floquet multiplier; system is singular over the period")
    if mu.imag == 0.0 and mu.real < 0.0:
        theta = math.pi
    else:
        theta = math.atan2(mu.imag, mu.real)
    return complex(math.log(r) / T, theta / T)


def monodromy_matrix(sys, steps=10000):
    """Monodromy matrix over one period plus multipliers and exponents.

    ``C`` maps ``x(0)`` to ``x(T)``; its eigenvalues are the Floquet
    multipliers and ``(1/T) log`` of them (principal branch) the exponents.
    Equal multipliers with a one-dimensional eigenspace set ``defective``.
    """
    steps = int(steps)
    if steps < _MIN_STEPS:
        raise ValueError(f"need at least {_MIN_STEPS} steps, got {steps}")
    T = sys.period
    h = T / steps
    C = _chain(_transfer_matrices(sys, 0.0, h, steps))
    mu1, mu2 = eig2x2(C)
    exps = (_principal_log(mu1, T), _principal_log(mu2, T))
    scale = max(abs(mu1), abs(mu2), 1.0)
    defective = False
    if abs(mu1 - mu2) <= 1e-8 * scale:
        # equal multipliers: defective unless C is (numerically) a scaled identity
        residual = C - np.eye(2) * ((mu1 + mu2) / 2.0)
        defective = bool(np.abs(residual).max() > 1e-8 * np.abs(C).max())
    C.flags.writeable = False
    return MonodromyResult(C, (complex(mu1), complex(mu2)), exps, steps, T, defective)


def fundamental_on_grid(sys, grid, steps_per_interval=64):
    """Fundamental matrix ``Phi(t)`` (with ``Phi(0) = I``) at increasing grid times."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-d array of times")
    if grid[0] < 0.0 or np.any(np.diff(grid) <= 0.0):
        raise ValueError("grid times must be non-negative and strictly increasing")
    steps = int(steps_per_interval)
    if steps < 1:
        raise ValueError("need at least one step per interval")
    out = np.empty((grid.size, 2, 2), dtype=float)
    phi = np.eye(2)
    prev = 0.0
    for i, t in enumerate(grid):
        dt = t - prev
        if dt > 0.0:
            h = dt / steps
            phi = _chain(_transfer_matrices(sys, prev, h, steps)) @ phi
        out[i] = phi
        prev = t
    return out


def reference_solution(sys, x0, grid, steps_per_interval=64):
    """Dense RK4 trajectory ``x(t)`` on the grid from ``x(0) = x0``."""
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (2,):
        raise ValueError("initial state must have shape (2,)")
    return fundamental_on_grid(sys, grid, steps_per_interval) @ x0
