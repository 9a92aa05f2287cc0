"""Closed-form fundamental matrices for systems commuting with their integral.

A planar system ``x' = A(t) x`` whose matrix satisfies ``a21 = alpha a12`` and
``a22 = a11 + beta a12`` for real constants alpha, beta can be written
``A(t) = a11(t) I + a12(t) N`` with the fixed matrix ``N = ((0,1),(alpha,beta))``.
Then ``A`` commutes with its primitive ``B(t) = int_0^t A`` and the fundamental
matrix is the explicit exponential

    Phi(t) = Q(t) exp{ f(t) + (beta/2) g(t) },

where ``f, g`` are the primitives of ``a11, a12`` and ``Q`` involves only
``cosh`` and ``sinh`` of ``gamma g(t) / 2`` with ``gamma = sqrt(4 alpha +
beta^2)``.  Floquet exponents follow in closed form from ``f(T)`` and ``g(T)``
and coincide with the eigenvalues of the period-averaged matrix.
"""

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .trigpoly import SecularFunction, TrigPoly, align

__all__ = [
    "CommutingSystem",
    "Classification",
    "detect_structure",
    "verify_commutation",
    "fundamental_matrix",
    "closed_form_exponents",
    "average_matrix_exponents",
    "classify",
]

_FIT_RTOL = 1e-10
_ZERO_SET_SAMPLES = 4096


class Classification(enum.Enum):
    """Qualitative behaviour labels for commuting systems.

    UNBOUNDED_Q covers unbounded growth: of Q itself when gamma^2 > 0, or of
    the scalar exponential factor when the mean of a11 + (beta/2) a12 is
    positive.  The bounded labels are only assigned when neither applies.
    """

    UNBOUNDED_Q = "unbounded_q"
    BOUNDED_NON_PERIODIC = "bounded_non_periodic"
    PERIODIC_SOLUTIONS = "periodic_solutions"
    STABLE_ZERO = "stable_zero"
    GLOBAL_ATTRACTOR = "global_attractor"
    IDENTITY_Q = "identity_q"


@dataclass(frozen=True)
class CommutingSystem:
    """The structure ``A = a11 I + a12 N``, ``N = ((0,1),(alpha,beta))``."""

    a11: TrigPoly
    a12: TrigPoly
    alpha: float
    beta: float
    gamma: complex
    period: float
    f_prim: SecularFunction
    g_prim: SecularFunction

    @classmethod
    def from_coefficients(cls, a11, a12, alpha, beta):
        a11, a12 = align(a11, a12)
        alpha = float(alpha)
        beta = float(beta)
        gamma = cmath.sqrt(complex(4.0 * alpha + beta * beta))
        return cls(
            a11,
            a12,
            alpha,
            beta,
            gamma,
            a11.period,
            a11.primitive(),
            a12.primitive(),
        )


def _constant_fit(target, carrier):
    """Least-squares constant c with target ~ c*carrier, plus acceptance."""
    den = carrier.l2_inner(carrier).real
    tnorm = target.l2_norm()
    cnorm = math.sqrt(max(den, 0.0))
    scale = max(tnorm, cnorm)
    if scale == 0.0:
        return 0.0, True
    if den == 0.0:
        return 0.0, tnorm <= _FIT_RTOL * scale
    c = target.l2_inner(carrier) / den
    if abs(c.imag) > 1e-12 * (1.0 + abs(c)):
        return 0.0, False
    c = float(c.real)
    resid = (target - carrier * c).l2_norm()
    return c, resid <= _FIT_RTOL * scale


def detect_structure(sys):
    """Fit ``a21 = alpha a12``, ``a22 = a11 + beta a12`` with constant alpha,
    beta.  Returns a CommutingSystem, or None when the system is not of this
    family (the fit residual exceeds 1e-10 relative).
    """
    a11, a12, a21, a22 = sys.entries()
    alpha, ok_a = _constant_fit(a21, a12)
    beta, ok_b = _constant_fit(a22 - a11, a12)
    if not (ok_a and ok_b):
        return None
    return CommutingSystem.from_coefficients(a11, a12, alpha, beta)


def verify_commutation(sys, samples=128):
    """Max Frobenius norm of ``A(t)B(t) - B(t)A(t)`` over sampled t in [0, T],
    with ``B`` built from exact entry-wise primitives.  Near zero (<= 1e-10)
    exactly when the system commutes with its integral.
    """
    samples = int(samples)
    if samples < 8:
        raise ValueError("samples must be at least 8")
    T = sys.period
    ts = np.linspace(0.0, T, samples)
    A = sys.values(ts)
    prims = [e.primitive() for e in sys.entries()]
    B = np.empty_like(A)
    for idx, prim in enumerate(prims):
        B[:, idx // 2, idx % 2] = np.real(prim.value(ts))
    comm = A @ B - B @ A
    return float(np.linalg.norm(comm, axis=(1, 2)).max())


def _sinhc(z):
    """sinh(z)/z with the removable singularity filled by its series."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    z2 = z * z
    return np.where(small, 1.0 + z2 / 6.0 + z2 * z2 / 120.0, np.sinh(zs) / zs)


def fundamental_matrix(cs, t):
    """Phi(t), a (2, 2) complex array (or (..., 2, 2) for an array of times).

    Uses the single expression Q = cosh(z) I + g sinhc(z) M with
    z = gamma g / 2 and nilpotent-at-gamma=0 M = ((-beta/2, 1),(alpha, beta/2)),
    which reduces to the gamma -> 0 limit Q = I + g M automatically.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    ts = np.atleast_1d(t)
    f = np.asarray(cs.f_prim.value(ts), dtype=complex)
    g = np.asarray(cs.g_prim.value(ts), dtype=complex)
    z = 0.5 * cs.gamma * g
    ch = np.cosh(z)
    gs = g * _sinhc(z)
    half_beta = 0.5 * cs.beta
    factor = np.exp(f + half_beta * g)
    phi = np.empty(ts.shape + (2, 2), dtype=complex)
    phi[..., 0, 0] = (ch - half_beta * gs) * factor
    phi[..., 0, 1] = gs * factor
    phi[..., 1, 0] = cs.alpha * gs * factor
    phi[..., 1, 1] = (ch + half_beta * gs) * factor
    return phi[0] if scalar else phi


def closed_form_exponents(cs):
    """(lambda_plus, lambda_minus) with lambda_pm = (f(T) + (beta pm gamma)/2 g(T))/T."""
    T = cs.period
    fT = complex(cs.f_prim.value(T))
    gT = complex(cs.g_prim.value(T))
    lam_plus = (fT + 0.5 * (cs.beta + cs.gamma) * gT) / T
    lam_minus = (fT + 0.5 * (cs.beta - cs.gamma) * gT) / T
    return lam_plus, lam_minus


def average_matrix_exponents(sys):
    """Eigenvalues of the period-mean of A(t) (exact from mean coefficients).

    For commuting systems these equal the closed-form exponents; in general
    they need not match the true Floquet exponents.
    """
    return numerics.eig2x2(sys.mean_matrix())


def classify(cs):
    """Qualitative label from the sign of gamma^2, the secular slope of
    f + (beta/2) g, the periodicity of g, and the sampled zero-set of
    a11 + (beta/2) a12.  Advisory metadata; not used by the solvers.
    """
    gamma2 = 4.0 * cs.alpha + cs.beta * cs.beta
    if abs(gamma2) <= 1e-12 * (1.0 + 4.0 * abs(cs.alpha) + cs.beta * cs.beta):
        return Classification.IDENTITY_Q
    if gamma2 > 0.0:
        return Classification.UNBOUNDED_Q

    half_beta = 0.5 * cs.beta
    slope = float((cs.f_prim.slope + half_beta * cs.g_prim.slope).real)
    g_slope = float(cs.g_prim.slope.real)
    slope_scale = 1.0 + abs(float(cs.f_prim.slope.real)) + abs(g_slope) * (
        1.0 + abs(half_beta)
    )
    slope_tol = 1e-12 * slope_scale

    integrand = cs.a11 + cs.a12 * half_beta
    ts = np.linspace(0.0, cs.period, _ZERO_SET_SAMPLES, endpoint=False)
    peak = float(np.abs(integrand.evaluate(ts)).max())
    integrand_scale = 1.0 + cs.a11.max_coeff() + cs.a12.max_coeff() * (
        1.0 + abs(half_beta)
    )
    integrand_vanishes = peak <= 1e-10 * integrand_scale
    g_periodic = abs(g_slope) <= 1e-12 * (1.0 + abs(g_slope))

    if integrand_vanishes and g_periodic:
        return Classification.PERIODIC_SOLUTIONS
    if slope < -slope_tol:
        return Classification.GLOBAL_ATTRACTOR
    if slope > slope_tol:
        return Classification.UNBOUNDED_Q
    if integrand_vanishes:
        return Classification.BOUNDED_NON_PERIODIC
    return Classification.STABLE_ZERO
