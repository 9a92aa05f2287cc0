"""Problem forms for planar periodic systems and scalar second-order ODEs.

Three interchangeable views of the same dynamics:

* :class:`PlanarSystem` -- ``z' = A(t) z`` with 2x2 periodic ``A``;
* :class:`ScalarODE` -- ``p(t) x'' + q(t) x' + r(t) x = 0`` (``p`` need not
  be constant, and the pencil-based solver consumes it directly);
* :class:`HillForm` -- ``y'' + f(t) y = 0`` plus the exponent shift that maps
  Hill-form exponents back to the original equation.

Transforms between the views are exact trig-polynomial identities.  The
boundedness test is the classical sufficient criterion on ``f``: all
solutions bounded when ``min f > 0`` and ``T * int_0^T f <= 4``; solutions
with positive-real-part exponents when ``max f < 0``; inconclusive otherwise.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .trigpoly import TrigPoly, align

__all__ = [
    "ProblemError",
    "DecoupledSystemError",
    "ScalarODE",
    "PlanarSystem",
    "CompanionForm",
    "HillForm",
    "hill_transform",
    "scalar_to_system",
    "system_to_scalar",
    "Boundedness",
    "boundedness_criterion",
    "catalog",
    "catalog_entries",
]


class ProblemError(ValueError):
    """Ill-posed problem definition (zero leading coefficient, bad catalog args...)."""


class DecoupledSystemError(ProblemError):
    """Both off-diagonal entries vanish; no scalar reduction exists."""


class ScalarODE:
    """``p(t) x'' + q(t) x' + r(t) x = 0`` with trig-polynomial coefficients."""

    __slots__ = ("p", "q", "r")

    def __init__(self, p, q, r):
        p, q, r = align(p, q, r)
        if p.is_zero(1e-14):
            raise ProblemError("leading coefficient p is identically zero")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)

    def __setattr__(self, name, value):
        raise AttributeError("ScalarODE is immutable")

    @property
    def omega(self):
        return self.p.omega

    @property
    def period(self):
        return self.p.period

    def leading_constant(self):
        """Value of ``p`` if it is constant, else ``None``."""
        if self.p.degree == 0:
            return complex(self.p.a[0]) / 2.0
        return None

    def is_hill_form(self, tol=1e-12):
        scale = max(self.p.max_coeff(), self.r.max_coeff(), 1.0)
        return self.p.degree == 0 and self.q.is_zero(tol * scale)

    def __repr__(self):
        return f"ScalarODE(omega={self.omega!r}, degrees=({self.p.degree}, {self.q.degree}, {self.r.degree}))"


class PlanarSystem:
    """``z' = A(t) z`` with 2x2 trig-polynomial ``A``."""

    __slots__ = ("a11", "a12", "a21", "a22")

    def __init__(self, a11, a12, a21, a22):
        a11, a12, a21, a22 = align(a11, a12, a21, a22)
        object.__setattr__(self, "a11", a11)
        object.__setattr__(self, "a12", a12)
        object.__setattr__(self, "a21", a21)
        object.__setattr__(self, "a22", a22)

    def __setattr__(self, name, value):
        raise AttributeError("PlanarSystem is immutable")

    @property
    def omega(self):
        return self.a11.omega

    @property
    def period(self):
        return self.a11.period

    def entries(self):
        return (self.a11, self.a12, self.a21, self.a22)

    def values(self, ts):
        """Real matrix samples ``A(t)``, shaped ``ts.shape + (2, 2)``."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        out = np.empty(ts.shape + (2, 2), dtype=float)
        scale = max(e.max_coeff() for e in self.entries()) + 1.0
        for (i, j), e in zip(((0, 0), (0, 1), (1, 0), (1, 1)), self.entries()):
            v = e.evaluate(ts)
            if np.abs(v.imag).max() > 1e-9 * scale:
                raise ProblemError("system entries must be real-valued for integration")
            out[..., i, j] = v.real
        return out

    def mean_matrix(self):
        return np.array(
            [
                [self.a11.mean(), self.a12.mean()],
                [self.a21.mean(), self.a22.mean()],
            ],
            dtype=complex,
        )

    def trace_mean(self):
        return self.a11.mean() + self.a22.mean()

    def __repr__(self):
        return f"PlanarSystem(omega={self.omega!r})"


class CompanionForm:
    """Pointwise companion system ``(x, x')`` of a scalar ODE.

    Used for integration when ``p`` is not constant, where the companion
    entries ``-r/p`` and ``-q/p`` are no longer trig polynomials but are
    perfectly evaluable.  Requires ``p`` bounded away from zero on the period.
    """

    __slots__ = ("ode",)

    def __init__(self, ode):
        object.__setattr__(self, "ode", ode)

    def __setattr__(self, name, value):
        raise AttributeError("CompanionForm is immutable")

    @property
    def omega(self):
        return self.ode.omega

    @property
    def period(self):
        return self.ode.period

    def values(self, ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        p = self.ode.p.evaluate(ts)
        q = self.ode.q.evaluate(ts)
        r = self.ode.r.evaluate(ts)
        scale = self.ode.p.max_coeff()
        if np.abs(p).min() < 1e-9 * scale:
            raise ProblemError("leading coefficient vanishes on the period; singular ODE")
        out = np.zeros(ts.shape + (2, 2), dtype=float)
        out[..., 0, 1] = 1.0
        out[..., 1, 0] = (-r / p).real
        out[..., 1, 1] = (-q / p).real
        return out

    def trace_mean(self):
        from .numerics import gauss_legendre

        T = self.period
        integral = gauss_legendre(
            lambda t: self.ode.q.evaluate(t) / self.ode.p.evaluate(t), 0.0, T, nodes=64, panels=8
        )
        return -complex(integral) / T


@dataclass(frozen=True)
class HillForm:
    """Canonical ``y'' + f(t) y = 0`` plus the exponent shift to the original."""

    f: TrigPoly
    shift: complex

    def ode(self):
        one = TrigPoly.constant(1.0, self.f.omega)
        return ScalarODE(one, TrigPoly.zero(self.f.omega), self.f)


def hill_transform(ode):
    """Eliminate the first-derivative term of a monic-reducible scalar ODE.

    With ``a = q/p`` and ``b = r/p`` (``p`` constant), the substitution
    ``x = y exp(-(1/2) int a)`` yields ``y'' + f y = 0`` with
    ``f = b - a'/2 - a^2/4``.  Exponents of the original equation are the
    Hill-form exponents plus ``shift = -mean(a)/2``.
    """
    p0 = ode.leading_constant()
    if p0 is None:
        raise ProblemError("Hill transform needs a constant leading coefficient")
    a = ode.q * (1.0 / p0)
    b = ode.r * (1.0 / p0)
    f = b - a.differentiate() * 0.5 - (a * a) * 0.25
    shift = -a.a0 / 4.0
    return HillForm(f, shift)


def scalar_to_system(ode):
    """Companion planar system of a constant-leading-coefficient scalar ODE."""
    p0 = ode.leading_constant()
    if p0 is None:
        raise ProblemError(
            "companion form needs a constant leading coefficient; "
            "use CompanionForm for pointwise integration"
        )
    omega = ode.omega
    return PlanarSystem(
        TrigPoly.zero(omega),
        TrigPoly.constant(1.0, omega),
        ode.r * (-1.0 / p0),
        ode.q * (-1.0 / p0),
    )


def system_to_scalar(sys):
    """Eliminate one state of a planar system into a scalar second-order ODE.

    Eliminating ``z2`` (possible when ``a12`` is not identically zero) gives
    an equation for ``z1`` with

        p = a12
        q = -(a11 a12 + a12' + a22 a12)
        r = a11 a12' - a12 a11' + a11 a12 a22 - a12^2 a21

    If ``a12`` vanishes identically the same elimination with indices swapped
    produces an equation for ``z2``.  Coefficients are exact products, so
    ``p`` is generally non-constant.
    """
    a11, a12, a21, a22 = sys.entries()
    if not a12.is_zero(1e-14):
        pass
    elif not a21.is_zero(1e-14):
        a11, a22 = a22, a11
        a12, a21 = a21, a12
    else:
        raise DecoupledSystemError("both off-diagonal entries vanish; system is decoupled")
    d12 = a12.differentiate()
    p = a12
    q = -(a11 * a12 + d12 + a22 * a12)
    r = a11 * d12 - a12 * a11.differentiate() + a11 * a12 * a22 - a12 * a12 * a21
    return ScalarODE(p, q, r)


class Boundedness(enum.Enum):
    ALL_BOUNDED = "all_bounded"
    UNSTABLE_REAL_PART = "unstable_real_part"
    INCONCLUSIVE = "inconclusive"


def boundedness_criterion(f, samples=4096):
    """Sufficient boundedness test for ``y'' + f(t) y = 0``.

    ``ALL_BOUNDED`` when ``min f > 0`` and ``T int_0^T f <= 4``;
    ``UNSTABLE_REAL_PART`` when ``max f < 0``; ``INCONCLUSIVE`` otherwise.
    Extrema are estimated on a dense grid, tightened by the coefficient-sum
    bound on ``|f'|`` so the sign conclusions are conservative.
    """
    scale = max(f.max_coeff(), 1.0)
    if max(np.abs(f.a.imag).max(), np.abs(f.b.imag).max()) > 1e-12 * scale:
        raise ProblemError("boundedness criterion needs a real-valued f")
    T = f.period
    ts = np.linspace(0.0, T, samples, endpoint=False)
    vals = f.evaluate(ts).real
    k = np.arange(f.degree + 1) * f.omega
    lip = float(k @ (np.abs(f.a) + np.abs(f.b)))
    slack = lip * (T / samples) / 2.0
    fmin = vals.min() - slack
    fmax = vals.max() + slack
    weighted_integral = T * T * f.a[0].real / 2.0  # T * int_0^T f dt
    if fmin > 0.0 and weighted_integral <= 4.0:
        return Boundedness.ALL_BOUNDED
    if fmax < 0.0:
        return Boundedness.UNSTABLE_REAL_PART
    return Boundedness.INCONCLUSIVE


# -- built-in problem catalog -------------------------------------------------


def _require_real(name, value):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ProblemError(f"catalog parameter {name!r} must be a real number") from None
    if not math.isfinite(v):
        raise ProblemError(f"catalog parameter {name!r} must be finite")
    return v


def _mathieu(omega=1.0, alpha=0.5):
    """``x'' + omega^2 (1 - alpha cos t) x = 0`` on fundamental frequency 1."""
    w = _require_real("omega", omega)
    al = _require_real("alpha", alpha)
    one = TrigPoly.constant(1.0, 1.0)
    r = TrigPoly(1.0, [2.0 * w * w, -al * w * w])
    return ScalarODE(one, TrigPoly.zero(1.0), r)


def _marcus_yamabe():
    """Periodic system with pointwise-stable eigenvalues but an unstable solution.

    Entries are stored in double-angle form on fundamental frequency 1
    (period 2 pi), e.g. ``-1 + (3/2) cos^2 t = -1/4 + (3/4) cos 2t``.
    """
    a11 = TrigPoly(1.0, [-0.5, 0.0, 0.75])
    a12 = TrigPoly(1.0, [2.0, 0.0, 0.0], [0.0, 0.0, -0.75])
    a21 = TrigPoly(1.0, [-2.0, 0.0, 0.0], [0.0, 0.0, -0.75])
    a22 = TrigPoly(1.0, [-0.5, 0.0, -0.75])
    return PlanarSystem(a11, a12, a21, a22)


def _commuting_example():
    """``a11 = -1, a12 = 2 + sin t, a21 = -a12, a22 = -1`` (commutes with its primitive)."""
    a11 = TrigPoly.constant(-1.0, 1.0)
    a12 = TrigPoly(1.0, [4.0, 0.0], [0.0, 1.0])
    a21 = -a12
    a22 = TrigPoly.constant(-1.0, 1.0)
    return PlanarSystem(a11, a12, a21, a22)


_CATALOG = {
    "mathieu": (_mathieu, ("omega", "alpha")),
    "marcus_yamabe": (_marcus_yamabe, ()),
    "commuting_example": (_commuting_example, ()),
}


def catalog_entries():
    """Mapping of catalog problem names to their parameter names."""
    return {name: params for name, (_, params) in _CATALOG.items()}


def catalog(name, **params):
    """Build a named catalog problem; unknown names and parameters error."""
    try:
        builder, allowed = _CATALOG[name]
    except KeyError:
        known = ", ".join(sorted(_CATALOG))
        raise ProblemError(f"unknown catalog problem {name!r}; known: {known}") from None
    extra = set(params) - set(allowed)
    if extra:
        raise ProblemError(f"unknown parameter(s) {sorted(extra)} for {name!r}")
    return builder(**params)
