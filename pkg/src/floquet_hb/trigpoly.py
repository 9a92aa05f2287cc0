"""Exact arithmetic on truncated trigonometric (Fourier) polynomials.

The coefficient convention stores the constant term doubled: a polynomial with
coefficients ``(a0, a_k, b_k)`` on fundamental frequency ``omega`` has value

    a0/2 + sum_k  a_k cos(k omega t) + b_k sin(k omega t)

so coefficient lists line up with the classical Fourier-series normalisation.
Coefficients are complex; real problems simply carry zero imaginary parts.
Instances are immutable and every operation is pure, so values are safe to
share between threads.

Products are computed exactly through the complex-exponential representation
(a convolution of sideband coefficients), never through sampling or FFTs.
Binary operations between polynomials on different fundamentals re-index both
onto the common fundamental when the frequency ratio is rational, and raise
:class:`FrequencyMismatchError` otherwise.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "TRIM_TOL",
    "FrequencyMismatchError",
    "TrigPoly",
    "SecularFunction",
    "align",
]

# trailing coefficients below this magnitude are dropped after each operation
TRIM_TOL = 1e-15

# relative tolerance for treating two fundamentals as identical, and for
# accepting a rational fit of their ratio
_OMEGA_RTOL = 1e-9
_MAX_RATIO_DEN = 512


class FrequencyMismatchError(ValueError):
    """Two operands live on incommensurable fundamental frequencies."""


class TrigPoly:
    """Immutable trigonometric polynomial ``a0/2 + sum a_k cos + b_k sin``."""

    __slots__ = ("omega", "a", "b")

    def __init__(self, omega, a, b=None):
        omega = float(omega)
        if not math.isfinite(omega) or omega <= 0.0:
            raise ValueError(f"fundamental frequency must be positive, got {omega}")
        a = np.atleast_1d(np.asarray(a, dtype=complex)).copy()
        if a.ndim != 1 or a.size == 0:
            raise ValueError("cosine coefficients must be a non-empty 1-d sequence")
        if b is None:
            b = np.zeros_like(a)
        else:
            b = np.atleast_1d(np.asarray(b, dtype=complex)).copy()
            if b.ndim != 1:
                raise ValueError("sine coefficients must be 1-d")
        n = max(a.size, b.size)
        a = np.concatenate([a, np.zeros(n - a.size, dtype=complex)])
        b = np.concatenate([b, np.zeros(n - b.size, dtype=complex)])
        b[0] = 0.0  # sin(0) carries no information
        # trim trailing coefficients below TRIM_TOL
        keep = n
        while keep > 1 and abs(a[keep - 1]) < TRIM_TOL and abs(b[keep - 1]) < TRIM_TOL:
            keep -= 1
        a = a[:keep]
        b = b[:keep]
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, name, value):
        raise AttributeError("TrigPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, omega):
        return cls(omega, [0.0])

    @classmethod
    def constant(cls, value, omega):
        """Constant function ``value`` (stored as a0 = 2*value)."""
        return cls(omega, [2.0 * complex(value)])

    @classmethod
    def cosine(cls, k, omega, amplitude=1.0):
        a = np.zeros(k + 1, dtype=complex)
        a[k] = amplitude if k else 2.0 * amplitude
        return cls(omega, a)

    @classmethod
    def sine(cls, k, omega, amplitude=1.0):
        if k < 1:
            raise ValueError("sine harmonic index must be >= 1")
        b = np.zeros(k + 1, dtype=complex)
        b[k] = amplitude
        return cls(omega, np.zeros(k + 1, dtype=complex), b)

    @classmethod
    def from_coefficient_vector(cls, omega, vec):
        """Inverse of :meth:`coefficient_vector`: ``[a0, a1, b1, ..., an, bn]``."""
        vec = np.asarray(vec, dtype=complex)
        if vec.ndim != 1 or vec.size % 2 == 0:
            raise ValueError("coefficient vector must have odd length 2n+1")
        n = (vec.size - 1) // 2
        a = np.zeros(n + 1, dtype=complex)
        b = np.zeros(n + 1, dtype=complex)
        a[0] = vec[0]
        a[1:] = vec[1::2]
        b[1:] = vec[2::2]
        return cls(omega, a, b)

    # -- basic queries -----------------------------------------------------

    @property
    def degree(self):
        return self.a.size - 1

    @property
    def period(self):
        return 2.0 * math.pi / self.omega

    @property
    def a0(self):
        return complex(self.a[0])

    def mean(self):
        """Average over one period, ``a0/2``."""
        return complex(self.a[0]) / 2.0

    def coefficient_vector(self, n=None):
        """Interleaved coefficients ``[a0, a1, b1, ..., an, bn]`` (length 2n+1)."""
        if n is None:
            n = self.degree
        if self.degree > n:
            raise ValueError(f"degree {self.degree} exceeds requested order {n}")
        vec = np.zeros(2 * n + 1, dtype=complex)
        vec[0] = self.a[0]
        d = self.degree
        vec[1 : 2 * d : 2] = self.a[1:]
        vec[2 : 2 * d + 1 : 2] = self.b[1:]
        return vec

    def max_coeff(self):
        return float(max(np.abs(self.a).max(), np.abs(self.b).max()))

    def is_zero(self, tol=1e-12):
        return self.max_coeff() <= tol

    def __repr__(self):
        return f"TrigPoly(omega={self.omega!r}, degree={self.degree})"

    # -- evaluation --------------------------------------------------------

    def evaluate(self, t):
        """Value at time(s) ``t`` (scalar or ndarray), complex-valued."""
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        ts = np.atleast_1d(t_arr)
        val = np.full(ts.shape, self.a[0] / 2.0, dtype=complex)
        n = self.degree
        if n >= 1:
            phase = np.multiply.outer(ts, np.arange(1, n + 1) * self.omega)
            val = val + np.cos(phase) @ self.a[1:] + np.sin(phase) @ self.b[1:]
        return complex(val[0]) if scalar else val

    __call__ = evaluate

    # -- exponential representation (for exact products) --------------------

    def _exp_coeffs(self):
        """Sideband coefficients c[-n..n] with value = sum c_k e^{i k w t}."""
        n = self.degree
        c = np.zeros(2 * n + 1, dtype=complex)
        c[n] = self.a[0] / 2.0
        if n >= 1:
            c[n + 1 :] = (self.a[1:] - 1j * self.b[1:]) / 2.0
            c[n - 1 :: -1] = (self.a[1:] + 1j * self.b[1:]) / 2.0
        return c

    @classmethod
    def _from_exp(cls, omega, c):
        n = (c.size - 1) // 2
        a = np.zeros(n + 1, dtype=complex)
        b = np.zeros(n + 1, dtype=complex)
        a[0] = 2.0 * c[n]
        if n >= 1:
            plus = c[n + 1 :]
            minus = c[n - 1 :: -1]
            a[1:] = plus + minus
            b[1:] = 1j * (plus - minus)
        return cls(omega, a, b)

    # -- algebra -----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, TrigPoly):
            x, y = _aligned(self, other)
            n = max(x.degree, y.degree)
            a = np.zeros(n + 1, dtype=complex)
            b = np.zeros(n + 1, dtype=complex)
            a[: x.degree + 1] += x.a
            b[: x.degree + 1] += x.b
            a[: y.degree + 1] += y.a
            b[: y.degree + 1] += y.b
            return TrigPoly(x.omega, a, b)
        other = complex(other)
        a = self.a.copy()
        a[0] += 2.0 * other
        return TrigPoly(self.omega, a, self.b)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly(self.omega, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-other if isinstance(other, TrigPoly) else -complex(other))

    def __rsub__(self, other):
        return (-self) + complex(other)

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            x, y = _aligned(self, other)
            c = np.convolve(x._exp_coeffs(), y._exp_coeffs())
            return TrigPoly._from_exp(x.omega, c)
        other = complex(other)
        return TrigPoly(self.omega, self.a * other, self.b * other)

    __rmul__ = __mul__

    def conjugate(self):
        return TrigPoly(self.omega, np.conj(self.a), np.conj(self.b))

    def truncated(self, n):
        """Drop all harmonics above ``n``."""
        if self.degree <= n:
            return self
        return TrigPoly(self.omega, self.a[: n + 1], self.b[: n + 1])

    def modulated(self, m):
        """Exact product with ``e^{i m omega t}`` (integer harmonic shift)."""
        m = int(m)
        if m == 0:
            return self
        n = self.degree
        c = self._exp_coeffs()
        width = n + abs(m)
        shifted = np.zeros(2 * width + 1, dtype=complex)
        lo = width - n + m
        shifted[lo : lo + c.size] = c
        return TrigPoly._from_exp(self.omega, shifted)

    def reindexed(self, m):
        """Same function viewed on the finer fundamental ``omega/m``."""
        m = int(m)
        if m == 1:
            return self
        if m < 1:
            raise ValueError("re-index factor must be a positive integer")
        n = self.degree
        a = np.zeros(m * n + 1, dtype=complex)
        b = np.zeros(m * n + 1, dtype=complex)
        a[::m] = self.a
        b[::m] = self.b
        return TrigPoly(self.omega / m, a, b)

    # -- calculus ----------------------------------------------------------

    def differentiate(self):
        k = np.arange(self.degree + 1) * self.omega
        return TrigPoly(self.omega, k * self.b, -k * self.a)

    def primitive(self):
        """Antiderivative with value 0 at t = 0, as slope + periodic part."""
        slope = self.a[0] / 2.0
        n = self.degree
        a = np.zeros(n + 1, dtype=complex)
        b = np.zeros(n + 1, dtype=complex)
        if n >= 1:
            k = np.arange(1, n + 1) * self.omega
            a[1:] = -self.b[1:] / k
            b[1:] = self.a[1:] / k
        a[0] = -2.0 * a[1:].sum()  # fixes value(0) = 0
        return SecularFunction(complex(slope), TrigPoly(self.omega, a, b))

    # -- integrals and inner products ---------------------------------------

    def exp_weighted_norm_integral(self, c):
        """Closed form of ``int_0^T e^{2 Re(c) t} |P(t)|^2 dt`` over one period."""
        q = self * self.conjugate()
        s = 2.0 * complex(c).real
        T = self.period
        if s == 0.0:
            base = T
            growth = 0.0
        else:
            growth = math.expm1(s * T)
            base = growth / s
        total = (q.a[0] / 2.0) * base
        n = q.degree
        if n >= 1 and s != 0.0:
            w = np.arange(1, n + 1) * q.omega
            denom = s * s + w * w
            total = total + q.a[1:] @ (s * growth / denom)
            total = total + q.b[1:] @ (-w * growth / denom)
        return max(float(np.real(total)), 0.0)

    def l2_inner(self, other):
        """Period-averaged inner product ``(1/T) int P conj(Q) dt``."""
        x, y = _aligned(self, other)
        n = max(x.degree, y.degree)
        xa = np.zeros(n + 1, dtype=complex)
        xb = np.zeros(n + 1, dtype=complex)
        ya = np.zeros(n + 1, dtype=complex)
        yb = np.zeros(n + 1, dtype=complex)
        xa[: x.degree + 1] = x.a
        xb[: x.degree + 1] = x.b
        ya[: y.degree + 1] = y.a
        yb[: y.degree + 1] = y.b
        total = xa[0] * np.conj(ya[0]) / 4.0
        total += 0.5 * (xa[1:] @ np.conj(ya[1:]) + xb[1:] @ np.conj(yb[1:]))
        return complex(total)

    def l2_norm(self):
        return math.sqrt(max(self.l2_inner(self).real, 0.0))


@dataclass(frozen=True)
class SecularFunction:
    """Antiderivative of a TrigPoly: ``value(t) = slope * t + periodic(t)``."""

    slope: complex
    periodic: TrigPoly

    def value(self, t):
        return self.slope * np.asarray(t, dtype=float) + self.periodic.evaluate(t)

    __call__ = value

    def __add__(self, other):
        if not isinstance(other, SecularFunction):
            return NotImplemented
        return SecularFunction(self.slope + other.slope, self.periodic + other.periodic)

    def scaled(self, factor):
        factor = complex(factor)
        return SecularFunction(self.slope * factor, self.periodic * factor)


def _rational_ratio(rx, ry):
    """Small-denominator rational p/q with rx/ry = p/q, or None."""
    ratio = rx / ry
    frac = Fraction(ratio).limit_denominator(_MAX_RATIO_DEN)
    if frac.numerator <= 0:
        return None
    if abs(float(frac) - ratio) > _OMEGA_RTOL * ratio:
        return None
    return frac


def _aligned(x, y):
    """Re-index two polynomials onto a common fundamental frequency."""
    if abs(x.omega - y.omega) <= _OMEGA_RTOL * max(x.omega, y.omega):
        if x.omega == y.omega:
            return x, y
        # snap to one representative so results carry a single float omega
        return x, TrigPoly(x.omega, y.a, y.b)
    frac = _rational_ratio(x.omega, y.omega)
    if frac is None:
        raise FrequencyMismatchError(
            f"frequencies {x.omega} and {y.omega} have no small rational ratio; "
            "no common period exists"
        )
    p, q = frac.numerator, frac.denominator
    common = x.omega / p
    xr = x.reindexed(p)
    yr = y.reindexed(q)
    if yr.omega != common:
        yr = TrigPoly(common, yr.a, yr.b)
    return xr, yr


def align(*polys):
    """Re-index any number of polynomials onto their common fundamental."""
    if not polys:
        return ()
    base = polys[0]
    for p in polys[1:]:
        base, _ = _aligned(base, p)
    return tuple(_aligned(base, p)[1] for p in polys)
