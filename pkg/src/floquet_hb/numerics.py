"""Small dense linear-algebra and root-finding kernels.

Everything here is a thin, checked wrapper over LAPACK via numpy: companion
matrices for polynomial roots (with a Newton polish on top), SVD for smallest
singular directions, a closed-form 2x2 eigensolver, and composite
Gauss-Legendre quadrature.  Matrices are plain ``numpy.ndarray`` values.
"""

import cmath

import numpy as np

__all__ = [
    "poly_roots",
    "smallest_singular_direction",
    "smallest_singular_directions",
    "eig2x2",
    "gauss_legendre",
]

_MAX_DIM = 64
_NEWTON_STEPS = 20


def poly_roots(coeffs):
    """All complex roots of ``sum coeffs[k] x^k`` (low-to-high coefficients).

    Roots come from the eigenvalues of the (LAPACK-balanced) companion matrix
    and are each polished by up to 20 Newton steps, keeping the iterate with
    the smallest residual.  Multiplicities appear as repeated entries.
    """
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    if c.ndim != 1:
        raise ValueError("coefficients must be one-dimensional")
    # strip exactly-zero leading (high-order) coefficients
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        raise ValueError("all-zero polynomial has no well-defined roots")
    c = c[: nz[-1] + 1]
    if c.size == 1:
        return np.zeros(0, dtype=complex)
    companion = np.polynomial.polynomial.polycompanion(c)
    roots = np.linalg.eigvals(companion)
    dc = np.polynomial.polynomial.polyder(c)
    polished = np.empty_like(roots)
    for i, r in enumerate(roots):
        best = r
        best_val = abs(np.polynomial.polynomial.polyval(r, c))
        x = r
        for _ in range(_NEWTON_STEPS):
            px = np.polynomial.polynomial.polyval(x, c)
            dpx = np.polynomial.polynomial.polyval(x, dc)
            if dpx == 0:
                break
            x = x - px / dpx
            val = abs(np.polynomial.polynomial.polyval(x, c))
            if val < best_val:
                best, best_val = x, val
            if val == 0.0:
                break
        polished[i] = best
    return polished


def smallest_singular_direction(m):
    """Right singular vector of the smallest singular value.

    Returns ``(v, sigma_min, sigma_next)`` with ``m @ v`` of norm
    ``sigma_min``; the gap to ``sigma_next`` tells whether the near-null
    direction is isolated.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    if m.shape[0] > _MAX_DIM:
        raise ValueError(f"matrix dimension {m.shape[0]} exceeds supported {_MAX_DIM}")
    _, s, vh = np.linalg.svd(m)
    v = np.conj(vh[-1])
    sigma_min = float(s[-1])
    sigma_next = float(s[-2]) if s.size >= 2 else float("inf")
    return v, sigma_min, sigma_next


def smallest_singular_directions(m, count):
    """Right singular vectors of the ``count`` smallest singular values.

    Returns ``(V, s)``: column ``V[:, j]`` belongs to the ``j``-th smallest
    singular value, and ``s`` is the full singular value array in descending
    order.  Needed where the near-null space may have dimension above one
    (semisimple repeated exponents).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    if m.shape[0] > _MAX_DIM:
        raise ValueError(f"matrix dimension {m.shape[0]} exceeds supported {_MAX_DIM}")
    count = int(count)
    if count < 1 or count > m.shape[0]:
        raise ValueError(f"count must be in 1..{m.shape[0]}, got {count}")
    _, s, vh = np.linalg.svd(m)
    V = np.conj(vh[::-1][:count].T)
    return V, s.astype(float)


def eig2x2(m):
    """Eigenvalues of a 2x2 matrix by the stabilised closed form.

    The discriminant is evaluated as ``((a-d)/2)^2 + b c`` and the smaller
    root is recovered from the determinant to avoid cancellation.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    a, b = m[0, 0], m[0, 1]
    c, d = m[1, 0], m[1, 1]
    mean = (a + d) / 2.0
    det = a * d - b * c
    disc = ((a - d) / 2.0) ** 2 + b * c
    s = cmath.sqrt(disc)
    hi = mean + s if abs(mean + s) >= abs(mean - s) else mean - s
    if hi == 0:
        return 0j, 0j
    return complex(hi), complex(det / hi)


def gauss_legendre(f, a, b, nodes=32, panels=8):
    """Composite Gauss-Legendre quadrature of a vectorised integrand.

    ``nodes`` per panel must be one of 16, 32, 64; the interval is split into
    ``panels`` equal panels.  ``f`` receives an ndarray of abscissae and must
    return values of the same shape.
    """
    if nodes not in (16, 32, 64):
        raise ValueError("nodes per panel must be one of 16, 32, 64")
    if panels < 1:
        raise ValueError("need at least one panel")
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(a, b, panels + 1)
    total = 0.0 + 0.0j
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = (lo + hi) / 2.0
        half = (hi - lo) / 2.0
        total = total + half * (w @ np.asarray(f(mid + half * x)))
    if abs(total.imag) == 0.0:
        return total.real
    return complex(total)
