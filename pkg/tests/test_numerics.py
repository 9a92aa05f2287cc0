import math

import numpy as np
import pytest

from floquet_hb.numerics import eig2x2, gauss_legendre, poly_roots, smallest_singular_direction


def test_poly_roots_reconstructs_known_roots():
    rng = np.random.default_rng(1)
    true = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    coeffs = np.polynomial.polynomial.polyfromroots(true)
    got = np.sort_complex(poly_roots(coeffs))
    np.testing.assert_allclose(got, np.sort_complex(true), atol=1e-9)


def test_poly_roots_strips_leading_zeros():
    # (x - 2)(x + 3) with two exactly-zero high-order coefficients appended
    coeffs = [-6.0, 1.0, 1.0, 0.0, 0.0]
    got = np.sort_complex(poly_roots(coeffs))
    np.testing.assert_allclose(got, [-3.0, 2.0], atol=1e-12)


def test_poly_roots_double_root():
    # (x - 1)^2 (x + 2)
    coeffs = np.polynomial.polynomial.polyfromroots([1.0, 1.0, -2.0])
    got = poly_roots(coeffs)
    assert len(got) == 3
    assert sum(abs(r - 1.0) < 1e-6 for r in got) == 2
    assert sum(abs(r + 2.0) < 1e-10 for r in got) == 1


def test_poly_roots_degenerate_inputs():
    assert poly_roots([3.0]).size == 0
    with pytest.raises(ValueError):
        poly_roots([0.0, 0.0])
    with pytest.raises(ValueError):
        poly_roots([[1.0, 2.0]])


def test_smallest_singular_direction_known_null_space():
    rng = np.random.default_rng(2)
    # build a matrix with an exact null vector by zeroing one singular value
    q1, _ = np.linalg.qr(rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))
    q2, _ = np.linalg.qr(rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))
    s = np.array([3.0, 2.0, 1.5, 1.0, 0.0])
    m = q1 @ np.diag(s) @ q2.conj().T
    v, smin, snext = smallest_singular_direction(m)
    assert smin < 1e-14
    assert snext == pytest.approx(1.0, rel=1e-12)
    assert np.linalg.norm(m @ v) < 1e-13
    assert np.linalg.norm(v) == pytest.approx(1.0, rel=1e-12)


def test_smallest_singular_direction_validates_input():
    with pytest.raises(ValueError):
        smallest_singular_direction(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        smallest_singular_direction(np.zeros((65, 65)))


def test_eig2x2_matches_characteristic_polynomial():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        l1, l2 = eig2x2(m)
        tr = m[0, 0] + m[1, 1]
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        assert l1 + l2 == pytest.approx(tr, rel=1e-12, abs=1e-12)
        assert l1 * l2 == pytest.approx(det, rel=1e-12, abs=1e-12)


def test_eig2x2_cancellation_stability():
    # widely separated eigenvalues: the small one must not lose precision
    m = np.array([[1e8, 1.0], [1.0, 1.0]])
    l1, l2 = eig2x2(m)
    small = min((l1, l2), key=abs)
    # det = 1e8 - 1, so small eigenvalue ~ (1e8-1)/1e8
    assert small.real == pytest.approx((1e8 - 1.0) / 1e8, rel=1e-10)


def test_eig2x2_rotation_and_defective():
    l1, l2 = eig2x2(np.array([[0.0, -1.0], [1.0, 0.0]]))
    got = sorted((l1, l2), key=lambda z: z.imag)
    assert got[0] == pytest.approx(-1j, abs=1e-14)
    assert got[1] == pytest.approx(1j, abs=1e-14)
    l1, l2 = eig2x2(np.array([[2.0, 1.0], [0.0, 2.0]]))
    assert l1 == pytest.approx(2.0) and l2 == pytest.approx(2.0)


def test_gauss_legendre_polynomial_exactness():
    # degree-9 polynomial integrated exactly by 16-node rule
    got = gauss_legendre(lambda x: 10 * x**9 - 3 * x**2, -1.0, 2.0, nodes=16, panels=1)
    exact = (2.0**10 - 1.0) - (2.0**3 + 1.0)
    assert got == pytest.approx(exact, rel=1e-13)


def test_gauss_legendre_transcendental_and_panels():
    got = gauss_legendre(np.exp, 0.0, 1.0, nodes=32, panels=4)
    assert got == pytest.approx(math.e - 1.0, rel=1e-14)
    got = gauss_legendre(lambda t: np.exp(1j * t), 0.0, math.pi, nodes=64, panels=2)
    assert got == pytest.approx(2j, abs=1e-13)


def test_gauss_legendre_validates_options():
    with pytest.raises(ValueError):
        gauss_legendre(np.exp, 0.0, 1.0, nodes=10)
    with pytest.raises(ValueError):
        gauss_legendre(np.exp, 0.0, 1.0, panels=0)
