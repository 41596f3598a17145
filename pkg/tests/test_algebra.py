import numpy as np
import pytest

from holomaplab import algebra
from holomaplab.errors import DimensionMismatch, SingularMatrix

# closed form: kappa([[1,3],[0,1]]) = sigma_max^2 = ((3+sqrt(13))/2)^2 since det = 1
KAPPA_SHEAR_13 = (11.0 + 3.0 * np.sqrt(13.0)) / 2.0


def random_unitary(k, rng):
    q, r = np.linalg.qr(rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestSpectralNorm:
    def test_identity(self):
        assert algebra.spectral_norm(np.eye(2)) == pytest.approx(1.0, abs=1e-14)

    def test_diagonal(self):
        assert algebra.spectral_norm(np.diag([2.0, 0.5])) == pytest.approx(2.0, abs=1e-14)

    def test_antidiagonal(self):
        assert algebra.spectral_norm([[0, 3], [1, 0]]) == pytest.approx(3.0, abs=1e-13)

    def test_zero_matrix(self):
        assert algebra.spectral_norm(np.zeros((3, 3))) == 0.0

    def test_relative_accuracy_small_k(self):
        rng = np.random.default_rng(11)
        for k in range(1, 9):
            d = np.sort(rng.random(k))[::-1] + 0.1
            a = random_unitary(k, rng) @ np.diag(d) @ random_unitary(k, rng)
            assert algebra.spectral_norm(a) == pytest.approx(d[0], rel=1e-12)


class TestInvert:
    def test_identity(self):
        assert np.allclose(algebra.invert(np.eye(2)), np.eye(2), atol=0)

    def test_diagonal(self):
        assert np.allclose(algebra.invert(np.diag([2.0, 0.5])), np.diag([0.5, 2.0]), atol=1e-15)

    def test_antidiagonal_closed_form(self):
        inv = algebra.invert([[0, 0.5], [1, 0]])
        assert np.allclose(inv, [[0, 1], [2, 0]], atol=1e-14)

    def test_singular_raises(self):
        with pytest.raises(SingularMatrix):
            algebra.invert([[1, 1], [1, 1]])
        with pytest.raises(SingularMatrix):
            algebra.invert(np.zeros((2, 2)))

    def test_residual_bound(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            res = algebra.spectral_norm(a @ algebra.invert(a) - np.eye(4))
            assert res <= 1e-10 * algebra.kappa(a)

    def test_double_inversion(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            d = np.array([1.0, 10.0 ** (-6 * rng.random()), 10.0 ** (-3 * rng.random())])
            a = random_unitary(3, rng) @ np.diag(d) @ random_unitary(3, rng)
            assert algebra.kappa(a) <= 1e6
            back = algebra.invert(algebra.invert(a))
            assert algebra.spectral_norm(back - a) <= 1e-9 * algebra.spectral_norm(a)


class TestKappa:
    def test_identity(self):
        assert algebra.kappa(np.eye(2)) == pytest.approx(1.0, abs=1e-14)

    def test_diagonal(self):
        assert algebra.kappa(np.diag([2.0, 0.5])) == pytest.approx(4.0, abs=1e-13)

    def test_shear_closed_form(self):
        # oracle: explicit 2x2 SVD of [[1,3],[0,1]] computed by hand
        assert algebra.kappa([[1, 3], [0, 1]]) == pytest.approx(KAPPA_SHEAR_13, rel=1e-12)

    def test_singular_is_inf(self):
        assert algebra.kappa([[1, 1], [1, 1]]) == np.inf
        assert algebra.kappa(np.zeros((2, 2))) == np.inf

    def test_at_least_one_and_unitary_equality(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            u = random_unitary(3, rng)
            s = (0.1 + rng.random()) * np.exp(2j * np.pi * rng.random())
            assert abs(algebra.kappa(s * u) - 1.0) <= 1e-10
            a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            assert algebra.kappa(a) >= 1.0

    def test_submultiplicative_norm(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            lhs = algebra.spectral_norm(a @ b)
            rhs = algebra.spectral_norm(a) * algebra.spectral_norm(b)
            assert lhs <= rhs * (1 + 1e-12)


class TestEigenModuli:
    def test_identity(self):
        assert np.allclose(algebra.eigen_moduli(np.eye(2)), [1, 1], atol=1e-14)

    def test_diagonal(self):
        assert np.allclose(algebra.eigen_moduli(np.diag([2.0, 0.5])), [0.5, 2.0], atol=1e-14)

    def test_antidiagonal_hand_roots(self):
        # oracle: roots of lambda^2 = 0.5
        mods = algebra.eigen_moduli([[0, 0.5], [1, 0]])
        assert np.allclose(mods, [np.sqrt(0.5)] * 2, atol=1e-14)

    def test_ratio_bounded_by_kappa(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            mods = algebra.eigen_moduli(a)
            assert mods[-1] / mods[0] <= algebra.kappa(a) + 1e-10


class TestValidation:
    def test_vector_shape(self):
        with pytest.raises(DimensionMismatch):
            algebra.as_vector([[1, 2], [3, 4]])
        with pytest.raises(DimensionMismatch):
            algebra.as_vector([])

    def test_matrix_shape(self):
        with pytest.raises(DimensionMismatch):
            algebra.as_matrix([[1, 2, 3], [4, 5, 6]])

    def test_finite_entries(self):
        with pytest.raises(ValueError):
            algebra.as_vector([1.0, np.inf])
        with pytest.raises(ValueError):
            algebra.as_matrix([[np.nan, 0], [0, 1]])
