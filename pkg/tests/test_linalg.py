import numpy as np
import pytest

from rgb1iwei._linalg import (SymInverse, cholesky_factor, cholesky_solve,
                              jacobi_eigh, sym_inverse)
from rgb1iwei.errors import DomainError


def _random_spd(rng, n=5, spread=3.0):
    q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    vals = np.exp(rng.uniform(-spread, spread, n))
    return (q * vals) @ q.T


class TestCholesky:
    def test_factor_reconstructs(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            a = _random_spd(rng)
            low = cholesky_factor(a)
            assert low is not None
            np.testing.assert_allclose(low @ low.T, a, rtol=0, atol=1e-10)

    def test_indefinite_returns_none(self):
        a = np.diag([1.0, -2.0, 3.0])
        assert cholesky_factor(a) is None

    def test_solve_matches_numpy(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            a = _random_spd(rng)
            b = rng.standard_normal(5)
            x = cholesky_solve(cholesky_factor(a), b)
            np.testing.assert_allclose(x, np.linalg.solve(a, b), rtol=1e-8)

    def test_matrix_rhs(self):
        rng = np.random.default_rng(7)
        a = _random_spd(rng)
        inv = cholesky_solve(cholesky_factor(a), np.eye(5))
        np.testing.assert_allclose(inv @ a, np.eye(5), rtol=0, atol=1e-9)

    def test_rejects_nonsquare(self):
        with pytest.raises(DomainError):
            cholesky_factor(np.zeros((2, 3)))
        with pytest.raises(DomainError):
            cholesky_factor(np.array([[np.nan, 0.0], [0.0, 1.0]]))


class TestJacobi:
    def test_eigenvalues_match_numpy(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            m = rng.standard_normal((5, 5))
            a = m + m.T
            vals, vecs = jacobi_eigh(a)
            np.testing.assert_allclose(vals, np.linalg.eigvalsh(a),
                                       rtol=1e-10, atol=1e-10)
            np.testing.assert_allclose(vecs @ vecs.T, np.eye(5),
                                       rtol=0, atol=1e-12)
            np.testing.assert_allclose((vecs * vals) @ vecs.T, a,
                                       rtol=0, atol=1e-10)

    def test_diagonal_input(self):
        vals, vecs = jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(vals, [1.0, 2.0, 3.0])
        np.testing.assert_allclose(np.abs(vecs), np.eye(3)[:, [1, 2, 0]])


class TestSymInverse:
    def test_well_conditioned_uses_cholesky(self):
        rng = np.random.default_rng(9)
        a = _random_spd(rng, spread=2.0)
        res = sym_inverse(a)
        assert not res.used_pseudo
        np.testing.assert_allclose(res.inverse, np.linalg.inv(a),
                                   rtol=1e-8, atol=1e-12)
        assert res.cond_number == pytest.approx(np.linalg.cond(a), rel=1e-8)

    def test_singular_goes_pseudo(self):
        v = np.array([1.0, 2.0, 0.5, -1.0, 0.25])
        a = np.outer(v, v) + np.diag([1.0, 2.0, 0.0, 0.0, 3.0])
        a = 0.5 * (a + a.T)
        res = sym_inverse(a)
        assert res.used_pseudo
        np.testing.assert_allclose(res.inverse, np.linalg.pinv(a),
                                   rtol=1e-8, atol=1e-10)

    def test_cond_limit_forces_pseudo(self):
        a = np.diag([1.0, 1e-14])
        res = sym_inverse(a, cond_limit=1e12)
        assert res.used_pseudo
        assert res.cond_number > 1e12

    def test_indefinite_pseudo(self):
        a = np.diag([2.0, -3.0, 1.0])
        res = sym_inverse(a)
        assert res.used_pseudo
        np.testing.assert_allclose(res.inverse, np.diag([0.5, -1 / 3.0, 1.0]),
                                   rtol=1e-12)

    def test_result_type(self):
        res = sym_inverse(np.eye(2))
        assert isinstance(res, SymInverse)
        assert res.cond_number == 1.0
