import numpy as np
import pytest
from conftest import random_nondominant_model

from starcmdfa import RegimeError, canonicalize
from starcmdfa.nondominant import (beta_nn, boundary_certificate,
                                   build_certificate, choose_signs,
                                   null_basis, solve_nondominant)


class TestChooseSigns:
    def test_aligned_when_leading_square_dominates(self):
        theta = np.array([1.0, 0.7, 0.5])
        signs = choose_signs(theta)
        np.testing.assert_array_equal(signs, [1.0, 1.0])
        np.testing.assert_allclose(beta_nn(theta, signs), 0.26 / 0.70, rtol=1e-12)

    def test_balanced_for_equal_snr(self):
        theta = np.full(3, 0.5773502691896258)
        signs = choose_signs(theta)
        assert set(signs) == {1.0, -1.0}
        np.testing.assert_allclose(beta_nn(theta, signs), 0.5, rtol=1e-12)
        # the aligned choice would be invalid here
        assert beta_nn(theta, np.ones(2)) < 0

    def test_greedy_balanced_example(self):
        theta = np.array([0.75, 0.5773502691896258, 0.5773502691896258])
        signs = choose_signs(theta)
        np.testing.assert_allclose(beta_nn(theta, signs), 0.15625, rtol=1e-10)

    def test_random_nondominant_beta_in_unit_interval(self, rng):
        for _ in range(100):
            n = int(rng.integers(3, 9))
            m = random_nondominant_model(rng, n)
            signs = choose_signs(m.theta)
            b = beta_nn(m.theta, signs)
            assert -1e-12 <= b <= 1.0 + 1e-12

    def test_beta_at_most_one_follows_from_nondominance(self, rng):
        # aligned signing: beta_nn <= 1 whenever theta_1 <= sum(rest)
        for _ in range(50):
            m = random_nondominant_model(rng, int(rng.integers(3, 7)))
            if m.theta[0] ** 2 >= np.sum(m.theta[1:] ** 2):
                assert beta_nn(m.theta, np.ones(m.n - 1)) <= 1.0 + 1e-12


class TestCertificate:
    def test_null_basis_columns_annihilated(self, rng):
        m = random_nondominant_model(rng, 5)
        c = np.sign(m.alpha[1:]) / np.sqrt(1 - m.alpha[1:] ** 2)
        V = null_basis(m.alpha, c)
        sigma_t = np.outer(m.alpha, m.alpha)
        assert np.linalg.norm(sigma_t @ V) < 1e-12

    def test_row_norms_equal_loadings(self):
        m = canonicalize([0.5, 0.5, 0.5])
        T = build_certificate(m)
        np.testing.assert_allclose(np.sum(T**2, axis=1), 4.0 / 3.0, rtol=1e-12)

    def test_boundary_single_column(self):
        m = canonicalize([0.6, 0.6])
        T = boundary_certificate(m)
        assert T.shape == (2, 1)
        np.testing.assert_allclose(T.ravel() ** 2, 1.5625, rtol=1e-12)

    def test_nullspace_exact(self, rng):
        for _ in range(20):
            m = random_nondominant_model(rng, int(rng.integers(3, 8)))
            T = build_certificate(m)
            sigma_t = np.outer(m.alpha, m.alpha)
            assert np.linalg.norm(sigma_t @ T) <= 1e-10 * m.n

    def test_gram_diagonal_matches_noise_precisions(self, rng):
        for _ in range(20):
            m = random_nondominant_model(rng, int(rng.integers(3, 8)))
            T = build_certificate(m)
            target = 1.0 / (1.0 - m.alpha**2)
            np.testing.assert_allclose(np.diag(T @ T.T), target, rtol=1e-10)


class TestSolveNondominant:
    def test_equal_loadings(self):
        d, sigma_t, rank, t = solve_nondominant(canonicalize([0.5, 0.5, 0.5]))
        np.testing.assert_array_equal(d, [0.75, 0.75, 0.75])
        np.testing.assert_allclose(sigma_t, np.full((3, 3), 0.25), rtol=1e-15)
        assert rank == 1 and t.shape == (3, 3)

    def test_snr_specified_loadings(self):
        # theta = (1.0, 0.7, 0.5)
        theta = np.array([1.0, 0.7, 0.5])
        m = canonicalize(theta / np.sqrt(1 + theta**2))
        d, _, _, _ = solve_nondominant(m)
        np.testing.assert_allclose(
            d, [0.5, 1.0 / 1.49, 0.8], rtol=1e-12)

    def test_boundary_has_single_column(self):
        d, _, rank, t = solve_nondominant(canonicalize([0.6, 0.6]))
        np.testing.assert_array_equal(d, [0.64, 0.64])
        assert rank == 1 and t.shape == (2, 1)

    def test_rejects_dominant(self):
        with pytest.raises(RegimeError):
            solve_nondominant(canonicalize([0.8, 0.3, 0.3]))
