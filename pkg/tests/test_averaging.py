from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polymet.averaging import (
    UnitaryAction,
    avg_operator,
    avg_vector,
    descent_lhs,
    descent_rhs,
    descent_rhs_via_nabla,
    fixed_space_projection,
    m_threshold,
    running_operator_averages,
    running_vector_averages,
)
from polymet.errors import DomainError, PreconditionError, ShapeError
from polymet.groups import OrthogonalOperator, reduce_mod, regular_representation, rotation
from polymet.instances import random_abelian_action, random_orthogonal, random_unit_vector
from polymet.leibman import LeibmanSequence, canonical_wreath_sequence
from polymet.linalg import frobenius_norm, spectral_norm
from polymet.measures import SignedMeasure, dirac, sigma_n


def powers(U, k):
    """U^k by repeated multiplication, the brute-force reference."""
    out = np.eye(U.shape[0])
    step = U if k >= 0 else U.T
    for _ in range(abs(k)):
        out = out @ step
    return out


def rot_action(theta, poly=(0, 1)):
    return UnitaryAction(LeibmanSequence.power_poly(OrthogonalOperator(rotation(theta)), list(poly)))


class TestAverages:
    def test_constant_identity(self):
        T = UnitaryAction(LeibmanSequence.constant(OrthogonalOperator(np.eye(3))))
        for mu in (sigma_n(0), sigma_n(7), SignedMeasure({2: 0.25, -1: 0.75})):
            assert np.allclose(avg_operator(T, mu), np.eye(3), atol=1e-15)

    def test_first_average(self):
        U = rotation(0.4)
        T = rot_action(0.4)
        expected = sum(powers(U, i) for i in range(2)) / 2
        assert np.allclose(avg_operator(T, sigma_n(1)), expected, atol=1e-15)

    def test_dirac(self):
        T = rot_action(1.1, (1, 2, 3))
        for i in (-3, 0, 4):
            assert np.allclose(avg_operator(T, dirac(i)), powers(rotation(1.1), 1 + 2 * i + 3 * i * i))

    def test_vector_examples(self):
        T = rot_action(0.9)
        assert np.array_equal(avg_vector(T, np.zeros(2), sigma_n(5)), np.zeros(2))
        Id = UnitaryAction(LeibmanSequence.constant(OrthogonalOperator(np.eye(2))))
        x = np.array([0.3, -2.0])
        for n in range(6):
            assert np.allclose(avg_vector(Id, x, sigma_n(n)), x)
        quarter = rot_action(np.pi / 2)
        four = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float).sum(axis=0) / 4
        assert np.allclose(avg_vector(quarter, [1.0, 0.0], sigma_n(3)), four, atol=1e-15)
        assert np.allclose(four, 0)

    def test_vector_matches_operator(self, rng):
        T = random_abelian_action(rng, dim=5)
        x = rng.standard_normal(5)
        mu = SignedMeasure({i: rng.standard_normal() for i in range(-4, 9)})
        assert np.allclose(avg_vector(T, x, mu), avg_operator(T, mu) @ x, atol=1e-13)

    def test_errors(self):
        T = rot_action(0.2)
        with pytest.raises(ShapeError):
            avg_vector(T, np.ones(3), sigma_n(2))
        with pytest.raises(DomainError):
            avg_operator(T, SignedMeasure({(0, 1): 1.0}))
        table = UnitaryAction(LeibmanSequence.explicit_table({0: OrthogonalOperator(np.eye(2))}))
        with pytest.raises(DomainError):
            avg_operator(table, sigma_n(1))

    def test_running_sums(self, rng):
        T = random_abelian_action(rng, dim=4)
        x = random_unit_vector(rng, 4)
        run = running_vector_averages(T, x, 30)
        ops = running_operator_averages(T, [0, 7, 30])
        for n in (0, 7, 30):
            direct = avg_vector(T, x, sigma_n(n))
            assert np.allclose(run[n], direct, atol=1e-13)
            assert np.allclose(ops[n] @ x, direct, atol=1e-13)


class TestLamplighterAction:
    def test_realization(self):
        T = UnitaryAction.from_lamplighter(canonical_wreath_sequence(), 2, 3)
        assert T.dim == 24
        assert T.check_orthogonal(range(-10, 11), tol=0.0)
        seq = canonical_wreath_sequence()
        for i in range(-4, 5):
            for j in range(-4, 5):
                prod = regular_representation(reduce_mod(seq[i] * seq[j], 2, 3)).matrix
                assert np.array_equal(prod, T.matrix(i) @ T.matrix(j))


class TestThreshold:
    def test_examples(self):
        assert m_threshold(0.5, 3) == 12
        assert m_threshold(0.5, 0) == 0
        assert m_threshold(0.25, 10) == 80
        assert m_threshold(0.5, 5) == 20
        assert m_threshold(0.1, 7) == 140
        with pytest.raises(DomainError):
            m_threshold(0.0, 3)

    @given(st.fractions(min_value=Fraction(1, 100), max_value=4, max_denominator=100), st.integers(0, 500))
    def test_least(self, eps, n):
        m = m_threshold(eps, n)
        assert m >= 2 * n / eps
        assert m == 0 or m - 1 < 2 * n / eps


class TestDescent:
    def test_constant(self):
        T = UnitaryAction(LeibmanSequence.constant(OrthogonalOperator(np.eye(3))))
        assert np.allclose(descent_lhs(T, 4, 9), np.eye(3))
        assert np.allclose(descent_rhs(T, 4, 9), np.eye(3))

    def test_n_zero_exact(self, rng):
        T = random_abelian_action(rng, dim=4)
        for m in (0, 3, 11):
            lhs, rhs = descent_lhs(T, 0, m), descent_rhs(T, 0, m)
            expected = T.matrix(0) @ avg_operator(T, sigma_n(m)).T
            assert np.allclose(lhs, expected, atol=1e-14)
            assert np.allclose(rhs, expected, atol=1e-14)

    def test_two_assemblies_agree(self, rng):
        T = random_abelian_action(rng, dim=3)
        assert np.allclose(descent_rhs(T, 3, 8), descent_rhs_via_nabla(T, 3, 8), atol=1e-13)

    def test_inequality_example(self, rng):
        T = random_abelian_action(rng, dim=5, degree=2)
        m = m_threshold(0.5, 5)
        assert m == 20
        diff = descent_lhs(T, 5, m) - descent_rhs(T, 5, m)
        assert spectral_norm(diff) <= 0.5 + 1e-8
        assert np.linalg.norm(diff, 2) <= 0.5 + 1e-8

    def test_lamplighter_action(self):
        T = UnitaryAction.from_lamplighter(canonical_wreath_sequence(), 2, 3)
        for n, eps in ((2, 0.5), (4, 0.25)):
            m = m_threshold(eps, n)
            assert np.linalg.norm(descent_lhs(T, n, m) - descent_rhs(T, n, m), 2) <= eps + 1e-8


class TestProperties:
    def test_contraction(self, rng):
        for _ in range(20):
            T = random_abelian_action(rng)
            x, y = rng.standard_normal(T.dim), rng.standard_normal(T.dim)
            n = int(rng.integers(0, 40))
            gap = np.linalg.norm(avg_vector(T, x, sigma_n(n)) - avg_vector(T, y, sigma_n(n)))
            assert gap <= np.linalg.norm(x - y) * (1 + 1e-9)

    def test_adjoint_average(self, rng):
        T = random_abelian_action(rng, dim=6)
        mu = SignedMeasure({i: rng.standard_normal() for i in range(-3, 10)})
        assert np.allclose(avg_operator(T, mu).T, avg_operator(T.adjoint(), mu), atol=1e-14)

    def test_operator_norm(self, rng):
        for _ in range(10):
            T = random_abelian_action(rng)
            for n in (0, 5, 50):
                assert spectral_norm(avg_operator(T, sigma_n(n))) <= 1 + 1e-9

    def test_met_limit(self):
        U = np.eye(4)
        U[:2, :2] = rotation(1.3)
        P = fixed_space_projection(U)
        T = UnitaryAction(LeibmanSequence.power_poly(OrthogonalOperator(U), [0, 1]))
        x = np.array([1.0, 2.0, -1.0, 0.5])
        run = running_vector_averages(T, x, 2000)
        errs = [np.linalg.norm(run[n] - P @ x) for n in (10, 100, 2000)]
        assert errs[0] > errs[1] > errs[2]
        # the rotation block averages to a vector of length <= 2|x_rot| / ((n+1)|1 - e^{i 1.3}|)
        bound = 2 * np.linalg.norm(x[:2]) / (2001 * abs(1 - np.exp(1.3j)))
        assert errs[2] <= bound + 1e-12


class TestFixedSpace:
    def test_examples(self):
        assert np.allclose(fixed_space_projection(np.eye(3)), np.eye(3))
        assert np.allclose(fixed_space_projection(rotation(np.pi / 2)), 0)
        U = np.eye(3)
        U[:2, :2] = rotation(np.pi / 3)
        P = fixed_space_projection(U)
        assert np.allclose(P, np.diag([0.0, 0.0, 1.0]), atol=1e-12)
        rng = np.random.default_rng(1)
        for _ in range(10):
            x = rng.standard_normal(3)
            assert np.linalg.norm(U @ P @ x - P @ x) < 1e-12

    def test_projector(self, rng):
        Q = random_orthogonal(rng, 5)
        D = np.eye(5)
        D[:2, :2] = rotation(2.0)
        U = Q @ D @ Q.T
        P = fixed_space_projection(U)
        assert np.allclose(P @ P, P) and np.allclose(P, P.T)
        assert np.isclose(np.trace(P), 3)

    def test_non_orthogonal(self):
        with pytest.raises(PreconditionError):
            fixed_space_projection(np.diag([1.0, 2.0]))


class TestNorms:
    def test_spectral_norm(self, rng):
        for _ in range(20):
            A = rng.standard_normal((6, 6))
            est, true = spectral_norm(A), np.linalg.norm(A, 2)
            assert est <= true + 1e-12
            assert est <= frobenius_norm(A) + 1e-12
        s = np.array([3.0, 1.0, 0.5])
        A = random_orthogonal(rng, 3) @ np.diag(s) @ random_orthogonal(rng, 3)
        assert abs(spectral_norm(A) - 3.0) < 1e-9
        assert spectral_norm(np.zeros((3, 3))) == 0.0
