from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polymet.errors import DomainError, ShapeError
from polymet.measures import (
    SignedMeasure,
    VectorField,
    dirac,
    folner_defect,
    folner_from_config,
    measure_abs,
    measure_sub,
    pair_scalar,
    pair_vector,
    shift_field,
    sigma_folner,
    sigma_n,
    translate_measure,
    tv_norm,
    z_initial_segments,
    z_symmetric_intervals,
    zd_boxes,
)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=12)
measures = st.dictionaries(st.integers(-10, 10), rationals, max_size=8).map(SignedMeasure)


class TestSigma:
    def test_examples(self):
        assert sigma_n(0) == dirac(0, 1.0)
        assert sigma_n(2, exact=True) == SignedMeasure({0: Fraction(1, 3), 1: Fraction(1, 3), 2: Fraction(1, 3)})
        with pytest.raises(DomainError):
            sigma_n(-1)

    def test_probability(self):
        for n in range(101):
            assert tv_norm(sigma_n(n, exact=True)) == 1
            assert abs(tv_norm(sigma_n(n)) - 1) < 1e-12

    def test_folner_presets(self):
        assert sigma_folner(z_initial_segments(), 7, exact=True) == sigma_n(7, exact=True)
        box = sigma_folner(zd_boxes(2), 1, exact=True)
        assert box.weights == {p: Fraction(1, 4) for p in product(range(2), repeat=2)}
        for i in range(6):
            assert tv_norm(sigma_folner(zd_boxes(3), i, exact=True)) == 1
            assert tv_norm(sigma_folner(z_symmetric_intervals(), i, exact=True)) == 1
        assert folner_from_config({"zd_boxes": {"d": 2}}).name == "zd_boxes"
        assert folner_from_config("z_symmetric_intervals")(2) == [-2, -1, 0, 1, 2]


class TestTotalVariation:
    def test_interval_translation(self):
        m = 4
        diff = measure_sub(sigma_n(m, exact=True), translate_measure(sigma_n(m, exact=True), 1))
        assert tv_norm(diff) == Fraction(2, 5)
        for m in range(0, 25):
            s = sigma_n(m, exact=True)
            for j in range(0, m + 2):
                # overhanging pieces {0..j-1} and {m+1..m+j}
                assert tv_norm(s - translate_measure(s, j)) == Fraction(2 * j, m + 1)

    def test_abs_and_zero(self):
        assert measure_abs(SignedMeasure({0: -1, 1: 1})) == SignedMeasure({0: 1, 1: 1})
        assert tv_norm(SignedMeasure()) == 0

    def test_translate(self):
        assert translate_measure(dirac(0), 3) == dirac(3)
        assert translate_measure(sigma_n(4, exact=True), 1).weights == {i: Fraction(1, 5) for i in range(1, 6)}

    @given(measures, measures, rationals)
    def test_norm_axioms(self, mu, nu, c):
        assert tv_norm(mu + nu) <= tv_norm(mu) + tv_norm(nu)
        assert tv_norm(mu * c) == abs(c) * tv_norm(mu)
        assert (tv_norm(mu) == 0) == (mu == SignedMeasure())

    @given(measures)
    def test_no_zero_weights(self, mu):
        assert all(w != 0 for w in mu.weights.values())
        assert (mu - mu).weights == {}

    def test_json(self):
        mu = SignedMeasure({0: 0.5, 3: -0.25})
        assert SignedMeasure.from_json(mu.to_json()) == mu
        box = SignedMeasure({(0, 1): 0.5})
        assert SignedMeasure.from_json(box.to_json()) == box


class TestFolnerDefect:
    def test_identity_shift(self):
        assert folner_defect(z_initial_segments(), 5, 0) == 0
        assert folner_defect(zd_boxes(2), 5, (0, 0)) == 0

    def test_intervals(self):
        for m in range(0, 60):
            for j in range(0, m + 2):
                assert folner_defect(z_initial_segments(), m, j) == Fraction(2 * j, m + 1)

    def test_boxes(self):
        for n in range(0, 40):
            assert folner_defect(zd_boxes(2), n, (1, 0)) == Fraction(2, n + 1)

    def test_half_tv_equals_defect_for_uniform(self):
        for m in range(0, 30):
            s = sigma_n(m, exact=True)
            for j in range(0, m + 2):
                assert tv_norm(s - translate_measure(s, j)) == folner_defect(z_initial_segments(), m, j)


class TestPairings:
    def test_dirac(self):
        f = {i: i * i for i in range(-5, 6)}
        assert pair_scalar(f, dirac(3)) == 9
        with pytest.raises(DomainError):
            pair_scalar(f, dirac(10))

    def test_constant_field(self):
        v = np.array([1.0, -2.0, 0.5])
        F = VectorField({i: v for i in range(5)})
        assert np.allclose(pair_vector(F, sigma_n(4)), v)

    def test_mixed_shapes(self):
        with pytest.raises(ShapeError):
            VectorField({0: [1, 2], 1: [1, 2, 3]})

    @given(measures, measures, rationals, rationals)
    def test_bilinear_exact(self, mu, nu, a, b):
        f = lambda i: Fraction(i * i - 3, 7)  # noqa: E731
        assert pair_scalar(f, mu * a + nu * b) == a * pair_scalar(f, mu) + b * pair_scalar(f, nu)
        F = lambda i: np.array([Fraction(i), Fraction(1, i * i + 1)], dtype=object)  # noqa: E731
        lhs = pair_vector(F, mu * a + nu * b)
        rhs = a * pair_vector(F, mu) + b * pair_vector(F, nu)
        assert np.all(np.asarray(lhs) == np.asarray(rhs))

    @given(measures, st.integers(-5, 5))
    def test_translation_duality(self, mu, i):
        f = lambda j: Fraction(j ** 3 - j, 5)  # noqa: E731
        assert pair_scalar(f, translate_measure(mu, i)) == pair_scalar(shift_field(f, i), mu)

    def test_norm_compatibility(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            F = VectorField({i: rng.standard_normal(3) for i in range(-4, 5)})
            mu = SignedMeasure({i: rng.standard_normal() for i in range(-4, 5) if rng.random() < 0.7})
            lhs = np.linalg.norm(pair_vector(F, mu))
            rhs = pair_scalar(F.pointwise_norm(), measure_abs(mu))
            assert lhs <= rhs + 1e-12
