"""Worst-case reweighted risk: closed form, solver agreement, monotonicity."""

import numpy as np
import pytest

from npcl.adversarial import (
    AdvRiskSpec,
    adversarial_risk_numeric,
    check_monotonicity,
    empirical_adversarial_risk,
    project_chi_square_ball,
)


def random_loss_vector(rng, n, k=None):
    if k is None:
        k = int(rng.integers(0, n + 1))
    l = np.zeros(n)
    l[rng.choice(n, size=k, replace=False)] = 1.0
    return l


class TestClosedForm:
    def test_zero_budget_equals_plain_risk(self):
        l = np.array([1.0, 0.0, 0.0, 1.0])
        assert empirical_adversarial_risk(l, AdvRiskSpec(0.0)) == 0.5

    def test_quarter_risk_example(self):
        l = np.array([1.0, 0.0, 0.0, 0.0])
        value = empirical_adversarial_risk(l, AdvRiskSpec(0.1))
        assert value == pytest.approx(0.25 + np.sqrt(0.1 * 0.25 * 0.75), abs=1e-12)

    def test_all_ones_capped_at_one(self):
        l = np.ones(6)
        for delta in (0.0, 0.3, 5.0):
            assert empirical_adversarial_risk(l, AdvRiskSpec(delta)) == 1.0

    def test_all_zeros(self):
        assert empirical_adversarial_risk(np.zeros(5), AdvRiskSpec(1.0)) == 0.0

    def test_bounds_and_monotone_in_delta(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            l = random_loss_vector(rng, int(rng.integers(2, 40)))
            plain = l.mean()
            values = [
                empirical_adversarial_risk(l, AdvRiskSpec(d)) for d in (0.0, 0.05, 0.2, 1.0, 4.0)
            ]
            assert values[0] == pytest.approx(plain)
            for v in values:
                assert plain <= v <= 1.0
            assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))

    def test_saturation_threshold(self):
        # the cap binds exactly when plain risk reaches 1/(1+delta)
        l = np.array([1.0] * 5 + [0.0] * 5)  # p = 0.5
        assert empirical_adversarial_risk(l, AdvRiskSpec(1.0)) == 1.0
        assert empirical_adversarial_risk(l, AdvRiskSpec(0.999)) < 1.0

    def test_input_validation(self):
        with pytest.raises(ValueError):
            empirical_adversarial_risk(np.array([0.5]), AdvRiskSpec(0.1))
        with pytest.raises(ValueError):
            AdvRiskSpec(-0.1)
        with pytest.raises(ValueError):
            AdvRiskSpec(0.1, divergence="kl")


class TestProjection:
    def test_feasibility(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            n = int(rng.integers(2, 30))
            w = rng.normal(1.0, 2.0, size=n)
            delta = float(rng.uniform(0.01, 2.0))
            r = project_chi_square_ball(w, delta)
            assert r.mean() == pytest.approx(1.0, abs=1e-9)
            assert np.all(r >= -1e-12)
            assert np.mean((r - 1.0) ** 2) <= delta + 1e-9

    def test_interior_point_fixed(self):
        r = project_chi_square_ball(np.ones(4), 0.5)
        np.testing.assert_allclose(r, np.ones(4), atol=1e-12)

    def test_zero_budget_returns_uniform(self):
        np.testing.assert_array_equal(project_chi_square_ball(np.array([3.0, -1.0]), 0.0), [1.0, 1.0])


class TestSolverAgreement:
    def test_matches_closed_form(self):
        rng = np.random.default_rng(4)
        for _ in range(60):
            n = int(rng.integers(2, 50))
            l = random_loss_vector(rng, n)
            delta = float(rng.uniform(0.0, 2.0))
            spec = AdvRiskSpec(delta)
            assert adversarial_risk_numeric(l, spec) == pytest.approx(
                empirical_adversarial_risk(l, spec), abs=1e-6
            )


class TestMonotonicity:
    def test_ordered_pair(self):
        n = 20
        a = np.zeros(n)
        a[:2] = 1.0  # plain risk 0.1
        b = np.zeros(n)
        b[:6] = 1.0  # plain risk 0.3
        spec = AdvRiskSpec(0.05)
        ra = empirical_adversarial_risk(a, spec)
        rb = empirical_adversarial_risk(b, spec)
        assert ra < rb
        report = check_monotonicity([a, b], spec)
        assert report.ok
        assert report.pairs_checked == 2

    def test_identical_vectors_equal_risks(self):
        v = np.array([1.0, 0.0, 1.0, 0.0])
        spec = AdvRiskSpec(0.3)
        report = check_monotonicity([v, v.copy()], spec)
        assert report.ok
        assert empirical_adversarial_risk(v, spec) == empirical_adversarial_risk(v.copy(), spec)

    def test_saturated_branch(self):
        # saturation fills the whole upper interval of plain risks: once a
        # saturates and b's plain risk is at least a's, b saturates too
        n = 10
        a = np.zeros(n)
        a[:6] = 1.0
        b = np.zeros(n)
        b[:8] = 1.0
        spec = AdvRiskSpec(1.0)  # saturation at p >= 0.5
        assert empirical_adversarial_risk(a, spec) == 1.0
        assert empirical_adversarial_risk(b, spec) == 1.0
        report = check_monotonicity([a, b], spec)
        assert report.ok

    def test_many_vectors_check_all_ordered_pairs(self):
        rng = np.random.default_rng(9)
        vectors = [random_loss_vector(rng, 12) for _ in range(6)]
        report = check_monotonicity(vectors, AdvRiskSpec(0.5))
        assert report.ok
        assert report.pairs_checked == 30

    def test_random_pairs_violation_free(self):
        rng = np.random.default_rng(6)
        for delta in (0.01, 0.1, 1.0):
            spec = AdvRiskSpec(delta)
            for _ in range(100):
                n = int(rng.integers(2, 30))
                vectors = [random_loss_vector(rng, n) for _ in range(2)]
                assert check_monotonicity(vectors, spec).ok

    def test_validation(self):
        with pytest.raises(ValueError):
            check_monotonicity([np.array([1.0, 0.0])], AdvRiskSpec(0.1))
        with pytest.raises(ValueError):
            check_monotonicity([np.array([1.0]), np.array([1.0, 0.0])], AdvRiskSpec(0.1))
