"""Inequality checkers: lower bounds, refuters, obstructions."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from commkit.matrices import commutator, identity
from commkit.verifiers import (
    certified_halmos_popa_check,
    delta_threshold,
    finite_dim_obstructions,
    popa_bound,
    power_inequality_report,
    wielandt_violation_witness,
)

norms = st.floats(min_value=0.0, max_value=5.0, allow_nan=False)
alphas = st.floats(min_value=1.0, max_value=4.0, allow_nan=False)


class TestPopaBound:
    def test_passes_with_zero_margin(self):
        vd = popa_bound(2.0, 1.0, math.exp(-4.0), 1.0)
        assert vd.passed
        assert abs(vd.margin) <= 1e-12

    def test_fails_below_bound(self):
        vd = popa_bound(0.5, 1.0, math.exp(-4.0), 1.0)
        assert not vd.passed
        assert vd.witness["bound"] == pytest.approx(2.0)

    def test_trivial_for_large_eps(self):
        assert popa_bound(0.0, 0.0, 1.0, 1.0).passed
        assert popa_bound(0.0, 0.0, 2.0, 1.5).passed

    def test_half_log_ten(self):
        vd = popa_bound(1.0, 1.0, 0.1, 1.0)
        assert not vd.passed
        assert vd.witness["bound"] == pytest.approx(0.5 * math.log(10.0))

    def test_rejects_small_alpha(self):
        with pytest.raises(ValueError):
            popa_bound(1.0, 1.0, 0.5, 0.9)

    def test_rejects_bad_eps(self):
        with pytest.raises(ValueError):
            popa_bound(1.0, 1.0, 0.0)


class TestDeltaThreshold:
    def test_unit_norms(self):
        assert delta_threshold(1.0, 1.0) == pytest.approx(math.exp(-2.0))

    def test_zero_norm(self):
        assert delta_threshold(0.0, 3.0, 2.0) == pytest.approx(0.5)

    def test_rejects_small_alpha(self):
        with pytest.raises(ValueError):
            delta_threshold(1.0, 1.0, 0.5)

    @given(norms, norms, alphas)
    def test_duality_with_popa_bound(self, norm_a, norm_b, alpha):
        delta = delta_threshold(norm_a, norm_b, alpha)
        assert not popa_bound(norm_a, norm_b, 0.99 * delta, alpha).passed
        assert popa_bound(norm_a, norm_b, 1.01 * delta, alpha).passed


class TestPowerInequality:
    def _exact_instance(self, rng, n=4):
        # choosing x := [a,b] - I makes the hypothesis hold with equality
        a = np.abs(rng.standard_normal((n, n)))
        b = rng.standard_normal((n, n))
        x = commutator(a, b) - identity(n)
        return a, b, x

    def test_base_case_equals_hypothesis(self):
        rng = np.random.default_rng(3)
        a, b, x = self._exact_instance(rng)
        verdicts = power_inequality_report(a, b, x, n_max=1, tol=1e-9)
        hypothesis = verdicts[1]
        base = verdicts[2]
        assert hypothesis.passed and base.passed
        # at n = 1 the two checks compare the same quantities
        assert base.margin == pytest.approx(hypothesis.margin, abs=1e-12)

    def test_all_orders_pass_on_exact_instances(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            a, b, x = self._exact_instance(rng)
            scale = max(np.abs(a).max(), 1.0) ** 6 * max(np.abs(x).max(), 1.0)
            verdicts = power_inequality_report(a, b, x, n_max=5, tol=1e-9 * scale)
            assert all(v.passed for v in verdicts)

    def test_no_failures_when_preconditions_verify(self):
        # randomized counterexample search: slack instances x := [a,b] - I - p
        # with p >= 0 keep the hypothesis true with strict margin, and the
        # induction must then hold at every order
        rng = np.random.default_rng(13)
        for _ in range(50):
            n = int(rng.integers(2, 7))
            a = np.abs(rng.standard_normal((n, n)))
            b = rng.standard_normal((n, n))
            p = np.abs(rng.standard_normal((n, n)))
            x = commutator(a, b) - identity(n) - p
            scale = max(np.abs(a).max(), 1.0) ** 6 * max(np.abs(x).max(), 1.0)
            verdicts = power_inequality_report(a, b, x, n_max=5, tol=1e-9 * scale)
            assert verdicts[0].passed and verdicts[1].passed
            assert all(v.passed for v in verdicts[2:])

    def test_proof_identity_holds(self):
        # [a^(n+1), b] = a [a^n, b] + [a, b] a^n, checked by direct multiplication
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = rng.standard_normal((4, 4))
            b = rng.standard_normal((4, 4))
            for n in range(1, 6):
                lhs = commutator(np.linalg.matrix_power(a, n + 1), b)
                rhs = a @ commutator(np.linalg.matrix_power(a, n), b)
                rhs = rhs + commutator(a, b) @ np.linalg.matrix_power(a, n)
                scale = max(np.abs(lhs).max(), 1.0)
                assert np.abs(lhs - rhs).max() <= 1e-9 * scale

    def test_failed_precondition_is_reported_not_raised(self):
        a = np.array([[1.0, -2.0], [0.0, 1.0]])
        b = np.zeros((2, 2))
        x = np.zeros((2, 2))
        verdicts = power_inequality_report(a, b, x, n_max=2)
        assert not verdicts[0].passed  # a is not nonnegative
        assert verdicts[0].witness == {"row": 1, "col": 2, "value": -2.0}
        assert not verdicts[1].passed  # [a,b] = 0 does not dominate I
        assert len(verdicts) == 4

    def test_interior_restricts_the_window(self):
        rng = np.random.default_rng(11)
        a, b, x = self._exact_instance(rng, n=6)
        # poison an entry outside the interior window
        a2 = a.copy()
        a2[5, 5] = -1.0
        full = power_inequality_report(a2, b, x, n_max=1)
        windowed = power_inequality_report(a2, b, x, n_max=1, interior=5)
        assert not full[0].passed
        assert windowed[0].passed

    def test_validates_inputs(self):
        with pytest.raises(ValueError):
            power_inequality_report(np.ones((2, 2)), np.ones((2, 2)), np.ones((3, 3)))
        with pytest.raises(ValueError):
            power_inequality_report(np.ones((2, 2)), np.ones((2, 2)), np.ones((2, 2)), n_max=0)
        with pytest.raises(ValueError):
            power_inequality_report(
                np.ones((2, 2)), np.ones((2, 2)), np.ones((2, 2)), interior=3
            )


class TestWielandtWitness:
    def test_diagonal_positive_a(self):
        vd = wielandt_violation_witness(np.diag([1.0, 2.0]), np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert vd.passed
        assert vd.witness["value"] < 0.0

    def test_zero_a(self):
        vd = wielandt_violation_witness(np.zeros((2, 2)), np.ones((2, 2)))
        assert vd.passed
        assert vd.witness == {"row": 1, "col": 1, "value": -1.0}

    def test_negative_b_is_accepted_as_signed(self):
        vd = wielandt_violation_witness(np.ones((2, 2)), -np.ones((2, 2)))
        assert vd.passed

    def test_random_trials_always_find_witness(self):
        rng = np.random.default_rng(13)
        for _ in range(500):
            n = int(rng.integers(2, 21))
            a = np.abs(rng.standard_normal((n, n)))
            b = rng.standard_normal((n, n))
            assert wielandt_violation_witness(a, b).passed

    def test_rejects_unsigned_pair(self):
        mixed = np.array([[1.0, -1.0], [1.0, 1.0]])
        with pytest.raises(ValueError):
            wielandt_violation_witness(mixed, mixed)


class TestFiniteDimObstructions:
    def test_identity_x_passes_everything(self):
        n = 3
        zero = np.zeros((n, n))
        verdicts = finite_dim_obstructions(zero, zero, identity(n))
        assert [v.passed for v in verdicts] == [True, True, True, True]
        assert verdicts[3].witness["identity_defect"] == 0.0

    def test_failed_hypothesis_marks_rest_vacuous(self):
        zero = np.zeros((2, 2))
        x = np.diag([2.0, 0.0])
        verdicts = finite_dim_obstructions(zero, zero, x)
        hyp, trace_vd, spec_vd, idem_vd = verdicts
        assert not hyp.passed
        assert hyp.witness == {"row": 2, "col": 2, "value": -1.0}
        for vd in (trace_vd, spec_vd, idem_vd):
            assert vd.passed
            assert vd.witness.get("vacuous") is True

    def test_generated_instances(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            n = int(rng.integers(2, 8))
            a = rng.standard_normal((n, n))
            b = rng.standard_normal((n, n))
            p = np.abs(rng.standard_normal((n, n)))
            x = identity(n) - commutator(a, b) + p
            hyp, trace_vd, spec_vd, _ = finite_dim_obstructions(a, b, x)
            assert hyp.passed
            assert trace_vd.passed
            assert spec_vd.passed

    def test_defective_idempotent_never_satisfies_hypothesis(self):
        rng = np.random.default_rng(19)
        x = np.diag([1.0, 1.0, 0.0])
        for _ in range(10):
            a = rng.standard_normal((3, 3))
            b = rng.standard_normal((3, 3))
            hyp, _, _, idem = finite_dim_obstructions(a, b, x)
            assert not (hyp.passed and idem.passed and not idem.witness.get("vacuous"))
            assert not hyp.passed  # trace forces a violation for every a, b

    def test_validates_shapes(self):
        with pytest.raises(ValueError):
            finite_dim_obstructions(np.ones((2, 2)), np.ones((2, 2)), np.ones((3, 3)))


class TestCertifiedCheck:
    def test_eps_one_is_trivial(self):
        vd = certified_halmos_popa_check(1.0, window=64)
        assert vd.passed
        assert vd.inputs["bound"] < 0.0

    def test_small_eps_passes_with_positive_margin(self):
        vd = certified_halmos_popa_check(0.1, window=128)
        assert vd.passed
        assert vd.margin > 0.0
        assert vd.inputs["norm_a_lower"] > 100.0

    def test_margin_behaves_across_grid(self):
        previous = None
        for eps in (0.4, 0.2, 0.1):
            vd = certified_halmos_popa_check(eps, window=128)
            assert vd.passed
            if previous is not None:
                assert vd.margin > previous
            previous = vd.margin

    def test_validates_inputs(self):
        with pytest.raises(ValueError):
            certified_halmos_popa_check(0.0)
        with pytest.raises(ValueError):
            certified_halmos_popa_check(1.5)
        with pytest.raises(ValueError):
            certified_halmos_popa_check(0.5, window=8)
