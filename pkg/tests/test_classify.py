"""Verdict logic: bounds, the three decision rules, and the chain check."""

import math

import pytest

from convfactor.classify import (
    OUTCOME_EMPTY,
    OUTCOME_NONEMPTY,
    OUTCOME_UNKNOWN,
    RULE_DECAY,
    RULE_GAP,
    RULE_GROWTH,
    RULE_WINDOW,
    BoundsRecord,
    SequenceSpec,
    classify_sequence,
    compute_bounds,
    verify_chain,
)
from convfactor.errors import (
    BadSequenceSpec,
    InputError,
    InternalInconsistency,
    PointNotInterior,
)
from convfactor.records import RhoEstimate


def _bounds(r0=1.0, R0=17.0, rho=(0.46, 0.47, 0.48), M=19.0, M0=19.0,
            z0=0j, unc=0.0):
    lo, v, hi = rho
    return BoundsRecord(
        z0=z0, r0=r0, R0=R0,
        rho=RhoEstimate(value=v, lower=lo, upper=hi, method="injected",
                        diagnostics={}),
        M=M, M_uncertainty=unc, M0=M0, M0_uncertainty=unc,
        diagnostics={})


class TestSequenceSpec:
    def test_generator_takes_modulus(self):
        s = SequenceSpec.from_generator(-2.0)
        assert s.limit_points == (2.0,)
        assert s.liminf == s.limsup == 2.0

    def test_multiple_limit_points_sorted(self):
        s = SequenceSpec((3.0, 1.0, 2.0))
        assert s.limit_points == (1.0, 2.0, 3.0)
        assert s.liminf == 1.0
        assert s.limsup == 3.0

    def test_infinity_allowed_as_limit_point(self):
        s = SequenceSpec((1.0, math.inf))
        assert s.limsup == math.inf

    def test_empty_rejected(self):
        with pytest.raises(BadSequenceSpec):
            SequenceSpec(())

    def test_negative_rejected(self):
        with pytest.raises(BadSequenceSpec):
            SequenceSpec((-0.5,))

    def test_nan_rejected(self):
        with pytest.raises(BadSequenceSpec):
            SequenceSpec((math.nan,))

    def test_zero_generator_rejected(self):
        with pytest.raises(BadSequenceSpec):
            SequenceSpec.from_generator(0.0)

    def test_generator_consistency_enforced(self):
        with pytest.raises(BadSequenceSpec):
            SequenceSpec((3.0,), generator=2.0)


class TestComputeBounds:
    def test_two_disk_exact_quantities(self, ex31_bounds):
        b = ex31_bounds
        assert b.r0 == 1.0
        assert b.R0 == 17.0
        assert b.M == pytest.approx(19.0, rel=1e-6)
        assert b.M0 == pytest.approx(19.0, rel=1e-6)
        assert 1.0 / 17.0 < b.rho.lower
        assert b.rho.upper <= 0.48734 + b.rho.width

    def test_off_center_expansion_point(self, ex31_L, ex31_green_rho):
        b = compute_bounds(ex31_L, 0.5 + 0j, rho=ex31_green_rho)
        assert b.r0 == pytest.approx(0.5)
        assert b.R0 == pytest.approx(16.5)

    def test_exterior_point_rejected(self, ex31_L, ex31_green_rho):
        with pytest.raises(PointNotInterior):
            compute_bounds(ex31_L, 3.0 + 0j, rho=ex31_green_rho)

    def test_boundary_point_rejected(self, ex31_L, ex31_green_rho):
        with pytest.raises(PointNotInterior):
            compute_bounds(ex31_L, 1.0 + 0j, rho=ex31_green_rho)

    def test_uncertainty_scales_with_residual(self, ex31_bounds):
        assert ex31_bounds.M_uncertainty >= 0.0
        assert ex31_bounds.M_uncertainty < 1e-3 * ex31_bounds.M


class TestVerdictTable:
    """The four reference classifications on the two-disk scenario."""

    def test_lambda_two_nonempty_by_window(self, ex31_bounds):
        v = classify_sequence(ex31_bounds, SequenceSpec.from_generator(2.0))
        assert v.outcome == OUTCOME_NONEMPTY
        assert v.rule == RULE_WINDOW

    def test_lambda_one_twentieth_empty_by_decay(self, ex31_bounds):
        v = classify_sequence(ex31_bounds,
                              SequenceSpec.from_generator(1.0 / 20.0))
        assert v.outcome == OUTCOME_EMPTY
        assert v.rule == RULE_DECAY

    def test_lambda_twenty_empty_by_growth(self, ex31_bounds):
        v = classify_sequence(ex31_bounds, SequenceSpec.from_generator(20.0))
        assert v.outcome == OUTCOME_EMPTY
        assert v.rule == RULE_GROWTH

    def test_lambda_two_and_a_half_unknown(self, ex31_bounds):
        v = classify_sequence(ex31_bounds, SequenceSpec.from_generator(2.5))
        assert v.outcome == OUTCOME_UNKNOWN
        assert v.rule == RULE_GAP

    def test_margins_and_narrative_recorded(self, ex31_bounds):
        for lam in (2.0, 1.0 / 20.0, 20.0, 2.5):
            v = classify_sequence(ex31_bounds,
                                  SequenceSpec.from_generator(lam))
            assert v.margins
            assert isinstance(v.narrative, str) and v.narrative

    def test_determinism(self, ex31_bounds):
        spec = SequenceSpec.from_generator(2.0)
        assert classify_sequence(ex31_bounds, spec) == classify_sequence(
            ex31_bounds, spec)


class TestRuleEdges:
    def test_unit_limit_point_always_nonempty(self):
        # the unweighted case stays admissible even with a wide-ish bracket
        b = _bounds(rho=(0.90, 0.92, 0.94))
        v = classify_sequence(b, SequenceSpec.from_generator(1.0))
        assert v.outcome == OUTCOME_NONEMPTY
        assert v.rule == RULE_WINDOW

    def test_infinite_limsup_fires_growth(self):
        v = classify_sequence(_bounds(),
                              SequenceSpec((math.inf,)))
        assert v.outcome == OUTCOME_EMPTY
        assert v.rule == RULE_GROWTH

    def test_growth_needs_clearance_beyond_uncertainty(self):
        b = _bounds(M0=19.0, unc=2.0)
        v = classify_sequence(b, SequenceSpec.from_generator(20.0))
        assert v.outcome == OUTCOME_UNKNOWN

    def test_window_needs_margin_beyond_bracket(self):
        # limit point just above rho_upper by less than the bracket width
        b = _bounds(rho=(0.46, 0.47, 0.48))
        v = classify_sequence(b, SequenceSpec.from_generator(0.485))
        assert v.outcome == OUTCOME_UNKNOWN

    def test_multi_point_spec_decays_only_on_limsup(self):
        b = _bounds()  # r0/R0 = 1/17
        v = classify_sequence(b, SequenceSpec((0.01, 0.03)))
        assert v.outcome == OUTCOME_EMPTY
        assert v.rule == RULE_DECAY
        # one limit point below the distance ratio does not force decay;
        # another one inside the window rescues the class
        v2 = classify_sequence(b, SequenceSpec((0.01, 1.5)))
        assert v2.outcome == OUTCOME_NONEMPTY
        assert v2.rule == RULE_WINDOW

    def test_contradictory_rules_raise_alarm(self):
        # decay and window cannot both fire; a bounds record claiming
        # r0/R0 > rho_upper is internally inconsistent
        b = _bounds(r0=1.0, R0=1.25, rho=(0.10, 0.105, 0.11))
        with pytest.raises(InternalInconsistency):
            classify_sequence(b, SequenceSpec.from_generator(0.5))


class TestVerifyChain:
    def test_two_disk_chain_passes(self, ex31_bounds):
        report = verify_chain(ex31_bounds)
        assert report["pass"]
        assert report["checks"] == {"inv_R0_below_rho": True,
                                    "rho_below_one": True,
                                    "inv_rho_below_M": True}
        assert report["inv_R0"] == pytest.approx(1.0 / 17.0)
        assert report["M"] == pytest.approx(19.0, rel=1e-6)

    def test_wide_bracket_rejected(self):
        b = _bounds(rho=(0.40, 0.45, 0.50))
        with pytest.raises(InputError):
            verify_chain(b)

    def test_failed_chain_reports_not_raises(self):
        b = _bounds(rho=(0.02, 0.03, 0.04))  # rho_lower < 1/R0
        report = verify_chain(b)
        assert not report["pass"]
        assert not report["checks"]["inv_R0_below_rho"]
