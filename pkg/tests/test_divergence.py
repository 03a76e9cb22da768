from dataclasses import replace

import numpy as np
import pytest

from conftest import make_s0
from harvesting.divergence import (DivergenceVerdict, RegularizationVariant,
                                   SweepResult, SweepPoint, SweepSpec,
                                   classify, cutoff_sweep, detuning_scan,
                                   regularized_element)
from harvesting.elements import ElementSet, compute_M
from harvesting.scenario import ModelKind, SmearingMode

EPS_GRID = tuple(np.geomspace(1e-3, 1e-1, 6))


def synthetic_result(eps, values, err=0.0):
    points = []
    for e, v in zip(eps, values):
        els = ElementSet(L_AA=0.0, L_BB=0.0, L_AB=0.0, M=complex(v),
                         err_M=err)
        points.append(SweepPoint(param_value=float(e), elements=els,
                                 negativity=0.0, mutual_information=0.0,
                                 flags=()))
    spec = SweepSpec(make_s0(), "epsilon", tuple(eps))
    return SweepResult(spec, points)


# ---------------------------------------------------------------------------
# spec validation

def test_sweep_spec_needs_five_points():
    with pytest.raises(ValueError):
        SweepSpec(make_s0(), "epsilon", (1e-3, 1e-2, 1e-1))


def test_sweep_spec_needs_monotone_grid():
    with pytest.raises(ValueError):
        SweepSpec(make_s0(), "epsilon", (1e-3, 1e-1, 1e-2, 1.0, 2.0))


def test_sweep_spec_unknown_param():
    with pytest.raises(ValueError):
        SweepSpec(make_s0(), "coupling", EPS_GRID)


def test_cutoff_sweep_needs_two_decades():
    spec = SweepSpec(make_s0(), "epsilon", tuple(np.geomspace(1e-2, 1e-1, 5)))
    with pytest.raises(ValueError):
        cutoff_sweep(spec)


# ---------------------------------------------------------------------------
# classifier on planted series

def test_classifier_recovers_planted_models():
    rng = np.random.default_rng(3)
    eps = np.geomspace(1e-3, 1e-1, 12)
    for trial in range(100):
        noise = 1.0 + 0.005 * rng.standard_normal(len(eps))
        const = synthetic_result(eps, 2.5 * noise)
        assert classify(const, "M").classification == "convergent", trial
        log_v = (1.0 + 2.0 * np.log(1.0 / eps)) * noise
        verdict = classify(synthetic_result(eps, log_v), "M")
        assert verdict.classification == "divergent_log", trial
        assert verdict.ci is not None
        assert verdict.ci[0] <= 2.0 <= verdict.ci[1] or abs(
            verdict.slope - 2.0) < 0.1
        pow_v = 0.3 * eps ** (-1.2) * noise
        verdict = classify(synthetic_result(eps, pow_v), "M")
        assert verdict.classification == "divergent_power", trial
        assert abs(verdict.exponent - 1.2) < 0.1


def test_classifier_undetermined_when_noise_dominates():
    eps = np.geomspace(1e-3, 1e-1, 8)
    vals = 1.0 + 0.001 * np.cos(np.arange(8.0))
    res = synthetic_result(eps, vals, err=0.5)
    assert classify(res, "M").classification == "undetermined"


def test_classifier_transient_drift_is_convergent():
    # variation that collapses as epsilon falls (linear-in-epsilon transient)
    eps = np.geomspace(1e-3, 1e-1, 12)
    vals = 1.0 - 0.5 * eps
    assert classify(synthetic_result(eps, vals), "M").classification == \
        "convergent"


# ---------------------------------------------------------------------------
# real sweeps (small grids keep this quick)

def test_zero_coupling_sweep_is_identically_zero():
    scn = make_s0(ModelKind.quadratic_real())
    scn = replace(scn, detector_a=replace(scn.detector_a, lam=0.0))
    result = cutoff_sweep(SweepSpec(scn, "epsilon", EPS_GRID))
    for p in result.points:
        assert p.elements.L_AA == 0.0 and p.elements.M == 0.0
        assert p.negativity == 0.0 and p.mutual_information == 0.0


def test_linear_m_is_convergent():
    result = cutoff_sweep(SweepSpec(make_s0(ModelKind.linear()),
                                    "epsilon", EPS_GRID))
    verdict = classify(result, "M")
    assert verdict.classification == "convergent"
    assert verdict.tail_stability < 0.01


def test_quadratic_m_diverges_and_grows():
    result = cutoff_sweep(SweepSpec(make_s0(ModelKind.quadratic_real()),
                                    "epsilon", EPS_GRID))
    verdict = classify(result, "M")
    assert verdict.classification in ("divergent_log", "divergent_power")
    mags = [abs(p.elements.M) for p in result.points]
    assert all(a > b for a, b in zip(mags, mags[1:]))  # grows as eps falls
    l_verdict = classify(result, "L_AA")
    assert l_verdict.classification == "convergent"


def test_sweep_points_carry_fingerprints_and_measures():
    result = cutoff_sweep(SweepSpec(make_s0(ModelKind.linear()),
                                    "epsilon", EPS_GRID))
    prints = {p.elements.fingerprint for p in result.points}
    assert len(prints) == len(result.points)  # epsilon enters the fingerprint
    assert all(p.negativity >= 0 for p in result.points)


# ---------------------------------------------------------------------------
# regularization variants

def test_regularization_needs_quadratic_kernel():
    with pytest.raises(ValueError):
        regularized_element(make_s0(ModelKind.linear()),
                            RegularizationVariant("nascent_delta", 0.1))


def test_nascent_delta_zero_recovers_baseline():
    scn = make_s0(ModelKind.quadratic_real())
    base = compute_M(scn).value
    reg = regularized_element(scn, RegularizationVariant("nascent_delta", 0.0))
    assert reg.value == base


def test_nascent_delta_sweep_extrapolates_to_baseline():
    # the vertex-splitting width must drop below the soft cutoff scale
    # before the delta-regulated element meets the baseline
    scn = make_s0(ModelKind.quadratic_real())
    base = abs(compute_M(scn).value)
    deltas = [0.04, 0.02, 0.01, 0.005, 0.0025]
    vals = [abs(regularized_element(
        scn, RegularizationVariant("nascent_delta", d)).value)
        for d in deltas]
    gaps = [abs(v - base) for v in vals]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))  # approaches baseline
    assert gaps[-1] / base < 0.02


def test_large_delta_suppresses_m():
    scn = make_s0(ModelKind.quadratic_real())
    base = abs(compute_M(scn).value)
    damped = abs(regularized_element(
        scn, RegularizationVariant("nascent_delta", 5.0)).value)
    assert damped < base


def test_per_leg_variant_matches_per_leg_mode():
    scn = make_s0(ModelKind.quadratic_real())
    via_reg = regularized_element(scn, RegularizationVariant("per_leg"))
    direct = compute_M(replace(scn, smearing_mode=SmearingMode.PER_LEG))
    assert via_reg.value == direct.value


def test_per_leg_sweep_verdict_recorded():
    scn = make_s0(ModelKind.quadratic_real(),
                  smearing_mode=SmearingMode.PER_LEG)
    result = cutoff_sweep(SweepSpec(scn, "epsilon", EPS_GRID))
    verdict = classify(result, "M")
    assert isinstance(verdict, DivergenceVerdict)
    assert verdict.classification == "convergent"  # separate smearing tames it


# ---------------------------------------------------------------------------
# detuning scan

def test_detuning_scan_zero_offset_reproduces_equal_gap():
    scn = make_s0(ModelKind.linear())
    base = abs(compute_M(scn).value)
    out = detuning_scan(scn, [0.0, 1.0],
                        mini_grid=tuple(np.geomspace(1e-3, 1e-1, 5)))
    assert out["rows"][0]["abs_M"] == pytest.approx(base, rel=1e-12)


def test_detuning_scan_linear_all_convergent():
    scn = make_s0(ModelKind.linear())
    out = detuning_scan(scn, [0.0, 0.5, 1.0],
                        mini_grid=tuple(np.geomspace(1e-3, 1e-1, 5)))
    assert all(r["verdict"] == "convergent" for r in out["rows"])
    assert out["trend"] in ("non-increasing", "non-decreasing", "mixed", "flat")


def test_detuning_scan_requires_equal_gaps():
    scn = make_s0()
    scn = replace(scn, detector_b=replace(scn.detector_b, gap=2.0))
    with pytest.raises(ValueError):
        detuning_scan(scn, [0.0, 0.5])
