import math

import numpy as np
import pytest

from harvesting.quadrature import (Estimate, MCSettings, QuadSettings,
                                   integrate_adaptive, integrate_mc,
                                   nested_time_weight)

TIGHT = QuadSettings(rel_tol=1e-10, abs_tol=1e-14, max_evals=4_000_000)


def test_settings_validation():
    with pytest.raises(ValueError):
        QuadSettings(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadSettings(abs_tol=-1.0)
    with pytest.raises(ValueError):
        QuadSettings(max_evals=10)
    with pytest.raises(ValueError):
        QuadSettings(tail_radius=2.0)
    with pytest.raises(ValueError):
        MCSettings(samples=100)
    with pytest.raises(ValueError):
        Estimate(1.0, -0.1, 3)


def test_constant_box():
    est = integrate_adaptive(lambda p: np.ones(len(p)), [0, 0, 0], [1, 1, 1],
                             TIGHT)
    assert est.converged
    assert abs(est.value - 1.0) < 1e-13


def test_gaussian_2d_vs_pi():
    est = integrate_adaptive(lambda p: np.exp(-p[:, 0]**2 - p[:, 1]**2),
                             [-8, -8], [8, 8], TIGHT)
    assert abs(est.value - math.pi) < 1e-8


def test_odd_integrand_symmetric_box():
    est = integrate_adaptive(lambda p: p[:, 0] * np.exp(-p[:, 0]**2 - p[:, 1]**2),
                             [-4, -4], [4, 4], TIGHT)
    assert abs(est.value) < 1e-12


@pytest.mark.parametrize("powers", [(3, 4), (7, 0), (2, 5)])
def test_polynomial_exactness_2d(powers):
    # the embedded rule is degree 7: monomials up to total degree 7 are exact
    a, b = powers
    est = integrate_adaptive(lambda p: p[:, 0]**a * p[:, 1]**b,
                             [0, 0], [1, 1],
                             QuadSettings(rel_tol=1e-12, abs_tol=1e-15))
    exact = 1.0 / ((a + 1) * (b + 1))
    assert abs(est.value - exact) < 1e-14


def test_dimension_limit():
    with pytest.raises(ValueError):
        integrate_adaptive(lambda p: np.ones(len(p)),
                           [0, 0, 0, 0], [1, 1, 1, 1], TIGHT)


def test_deterministic_bit_stable():
    def f(p):
        return np.exp(-p[:, 0]**2 - 0.3 * p[:, 1]**2) * np.cos(3 * p[:, 0])

    e1 = integrate_adaptive(f, [-8, -8], [8, 8], TIGHT)
    e2 = integrate_adaptive(f, [-8, -8], [8, 8], TIGHT)
    assert e1.value == e2.value
    assert e1.err == e2.err
    assert e1.evals == e2.evals


def test_nonconverged_flag():
    # budget too small for a nasty integrand: flagged, not fatal
    def f(p):
        return np.cos(200.0 * p[:, 0]) * np.cos(200.0 * p[:, 1])

    est = integrate_adaptive(f, [0, 0], [1, 1],
                             QuadSettings(rel_tol=1e-12, abs_tol=1e-16,
                                          max_evals=1000))
    assert not est.converged


def test_initial_splits_catch_narrow_support():
    # a bump much narrower than the box is still found when seeded
    def f(p):
        return np.exp(-((p[:, 0] - 0.5)**2) / 1e-4)

    est = integrate_adaptive(f, [0], [1000.0], TIGHT,
                             initial_splits=[[0.25, 0.5, 1.0, 2.0, 4.0]])
    exact = math.sqrt(math.pi) * 1e-2
    assert abs(est.value - exact) / exact < 1e-9


def test_mc_constant_exact():
    est = integrate_mc(lambda p: np.ones(len(p)), [0, 0], [2, 3],
                       MCSettings(samples=10_000, seed=5))
    assert est.value == pytest.approx(6.0, abs=1e-12)
    assert est.err == 0.0


def test_mc_linear_mean():
    est = integrate_mc(lambda p: p[:, 0], [0], [1],
                       MCSettings(samples=100_000, seed=3))
    assert abs(est.value - 0.5) < 4 * est.err


def test_mc_6d_gaussian():
    def f(p):
        return np.exp(-np.sum(p * p, axis=1))

    est = integrate_mc(f, [-8] * 6, [8] * 6,
                       MCSettings(samples=2_000_000, seed=11))
    assert abs(est.value - math.pi**3) < 4 * est.err


def test_mc_reproducible():
    def f(p):
        return np.sin(p[:, 0]) * p[:, 1]

    e1 = integrate_mc(f, [0, 0], [1, 1], MCSettings(samples=50_000, seed=9))
    e2 = integrate_mc(f, [0, 0], [1, 1], MCSettings(samples=50_000, seed=9))
    assert e1.value == e2.value and e1.err == e2.err


def test_mc_agrees_with_adaptive_on_random_smooth():
    rng = np.random.default_rng(17)
    for trial in range(20):
        m = 2 if trial % 2 == 0 else 3
        centers = rng.uniform(0.2, 0.8, size=(3, m))
        widths = rng.uniform(0.1, 0.5, size=3)
        amps = rng.uniform(0.5, 2.0, size=3)

        def f(p):
            out = np.zeros(len(p))
            for c, w, a in zip(centers, widths, amps):
                out += a * np.exp(-np.sum((p - c)**2, axis=1) / w**2)
            return out

        ad = integrate_adaptive(f, [0] * m, [1] * m, TIGHT)
        mc = integrate_mc(f, [0] * m, [1] * m,
                          MCSettings(samples=200_000, seed=100 + trial))
        assert abs(ad.value - mc.value) < 4 * mc.err


# ---------------------------------------------------------------------------
# nested time weight

def _ntw_oracle(om1, om2, T1, T2, t1, t2, w):
    halfw = 8.0 * max(T1, T2)
    lo = min(t1, t2) - halfw
    hi = max(t1, t2) + halfw

    def f(p):
        t, tp = p[:, 0], p[:, 1]
        chi = np.exp(-((t - t1) / T1)**2 - ((tp - t2) / T2)**2)
        phase = np.exp(1j * (om1 * t + om2 * tp) - 1j * w * (t - tp))
        return np.where(tp < t, chi * phase, 0.0)

    return integrate_adaptive(f, [lo, lo], [hi, hi], TIGHT)


def test_nested_time_weight_symmetric_half():
    # symmetric integrand: the ordered integral is half the unordered one
    val = nested_time_weight(0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0)
    assert val == pytest.approx(math.pi / 2, rel=1e-14)


def test_nested_time_weight_vs_2d_quadrature():
    params = (1.0, 2.0, 1.0, 1.0, 0.0, 0.5, 3.0)
    got = nested_time_weight(*params)
    ref = _ntw_oracle(*params)
    assert abs(got - ref.value) <= max(1e-8 * abs(ref.value), 3 * ref.err)


def test_nested_time_weight_other_branch_vs_quadrature():
    params = (0.7, -1.2, 0.8, 1.3, 1.0, -0.5, 2.0)
    got = nested_time_weight(*params)
    ref = _ntw_oracle(*params)
    assert abs(got - ref.value) <= max(1e-8 * abs(ref.value), 3 * ref.err)


def test_de_nesting_identity_random_draws():
    rng = np.random.default_rng(0)
    for _ in range(100):
        om1, om2 = rng.uniform(-3, 3, 2)
        T1, T2 = rng.uniform(0.3, 2.0, 2)
        t1, t2 = rng.uniform(-2, 2, 2)
        w = rng.uniform(-5, 5)
        lhs = (nested_time_weight(om1, om2, T1, T2, t1, t2, w)
               + nested_time_weight(om2, om1, T2, T1, t2, t1, -w))
        ft1 = (math.sqrt(math.pi) * T1 * math.exp(-(om1 - w)**2 * T1**2 / 4)
               * np.exp(1j * (om1 - w) * t1))
        ft2 = (math.sqrt(math.pi) * T2 * math.exp(-(om2 + w)**2 * T2**2 / 4)
               * np.exp(1j * (om2 + w) * t2))
        # normalize by the natural magnitude pi T1 T2 so that draws whose
        # terms underflow entirely do not count as violations
        scale = abs(lhs) + abs(ft1 * ft2) + 1e-3 * math.pi * T1 * T2
        assert abs(lhs - ft1 * ft2) / scale < 1e-10


def test_nested_time_weight_overflow_guard():
    for w in (1e3, -1e3, 987.0):
        val = nested_time_weight(1.0, 1.0, 1.0, 1.0, 0.3, -0.2, w)
        assert np.isfinite(val.real) and np.isfinite(val.imag)
    arr = nested_time_weight(1.0, 1.0, 1.0, 1.0, 0.3, -0.2,
                             np.array([0.0, 10.0, 1e3]))
    assert np.all(np.isfinite(arr))


def test_nested_time_weight_rejects_bad_widths():
    with pytest.raises(ValueError):
        nested_time_weight(0, 0, -1.0, 1.0, 0, 0, 0)
