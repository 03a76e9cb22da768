import numpy as np
import pytest

from harvesting.quadrature import MCSettings, QuadSettings
from harvesting.scenario import (DetectorParams, ModelKind, Scenario,
                                 SmearingMode, default_scenario)

# moderate tolerances keep the suite quick; acceptance tightens where needed
FAST_QUAD = QuadSettings(rel_tol=1e-6, abs_tol=1e-14, max_evals=2_000_000)


@pytest.fixture
def fast_quad():
    return FAST_QUAD


def make_s0(model=None, *, epsilon=0.01, smearing_mode=SmearingMode.CENTER_OF_MASS,
            mc_samples=200_000, seed=1):
    return default_scenario(
        model if model is not None else ModelKind.quadratic_real(),
        epsilon=epsilon, smearing_mode=smearing_mode, quad=FAST_QUAD,
        mc=MCSettings(samples=mc_samples, seed=seed))


def random_scenario(rng, model, *, epsilon=None):
    """A numerically benign random scenario for equivalence checks."""
    sep = rng.uniform(0.5, 3.0)
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    det_a = DetectorParams(
        "A", lam=rng.uniform(0.5, 1.5), gap=rng.uniform(-1.0, 2.0),
        center=(0.0, 0.0, 0.0), switch_center=rng.uniform(-0.5, 0.5),
        sigma=rng.uniform(0.6, 1.4), T=rng.uniform(0.6, 1.4))
    det_b = DetectorParams(
        "B", lam=rng.uniform(0.5, 1.5), gap=rng.uniform(-1.0, 2.0),
        center=tuple(sep * direction),
        switch_center=rng.uniform(-0.5, 0.5),
        sigma=rng.uniform(0.6, 1.4), T=rng.uniform(0.6, 1.4))
    return Scenario(
        detector_a=det_a, detector_b=det_b, model=model,
        smearing_mode=SmearingMode.CENTER_OF_MASS,
        epsilon=epsilon if epsilon is not None else rng.uniform(0.02, 0.2),
        quad=FAST_QUAD, mc=MCSettings(samples=200_000, seed=7))
