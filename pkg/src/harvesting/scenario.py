"""Detector, coupling-model, and scenario types plus the Gaussian profiles.

Conventions (natural units, 3 spatial dimensions):
  spatial profile   F(x) = (pi sigma^2)^(-3/2) exp(-|x - x0|^2 / sigma^2),
                    unit-normalised in space;
  switching profile chi(t) = exp(-(t - t0)^2 / T^2), peak-normalised,
so the coupling strength lambda is the single overall strength knob.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .quadrature import MCSettings, QuadSettings

__all__ = [
    "DetectorParams",
    "ModelKind",
    "SmearingMode",
    "Scenario",
    "ValidationReport",
    "validate",
    "smearing",
    "switching",
    "smearing_ft",
    "switching_ft",
    "default_scenario",
]

MODEL_NAMES = ("linear", "quadratic_real", "quadratic_complex", "bilinear")


class SmearingMode(str, enum.Enum):
    """How the spatial profile enters couplings with more than one field leg.

    CENTER_OF_MASS: one common smearing integral per detector vertex.
    PER_LEG: each field operator is smeared separately; coincides with
    CENTER_OF_MASS when the kernel power is 1.
    """

    CENTER_OF_MASS = "center_of_mass"
    PER_LEG = "per_leg"


@dataclass(frozen=True)
class ModelKind:
    """Coupling model: which function of the field(s) each detector couples to."""

    name: str
    n_fields: int = 1

    @classmethod
    def linear(cls):
        return cls("linear", 1)

    @classmethod
    def quadratic_real(cls):
        return cls("quadratic_real", 1)

    @classmethod
    def quadratic_complex(cls):
        return cls("quadratic_complex", 1)

    @classmethod
    def bilinear(cls, n: int):
        return cls("bilinear", int(n))

    def violations(self) -> list[str]:
        out = []
        if self.name not in MODEL_NAMES:
            out.append(f"model name must be one of {MODEL_NAMES}, got {self.name!r}")
        if self.name == "bilinear" and self.n_fields < 1:
            out.append("bilinear field count n must be a positive integer")
        return out


@dataclass(frozen=True)
class DetectorParams:
    """One pointlike-in-state, Gaussian-in-profile detector.

    lam: coupling strength (dimension absorbed, treated as a pure number)
    gap: internal energy gap (may be zero or negative)
    center: spatial center, 3-vector
    switch_center: center of the switching window
    sigma: spatial Gaussian width (> 0)
    T: switching Gaussian width (> 0)
    """

    label: str
    lam: float = 1.0
    gap: float = 1.0
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    switch_center: float = 0.0
    sigma: float = 1.0
    T: float = 1.0

    def violations(self) -> list[str]:
        out = []
        tag = f"detector {self.label}: "
        if not (self.sigma > 0):
            out.append(tag + "sigma must be positive")
        if not (self.T > 0):
            out.append(tag + "T must be positive")
        if not math.isfinite(self.lam):
            out.append(tag + "lambda must be finite")
        if not math.isfinite(self.gap):
            out.append(tag + "gap must be finite")
        if len(self.center) != 3 or not all(math.isfinite(c) for c in self.center):
            out.append(tag + "center must be a finite 3-vector")
        if not math.isfinite(self.switch_center):
            out.append(tag + "switch_center must be finite")
        return out


@dataclass(frozen=True)
class Scenario:
    """A pair of detectors, a coupling model, a regulator, and numerics."""

    detector_a: DetectorParams
    detector_b: DetectorParams
    model: ModelKind = field(default_factory=ModelKind.linear)
    smearing_mode: SmearingMode = SmearingMode.CENTER_OF_MASS
    epsilon: float = 0.01
    quad: QuadSettings = field(default_factory=QuadSettings)
    mc: MCSettings = field(default_factory=MCSettings)

    def with_epsilon(self, eps: float) -> "Scenario":
        return replace(self, epsilon=eps)

    def detector(self, label: str) -> DetectorParams:
        if label == self.detector_a.label:
            return self.detector_a
        if label == self.detector_b.label:
            return self.detector_b
        raise KeyError(f"no detector labelled {label!r}")

    def separation(self) -> float:
        da = np.asarray(self.detector_a.center)
        db = np.asarray(self.detector_b.center)
        return float(np.linalg.norm(da - db))


@dataclass
class ValidationReport:
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:  # truthy when there ARE violations
        return bool(self.violations)


def validate(scenario: Scenario) -> ValidationReport:
    """List every violated invariant; an empty report means runnable."""
    out: list[str] = []
    out.extend(scenario.detector_a.violations())
    out.extend(scenario.detector_b.violations())
    out.extend(scenario.model.violations())
    if scenario.detector_a.label == scenario.detector_b.label:
        out.append("detector labels must be distinct")
    if not (scenario.epsilon > 0):
        out.append("epsilon must be positive")
    if not isinstance(scenario.smearing_mode, SmearingMode):
        out.append("smearing_mode must be a SmearingMode")
    return ValidationReport(out)


# ---------------------------------------------------------------------------
# Profiles and their Fourier transforms

def smearing(det: DetectorParams, x) -> np.ndarray:
    """F(x) = (pi sigma^2)^(-3/2) exp(-|x - x0|^2/sigma^2); integrates to 1."""
    x = np.asarray(x, dtype=float)
    dx = x - np.asarray(det.center)
    r2 = np.sum(dx * dx, axis=-1)
    norm = (math.pi * det.sigma**2) ** (-1.5)
    return norm * np.exp(-r2 / det.sigma**2)


def switching(det: DetectorParams, t) -> np.ndarray:
    """chi(t) = exp(-(t - t0)^2 / T^2); peak value 1."""
    t = np.asarray(t, dtype=float)
    return np.exp(-((t - det.switch_center) / det.T) ** 2)


def smearing_ft(det: DetectorParams, k) -> np.ndarray:
    """int d^3x F(x) e^{-i k.x} = e^{-i k.x0} e^{-sigma^2 |k|^2 / 4}."""
    k = np.asarray(k, dtype=float)
    x0 = np.asarray(det.center)
    k2 = np.sum(k * k, axis=-1)
    phase = np.sum(k * x0, axis=-1)
    return np.exp(-1j * phase) * np.exp(-det.sigma**2 * k2 / 4.0)


def switching_ft(det: DetectorParams, omega) -> np.ndarray:
    """int dt chi(t) e^{+i omega t} = sqrt(pi) T e^{-omega^2 T^2/4} e^{+i omega t0}."""
    omega = np.asarray(omega, dtype=float)
    amp = math.sqrt(math.pi) * det.T * np.exp(-(omega * det.T) ** 2 / 4.0)
    return amp * np.exp(1j * omega * det.switch_center)


def default_scenario(model: ModelKind | None = None, *,
                     epsilon: float = 0.01,
                     smearing_mode: SmearingMode = SmearingMode.CENTER_OF_MASS,
                     quad: QuadSettings | None = None,
                     mc: MCSettings | None = None) -> Scenario:
    """The reference configuration: unit gaps and widths, separation 2,
    simultaneous switching."""
    det_a = DetectorParams("A", lam=1.0, gap=1.0, center=(0.0, 0.0, 0.0),
                           switch_center=0.0, sigma=1.0, T=1.0)
    det_b = DetectorParams("B", lam=1.0, gap=1.0, center=(2.0, 0.0, 0.0),
                           switch_center=0.0, sigma=1.0, T=1.0)
    return Scenario(
        detector_a=det_a,
        detector_b=det_b,
        model=model if model is not None else ModelKind.quadratic_real(),
        smearing_mode=smearing_mode,
        epsilon=epsilon,
        quad=quad if quad is not None else QuadSettings(),
        mc=mc if mc is not None else MCSettings(),
    )
