"""The softened massless-vacuum two-point kernel and per-model coefficients.

Each field contraction carries a soft UV factor e^{-eps |k|} in its momentum
integral, which in position space gives the bounded closed form

    W_eps(dt, r) = 1/(4 pi^2) * 1 / (r^2 - (dt - i eps)^2).

Powers of W are taken after softening: every factor carries its own e^{-eps|k|}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import ModelKind

__all__ = [
    "WightmanKernel",
    "KernelCoefficient",
    "wightman_eval",
    "momentum_density",
    "kernel_power_eval",
    "model_coefficient",
    "one_point_vacuum",
]

FOUR_PI_SQ = 4.0 * math.pi**2
_MEASURE_NORM = 2.0 * (2.0 * math.pi) ** 3


@dataclass(frozen=True)
class WightmanKernel:
    """Softened vacuum kernel; epsilon is the soft UV cutoff length."""

    epsilon: float

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class KernelCoefficient:
    """Power of the elementary kernel and rational prefactor for a model."""

    n: int
    c: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("kernel power n must be >= 1")
        if self.c not in (1, 2):
            raise ValueError("kernel prefactor c must be 1 or 2")


def wightman_eval(kernel: WightmanKernel, dt, r):
    """W_eps(dt, r); never singular for eps > 0.  dt, r may be arrays."""
    dt = np.asarray(dt, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be non-negative")
    z = dt - 1j * kernel.epsilon
    out = 1.0 / (FOUR_PI_SQ * (r * r - z * z))
    if out.ndim == 0:
        return complex(out)
    return out


def momentum_density(kernel: WightmanKernel, k_mag):
    """Per-mode measure weight e^{-eps k} / (2 (2 pi)^3 k)."""
    k = np.asarray(k_mag, dtype=float)
    if np.any(k <= 0):
        raise ValueError("k_mag must be positive")
    out = np.exp(-kernel.epsilon * k) / (_MEASURE_NORM * k)
    if out.ndim == 0:
        return float(out)
    return out


def kernel_power_eval(kernel: WightmanKernel, n: int, dt, r):
    """(W_eps(dt, r))^n for integer n >= 1."""
    if n < 1:
        raise ValueError("kernel power n must be >= 1")
    w = wightman_eval(kernel, dt, r)
    return w**n


def model_coefficient(model: ModelKind) -> KernelCoefficient:
    """(kernel power, prefactor) entering the pair observables.

    linear -> (1, 1); quadratic_real -> (2, 2); quadratic_complex -> (2, 1);
    bilinear with m fields -> (m, 1).
    """
    if model.name == "linear":
        return KernelCoefficient(1, 1)
    if model.name == "quadratic_real":
        return KernelCoefficient(2, 2)
    if model.name == "quadratic_complex":
        return KernelCoefficient(2, 1)
    if model.name == "bilinear":
        return KernelCoefficient(model.n_fields, 1)
    raise ValueError(f"unknown model {model.name!r}")


def one_point_vacuum(model: ModelKind) -> float:
    """Single-point function of the coupled field operator in the vacuum.

    Identically zero for every supported model: the linear field has no
    vacuum expectation, and the quadratic/bilinear vertices are normal
    ordered.  Kept explicit so the first-order response term is accounted
    for rather than silently dropped.
    """
    if model.violations():
        raise ValueError(f"invalid model {model!r}")
    return 0.0
