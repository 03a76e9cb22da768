"""Entanglement and correlation measures on the leading-order X-state.

Closed forms valid at second order in the couplings; the exact 4x4
diagonalization of the assembled matrix serves as the oracle in tests.
Logarithms are natural.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .elements import ElementSet, PerturbativityViolated, assemble_rho

__all__ = [
    "MeasureReport",
    "negativity",
    "mutual_information",
    "validate_state",
    "measure_report",
]

_MI_FLOOR = -1e-12


@dataclass(frozen=True)
class MeasureReport:
    negativity: float
    mutual_information: float
    hermitian: bool
    unit_trace: bool
    perturbative: bool
    min_eigenvalue: float
    x_pattern: bool


def _check_perturbative(elements: ElementSet):
    if elements.L_AA + elements.L_BB > 1.0:
        raise PerturbativityViolated(
            f"L_AA + L_BB = {elements.L_AA + elements.L_BB} exceeds 1")


def negativity(elements: ElementSet) -> float:
    """N = max(0, sqrt(|M|^2 + ((L_AA - L_BB)/2)^2) - (L_AA + L_BB)/2).

    Equals minus the negative eigenvalue of the single-excitation block of
    the partially transposed X-state whenever that block is non-positive.
    """
    _check_perturbative(elements)
    half_diff = 0.5 * (elements.L_AA - elements.L_BB)
    half_sum = 0.5 * (elements.L_AA + elements.L_BB)
    return max(0.0, np.hypot(abs(elements.M), half_diff) - half_sum)


def mutual_information(elements: ElementSet) -> float:
    """Leading-order mutual information of the detector pair.

    I = L+ ln L+ + L- ln L- - L_AA ln L_AA - L_BB ln L_BB with
    L± the eigenvalues of the single-excitation block; 0 ln 0 = 0.
    """
    _check_perturbative(elements)
    laa, lbb = elements.L_AA, elements.L_BB
    if elements.L_AB == 0.0:
        return 0.0
    disc = np.hypot(laa - lbb, 2.0 * abs(elements.L_AB))
    lp = 0.5 * (laa + lbb + disc)
    lm = max(0.5 * (laa + lbb - disc), 0.0)
    val = float(xlogy(lp, lp) + xlogy(lm, lm)
                - xlogy(laa, laa) - xlogy(lbb, lbb))
    if val < _MI_FLOOR:
        raise ValueError(f"mutual information {val} below numerical floor")
    return max(val, 0.0)


def validate_state(rho: np.ndarray) -> dict:
    """Structural checks on a 4x4 density matrix.

    Returns flags for Hermiticity (1e-12), unit trace, the X pattern, and
    the minimum eigenvalue (may be slightly negative at fourth order;
    reported, not fatal).
    """
    rho = np.asarray(rho)
    herm = bool(np.max(np.abs(rho - rho.conj().T)) <= 1e-12)
    tr = complex(np.trace(rho))
    unit_trace = bool(abs(tr - 1.0) <= 1e-14)
    zero_idx = [(0, 1), (0, 2), (1, 3), (2, 3)]
    xpat = all(rho[i, j] == 0.0 and rho[j, i] == 0.0 for i, j in zero_idx)
    eigs = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    return {
        "hermitian": herm,
        "unit_trace": unit_trace,
        "x_pattern": bool(xpat),
        "min_eigenvalue": float(eigs.min()),
    }


def measure_report(elements: ElementSet, *, swap_inner: bool = False) -> MeasureReport:
    """Both measures plus the state-validity flags for one element set."""
    rho = assemble_rho(elements, swap_inner=swap_inner)
    flags = validate_state(rho)
    return MeasureReport(
        negativity=negativity(elements),
        mutual_information=mutual_information(elements),
        hermitian=flags["hermitian"],
        unit_trace=flags["unit_trace"],
        perturbative=elements.L_AA + elements.L_BB <= 1.0,
        min_eigenvalue=flags["min_eigenvalue"],
        x_pattern=flags["x_pattern"],
    )
