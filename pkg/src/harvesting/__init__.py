"""Two Gaussian-profiled detectors coupled to massless scalar vacua:
second-order pair observables, entanglement measures, and UV-regulator
diagnostics for the non-local term."""

__version__ = "0.1.0"

from .elements import (ElementSet, PerturbativityViolated, assemble_rho,
                       compute_elements, compute_L, compute_M,
                       oracle_position_space)
from .measures import (MeasureReport, measure_report, mutual_information,
                       negativity, validate_state)
from .quadrature import (Estimate, MCSettings, QuadSettings,
                         integrate_adaptive, integrate_mc, nested_time_weight)
from .scenario import (DetectorParams, ModelKind, Scenario, SmearingMode,
                       default_scenario, smearing, smearing_ft, switching,
                       switching_ft, validate)
from .wightman import (KernelCoefficient, WightmanKernel, kernel_power_eval,
                       model_coefficient, momentum_density, one_point_vacuum,
                       wightman_eval)

__all__ = [
    "__version__",
    "DetectorParams", "ModelKind", "Scenario", "SmearingMode",
    "default_scenario", "validate",
    "smearing", "switching", "smearing_ft", "switching_ft",
    "WightmanKernel", "KernelCoefficient", "wightman_eval",
    "momentum_density", "kernel_power_eval", "model_coefficient",
    "one_point_vacuum",
    "QuadSettings", "MCSettings", "Estimate",
    "integrate_adaptive", "integrate_mc", "nested_time_weight",
    "ElementSet", "PerturbativityViolated", "compute_L", "compute_M",
    "compute_elements", "oracle_position_space", "assemble_rho",
    "MeasureReport", "negativity", "mutual_information", "validate_state",
    "measure_report",
]
