"""Regulator sweeps, divergence classification, and regularization variants.

Divergence is operationalized as instability of an element magnitude under a
log-spaced sweep of the soft UV cutoff: a series whose variation keeps pace
(or grows) as epsilon falls is divergent; one whose variation collapses is
convergent.  The classifier fits constant, a + b ln(1/eps), and a eps^-p
models and reports the winner with a bootstrap confidence interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .elements import ElementSet, compute_elements, compute_L, compute_M
from .measures import mutual_information, negativity
from .quadrature import Estimate
from .scenario import Scenario, SmearingMode

__all__ = [
    "SweepSpec",
    "SweepPoint",
    "SweepResult",
    "DivergenceVerdict",
    "RegularizationVariant",
    "cutoff_sweep",
    "classify",
    "detuning_scan",
    "regularized_element",
]

SWEEP_PARAMS = ("epsilon", "gap_detuning", "separation")
ELEMENT_IDS = ("L_AA", "L_BB", "L_AB", "M")

# verdict tuning: tail variation below TAIL_STABLE is convergent outright;
# a final-decade/first-decade variation ratio below DECAY_RATIO means the
# drift is a finite-epsilon transient, not a divergence that remains
TAIL_STABLE = 0.01
DECAY_RATIO = 0.3
PARSIMONY = 2.0


@dataclass(frozen=True)
class SweepSpec:
    base: Scenario
    param: str = "epsilon"
    grid: tuple[float, ...] = ()
    elements: tuple[str, ...] = ELEMENT_IDS

    def __post_init__(self):
        if self.param not in SWEEP_PARAMS:
            raise ValueError(f"param must be one of {SWEEP_PARAMS}")
        if len(self.grid) < 5:
            raise ValueError("sweep grid needs at least 5 points")
        diffs = np.diff(self.grid)
        if not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("sweep grid must be strictly monotone")
        bad = [e for e in self.elements if e not in ELEMENT_IDS]
        if bad:
            raise ValueError(f"unknown element ids {bad}")


@dataclass
class SweepPoint:
    param_value: float
    elements: ElementSet
    negativity: float
    mutual_information: float
    flags: tuple[str, ...]


@dataclass
class SweepResult:
    spec: SweepSpec
    points: list[SweepPoint]

    def series(self, element: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(param values, |element| values, error estimates) per point."""
        xs = np.array([p.param_value for p in self.points])
        vs = np.array([abs(getattr(p.elements, element)) for p in self.points])
        es = np.array([getattr(p.elements, "err_" + element[2:])
                       if element.startswith("L_") else p.elements.err_M
                       for p in self.points])
        return xs, vs, es


@dataclass(frozen=True)
class DivergenceVerdict:
    classification: str  # convergent | divergent_log | divergent_power | undetermined
    slope: float | None = None        # b of a + b ln(1/eps)
    exponent: float | None = None     # p of a eps^-p
    ci: tuple[float, float] | None = None
    tail_stability: float = math.nan
    decade_ratio: float = math.nan
    residuals: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RegularizationVariant:
    """kind 'nascent_delta': split each quadratic vertex with a Gaussian of
    width delta linking the field legs; kind 'per_leg': smear every leg
    separately."""

    kind: str
    delta: float = 0.0

    def __post_init__(self):
        if self.kind not in ("nascent_delta", "per_leg"):
            raise ValueError("kind must be 'nascent_delta' or 'per_leg'")
        if self.delta < 0:
            raise ValueError("delta must be non-negative")


def _apply_param(base: Scenario, param: str, value: float) -> Scenario:
    if param == "epsilon":
        return base.with_epsilon(value)
    if param == "gap_detuning":
        db = replace(base.detector_b, gap=base.detector_a.gap + value)
        return replace(base, detector_b=db)
    if param == "separation":
        ca = np.asarray(base.detector_a.center)
        cb = np.asarray(base.detector_b.center)
        axis = cb - ca
        norm = np.linalg.norm(axis)
        unit = axis / norm if norm > 0 else np.array([1.0, 0.0, 0.0])
        db = replace(base.detector_b, center=tuple(ca + value * unit))
        return replace(base, detector_b=db)
    raise ValueError(param)


def cutoff_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate the requested elements on every grid point, in grid order.

    Requires the epsilon grid to cover at least two decades.  Points that
    fail to converge are kept and flagged, never dropped.
    """
    if spec.param == "epsilon":
        lo, hi = min(spec.grid), max(spec.grid)
        if hi / lo < 99.999:
            raise ValueError("epsilon sweep must span at least two decades")
    points = []
    for value in spec.grid:
        scn = _apply_param(spec.base, spec.param, value)
        els = compute_elements(scn)
        points.append(SweepPoint(
            param_value=float(value),
            elements=els,
            negativity=negativity(els),
            mutual_information=mutual_information(els),
            flags=els.flags,
        ))
    return SweepResult(spec, points)


# ---------------------------------------------------------------------------
# classification

def _fit_constant(v):
    a = float(np.mean(v))
    return a, v - a


def _fit_log(x, v):
    # v = a + b ln(1/eps)
    t = np.log(1.0 / x)
    b, a = np.polyfit(t, v, 1)
    return a, b, v - (a + b * t)


def _fit_power(x, v):
    # ln v = ln a - p ln eps, only meaningful for positive v
    vv = np.maximum(v, 1e-300)
    coeff = np.polyfit(np.log(x), np.log(vv), 1)
    p = -coeff[0]
    a = math.exp(coeff[1])
    return a, p, v - a * x ** (-p)


def _decade_changes(x, v):
    """Relative change of a local linear-in-ln(1/eps) fit across the lowest
    and the highest decade of the sweep."""
    t = np.log10(x)
    lo, hi = t.min(), t.max()

    def decade_change(t0, t1):
        sel = (t >= t0 - 1e-9) & (t <= t1 + 1e-9)
        if sel.sum() < 2:
            return math.nan
        b, a = np.polyfit(t[sel], v[sel], 1)
        v_lo, v_hi = a + b * t0, a + b * t1
        scale = max(abs(v_lo), abs(v_hi), 1e-300)
        return abs(v_hi - v_lo) / scale

    return decade_change(lo, lo + 1.0), decade_change(hi - 1.0, hi)


def classify(result: SweepResult, element: str, *, seed: int = 0,
             n_boot: int = 200) -> DivergenceVerdict:
    """Fit the swept magnitudes and name the behavior as epsilon -> 0."""
    xs, vs, errs = result.series(element)
    converged = np.array(
        [not any(f.endswith(element) for f in p.flags) for p in result.points])
    xs, vs, errs = xs[converged], vs[converged], errs[converged]
    if len(xs) < 5:
        return DivergenceVerdict("undetermined")
    order = np.argsort(xs)
    xs, vs, errs = xs[order], vs[order], errs[order]

    _, res_c = _fit_constant(vs)
    _, slope, res_l = _fit_log(xs, vs)
    _, expo, res_p = _fit_power(xs, vs)
    rms = {k: float(np.sqrt(np.mean(r**2)))
           for k, r in (("constant", res_c), ("log", res_l), ("power", res_p))}

    variation = float(vs.max() - vs.min())
    if float(np.max(errs)) > 0.1 * max(variation, 1e-300):
        return DivergenceVerdict("undetermined", residuals=rms)

    tail_change, head_change = _decade_changes(xs, vs)
    ratio = tail_change / head_change if head_change and head_change > 0 else math.nan

    if rms["constant"] <= PARSIMONY * min(rms["log"], rms["power"]):
        kind = "convergent"
    elif tail_change < TAIL_STABLE:
        kind = "convergent"
    elif not math.isnan(ratio) and ratio < DECAY_RATIO:
        # variation collapses toward small epsilon: transient, not persistent
        kind = "convergent"
    elif rms["log"] <= rms["power"]:
        kind = "divergent_log"
    else:
        kind = "divergent_power"

    ci = None
    fitted = slope if kind == "divergent_log" else (
        expo if kind == "divergent_power" else None)
    if kind in ("divergent_log", "divergent_power"):
        rng = np.random.Generator(np.random.PCG64(seed))
        stats = []
        for _ in range(n_boot):
            idx = rng.integers(0, len(xs), len(xs))
            if len(np.unique(xs[idx])) < 2:
                continue
            if kind == "divergent_log":
                _, b, _ = _fit_log(xs[idx], vs[idx])
                stats.append(b)
            else:
                _, p, _ = _fit_power(xs[idx], vs[idx])
                stats.append(p)
        if stats:
            ci = (float(np.percentile(stats, 2.5)),
                  float(np.percentile(stats, 97.5)))

    return DivergenceVerdict(
        classification=kind,
        slope=slope if kind != "divergent_power" else None,
        exponent=expo if kind == "divergent_power" else None,
        ci=ci,
        tail_stability=tail_change,
        decade_ratio=ratio,
        residuals=rms,
    )


# ---------------------------------------------------------------------------
# detuning scan and regularized elements

def detuning_scan(base: Scenario, detunings, *, mini_grid=None) -> dict:
    """|M| against the gap offset of detector B, with a nested mini epsilon
    sweep per offset for a verdict.  Exploratory output only."""
    if base.detector_a.gap != base.detector_b.gap:
        raise ValueError("detuning scan requires equal base gaps")
    detunings = tuple(float(d) for d in detunings)
    if mini_grid is None:
        mini_grid = tuple(np.geomspace(1e-3, 1e-1, 5))
    rows = []
    for delta in detunings:
        scn = _apply_param(base, "gap_detuning", delta)
        m = compute_M(scn)
        spec = SweepSpec(scn, "epsilon", tuple(mini_grid), ("L_AA", "L_BB", "L_AB", "M"))
        verdict = classify(cutoff_sweep(spec), "M")
        rows.append({"detuning": delta, "abs_M": abs(m.value),
                     "M": m.value, "err": m.err,
                     "verdict": verdict.classification,
                     "tail_stability": verdict.tail_stability})
    mags = [r["abs_M"] for r in rows]
    trend = "flat"
    if len(mags) >= 2:
        if all(b <= a * (1 + 1e-9) for a, b in zip(mags, mags[1:])):
            trend = "non-increasing"
        elif all(b >= a * (1 - 1e-9) for a, b in zip(mags, mags[1:])):
            trend = "non-decreasing"
        else:
            trend = "mixed"
    return {"rows": rows, "trend": trend}


def regularized_element(scn: Scenario, reg: RegularizationVariant,
                        element: str = "M") -> Estimate:
    """One element under a regularization variant.

    nascent_delta multiplies each momentum leg by exp(-delta^2 k^2/4) on top
    of the center-of-mass profile (the vertex-splitting Gaussian); per_leg
    switches the smearing mode.  Only defined for kernel power >= 2.
    """
    from .wightman import model_coefficient
    if model_coefficient(scn.model).n < 2:
        raise ValueError("regularization variants need kernel power n >= 2")
    if reg.kind == "per_leg":
        scn = replace(scn, smearing_mode=SmearingMode.PER_LEG)
        delta = 0.0
    else:
        scn = replace(scn, smearing_mode=SmearingMode.CENTER_OF_MASS)
        delta = reg.delta
    if element == "M":
        return compute_M(scn, delta=delta)
    if element in ("L_AA", "L_BB", "L_AB", "L_BA"):
        return compute_L(scn, element[2], element[3], delta=delta)
    raise ValueError(f"unknown element id {element!r}")
