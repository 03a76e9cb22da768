"""Scenario configuration files.

TOML with four sections; every parse error names the offending key.

    [scenario]
    model = "quadratic_real"   # linear | quadratic_real | quadratic_complex | bilinear
    n = 2                      # field count, bilinear only (default 2)
    epsilon = 0.01
    smearing_mode = "center_of_mass"   # or "per_leg"

    [detector.A]               # and [detector.B]
    lambda = 1.0
    gap = 1.0
    center = [0.0, 0.0, 0.0]
    switch_center = 0.0
    sigma = 1.0
    T = 1.0

    [quadrature]               # optional
    rel_tol = 1e-7
    abs_tol = 1e-14
    max_evals = 2000000

    [mc]                       # optional
    samples = 1000000
    seed = 1
"""

from __future__ import annotations

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .quadrature import MCSettings, QuadSettings
from .scenario import DetectorParams, ModelKind, Scenario, SmearingMode

__all__ = ["ConfigError", "load_scenario", "scenario_to_dict"]

_MODEL_ALIASES = {
    "linear": ModelKind.linear,
    "quadratic_real": ModelKind.quadratic_real,
    "quadratic_complex": ModelKind.quadratic_complex,
}


class ConfigError(ValueError):
    pass


def _get(table: dict, section: str, key: str, types, default=...):
    if key not in table:
        if default is not ...:
            return default
        raise ConfigError(f"[{section}] missing required key '{key}'")
    val = table[key]
    if isinstance(val, bool) or not isinstance(val, types):
        raise ConfigError(
            f"[{section}] key '{key}' has wrong type: got {type(val).__name__}")
    return val


def _number(table, section, key, default=...):
    v = _get(table, section, key, (int, float), default)
    return float(v)


def _detector(tables: dict, label: str) -> DetectorParams:
    section = f"detector.{label}"
    if label not in tables:
        raise ConfigError(f"missing section [{section}]")
    t = tables[label]
    center = _get(t, section, "center", list)
    if len(center) != 3 or not all(isinstance(c, (int, float))
                                   and not isinstance(c, bool) for c in center):
        raise ConfigError(f"[{section}] key 'center' must be [x, y, z]")
    det = DetectorParams(
        label=label,
        lam=_number(t, section, "lambda"),
        gap=_number(t, section, "gap"),
        center=tuple(float(c) for c in center),
        switch_center=_number(t, section, "switch_center", 0.0),
        sigma=_number(t, section, "sigma"),
        T=_number(t, section, "T"),
    )
    known = {"lambda", "gap", "center", "switch_center", "sigma", "T"}
    for key in t:
        if key not in known:
            raise ConfigError(f"[{section}] unknown key '{key}'")
    return det


def load_scenario(path) -> Scenario:
    """Parse a scenario file.  Raises ConfigError naming the offending key."""
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config syntax error: {exc}") from exc

    if "scenario" not in data:
        raise ConfigError("missing section [scenario]")
    sc = data["scenario"]
    model_name = _get(sc, "scenario", "model", str)
    if model_name in _MODEL_ALIASES:
        model = _MODEL_ALIASES[model_name]()
    elif model_name == "bilinear":
        n = _get(sc, "scenario", "n", int, 2)
        model = ModelKind.bilinear(n)
    else:
        raise ConfigError(
            f"[scenario] key 'model' must name a coupling model, got {model_name!r}")
    mode_name = _get(sc, "scenario", "smearing_mode", str, "center_of_mass")
    try:
        mode = SmearingMode(mode_name)
    except ValueError:
        raise ConfigError(
            f"[scenario] key 'smearing_mode' must be 'center_of_mass' or "
            f"'per_leg', got {mode_name!r}") from None
    epsilon = _number(sc, "scenario", "epsilon")

    dets = data.get("detector", {})
    det_a = _detector(dets, "A")
    det_b = _detector(dets, "B")

    q = data.get("quadrature", {})
    try:
        quad = QuadSettings(
            rel_tol=_number(q, "quadrature", "rel_tol", 1e-7),
            abs_tol=_number(q, "quadrature", "abs_tol", 1e-14),
            max_evals=int(_get(q, "quadrature", "max_evals", int, 2_000_000)),
            tail_radius=_number(q, "quadrature", "tail_radius", 8.0),
        )
    except ValueError as exc:
        raise ConfigError(f"[quadrature] {exc}") from exc

    m = data.get("mc", {})
    try:
        mc = MCSettings(
            samples=int(_get(m, "mc", "samples", int, 1_000_000)),
            seed=int(_get(m, "mc", "seed", int, 1)),
        )
    except ValueError as exc:
        raise ConfigError(f"[mc] {exc}") from exc

    return Scenario(detector_a=det_a, detector_b=det_b, model=model,
                    smearing_mode=mode, epsilon=epsilon, quad=quad, mc=mc)


def scenario_to_dict(scn: Scenario) -> dict:
    """Round-trippable snapshot of a scenario (for manifests)."""
    def det(d: DetectorParams):
        return {"lambda": d.lam, "gap": d.gap, "center": list(d.center),
                "switch_center": d.switch_center, "sigma": d.sigma, "T": d.T}

    return {
        "scenario": {
            "model": scn.model.name,
            "n": scn.model.n_fields,
            "epsilon": scn.epsilon,
            "smearing_mode": scn.smearing_mode.value,
        },
        "detector": {"A": det(scn.detector_a), "B": det(scn.detector_b)},
        "quadrature": {
            "rel_tol": scn.quad.rel_tol,
            "abs_tol": scn.quad.abs_tol,
            "max_evals": scn.quad.max_evals,
            "tail_radius": scn.quad.tail_radius,
        },
        "mc": {"samples": scn.mc.samples, "seed": scn.mc.seed},
    }
