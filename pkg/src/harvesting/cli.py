"""Command-line interface: single computations as JSON, sweeps as CSV.

Subcommands: wightman, elements, rho, sweep, compare, oracle.
Exit codes: 0 success, 1 validation/usage error, 2 a computation failed to
converge and --allow-nonconverged was not given.

Outputs are byte-identical for identical (config, seed, version): data files
carry no timestamps, only the manifest sidecar does.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import hashlib
import json
import sys

import numpy as np

from . import __version__
from .config import ConfigError, load_scenario, scenario_to_dict
from .divergence import SweepSpec, classify, cutoff_sweep
from .elements import compute_elements, compute_L, compute_M, scenario_fingerprint
from .measures import measure_report
from .scenario import ModelKind, validate
from .wick import commutator_check, random_mode_set, wick_check_complex, \
    wick_check_real
from .wightman import WightmanKernel, kernel_power_eval

CSV_COLUMNS = ("param_value", "model", "L_AA", "L_AA_err", "L_BB", "L_BB_err",
               "L_AB_re", "L_AB_im", "L_AB_err", "M_re", "M_im", "M_err",
               "negativity", "mutual_info", "flags")


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 on usage errors (offending token is named)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _g15(x: float) -> str:
    return f"{x:.15g}"


@dataclasses.dataclass
class RunManifest:
    manifest_id: str
    version: str
    config: dict
    seed: int
    outputs: list
    created_utc: str

    @classmethod
    def for_run(cls, config: dict, seed: int, outputs: list) -> "RunManifest":
        blob = json.dumps({"config": config, "seed": seed,
                           "version": __version__}, sort_keys=True)
        mid = hashlib.sha256(blob.encode()).hexdigest()[:16]
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        return cls(mid, __version__, config, seed, outputs, stamp)

    def write(self, path: str):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(dataclasses.asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")


def emit_csv(rows: list[dict], path: str):
    """Write sweep rows with the fixed column schema, 15 significant digits."""
    if not rows:
        raise ValueError("no rows to write")
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        cells = []
        for col in CSV_COLUMNS:
            v = row[col]
            cells.append(_g15(v) if isinstance(v, float) else str(v))
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _elements_payload(scn, manifest_id: str) -> dict:
    els = compute_elements(scn)
    rep = measure_report(els)
    return {
        "L_AA": els.L_AA,
        "L_BB": els.L_BB,
        "L_AB": [els.L_AB.real, els.L_AB.imag],
        "M": [els.M.real, els.M.imag],
        "errors": {"L_AA": els.err_AA, "L_BB": els.err_BB,
                   "L_AB": els.err_AB, "M": els.err_M},
        "negativity": rep.negativity,
        "mutual_information": rep.mutual_information,
        "flags": list(els.flags),
        "settings_fingerprint": els.fingerprint,
        "manifest_id": manifest_id,
    }


def _load_checked(path: str):
    scn = load_scenario(path)
    report = validate(scn)
    if not report.ok:
        for msg in report.violations:
            print(f"invalid scenario: {msg}", file=sys.stderr)
        raise SystemExit(1)
    return scn


def _maybe_reseed(scn, seed):
    if seed is None:
        return scn
    return dataclasses.replace(
        scn, mc=dataclasses.replace(scn.mc, seed=int(seed)))


def _cmd_wightman(args) -> int:
    kernel = WightmanKernel(args.eps)
    v = kernel_power_eval(kernel, args.power, args.dt, args.r)
    print(f"{v.real:.14e} {v.imag:.14e}")
    return 0


def _cmd_elements(args) -> int:
    scn = _maybe_reseed(_load_checked(args.config), args.seed)
    manifest = RunManifest.for_run(scenario_to_dict(scn), scn.mc.seed,
                                   [args.out] if args.out else [])
    payload = _elements_payload(scn, manifest.manifest_id)
    text = json.dumps(payload, sort_keys=True, indent=2)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        manifest.write(args.out + ".manifest.json")
    if args.csv:
        emit_csv([{
            "param_value": scn.epsilon,
            "model": scn.model.name,
            "L_AA": payload["L_AA"], "L_AA_err": payload["errors"]["L_AA"],
            "L_BB": payload["L_BB"], "L_BB_err": payload["errors"]["L_BB"],
            "L_AB_re": payload["L_AB"][0], "L_AB_im": payload["L_AB"][1],
            "L_AB_err": payload["errors"]["L_AB"],
            "M_re": payload["M"][0], "M_im": payload["M"][1],
            "M_err": payload["errors"]["M"],
            "negativity": payload["negativity"],
            "mutual_info": payload["mutual_information"],
            "flags": ";".join(payload["flags"]),
        }], args.csv)
    if payload["flags"] and not args.allow_nonconverged:
        return 2
    return 0


def _cmd_rho(args) -> int:
    scn = _maybe_reseed(_load_checked(args.config), args.seed)
    els = compute_elements(scn)
    from .elements import assemble_rho
    rho = assemble_rho(els, swap_inner=args.swap_inner)
    rep = measure_report(els, swap_inner=args.swap_inner)
    for i in range(4):
        print("  ".join(f"{rho[i, j].real:+.9e}{rho[i, j].imag:+.9e}j"
                        for j in range(4)))
    print(f"negativity         = {_g15(rep.negativity)}")
    print(f"mutual_information = {_g15(rep.mutual_information)}")
    print(f"hermitian={rep.hermitian} unit_trace={rep.unit_trace} "
          f"x_pattern={rep.x_pattern} min_eigenvalue={_g15(rep.min_eigenvalue)}")
    if els.flags and not args.allow_nonconverged:
        return 2
    return 0


def _cmd_sweep(args) -> int:
    scn = _maybe_reseed(_load_checked(args.config), args.seed)
    if args.param == "epsilon":
        grid = np.geomspace(args.start, args.stop, args.points)
    else:
        grid = np.linspace(args.start, args.stop, args.points)
    spec = SweepSpec(scn, args.param, tuple(float(g) for g in grid))
    result = cutoff_sweep(spec)
    rows = []
    for p in result.points:
        e = p.elements
        rows.append({
            "param_value": p.param_value,
            "model": scn.model.name,
            "L_AA": e.L_AA, "L_AA_err": e.err_AA,
            "L_BB": e.L_BB, "L_BB_err": e.err_BB,
            "L_AB_re": e.L_AB.real, "L_AB_im": e.L_AB.imag,
            "L_AB_err": e.err_AB,
            "M_re": e.M.real, "M_im": e.M.imag, "M_err": e.err_M,
            "negativity": p.negativity, "mutual_info": p.mutual_information,
            "flags": ";".join(p.flags),
        })
    emit_csv(rows, args.out)
    verdicts = {el: dataclasses.asdict(classify(result, el))
                for el in ("L_AA", "L_BB", "L_AB", "M")}
    sidecar = {
        "csv": args.out,
        "param": args.param,
        "model": scn.model.name,
        "verdicts": verdicts,
        "manifest_id": None,
    }
    manifest = RunManifest.for_run(
        {"config": scenario_to_dict(scn), "param": args.param,
         "grid": [float(g) for g in grid]},
        scn.mc.seed, [args.out, args.out + ".verdicts.json"])
    sidecar["manifest_id"] = manifest.manifest_id
    with open(args.out + ".verdicts.json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest.write(args.out + ".manifest.json")
    print(f"wrote {args.out} ({len(rows)} points)")
    for el, v in verdicts.items():
        print(f"verdict {el}: {v['classification']}")
    if any(p.flags for p in result.points) and not args.allow_nonconverged:
        return 2
    return 0


def _cmd_compare(args) -> int:
    scn = _maybe_reseed(_load_checked(args.config), args.seed)
    models = {
        "linear": ModelKind.linear(),
        "quadratic_real": ModelKind.quadratic_real(),
        "quadratic_complex": ModelKind.quadratic_complex(),
        "bilinear_1": ModelKind.bilinear(1),
        "bilinear_2": ModelKind.bilinear(2),
    }
    vals: dict[str, dict[str, complex]] = {}
    for name, model in models.items():
        s = dataclasses.replace(scn, model=model)
        vals[name] = {
            "L_AA": compute_L(s, "A", "A").value,
            "L_AB": compute_L(s, "A", "B").value,
            "M": compute_M(s).value,
        }

    def rel(a, b):
        return abs(a - b) / max(abs(a), abs(b), 1e-300)

    checks = []
    for el in ("L_AA", "L_AB", "M"):
        checks.append((f"complex == bilinear(2)  [{el}]",
                       rel(vals["quadratic_complex"][el],
                           vals["bilinear_2"][el]), 1e-12))
        checks.append((f"real == 2 x complex     [{el}]",
                       rel(vals["quadratic_real"][el],
                           2.0 * vals["quadratic_complex"][el]), 1e-9))
        checks.append((f"bilinear(1) == linear   [{el}]",
                       rel(vals["bilinear_1"][el], vals["linear"][el]),
                       max(1e-6, 10 * scn.quad.rel_tol)))
    ok = True
    print(f"{'check':34s} {'rel diff':>12s}  result")
    for label, diff, tol in checks:
        good = diff <= tol
        ok = ok and good
        print(f"{label:34s} {diff:12.3e}  {'pass' if good else 'FAIL'}")
    return 0 if ok else 1


def _cmd_oracle(args) -> int:
    if args.what != "wick":
        print(f"unknown oracle {args.what!r}; available: wick", file=sys.stderr)
        return 1
    rng = np.random.Generator(np.random.PCG64(args.seed))
    modes = random_mode_set(args.modes, args.seed)
    p1 = (float(rng.normal()), tuple(rng.normal(size=3)))
    p2 = (float(rng.normal()), tuple(rng.normal(size=3)))
    reports = [wick_check_real(modes, p1, p2),
               wick_check_complex(modes, p1, p2)]
    reports.extend(commutator_check(modes, p1, p2))
    ok = True
    for rep in reports:
        ok = ok and rep.passed
        print(f"{'pass' if rep.passed else 'FAIL'}  {rep.identity} "
              f"(|err| = {rep.abs_err:.3e})")
    return 0 if ok else 1


def build_parser() -> _Parser:
    parser = _Parser(prog="harvest",
                     description="Detector-pair vacuum response toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = _Parser(add_help=False)
    common.add_argument("--out", default=None, help="output file path")
    common.add_argument("--seed", type=int, default=None,
                        help="override the MC seed")
    common.add_argument("--allow-nonconverged", action="store_true",
                        help="exit 0 even when a quadrature did not converge")

    w = sub.add_parser("wightman", help="evaluate the softened kernel")
    w.add_argument("--dt", type=float, required=True)
    w.add_argument("--r", type=float, required=True)
    w.add_argument("--eps", type=float, required=True)
    w.add_argument("--power", type=int, default=1)
    w.set_defaults(func=_cmd_wightman)

    e = sub.add_parser("elements", parents=[common],
                       help="compute L_AA, L_BB, L_AB, M for a config")
    e.add_argument("--config", required=True)
    e.add_argument("--csv", default=None,
                   help="also write a one-row CSV in the sweep schema")
    e.set_defaults(func=_cmd_elements)

    r = sub.add_parser("rho", parents=[common],
                       help="print the density matrix and measures")
    r.add_argument("--config", required=True)
    r.add_argument("--swap-inner", action="store_true",
                   help="swap the single-excitation diagonal convention")
    r.set_defaults(func=_cmd_rho)

    s = sub.add_parser("sweep", parents=[common],
                       help="sweep a parameter and write CSV + verdicts")
    s.add_argument("--config", required=True)
    s.add_argument("--param", default="epsilon",
                   choices=("epsilon", "gap_detuning", "separation"))
    s.add_argument("--from", dest="start", type=float, required=True)
    s.add_argument("--to", dest="stop", type=float, required=True)
    s.add_argument("--points", type=int, default=12)
    s.set_defaults(func=_cmd_sweep)
    # sweep requires an output file
    s.set_defaults(_needs_out=True)

    c = sub.add_parser("compare", parents=[common],
                       help="cross-model equivalence table")
    c.add_argument("--config", required=True)
    c.set_defaults(func=_cmd_compare)

    o = sub.add_parser("oracle", help="run an exact oracle")
    o.add_argument("what", choices=("wick",))
    o.add_argument("--modes", type=int, default=4)
    o.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    if getattr(args, "_needs_out", False) and not args.out:
        print("error: sweep requires --out", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
