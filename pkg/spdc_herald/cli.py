"""
spdc-herald command line.

    spdc-herald crystals list | show NAME
    spdc-herald solve --config run.json
    spdc-herald jsa --crystal KNbO3 --kind angular --out jaa.csv
    spdc-herald scan --config run.json --out scan.csv
    spdc-herald design --config run.json --out report.json
    spdc-herald efficiency --coincidences 7000 ...
    spdc-herald toy --k-p 1e5 --sigma 1e-4 --out toy.csv

Exit codes: 0 success, 1 invalid input or config, 2 numeric failure.
"""
import argparse
import logging
import sys
from typing import Dict, List, Optional

from spdc_herald import catalog, export
from spdc_herald.config import RunConfig, config_from_dict, read_document
from spdc_herald.designer import choose_pump_waist, design
from spdc_herald.exceptions import Error, InputError
from spdc_herald.heralding import CountRecord, counts_to_efficiency
from spdc_herald.joint_amplitude import (
    PumpSpec,
    joint_angular,
    joint_spectral,
    spectral_spatial,
)
from spdc_herald.phasematching import prepare
from spdc_herald.schmidt import (
    knee_angle,
    purity_vs_collection,
    purity_vs_pump_waist,
)
from spdc_herald.toy_model import (
    closed_form_herald,
    herald_idler,
    herald_signal,
)

JSA_KINDS = ("spectral", "angular", "spectral-spatial")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(msg=message)


def _add_common(parser: argparse.ArgumentParser, default_format: str):
    parser.add_argument("--out", help="output file, stdout when omitted")
    parser.add_argument(
        "--format", choices=("csv", "json"), default=default_format
    )
    parser.add_argument("--log", help="show log output", action="store_true")


def _add_run_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--crystal", help="catalog crystal name")
    parser.add_argument("--lambda-p", type=float, help="pump wavelength, m")
    parser.add_argument("--lambda-s", type=float, help="signal wavelength, m")
    parser.add_argument("--temperature", type=float, help="celsius")
    parser.add_argument("--regime", choices=("cw", "pulsed"))
    parser.add_argument("--duration", type=float, help="pump FWHM, s")
    parser.add_argument("--waist", type=float, help="pump waist, m")
    parser.add_argument("--xi-target", type=float)
    parser.add_argument("--grid-size", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spdc-herald")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("crystals", help="list or show catalog crystals")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    _add_common(p, "json")

    p = commands.add_parser("solve", help="poling period or angle")
    _add_run_flags(p)
    _add_common(p, "json")

    p = commands.add_parser("jsa", help="joint amplitude grids")
    _add_run_flags(p)
    p.add_argument("--kind", choices=JSA_KINDS, default="spectral")
    p.add_argument("--photon", choices=("signal", "idler"), default="signal")
    _add_common(p, "csv")

    p = commands.add_parser("scan", help="purity scans")
    _add_run_flags(p)
    p.add_argument("--scan-kind", choices=("pump-waist", "collection"))
    p.add_argument("--values", help="comma separated waists or angles")
    p.add_argument("--idler-ratio", type=float)
    _add_common(p, "csv")

    p = commands.add_parser("design", help="collection design report")
    _add_run_flags(p)
    _add_common(p, "json")

    p = commands.add_parser("efficiency", help="heralding from count rates")
    for name in (
        "coincidences",
        "singles-signal",
        "singles-idler",
        "eta-signal",
        "eta-idler",
        "t-signal",
        "t-idler",
    ):
        p.add_argument(f"--{name}", type=float, required=True)
    p.add_argument("--noise-signal", type=float, default=0.0)
    p.add_argument("--noise-idler", type=float, default=0.0)
    p.add_argument("--coincidences-idler-trigger", type=float)
    _add_common(p, "json")

    p = commands.add_parser("toy", help="1-D heralded state")
    p.add_argument("--k-p", type=float, required=True, help="rad/m")
    p.add_argument("--sigma", type=float, required=True, help="m")
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--span", type=float, default=8.0)
    p.add_argument(
        "--herald",
        choices=("signal", "idler", "closed-form"),
        default="signal",
    )
    _add_common(p, "csv")
    return parser


def _config(args) -> RunConfig:
    doc = read_document(args.config) if args.config else {}
    if args.crystal:
        doc["crystal"] = args.crystal
    for section, key, value in (
        ("interaction", "lambda_p", args.lambda_p),
        ("interaction", "lambda_s", args.lambda_s),
        ("interaction", "temperature", args.temperature),
        ("pump", "regime", args.regime),
        ("pump", "duration", args.duration),
        ("pump", "waist", args.waist),
        ("grid", "size", args.grid_size),
    ):
        if value is not None:
            doc.setdefault(section, {})[key] = value
    if args.xi_target is not None:
        doc["xi_target"] = args.xi_target
    if getattr(args, "scan_kind", None) is not None:
        doc.setdefault("scan", {})["kind"] = args.scan_kind
    if getattr(args, "values", None) is not None:
        doc.setdefault("scan", {})["values"] = _floats(args.values)
    if getattr(args, "idler_ratio", None) is not None:
        doc.setdefault("scan", {})["idler_ratio"] = args.idler_ratio
    return config_from_dict(doc)


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise InputError(msg=f"cannot parse values '{text}'") from e


def _pump(config: RunConfig, spec) -> PumpSpec:
    waist = config.pump_waist
    if waist is None:
        waist = choose_pump_waist(
            spec.lambda_p, spec.length, config.xi_target
        ).waist
    return PumpSpec(
        spec.lambda_p, config.pump_regime, waist, config.pump_duration
    )


def _emit_json(args, doc: Dict[str, object], stamp: bool = True):
    if args.out:
        export.write_json(args.out, doc, stamp)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(export.json_text(doc, stamp))


def _emit(args, doc, columns, metadata):
    if args.format == "json":
        _emit_json(args, doc)
        return
    if not args.out:
        raise InputError(msg="csv output needs --out")
    export.write_csv(args.out, columns, metadata)
    rows = len(next(iter(columns.values())))
    print(f"wrote {rows} rows to {args.out}")


def cmd_crystals(args) -> int:
    if args.action == "list":
        for name in catalog.list_crystals():
            doc = catalog.load_document(name)
            print(f"{name}\t{doc['pm_type']}\t{doc.get('source', '')}")
        return 0
    if not args.name:
        raise InputError(msg="crystals show needs a crystal name")
    crystal = catalog.load_crystal(args.name)
    # catalog documents stay valid catalog input
    _emit_json(args, catalog.crystal_to_document(crystal), stamp=False)
    return 0


def cmd_solve(args) -> int:
    config = _config(args)
    _, solution = prepare(config.interaction())
    _emit_json(args, dict(solution.to_dict(), crystal=config.crystal.name))
    return 0


def cmd_jsa(args) -> int:
    config = _config(args)
    spec, _ = prepare(config.interaction())
    pump = _pump(config, spec)
    if args.kind == "spectral":
        grid = joint_spectral(spec, pump, config.grid)
    elif args.kind == "angular":
        grid = joint_angular(spec, pump, config.grid)
    else:
        grid = spectral_spatial(spec, pump, args.photon, config.grid)
    metadata = dict(grid.metadata, crystal=spec.crystal.name, kind=args.kind)
    _emit(
        args, export.grid_document(grid), export.grid_columns(grid), metadata
    )
    return 0


def cmd_scan(args) -> int:
    config = _config(args)
    if config.scan is None:
        raise InputError(msg="scan needs a scan block or --scan-kind/--values")
    spec, _ = prepare(config.interaction())
    pump = _pump(config, spec)
    scan = config.scan
    if scan.kind == "pump-waist":
        points = purity_vs_pump_waist(spec, pump, scan.values, config.grid)
        name, units, knee = "pump-waist", "m", None
    else:
        points = purity_vs_collection(
            spec, pump, scan.values, scan.idler_ratio, config.grid, scan.path
        )
        name, units = "collection-angle-signal", "rad"
        knee = knee_angle(points)
    metadata = {"crystal": spec.crystal.name, "kind": scan.kind, "knee": knee}
    doc = dict(metadata, points=[list(p) for p in points])
    _emit(args, doc, export.scan_columns(points, name, units), metadata)
    return 0


def cmd_design(args) -> int:
    config = _config(args)
    spec, solution = prepare(config.interaction())
    report = design(
        spec,
        regime=config.pump_regime,
        duration=config.pump_duration,
        xi_target=config.xi_target,
        grid=config.grid,
        plateau_tolerance=config.plateau_tolerance,
        idler_rule=config.idler_rule,
        lens_catalog=config.lens_catalog,
        fibers=config.fibers,
    )
    if config.curves_dir:
        for name, grid in sorted(report.curves.items()):
            export.write_csv(
                f"{config.curves_dir}/{name}.csv",
                export.grid_columns(grid),
                dict(grid.metadata, crystal=spec.crystal.name),
            )
    _emit_json(args, dict(report.to_dict(), phasematching=solution.to_dict()))
    return 0


def cmd_efficiency(args) -> int:
    record = CountRecord(
        coincidences=args.coincidences,
        singles_signal=args.singles_signal,
        singles_idler=args.singles_idler,
        detector_efficiency_signal=args.eta_signal,
        detector_efficiency_idler=args.eta_idler,
        transmission_signal=args.t_signal,
        transmission_idler=args.t_idler,
        noise_signal=args.noise_signal,
        noise_idler=args.noise_idler,
        coincidences_idler_trigger=args.coincidences_idler_trigger,
    )
    _emit_json(args, counts_to_efficiency(record).to_dict())
    return 0


def cmd_toy(args) -> int:
    herald = {
        "signal": herald_signal,
        "idler": herald_idler,
        "closed-form": closed_form_herald,
    }[args.herald]
    psi = herald(args.k_p, args.sigma, args.samples, args.span)
    metadata = {"k_p": args.k_p, "sigma": args.sigma, "herald": args.herald}
    doc = dict(
        metadata,
        x=psi.grid.tolist(),
        re=psi.samples.real.tolist(),
        im=psi.samples.imag.tolist(),
    )
    _emit(args, doc, export.wavefunction_columns(psi), metadata)
    return 0


_commands = {
    "crystals": cmd_crystals,
    "solve": cmd_solve,
    "jsa": cmd_jsa,
    "scan": cmd_scan,
    "design": cmd_design,
    "efficiency": cmd_efficiency,
    "toy": cmd_toy,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except InputError as e:
        sys.stderr.write(f"spdc-herald: {e.msg}\n")
        return e.exit_code
    loglevel = "DEBUG" if args.log else "WARNING"
    logging.basicConfig(format="%(message)s", level=getattr(logging, loglevel))
    try:
        return _commands[args.command](args)
    except Error as e:
        logging.error(str(e))
        sys.stderr.write(f"spdc-herald: {e.msg}\n")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
