"""
JSON run configuration, validated into a RunConfig before any computation.

    {"schema_version": 1,
     "crystal": "KNbO3" | {catalog document},
     "interaction": {"lambda_p", "lambda_s", "temperature"},
     "pump": {"regime", "duration", "waist"},
     "grid": {"size", "window_factor", "pump_samples"},
     "scan": {"kind", "values", "idler_ratio", "path"},
     "xi_target", "plateau_tolerance", "idler_rule",
     "lens_catalog": [m, ...],
     "fibers": {"signal_mfd", "idler_mfd"},
     "outputs": {"curves_dir"}}

Every key but crystal is optional; unset values come from the catalog
defaults and the package globals.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from spdc_herald.catalog import crystal_from_document, load_crystal
from spdc_herald.designer import IDLER_RULES
from spdc_herald.dispersion import CrystalSpec
from spdc_herald.exceptions import CatalogError, ConfigError, DomainError
from spdc_herald.globals import (
    default_plateau_tolerance,
    default_xi_target,
    schema_version,
)
from spdc_herald.joint_amplitude import GridSpec
from spdc_herald.phasematching import InteractionSpec, interaction_from_crystal

SCAN_KINDS = ("pump-waist", "collection")

_number = (int, float)

# key -> (accepted types, nested schema or None)
_schema = {
    "schema_version": (int, None),
    "crystal": ((str, dict), None),
    "interaction": (
        dict,
        {
            "lambda_p": (_number, None),
            "lambda_s": (_number, None),
            "temperature": (_number, None),
        },
    ),
    "pump": (
        dict,
        {
            "regime": (str, None),
            "duration": (_number, None),
            "waist": (_number, None),
        },
    ),
    "grid": (
        dict,
        {
            "size": (int, None),
            "window_factor": (_number, None),
            "pump_samples": (int, None),
        },
    ),
    "scan": (
        dict,
        {
            "kind": (str, None),
            "values": (list, None),
            "idler_ratio": (_number, None),
            "path": (str, None),
        },
    ),
    "xi_target": (_number, None),
    "plateau_tolerance": (_number, None),
    "idler_rule": (str, None),
    "lens_catalog": (list, None),
    "fibers": (
        dict,
        {"signal_mfd": (_number, None), "idler_mfd": (_number, None)},
    ),
    "outputs": (dict, {"curves_dir": (str, None)}),
}


def _validate(doc: Dict[str, Any], schema: dict, prefix: str = ""):
    for key, value in doc.items():
        path = prefix + key
        if key not in schema:
            raise ConfigError(msg=f"unknown config key '{path}'", path=path)
        kinds, nested = schema[key]
        if isinstance(value, bool) or not isinstance(value, kinds):
            raise ConfigError(
                msg=f"config key '{path}' has wrong type"
                f" {type(value).__name__}",
                path=path,
            )
        if nested is not None:
            _validate(value, nested, path + ".")


def _numbers(values: list, path: str) -> Tuple[float, ...]:
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, _number):
            raise ConfigError(
                msg=f"config key '{path}[{i}]' must be a number",
                path=f"{path}[{i}]",
            )
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class ScanConfig:
    kind: str
    values: Tuple[float, ...]
    idler_ratio: Optional[float] = None
    path: str = "amplitude"


@dataclass(frozen=True)
class RunConfig:
    crystal: CrystalSpec
    lambda_p: Optional[float] = None
    lambda_s: Optional[float] = None
    temperature: Optional[float] = None
    pump_regime: str = "pulsed"
    pump_duration: Optional[float] = None
    pump_waist: Optional[float] = None
    grid: GridSpec = GridSpec()
    scan: Optional[ScanConfig] = None
    xi_target: float = default_xi_target
    plateau_tolerance: float = default_plateau_tolerance
    idler_rule: str = "max-symmetric"
    lens_catalog: Tuple[float, ...] = ()
    fibers: Dict[str, float] = field(default_factory=dict)
    curves_dir: Optional[str] = None

    def interaction(self) -> InteractionSpec:
        return interaction_from_crystal(
            self.crystal,
            lambda_p=self.lambda_p,
            lambda_s=self.lambda_s,
            temperature=self.temperature,
        )


def _crystal(value: Union[str, dict]) -> CrystalSpec:
    try:
        if isinstance(value, str):
            return load_crystal(value)
        return crystal_from_document(value)
    except CatalogError as e:
        raise ConfigError(msg=f"crystal: {e.msg}", path="crystal") from e


def config_from_dict(doc: Any) -> RunConfig:
    """
    :raise ConfigError naming the offending key path
    """
    if not isinstance(doc, dict):
        raise ConfigError(msg="config must be a JSON object")
    _validate(doc, _schema)
    version = doc.get("schema_version", schema_version)
    if version != schema_version:
        raise ConfigError(
            msg=f"unsupported schema_version {version}, expected"
            f" {schema_version}",
            path="schema_version",
        )
    if "crystal" not in doc:
        raise ConfigError(msg="missing config key 'crystal'", path="crystal")
    crystal = _crystal(doc["crystal"])
    interaction = doc.get("interaction", {})
    pump = dict(crystal.defaults.get("pump", {}))
    pump.update(doc.get("pump", {}))
    if pump.get("regime", "pulsed") not in ("cw", "pulsed"):
        raise ConfigError(
            msg=f"pump.regime must be 'cw' or 'pulsed', got {pump['regime']}",
            path="pump.regime",
        )
    if pump.get("regime") == "cw":
        pump.pop("duration", None)
    fibers = dict(crystal.defaults.get("fibers", {}))
    fibers.update(doc.get("fibers", {}))
    idler_rule = doc.get("idler_rule", "max-symmetric")
    if idler_rule not in IDLER_RULES:
        raise ConfigError(
            msg=f"idler_rule must be one of {IDLER_RULES}, got {idler_rule}",
            path="idler_rule",
        )
    try:
        grid = GridSpec(**doc.get("grid", {}))
    except DomainError as e:
        raise ConfigError(msg=f"grid: {e.msg}", path="grid") from e
    scan = None
    if "scan" in doc:
        scan = _scan(doc["scan"])
    config = RunConfig(
        crystal=crystal,
        lambda_p=interaction.get("lambda_p"),
        lambda_s=interaction.get("lambda_s"),
        temperature=interaction.get("temperature"),
        pump_regime=pump.get("regime", "pulsed"),
        pump_duration=pump.get("duration"),
        pump_waist=pump.get("waist"),
        grid=grid,
        scan=scan,
        xi_target=float(doc.get("xi_target", default_xi_target)),
        plateau_tolerance=float(
            doc.get("plateau_tolerance", default_plateau_tolerance)
        ),
        idler_rule=idler_rule,
        lens_catalog=_numbers(doc.get("lens_catalog", []), "lens_catalog"),
        fibers={k: float(v) for k, v in fibers.items()},
        curves_dir=doc.get("outputs", {}).get("curves_dir"),
    )
    logging.debug("config: {}".format(config))
    return config


def _scan(doc: Dict[str, Any]) -> ScanConfig:
    kind = doc.get("kind")
    if kind not in SCAN_KINDS:
        raise ConfigError(
            msg=f"scan.kind must be one of {SCAN_KINDS}, got {kind}",
            path="scan.kind",
        )
    values = _numbers(doc.get("values", []), "scan.values")
    if not values:
        raise ConfigError(msg="scan.values is empty", path="scan.values")
    path = doc.get("path", "amplitude")
    if path not in ("amplitude", "intensity"):
        raise ConfigError(
            msg=f"scan.path must be 'amplitude' or 'intensity', got {path}",
            path="scan.path",
        )
    ratio = doc.get("idler_ratio")
    return ScanConfig(
        kind=kind,
        values=values,
        idler_ratio=None if ratio is None else float(ratio),
        path=path,
    )


def read_document(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise ConfigError(msg=f"config file {path} not found") from e
    except json.JSONDecodeError as e:
        raise ConfigError(msg=f"config file {path} is not valid JSON") from e


def load_config(path: Union[str, Path]) -> RunConfig:
    return config_from_dict(read_document(path))
