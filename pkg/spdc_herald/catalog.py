"""
Crystal catalog: one human editable JSON document per crystal.

    {name, pm_type, length, cross_section, transparency_range, temperature,
     poling_period?, source,
     sellmeier: [{axis, form, coefficients, temperature_coefficients?,
                  valid_range, source}],
     defaults: {...}}

Lengths in metres, temperature in celsius.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List

from spdc_herald.dispersion import FORMS, PM_TYPES, CrystalSpec, SellmeierSet
from spdc_herald.exceptions import CatalogError, DomainError

catalog_dir = Path(__file__).parent / "data"

_required = {
    "name": str,
    "pm_type": str,
    "length": (int, float),
    "cross_section": list,
    "transparency_range": list,
    "sellmeier": list,
}
_optional = {
    "temperature": (int, float),
    "poling_period": (int, float, type(None)),
    "source": str,
    "defaults": dict,
}
_sellmeier_required = {
    "axis": str,
    "form": str,
    "coefficients": list,
    "valid_range": list,
}
_sellmeier_optional = {
    "temperature_coefficients": list,
    "source": str,
}


def _check_keys(doc: dict, required: dict, optional: dict, path: str):
    for key in doc:
        if key not in required and key not in optional:
            raise CatalogError(msg=f"unknown key '{path}{key}'")
    for key in required:
        if key not in doc:
            raise CatalogError(msg=f"missing key '{path}{key}'")
    for key, value in doc.items():
        kind = required.get(key, optional.get(key))
        if isinstance(value, bool) or not isinstance(value, kind):
            raise CatalogError(
                msg=f"key '{path}{key}' has wrong type"
                f" {type(value).__name__}"
            )


def _check_pair(value: list, path: str):
    if len(value) != 2 or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        raise CatalogError(msg=f"'{path}' must be a pair of numbers")


def validate_document(doc: Any) -> None:
    """
    Check a catalog document against the schema.
    :raise CatalogError naming the offending key
    """
    if not isinstance(doc, dict):
        raise CatalogError(msg="catalog document must be a JSON object")
    _check_keys(doc, _required, _optional, "")
    if doc["pm_type"] not in PM_TYPES:
        raise CatalogError(
            msg=f"'pm_type' must be one of {PM_TYPES}, got {doc['pm_type']}"
        )
    _check_pair(doc["cross_section"], "cross_section")
    _check_pair(doc["transparency_range"], "transparency_range")
    if not doc["sellmeier"]:
        raise CatalogError(msg="'sellmeier' must not be empty")
    for i, entry in enumerate(doc["sellmeier"]):
        path = f"sellmeier[{i}]."
        if not isinstance(entry, dict):
            raise CatalogError(msg=f"'sellmeier[{i}]' must be an object")
        _check_keys(entry, _sellmeier_required, _sellmeier_optional, path)
        if entry["form"] not in FORMS:
            raise CatalogError(
                msg=f"'{path}form' must be one of {FORMS}, got"
                f" {entry['form']}"
            )
        _check_pair(entry["valid_range"], path + "valid_range")


def crystal_from_document(doc: Dict[str, Any]) -> CrystalSpec:
    validate_document(doc)
    try:
        sets = tuple(
            SellmeierSet(
                axis=s["axis"],
                form=s["form"],
                coefficients=tuple(float(c) for c in s["coefficients"]),
                valid_range=tuple(s["valid_range"]),
                source=s.get("source", ""),
                temperature_coefficients=tuple(
                    float(c) for c in s.get("temperature_coefficients", [])
                ),
            )
            for s in doc["sellmeier"]
        )
        return CrystalSpec(
            name=doc["name"],
            sellmeier_sets=sets,
            transparency_range=tuple(doc["transparency_range"]),
            length=float(doc["length"]),
            cross_section=tuple(doc["cross_section"]),
            pm_type=doc["pm_type"],
            poling_period=doc.get("poling_period"),
            temperature=float(doc.get("temperature", 25.0)),
            source=doc.get("source", ""),
            defaults=dict(doc.get("defaults", {})),
        )
    except DomainError as e:
        raise CatalogError(
            msg=f"invalid crystal '{doc.get('name')}': {e.msg}"
        ) from e


def crystal_to_document(crystal: CrystalSpec) -> Dict[str, Any]:
    doc = {
        "name": crystal.name,
        "pm_type": crystal.pm_type,
        "length": crystal.length,
        "cross_section": list(crystal.cross_section),
        "transparency_range": list(crystal.transparency_range),
        "temperature": crystal.temperature,
        "source": crystal.source,
        "sellmeier": [],
        "defaults": dict(crystal.defaults),
    }
    if crystal.poling_period is not None:
        doc["poling_period"] = crystal.poling_period
    for s in crystal.sellmeier_sets:
        entry = {
            "axis": s.axis,
            "form": s.form,
            "coefficients": list(s.coefficients),
            "valid_range": list(s.valid_range),
            "source": s.source,
        }
        if s.temperature_coefficients:
            entry["temperature_coefficients"] = list(
                s.temperature_coefficients
            )
        doc["sellmeier"].append(entry)
    return doc


def list_crystals() -> List[str]:
    return sorted(p.stem for p in catalog_dir.glob("*.json"))


def _catalog_path(name: str) -> Path:
    for stem in list_crystals():
        if stem == name or stem.lower() == name.lower():
            return catalog_dir / f"{stem}.json"
    raise CatalogError(
        msg=f"unknown crystal '{name}', available: {list_crystals()}"
    )


def load_document(name: str) -> Dict[str, Any]:
    path = _catalog_path(name)
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise CatalogError(msg=f"malformed catalog file {path}") from e


def load_crystal(name: str, **overrides) -> CrystalSpec:
    """
    Load a catalog crystal by name.
    :param overrides: top level document keys to replace,
    ex: length=0.02, temperature=40.0
    :raise CatalogError on unknown name or malformed file
    """
    doc = load_document(name)
    doc.update(overrides)
    crystal = crystal_from_document(doc)
    logging.debug(
        "loaded crystal {} ({}, L={} m)".format(
            crystal.name, crystal.pm_type, crystal.length
        )
    )
    return crystal
