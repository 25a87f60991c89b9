"""
Full-grid design runs on the catalog crystals. Slow: run with
pytest -m acceptance.
"""
import numpy as np
import pytest

from spdc_herald.catalog import list_crystals, load_crystal
from spdc_herald.designer import design
from spdc_herald.dispersion import focusing_parameter
from spdc_herald.export import json_text
from spdc_herald.heralding import overlap_efficiencies
from spdc_herald.joint_amplitude import (
    CollectionMode,
    GridSpec,
    PumpSpec,
    apply_collection,
    collected_joint_spectral,
    joint_angular,
    joint_spectral,
    spectral_correlation,
)
from spdc_herald.phasematching import interaction_from_crystal, prepare
from spdc_herald.schmidt import (
    knee_angle,
    purity_vs_collection,
    purity_vs_pump_waist,
    schmidt_decompose,
)

pytestmark = pytest.mark.acceptance

_cache = {}


def _spec(name):
    spec, _ = prepare(interaction_from_crystal(load_crystal(name)))
    return spec


def _design(name, regime="pulsed"):
    if (name, regime) not in _cache:
        duration = load_crystal(name).defaults["pump"]["duration"]
        _cache[(name, regime)] = design(
            _spec(name),
            regime=regime,
            duration=duration if regime == "pulsed" else None,
        )
    return _cache[(name, regime)]


def _pump(spec, waist=205.8e-6):
    return PumpSpec(spec.lambda_p, "pulsed", waist, 8e-12)


def test_knbo3_design():
    report = _design("KNbO3")
    assert report.pump.waist == pytest.approx(205.8e-6, rel=1e-3)
    assert report.pump.angular_spread == pytest.approx(1.646e-3, rel=1e-3)
    assert np.degrees(report.signal.angular_spread) == pytest.approx(
        0.2, abs=0.05
    )
    ratio = report.idler.angular_spread / report.signal.angular_spread
    assert ratio == pytest.approx(2.0, abs=0.3)
    assert report.signal.waist == pytest.approx(145e-6, rel=0.1)
    assert report.idler.waist == pytest.approx(140e-6, rel=0.1)
    assert report.efficiencies.mu_si >= 0.8


def test_cw_design_matches_pulsed():
    pulsed = _design("KNbO3")
    cw = _design("KNbO3", "cw")
    assert cw.signal.waist == pytest.approx(pulsed.signal.waist, rel=0.05)
    assert cw.idler.waist == pytest.approx(pulsed.idler.waist, rel=0.05)


def test_degenerate_design_is_symmetric():
    report = _design("PPKTP")
    assert report.idler.angular_spread == pytest.approx(
        report.signal.angular_spread, rel=0.1
    )
    assert report.idler.waist == pytest.approx(report.signal.waist, rel=0.1)
    assert report.efficiencies.mu_si >= 0.8


def test_design_is_deterministic():
    spec = _spec("KNbO3")
    a = design(spec, duration=8e-12)
    b = design(spec, duration=8e-12)
    assert json_text(a.to_dict()) == json_text(b.to_dict())


def test_collection_keeps_the_spectrum():
    report = _design("KNbO3")
    spec = _spec("KNbO3")
    pump = _pump(spec, report.pump.waist)
    mode_s = CollectionMode(spec.lambda_s, report.signal.angular_spread)
    mode_i = CollectionMode(spec.lambda_i, report.idler.angular_spread)
    grid = GridSpec(size=64)
    before = joint_spectral(spec, pump, grid)
    after = collected_joint_spectral(spec, pump, mode_s, mode_i, grid)
    assert spectral_correlation(before, after) > 0.99
    assert report.spectral_spatial_purity >= 0.95


def test_collected_angular_amplitude():
    report = _design("KNbO3")
    amp = report.curves["joint_angular"]
    spec = _spec("KNbO3")
    mode_s = CollectionMode(spec.lambda_s, report.signal.angular_spread)
    mode_i = CollectionMode(spec.lambda_i, report.idler.angular_spread)
    collected = apply_collection(amp, mode_s, mode_i)
    assert np.sum(np.abs(collected.values) ** 2) == pytest.approx(1.0)
    efficiencies, _ = overlap_efficiencies(amp, mode_s, mode_i)
    assert efficiencies.mu_si == pytest.approx(report.efficiencies.mu_si)


def test_purity_falls_with_pump_waist():
    spec = _spec("KNbO3")
    waists = [25e-6, 50e-6, 100e-6, 200e-6, 400e-6]
    purities = [p for _, p in purity_vs_pump_waist(spec, _pump(spec), waists)]
    assert all(b <= a for a, b in zip(purities, purities[1:]))


def test_purity_vs_collection_angle():
    spec = _spec("KNbO3")
    angles = np.radians(
        [0.05, 0.1, 0.2, 0.3, 0.4, 0.6, 0.8, 1.0, 1.5, 2.5, 3.5]
    )
    scan = purity_vs_collection(spec, _pump(spec), angles)
    purity = dict(scan)
    assert purity[angles[2]] - purity[angles[7]] > 0.1
    assert scan[-1][1] == pytest.approx(0.5, abs=0.1)
    assert abs(scan[-1][1] - scan[-2][1]) < 0.1
    assert scan[0][1] >= 0.95
    assert np.degrees(knee_angle(scan)) == pytest.approx(0.3, abs=0.1)


def test_purity_converges_with_grid():
    spec = _spec("KNbO3")
    pump = _pump(spec)
    coarse, fine = (
        schmidt_decompose(joint_angular(spec, pump, GridSpec(size=n))).purity
        for n in (256, 512)
    )
    assert abs(coarse - fine) < 1e-3


def test_reported_xi_is_consistent():
    report = _design("KNbO3")
    for arm in (report.pump, report.signal, report.idler):
        xi = focusing_parameter(arm.wavelength, report.length, arm.waist)
        assert xi == pytest.approx(arm.xi, rel=1e-12)


@pytest.mark.parametrize("name", list_crystals())
def test_pump_cone_inside_collection(name):
    report = _design(name)
    assert report.pump.angular_spread < report.signal.angular_spread
    assert report.pump.angular_spread < report.idler.angular_spread


def test_tighter_pump_never_raises_purity():
    spec = _spec("KNbO3")
    purities = [
        design(spec, duration=8e-12, xi_target=xi).spectral_spatial_purity
        for xi in (0.01, 0.02, 0.04)
    ]
    # grid convergence level
    assert all(b <= a + 1e-3 for a, b in zip(purities, purities[1:]))


def test_ppln_pulsed_source():
    report = _design("PPLN")
    assert report.crystal == "PPLN"
    assert report.settings["regime"] == "pulsed"
    assert report.efficiencies.mu_si >= 0.8


def test_balanced_rule_on_knbo3():
    report = design(_spec("KNbO3"), duration=8e-12, idler_rule="balanced")
    assert report.efficiencies.mu_s == pytest.approx(
        report.efficiencies.mu_i, abs=1e-4
    )
    assert report.idler.angular_spread > report.signal.angular_spread
