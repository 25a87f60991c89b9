from dataclasses import replace

import numpy as np
import pytest

from spdc_herald import DegenerateCouplingError, DomainError
from spdc_herald.catalog import load_crystal
from spdc_herald.heralding import (
    CountRecord,
    counts_to_efficiency,
    overlap_efficiencies,
)
from spdc_herald.joint_amplitude import (
    ANGLE_IDLER,
    ANGLE_SIGNAL,
    WAVELENGTH_SIGNAL,
    CollectionMode,
    GridAxis,
    GridSpec,
    JointAmplitude,
    PumpSpec,
    joint_angular,
)
from spdc_herald.phasematching import interaction_from_crystal, prepare

record = CountRecord(
    coincidences=7.0,
    singles_signal=39.0,
    singles_idler=3.2,
    detector_efficiency_signal=0.48,
    detector_efficiency_idler=0.24,
    transmission_signal=0.78,
    transmission_idler=0.87,
    coincidences_idler_trigger=0.9,
)


def test_counts_to_efficiency():
    report = counts_to_efficiency(record)
    assert report.mu_i == pytest.approx(0.85961, abs=1e-5)
    assert report.mu_s == pytest.approx(0.75120, abs=1e-5)
    assert report.mu_si == pytest.approx(0.80358, abs=1e-5)
    assert not report.flagged
    doc = report.to_dict()
    assert doc["flagged"] is False
    assert doc["warnings"] == []


def test_counts_scale_free():
    scaled = CountRecord(
        coincidences=7000.0,
        singles_signal=39000.0,
        singles_idler=3200.0,
        detector_efficiency_signal=0.48,
        detector_efficiency_idler=0.24,
        transmission_signal=0.78,
        transmission_idler=0.87,
        coincidences_idler_trigger=900.0,
    )
    a = counts_to_efficiency(record)
    b = counts_to_efficiency(scaled)
    assert (b.mu_s, b.mu_i) == pytest.approx((a.mu_s, a.mu_i))


def test_noise_subtracted():
    noisy = replace(record, singles_signal=49.0, noise_signal=10.0)
    assert counts_to_efficiency(noisy).mu_i == pytest.approx(
        counts_to_efficiency(record).mu_i
    )


def test_single_run_uses_coincidences_for_both_arms():
    rec = replace(
        record, singles_idler=30.0, coincidences_idler_trigger=None
    )
    report = counts_to_efficiency(rec)
    assert report.mu_s == pytest.approx(7.0 / (30.0 * 0.48 * 0.78))


def test_efficiency_above_one_is_flagged():
    rec = CountRecord(
        coincidences=10.0,
        singles_signal=20.0,
        singles_idler=20.0,
        detector_efficiency_signal=1.0,
        detector_efficiency_idler=0.5,
        transmission_signal=1.0,
        transmission_idler=0.5,
    )
    report = counts_to_efficiency(rec)
    assert report.mu_i == pytest.approx(2.0)
    assert report.flagged
    assert "mu_i" in report.warnings[0]


def test_count_record_checks():
    for changes, text in (
        (dict(detector_efficiency_idler=0.0), "(0, 1]"),
        (dict(transmission_signal=1.2), "(0, 1]"),
        (dict(coincidences=-1.0), ">= 0"),
        (dict(noise_signal=39.0), "noise subtracted"),
        (dict(coincidences=40.0), "exceed"),
        (dict(coincidences_idler_trigger=5.0), "exceed"),
    ):
        try:
            replace(record, **changes)
            pytest.fail(f"{changes} accepted. failing test")
        except DomainError as e:
            assert text in e.msg


def _gaussian_amplitude(a, b, c):
    theta = np.linspace(-5, 5, 401)
    x, y = np.meshgrid(theta, theta, indexing="ij")
    values = np.exp(-(a * x**2 + 2 * c * x * y + b * y**2) / 2)
    return JointAmplitude.normalized(
        values,
        GridAxis(ANGLE_SIGNAL, theta, "rad"),
        GridAxis(ANGLE_IDLER, theta, "rad"),
    )


def _mode_overlap(s, beta):
    return 2 * np.sqrt(s * beta) / (s + beta)


def test_overlap_of_gaussians():
    a, b, c = 1.0, 2.0, 0.5
    spread_s, spread_i = 1.2, 0.8
    s, i = 8 / spread_s**2, 8 / spread_i**2
    amp = _gaussian_amplitude(a, b, c)
    report, (coincidence, rate_s, rate_i) = overlap_efficiencies(
        amp, CollectionMode(1.0, spread_s), CollectionMode(1.0, spread_i)
    )
    assert report.mu_s == pytest.approx(
        _mode_overlap(s, a - c**2 / (i + b)), rel=1e-5
    )
    assert report.mu_i == pytest.approx(
        _mode_overlap(i, b - c**2 / (s + a)), rel=1e-5
    )
    assert report.mu_si == pytest.approx(np.sqrt(report.mu_s * report.mu_i))
    assert coincidence <= min(rate_s, rate_i) <= 1


def test_matched_product_state_is_lossless():
    amp = _gaussian_amplitude(2.0, 2.0, 0.0)
    mode = CollectionMode(1.0, 2.0)  # exp(-theta^2), the marginal mode
    report, _ = overlap_efficiencies(amp, mode, mode)
    assert report.mu_s == pytest.approx(1.0)
    assert report.mu_i == pytest.approx(1.0)


def test_orthogonal_mode_is_degenerate():
    amp = _gaussian_amplitude(100.0, 100.0, 0.0)
    far = CollectionMode(1.0, 0.1, center=4.5)
    try:
        overlap_efficiencies(amp, far, CollectionMode(1.0, 0.5))
        pytest.fail("orthogonal signal mode accepted. failing test")
    except DegenerateCouplingError as e:
        assert e.arm == "signal"
        assert e.exit_code == 2


def test_overlap_needs_angle_axes():
    theta = np.linspace(-1, 1, 5)
    amp = JointAmplitude.normalized(
        np.ones((5, 5)),
        GridAxis(WAVELENGTH_SIGNAL, np.linspace(1, 2, 5) * 1e-6, "m"),
        GridAxis(ANGLE_IDLER, theta, "rad"),
    )
    mode = CollectionMode(1.0, 1.0)
    try:
        overlap_efficiencies(amp, mode, mode)
        pytest.fail("spectral axis accepted. failing test")
    except DomainError as e:
        assert "angular amplitude" in e.msg


def test_exchange_symmetry():
    amp = _gaussian_amplitude(1.0, 2.0, 0.5)
    theta = amp.axis_x.samples
    swapped = JointAmplitude.normalized(
        amp.values.T,
        GridAxis(ANGLE_SIGNAL, theta, "rad"),
        GridAxis(ANGLE_IDLER, theta, "rad"),
    )
    mode_s, mode_i = CollectionMode(1.0, 1.2), CollectionMode(1.0, 0.8)
    report, _ = overlap_efficiencies(amp, mode_s, mode_i)
    exchanged, _ = overlap_efficiencies(swapped, mode_i, mode_s)
    assert exchanged.mu_si == pytest.approx(report.mu_si, rel=1e-12)
    assert exchanged.mu_s == pytest.approx(report.mu_i, rel=1e-12)
    assert exchanged.mu_i == pytest.approx(report.mu_s, rel=1e-12)


def test_coincidence_below_singles():
    rng = np.random.default_rng(11)
    theta = np.linspace(-1, 1, 16)
    axes = (
        GridAxis(ANGLE_SIGNAL, theta, "rad"),
        GridAxis(ANGLE_IDLER, theta, "rad"),
    )
    for _ in range(20):
        values = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        amp = JointAmplitude.normalized(values, *axes)
        mode_s = CollectionMode(1.0, rng.uniform(0.2, 2.0))
        mode_i = CollectionMode(1.0, rng.uniform(0.2, 2.0))
        _, (coincidence, rate_s, rate_i) = overlap_efficiencies(
            amp, mode_s, mode_i
        )
        assert 0 <= coincidence <= rate_s + 1e-12
        assert coincidence <= rate_i + 1e-12
        assert rate_s <= 1 + 1e-12
        assert rate_i <= 1 + 1e-12


def test_wider_pump_heralds_better():
    spec, _ = prepare(interaction_from_crystal(load_crystal("KNbO3")))
    grid = GridSpec(size=128, q_window=6e4)
    mode_s = CollectionMode(spec.lambda_s, 3.7e-3)
    mode_i = CollectionMode(spec.lambda_i, 7.4e-3)
    mu_si = []
    for waist in (50e-6, 100e-6, 200e-6):
        pump = PumpSpec(spec.lambda_p, "pulsed", waist, 8e-12)
        amp = joint_angular(spec, pump, grid)
        mu_si.append(overlap_efficiencies(amp, mode_s, mode_i)[0].mu_si)
    assert mu_si[0] < mu_si[1] < mu_si[2]
