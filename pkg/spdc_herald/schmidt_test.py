import numpy as np
import pytest

from spdc_herald import DomainError
from spdc_herald.catalog import load_crystal
from spdc_herald.joint_amplitude import (
    ANGLE_IDLER,
    ANGLE_SIGNAL,
    CollectionMode,
    GridAxis,
    GridSpec,
    IntensityMap,
    PumpSpec,
    apply_collection,
    full_width,
    joint_angular,
)
from spdc_herald.phasematching import interaction_from_crystal, prepare
from spdc_herald.schmidt import (
    brute_force_purity,
    knee_angle,
    purity_vs_collection,
    purity_vs_pump_waist,
    schmidt_decompose,
)

small = GridSpec(size=48, pump_samples=5)


def _setup():
    spec, _ = prepare(interaction_from_crystal(load_crystal("KNbO3")))
    return spec, PumpSpec(spec.lambda_p, "pulsed", 205.8e-6, 8e-12)


def test_two_mode_state():
    result = schmidt_decompose(np.diag([3.0, 4.0]))
    assert result.purity == pytest.approx(0.5392)
    assert list(result.coefficients) == pytest.approx([0.64, 0.36])
    assert result.schmidt_number == pytest.approx(1 / 0.5392)
    assert not result.from_intensity


def test_double_gaussian_purity():
    x = np.linspace(-12, 12, 301)
    xs, ys = np.meshgrid(x, x, indexing="ij")
    a, b = 1.0, 16.0
    psi = np.exp(-((xs + ys) ** 2) / (2 * a) - (xs - ys) ** 2 / (2 * b))
    expected = 2 * np.sqrt(a * b) / (a + b)
    assert expected == pytest.approx(0.470588, abs=1e-6)
    assert schmidt_decompose(psi).purity == pytest.approx(expected, abs=1e-4)


def test_product_and_maximally_entangled():
    x = np.linspace(-3, 3, 64)
    product = np.outer(np.exp(-(x**2)), np.exp(-((x - 1) ** 2)) * 1j)
    assert schmidt_decompose(product).purity == pytest.approx(1.0)
    assert schmidt_decompose(np.eye(16)).purity == pytest.approx(1 / 16)


def test_svd_matches_brute_force():
    rng = np.random.default_rng(11)
    for shape in ((8, 8), (12, 5), (5, 12)):
        m = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        assert schmidt_decompose(m).purity == pytest.approx(
            brute_force_purity(m), rel=1e-10
        )


def test_coefficients_sum_to_one():
    m = np.random.default_rng(5).random((10, 7))
    result = schmidt_decompose(m)
    assert np.sum(result.coefficients) == pytest.approx(1.0)
    assert np.all(np.diff(result.coefficients) <= 0)
    doc = result.to_dict(keep=3)
    assert len(doc["coefficients"]) == 3
    assert doc["purity"] == result.purity


def test_intensity_map_decomposed_as_root():
    ax = GridAxis(ANGLE_SIGNAL, np.linspace(-1, 1, 2), "rad")
    ay = GridAxis(ANGLE_IDLER, np.linspace(-1, 1, 2), "rad")
    intensity = IntensityMap.normalized(np.diag([9.0, 16.0]), ax, ay)
    result = schmidt_decompose(intensity)
    assert result.from_intensity
    assert result.purity == pytest.approx(0.5392)


def test_bad_grids():
    for grid, text in (
        (np.zeros((4, 4)), "zero grid"),
        (np.full((3, 3), np.nan), "non finite"),
        (np.ones((2, 2, 2)), "2-D"),
    ):
        try:
            schmidt_decompose(grid)
            pytest.fail(f"{text} grid decomposed. failing test")
        except DomainError as e:
            assert text in e.msg


def test_knee_angle():
    scan = [(1.0, 1.0), (2.0, 0.98), (3.0, 0.9)]
    assert knee_angle(scan, 0.95) == pytest.approx(2.375)
    assert knee_angle(scan) == pytest.approx(1.1)
    assert knee_angle([(1.0, 1.0), (2.0, 0.99)], 0.95) is None
    assert knee_angle([(1.0, 1.0), (2.0, 0.9995)]) is None
    assert knee_angle([(1.0, 0.5), (2.0, 1.0)]) == 1.0
    try:
        knee_angle([])
        pytest.fail("empty scan accepted. failing test")
    except DomainError as e:
        assert "empty" in e.msg


def test_purity_vs_pump_waist():
    spec, pump = _setup()
    scan = purity_vs_pump_waist(spec, pump, [50e-6, 400e-6], small)
    assert [w for w, _ in scan] == [50e-6, 400e-6]
    assert all(0 < p <= 1 for _, p in scan)
    # a tight pump spreads the pump angles and decorrelates the pair
    assert scan[0][1] > scan[1][1]


def test_purity_vs_pump_waist_checks():
    spec, pump = _setup()
    for waists, text in (
        ([], "empty"),
        ([100e-6, 50e-6], "increase"),
        ([-1e-6, 50e-6], "> 0"),
    ):
        try:
            purity_vs_pump_waist(spec, pump, waists, small)
            pytest.fail(f"waists {waists} accepted. failing test")
        except DomainError as e:
            assert text in e.msg


def test_purity_vs_collection():
    spec, pump = _setup()
    scan = purity_vs_collection(spec, pump, [0.5e-3, 20e-3], grid=small)
    assert scan[0][1] > 0.95
    assert scan[0][1] >= scan[1][1]
    # filtering the partner as well narrows the transverse acceptance
    both = purity_vs_collection(spec, pump, [20e-3], 2.0, small)
    assert both[0][1] >= scan[1][1]
    traced = purity_vs_collection(
        spec, pump, [5e-3], 2.0, small, path="intensity"
    )
    assert 0 < traced[0][1] <= 1


def test_purity_vs_collection_checks():
    spec, pump = _setup()
    for kwargs, text in (
        (dict(angles=[]), "empty"),
        (dict(angles=[0.0]), "> 0"),
        (dict(angles=[1e-3], path="phase"), "phase"),
        (dict(angles=[1e-3], idler_ratio=0.0), "idler_ratio"),
    ):
        try:
            purity_vs_collection(spec, pump, grid=small, **kwargs)
            pytest.fail(f"{kwargs} accepted. failing test")
        except DomainError as e:
            assert text in e.msg


def test_marginal_collection_keeps_dominant_mode():
    spec, pump = _setup()
    amp = joint_angular(spec, pump, small)
    intensity = amp.intensity
    widths = [
        full_width(axis.samples, marginal, np.exp(-2))
        for axis, marginal in (
            (amp.axis_x, intensity.sum(axis=1)),
            (amp.axis_y, intensity.sum(axis=0)),
        )
    ]
    collected = apply_collection(
        amp,
        CollectionMode(spec.lambda_s, widths[0]),
        CollectionMode(spec.lambda_i, widths[1]),
    )
    before = schmidt_decompose(amp).coefficients[0]
    after = schmidt_decompose(collected).coefficients[0]
    assert after >= before
