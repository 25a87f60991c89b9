import numpy as np
import pytest

from spdc_herald import DomainError
from spdc_herald.catalog import list_crystals, load_crystal
from spdc_herald.dispersion import (
    BeamGeometry,
    CrystalSpec,
    SellmeierSet,
    angle_from_waist,
    angle_tuned_index,
    beam_diameter_at_faces,
    focusing_parameter,
    index,
    refractive_index,
    waist_for_focusing,
    waist_from_angle,
    wavevector_magnitude,
)


def test_sellmeier_forms():
    plain = SellmeierSet("x", "sellmeier", (1.0, 1.0, 0.01), (0.1, 10.0))
    assert plain.index_squared(1.0, 25.0) == pytest.approx(1 + 1 / 0.99)
    pole = SellmeierSet(
        "x", "sellmeier_pole", (4.0, 0.02, 0.1, 0.05), (0.1, 10.0)
    )
    assert pole.index_squared(2.0, 25.0) == pytest.approx(
        4.0 - 0.02 * 4 + 0.1 / (4 - 0.05)
    )


def test_bad_sellmeier_set():
    try:
        SellmeierSet("x", "sellmeier_pole", (1.0, 2.0, 3.0), (0.1, 10.0))
        pytest.fail("odd pole coefficient list accepted. failing test")
    except DomainError as e:
        assert "sellmeier_pole" in e.msg
    try:
        SellmeierSet("x", "cauchy", (1.0,), (0.1, 10.0))
        pytest.fail("unknown form accepted. failing test")
    except DomainError as e:
        assert "cauchy" in e.msg


def test_lithium_niobate_extraordinary_index():
    ppln = load_crystal("PPLN")
    assert refractive_index(ppln, "e", 1550e-9) == pytest.approx(
        2.1379, abs=5e-4
    )
    # normal dispersion
    assert refractive_index(ppln, "e", 810e-9) > refractive_index(
        ppln, "e", 1550e-9
    )


def test_potassium_niobate_principal_indices():
    knbo3 = load_crystal("KNbO3")
    n = {axis: refractive_index(knbo3, axis, 1064e-9) for axis in "abc"}
    assert n["a"] == pytest.approx(2.2200, abs=1e-3)
    assert n["b"] == pytest.approx(2.2576, abs=1e-3)
    assert n["c"] == pytest.approx(2.1195, abs=1e-3)


def test_catalog_indices_stay_physical():
    for name in list_crystals():
        crystal = load_crystal(name)
        for s in crystal.sellmeier_sets:
            low = max(crystal.transparency_range[0], s.valid_range[0])
            high = min(crystal.transparency_range[1], s.valid_range[1])
            n = refractive_index(crystal, s.axis, np.linspace(low, high, 50))
            assert np.all((n >= 1.0) & (n <= 3.5)), (name, s.axis)


def test_index_outside_physical_band():
    dense = CrystalSpec(
        name="dense",
        sellmeier_sets=(
            SellmeierSet("x", "sellmeier", (16.0,), (0.4e-6, 2e-6)),
        ),
        transparency_range=(0.4e-6, 2e-6),
        length=0.01,
        cross_section=(1e-3, 1e-3),
        pm_type="type0_qpm",
    )
    try:
        refractive_index(dense, "x", 1e-6)
        pytest.fail("index 4 accepted. failing test")
    except DomainError as e:
        assert "dense" in e.msg
        assert "leaves" in e.msg


def test_index_vectorized():
    ppln = load_crystal("PPLN")
    wl = np.linspace(800e-9, 1600e-9, 5)
    n = refractive_index(ppln, "e", wl)
    assert n.shape == (5,)
    assert np.all(np.diff(n) < 0)
    assert n[0] == pytest.approx(refractive_index(ppln, "e", 800e-9))


def test_index_temperature_dependence():
    mgo = load_crystal("PPLN_MgO")
    cold = refractive_index(mgo, "e", 1064e-9, temperature=25.0)
    hot = refractive_index(mgo, "e", 1064e-9, temperature=100.0)
    assert hot > cold


def test_out_of_transparency_range():
    ppln = load_crystal("PPLN")
    try:
        refractive_index(ppln, "e", 300e-9)
        pytest.fail("index below transparency accepted. failing test")
    except DomainError as e:
        assert "PPLN" in e.msg
        assert "outside" in e.msg


def test_unknown_axis():
    try:
        refractive_index(load_crystal("PPLN"), "o", 1e-6)
        pytest.fail("PPLN has no ordinary axis in the catalog. failing test")
    except DomainError as e:
        assert "'o'" in e.msg


def test_angle_tuned_index_limits():
    knbo3 = load_crystal("KNbO3")
    wl = 532e-9
    n_c = refractive_index(knbo3, "c", wl)
    n_a = refractive_index(knbo3, "a", wl)
    assert angle_tuned_index(knbo3, ("c", "a"), wl, 0.0) == pytest.approx(n_c)
    assert angle_tuned_index(
        knbo3, ("c", "a"), wl, np.pi / 2
    ) == pytest.approx(n_a)
    middle = angle_tuned_index(knbo3, ("c", "a"), wl, np.pi / 4)
    assert min(n_a, n_c) < middle < max(n_a, n_c)


def test_index_dispatch():
    knbo3 = load_crystal("KNbO3")
    assert index(knbo3, "b", 810e-9) == refractive_index(knbo3, "b", 810e-9)
    try:
        index(knbo3, ("c", "a"), 532e-9)
        pytest.fail("angle tuned axis without angle accepted. failing test")
    except DomainError as e:
        assert "angle" in e.msg


def test_wavevector_magnitude():
    ppln = load_crystal("PPLN")
    n = refractive_index(ppln, "e", 1550e-9)
    assert wavevector_magnitude(ppln, "e", 1550e-9) == pytest.approx(
        2 * np.pi * n / 1550e-9
    )


def test_focusing_parameter_triple():
    assert focusing_parameter(532e-9, 0.01, 200e-6) == pytest.approx(
        0.021, abs=0.002
    )
    assert focusing_parameter(810e-9, 0.01, 145e-6) == pytest.approx(
        0.061, abs=0.005
    )
    assert focusing_parameter(1550e-9, 0.01, 140e-6) == pytest.approx(
        0.126, abs=0.01
    )


def test_waist_angle_conversions():
    assert 140e-6 <= waist_from_angle(810e-9, 0.0035) <= 150e-6
    assert 136e-6 <= waist_from_angle(1550e-9, 0.007) <= 146e-6
    assert angle_from_waist(532e-9, 200e-6) == pytest.approx(
        0.0017, abs=1e-4
    )
    w = 123e-6
    assert waist_from_angle(810e-9, angle_from_waist(810e-9, w)) == (
        pytest.approx(w, rel=1e-12)
    )


def test_waist_for_focusing_inverts_xi():
    w = waist_for_focusing(532e-9, 0.01, 0.02)
    assert w == pytest.approx(205.8e-6, rel=1e-3)
    assert focusing_parameter(532e-9, 0.01, w) == pytest.approx(0.02)


def test_beam_diameter_at_faces():
    w = 50e-6
    xi = focusing_parameter(532e-9, 0.01, w)
    assert beam_diameter_at_faces(532e-9, 0.01, w) == pytest.approx(
        2 * w * np.sqrt(1 + xi**2)
    )


def test_nonpositive_inputs():
    for call in (
        lambda: focusing_parameter(532e-9, 0.01, 0.0),
        lambda: waist_from_angle(-1.0, 0.1),
        lambda: waist_for_focusing(532e-9, 0.01, 0.0),
    ):
        try:
            call()
            pytest.fail("nonpositive input accepted. failing test")
        except DomainError as e:
            assert "must be > 0" in e.msg


def test_beam_geometry():
    beam = BeamGeometry.from_waist(810e-9, 147e-6)
    assert BeamGeometry.from_angle(810e-9, beam.angular_spread).waist == (
        pytest.approx(147e-6)
    )
    assert beam.focusing_parameter(0.01) == pytest.approx(
        focusing_parameter(810e-9, 0.01, 147e-6)
    )
    try:
        BeamGeometry(810e-9, 147e-6, 0.01)
        pytest.fail("inconsistent waist and angle accepted. failing test")
    except DomainError as e:
        assert "inconsistent" in e.msg
