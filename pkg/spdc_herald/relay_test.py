import numpy as np
import pytest

from spdc_herald import DomainError
from spdc_herald.relay import (
    Relay,
    beam_radius,
    fiber_overlap,
    free_space,
    propagate,
    q_at_waist,
    relay_output_waist,
    thin_lens,
    waist_of,
)


def test_free_space_rayleigh_range():
    wl, w0 = 810e-9, 100e-6
    q0 = q_at_waist(wl, w0)
    z_r = np.pi * w0**2 / wl
    q = propagate(q0, free_space(z_r))
    assert beam_radius(q, wl) == pytest.approx(np.sqrt(2) * w0)
    waist, distance = waist_of(q, wl)
    assert waist == pytest.approx(w0)
    assert distance == pytest.approx(-z_r)


def test_telescopic_relay_demagnifies():
    relay = Relay(150e-3, 7.5e-3)
    assert relay.magnification == pytest.approx(0.05)
    waist, distance = relay_output_waist(1550e-9, 140e-6, relay)
    assert waist == pytest.approx(7.0e-6, rel=1e-6)
    assert distance == pytest.approx(7.5e-3, rel=1e-6)


def test_fiber_overlap():
    assert fiber_overlap(7.0e-6, 5.1e-6) == pytest.approx(0.414, abs=1e-3)
    assert fiber_overlap(5e-6, 10e-6) == pytest.approx(1.0)
    waist, _ = relay_output_waist(810e-9, 100e-6, Relay(100e-3, 5e-3))
    assert fiber_overlap(waist, 10e-6) == pytest.approx(1.0)


def test_relay_spacing_moves_the_waist():
    telescopic = relay_output_waist(810e-9, 140e-6, Relay(150e-3, 7.5e-3))
    longer = relay_output_waist(
        810e-9, 140e-6, Relay(150e-3, 7.5e-3, spacing=200e-3)
    )
    assert longer[1] != pytest.approx(telescopic[1])


def test_bad_optics():
    try:
        thin_lens(0.0)
        pytest.fail("zero focal length accepted. failing test")
    except DomainError as e:
        assert "nonzero" in e.msg
    try:
        Relay(150e-3, -7.5e-3)
        pytest.fail("negative focusing lens accepted. failing test")
    except DomainError as e:
        assert "focusing_focal" in e.msg
    try:
        waist_of(1.0 - 1j, 810e-9)
        pytest.fail("q below the real axis accepted. failing test")
    except DomainError as e:
        assert "gaussian beam" in e.msg
