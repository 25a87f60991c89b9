"""
Gaussian beam ray-matrix propagation from the crystal center to a fiber
facet through a two-lens relay.

q = z + i z_R at distance z past a waist, z_R = pi w0^2 / lambda.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from spdc_herald.dispersion import check_positive
from spdc_herald.exceptions import DomainError


def free_space(distance: float) -> np.ndarray:
    return np.array([[1.0, distance], [0.0, 1.0]])


def thin_lens(focal_length: float) -> np.ndarray:
    if focal_length == 0:
        raise DomainError(msg="focal length must be nonzero")
    return np.array([[1.0, 0.0], [-1.0 / focal_length, 1.0]])


def q_at_waist(wavelength: float, waist: float) -> complex:
    check_positive(wavelength=wavelength, waist=waist)
    return 1j * np.pi * waist**2 / wavelength


def propagate(q: complex, matrix: np.ndarray) -> complex:
    (a, b), (c, d) = matrix
    return (a * q + b) / (c * q + d)


def beam_radius(q: complex, wavelength: float) -> float:
    """1/e^2 intensity radius at the plane described by q."""
    inv = 1 / q
    if not inv.imag < 0:
        raise DomainError(msg=f"q = {q} does not describe a gaussian beam")
    return float(np.sqrt(-wavelength / (np.pi * inv.imag)))


def waist_of(q: complex, wavelength: float) -> Tuple[float, float]:
    """(waist radius, distance from this plane to the waist)."""
    if not q.imag > 0:
        raise DomainError(msg=f"q = {q} does not describe a gaussian beam")
    return float(np.sqrt(wavelength * q.imag / np.pi)), float(-q.real)


@dataclass(frozen=True)
class Relay:
    """
    Crystal waist at object_distance before the collimating lens, the
    focusing lens spacing after it. Defaults give the telescopic relay:
    object_distance = f_c, spacing = f_c + f_f.
    """

    collimating_focal: float
    focusing_focal: float
    spacing: Optional[float] = None
    object_distance: Optional[float] = None

    def __post_init__(self):
        check_positive(
            collimating_focal=self.collimating_focal,
            focusing_focal=self.focusing_focal,
        )

    @property
    def magnification(self) -> float:
        return self.focusing_focal / self.collimating_focal

    def matrix(self) -> np.ndarray:
        """Crystal waist plane to just after the focusing lens."""
        d0 = (
            self.collimating_focal
            if self.object_distance is None
            else self.object_distance
        )
        d1 = (
            self.collimating_focal + self.focusing_focal
            if self.spacing is None
            else self.spacing
        )
        return (
            thin_lens(self.focusing_focal)
            @ free_space(d1)
            @ thin_lens(self.collimating_focal)
            @ free_space(d0)
        )


def relay_output_waist(
    wavelength: float, waist: float, relay: Relay
) -> Tuple[float, float]:
    """(waist at the fiber side, its distance past the focusing lens)."""
    q = propagate(q_at_waist(wavelength, waist), relay.matrix())
    return waist_of(q, wavelength)


def fiber_overlap(waist: float, mode_field_diameter: float) -> float:
    """Power overlap of two coaxial gaussian waists on one plane."""
    check_positive(waist=waist, mode_field_diameter=mode_field_diameter)
    w_f = mode_field_diameter / 2
    return float((2 * waist * w_f / (waist**2 + w_f**2)) ** 2)
