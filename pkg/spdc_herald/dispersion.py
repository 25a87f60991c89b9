"""
Sellmeier refractive indices, wavevectors and gaussian beam conversions.

All lengths are SI metres. Sellmeier coefficients are stored in the units
of the published fits (wavelength in micrometres).
"""
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from spdc_herald.exceptions import DomainError
from spdc_herald.globals import default_temperature, index_band

PM_TYPES = ("type0_qpm", "type1_angle", "type2_qpm")
FORMS = ("sellmeier", "sellmeier_pole", "temperature")

# temperature parametrisation of the LiNbO3 fits, T in celsius
_T_REFERENCE = 24.5
_T_OFFSET = 570.82

Axis = Union[str, Tuple[str, str]]


@dataclass(frozen=True)
class SellmeierSet:
    """
    One principal-axis dispersion curve.

    forms (lambda in um):
      sellmeier:      n^2 = A + sum B_j l^2 / (l^2 - C_j)
                      coefficients [A, B1, C1, B2, C2, ...]
      sellmeier_pole: n^2 = A - D l^2 + sum B_j / (l^2 - C_j)
                      coefficients [A, D, B1, C1, B2, C2, ...]
      temperature:    n^2 = a1 + b1 f + (a2 + b2 f) / (l^2 - (a3 + b3 f)^2)
                            + (a4 + b4 f) / (l^2 - a5^2) - a6 l^2
                      coefficients [a1..a6], temperature_coefficients
                      [b1..b4], f = (T - 24.5)(T + 570.82)
    """

    axis: str
    form: str
    coefficients: Tuple[float, ...]
    valid_range: Tuple[float, float]
    source: str = ""
    temperature_coefficients: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.form not in FORMS:
            raise DomainError(
                msg=f"unknown sellmeier form '{self.form}', use one of {FORMS}"
            )
        n = len(self.coefficients)
        if self.form == "sellmeier" and (n < 1 or n % 2 != 1):
            raise DomainError(
                msg="sellmeier form needs [A, B1, C1, ...] (odd length)"
            )
        if self.form == "sellmeier_pole" and (n < 2 or n % 2 != 0):
            raise DomainError(
                msg="sellmeier_pole form needs [A, D, B1, C1, ...]"
            )
        if self.form == "temperature" and (
            n != 6 or len(self.temperature_coefficients) != 4
        ):
            raise DomainError(
                msg="temperature form needs 6 coefficients and 4"
                " temperature coefficients"
            )
        low, high = self.valid_range
        if not 0 < low < high:
            raise DomainError(msg=f"empty valid range {self.valid_range}")

    def index_squared(self, wavelength_um, temperature: float):
        l2 = np.asarray(wavelength_um, dtype=float) ** 2
        k = self.coefficients
        if self.form == "sellmeier":
            n2 = np.full_like(l2, k[0])
            for b, c in zip(k[1::2], k[2::2]):
                n2 = n2 + b * l2 / (l2 - c)
            return n2
        if self.form == "sellmeier_pole":
            n2 = k[0] - k[1] * l2
            for b, c in zip(k[2::2], k[3::2]):
                n2 = n2 + b / (l2 - c)
            return n2
        a1, a2, a3, a4, a5, a6 = k
        b1, b2, b3, b4 = self.temperature_coefficients
        f = (temperature - _T_REFERENCE) * (temperature + _T_OFFSET)
        return (
            a1
            + b1 * f
            + (a2 + b2 * f) / (l2 - (a3 + b3 * f) ** 2)
            + (a4 + b4 * f) / (l2 - a5**2)
            - a6 * l2
        )


@dataclass(frozen=True)
class CrystalSpec:
    name: str
    sellmeier_sets: Tuple[SellmeierSet, ...]
    transparency_range: Tuple[float, float]
    length: float
    cross_section: Tuple[float, float]
    pm_type: str
    poling_period: Optional[float] = None
    temperature: float = default_temperature
    source: str = ""
    defaults: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.length <= 0:
            raise DomainError(
                msg=f"{self.name}: crystal length must be > 0, got"
                f" {self.length}"
            )
        if self.poling_period is not None and self.poling_period <= 0:
            raise DomainError(
                msg=f"{self.name}: poling period must be > 0, got"
                f" {self.poling_period}"
            )
        low, high = self.transparency_range
        if not 0 < low < high:
            raise DomainError(
                msg=f"{self.name}: empty transparency range"
                f" {self.transparency_range}"
            )
        if self.pm_type not in PM_TYPES:
            raise DomainError(
                msg=f"{self.name}: unknown pm_type '{self.pm_type}', use one"
                f" of {PM_TYPES}"
            )
        if not self.sellmeier_sets:
            raise DomainError(msg=f"{self.name}: no sellmeier data")

    @property
    def axes(self) -> Tuple[str, ...]:
        return tuple(s.axis for s in self.sellmeier_sets)

    @property
    def is_qpm(self) -> bool:
        return self.pm_type.endswith("_qpm")

    def sellmeier(self, axis: str) -> SellmeierSet:
        for s in self.sellmeier_sets:
            if s.axis == axis:
                return s
        raise DomainError(
            msg=f"{self.name} has no axis '{axis}', available: {self.axes}"
        )


def _scalar_or_array(value):
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value


def _check_range(crystal: CrystalSpec, sellmeier: SellmeierSet, wavelength):
    low = max(crystal.transparency_range[0], sellmeier.valid_range[0])
    high = min(crystal.transparency_range[1], sellmeier.valid_range[1])
    wl = np.asarray(wavelength, dtype=float)
    if wl.size and (np.min(wl) < low or np.max(wl) > high):
        raise DomainError(
            msg="wavelength {} outside the range of {} axis '{}':"
            " [{:.4g}, {:.4g}] m".format(
                _describe(wl), crystal.name, sellmeier.axis, low, high
            )
        )


def _describe(wl: np.ndarray) -> str:
    if wl.ndim == 0:
        return f"{float(wl):.6g} m"
    return f"[{np.min(wl):.6g}, {np.max(wl):.6g}] m"


def refractive_index(
    crystal: CrystalSpec,
    axis: str,
    wavelength,
    temperature: Optional[float] = None,
):
    """
    Principal-axis refractive index.
    :param wavelength: vacuum wavelength(s) in m, scalar or array
    :raise DomainError outside the transparency range or when the fit
    leaves the physical index band
    """
    sellmeier = crystal.sellmeier(axis)
    _check_range(crystal, sellmeier, wavelength)
    t = crystal.temperature if temperature is None else temperature
    n2 = sellmeier.index_squared(np.asarray(wavelength) * 1e6, t)
    if np.any(n2 <= 0):
        raise DomainError(
            msg=f"{crystal.name} axis '{axis}': sellmeier gives n^2 <= 0"
        )
    n = np.sqrt(n2)
    low, high = index_band
    if np.any(n < low) or np.any(n > high):
        raise DomainError(
            msg="{} axis '{}': index [{:.4g}, {:.4g}] at {} leaves"
            " [{}, {}]".format(
                crystal.name,
                axis,
                np.min(n),
                np.max(n),
                _describe(np.asarray(wavelength, dtype=float)),
                low,
                high,
            )
        )
    return _scalar_or_array(n)


def angle_tuned_index(
    crystal: CrystalSpec,
    axes: Tuple[str, str],
    wavelength,
    theta: float,
    temperature: Optional[float] = None,
):
    """
    Index of the wave polarized in the plane of two principal axes.
    theta = 0 gives axes[0], theta = pi/2 gives axes[1].
    """
    n0 = refractive_index(crystal, axes[0], wavelength, temperature)
    n1 = refractive_index(crystal, axes[1], wavelength, temperature)
    inv = np.cos(theta) ** 2 / n0**2 + np.sin(theta) ** 2 / n1**2
    return _scalar_or_array(1.0 / np.sqrt(inv))


def index(
    crystal: CrystalSpec,
    axis: Axis,
    wavelength,
    theta: Optional[float] = None,
    temperature: Optional[float] = None,
):
    """Dispatch on a principal axis name or an (axis_0, axis_90) pair."""
    if isinstance(axis, str):
        return refractive_index(crystal, axis, wavelength, temperature)
    if theta is None:
        raise DomainError(
            msg=f"angle tuned axis {tuple(axis)} needs a propagation angle"
        )
    return angle_tuned_index(
        crystal, tuple(axis), wavelength, theta, temperature
    )


def wavevector_magnitude(
    crystal: CrystalSpec,
    axis: Axis,
    wavelength,
    theta: Optional[float] = None,
    temperature: Optional[float] = None,
):
    """k = 2 pi n / lambda in rad/m."""
    n = index(crystal, axis, wavelength, theta, temperature)
    return _scalar_or_array(2 * np.pi * np.asarray(n) / np.asarray(wavelength))


def check_positive(**values):
    for name, value in values.items():
        if not value > 0:
            raise DomainError(msg=f"{name} must be > 0, got {value}")


def focusing_parameter(wavelength: float, length: float, waist: float):
    """xi = L / (2 z_R) = lambda L / (2 pi w0^2)."""
    check_positive(wavelength=wavelength, length=length, waist=waist)
    return wavelength * length / (2 * np.pi * waist**2)


def waist_from_angle(wavelength: float, angle: float):
    """Waist of a gaussian beam with full 1/e^2 far field divergence angle."""
    check_positive(wavelength=wavelength, angle=angle)
    return 2 * wavelength / (np.pi * angle)


def angle_from_waist(wavelength: float, waist: float):
    """Full 1/e^2 far field divergence, 2 lambda / (pi w0)."""
    check_positive(wavelength=wavelength, waist=waist)
    return 2 * wavelength / (np.pi * waist)


def waist_for_focusing(wavelength: float, length: float, xi: float):
    check_positive(wavelength=wavelength, length=length, xi=xi)
    return np.sqrt(wavelength * length / (2 * np.pi * xi))


def beam_diameter_at_faces(wavelength: float, length: float, waist: float):
    """1/e^2 diameter at z = +-L/2 for a waist at the crystal center."""
    xi = focusing_parameter(wavelength, length, waist)
    return 2 * waist * np.sqrt(1 + xi**2)


@dataclass(frozen=True)
class BeamGeometry:
    wavelength: float
    waist: float
    angular_spread: float

    def __post_init__(self):
        check_positive(
            wavelength=self.wavelength,
            waist=self.waist,
            angular_spread=self.angular_spread,
        )
        expected = angle_from_waist(self.wavelength, self.waist)
        if not np.isclose(self.angular_spread, expected, rtol=1e-9):
            raise DomainError(
                msg=f"inconsistent beam: waist {self.waist} m implies"
                f" {expected} rad, got {self.angular_spread} rad"
            )

    @classmethod
    def from_waist(cls, wavelength: float, waist: float) -> "BeamGeometry":
        return cls(wavelength, waist, angle_from_waist(wavelength, waist))

    @classmethod
    def from_angle(cls, wavelength: float, angle: float) -> "BeamGeometry":
        return cls(wavelength, waist_from_angle(wavelength, angle), angle)

    def focusing_parameter(self, length: float) -> float:
        return focusing_parameter(self.wavelength, length, self.waist)
