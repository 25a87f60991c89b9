"""
Discretized biphoton amplitudes over (lambda_s, lambda_i), (theta_s,
theta_i) and (lambda, theta).

Conventions:
  - pump spectral envelope is returned in intensity, exp(-4 ln2 S^2/dnu^2),
    so it equals 0.5 at S = FWHM/2; amplitudes use its square root.
  - pump angular envelope is an amplitude, exp(-(q_s + q_i)^2 w_p^2 / 4).
  - collection profile is an amplitude, exp(-(theta - theta0)^2 /
    (dtheta/2)^2), sampled and normalized to unit discrete norm.
  - external angle and transverse wavevector: q = (2 pi / lambda) sin(theta).
  - both angle axes of a joint grid cover one common q window, so the idler
    angle spacing is the signal spacing times lambda_i / lambda_s.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import optimize

from spdc_herald.dispersion import angle_from_waist, waist_from_angle
from spdc_herald.exceptions import DomainError
from spdc_herald.globals import (
    default_grid_size,
    default_pump_samples,
    default_window_factor,
    speed_of_light,
    time_bandwidth_product,
)
from spdc_herald.phasematching import (
    InteractionSpec,
    delta_k_longitudinal,
    delta_kz,
    detuned_wavelengths,
    grating_vector,
    pm_amplitude,
    wavevectors,
)

WAVELENGTH_SIGNAL = "wavelength-signal"
WAVELENGTH_IDLER = "wavelength-idler"
ANGLE_SIGNAL = "angle-signal-external"
ANGLE_IDLER = "angle-idler-external"
ANGLE_TAGS = (ANGLE_SIGNAL, ANGLE_IDLER)

_FD_STEP = 1e10  # Hz
_FWHM_TO_E2 = np.sqrt(1 / (2 * np.log(2)))  # 1/e^2 half-width per FWHM


@dataclass(frozen=True)
class PumpSpec:
    wavelength: float
    regime: str  # cw | pulsed
    waist: float
    duration: Optional[float] = None  # FWHM, s

    def __post_init__(self):
        if self.regime not in ("cw", "pulsed"):
            raise DomainError(
                msg=f"pump regime must be 'cw' or 'pulsed', got {self.regime}"
            )
        if self.regime == "pulsed" and not (
            self.duration is not None and self.duration > 0
        ):
            raise DomainError(
                msg=f"pulsed pump needs a duration > 0, got {self.duration}"
            )
        if not self.wavelength > 0 or not self.waist > 0:
            raise DomainError(
                msg=f"pump wavelength and waist must be > 0, got"
                f" {self.wavelength}, {self.waist}"
            )

    @property
    def spectral_fwhm(self) -> float:
        """Intensity FWHM in Hz, transform limited; 0 for cw."""
        if self.regime == "cw":
            return 0.0
        return time_bandwidth_product / self.duration

    @property
    def angular_spread(self) -> float:
        return angle_from_waist(self.wavelength, self.waist)

    def with_waist(self, waist: float) -> "PumpSpec":
        return PumpSpec(self.wavelength, self.regime, waist, self.duration)


@dataclass(frozen=True)
class CollectionMode:
    wavelength: float
    angular_spread: float  # full 1/e^2, external
    center: float = 0.0

    def __post_init__(self):
        if not self.wavelength > 0 or not self.angular_spread > 0:
            raise DomainError(
                msg=f"collection mode needs wavelength and angular spread"
                f" > 0, got {self.wavelength}, {self.angular_spread}"
            )

    @classmethod
    def from_waist(cls, wavelength: float, waist: float) -> "CollectionMode":
        return cls(wavelength, angle_from_waist(wavelength, waist))

    @property
    def waist(self) -> float:
        return waist_from_angle(self.wavelength, self.angular_spread)

    def profile(self, theta):
        half = self.angular_spread / 2
        return np.exp(-(((np.asarray(theta) - self.center) / half) ** 2))

    def sample(self, theta) -> np.ndarray:
        """Profile on an angle axis, unit discrete norm."""
        theta = np.asarray(theta, dtype=float)
        if not theta.min() <= self.center <= theta.max():
            raise DomainError(
                msg=f"collection center {self.center} rad outside the axis"
                f" window [{theta.min()}, {theta.max()}]"
            )
        u = self.profile(theta)
        norm = np.sqrt(np.sum(u**2))
        if norm == 0:
            raise DomainError(msg="collection mode vanishes on the axis")
        return u / norm


@dataclass(frozen=True, eq=False)
class GridAxis:
    tag: str
    samples: np.ndarray
    units: str

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", s)
        if s.ndim != 1 or s.size < 1:
            raise DomainError(msg=f"axis {self.tag} must be a 1-D sample list")
        if s.size > 1:
            step = np.diff(s)
            if np.any(step <= 0) or not np.allclose(
                step, step[0], rtol=1e-6, atol=0
            ):
                raise DomainError(
                    msg=f"axis {self.tag} must be strictly increasing and"
                    " uniform"
                )

    @property
    def is_angle(self) -> bool:
        return self.tag in ANGLE_TAGS

    @property
    def step(self) -> float:
        return float(self.samples[1] - self.samples[0])

    def __len__(self):
        return self.samples.size


def _normalized(values: np.ndarray) -> np.ndarray:
    # pairwise summation in numpy keeps a fixed reduction order
    norm = np.sqrt(np.sum(np.abs(values) ** 2))
    if not norm > 0 or not np.isfinite(norm):
        raise DomainError(msg="amplitude vanishes on the grid window")
    return values / norm


@dataclass(frozen=True, eq=False)
class JointAmplitude:
    values: np.ndarray
    axis_x: GridAxis
    axis_y: GridAxis
    metadata: dict = field(default_factory=dict, compare=False)

    @classmethod
    def normalized(
        cls, values, axis_x: GridAxis, axis_y: GridAxis, **metadata
    ) -> "JointAmplitude":
        values = np.asarray(values, dtype=complex)
        if values.shape != (len(axis_x), len(axis_y)):
            raise DomainError(
                msg=f"values shape {values.shape} does not match axes"
                f" ({len(axis_x)}, {len(axis_y)})"
            )
        return cls(_normalized(values), axis_x, axis_y, dict(metadata))

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2


@dataclass(frozen=True, eq=False)
class IntensityMap:
    """Real nonnegative grid with unit sum."""

    values: np.ndarray
    axis_x: GridAxis
    axis_y: GridAxis
    metadata: dict = field(default_factory=dict, compare=False)

    @classmethod
    def normalized(
        cls, values, axis_x: GridAxis, axis_y: GridAxis, **metadata
    ) -> "IntensityMap":
        values = np.asarray(values, dtype=float)
        total = np.sum(values)
        if not total > 0:
            raise DomainError(msg="intensity vanishes on the grid window")
        return cls(values / total, axis_x, axis_y, dict(metadata))


@dataclass(frozen=True)
class GridSpec:
    """
    size samples per axis; windows at window_factor times the 1/e^2
    half-widths of the envelopes unless given explicitly.
    frequency_window: half-width in Hz, q_window: half-width in rad/m.
    """

    size: int = default_grid_size
    window_factor: float = default_window_factor
    pump_samples: int = default_pump_samples
    frequency_window: Optional[float] = None
    q_window: Optional[float] = None

    def __post_init__(self):
        if self.size < 8:
            raise DomainError(msg=f"grid size must be >= 8, got {self.size}")
        if not self.window_factor > 0:
            raise DomainError(msg="window factor must be > 0")
        if self.pump_samples < 1:
            raise DomainError(msg="pump_samples must be >= 1")


@dataclass(frozen=True)
class Scales:
    """1/e^2 half-widths of the envelopes and the dk_z slopes."""

    x_e: float
    q_pm: float
    q_pump: float
    nu_pm: float
    sigma_pump: float
    slope_sum: float
    slope_diff: float


def _sinc_e_root() -> float:
    # sinc(x) = 1/e, i.e. sinc^2 falls to 1/e^2
    return optimize.brentq(lambda x: np.sin(x) / x - np.exp(-1), 0.5, np.pi)


def characteristic_scales(spec: InteractionSpec, pump: PumpSpec) -> Scales:
    x_e = _sinc_e_root()
    k_p, k_s, k_i = wavevectors(spec)
    curvature = 1 / k_s + 1 / k_i
    q_pm = np.sqrt(4 * x_e / (curvature * spec.length))
    h = _FD_STEP
    slope_diff = (
        delta_k_longitudinal(spec, h, -h) - delta_k_longitudinal(spec, -h, h)
    ) / (2 * h)
    slope_sum = (
        delta_k_longitudinal(spec, h / 2, h / 2)
        - delta_k_longitudinal(spec, -h / 2, -h / 2)
    ) / (2 * h)
    if slope_diff == 0:
        raise DomainError(
            msg="signal and idler group velocities match; pass an explicit"
            " frequency_window"
        )
    return Scales(
        x_e=x_e,
        q_pm=float(q_pm),
        q_pump=2 / pump.waist,
        nu_pm=2 * x_e / (spec.length * abs(slope_diff)),
        sigma_pump=_FWHM_TO_E2 * pump.spectral_fwhm,
        slope_sum=slope_sum,
        slope_diff=slope_diff,
    )


def resolve_windows(
    spec: InteractionSpec, pump: PumpSpec, grid: GridSpec
) -> Tuple[float, float]:
    """(frequency half-window Hz, q half-window rad/m)."""
    if grid.frequency_window is not None and grid.q_window is not None:
        return grid.frequency_window, grid.q_window
    scales = characteristic_scales(spec, pump)
    freq = grid.frequency_window
    if freq is None:
        spread = abs(scales.slope_sum / scales.slope_diff) + 0.5
        freq = grid.window_factor * (scales.nu_pm + spread * scales.sigma_pump)
    q = grid.q_window
    if q is None:
        q = grid.window_factor * max(scales.q_pm, scales.q_pump)
    logging.debug(
        "grid windows: +-{:.4g} Hz, +-{:.4g} rad/m".format(freq, q)
    )
    return freq, q


def wavelength_axis(
    center: float, half_window: float, size: int, tag: str
) -> Tuple[GridAxis, np.ndarray]:
    """Uniform wavelength axis spanning +-half_window Hz, with detunings."""
    nu0 = speed_of_light / center
    if half_window >= nu0:
        raise DomainError(msg=f"frequency window {half_window} Hz too wide")
    wl = np.linspace(
        speed_of_light / (nu0 + half_window),
        speed_of_light / (nu0 - half_window),
        size,
    )
    return GridAxis(tag, wl, "m"), speed_of_light / wl - nu0


def angle_axes(
    spec: InteractionSpec, q_window: float, size: int
) -> Tuple[GridAxis, GridAxis]:
    k_vac = 2 * np.pi / spec.lambda_s
    if q_window >= k_vac:
        raise DomainError(
            msg=f"q window {q_window} rad/m exceeds the vacuum wavevector"
            f" {k_vac} rad/m"
        )
    theta_s = np.linspace(-1, 1, size) * np.arcsin(q_window / k_vac)
    theta_i = theta_s * spec.lambda_i / spec.lambda_s
    if np.max(np.abs(theta_i)) >= np.pi / 2:
        raise DomainError(msg="idler angle window beyond grazing emission")
    return GridAxis(ANGLE_SIGNAL, theta_s, "rad"), GridAxis(
        ANGLE_IDLER, theta_i, "rad"
    )


def transverse_wavevector(wavelength, theta):
    return 2 * np.pi / np.asarray(wavelength) * np.sin(theta)


def pump_spectral_envelope(pump: PumpSpec, summed, tolerance: float = 0.0):
    """
    Intensity weight of the summed detuning nu_s + nu_i.
    cw: indicator |summed| <= tolerance. pulsed: exp(-4 ln2 S^2 / FWHM^2).
    """
    summed = np.asarray(summed, dtype=float)
    if pump.regime == "cw":
        value = (np.abs(summed) <= tolerance).astype(float)
    else:
        value = np.exp(-4 * np.log(2) * summed**2 / pump.spectral_fwhm**2)
    return float(value) if value.ndim == 0 else value


def pump_angular_envelope(pump: PumpSpec, q_sum):
    """Amplitude exp(-(q_s + q_i)^2 w_p^2 / 4)."""
    q_sum = np.asarray(q_sum, dtype=float)
    if np.isinf(pump.waist):
        value = (q_sum == 0).astype(float)
    else:
        value = np.exp(-(q_sum**2) * pump.waist**2 / 4)
    return float(value) if value.ndim == 0 else value


def pump_spectral_samples(
    pump: PumpSpec, grid: GridSpec
) -> Tuple[np.ndarray, np.ndarray]:
    """Summed detunings and normalized intensity weights."""
    if pump.regime == "cw" or grid.pump_samples == 1:
        return np.zeros(1), np.ones(1)
    sigma = _FWHM_TO_E2 * pump.spectral_fwhm
    summed = np.linspace(-2 * sigma, 2 * sigma, grid.pump_samples)
    weights = pump_spectral_envelope(pump, summed)
    return summed, weights / np.sum(weights)


def _tag(photon: str, kind: str) -> str:
    if photon not in ("signal", "idler"):
        raise DomainError(msg=f"photon must be signal or idler, got {photon}")
    return f"{kind}-{photon}" + ("-external" if kind == "angle" else "")


def joint_spectral(
    spec: InteractionSpec, pump: PumpSpec, grid: GridSpec = GridSpec()
) -> JointAmplitude:
    """
    Collinear joint spectral amplitude sqrt(env(nu_s + nu_i)) *
    sinc(dk_z L / 2) over (lambda_s, lambda_i).
    A cw row holds a single sample, at the idler wavelength nearest the
    energy conjugate of the signal.
    """
    freq, _ = resolve_windows(spec, pump, grid)
    axis_s, nu_s = wavelength_axis(
        spec.lambda_s, freq, grid.size, WAVELENGTH_SIGNAL
    )
    axis_i, nu_i = wavelength_axis(
        spec.lambda_i, freq, grid.size, WAVELENGTH_IDLER
    )
    if pump.regime == "cw":
        values = np.zeros((grid.size, grid.size), dtype=complex)
        conjugate = np.argmin(
            np.abs(nu_s[:, None] + nu_i[None, :]), axis=1
        )
        amp = pm_amplitude(
            delta_k_longitudinal(spec, nu_s, -nu_s), spec.length
        )
        values[np.arange(grid.size), conjugate] = amp
    else:
        nu_s2, nu_i2 = np.meshgrid(nu_s, nu_i, indexing="ij")
        envelope = np.sqrt(pump_spectral_envelope(pump, nu_s2 + nu_i2))
        values = envelope * pm_amplitude(
            delta_k_longitudinal(spec, nu_s2, nu_i2), spec.length
        )
    logging.info(
        "joint spectral amplitude {}x{} over +-{:.4g} Hz".format(
            grid.size, grid.size, freq
        )
    )
    return JointAmplitude.normalized(
        values, axis_s, axis_i, regime=pump.regime, frequency_window=freq
    )


def joint_angular(
    spec: InteractionSpec, pump: PumpSpec, grid: GridSpec = GridSpec()
) -> JointAmplitude:
    """
    Joint angular amplitude at the center wavelengths over external
    (theta_s, theta_i): env(q_s + q_i) * sinc(dk_z L / 2).
    """
    _, q_window = resolve_windows(spec, pump, grid)
    axis_s, axis_i = angle_axes(spec, q_window, grid.size)
    q_s = transverse_wavevector(spec.lambda_s, axis_s.samples)[:, None]
    q_i = transverse_wavevector(spec.lambda_i, axis_i.samples)[None, :]
    k_p, k_s, k_i = wavevectors(spec)
    dk = delta_kz(k_p, k_s, k_i, q_s, q_i, grating_vector(spec))
    values = pump_angular_envelope(pump, q_s + q_i) * pm_amplitude(
        dk, spec.length
    )
    logging.info(
        "joint angular amplitude {}x{} over +-{:.4g} rad/m,"
        " w_p={:.4g} m".format(
            grid.size, grid.size, q_window, pump.waist
        )
    )
    return JointAmplitude.normalized(
        values, axis_s, axis_i, pump_waist=pump.waist, q_window=q_window
    )


def _roles(spec: InteractionSpec, photon: str):
    """(own wavelength, partner wavelength)."""
    if photon == "signal":
        return spec.lambda_s, spec.lambda_i
    return spec.lambda_i, spec.lambda_s


def _ordered(photon: str, own, partner):
    """(signal, idler) from (own, partner)."""
    return (own, partner) if photon == "signal" else (partner, own)


def _spectral_spatial_axes(spec, pump, photon, grid):
    freq, q_window = resolve_windows(spec, pump, grid)
    own_wl, _ = _roles(spec, photon)
    wl_axis, nu_x = wavelength_axis(
        own_wl, freq, grid.size, _tag(photon, "wavelength")
    )
    axis_s, axis_i = angle_axes(spec, q_window, grid.size)
    theta_x, theta_y = _ordered(photon, axis_s, axis_i)
    return wl_axis, nu_x, theta_x, theta_y


def _filter(mode: Optional[CollectionMode], theta) -> np.ndarray:
    if mode is None:
        return np.ones_like(np.asarray(theta, dtype=float))
    if not np.min(theta) <= mode.center <= np.max(theta):
        raise DomainError(
            msg=f"collection center {mode.center} rad outside the axis window"
        )
    return mode.profile(theta)


def spectral_spatial(
    spec: InteractionSpec,
    pump: PumpSpec,
    photon: str = "signal",
    grid: GridSpec = GridSpec(),
    mode_x: Optional[CollectionMode] = None,
    mode_y: Optional[CollectionMode] = None,
) -> IntensityMap:
    """
    I(lambda_x, theta_x) = sum_k w_k sum_theta_y |amplitude|^2, the partner
    frequency fixed per pump spectral sample by energy conservation and the
    partner angle traced out. Optional gaussian collection filters act on
    the amplitude (mode_x on theta_x, mode_y on theta_y).
    """
    wl_axis, nu_x, theta_x, theta_y = _spectral_spatial_axes(
        spec, pump, photon, grid
    )
    summed, weights = pump_spectral_samples(pump, grid)
    nu_y = summed[None, :] - nu_x[:, None]  # (N, M)
    nu_s, nu_i = _ordered(photon, nu_x[:, None], nu_y)
    _, wl_s, wl_i = detuned_wavelengths(spec, nu_s, nu_i)
    k_p, k_s, k_i = wavevectors(spec, nu_s, nu_i)
    k_p, k_s, k_i = np.broadcast_arrays(k_p, k_s, k_i)
    wl_s, wl_i = np.broadcast_arrays(wl_s, wl_i)
    wl_x, wl_y = _ordered(photon, wl_s, wl_i)
    k_x, k_y = _ordered(photon, k_s, k_i)
    grating = grating_vector(spec)
    filter_x = _filter(mode_x, theta_x.samples)[:, None]
    filter_y = _filter(mode_y, theta_y.samples)[None, :]
    sin_x = np.sin(theta_x.samples)[None, :, None]
    sin_y = np.sin(theta_y.samples)[None, None, :]

    values = np.empty((len(wl_axis), len(theta_x)))
    for row in range(len(wl_axis)):
        q_x = 2 * np.pi / wl_x[row, 0] * sin_x  # (1, Nx, 1)
        q_y = (2 * np.pi / wl_y[row])[:, None, None] * sin_y  # (M, 1, Ny)
        q_s, q_i = _ordered(photon, q_x, q_y)
        kp = k_p[row][:, None, None]
        ks, ki = (
            (k_x[row, 0], k_y[row][:, None, None])
            if photon == "signal"
            else (k_y[row][:, None, None], k_x[row, 0])
        )
        dk = delta_kz(kp, ks, ki, q_s, q_i, grating)
        amp = (
            pump_angular_envelope(pump, q_s + q_i)
            * pm_amplitude(dk, spec.length)
            * filter_x[None, :, :]
            * filter_y[None, :, :]
        )
        values[row] = np.einsum(
            "m,mxy->x", weights, np.abs(amp) ** 2, optimize=False
        )
    logging.info(
        "{} spectral-spatial map {}x{} ({} pump samples)".format(
            photon, len(wl_axis), len(theta_x), weights.size
        )
    )
    return IntensityMap.normalized(
        values,
        wl_axis,
        theta_x,
        photon=photon,
        regime=pump.regime,
        filtered=mode_x is not None or mode_y is not None,
    )


def spectral_spatial_amplitude(
    spec: InteractionSpec,
    pump: PumpSpec,
    photon: str = "signal",
    grid: GridSpec = GridSpec(),
    mode_x: Optional[CollectionMode] = None,
    mode_y: Optional[CollectionMode] = None,
) -> JointAmplitude:
    """
    Slice variant: the partner sits at the energy conjugate frequency and
    the conjugate transverse wavevector (nu_y = -nu_x, q_y = -q_x), so both
    pump envelopes equal one. Collection filters act as in
    spectral_spatial, mode_y evaluated at the partner's angle.
    """
    wl_axis, nu_x, theta_x, _ = _spectral_spatial_axes(
        spec, pump, photon, grid
    )
    nu_s, nu_i = _ordered(photon, nu_x[:, None], -nu_x[:, None])
    _, wl_s, wl_i = detuned_wavelengths(spec, nu_s, nu_i)
    wl_x, wl_y = _ordered(photon, wl_s, wl_i)
    k_p, k_s, k_i = wavevectors(spec, nu_s, nu_i)
    q_x = 2 * np.pi / wl_x * np.sin(theta_x.samples)[None, :]
    q_s, q_i = _ordered(photon, q_x, -q_x)
    dk = delta_kz(k_p, k_s, k_i, q_s, q_i, grating_vector(spec))
    values = pm_amplitude(dk, spec.length) * _filter(
        mode_x, theta_x.samples
    )[None, :]
    if mode_y is not None:
        theta_y = np.arcsin(-q_x * wl_y / (2 * np.pi))
        values = values * mode_y.profile(theta_y)
    return JointAmplitude.normalized(
        values, wl_axis, theta_x, photon=photon, variant="slice"
    )


def collinear_spectrum(
    spec: InteractionSpec,
    pump: PumpSpec,
    photon: str = "signal",
    grid: GridSpec = GridSpec(),
) -> Tuple[GridAxis, np.ndarray]:
    """|sinc(dk_z(nu, -nu, 0, 0) L / 2)|^2, the pump independent spectrum."""
    freq, _ = resolve_windows(spec, pump, grid)
    own_wl, _ = _roles(spec, photon)
    wl_axis, nu = wavelength_axis(
        own_wl, freq, grid.size, _tag(photon, "wavelength")
    )
    nu_s, nu_i = _ordered(photon, nu, -nu)
    spectrum = pm_amplitude(
        delta_k_longitudinal(spec, nu_s, nu_i), spec.length
    ) ** 2
    return wl_axis, spectrum / np.sum(spectrum)


def apply_collection(
    amp: JointAmplitude,
    mode_x: Optional[CollectionMode],
    mode_y: Optional[CollectionMode] = None,
) -> JointAmplitude:
    """
    Multiply the angle axes by gaussian acceptances: mode_x on the first
    angle axis, mode_y on the second. A None mode leaves its axis as is.
    Renormalized.
    """
    angle_axes_ = [
        (i, a) for i, a in enumerate((amp.axis_x, amp.axis_y)) if a.is_angle
    ]
    values = amp.values
    for slot, mode in enumerate((mode_x, mode_y)):
        if mode is None:
            continue
        if slot >= len(angle_axes_):
            raise DomainError(
                msg=f"collection mode {slot + 1} given for"
                f" {len(angle_axes_)} angle axes"
            )
        i, axis = angle_axes_[slot]
        u = mode.sample(axis.samples)
        values = values * (u[:, None] if i == 0 else u[None, :])
    return JointAmplitude.normalized(
        values, amp.axis_x, amp.axis_y, **dict(amp.metadata, filtered=True)
    )


def collected_joint_spectral(
    spec: InteractionSpec,
    pump: PumpSpec,
    mode_s: CollectionMode,
    mode_i: CollectionMode,
    grid: GridSpec = GridSpec(),
    angle_samples: int = 41,
) -> IntensityMap:
    """
    Joint spectral intensity after gaussian angular collection of both
    photons, traced over the collected angles, on the joint_spectral grid.
    """
    freq, _ = resolve_windows(spec, pump, grid)
    axis_s, nu_s = wavelength_axis(
        spec.lambda_s, freq, grid.size, WAVELENGTH_SIGNAL
    )
    axis_i, nu_i = wavelength_axis(
        spec.lambda_i, freq, grid.size, WAVELENGTH_IDLER
    )
    theta_s = np.linspace(-1.5, 1.5, angle_samples) * mode_s.angular_spread
    theta_i = np.linspace(-1.5, 1.5, angle_samples) * mode_i.angular_spread
    u = mode_s.profile(theta_s)[:, None] * mode_i.profile(theta_i)[None, :]
    grating = grating_vector(spec)
    values = np.zeros((grid.size, grid.size))
    for row in range(grid.size):
        if pump.regime == "cw":
            cols = np.array([np.argmin(np.abs(nu_s[row] + nu_i))])
            partner = np.array([-nu_s[row]])
            weight = np.ones(1)
        else:
            cols = np.arange(grid.size)
            partner = nu_i
            weight = np.sqrt(pump_spectral_envelope(pump, nu_s[row] + nu_i))
        _, wl_s, wl_i = detuned_wavelengths(spec, nu_s[row], partner)
        k_p, k_s, k_i = wavevectors(spec, nu_s[row], partner)
        q_s = transverse_wavevector(wl_s, theta_s)[None, :, None]
        q_i = (2 * np.pi / wl_i)[:, None, None] * np.sin(theta_i)[None, None]
        dk = delta_kz(
            k_p[:, None, None], k_s, k_i[:, None, None], q_s, q_i, grating
        )
        amp = (
            pump_angular_envelope(pump, q_s + q_i)
            * pm_amplitude(dk, spec.length)
            * u[None]
        )
        values[row, cols] = weight**2 * np.sum(np.abs(amp) ** 2, axis=(1, 2))
    return IntensityMap.normalized(
        values, axis_s, axis_i, regime=pump.regime, filtered=True
    )


def spectral_correlation(a, b) -> float:
    """Normalized overlap sum(a b) / sqrt(sum a^2 sum b^2) of intensities."""
    a = _as_intensity(a)
    b = _as_intensity(b)
    if a.shape != b.shape:
        raise DomainError(msg=f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.sum(a * b) / np.sqrt(np.sum(a**2) * np.sum(b**2)))


def _as_intensity(value) -> np.ndarray:
    if isinstance(value, JointAmplitude):
        return value.intensity
    if isinstance(value, IntensityMap):
        return value.values
    return np.asarray(value, dtype=float)


def fwhm(x, y) -> float:
    """Full width at half maximum of a single peaked sampled profile."""
    return full_width(x, y, 0.5)


def full_width(x, y, fraction: float) -> float:
    """Width between the crossings of fraction times the peak."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    peak = int(np.argmax(y))
    level = y[peak] * fraction
    if not level > 0:
        raise DomainError(msg="profile has no positive peak")

    def crossing(indices):
        prev = peak
        for i in indices:
            if y[i] < level:
                return np.interp(level, [y[i], y[prev]], [x[i], x[prev]])
            prev = i
        raise DomainError(
            msg=f"profile does not fall to {fraction} of its peak"
        )

    left = crossing(range(peak - 1, -1, -1))
    right = crossing(range(peak + 1, y.size))
    return float(right - left)
