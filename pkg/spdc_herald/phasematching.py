"""
Energy conservation, longitudinal phase mismatch and the phasematching
solvers.

Detunings nu are optical frequency offsets in Hz from the center
frequencies, transverse wavevectors q are in rad/m along a single
transverse axis. The pump carries q_p = q_s + q_i.
"""
import logging
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
from scipy import optimize

from spdc_herald.dispersion import Axis, CrystalSpec, index
from spdc_herald.exceptions import (
    ConvergenceError,
    DomainError,
    PhasematchingSignError,
)
from spdc_herald.globals import (
    solver_max_iterations,
    solver_tolerance,
    speed_of_light,
)

FIELDS = ("pump", "signal", "idler")


def energy_match(lambda_p: float, lambda_s: float) -> float:
    """
    Idler wavelength from 1/l_i = 1/l_p - 1/l_s.
    :raise DomainError when lambda_s <= lambda_p (no down-conversion)
    """
    if not lambda_p > 0 or not lambda_s > lambda_p:
        raise DomainError(
            msg=f"no down-conversion: signal {lambda_s} m must be longer"
            f" than pump {lambda_p} m"
        )
    return 1.0 / (1.0 / lambda_p - 1.0 / lambda_s)


@dataclass(frozen=True)
class InteractionSpec:
    """
    Three-wave interaction at fixed center wavelengths.

    pump_axis/signal_axis/idler_axis name a principal axis of the crystal,
    or an (axis_0, axis_90) pair for the field whose index is angle tuned
    through theta. grating_sign orients the QPM grating vector:
    dk = k_p - k_s - k_i - grating_sign * 2 pi / poling_period.
    """

    crystal: CrystalSpec
    lambda_p: float
    lambda_s: float
    lambda_i: float
    pump_axis: Axis
    signal_axis: Axis
    idler_axis: Axis
    theta: Optional[float] = None
    grating_sign: int = 1
    temperature: Optional[float] = None

    def __post_init__(self):
        lhs = 1.0 / self.lambda_p
        rhs = 1.0 / self.lambda_s + 1.0 / self.lambda_i
        if abs(lhs - rhs) > 1e-9 * lhs:
            raise DomainError(
                msg="energy not conserved: 1/{} != 1/{} + 1/{}".format(
                    self.lambda_p, self.lambda_s, self.lambda_i
                )
            )
        if self.lambda_s > self.lambda_i * (1 + 1e-12):
            raise DomainError(
                msg=f"signal {self.lambda_s} m must not be longer than"
                f" idler {self.lambda_i} m"
            )
        if self.grating_sign not in (1, -1):
            raise DomainError(
                msg=f"grating_sign must be +1 or -1, got {self.grating_sign}"
            )
        self._check_polarization()

    def _check_polarization(self):
        pm_type = self.crystal.pm_type
        axes = (self.pump_axis, self.signal_axis, self.idler_axis)
        if pm_type == "type0_qpm" and len(set(map(str, axes))) != 1:
            raise DomainError(
                msg=f"type0_qpm needs one polarization for all fields, got"
                f" {axes}"
            )
        if pm_type == "type1_angle" and (
            self.signal_axis != self.idler_axis
            or self.pump_axis == self.signal_axis
        ):
            raise DomainError(
                msg="type1_angle needs signal and idler on the same axis and"
                f" the pump on another, got {axes}"
            )
        if pm_type == "type2_qpm" and self.signal_axis == self.idler_axis:
            raise DomainError(
                msg=f"type2_qpm needs orthogonal signal and idler, got {axes}"
            )

    @property
    def length(self) -> float:
        return self.crystal.length

    @property
    def axes(self) -> Tuple[Axis, Axis, Axis]:
        return self.pump_axis, self.signal_axis, self.idler_axis


def interaction_from_crystal(
    crystal: CrystalSpec,
    lambda_p: Optional[float] = None,
    lambda_s: Optional[float] = None,
    polarization: Optional[dict] = None,
    grating_sign: Optional[int] = None,
    theta: Optional[float] = None,
    temperature: Optional[float] = None,
) -> InteractionSpec:
    """
    Build an InteractionSpec, filling unset values from crystal.defaults.
    A signal given longer than its idler is swapped with it.
    """
    defaults = crystal.defaults
    lambda_p = lambda_p or defaults.get("lambda_p")
    lambda_s = lambda_s or defaults.get("lambda_s")
    polarization = polarization or defaults.get("polarization")
    if lambda_p is None or lambda_s is None or polarization is None:
        raise DomainError(
            msg=f"{crystal.name}: lambda_p, lambda_s and polarization are"
            " required (no catalog defaults)"
        )
    lambda_i = energy_match(lambda_p, lambda_s)
    axes = {f: _axis(polarization[f]) for f in FIELDS}
    if lambda_s > lambda_i:
        logging.info(
            "swapping signal {} m and idler {} m".format(lambda_s, lambda_i)
        )
        lambda_s, lambda_i = lambda_i, lambda_s
        axes["signal"], axes["idler"] = axes["idler"], axes["signal"]
    if grating_sign is None:
        grating_sign = int(defaults.get("grating_sign", 1))
    return InteractionSpec(
        crystal=crystal,
        lambda_p=lambda_p,
        lambda_s=lambda_s,
        lambda_i=lambda_i,
        pump_axis=axes["pump"],
        signal_axis=axes["signal"],
        idler_axis=axes["idler"],
        theta=theta,
        grating_sign=grating_sign,
        temperature=temperature,
    )


def _axis(value) -> Axis:
    if isinstance(value, str):
        return value
    return tuple(value)


def detuned_wavelengths(spec: InteractionSpec, nu_s=0.0, nu_i=0.0):
    """Vacuum wavelengths (pump, signal, idler) at the given detunings."""
    c = speed_of_light
    nu_s = np.asarray(nu_s, dtype=float)
    nu_i = np.asarray(nu_i, dtype=float)
    wl_s = c / (c / spec.lambda_s + nu_s)
    wl_i = c / (c / spec.lambda_i + nu_i)
    wl_p = c / (c / spec.lambda_p + nu_s + nu_i)
    return wl_p, wl_s, wl_i


def wavevectors(spec: InteractionSpec, nu_s=0.0, nu_i=0.0):
    """Wavevector magnitudes (k_p, k_s, k_i) in rad/m."""
    out = []
    for axis, wl in zip(spec.axes, detuned_wavelengths(spec, nu_s, nu_i)):
        n = index(spec.crystal, axis, wl, spec.theta, spec.temperature)
        out.append(2 * np.pi * np.asarray(n) / wl)
    return tuple(out)


def collinear_mismatch(spec: InteractionSpec) -> float:
    """k_p - k_s - k_i at the center wavelengths, no grating."""
    k_p, k_s, k_i = wavevectors(spec)
    return float(k_p - k_s - k_i)


def grating_vector(spec: InteractionSpec) -> float:
    if not spec.crystal.is_qpm:
        return 0.0
    if spec.crystal.poling_period is None:
        raise DomainError(
            msg=f"{spec.crystal.name}: poling period not set, solve it first"
        )
    return spec.grating_sign * 2 * np.pi / spec.crystal.poling_period


def _kz(k, q, field: str):
    k, q = np.broadcast_arrays(k, q)
    if np.any(np.abs(q) >= k):
        raise DomainError(
            msg=f"evanescent {field}: transverse wavevector |q| >= k"
        )
    return np.sqrt(k**2 - q**2)


def delta_kz(k_p, k_s, k_i, q_s, q_i, grating: float = 0.0):
    """dk_z from precomputed wavevector magnitudes, q_p = q_s + q_i."""
    q_s = np.asarray(q_s, dtype=float)
    q_i = np.asarray(q_i, dtype=float)
    return (
        _kz(k_p, q_s + q_i, "pump")
        - _kz(k_s, q_s, "signal")
        - _kz(k_i, q_i, "idler")
        - grating
    )


def delta_k_longitudinal(
    spec: InteractionSpec, nu_s=0.0, nu_i=0.0, q_s=0.0, q_i=0.0
):
    """
    dk_z = k_p,z - k_s,z - k_i,z - K_grating, k_z = sqrt(k^2 - q^2).
    Arguments broadcast against each other.
    :raise DomainError on an evanescent field or a wavelength outside the
    transparency range
    """
    k_p, k_s, k_i = wavevectors(spec, nu_s, nu_i)
    dk = delta_kz(k_p, k_s, k_i, q_s, q_i, grating_vector(spec))
    return float(dk) if np.ndim(dk) == 0 else dk


def pm_amplitude(delta_k, length: float):
    """sinc(dk L / 2), sinc(0) = 1, sign kept."""
    x = np.asarray(delta_k, dtype=float) * length / (2 * np.pi)
    value = np.sinc(x)
    return float(value) if value.ndim == 0 else value


@dataclass(frozen=True)
class PhasematchingSolution:
    kind: str  # poling_period | angle
    value: float
    residual: float
    lambda_p: float
    lambda_s: float
    lambda_i: float
    grating_sign: int = 1

    def to_dict(self) -> dict:
        return {
            "lambda_p": self.lambda_p,
            "lambda_s": self.lambda_s,
            "lambda_i": self.lambda_i,
            "kind": self.kind,
            "poling_period_or_angle": self.value,
            "grating_sign": self.grating_sign,
            "residual": self.residual,
        }


def solve_poling_period(spec: InteractionSpec) -> float:
    """
    Lambda = 2 pi / (grating_sign * (k_p - k_s - k_i)), collinear.
    :raise PhasematchingSignError when no grating is needed or the grating
    orientation cannot compensate the mismatch
    """
    if not spec.crystal.is_qpm:
        raise DomainError(
            msg=f"{spec.crystal.name} is {spec.crystal.pm_type}, not QPM"
        )
    mismatch = collinear_mismatch(spec)
    if abs(mismatch) < solver_tolerance:
        raise PhasematchingSignError(
            msg=f"no grating needed: k_p - k_s - k_i = {mismatch} rad/m",
            mismatch=mismatch,
        )
    if spec.grating_sign * mismatch < 0:
        raise PhasematchingSignError(
            msg=f"wrong sign: k_p - k_s - k_i = {mismatch:.6g} rad/m cannot"
            f" be compensated with grating_sign={spec.grating_sign}, use"
            f" grating_sign={-spec.grating_sign}",
            mismatch=mismatch,
        )
    period = 2 * np.pi / (spec.grating_sign * mismatch)
    logging.info(
        "{}: poling period {:.6g} m (mismatch {:.6g} rad/m)".format(
            spec.crystal.name, period, mismatch
        )
    )
    return period


def solve_pm_angle(
    spec: InteractionSpec, bracket: Tuple[float, float] = (0.0, np.pi / 2)
) -> float:
    """
    Collinear phasematching angle by bisection of dk_z(theta) on bracket.
    :raise ConvergenceError when dk_z does not change sign on the bracket or
    the residual stays above the solver tolerance
    """
    if spec.crystal.pm_type != "type1_angle":
        raise DomainError(
            msg=f"{spec.crystal.name} is {spec.crystal.pm_type}, not angle"
            " phasematched"
        )

    def mismatch(theta: float) -> float:
        return delta_k_longitudinal(replace(spec, theta=theta))

    low, high = bracket
    f_low, f_high = mismatch(low), mismatch(high)
    if f_low == 0:
        return low
    if f_high == 0:
        return high
    if np.sign(f_low) == np.sign(f_high):
        raise ConvergenceError(
            msg=f"no phasematching angle in [{low}, {high}] rad: dk_z ="
            f" {f_low:.6g} and {f_high:.6g} rad/m at the ends",
            endpoints=((low, f_low), (high, f_high)),
        )
    try:
        theta = optimize.bisect(
            mismatch, low, high, xtol=1e-15, maxiter=solver_max_iterations
        )
    except RuntimeError as e:
        raise ConvergenceError(
            msg=f"bisection did not converge in {solver_max_iterations}"
            " iterations",
            endpoints=((low, f_low), (high, f_high)),
        ) from e
    residual = abs(mismatch(theta))
    if residual > solver_tolerance:
        raise ConvergenceError(
            msg=f"phasematching angle residual {residual} rad/m above"
            f" {solver_tolerance}",
            endpoints=((low, f_low), (high, f_high)),
        )
    logging.info(
        "{}: phasematching angle {:.8f} rad".format(spec.crystal.name, theta)
    )
    return theta


def prepare(
    spec: InteractionSpec, bracket: Optional[Tuple[float, float]] = None
) -> Tuple[InteractionSpec, PhasematchingSolution]:
    """
    Solve the poling period (QPM) or the angle (type1_angle) and return the
    completed spec with the solution.
    """
    if spec.crystal.is_qpm:
        period = solve_poling_period(spec)
        solved = replace(
            spec, crystal=replace(spec.crystal, poling_period=period)
        )
        kind, value = "poling_period", period
    else:
        if bracket is None:
            bracket = tuple(
                spec.crystal.defaults.get("theta_bracket", (0.0, np.pi / 2))
            )
        theta = solve_pm_angle(spec, bracket)
        solved = replace(spec, theta=theta)
        kind, value = "angle", theta
    residual = abs(delta_k_longitudinal(solved))
    return solved, PhasematchingSolution(
        kind=kind,
        value=value,
        residual=residual,
        lambda_p=spec.lambda_p,
        lambda_s=spec.lambda_s,
        lambda_i=spec.lambda_i,
        grating_sign=spec.grating_sign,
    )
