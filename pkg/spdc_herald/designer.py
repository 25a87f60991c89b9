"""
Source design in four steps:

  1. pump waist from a target focusing parameter,
  2. signal collection angle from the plateau of the signal
     spectral-spatial map,
  3. idler collection angle from the joint angular amplitude,
  4. align on the exact center wavelengths (reported as a note).

Angles are full 1/e^2 external divergences in rad, waists in m.
"""
import logging
from dataclasses import dataclass, field
from functools import wraps
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from spdc_herald.dispersion import (
    angle_from_waist,
    beam_diameter_at_faces,
    focusing_parameter,
    waist_for_focusing,
    waist_from_angle,
)
from spdc_herald.exceptions import (
    ConvergenceError,
    DegenerateCouplingError,
    DomainError,
    Error,
    NoPlateauError,
    StageError,
)
from spdc_herald.globals import (
    coupling_floor,
    default_plateau_tolerance,
    default_xi_target,
    min_lens_overlap,
    solver_max_iterations,
)
from spdc_herald.heralding import EfficiencyReport, overlap_efficiencies
from spdc_herald.joint_amplitude import (
    CollectionMode,
    GridSpec,
    IntensityMap,
    JointAmplitude,
    PumpSpec,
    collinear_spectrum,
    full_width,
    fwhm,
    joint_angular,
    spectral_spatial,
    spectral_spatial_amplitude,
)
from spdc_herald.phasematching import InteractionSpec
from spdc_herald.relay import Relay, fiber_overlap, relay_output_waist
from spdc_herald.schmidt import schmidt_decompose

IDLER_RULES = ("conditional", "balanced", "max-symmetric")

_E2 = np.exp(-2)
_KEEP_SUGGESTIONS = 3
# geometric walk over idler angles when bracketing mu_s = mu_i
_BRACKET_GROWTH = 1.2


@dataclass(frozen=True)
class PumpChoice:
    waist: float
    xi: float
    angular_spread: float
    face_diameter: float
    warnings: List[str] = field(default_factory=list, compare=False)


def choose_pump_waist(
    lambda_p: float,
    length: float,
    xi_target: float = default_xi_target,
    cross_section: Optional[Tuple[float, float]] = None,
) -> PumpChoice:
    """
    w_p = sqrt(lambda_p L / (2 pi xi_target)). A beam wider than the
    crystal aperture at the faces is a warning, not an error.
    """
    waist = waist_for_focusing(lambda_p, length, xi_target)
    face = beam_diameter_at_faces(lambda_p, length, waist)
    warnings = []
    if cross_section is not None and face > min(cross_section):
        warnings.append(
            f"pump 1/e^2 diameter {face:.4g} m at the crystal faces exceeds"
            f" the aperture {min(cross_section):.4g} m"
        )
        logging.warning(warnings[-1])
    return PumpChoice(
        waist=float(waist),
        xi=float(focusing_parameter(lambda_p, length, waist)),
        angular_spread=float(angle_from_waist(lambda_p, waist)),
        face_diameter=float(face),
        warnings=warnings,
    )


def _conditional_mean(ss_map: IntensityMap) -> Tuple[np.ndarray, np.ndarray]:
    """Mean wavelength per angle column, over columns carrying intensity."""
    values = ss_map.values
    column = np.sum(values, axis=0)
    valid = column > coupling_floor * np.max(column)
    mean = np.full(column.shape, np.nan)
    mean[valid] = ss_map.axis_x.samples @ values[:, valid] / column[valid]
    return mean, valid


def signal_collection_angle(
    ss_map: IntensityMap,
    reference_fwhm: Optional[float] = None,
    tolerance: float = default_plateau_tolerance,
) -> float:
    """
    Full angle over which the conditional mean wavelength stays within
    tolerance * reference_fwhm of its value on axis. The reference defaults
    to the FWHM of the on-axis column.
    :raise NoPlateauError when the first step off axis already breaks it
    """
    if not 0 < tolerance < 1:
        raise DomainError(
            msg=f"plateau tolerance must be in (0, 1), got {tolerance}"
        )
    theta = ss_map.axis_y.samples
    center = int(np.argmin(np.abs(theta)))
    if reference_fwhm is None:
        reference_fwhm = fwhm(ss_map.axis_x.samples, ss_map.values[:, center])
    mean, valid = _conditional_mean(ss_map)
    if not valid[center]:
        raise NoPlateauError(msg="no intensity on axis")
    shift = np.abs(mean - mean[center])
    level = tolerance * reference_fwhm

    def edge(step: int) -> float:
        prev = center
        i = center + step
        while 0 <= i < theta.size:
            if not valid[i] or shift[i] > level:
                if i == center + step:
                    raise NoPlateauError(
                        msg="plateau narrower than one grid step, reduce the"
                        " pump focusing (smaller xi)"
                    )
                if not valid[i]:
                    return theta[prev]
                return float(
                    np.interp(
                        level, [shift[prev], shift[i]], [theta[prev], theta[i]]
                    )
                )
            prev = i
            i += step
        return theta[prev]

    angle = float(edge(1) - edge(-1))
    logging.info(
        "signal plateau {:.4g} rad ({:.4g} deg)".format(
            angle, np.degrees(angle)
        )
    )
    return angle


def _angular_modes(lambda_s, lambda_i, signal_angle, idler_angle):
    return (
        CollectionMode(lambda_s, signal_angle),
        CollectionMode(lambda_i, idler_angle),
    )


def idler_collection_angle(
    amp: JointAmplitude,
    signal_angle: float,
    lambda_s: float,
    lambda_i: float,
    rule: str = "conditional",
) -> float:
    """
    conditional: full 1/e^2 width of the idler intensity conditioned on
    the signal collected at signal_angle.
    balanced: idler angle with mu_s = mu_i.
    max-symmetric: idler angle maximizing mu_si.
    """
    if rule not in IDLER_RULES:
        raise DomainError(
            msg=f"unknown idler rule '{rule}', use {IDLER_RULES}"
        )
    theta_i = amp.axis_y.samples
    if rule == "conditional":
        u_s = CollectionMode(lambda_s, signal_angle).sample(
            amp.axis_x.samples
        )
        conditional = np.abs(u_s @ amp.values) ** 2
        if not np.sum(conditional) > coupling_floor:
            raise DegenerateCouplingError(
                msg="conditional idler intensity vanishes", arm="idler"
            )
        return full_width(theta_i, conditional, _E2)

    low = 2 * amp.axis_y.step
    high = float(theta_i[-1] - theta_i[0])

    def efficiencies(idler_angle: float) -> EfficiencyReport:
        mode_s, mode_i = _angular_modes(
            lambda_s, lambda_i, signal_angle, idler_angle
        )
        return overlap_efficiencies(amp, mode_s, mode_i)[0]

    if rule == "balanced":

        def imbalance(idler_angle: float) -> float:
            report = efficiencies(idler_angle)
            return report.mu_s - report.mu_i

        # first sign change going up from the narrowest mode; the grid edge
        # truncates very wide modes and can flip the sign back
        a, f_a = low, imbalance(low)
        b = a
        while b < high:
            b = min(b * _BRACKET_GROWTH, high)
            f_b = imbalance(b)
            if np.sign(f_b) != np.sign(f_a):
                break
            a, f_a = b, f_b
        else:
            raise ConvergenceError(
                msg=f"mu_s - mu_i keeps its sign on [{low:.4g}, {high:.4g}]"
                " rad",
                endpoints=((low, imbalance(low)), (high, f_a)),
            )
        logging.debug(
            "balanced idler bracket [{:.4g}, {:.4g}] rad".format(a, b)
        )
        return float(
            optimize.brentq(
                imbalance,
                a,
                b,
                xtol=1e-9 * high,
                maxiter=solver_max_iterations,
            )
        )
    result = optimize.minimize_scalar(
        lambda a: -efficiencies(a).mu_si,
        bounds=(low, high),
        method="bounded",
        options={"xatol": 1e-6 * high, "maxiter": solver_max_iterations},
    )
    if not result.success:
        raise ConvergenceError(
            msg=f"mu_si maximization failed: {result.message}",
            endpoints=((low, None), (high, None)),
        )
    return float(result.x)


@dataclass(frozen=True)
class LensSuggestion:
    arm: str
    wavelength: float
    fiber_mfd: float
    collimating_focal: float
    focusing_focal: float
    fiber_waist: float
    overlap: float

    def to_dict(self) -> dict:
        return {
            "arm": self.arm,
            "wavelength": self.wavelength,
            "fiber_mfd": self.fiber_mfd,
            "collimating_focal": self.collimating_focal,
            "focusing_focal": self.focusing_focal,
            "fiber_waist": self.fiber_waist,
            "overlap": self.overlap,
        }


def lens_suggestion(
    waist: float,
    fiber_mfd: float,
    wavelength: float,
    focal_pairs: Sequence[Tuple[float, float]],
    arm: str = "signal",
) -> Tuple[List[LensSuggestion], List[str]]:
    """
    Rank (collimating, focusing) focal length pairs in telescopic relay by
    the overlap of the imaged waist with the fiber mode.
    Candidates below the minimum overlap are dropped; an empty ranking
    comes with a warning.
    """
    ranked = []
    for f_c, f_f in focal_pairs:
        fiber_waist, _ = relay_output_waist(wavelength, waist, Relay(f_c, f_f))
        overlap = fiber_overlap(fiber_waist, fiber_mfd)
        if overlap >= min_lens_overlap:
            ranked.append(
                LensSuggestion(
                    arm, wavelength, fiber_mfd, f_c, f_f, fiber_waist, overlap
                )
            )
    ranked.sort(
        key=lambda s: (-s.overlap, s.collimating_focal, s.focusing_focal)
    )
    warnings = []
    if not ranked:
        warnings.append(
            f"no lens pair reaches overlap {min_lens_overlap} for the {arm}"
            f" fiber (MFD {fiber_mfd:.4g} m)"
        )
        logging.warning(warnings[-1])
    return ranked, warnings


def focal_pairs(catalog: Sequence[float]) -> List[Tuple[float, float]]:
    """Every (collimating, focusing) pair with the longer focal first."""
    focals = sorted(set(float(f) for f in catalog))
    if any(f <= 0 for f in focals):
        raise DomainError(msg=f"focal lengths must be > 0, got {focals}")
    return [(a, b) for a in focals for b in focals if a > b]


@dataclass(frozen=True)
class Arm:
    wavelength: float
    angular_spread: float
    waist: float
    xi: float

    def to_dict(self) -> dict:
        return {
            "wavelength": self.wavelength,
            "angular_spread": self.angular_spread,
            "waist": self.waist,
            "xi": self.xi,
        }


@dataclass(frozen=True)
class DesignReport:
    crystal: str
    length: float
    pump: Arm
    signal: Arm
    idler: Arm
    efficiencies: EfficiencyReport
    spectral_spatial_purity: float
    lens_suggestions: List[LensSuggestion] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    settings: Dict[str, object] = field(default_factory=dict)
    curves: Dict[str, object] = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        predicted = {
            "mu_s": self.efficiencies.mu_s,
            "mu_i": self.efficiencies.mu_i,
            "mu_si": self.efficiencies.mu_si,
            "spectral_spatial_purity": self.spectral_spatial_purity,
        }
        return {
            "crystal": self.crystal,
            "length": self.length,
            "pump": self.pump.to_dict(),
            "signal": self.signal.to_dict(),
            "idler": self.idler.to_dict(),
            "predicted": predicted,
            "lens_suggestions": [s.to_dict() for s in self.lens_suggestions],
            "warnings": list(self.warnings),
            "notes": list(self.notes),
            "settings": dict(self.settings),
        }


def stage(name: str):
    """
    Decorator naming a design stage: package errors raised inside surface
    as StageError carrying the stage name and the cause's exit code.
    """

    def decorate(f):
        @wraps(f)
        def g(*args, **kwargs):
            logging.info("design stage: {}".format(name))
            try:
                return f(*args, **kwargs)
            except StageError:
                raise
            except Error as e:
                raise StageError(
                    msg=f"stage '{name}' failed: {e.msg}", stage=name, cause=e
                ) from e

        return g

    return decorate


@stage("pump")
def _pump_stage(spec, regime, duration, xi_target):
    choice = choose_pump_waist(
        spec.lambda_p, spec.length, xi_target, spec.crystal.cross_section
    )
    return choice, PumpSpec(spec.lambda_p, regime, choice.waist, duration)


@stage("signal")
def _signal_stage(spec, pump, grid, tolerance):
    ss_map = spectral_spatial(spec, pump, "signal", grid)
    axis, spectrum = collinear_spectrum(spec, pump, "signal", grid)
    reference = fwhm(axis.samples, spectrum)
    return ss_map, signal_collection_angle(ss_map, reference, tolerance)


@stage("idler")
def _idler_stage(spec, pump, grid, signal_angle, rule):
    amp = joint_angular(spec, pump, grid)
    return amp, idler_collection_angle(
        amp, signal_angle, spec.lambda_s, spec.lambda_i, rule
    )


@stage("efficiency")
def _efficiency_stage(spec, pump, grid, amp, mode_s, mode_i):
    report, _ = overlap_efficiencies(amp, mode_s, mode_i)
    purity = schmidt_decompose(
        spectral_spatial_amplitude(spec, pump, "signal", grid, mode_s, mode_i)
    ).purity
    return report, purity


@stage("lenses")
def _lens_stage(signal, idler, lens_catalog, fibers):
    pairs = focal_pairs(lens_catalog)
    suggestions, warnings = [], []
    for arm_name, arm, mfd in (
        ("signal", signal, fibers["signal_mfd"]),
        ("idler", idler, fibers["idler_mfd"]),
    ):
        ranked, arm_warnings = lens_suggestion(
            arm.waist, mfd, arm.wavelength, pairs, arm_name
        )
        suggestions.extend(ranked[:_KEEP_SUGGESTIONS])
        warnings.extend(arm_warnings)
    return suggestions, warnings


def pump_divergence_warning(
    pump_angle: float, signal_angle: float
) -> Optional[str]:
    """The pump cone must stay below half the signal collection angle."""
    if pump_angle < signal_angle / 2:
        return None
    return (
        f"pump divergence {pump_angle:.4g} rad is not below half the signal"
        f" collection angle {signal_angle:.4g} rad, lower xi_target"
    )


def _arm(wavelength: float, angle: float, length: float) -> Arm:
    waist = float(waist_from_angle(wavelength, angle))
    return Arm(
        wavelength=wavelength,
        angular_spread=angle,
        waist=waist,
        xi=float(focusing_parameter(wavelength, length, waist)),
    )


def design(
    spec: InteractionSpec,
    regime: str = "pulsed",
    duration: Optional[float] = None,
    xi_target: float = default_xi_target,
    grid: GridSpec = GridSpec(),
    plateau_tolerance: float = default_plateau_tolerance,
    idler_rule: str = "max-symmetric",
    lens_catalog: Optional[Sequence[float]] = None,
    fibers: Optional[Dict[str, float]] = None,
) -> DesignReport:
    """
    Run the design steps on a phasematched interaction.
    :param lens_catalog: focal lengths in m; lens suggestions need fibers
    {"signal_mfd": m, "idler_mfd": m} as well
    :raise StageError naming the failing stage
    """
    choice, pump = _pump_stage(spec, regime, duration, xi_target)
    warnings = list(choice.warnings)
    ss_map, signal_angle = _signal_stage(spec, pump, grid, plateau_tolerance)
    amp, idler_angle = _idler_stage(
        spec, pump, grid, signal_angle, idler_rule
    )
    signal = _arm(spec.lambda_s, signal_angle, spec.length)
    idler = _arm(spec.lambda_i, idler_angle, spec.length)
    mode_s, mode_i = _angular_modes(
        spec.lambda_s, spec.lambda_i, signal_angle, idler_angle
    )
    efficiencies, purity = _efficiency_stage(
        spec, pump, grid, amp, mode_s, mode_i
    )
    divergence = pump_divergence_warning(choice.angular_spread, signal_angle)
    if divergence:
        warnings.append(divergence)
        logging.warning(divergence)
    suggestions = []
    if lens_catalog:
        if not fibers:
            raise StageError(
                msg="lens suggestions need fiber mode field diameters",
                stage="lenses",
            )
        suggestions, lens_warnings = _lens_stage(
            signal, idler, lens_catalog, fibers
        )
        warnings.extend(lens_warnings)
    notes = [
        "align the collection on the exact center wavelengths: signal"
        f" {spec.lambda_s:.6g} m, idler {spec.lambda_i:.6g} m"
    ]
    logging.info(
        "design {}: w_s={:.4g} m w_i={:.4g} m mu_si={:.4f}".format(
            spec.crystal.name, signal.waist, idler.waist, efficiencies.mu_si
        )
    )
    return DesignReport(
        crystal=spec.crystal.name,
        length=spec.length,
        pump=Arm(
            spec.lambda_p, choice.angular_spread, choice.waist, choice.xi
        ),
        signal=signal,
        idler=idler,
        efficiencies=efficiencies,
        spectral_spatial_purity=purity,
        lens_suggestions=suggestions,
        warnings=warnings,
        notes=notes,
        settings={
            "regime": regime,
            "duration": duration,
            "xi_target": xi_target,
            "plateau_tolerance": plateau_tolerance,
            "idler_rule": idler_rule,
            "grid_size": grid.size,
        },
        curves={"signal_spectral_spatial": ss_map, "joint_angular": amp},
    )
