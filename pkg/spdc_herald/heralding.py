"""
Heralding efficiencies: predicted from mode overlaps on a joint angular
amplitude, or reduced from measured count rates.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from spdc_herald.exceptions import DegenerateCouplingError, DomainError
from spdc_herald.globals import coupling_floor, efficiency_warning_threshold
from spdc_herald.joint_amplitude import CollectionMode, JointAmplitude


@dataclass(frozen=True)
class CountRecord:
    """
    Rates in Hz. coincidences_idler_trigger is the coincidence rate of a
    second run whose singles_idler was recorded; it is used for mu_s when
    given, coincidences otherwise.
    """

    coincidences: float
    singles_signal: float
    singles_idler: float
    detector_efficiency_signal: float
    detector_efficiency_idler: float
    transmission_signal: float
    transmission_idler: float
    noise_signal: float = 0.0
    noise_idler: float = 0.0
    coincidences_idler_trigger: Optional[float] = None

    def __post_init__(self):
        rates = {
            "coincidences": self.coincidences,
            "singles_signal": self.singles_signal,
            "singles_idler": self.singles_idler,
            "noise_signal": self.noise_signal,
            "noise_idler": self.noise_idler,
        }
        if self.coincidences_idler_trigger is not None:
            rates["coincidences_idler_trigger"] = (
                self.coincidences_idler_trigger
            )
        for name, value in rates.items():
            if not value >= 0:
                raise DomainError(msg=f"{name} must be >= 0, got {value}")
        for name in (
            "detector_efficiency_signal",
            "detector_efficiency_idler",
            "transmission_signal",
            "transmission_idler",
        ):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise DomainError(msg=f"{name} must be in (0, 1], got {value}")
        if self.net_signal <= 0 or self.net_idler <= 0:
            raise DomainError(
                msg="noise subtracted singles must be > 0, got"
                f" {self.net_signal} and {self.net_idler} Hz"
            )
        if self.coincidences > self.net_signal or (
            self.signal_run_coincidences > self.net_idler
        ):
            raise DomainError(
                msg="coincidences exceed the noise subtracted singles"
            )

    @property
    def net_signal(self) -> float:
        return self.singles_signal - self.noise_signal

    @property
    def net_idler(self) -> float:
        return self.singles_idler - self.noise_idler

    @property
    def signal_run_coincidences(self) -> float:
        if self.coincidences_idler_trigger is None:
            return self.coincidences
        return self.coincidences_idler_trigger


@dataclass(frozen=True)
class EfficiencyReport:
    mu_s: float
    mu_i: float
    mu_si: float
    warnings: List[str] = field(default_factory=list, compare=False)

    @property
    def flagged(self) -> bool:
        return bool(self.warnings)

    def to_dict(self) -> dict:
        return {
            "mu_s": self.mu_s,
            "mu_i": self.mu_i,
            "mu_si": self.mu_si,
            "flagged": self.flagged,
            "warnings": list(self.warnings),
        }


def counts_to_efficiency(rec: CountRecord) -> EfficiencyReport:
    """
    mu_s = C / ((S_i - noise_i) eta_s t_s), mu_i = C / ((S_s - noise_s)
    eta_i t_i). Values above the warning threshold are flagged, not clamped.
    """
    mu_s = rec.signal_run_coincidences / (
        rec.net_idler
        * rec.detector_efficiency_signal
        * rec.transmission_signal
    )
    mu_i = rec.coincidences / (
        rec.net_signal * rec.detector_efficiency_idler * rec.transmission_idler
    )
    warnings = []
    for name, mu in (("mu_s", mu_s), ("mu_i", mu_i)):
        if mu > efficiency_warning_threshold:
            warnings.append(
                f"{name} = {mu:.4f} above {efficiency_warning_threshold},"
                " check detector efficiency and transmission calibration"
            )
            logging.warning(warnings[-1])
    return EfficiencyReport(mu_s, mu_i, float(np.sqrt(mu_s * mu_i)), warnings)


def overlap_efficiencies(
    amp: JointAmplitude, mode_s: CollectionMode, mode_i: CollectionMode
) -> Tuple[EfficiencyReport, Tuple[float, float, float]]:
    """
    Project a joint angular amplitude on the collection modes.
    Returns the report and (coincidence probability, R_s, R_i), where R_s
    is the probability of collecting the signal whatever the idler does.
    :raise DegenerateCouplingError when a mode is orthogonal to the
    amplitude
    """
    if not (amp.axis_x.is_angle and amp.axis_y.is_angle):
        raise DomainError(
            msg=f"overlap needs an angular amplitude, got axes"
            f" {amp.axis_x.tag}, {amp.axis_y.tag}"
        )
    u_s = mode_s.sample(amp.axis_x.samples)
    u_i = mode_i.sample(amp.axis_y.samples)
    phi = amp.values / np.sqrt(np.sum(np.abs(amp.values) ** 2))
    # collected signal, conditional idler amplitude and vice versa
    idler_given_signal = u_s @ phi
    signal_given_idler = phi @ u_i
    rate_s = float(np.sum(np.abs(idler_given_signal) ** 2))
    rate_i = float(np.sum(np.abs(signal_given_idler) ** 2))
    for arm, rate in (("signal", rate_s), ("idler", rate_i)):
        if rate < coupling_floor:
            raise DegenerateCouplingError(
                msg=f"{arm} collection mode is orthogonal to the amplitude"
                f" (rate {rate:.3g})",
                arm=arm,
            )
    coincidence = float(np.abs(idler_given_signal @ u_i) ** 2)
    mu_s = coincidence / rate_i
    mu_i = coincidence / rate_s
    mu_si = coincidence / np.sqrt(rate_s * rate_i)
    logging.info(
        "overlap efficiencies mu_s={:.4f} mu_i={:.4f} mu_si={:.4f}".format(
            mu_s, mu_i, mu_si
        )
    )
    return EfficiencyReport(mu_s, mu_i, float(mu_si)), (
        coincidence,
        rate_s,
        rate_i,
    )
