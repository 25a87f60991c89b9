"""
Schmidt decomposition of discretized joint amplitudes, and the purity
scans over pump waist and collection angle.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from spdc_herald.exceptions import DomainError
from spdc_herald.globals import default_knee_fraction
from spdc_herald.joint_amplitude import (
    CollectionMode,
    GridSpec,
    IntensityMap,
    JointAmplitude,
    PumpSpec,
    apply_collection,
    joint_angular,
    resolve_windows,
    spectral_spatial,
    spectral_spatial_amplitude,
)
from spdc_herald.phasematching import InteractionSpec

Decomposable = Union[JointAmplitude, IntensityMap, np.ndarray]


@dataclass(frozen=True, eq=False)
class SchmidtSpectrum:
    coefficients: np.ndarray  # nonincreasing, sum 1
    purity: float
    schmidt_number: float
    from_intensity: bool = False

    def to_dict(self, keep: int = 10) -> dict:
        return {
            "coefficients": [float(c) for c in self.coefficients[:keep]],
            "purity": self.purity,
            "schmidt_number": self.schmidt_number,
            "from_intensity": self.from_intensity,
        }


def _matrix(amp: Decomposable) -> Tuple[np.ndarray, bool]:
    if isinstance(amp, JointAmplitude):
        return amp.values, False
    if isinstance(amp, IntensityMap):
        # intensity maps are decomposed as the real amplitude sqrt(I)
        return np.sqrt(np.clip(amp.values, 0, None)), True
    m = np.asarray(amp)
    if m.ndim != 2:
        raise DomainError(msg=f"expected a 2-D grid, got shape {m.shape}")
    return m, False


def schmidt_decompose(amp: Decomposable) -> SchmidtSpectrum:
    """
    lambda_n = s_n^2 / sum s^2 from the singular values of the grid.
    :raise DomainError on a zero or non finite grid
    """
    m, from_intensity = _matrix(amp)
    if not np.all(np.isfinite(m)):
        raise DomainError(msg="grid holds non finite values")
    s = linalg.svd(m, compute_uv=False, lapack_driver="gesdd")
    total = np.sum(s**2)
    if not total > 0:
        raise DomainError(msg="cannot decompose a zero grid")
    coefficients = np.sort(s**2 / total)[::-1]
    purity = float(np.sum(coefficients**2))
    return SchmidtSpectrum(
        coefficients=coefficients,
        purity=purity,
        schmidt_number=1.0 / purity,
        from_intensity=from_intensity,
    )


def brute_force_purity(amp: Decomposable) -> float:
    """Tr(rho^2) of rho = M M^dagger / Tr(M M^dagger)."""
    m, _ = _matrix(amp)
    rho = m @ m.conj().T
    trace = np.trace(rho).real
    if not trace > 0:
        raise DomainError(msg="cannot decompose a zero grid")
    rho = rho / trace
    return float(np.sum(np.abs(rho) ** 2))


def purity_vs_pump_waist(
    spec: InteractionSpec,
    pump: PumpSpec,
    waists: Sequence[float],
    grid: GridSpec = GridSpec(),
) -> List[Tuple[float, float]]:
    """
    Purity of joint_angular for each pump waist, in input order. All points
    share the angle window of the smallest waist.
    """
    waists = [float(w) for w in waists]
    if not waists:
        raise DomainError(msg="empty pump waist list")
    if any(w <= 0 for w in waists):
        raise DomainError(msg=f"pump waists must be > 0, got {waists}")
    if any(b <= a for a, b in zip(waists, waists[1:])):
        raise DomainError(msg=f"pump waists must increase, got {waists}")
    if grid.q_window is None:
        _, q_window = resolve_windows(spec, pump.with_waist(waists[0]), grid)
        grid = GridSpec(
            size=grid.size,
            window_factor=grid.window_factor,
            pump_samples=grid.pump_samples,
            frequency_window=grid.frequency_window,
            q_window=q_window,
        )
    out = []
    for w in waists:
        purity = schmidt_decompose(
            joint_angular(spec, pump.with_waist(w), grid)
        ).purity
        logging.info("w_p={:.4g} m purity={:.6f}".format(w, purity))
        out.append((w, purity))
    return out


def purity_vs_collection(
    spec: InteractionSpec,
    pump: PumpSpec,
    angles: Sequence[float],
    idler_ratio: Optional[float] = None,
    grid: GridSpec = GridSpec(),
    path: str = "amplitude",
) -> List[Tuple[float, float]]:
    """
    Purity of the collected signal spectral-spatial function for each signal
    collection angle. With idler_ratio None only the signal is collected;
    otherwise the partner is filtered at idler_ratio times that angle.
    path "amplitude" decomposes the conjugate slice amplitude, "intensity"
    the square root of the traced map.
    """
    angles = [float(a) for a in angles]
    if not angles:
        raise DomainError(msg="empty collection angle list")
    if any(a <= 0 for a in angles):
        raise DomainError(msg=f"collection angles must be > 0, got {angles}")
    if idler_ratio is not None and not idler_ratio > 0:
        raise DomainError(msg=f"idler_ratio must be > 0, got {idler_ratio}")
    if path not in ("amplitude", "intensity"):
        raise DomainError(msg=f"unknown purity path '{path}'")
    build = (
        spectral_spatial_amplitude if path == "amplitude" else spectral_spatial
    )
    # signal-only amplitude scans filter one unfiltered grid
    base = None
    if path == "amplitude" and idler_ratio is None:
        base = spectral_spatial_amplitude(spec, pump, "signal", grid)
    out = []
    for angle in angles:
        mode_s = CollectionMode(spec.lambda_s, angle)
        if base is not None:
            collected = apply_collection(base, mode_s)
        else:
            mode_i = (
                None
                if idler_ratio is None
                else CollectionMode(spec.lambda_i, idler_ratio * angle)
            )
            collected = build(spec, pump, "signal", grid, mode_s, mode_i)
        purity = schmidt_decompose(collected).purity
        logging.info(
            "dtheta_s={:.4g} rad purity={:.6f}".format(angle, purity)
        )
        out.append((angle, purity))
    return out


def knee_angle(
    scan: Sequence[Tuple[float, float]],
    fraction: float = default_knee_fraction,
) -> Optional[float]:
    """
    First abscissa where the purity falls below fraction times its maximum,
    linearly interpolated; None if it never does.
    """
    if not scan:
        raise DomainError(msg="empty scan")
    x = np.array([p[0] for p in scan], dtype=float)
    y = np.array([p[1] for p in scan], dtype=float)
    level = fraction * np.max(y)
    below = np.nonzero(y < level)[0]
    if below.size == 0:
        return None
    i = int(below[0])
    if i == 0:
        return float(x[0])
    return float(np.interp(level, [y[i], y[i - 1]], [x[i], x[i - 1]]))
