"""
One transverse dimension, plane wave pump: the pair is perfectly
anticorrelated in momentum, k_s + k_i = k_p. Projecting one photon on a
gaussian fiber mode phi(k) ~ exp(-k^2 sigma^2) heralds its partner in

    psi(x) ~ exp(i k_p x) exp(-x^2 / (4 sigma^2)).
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import fft, integrate, sparse

from spdc_herald.exceptions import DomainError
from spdc_herald.globals import default_toy_samples, default_toy_span

POSITION = "position"
MOMENTUM = "momentum"

_MIN_SPAN = 6.0  # grid half-width in units of sigma
_HERALD_SPAN = 8.0  # momentum integration half-width in units of 1/sigma
_CHUNK = 512


@dataclass(frozen=True, eq=False)
class Wavefunction1D:
    samples: np.ndarray  # complex, unit discrete norm
    grid: np.ndarray  # x in m or k in rad/m
    domain: str = POSITION

    def __post_init__(self):
        if self.domain not in (POSITION, MOMENTUM):
            raise DomainError(msg=f"unknown domain '{self.domain}'")
        if self.samples.shape != self.grid.shape:
            raise DomainError(msg="samples and grid differ in shape")
        norm = np.sum(np.abs(self.samples) ** 2)
        if abs(norm - 1) > 1e-9:
            raise DomainError(msg=f"wavefunction norm {norm} is not 1")

    @classmethod
    def normalized(
        cls, samples, grid, domain: str = POSITION
    ) -> "Wavefunction1D":
        samples = np.asarray(samples, dtype=complex)
        norm = np.sqrt(np.sum(np.abs(samples) ** 2))
        if not norm > 0:
            raise DomainError(msg="wavefunction vanishes on the grid")
        return cls(samples / norm, np.asarray(grid, dtype=float), domain)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2


def position_grid(
    sigma: float,
    samples: int = default_toy_samples,
    span: float = default_toy_span,
) -> np.ndarray:
    """x = (n - N/2) dx over +-span sigma."""
    if not sigma > 0:
        raise DomainError(msg=f"sigma must be > 0, got {sigma}")
    if span < _MIN_SPAN:
        raise DomainError(
            msg=f"grid spans +-{span} sigma, at least +-{_MIN_SPAN} needed"
        )
    if samples < 16 or samples % 2:
        raise DomainError(msg=f"samples must be even and >= 16, got {samples}")
    dx = 2 * span * sigma / samples
    return (np.arange(samples) - samples // 2) * dx


def _momentum_grid(x: np.ndarray) -> np.ndarray:
    dx = x[1] - x[0]
    return 2 * np.pi * fft.fftshift(fft.fftfreq(x.size, dx))


def _position_grid_from(k: np.ndarray) -> np.ndarray:
    dk = k[1] - k[0]
    dx = 2 * np.pi / (k.size * dk)
    return (np.arange(k.size) - k.size // 2) * dx


def to_momentum(psi: Wavefunction1D) -> Wavefunction1D:
    if psi.domain != POSITION:
        raise DomainError(msg="expected a position wavefunction")
    phi = fft.fftshift(fft.fft(fft.ifftshift(psi.samples)))
    return Wavefunction1D.normalized(phi, _momentum_grid(psi.grid), MOMENTUM)


def to_position(phi: Wavefunction1D) -> Wavefunction1D:
    if phi.domain != MOMENTUM:
        raise DomainError(msg="expected a momentum wavefunction")
    psi = fft.fftshift(fft.ifft(fft.ifftshift(phi.samples)))
    return Wavefunction1D.normalized(
        psi, _position_grid_from(phi.grid), POSITION
    )


def gaussian_mode(
    sigma: float,
    samples: int = default_toy_samples,
    span: float = default_toy_span,
) -> Tuple[Wavefunction1D, Wavefunction1D]:
    """
    Fiber mode exp(-x^2 / (4 sigma^2)) and its analytic momentum form
    exp(-k^2 sigma^2), on conjugate grids.
    """
    x = position_grid(sigma, samples, span)
    k = _momentum_grid(x)
    return (
        Wavefunction1D.normalized(np.exp(-(x**2) / (4 * sigma**2)), x),
        Wavefunction1D.normalized(np.exp(-(k**2) * sigma**2), k, MOMENTUM),
    )


def _check_nyquist(k_p: float, x: np.ndarray):
    dx = x[1] - x[0]
    if abs(k_p) >= np.pi / dx:
        raise DomainError(
            msg=f"k_p = {k_p} rad/m beyond the grid Nyquist limit"
            f" {np.pi / dx} rad/m, refine the grid"
        )


def _herald(k_p: float, sigma: float, x: np.ndarray) -> np.ndarray:
    # psi(x) = int dk <x|k> <phi|k_p - k>, trapezoid rule around k_p
    _check_nyquist(k_p, x)
    half = _HERALD_SPAN / sigma
    n = 2 * int(np.ceil(_HERALD_SPAN * 64)) + 1
    k = np.linspace(k_p - half, k_p + half, n)
    mode = np.exp(-((k_p - k) ** 2) * sigma**2)
    out = np.empty(x.size, dtype=complex)
    for start in range(0, x.size, _CHUNK):
        chunk = x[start : start + _CHUNK, None]  # noqa: E203
        out[start : start + _CHUNK] = integrate.trapezoid(  # noqa: E203
            np.exp(1j * k[None, :] * chunk) * mode[None, :], k, axis=1
        )
    return out


def two_photon_amplitude(k_p: float, x: np.ndarray) -> sparse.csr_matrix:
    """
    Pair amplitude over (x_s, x_i) for a plane wave pump: momentum
    conservation k_s + k_i = k_p puts both photons at the same point,
    exp(i k_p x) on the diagonal.
    """
    return sparse.diags(np.exp(1j * k_p * np.asarray(x)), format="csr")


def herald_signal(
    k_p: float,
    sigma: float,
    samples: int = default_toy_samples,
    span: float = default_toy_span,
) -> Wavefunction1D:
    """Signal state heralded by detecting the idler in the fiber mode."""
    x = position_grid(sigma, samples, span)
    psi = Wavefunction1D.normalized(_herald(k_p, sigma, x), x)
    logging.debug(
        "heralded signal k_p={:.4g} rad/m sigma={:.4g} m".format(k_p, sigma)
    )
    return psi


def herald_idler(
    k_p: float,
    sigma: float,
    samples: int = default_toy_samples,
    span: float = default_toy_span,
) -> Wavefunction1D:
    """
    Idler state heralded by detecting the signal in the fiber mode: the
    signal arm of the pair amplitude projected on the mode.
    """
    x = position_grid(sigma, samples, span)
    _check_nyquist(k_p, x)
    mode, _ = gaussian_mode(sigma, samples, span)
    pair = two_photon_amplitude(k_p, x)
    psi = Wavefunction1D.normalized(pair.T @ np.conj(mode.samples), x)
    logging.debug(
        "heralded idler k_p={:.4g} rad/m sigma={:.4g} m".format(k_p, sigma)
    )
    return psi


def closed_form_herald(
    k_p: float,
    sigma: float,
    samples: int = default_toy_samples,
    span: float = default_toy_span,
) -> Wavefunction1D:
    x = position_grid(sigma, samples, span)
    return Wavefunction1D.normalized(
        np.exp(1j * k_p * x) * np.exp(-(x**2) / (4 * sigma**2)), x
    )


def fidelity(a: Wavefunction1D, b: Wavefunction1D) -> float:
    """|<a|b>|^2 of two unit wavefunctions on the same grid."""
    if a.domain != b.domain or not (
        a.grid.shape == b.grid.shape
        and np.allclose(a.grid, b.grid, rtol=1e-9, atol=0)
    ):
        raise DomainError(msg="wavefunctions live on different grids")
    return float(np.abs(np.vdot(a.samples, b.samples)) ** 2)


def intensity_width(psi: Wavefunction1D) -> float:
    """Standard deviation of |psi|^2 over the grid."""
    p = psi.intensity
    mean = np.sum(p * psi.grid)
    return float(np.sqrt(np.sum(p * (psi.grid - mean) ** 2)))


def phase_gradient(psi: Wavefunction1D, half_window: float) -> float:
    """Mean d(arg psi)/dx over |x - peak| <= half_window."""
    x = psi.grid
    peak = x[np.argmax(psi.intensity)]
    inside = np.abs(x - peak) <= half_window
    if np.count_nonzero(inside) < 2:
        raise DomainError(msg="phase window holds fewer than 2 samples")
    phase = np.unwrap(np.angle(psi.samples[inside]))
    return float(np.mean(np.gradient(phase, x[inside])))
