"""Source physics for a type-II quasi-phase-matched KTP pair source.

This module owns the physical model: dispersion-based phase mismatch,
transform-limited pump envelopes, the engineered two-lobe phase-matching
function (both its closed form and the Fourier transform of an explicit
poling pattern), joint-spectral-amplitude assembly on a frequency grid,
temporal walk-off through the poled crystal plus its compensator, and the
small power-bookkeeping helpers (peak power, normalized coupling).

Conventions used throughout:

* angular frequencies in rad/s, wavelengths in metres, wavevectors in 1/m;
* the signal photon is H-polarized and rides the crystal y axis, the idler
  is V-polarized on the z axis, and the pump is y-polarized (d24 coupling);
* JSA matrices are indexed ``[signal, idler]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import sellmeier
from .errors import ConfigError

__all__ = [
    "C_LIGHT",
    "TWO_PI_C",
    "DESIGN_WIDTH_SCALE",
    "PulseShape",
    "PmfMode",
    "DkMapping",
    "PumpSpec",
    "CrystalSpec",
    "PolingPattern",
    "uniform_grating",
    "FrequencyGrid",
    "JsaGrid",
    "wavevector",
    "delta_k",
    "pump_envelope",
    "pmf_analytic",
    "pmf_from_domains",
    "compute_jsa",
    "design_lobe_wavelengths",
    "temporal_walkoff",
    "transform_limited_fwhm",
    "peak_power",
    "coupling_coefficient",
]

C_LIGHT = 299_792_458.0
TWO_PI_C = 2.0 * math.pi * C_LIGHT

# Width multiplier applied to pmf_sigma when building the JSA in design
# mode. The nominal sigma parameterizes the poling-design target; the
# spectral response actually realized by a finite crystal is broader (a
# 4 mm aperture cannot produce Delta-k features much narrower than its own
# Fourier width of roughly 800 1/m, while the nominal sigma is 333 1/m).
# The value is calibrated once so that the default source produces two
# round lobes with Schmidt purity near 0.5, and is deliberately not a
# per-run knob.
DESIGN_WIDTH_SCALE = 6.0

_FWHM_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))


class PulseShape(enum.Enum):
    SECH2 = "sech2"
    GAUSSIAN = "gaussian"


class PmfMode(enum.Enum):
    ANALYTIC = "analytic"
    FROM_DOMAINS = "from_domains"


class DkMapping(enum.Enum):
    """How the phase mismatch feeds the analytic phase-matching function.

    DESIGN subtracts the degenerate-point mismatch so the two engineered
    lobes land symmetrically at the designed +-a, and widens sigma by
    DESIGN_WIDTH_SCALE (see that constant). RAW uses the physical mismatch
    and sigma verbatim.
    """

    DESIGN = "design"
    RAW = "raw"


@dataclass(frozen=True)
class PumpSpec:
    """Pulsed pump field. Powers in W, lengths in m, rate in Hz."""

    center_wavelength: float = 780e-9
    bandwidth_fwhm: float = 7e-9
    pulse_shape: PulseShape = PulseShape.SECH2
    repetition_rate: float = 76e6
    average_power: float = 0.620

    def __post_init__(self) -> None:
        if self.center_wavelength <= 0:
            raise ConfigError("pump center_wavelength must be positive")
        if self.bandwidth_fwhm <= 0:
            raise ConfigError("pump bandwidth_fwhm must be positive")
        if self.repetition_rate <= 0:
            raise ConfigError("pump repetition_rate must be positive")
        if self.average_power < 0:
            raise ConfigError("pump average_power must be non-negative")
        if not isinstance(self.pulse_shape, PulseShape):
            raise ConfigError(f"unknown pulse shape {self.pulse_shape!r}")

    @property
    def center_omega(self) -> float:
        return TWO_PI_C / self.center_wavelength

    @property
    def bandwidth_omega(self) -> float:
        """FWHM of the spectral intensity |P|^2 in rad/s."""
        return TWO_PI_C * self.bandwidth_fwhm / self.center_wavelength**2


@dataclass(frozen=True)
class CrystalSpec:
    """Poled KTP crystal plus its perpendicular compensation crystal."""

    length: float = 4e-3
    poling_period: float = 46e-6
    pmf_sigma: float = 333.0
    pmf_a: float = 2700.0
    temperature: float = 23.0
    compensation_length: float = 2e-3

    def __post_init__(self) -> None:
        if self.length <= 0:
            raise ConfigError("crystal length must be positive")
        if self.poling_period <= 0:
            raise ConfigError("poling_period must be positive")
        if self.pmf_sigma <= 0:
            raise ConfigError("pmf_sigma must be positive")
        if self.compensation_length < 0:
            raise ConfigError("compensation_length must be non-negative")


@dataclass(frozen=True)
class PolingPattern:
    """Sign pattern of chi(2) along the crystal.

    ``boundaries`` lists the z positions (m) where the sign flips, strictly
    increasing within [0, length]; ``first_sign`` is the sign of the first
    domain. A pattern with no boundaries is a single uniform domain.
    """

    length: float
    boundaries: tuple[float, ...] = ()
    first_sign: int = 1

    def __post_init__(self) -> None:
        if self.length <= 0:
            raise ConfigError("poling pattern length must be positive")
        if self.first_sign not in (1, -1):
            raise ConfigError("first_sign must be +1 or -1")
        bounds = tuple(float(b) for b in self.boundaries)
        object.__setattr__(self, "boundaries", bounds)
        if any(b < 0 or b > self.length for b in bounds):
            raise ConfigError("domain boundaries must lie within [0, length]")
        if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
            raise ConfigError("domain boundaries must be strictly increasing")


def uniform_grating(length: float, period: float, first_sign: int = 1) -> PolingPattern:
    """Pattern with sign flips every half period, the standard QPM grating."""
    if period <= 0:
        raise ConfigError("grating period must be positive")
    boundaries = np.arange(period / 2.0, length, period / 2.0)
    return PolingPattern(length=length, boundaries=tuple(boundaries),
                         first_sign=first_sign)


def _cell_widths(axis: np.ndarray) -> np.ndarray:
    """Midpoint-rule cell widths; exact for a uniform axis, sensible otherwise."""
    edges = np.empty(axis.size + 1)
    edges[1:-1] = 0.5 * (axis[1:] + axis[:-1])
    edges[0] = axis[0] - 0.5 * (axis[1] - axis[0])
    edges[-1] = axis[-1] + 0.5 * (axis[-1] - axis[-2])
    return np.diff(edges)


@dataclass(frozen=True)
class FrequencyGrid:
    """Rectangular (signal x idler) grid of angular frequencies, ascending."""

    signal_axis: np.ndarray
    idler_axis: np.ndarray

    def __post_init__(self) -> None:
        for name in ("signal_axis", "idler_axis"):
            axis = np.asarray(getattr(self, name), dtype=float)
            if axis.ndim != 1 or axis.size < 2:
                raise ConfigError(f"{name} must be a 1-D array with >= 2 samples")
            if np.any(np.diff(axis) <= 0):
                raise ConfigError(f"{name} must be strictly increasing")
            if axis[0] <= 0:
                raise ConfigError(f"{name} must contain positive frequencies")
            object.__setattr__(self, name, axis)

    @classmethod
    def wavelength_window(cls, lambda_min: float, lambda_max: float,
                          samples: int) -> "FrequencyGrid":
        """Identical signal/idler axes, uniform in angular frequency,
        spanning [lambda_min, lambda_max]."""
        if not lambda_min < lambda_max:
            raise ConfigError("need lambda_min < lambda_max")
        if samples < 2:
            raise ConfigError("need at least 2 samples per axis")
        axis = np.linspace(TWO_PI_C / lambda_max, TWO_PI_C / lambda_min, samples)
        return cls(signal_axis=axis, idler_axis=axis.copy())

    @property
    def signal_weights(self) -> np.ndarray:
        return _cell_widths(self.signal_axis)

    @property
    def idler_weights(self) -> np.ndarray:
        return _cell_widths(self.idler_axis)

    @property
    def axes_identical(self) -> bool:
        return (self.signal_axis.size == self.idler_axis.size
                and bool(np.array_equal(self.signal_axis, self.idler_axis)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.signal_axis.size, self.idler_axis.size)


@dataclass(frozen=True)
class JsaGrid:
    """Complex joint spectral amplitude sampled on a FrequencyGrid."""

    grid: FrequencyGrid
    amplitude: np.ndarray
    normalized: bool = False

    def __post_init__(self) -> None:
        amp = np.asarray(self.amplitude, dtype=complex)
        if amp.shape != self.grid.shape:
            raise ConfigError(
                f"amplitude shape {amp.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(amp.view(float))):
            raise ConfigError("JSA amplitude contains non-finite entries")
        object.__setattr__(self, "amplitude", amp)
        if self.normalized and abs(self.norm_squared - 1.0) > 1e-9:
            raise ConfigError("JSA flagged normalized but norm differs from 1")

    @property
    def norm_squared(self) -> float:
        w = np.outer(self.grid.signal_weights, self.grid.idler_weights)
        return float(np.sum(np.abs(self.amplitude) ** 2 * w))

    def normalized_copy(self) -> "JsaGrid":
        n2 = self.norm_squared
        if n2 <= 0:
            raise ConfigError("cannot normalize an all-zero JSA")
        return JsaGrid(grid=self.grid, amplitude=self.amplitude / math.sqrt(n2),
                       normalized=True)


def wavevector(omega, axis: str, temperature: float = 23.0):
    """k = n(omega) * omega / c along a principal axis."""
    omega = np.asarray(omega, dtype=float)
    lam = TWO_PI_C / omega
    n = sellmeier.refractive_index(lam, axis, temperature)
    return n * omega / C_LIGHT


def delta_k(omega_s, omega_i, crystal: CrystalSpec,
            axes: tuple[str, str, str] = ("y", "y", "z")):
    """Quasi-phase-matched wavevector mismatch in 1/m.

    ``axes`` assigns (pump, signal, idler) to crystal principal axes; the
    default is the type-II d24 arrangement (pump and signal on y, idler
    on z). With this dispersion data k_p < k_s + k_i around degeneracy, so
    the grating vector enters with a positive sign to close the momentum
    balance; the degenerate mismatch then sits between the engineered
    lobes at +-a.
    """
    pump_axis, signal_axis, idler_axis = axes
    omega_s = np.asarray(omega_s, dtype=float)
    omega_i = np.asarray(omega_i, dtype=float)
    t = crystal.temperature
    k_p = wavevector(omega_s + omega_i, pump_axis, t)
    k_s = wavevector(omega_s, signal_axis, t)
    k_i = wavevector(omega_i, idler_axis, t)
    return k_p - k_s - k_i + 2.0 * math.pi / crystal.poling_period


def pump_envelope(omega_sum, pump: PumpSpec):
    """Real, transform-limited pump spectral amplitude, peak value 1.

    The FWHM of the spectral intensity |P|^2 equals the configured
    bandwidth converted to angular frequency.
    """
    detune = np.asarray(omega_sum, dtype=float) - pump.center_omega
    dw = pump.bandwidth_omega
    if pump.pulse_shape is PulseShape.GAUSSIAN:
        sigma_int = dw / _FWHM_SIGMA
        return np.exp(-(detune**2) / (4.0 * sigma_int**2))
    b = 2.0 * math.acosh(math.sqrt(2.0)) / dw
    return 1.0 / np.cosh(b * detune)


def pmf_analytic(dk, sigma: float, a: float):
    """Engineered two-lobe phase-matching amplitude.

    Difference of two Gaussians centered at +-a with width sigma and a
    1/sqrt(2 pi sigma) prefactor; odd in dk, so the lobes carry opposite
    signs. The prefactor convention is kept as-is since downstream JSAs
    are renormalized and only the shape matters.
    """
    if sigma <= 0:
        raise ConfigError("pmf sigma must be positive")
    dk = np.asarray(dk, dtype=float)
    pref = 1.0 / math.sqrt(2.0 * math.pi * sigma)
    return pref * (np.exp(-((dk - a) ** 2) / (2.0 * sigma**2))
                   - np.exp(-((dk + a) ** 2) / (2.0 * sigma**2)))


def pmf_from_domains(pattern: PolingPattern, dk_without_qpm):
    """Phase-matching amplitude as the Fourier transform of a poling pattern.

    Phi(dk) = (1/L) sum_j s_j * integral_{z_j}^{z_{j+1}} exp(i dk z) dz with
    alternating domain signs. ``dk_without_qpm`` is the bare mismatch
    k_p - k_s - k_i: the grating momentum lives in the pattern itself. For
    a uniform grating of period Lambda, |Phi| peaks near |dk| = 2 pi/Lambda
    with value about 2/pi and sinc-like sidelobes of null spacing 2 pi/L.
    """
    dk = np.asarray(dk_without_qpm, dtype=float)
    scalar = dk.ndim == 0
    dk = np.atleast_1d(dk)

    z = np.concatenate(([0.0], pattern.boundaries, [pattern.length]))
    near_zero = np.abs(dk) * pattern.length < 1e-9
    dk_safe = np.where(near_zero, 1.0, dk)

    total = np.zeros(dk.shape, dtype=complex)
    prev = np.exp(1j * dk * z[0])
    sign = pattern.first_sign
    for j in range(z.size - 1):
        cur = np.exp(1j * dk * z[j + 1])
        segment = np.where(near_zero, z[j + 1] - z[j], (cur - prev) / (1j * dk_safe))
        total += sign * segment
        prev = cur
        sign = -sign
    total /= pattern.length
    return complex(total[0]) if scalar else total


def _lobe_slopes(crystal: CrystalSpec, pump: PumpSpec) -> tuple[float, float]:
    """|d(delta_k)/d(omega)| along each grid axis at the degenerate point."""
    lam_p = pump.center_wavelength
    lam_d = 2.0 * lam_p
    t = crystal.temperature
    ng_p = sellmeier.group_index(lam_p, "y", t)
    ng_s = sellmeier.group_index(lam_d, "y", t)
    ng_i = sellmeier.group_index(lam_d, "z", t)
    return abs(ng_p - ng_s) / C_LIGHT, abs(ng_p - ng_i) / C_LIGHT


def compute_jsa(grid: FrequencyGrid, crystal: CrystalSpec, pump: PumpSpec,
                pmf_mode: PmfMode = PmfMode.ANALYTIC,
                dk_mapping: DkMapping = DkMapping.DESIGN,
                pattern: PolingPattern | None = None,
                min_samples_per_fwhm: int = 8) -> JsaGrid:
    """Assemble and normalize the joint spectral amplitude on ``grid``.

    f(ws, wi) = P(ws + wi) * Phi(nu), where nu is delta_k mapped per
    ``dk_mapping`` for the analytic PMF, or the bare mismatch for a poling
    pattern (FROM_DOMAINS always works in physical coordinates; ``pattern``
    defaults to the uniform grating implied by the crystal). The grid is
    rejected if the narrowest expected spectral feature (pump bandwidth or
    PMF lobe projected onto an axis) would see fewer than
    ``min_samples_per_fwhm`` samples.
    """
    ws = grid.signal_axis[:, np.newaxis]
    wi = grid.idler_axis[np.newaxis, :]

    if pmf_mode is PmfMode.ANALYTIC:
        if dk_mapping is DkMapping.DESIGN:
            sigma_eff = crystal.pmf_sigma * DESIGN_WIDTH_SCALE
        else:
            sigma_eff = crystal.pmf_sigma
        pmf_fwhm = _FWHM_SIGMA * sigma_eff
    elif pmf_mode is PmfMode.FROM_DOMAINS:
        if pattern is None:
            pattern = uniform_grating(crystal.length, crystal.poling_period)
        pmf_fwhm = 5.566 / pattern.length
    else:
        raise ConfigError(f"unknown pmf mode {pmf_mode!r}")

    slope_s, slope_i = _lobe_slopes(crystal, pump)
    for name, axis, slope in (("signal", grid.signal_axis, slope_s),
                              ("idler", grid.idler_axis, slope_i)):
        narrow = min(pump.bandwidth_omega, pmf_fwhm / slope)
        step = float(np.max(np.diff(axis)))
        got = narrow / step
        if got < min_samples_per_fwhm:
            need = math.ceil((axis[-1] - axis[0]) / narrow * min_samples_per_fwhm) + 1
            raise ConfigError(
                f"grid too coarse on the {name} axis: {got:.1f} samples per "
                f"narrowest spectral FWHM, need >= {min_samples_per_fwhm} "
                f"(use at least {need} samples over this window)"
            )

    if pmf_mode is PmfMode.ANALYTIC:
        dk = delta_k(ws, wi, crystal)
        if dk_mapping is DkMapping.DESIGN:
            w0 = pump.center_omega / 2.0
            dk = dk - float(delta_k(w0, w0, crystal))
        phi = pmf_analytic(dk, sigma_eff, crystal.pmf_a)
    else:
        bare = delta_k(ws, wi, crystal) - 2.0 * math.pi / crystal.poling_period
        phi = pmf_from_domains(pattern, bare)

    amplitude = pump_envelope(ws + wi, pump) * phi
    return JsaGrid(grid=grid, amplitude=amplitude).normalized_copy()


def design_lobe_wavelengths(crystal: CrystalSpec, pump: PumpSpec,
                            window: tuple[float, float] = (1500e-9, 1620e-9)
                            ) -> tuple[float, float]:
    """Signal wavelengths where the design-mode mismatch hits -a and +a.

    Solved along the energy-conservation anti-diagonal (omega_i fixed by
    the pump center), which is where the JSA lobes actually sit. Returns
    (shorter, longer) wavelength in metres.
    """
    wp0 = pump.center_omega
    w0 = wp0 / 2.0
    dk0 = float(delta_k(w0, w0, crystal))

    def nu(lam_s: float) -> float:
        ws = TWO_PI_C / lam_s
        return float(delta_k(ws, wp0 - ws, crystal)) - dk0

    lo, hi = window
    a = crystal.pmf_a
    lam_deg = TWO_PI_C / w0
    lam_plus = brentq(lambda l: nu(l) - a, lo, lam_deg)
    lam_minus = brentq(lambda l: nu(l) + a, lam_deg, hi)
    return min(lam_plus, lam_minus), max(lam_plus, lam_minus)


def temporal_walkoff(crystal: CrystalSpec, wavelength_h: float,
                     wavelength_v: float,
                     group_index_fn: Callable[[float, str], float] | None = None
                     ) -> float:
    """Arrival-time difference t_V - t_H after crystal plus compensator, in s.

    Pairs are created on average at the crystal midpoint, so H (y axis) and
    V (z axis) photons see L/2 of the poled crystal; the compensation
    crystal is rotated 90 degrees, swapping the axes each photon rides.
    ``group_index_fn(wavelength, axis)`` may be injected for testing.
    """
    if group_index_fn is None:
        def group_index_fn(lam: float, axis: str) -> float:
            return sellmeier.group_index(lam, axis, crystal.temperature)

    half = crystal.length / 2.0
    comp = crystal.compensation_length
    poled = half * (group_index_fn(wavelength_v, "z")
                    - group_index_fn(wavelength_h, "y"))
    compensated = comp * (group_index_fn(wavelength_v, "y")
                          - group_index_fn(wavelength_h, "z"))
    return (poled + compensated) / C_LIGHT


_TIME_BANDWIDTH = {PulseShape.SECH2: 0.315, PulseShape.GAUSSIAN: 0.441}


def transform_limited_fwhm(pump: PumpSpec) -> float:
    """Transform-limited pulse duration (s) implied by the pump bandwidth."""
    dnu = C_LIGHT * pump.bandwidth_fwhm / pump.center_wavelength**2
    return _TIME_BANDWIDTH[pump.pulse_shape] / dnu


_PEAK_SHAPE_FACTORS = {PulseShape.SECH2: 0.88, PulseShape.GAUSSIAN: 0.94}


def peak_power(pump: PumpSpec, pulse_fwhm: float,
               shape_factor: float | None = None) -> float:
    """Peak pulse power P_avg * factor / (rep_rate * pulse_fwhm) in W."""
    if pulse_fwhm <= 0:
        raise ConfigError("pulse_fwhm must be positive")
    if shape_factor is None:
        shape_factor = _PEAK_SHAPE_FACTORS[pump.pulse_shape]
    return shape_factor * pump.average_power / (pump.repetition_rate * pulse_fwhm)


def coupling_coefficient(power: float,
                         reference: tuple[float, float]) -> float:
    """Normalized coupling kappa at ``power``, scaled from a reference point.

    The interaction strength scales with the pump field amplitude, so
    kappa = kappa_ref * sqrt(power / power_ref).
    """
    power_ref, kappa_ref = reference
    if power_ref <= 0 or kappa_ref <= 0:
        raise ConfigError("reference power and kappa must be positive")
    if power < 0:
        raise ConfigError("power must be non-negative")
    return kappa_ref * math.sqrt(power / power_ref)
