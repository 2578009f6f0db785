"""Observables and the closed-form thermalization predictions.

The second-order collision picture gives an upward (heating) rate
R_a = r p_e (g tau)^2 and a downward (cooling) rate R_b = r p_ground
(g tau)^2 per unit time; the mean photon number then relaxes exponentially
with Gamma = R_b - R_a toward R_a/Gamma.  The cluster of N two-level atoms
multiplies both rates by N; the multilevel atom replaces p_g with the
single-ground-level population p_g'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from .errors import DomainError, FitError, GainRegimeError, UndefinedCorrelationError
from .models import MULTI_ATOM, CouplingSpec, ReservoirSpec, reservoir_populations

if TYPE_CHECKING:
    from .dynamics import TimeSeries

#: Below this mean photon number g2(0) is numerically undefined.
G2_PHOTON_FLOOR = 1e-9

#: Least-squares window: samples whose remaining gap is below this fraction
#: of the initial gap are dominated by subtraction noise and excluded.
FIT_GAP_FRACTION = 0.02
FIT_MIN_SAMPLES = 100


@dataclass(frozen=True)
class RatePair:
    """Photon heating/cooling rates in units of Omega."""

    R_a: float
    R_b: float

    def __post_init__(self):
        if self.R_a < 0 or self.R_b < 0:
            raise DomainError("rates must be >= 0")


@dataclass(frozen=True)
class ThermalizationPrediction:
    """Closed-form decay rate, thermalization time and steady occupation."""

    Gamma: float
    t_th: float
    n_bar_th: float
    low_T_approx: float


class DecayFit(NamedTuple):
    Gamma: float
    n_inf: float
    r_squared: float


def mean_photon_number(rho_f) -> float:
    """tr(rho a+ a), real and nonnegative for any physical state."""
    rho_f = np.asarray(rho_f, dtype=complex)
    levels = np.arange(rho_f.shape[0])
    return float(np.real(np.sum(levels * np.diagonal(rho_f))))


def bose_einstein_occupation(omega: float, T: float) -> float:
    """Thermal occupation 1/(exp(omega/T) - 1)."""
    if not omega > 0:
        raise DomainError(f"omega must be > 0, got {omega}")
    if not T > 0:
        raise DomainError(f"temperature must be > 0, got {T}")
    x = omega / T
    if x > 700.0:  # expm1 would overflow; occupation underflows to 0
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def field_temperature(n_bar: float, Omega: float = 1.0) -> float:
    """Temperature whose thermal occupation equals ``n_bar``.

    Omega / ln(1 + 1/n_bar); the exact inverse of
    :func:`bose_einstein_occupation`.  Nonpositive ``n_bar`` maps to the
    absolute-zero sentinel 0.0 (an empty cavity is physical, not an error).
    """
    if n_bar <= 0:
        return 0.0
    return Omega / math.log1p(1.0 / n_bar)


def g2_zero(rho_f, floor: float = G2_PHOTON_FLOOR) -> float:
    """Zero-delay second-order correlation tr(rho a+ a+ a a)/n_bar^2.

    2 for thermal light, 1 for Poissonian light, 0 for a single photon.
    """
    rho_f = np.asarray(rho_f, dtype=complex)
    n_bar = mean_photon_number(rho_f)
    if n_bar <= floor:
        raise UndefinedCorrelationError(
            f"g2(0) undefined: mean photon number {n_bar:.3g} below floor {floor:g}"
        )
    levels = np.arange(rho_f.shape[0])
    pairs = float(np.real(np.sum(levels * (levels - 1) * np.diagonal(rho_f))))
    return pairs / n_bar**2


def diagonal_ratio_temperature(rho_f, Omega: float = 1.0) -> float:
    """Auxiliary thermality diagnostic Omega / ln(rho_00 / rho_11).

    Agrees with :func:`field_temperature` exactly when the state is
    thermal; a mismatch flags a non-geometric photon distribution.
    """
    rho_f = np.asarray(rho_f, dtype=complex)
    p0 = float(np.real(rho_f[0, 0]))
    p1 = float(np.real(rho_f[1, 1]))
    if p1 <= 0 or p0 <= p1:
        return 0.0
    return Omega / math.log(p0 / p1)


def rates(reservoir: ReservoirSpec, coupling: CouplingSpec) -> RatePair:
    """Second-order heating/cooling rates for the given reservoir.

    Cluster of N two-level atoms: (r N p_e phi^2, r N p_g phi^2), the
    reduced form of the N-atom generator; multilevel atom:
    (r p_e phi^2, r p_g' phi^2).
    """
    p_e, p_ground = reservoir_populations(reservoir)
    scale = coupling.rate * coupling.phi**2
    if reservoir.kind == MULTI_ATOM:
        scale *= reservoir.N
    pair = RatePair(R_a=scale * p_e, R_b=scale * p_ground)
    if pair.R_a >= pair.R_b:
        raise GainRegimeError(
            f"R_a = {pair.R_a:.6g} >= R_b = {pair.R_b:.6g}: gain regime, no thermal steady state"
        )
    return pair


def decay_rate(pair: RatePair) -> float:
    """Photon-number decay rate Gamma = R_b - R_a."""
    gamma = pair.R_b - pair.R_a
    if gamma <= 0:
        raise GainRegimeError(f"Gamma = {gamma:.6g} <= 0: gain regime")
    return gamma


def analytic_trajectory(n0: float, n_th: float, Gamma: float, times) -> np.ndarray:
    """Exponential relaxation n0 e^{-Gamma t} + n_th (1 - e^{-Gamma t})."""
    if not Gamma > 0:
        raise DomainError(f"Gamma must be > 0, got {Gamma}")
    times = np.asarray(times, dtype=float)
    decay = np.exp(-Gamma * times)
    return n0 * decay + n_th * (1.0 - decay)


def thermalization_time(reservoir: ReservoirSpec, coupling: CouplingSpec) -> ThermalizationPrediction:
    """Closed-form thermalization prediction for either reservoir kind.

    Cluster: t_th = 1/(r phi^2 N (p_g - p_e)), approaching 1/(r phi^2 N) at
    low temperature, so bigger clusters thermalize the field faster.
    Multilevel: t_th = 1/(r phi^2 (p_g' - p_e)), approaching N/(r phi^2),
    so extra ground levels slow thermalization down linearly.
    """
    pair = rates(reservoir, coupling)
    gamma = decay_rate(pair)
    base = coupling.rate * coupling.phi**2
    if reservoir.kind == MULTI_ATOM:
        low_t = 1.0 / (base * reservoir.N)
    else:
        low_t = reservoir.N / base
    return ThermalizationPrediction(
        Gamma=gamma,
        t_th=1.0 / gamma,
        n_bar_th=pair.R_a / gamma,
        low_T_approx=low_t,
    )


def fit_decay_rate(series: "TimeSeries") -> DecayFit:
    """Estimate the exponential decay rate of a photon-number series.

    The asymptote is the mean of the final 10% of samples; the rate comes
    from least squares on ln|n(t) - n_inf| over the samples still holding
    more than FIT_GAP_FRACTION of the initial gap.  Returns the fitted
    rate, asymptote and the regression R^2.
    """
    times = np.asarray(series.times, dtype=float)
    n_mean = np.asarray(series.n_mean, dtype=float)
    if len(times) < FIT_MIN_SAMPLES:
        raise FitError(f"need at least {FIT_MIN_SAMPLES} samples, got {len(times)}")
    tail = max(1, len(n_mean) // 10)
    n_inf = float(np.mean(n_mean[-tail:]))
    noise = float(np.std(n_mean[-tail:]))
    swing = abs(n_mean[-1] - n_mean[0])
    if swing == 0 or swing <= 10.0 * noise:
        raise FitError(
            f"no visible relaxation: swing {swing:.3g} vs sample noise {noise:.3g}"
        )
    gap = np.abs(n_mean - n_inf)
    initial_gap = gap[0]
    if initial_gap <= 0:
        raise FitError("series starts at its asymptote")
    mask = gap > FIT_GAP_FRACTION * initial_gap
    if int(mask.sum()) < 5:
        raise FitError("fewer than 5 samples above the fit-window threshold")
    x = times[mask]
    y = np.log(gap[mask])
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    total = y - np.mean(y)
    ss_tot = float(np.dot(total, total))
    if ss_tot == 0:
        raise FitError("fit window has no dynamic range")
    r_squared = 1.0 - float(np.dot(residuals, residuals)) / ss_tot
    return DecayFit(Gamma=float(-slope), n_inf=n_inf, r_squared=r_squared)
