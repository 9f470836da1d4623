"""Scenario runners for the three categories of interference effects.

Category I varies only the phase difference (pure cosine fringes),
Category II varies the collective path-length difference (fringes at the
pump central wavelength under the pump coherence envelope), Category III
varies the asymmetry lengths (fringeless dip or hump tracing the
phase-matching coherence envelope, the three-photon analog of a
Hong-Ou-Mandel scan).

Sweeps produce plain tables of (parameter value, rate result) rows;
metric extraction works on the tables alone so it applies equally to the
CLI's CSV pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .constants import SPEED_OF_LIGHT
from .errors import InsufficientSamplingError, IntegrationError
from .pathgeom import CentralFrequencies, ReducedParameters, SourceKind
from .rates import AlternativeAmplitudes, RateResult, SourceModel, rate_length
from .spectra import Separable


class SweepVariable(Enum):
    DELTA_PHI = "delta_phi"
    DELTA_L = "delta_l"
    DELTA_L_PRIME = "delta_l_prime"
    DELTA_L_DPRIME = "delta_l_dprime"
    DIAGONAL = "diagonal"  # delta_l_prime == delta_l_dprime


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep: which variable, its range, and the fixed rest."""

    variable: SweepVariable
    start: float
    stop: float
    n_points: int
    fixed: ReducedParameters
    source: SourceModel
    amps: AlternativeAmplitudes

    def __post_init__(self):
        if self.n_points < 3:
            raise ValueError("n_points must be at least 3")
        if not self.start < self.stop:
            raise ValueError("start must be below stop")


@dataclass(frozen=True)
class SweepTable:
    """Ascending parameter values with one rate result per row."""

    variable: SweepVariable
    values: np.ndarray
    results: tuple[RateResult, ...]

    @property
    def rates(self) -> np.ndarray:
        return np.array([r.rate for r in self.results])

    @property
    def baseline(self) -> float:
        return self.results[0].baseline

    def __len__(self) -> int:
        return len(self.results)


def _apply(params: ReducedParameters, variable: SweepVariable,
           value: float) -> ReducedParameters:
    if variable is SweepVariable.DELTA_PHI:
        return replace(params, delta_phi=value)
    if variable is SweepVariable.DELTA_L:
        return replace(params, delta_l=value)
    if variable is SweepVariable.DELTA_L_PRIME:
        return replace(params, delta_l_prime=value)
    if variable is SweepVariable.DELTA_L_DPRIME:
        return replace(params, delta_l_dprime=value)
    if variable is SweepVariable.DIAGONAL:
        return replace(params, delta_l_prime=value, delta_l_dprime=value)
    raise ValueError(f"unknown sweep variable {variable!r}")


def run_sweep(spec: SweepSpec) -> SweepTable:
    """Evaluate the rate across the sweep; aborts on the first bad row."""
    values = np.linspace(spec.start, spec.stop, spec.n_points)
    results = []
    for i, v in enumerate(values):
        params = _apply(spec.fixed, spec.variable, float(v))
        try:
            results.append(rate_length(spec.source, params, spec.amps))
        except IntegrationError as e:
            raise IntegrationError(
                f"sweep row {i} ({spec.variable.value} = {v!r}): {e}",
                value=e.value, error_estimate=e.error_estimate) from e
    return SweepTable(variable=spec.variable, values=values, results=tuple(results))


@dataclass(frozen=True)
class FringeMetrics:
    """Fringe observables of a Category I/II scan.

    ``envelope_halfwidth`` is the swept-parameter value at which the
    per-period visibility drops to 1/e of its initial value; infinity
    when the scan shows no decay (Category I always does).
    """

    visibility: float
    period: float
    envelope_halfwidth: float


class ExtremumKind(Enum):
    DIP = "dip"
    HUMP = "hump"


@dataclass(frozen=True)
class DipMetrics:
    """Origin extremum of a Category III scan pair.

    ``not_monotone`` flags side lobes above 5% of the extremum depth
    (or an envelope that never decays below that level inside the scan),
    in which case the widths describe the central lobe only.
    """

    extremum_kind: ExtremumKind
    depth: float
    fwhm_prime: float
    fwhm_dprime: float
    not_monotone: bool = False


def _zero_crossings(x: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Linear-interpolated positions where s changes sign.

    Samples landing exactly on zero count as crossings when the signs on
    either side of the zero run differ (tangent touches do not).
    """
    out = []
    idx = np.nonzero(np.sign(s[:-1]) * np.sign(s[1:]) < 0)[0]
    x0, x1 = x[idx], x[idx + 1]
    s0, s1 = s[idx], s[idx + 1]
    out.extend(x0 - s0 * (x1 - x0) / (s1 - s0))
    zeros = np.nonzero(s == 0.0)[0]
    i = 0
    while i < zeros.size:
        j = i
        while j + 1 < zeros.size and zeros[j + 1] == zeros[j] + 1:
            j += 1
        a, b = zeros[i], zeros[j]
        if a > 0 and b < s.size - 1 and s[a - 1] * s[b + 1] < 0:
            out.append(0.5 * (x[a] + x[b]))
        i = j + 1
    return np.sort(np.asarray(out))


def _moving_mean(y: np.ndarray, window: int) -> np.ndarray:
    window = max(3, window | 1)  # odd
    half = window // 2
    padded = np.pad(y, half, mode="reflect")
    kernel = np.full(window, 1.0 / window)
    return np.convolve(padded, kernel, mode="valid")


def extract_fringe_metrics(table: SweepTable) -> FringeMetrics:
    """Period, central-fringe visibility and envelope half-width of a scan.

    The period comes from the mean spacing of the zero crossings of the
    rate minus its running mean (crossings sit at the cosine zeros
    regardless of the envelope); the visibility uses the extrema of the
    period centered on the scan midpoint, decoupling it from envelope
    decay.
    """
    x = np.asarray(table.values, dtype=float)
    y = table.rates
    span = x[-1] - x[0]
    step = span / (len(x) - 1)

    crossings = _zero_crossings(x, y - np.mean(y))
    if crossings.size < 4:
        raise InsufficientSamplingError(
            "fewer than two fringe periods detected in the scan")
    period0 = 2.0 * float(np.mean(np.diff(crossings)))

    window = int(round(period0 / step))
    crossings = _zero_crossings(x, y - _moving_mean(y, window))
    # the reflect-padded running mean is biased within half a window of
    # the scan edges; keep only interior crossings for the statistics
    margin = 0.5 * window * step
    interior = crossings[(crossings >= x[0] + margin)
                         & (crossings <= x[-1] - margin)]
    if interior.size >= 4:
        crossings = interior
    if crossings.size < 4:
        raise InsufficientSamplingError("fringe structure lost after detrending")
    period = 2.0 * float(np.mean(np.diff(crossings)))

    if span < 3.0 * period * (1 - 1e-9):
        raise InsufficientSamplingError(
            f"scan covers {span / period:.2f} periods, need at least 3")
    if period / step < 16 * (1 - 1e-9):
        raise InsufficientSamplingError(
            f"{period / step:.1f} points per period, need at least 16")

    mid = 0.5 * (x[0] + x[-1])
    central = (x >= mid - period / 2) & (x <= mid + period / 2)
    hi, lo = float(np.max(y[central])), float(np.min(y[central]))
    visibility = (hi - lo) / (hi + lo)

    halfwidth = _envelope_halfwidth(x, y, period)
    return FringeMetrics(visibility=visibility, period=period,
                         envelope_halfwidth=halfwidth)


def fringe_visibility_at(table: SweepTable, value: float, period: float) -> float:
    """Fringe visibility from the one-period window centered on ``value``."""
    x = np.asarray(table.values, dtype=float)
    y = table.rates
    sel = (x >= value - period / 2) & (x <= value + period / 2)
    if np.count_nonzero(sel) < 4:
        raise InsufficientSamplingError(
            f"fewer than 4 samples in the period window around {value!r}")
    hi, lo = float(np.max(y[sel])), float(np.min(y[sel]))
    return (hi - lo) / (hi + lo)


def _envelope_halfwidth(x: np.ndarray, y: np.ndarray, period: float) -> float:
    """1/e point of the per-period visibility profile, inf if never reached."""
    centers, vis = [], []
    left = x[0]
    while left + period <= x[-1] + 1e-12 * period:
        sel = (x >= left) & (x <= left + period)
        if np.count_nonzero(sel) >= 4:
            hi, lo = float(np.max(y[sel])), float(np.min(y[sel]))
            if hi + lo > 0:
                centers.append(left + period / 2)
                vis.append((hi - lo) / (hi + lo))
        left += period
    if len(vis) < 2:
        return math.inf
    v0 = vis[0]
    target = v0 / math.e
    for i in range(1, len(vis)):
        if vis[i] < target:
            f = (vis[i - 1] - target) / (vis[i - 1] - vis[i])
            return float(centers[i - 1] + f * (centers[i] - centers[i - 1]))
    return math.inf


@dataclass(frozen=True)
class DipProfile:
    """Single-axis dip/hump observables (see :class:`DipMetrics`)."""

    extremum_kind: ExtremumKind
    depth: float
    fwhm: float
    not_monotone: bool


def extract_dip_profile(table: SweepTable) -> DipProfile:
    """Kind, depth, FWHM and side-lobe flag of a single asymmetry scan."""
    x = np.asarray(table.values, dtype=float)
    y = table.rates
    baseline = table.results[0].baseline
    i0 = int(np.argmin(np.abs(x)))
    scale = max(abs(x[0]), abs(x[-1]))
    if abs(x[i0]) > 1e-9 * scale:
        raise ValueError("asymmetry scan must contain the origin")
    r0 = float(y[i0])
    depth_abs = abs(r0 - baseline)
    if depth_abs <= 1e-12 * baseline:
        raise ValueError("no extremum at the origin (flat profile)")
    kind = ExtremumKind.DIP if r0 < baseline else ExtremumKind.HUMP
    depth = depth_abs / baseline

    half_level = baseline + (r0 - baseline) / 2.0

    def crossing(direction: int) -> float:
        i = i0
        while 0 <= i + direction < len(x):
            j = i + direction
            if (y[i] - half_level) * (y[j] - half_level) <= 0:
                if y[j] == y[i]:
                    return float(x[j])
                f = (half_level - y[i]) / (y[j] - y[i])
                return float(x[i] + f * (x[j] - x[i]))
            i = j
        raise InsufficientSamplingError(
            "scan does not reach the half-depth level on "
            f"the {'right' if direction > 0 else 'left'} side")

    fwhm = crossing(+1) - crossing(-1)

    # side lobes: past the point where the excursion first falls below 5%
    # of the depth, it should stay there
    excursion = np.abs(y - baseline)
    threshold = 0.05 * depth_abs
    not_monotone = False
    for direction in (+1, -1):
        i = i0
        while 0 <= i + direction < len(x) and excursion[i] > threshold:
            i += direction
        if excursion[i] > threshold:
            not_monotone = True  # never decayed below threshold inside the scan
            continue
        j = i + direction
        while 0 <= j < len(x):
            if excursion[j] > threshold:
                not_monotone = True
                break
            j += direction
    return DipProfile(extremum_kind=kind, depth=depth, fwhm=float(fwhm),
                      not_monotone=not_monotone)


def extract_dip_metrics(table_prime: SweepTable,
                        table_dprime: SweepTable) -> DipMetrics:
    """Combine one scan per asymmetry axis into the dip/hump observables."""
    p = extract_dip_profile(table_prime)
    d = extract_dip_profile(table_dprime)
    if p.extremum_kind is not d.extremum_kind:
        raise ValueError(
            "scans disagree on the extremum kind "
            f"({p.extremum_kind.value} vs {d.extremum_kind.value})")
    return DipMetrics(extremum_kind=p.extremum_kind, depth=p.depth,
                      fwhm_prime=p.fwhm, fwhm_dprime=d.fwhm,
                      not_monotone=p.not_monotone or d.not_monotone)


def degenerate_central_frequencies(kind: SourceKind,
                                   omega: float) -> CentralFrequencies:
    """Central frequencies with vanishing asymmetry carriers.

    Both asymmetry carriers are zero when the photon closest to the pump
    in the frequency split sits exactly at its share: (2w, w, w) for the
    cascaded source and (w, w, w) for the third-order source. This is the
    regime where an asymmetry scan shows a clean fringeless dip or hump.
    """
    if kind is SourceKind.CPDC:
        return CentralFrequencies(2 * omega, omega, omega)
    return CentralFrequencies(omega, omega, omega)


def category_i_spec(source: SourceModel, amps: AlternativeAmplitudes,
                    periods: int = 3, points_per_period: int = 32) -> SweepSpec:
    """Phase sweep with all lengths zero; the fringes are pure cosine."""
    n = periods * points_per_period + 1
    fixed = ReducedParameters(0.0, 0.0, 0.0, 0.0)
    return SweepSpec(SweepVariable.DELTA_PHI, 0.0, periods * 2.0 * math.pi,
                     n, fixed, source, amps)


def pump_coherence_length(source: SourceModel) -> float:
    """c over the pump spectral width: the fringe envelope length scale."""
    return SPEED_OF_LIGHT / source.pump.characteristic_width


def category_ii_spec(source: SourceModel, amps: AlternativeAmplitudes,
                     coherence_lengths: float = 3.0,
                     points_per_period: int = 16) -> SweepSpec:
    """Collective length sweep from 0 to several pump coherence lengths."""
    lam_p0 = 2.0 * math.pi * SPEED_OF_LIGHT / source.centrals.omega_p0
    stop = coherence_lengths * pump_coherence_length(source)
    n = int(math.ceil(stop / lam_p0 * points_per_period)) + 1
    fixed = ReducedParameters(0.0, 0.0, 0.0, 0.0)
    return SweepSpec(SweepVariable.DELTA_L, 0.0, stop, n, fixed, source, amps)


def category_iii_specs(source: SourceModel, amps: AlternativeAmplitudes,
                       delta_phi: float, widths: float = 4.0,
                       n_points: int = 201) -> tuple[SweepSpec, SweepSpec]:
    """Symmetric scans of both asymmetry lengths at fixed phase.

    Intended for sources whose asymmetry carriers vanish (see
    :func:`degenerate_central_frequencies`); otherwise the profile carries
    residual fringes and the extractor flags it.
    """
    n_points = n_points | 1  # odd, so the origin is sampled exactly
    pm = source.phase_matching
    if isinstance(pm, Separable):
        w_prime = SPEED_OF_LIGHT / pm.d1.characteristic_width
        w_dprime = SPEED_OF_LIGHT / pm.d2.characteristic_width
    else:
        w_prime = SPEED_OF_LIGHT / (0.5 * float(pm.grid1[-1] - pm.grid1[0]))
        w_dprime = SPEED_OF_LIGHT / (0.5 * float(pm.grid2[-1] - pm.grid2[0]))
    fixed = ReducedParameters(0.0, 0.0, 0.0, delta_phi)
    spec_p = SweepSpec(SweepVariable.DELTA_L_PRIME, -widths * w_prime,
                       widths * w_prime, n_points, fixed, source, amps)
    spec_d = SweepSpec(SweepVariable.DELTA_L_DPRIME, -widths * w_dprime,
                       widths * w_dprime, n_points, fixed, source, amps)
    return spec_p, spec_d
