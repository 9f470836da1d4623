"""Spectral power densities for the pump and the phase-matching response.

Every density is a nonnegative function of a detuning (rad/s, measured
from the relevant carrier frequency) and is normalized to unit area over
the real line, so that the zero-delay coherence factors come out equal
to one. Analytic shapes (Gaussian, Lorentzian, SincSquared) are
normalized by construction; tabulated densities must be normalized
explicitly with :meth:`normalize`.

Evaluation is vectorized over numpy arrays and pure, so densities are
safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import sici

from .errors import NormalizationError

# Tail mass above which a sample grid is flagged as badly truncated.
HEAVY_TAIL_THRESHOLD = 1e-8

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class GridSample:
    """Pointwise density samples plus the mass left outside the grid.

    ``tail_mass`` is exact (per-shape closed form), not a quadrature
    estimate, so heavy-tailed shapes report their truncation honestly
    instead of silently absorbing it.
    """

    grid: np.ndarray
    values: np.ndarray
    tail_mass: float

    @property
    def heavy_tail(self) -> bool:
        return self.tail_mass > HEAVY_TAIL_THRESHOLD


class SpectralDensity:
    """Base class for 1D normalized spectral power densities."""

    #: Peak position (rad/s). Zero means the density sits on the carrier.
    center_offset: float = 0.0

    #: True when the shape is symmetric about its center.
    is_even: bool = True

    @property
    def center(self) -> float:
        return self.center_offset

    @property
    def characteristic_width(self) -> float:
        raise NotImplementedError

    @property
    def is_normalized(self) -> bool:
        return True

    def evaluate(self, detuning):
        """Density value at ``detuning`` (scalar or array), always >= 0."""
        raise NotImplementedError

    def normalize(self) -> "SpectralDensity":
        """Return a unit-area copy of this density."""
        return self

    def mass_outside(self, lo: float, hi: float) -> float:
        """Exact probability mass outside the interval [lo, hi]."""
        raise NotImplementedError

    def oscillatory_tail(self, half_span: float, delay: float) -> float:
        """Both-sided ``integral of f(u) cos(u*delay) du`` over ``|u - center| > half_span``.

        Used by the quadrature engine to correct finite-window Fourier
        integrals of shapes with slowly decaying tails. Finite-support
        and effectively-compact shapes return 0.
        """
        return 0.0

    def analytic_transform(self, delay: float) -> complex | None:
        """Closed-form ``integral of f(w) exp(-i w delay) dw`` if known, else None."""
        return None

    def with_width_scaled(self, factor: float) -> "SpectralDensity":
        """Same shape with the width multiplied by ``factor`` (area preserved)."""
        raise NotImplementedError

    def support(self) -> tuple[float, float]:
        """Interval outside which the density is identically zero."""
        return (-math.inf, math.inf)

    def sample_grid(self, n_points: int, support_multiplier: float) -> GridSample:
        """Uniform grid of ``n_points`` spanning ``+- support_multiplier`` widths.

        The grid is centered on the peak; the returned tail mass is the
        exact mass outside the grid.
        """
        if n_points < 16:
            raise ValueError("n_points must be at least 16")
        if not support_multiplier > 0:
            raise ValueError("support_multiplier must be positive")
        half = support_multiplier * self.characteristic_width
        grid = np.linspace(self.center - half, self.center + half, int(n_points))
        values = np.asarray(self.evaluate(grid), dtype=float)
        tail = self.mass_outside(float(grid[0]), float(grid[-1]))
        return GridSample(grid=grid, values=values, tail_mass=float(tail))


def _check_width(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be finite and positive, got {value!r}")


def _cos_tail_integral(n: int, freq: float, lower: float) -> float:
    """``integral of cos(freq*u)/u**(2n) du`` from ``lower`` to infinity, exact.

    Recursive integration by parts; the n=1 base case is the standard
    sine-integral form. ``freq`` may be zero.
    """
    t = abs(freq)
    if n == 1:
        if t == 0.0:
            return 1.0 / lower
        si, _ = sici(t * lower)
        return math.cos(t * lower) / lower - t * (math.pi / 2 - si)
    m = 2 * n
    return (
        math.cos(t * lower) / ((m - 1) * lower ** (m - 1))
        - t * math.sin(t * lower) / ((m - 1) * (m - 2) * lower ** (m - 2))
        - t * t / ((m - 1) * (m - 2)) * _cos_tail_integral(n - 1, t, lower)
    )


@dataclass(frozen=True)
class Gaussian(SpectralDensity):
    """Unit-area Gaussian, ``sigma`` is the standard deviation in rad/s."""

    sigma: float
    center_offset: float = 0.0

    def __post_init__(self):
        _check_width("sigma", self.sigma)
        if not math.isfinite(self.center_offset):
            raise ValueError("center_offset must be finite")

    @property
    def characteristic_width(self) -> float:
        return self.sigma

    def evaluate(self, detuning):
        u = (np.asarray(detuning, dtype=float) - self.center_offset) / self.sigma
        out = np.exp(-0.5 * u * u) / (self.sigma * _SQRT_2PI)
        return out if out.ndim else float(out)

    def mass_outside(self, lo: float, hi: float) -> float:
        a = (lo - self.center_offset) / (self.sigma * math.sqrt(2.0))
        b = (hi - self.center_offset) / (self.sigma * math.sqrt(2.0))
        return 0.5 * (math.erfc(-a) + math.erfc(b))

    def analytic_transform(self, delay: float) -> complex:
        mag = math.exp(-0.5 * (self.sigma * delay) ** 2)
        return mag * complex(math.cos(self.center_offset * delay),
                             -math.sin(self.center_offset * delay))

    def with_width_scaled(self, factor: float) -> "Gaussian":
        _check_width("factor", factor)
        return replace(self, sigma=self.sigma * factor)


@dataclass(frozen=True)
class Lorentzian(SpectralDensity):
    """Unit-area Lorentzian, ``gamma`` is the half-width at half maximum."""

    gamma: float
    center_offset: float = 0.0

    def __post_init__(self):
        _check_width("gamma", self.gamma)
        if not math.isfinite(self.center_offset):
            raise ValueError("center_offset must be finite")

    @property
    def characteristic_width(self) -> float:
        return self.gamma

    def evaluate(self, detuning):
        u = np.asarray(detuning, dtype=float) - self.center_offset
        out = (self.gamma / math.pi) / (u * u + self.gamma * self.gamma)
        return out if out.ndim else float(out)

    def mass_outside(self, lo: float, hi: float) -> float:
        a = (lo - self.center_offset) / self.gamma
        b = (hi - self.center_offset) / self.gamma
        return (0.5 + math.atan(a) / math.pi) + (0.5 - math.atan(b) / math.pi)

    def oscillatory_tail(self, half_span: float, delay: float) -> float:
        # Expand 1/(u^2 + g^2) in powers of (g/u)^2; three terms leave a
        # relative residual ~(g/half_span)^7, negligible for spans >= 32 g.
        g = self.gamma
        i2 = _cos_tail_integral(1, delay, half_span)
        i4 = _cos_tail_integral(2, delay, half_span)
        i6 = _cos_tail_integral(3, delay, half_span)
        one_side = (g / math.pi) * (i2 - g * g * i4 + g ** 4 * i6)
        return 2.0 * one_side

    def analytic_transform(self, delay: float) -> complex:
        mag = math.exp(-self.gamma * abs(delay))
        return mag * complex(math.cos(self.center_offset * delay),
                             -math.sin(self.center_offset * delay))

    def with_width_scaled(self, factor: float) -> "Lorentzian":
        _check_width("factor", factor)
        return replace(self, gamma=self.gamma * factor)


@dataclass(frozen=True)
class SincSquared(SpectralDensity):
    """Unit-area sinc-squared profile, ``sin(u/width)**2 / (u/width)**2``.

    Models the boxcar (rectangular-crystal) phase-matching response; the
    first zeros sit at ``center +- pi*width``.
    """

    width: float
    center_offset: float = 0.0

    def __post_init__(self):
        _check_width("width", self.width)
        if not math.isfinite(self.center_offset):
            raise ValueError("center_offset must be finite")

    @property
    def characteristic_width(self) -> float:
        return self.width

    def evaluate(self, detuning):
        u = (np.asarray(detuning, dtype=float) - self.center_offset) / self.width
        out = np.sinc(u / math.pi) ** 2 / (math.pi * self.width)
        return out if out.ndim else float(out)

    def _mass_above(self, x: float) -> float:
        # one-sided mass beyond center + x, x in rad/s (may be negative)
        t = x / self.width
        if t == 0.0:
            return 0.5
        if t < 0.0:
            return 1.0 - self._mass_above(-x)
        si, _ = sici(2.0 * t)
        return (math.sin(t) ** 2 / t + math.pi / 2 - si) / math.pi

    def mass_outside(self, lo: float, hi: float) -> float:
        below = 1.0 - self._mass_above(lo - self.center_offset)
        above = self._mass_above(hi - self.center_offset)
        return below + above

    def oscillatory_tail(self, half_span: float, delay: float) -> float:
        # f(u) = w sin^2(u/w) / (pi u^2); with sin^2 = (1 - cos(2u/w))/2 the
        # tail reduces exactly to three sine-integral kernels.
        w = self.width
        t = abs(delay)
        one_side = (w / (2.0 * math.pi)) * (
            _cos_tail_integral(1, t, half_span)
            - 0.5 * _cos_tail_integral(1, 2.0 / w + t, half_span)
            - 0.5 * _cos_tail_integral(1, abs(2.0 / w - t), half_span)
        )
        return 2.0 * one_side

    def analytic_transform(self, delay: float) -> complex:
        # Fourier pair of sinc^2 is the triangle function.
        mag = max(0.0, 1.0 - abs(delay) * self.width / 2.0)
        return mag * complex(math.cos(self.center_offset * delay),
                             -math.sin(self.center_offset * delay))

    def with_width_scaled(self, factor: float) -> "SincSquared":
        _check_width("factor", factor)
        return replace(self, width=self.width * factor)


class Tabulated(SpectralDensity):
    """Piecewise-linear density on a strictly increasing grid.

    Zero outside the grid support. Construct with raw samples and call
    :meth:`normalize` before feeding it to the coherence engine.
    """

    is_even = False

    def __init__(self, grid, values, center_offset: float = 0.0):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("grid must be 1D with at least two points")
        if values.shape != grid.shape:
            raise ValueError("grid and values must have the same shape")
        if not np.all(np.isfinite(grid)) or not np.all(np.isfinite(values)):
            raise ValueError("grid and values must be finite")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(values < 0):
            raise ValueError("density values must be nonnegative")
        self.grid = grid + center_offset
        self.values = values
        self.grid.setflags(write=False)
        self.values.setflags(write=False)
        self._area = float(np.trapezoid(self.values, self.grid))

    @classmethod
    def from_file(cls, path) -> "Tabulated":
        """Load a two-column text file (detuning rad/s, value)."""
        data = np.loadtxt(path, dtype=float)
        if data.ndim != 2 or data.shape[1] != 2:
            raise ValueError(f"{path}: expected two columns (detuning, value)")
        return cls(data[:, 0], data[:, 1])

    def __repr__(self):
        return (f"Tabulated(n={self.grid.size}, support=({self.grid[0]:g}, "
                f"{self.grid[-1]:g}), area={self._area:g})")

    @property
    def area(self) -> float:
        return self._area

    @property
    def center(self) -> float:
        return float(self.grid[int(np.argmax(self.values))])

    @property
    def characteristic_width(self) -> float:
        # RMS width of the (renormalized) samples; falls back to the
        # half-span for degenerate tables.
        if self._area > 0:
            w = self.values / self._area
            mean = np.trapezoid(self.grid * w, self.grid)
            var = np.trapezoid((self.grid - mean) ** 2 * w, self.grid)
            if var > 0:
                return float(math.sqrt(var))
        return float(0.5 * (self.grid[-1] - self.grid[0]))

    @property
    def is_normalized(self) -> bool:
        return abs(self._area - 1.0) <= 1e-6

    def evaluate(self, detuning):
        x = np.asarray(detuning, dtype=float)
        out = np.interp(x, self.grid, self.values, left=0.0, right=0.0)
        return out if out.ndim else float(out)

    def normalize(self) -> "Tabulated":
        if not math.isfinite(self._area) or self._area <= 0:
            raise NormalizationError(
                f"tabulated density has non-normalizable area {self._area!r}")
        return Tabulated(self.grid, self.values / self._area)

    def mass_outside(self, lo: float, hi: float) -> float:
        # exact piecewise-linear integral of the stored samples inside [lo, hi]
        lo = max(lo, float(self.grid[0]))
        hi = min(hi, float(self.grid[-1]))
        if hi <= lo:
            return self._area
        xs = np.concatenate(([lo], self.grid[(self.grid > lo) & (self.grid < hi)], [hi]))
        inside = float(np.trapezoid(self.evaluate(xs), xs))
        return self._area - inside

    def support(self) -> tuple[float, float]:
        return (float(self.grid[0]), float(self.grid[-1]))

    def with_width_scaled(self, factor: float) -> "Tabulated":
        _check_width("factor", factor)
        return Tabulated(self.grid * factor, self.values / factor)


@dataclass(frozen=True)
class Separable:
    """Product joint density ``d1(x) * d2(y)`` of two 1D densities."""

    d1: SpectralDensity
    d2: SpectralDensity

    @property
    def is_normalized(self) -> bool:
        return self.d1.is_normalized and self.d2.is_normalized

    def evaluate(self, x, y):
        return np.asarray(self.d1.evaluate(x)) * np.asarray(self.d2.evaluate(y))

    def normalize(self) -> "Separable":
        return Separable(self.d1.normalize(), self.d2.normalize())


class Tabulated2D:
    """Bilinear joint density tabulated on a rectangular grid.

    Zero outside the grid. Normalization uses the 2D trapezoid rule.
    """

    def __init__(self, grid1, grid2, values):
        grid1 = np.asarray(grid1, dtype=float)
        grid2 = np.asarray(grid2, dtype=float)
        values = np.asarray(values, dtype=float)
        for name, g in (("grid1", grid1), ("grid2", grid2)):
            if g.ndim != 1 or g.size < 2:
                raise ValueError(f"{name} must be 1D with at least two points")
            if np.any(np.diff(g) <= 0):
                raise ValueError(f"{name} must be strictly increasing")
        if values.shape != (grid1.size, grid2.size):
            raise ValueError("values must have shape (len(grid1), len(grid2))")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("values must be finite and nonnegative")
        self.grid1 = grid1
        self.grid2 = grid2
        self.values = values
        for a in (self.grid1, self.grid2, self.values):
            a.setflags(write=False)
        self._area = float(np.trapezoid(np.trapezoid(values, grid2, axis=1), grid1))

    def __repr__(self):
        return (f"Tabulated2D(shape={self.values.shape}, area={self._area:g})")

    @property
    def area(self) -> float:
        return self._area

    @property
    def is_normalized(self) -> bool:
        return abs(self._area - 1.0) <= 1e-6

    def evaluate(self, x, y):
        """Bilinear interpolation at broadcastable coordinates, 0 outside."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        i = np.clip(np.searchsorted(self.grid1, x) - 1, 0, self.grid1.size - 2)
        j = np.clip(np.searchsorted(self.grid2, y) - 1, 0, self.grid2.size - 2)
        x0, x1 = self.grid1[i], self.grid1[i + 1]
        y0, y1 = self.grid2[j], self.grid2[j + 1]
        tx = (x - x0) / (x1 - x0)
        ty = (y - y0) / (y1 - y0)
        v = ((1 - tx) * (1 - ty) * self.values[i, j]
             + tx * (1 - ty) * self.values[i + 1, j]
             + (1 - tx) * ty * self.values[i, j + 1]
             + tx * ty * self.values[i + 1, j + 1])
        inside = ((x >= self.grid1[0]) & (x <= self.grid1[-1])
                  & (y >= self.grid2[0]) & (y <= self.grid2[-1]))
        out = np.where(inside, v, 0.0)
        return out if out.ndim else float(out)

    def normalize(self) -> "Tabulated2D":
        if not math.isfinite(self._area) or self._area <= 0:
            raise NormalizationError(
                f"2D tabulated density has non-normalizable area {self._area!r}")
        return Tabulated2D(self.grid1, self.grid2, self.values / self._area)


JointSpectralDensity = Separable | Tabulated2D
