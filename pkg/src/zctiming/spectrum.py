"""
Critical frequency offsets and the timing spectrum of a ZC root.

A nonzero lag ``dk`` has its autocorrelation peak moved onto it when the
frequency offset equals ``mu*dk`` modulo N. The smallest such offset is the
critical frequency offset; histogramming those offsets over every lag a
hypothesis window can produce gives the timing spectrum. Its mass at
``+/-1`` is the irreducible timing-error floor for ``|dl| > 0.5``.
"""

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .correlation import autocorr_mag_sq_closed

ABOVE_HALF = "above-half"
AT_HALF = "at-half"


@dataclass(frozen=True)
class HypothesisWindow:
    """Timing hypotheses ``H = {0, ..., W-1}``."""

    W: int

    def __post_init__(self):
        if int(self.W) != self.W or self.W < 1:
            raise ValueError(f"window W must be a positive integer, got W={self.W}")

    def __len__(self):
        return self.W

    def __iter__(self):
        return iter(range(self.W))

    @property
    def all_offsets(self):
        """Union of the shift-offset sets over all arrival times in H."""
        return range(-(self.W - 1), self.W)


@dataclass(frozen=True)
class ShiftOffsetSet:
    kappa: int
    offsets: range

    def __contains__(self, dk):
        return dk in self.offsets

    def __len__(self):
        return len(self.offsets)

    def __iter__(self):
        return iter(self.offsets)


@dataclass(frozen=True)
class TimingSpectrum:
    """Normalized histogram of critical frequency offsets.

    `bins` maps the integer offset to an exact :class:`~fractions.Fraction`.
    """

    mu: int
    N: int
    W: int
    bins: dict

    def __getitem__(self, key):
        return self.bins.get(key, Fraction(0))

    def keys(self):
        return sorted(self.bins)

    @property
    def total_mass(self):
        return sum(self.bins.values(), Fraction(0))

    @property
    def min_abs_offset(self):
        return min(abs(k) for k in self.bins) if self.bins else None

    def mass_below(self, threshold):
        """Total mass at ``|offset| < threshold``."""
        return sum((v for k, v in self.bins.items() if abs(k) < threshold), Fraction(0))

    def positive_half(self):
        return [(k, self.bins[k]) for k in self.keys() if k > 0]


def _as_window(window):
    return window if isinstance(window, HypothesisWindow) else HypothesisWindow(int(window))


def critical_offset(mu, N, delta_kappa):
    """
    Critical frequency offset ``mu*dk + l*N`` of smallest magnitude.

    Returns the representative of ``mu*dk mod N`` in ``(-N/2, N/2]``; for odd N
    the half-way tie cannot occur, for even N it resolves to the positive value.
    """
    delta_kappa = int(delta_kappa)
    if delta_kappa == 0:
        raise ValueError("delta_kappa = 0 has no critical frequency offset")
    r = (int(mu) * delta_kappa) % int(N)
    return r - N if 2 * r > N else r


def shift_offsets(kappa, window):
    """Shift offsets ``{-kappa, ..., W-1-kappa}`` reachable from arrival `kappa`."""
    window = _as_window(window)
    if not 0 <= kappa <= window.W - 1:
        raise ValueError(f"kappa must be in [0, W-1={window.W - 1}], got kappa={kappa}")
    return ShiftOffsetSet(int(kappa), range(-kappa, window.W - kappa))


def timing_spectrum(mu, N, window):
    """
    Timing spectrum of root `mu` for hypothesis window `window`.

    Each arrival time in H contributes the critical offsets of its nonzero
    shift offsets, weighted 1/W. A lag ``dk`` is reachable from exactly
    ``W - |dk|`` arrival times, so the histogram is accumulated per lag.
    """
    window = _as_window(window)
    W = window.W
    if W >= N:
        raise ValueError(f"window W={W} must be smaller than N={N}")
    if gcd(int(mu), int(N)) != 1:
        raise ValueError(f"mu={mu} is not coprime to N={N}")
    bins = defaultdict(Fraction)
    for dk in window.all_offsets:
        if dk == 0:
            continue
        bins[critical_offset(mu, N, dk)] += Fraction(W - abs(dk), W)
    return TimingSpectrum(int(mu), int(N), W, dict(bins))


def critical_table(mu, N, max_shift):
    """``[(dk, critical_offset)]`` for ``dk = +/-1 .. +/-max_shift``."""
    rows = []
    for d in range(1, max_shift + 1):
        rows.append((d, critical_offset(mu, N, d)))
        rows.append((-d, critical_offset(mu, N, -d)))
    return rows


def error_floor(spectrum, regime=ABOVE_HALF):
    """
    Irreducible timing-error probability predicted by the spectrum.

    ``above-half`` (``0.5 < |dl| <= 1``) gives the mass at offset +1;
    ``at-half`` (``|dl| = 0.5``) gives half of it.
    """
    floor = spectrum[1]
    if regime == ABOVE_HALF:
        return float(floor)
    if regime == AT_HALF:
        return float(floor / 2)
    raise ValueError(f"unknown regime {regime!r}; use {ABOVE_HALF!r} or {AT_HALF!r}")


def floor_for_offset(spectrum, delta_lambda):
    """Error floor at a specific offset; only ``|dl| <= 1`` is covered."""
    a = abs(delta_lambda)
    if a > 1:
        raise ValueError(f"error floor is only defined for |delta_lambda| <= 1, got {delta_lambda}")
    if a < 0.5:
        return 0.0
    return error_floor(spectrum, AT_HALF if a == 0.5 else ABOVE_HALF)


def relative_mean_metric(mu, N, delta_kappa, delta_lambda, eta=np.inf):
    """
    Mean detection metric at lag `delta_kappa` relative to the correct lag.

    For finite linear SNR `eta`, ``(N|sinc(dl - mu dk)|^2 + 1/eta) / (N|sinc(dl)|^2 + 1/eta)``;
    for ``eta = inf`` the noise terms drop out. Returns nan when the
    high-SNR ratio is 0/0.
    """
    num = autocorr_mag_sq_closed(mu, N, delta_kappa, delta_lambda)
    den = autocorr_mag_sq_closed(mu, N, 0, delta_lambda)
    if np.isinf(eta):
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(den > 0, num / np.where(den > 0, den, 1.0),
                           np.where(num > 0, np.inf, np.nan))
    elif eta > 0:
        out = (N * num + 1 / eta) / (N * den + 1 / eta)
    else:
        raise ValueError(f"eta must be positive, got {eta}")
    # identical numerator and denominator, even where both vanish
    out = np.where(np.asarray(delta_kappa) == 0, 1.0, out)
    return out if np.ndim(out) else float(out)
