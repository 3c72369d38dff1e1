"""
Rank ZC roots by how well their timing spectra tolerate frequency offsets.

Ranking policy (a total order): largest smallest-critical-offset first, then
least spectral mass at ``|offset| <= ceil(freq_bound)``, then smallest root.
"""

import math
from dataclasses import dataclass

from .sequences import validate_zc_params
from .spectrum import AT_HALF, ABOVE_HALF, error_floor, timing_spectrum

DEFAULT_FREQ_BOUND = 1.0


@dataclass(frozen=True)
class RootReport:
    mu: int
    min_abs_critical_offset: int
    floor_above_half: float
    spectrum: object

    @property
    def floor_at_half(self):
        return error_floor(self.spectrum, AT_HALF)

    def spectrum_mass_below(self, threshold):
        return float(self.spectrum.mass_below(threshold))

    def as_row(self):
        return {
            "mu": self.mu,
            "min_critical_offset": self.min_abs_critical_offset,
            "floor": self.floor_above_half,
        }


def assess_root(mu, N, window):
    validate_zc_params(N, mu)
    ts = timing_spectrum(mu, N, window)
    return RootReport(
        mu=int(mu),
        min_abs_critical_offset=ts.min_abs_offset,
        floor_above_half=error_floor(ts, ABOVE_HALF),
        spectrum=ts,
    )


def coprime_roots(N):
    return [mu for mu in range(1, N) if math.gcd(mu, N) == 1]


def rank_roots(N, window, candidates=None, freq_bound=DEFAULT_FREQ_BOUND):
    """Assess `candidates` (default: every root coprime to N) and sort best first."""
    if candidates is None:
        candidates = coprime_roots(N)
    candidates = sorted({int(c) for c in candidates})
    if not candidates:
        raise ValueError("candidate root list is empty")
    reports = [assess_root(mu, N, window) for mu in candidates]
    cutoff = math.ceil(freq_bound) + 1
    # a one-sample window has no nonzero lags, hence no critical offsets
    return sorted(
        reports,
        key=lambda r: (-(r.min_abs_critical_offset or N), r.spectrum.mass_below(cutoff), r.mu),
    )
