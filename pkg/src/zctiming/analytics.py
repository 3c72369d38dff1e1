"""
Exact detection statistics of the argmax timing detector.

Units are normalized to unit noise variance: the channel power equals the
receive sample SNR ``eta`` and the detection metric ``zeta = |z|^2`` is
measured in units of the noise variance. At each hypothesis the metric is
non-central chi-square with two degrees of freedom, and the hypotheses are
independent, so the probability that lag ``dk*`` wins is a one-dimensional
integral of its density times the CDFs (``1 - Q1``) of all competitors.
"""

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from scipy import special as sc

from .correlation import autocorr_mag_sq_closed
from .quadrature import integrate
from .sequences import validate_zc_params
from .spectrum import HypothesisWindow, shift_offsets
from .special import marcum_logs

EPSREL = 1e-8
EPSABS = 1e-12
# Upper integration limit leaves exp(-_TAIL) of the metric's mass.
_TAIL = 40.0
# Clip for log(1 - Q1) so that sums of logs never meet inf - inf.
_LOG_FLOOR = -1e6


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x) if x > 0 else -math.inf


@dataclass(frozen=True)
class DetectionScenario:
    """
    Parameters shared by the analysis and the simulator.

    `eta` is the linear receive sample SNR; ``eta = 0`` means noise only.
    """

    N: int
    mu: int
    W: int
    delta_lambda: float
    eta: float

    def __post_init__(self):
        validate_zc_params(self.N, self.mu)
        if int(self.W) != self.W or not 1 <= self.W < self.N:
            raise ValueError(f"W must be an integer in [1, N-1], got W={self.W}")
        if not math.isfinite(self.delta_lambda):
            raise ValueError(f"delta_lambda must be finite, got {self.delta_lambda}")
        if not (math.isfinite(self.eta) and self.eta >= 0):
            raise ValueError(f"eta must be finite and >= 0, got eta={self.eta}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "mu", int(self.mu))
        object.__setattr__(self, "W", int(self.W))
        object.__setattr__(self, "delta_lambda", float(self.delta_lambda))
        object.__setattr__(self, "eta", float(self.eta))

    @classmethod
    def from_db(cls, N, mu, W, delta_lambda, eta_db):
        return cls(N, mu, W, delta_lambda, db_to_linear(eta_db))

    @property
    def eta_db(self):
        return linear_to_db(self.eta)

    @property
    def window(self):
        return HypothesisWindow(self.W)

    def gamma_sq(self, delta_kappa):
        return autocorr_mag_sq_closed(self.mu, self.N, delta_kappa, self.delta_lambda)

    def to_dict(self):
        d = asdict(self)
        d["eta_db"] = self.eta_db
        return d


@dataclass(frozen=True)
class TimingDistribution:
    """Probability of each detected shift offset, and the timing-error probability."""

    probabilities: dict
    error_probability: float

    def offsets(self):
        return sorted(self.probabilities)

    def as_array(self):
        keys = self.offsets()
        return np.array(keys), np.array([self.probabilities[k] for k in keys])


def log_metric_pdf(zeta, delta_kappa, scenario):
    """Log density of the detection metric at lag `delta_kappa`."""
    zeta = np.asarray(zeta, dtype=float)
    if np.any(zeta < 0):
        raise ValueError("zeta must be nonnegative")
    N = scenario.N
    s = np.sqrt(scenario.gamma_sq(delta_kappa) * scenario.eta)
    rz = np.sqrt(zeta)
    # N exp(-N(s^2 + zeta)) I0(2 N s sqrt(zeta)), with the exponential folded in
    return math.log(N) - N * (s - rz) ** 2 + np.log(sc.i0e(2 * N * s * rz))


def metric_pdf(zeta, delta_kappa, scenario):
    """
    Density of ``zeta = |z|^2`` at lag `delta_kappa` (unit noise variance)::

        N exp(-N(|g|^2 eta + zeta)) I0(2 N |g| sqrt(eta zeta))

    with ``|g|^2`` the closed-form squared autocorrelation.
    """
    out = np.exp(log_metric_pdf(zeta, delta_kappa, scenario))
    return out if out.ndim else float(out)


def metric_mean(delta_kappa, scenario):
    return float(scenario.gamma_sq(delta_kappa) * scenario.eta + 1.0 / scenario.N)


def metric_var(delta_kappa, scenario):
    N = scenario.N
    return float(2.0 / N * scenario.gamma_sq(delta_kappa) * scenario.eta + 1.0 / N**2)


def zeta_upper(scenario):
    """Integration limit beyond which every lag's metric has negligible mass."""
    return (math.sqrt(scenario.eta) + math.sqrt(_TAIL / scenario.N)) ** 2


def _breakpoints(scenario, offsets):
    """Metric lobe centres and shoulders, to seed the adaptive subdivision."""
    N = scenario.N
    top = zeta_upper(scenario)
    pts = {1.0 / N, 5.0 / N, 20.0 / N}
    for d in offsets:
        m = metric_mean(d, scenario)
        sd = math.sqrt(metric_var(d, scenario))
        for k in (-8, -4, -2, 0, 2, 4, 8):
            pts.add(m + k * sd)
    return sorted(p for p in pts if 0 < p < top)


class _WindowIntegrand:
    """
    Vectorized integrand for every (arrival, hypothesis) pair of a window.

    Row ``kappa`` column ``k`` holds the density of lag ``k - kappa`` times the
    product of ``1 - Q1`` over all other hypotheses of that arrival time.
    """

    def __init__(self, scenario):
        self.s = scenario
        W = scenario.W
        self.lags = np.arange(-(W - 1), W)
        g2 = scenario.gamma_sq(self.lags)
        self.a = np.sqrt(2 * scenario.N * scenario.eta * g2)
        self.root = np.sqrt(scenario.eta * g2)
        kappa = np.arange(W)[:, None]
        hyp = np.arange(W)[None, :]
        self.index = hyp - kappa + (W - 1)

    def lag_terms(self, zeta):
        """``(log f, log(1 - Q1))`` for every lag, shape ``(n, 2W-1)`` each."""
        N = self.s.N
        zeta = np.asarray(zeta, dtype=float)[:, None]
        rz = np.sqrt(zeta)
        log_f = math.log(N) - N * (self.root - rz) ** 2 + np.log(sc.i0e(2 * N * self.root * rz))
        _, log_p = marcum_logs(self.a[None, :], np.sqrt(2 * N * zeta))
        return log_f, np.maximum(log_p, _LOG_FLOOR)

    def __call__(self, zeta):
        log_f, log_p = self.lag_terms(zeta)
        lp = log_p[:, self.index]
        others = lp.sum(axis=-1, keepdims=True) - lp
        return np.exp(log_f[:, self.index] + others)

    def single(self, delta_kappa_star, kappa):
        W = self.s.W
        j = delta_kappa_star + (W - 1)
        window = np.arange(W) - kappa + (W - 1)
        others = window[window != j]

        def g(zeta):
            log_f, log_p = self.lag_terms(zeta)
            return np.exp(log_f[:, j] + log_p[:, others].sum(axis=-1))

        return g


def prob_shift_given_kappa(delta_kappa_star, kappa, scenario):
    """
    Probability that the detector lands on lag `delta_kappa_star` when the
    sequence arrives at `kappa`, by adaptive quadrature of a single integral.
    """
    offsets = shift_offsets(kappa, scenario.window)
    if delta_kappa_star not in offsets:
        raise ValueError(
            f"delta_kappa_star={delta_kappa_star} is not reachable from kappa={kappa} "
            f"with W={scenario.W}")
    g = _WindowIntegrand(scenario).single(int(delta_kappa_star), int(kappa))
    res = integrate(g, 0.0, zeta_upper(scenario), epsabs=EPSABS, epsrel=EPSREL,
                    points=_breakpoints(scenario, offsets))
    return float(res.value)


@lru_cache(maxsize=256)
def conditional_matrix(scenario):
    """
    ``P[kappa, k]``: probability of deciding hypothesis ``k`` given arrival
    time ``kappa``, for all pairs in the window, from one vector quadrature.
    """
    f = _WindowIntegrand(scenario)
    res = integrate(f, 0.0, zeta_upper(scenario), epsabs=EPSABS, epsrel=EPSREL,
                    points=_breakpoints(scenario, f.lags))
    out = np.clip(res.value, 0.0, 1.0)
    out.setflags(write=False)
    return out


def prob_shift_total(delta_kappa_star, scenario):
    """Probability of detecting lag `delta_kappa_star` with the arrival uniform over H."""
    W = scenario.W
    d = int(delta_kappa_star)
    if abs(d) > W - 1:
        return 0.0
    P = conditional_matrix(scenario)
    kappas = range(max(-d, 0), min(W - 1, W - d - 1) + 1)
    return float(sum(P[k, k + d] for k in kappas) / W)


def timing_distribution(scenario):
    probs = {d: prob_shift_total(d, scenario) for d in scenario.window.all_offsets}
    return TimingDistribution(probs, error_probability(scenario))


def error_probability(scenario):
    """Probability that the detected lag is not zero."""
    return 1.0 - prob_shift_total(0, scenario)
