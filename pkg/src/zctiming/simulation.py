"""
Monte Carlo simulation of CP-protected sequence timing detection.

Random numbers: every trial ``t`` owns an independent numpy ``PCG64``
stream seeded by ``SeedSequence(seed, spawn_key=(t,))``, so results do not
depend on how trials are batched or scheduled. Complex Gaussian noise is
drawn by the Box-Muller transform from that stream's uniforms.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .correlation import correlation_matrix
from .sequences import pn_generate, zc_generate
from .spectrum import HypothesisWindow

UNIFORM = "uniform"
_BATCH = 2048


@dataclass(frozen=True)
class SimulationConfig:
    scenario: object
    trials: int = 10_000
    seed: int = 0
    n_cp: int = None
    kappa_mode: object = UNIFORM
    random_phase: bool = False
    sequence: str = "zc"

    def __post_init__(self):
        W = self.scenario.W
        if self.n_cp is None:
            object.__setattr__(self, "n_cp", W - 1)
        if int(self.n_cp) != self.n_cp or self.n_cp < W - 1:
            raise ValueError(f"N_CP must be an integer >= W-1 = {W - 1}, got N_CP={self.n_cp}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got trials={self.trials}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an integer in [0, 2**64), got seed={self.seed}")
        if self.kappa_mode != UNIFORM:
            try:
                k = int(self.kappa_mode)
            except (TypeError, ValueError):
                raise ValueError(
                    f"kappa_mode must be {UNIFORM!r} or an integer, got {self.kappa_mode!r}") from None
            if not 0 <= k <= W - 1:
                raise ValueError(f"fixed kappa must be in [0, W-1={W - 1}], got {k}")
            object.__setattr__(self, "kappa_mode", k)
        if self.sequence not in ("zc", "pn"):
            raise ValueError(f"sequence must be 'zc' or 'pn', got {self.sequence!r}")
        object.__setattr__(self, "n_cp", int(self.n_cp))
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "seed", int(self.seed))

    def reference(self):
        s = self.scenario
        if self.sequence == "pn":
            return np.asarray(pn_generate(length=s.N))
        return np.asarray(zc_generate(s.N, s.mu))


@dataclass(frozen=True)
class EmpiricalDistribution:
    counts: dict
    trials: int
    config: SimulationConfig = field(default=None, compare=False)

    @property
    def error_rate(self):
        return 1.0 - self.counts.get(0, 0) / self.trials

    @property
    def stderr(self):
        p = self.error_rate
        return math.sqrt(p * (1.0 - p) / self.trials)

    def frequency(self, delta_kappa):
        return self.counts.get(delta_kappa, 0) / self.trials

    def frequencies(self, offsets=None):
        if offsets is None:
            offsets = sorted(self.counts)
        return {d: self.frequency(d) for d in offsets}


def trial_rng(seed, trial):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


def complex_gaussian(rng, size):
    """Circular CN(0, 1) samples via Box-Muller."""
    u = rng.random((2, size))
    r = np.sqrt(-np.log1p(-u[0]))
    return r * np.exp(2j * np.pi * u[1])


def synthesize_received(seq, kappa, delta_lambda, eta, n_cp, rng=None, phase=0.0):
    """
    Received block of length ``n_cp + N``: the CP-extended sequence delayed by
    `kappa`, scaled by ``sqrt(eta)``, rotated by the frequency offset and
    (unless `rng` is None) corrupted by unit-variance complex Gaussian noise.
    """
    s = np.asarray(seq)
    N = s.size
    if not 0 <= kappa <= n_cp:
        raise ValueError(f"kappa must be in [0, N_CP={n_cp}], got kappa={kappa}")
    x = np.concatenate([s[N - n_cp:], s]) if n_cp else s
    n = np.arange(N + n_cp)
    y = math.sqrt(eta) * np.roll(x, int(kappa)) * np.exp(2j * np.pi * delta_lambda * n / N)
    if phase:
        y = y * np.exp(1j * phase)
    if rng is not None:
        y = y + complex_gaussian(rng, N + n_cp)
    return y


def truncate_cp(y, n_cp, N=None):
    """Drop the first `n_cp` samples, keeping the last N."""
    y = np.asarray(y)
    if N is not None and y.size != N + n_cp:
        raise ValueError(f"expected {N + n_cp} samples, got {y.size}")
    if y.size <= n_cp:
        raise ValueError(f"block of {y.size} samples is not longer than N_CP={n_cp}")
    return y[n_cp:]


def detect_timing(y_prime, seq, window):
    """Hypothesis in ``0..W-1`` with the largest ``|z|^2``; ties go to the smallest."""
    W = window.W if isinstance(window, HypothesisWindow) else int(window)
    z = np.asarray(y_prime) @ correlation_matrix(np.asarray(seq), W)
    return int(np.argmax(np.abs(z) ** 2, axis=-1)) if z.ndim == 1 else np.argmax(np.abs(z) ** 2, axis=-1)


def run_experiment(config):
    """Simulate `config.trials` detections; returns counts of ``kappa_hat - kappa``."""
    s = config.scenario
    seq = config.reference()
    C = correlation_matrix(seq, s.W)
    counts = {}
    for start in range(0, config.trials, _BATCH):
        stop = min(start + _BATCH, config.trials)
        blocks = np.empty((stop - start, s.N), dtype=complex)
        kappas = np.empty(stop - start, dtype=np.int64)
        for i, t in enumerate(range(start, stop)):
            rng = trial_rng(config.seed, t)
            kappa = int(rng.integers(s.W)) if config.kappa_mode == UNIFORM else config.kappa_mode
            phase = 2 * np.pi * rng.random() if config.random_phase else 0.0
            y = synthesize_received(seq, kappa, s.delta_lambda, s.eta, config.n_cp, rng, phase)
            blocks[i] = truncate_cp(y, config.n_cp)
            kappas[i] = kappa
        metric = np.abs(blocks @ C) ** 2
        offsets = np.argmax(metric, axis=1) - kappas
        vals, cnt = np.unique(offsets, return_counts=True)
        for v, c in zip(vals.tolist(), cnt.tolist()):
            counts[v] = counts.get(v, 0) + c
    return EmpiricalDistribution(dict(sorted(counts.items())), config.trials, config)

