"""
Circular correlation and the frequency-offset-dependent ZC autocorrelation.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CorrelatorOutput:
    kappa_prime: int
    value: complex

    @property
    def metric(self):
        return abs(self.value) ** 2


def circular_correlate(received, reference, kappa_prime):
    """
    Correlate at a single timing hypothesis.

    ``z = (1/N) * sum_n received[(n + kappa_prime) mod N] * conj(reference[n])``
    """
    received = np.asarray(received)
    reference = np.asarray(reference)
    if received.shape != reference.shape or received.ndim != 1:
        raise ValueError(
            f"length mismatch: received {received.shape} vs reference {reference.shape}")
    N = reference.size
    z = np.vdot(reference, np.roll(received, -int(kappa_prime))) / N
    return CorrelatorOutput(int(kappa_prime), complex(z))


def correlation_matrix(reference, W):
    """
    Matrix ``C`` such that ``y @ C`` gives the correlator outputs for
    hypotheses ``0..W-1``; rows of `y` are truncated received blocks.
    """
    reference = np.asarray(reference)
    N = reference.size
    if not 1 <= W <= N:
        raise ValueError(f"window W must be in [1, N={N}], got W={W}")
    m = np.arange(N)[:, None]
    k = np.arange(W)[None, :]
    return np.conj(reference[(m - k) % N]) / N


def correlator_bank(received, reference, W):
    """Correlator outputs z_0 .. z_{W-1}, direct O(N*W) evaluation.

    `received` may be 1-D or a 2-D stack of blocks (one per row).
    """
    received = np.asarray(received)
    if received.shape[-1] != np.asarray(reference).size:
        raise ValueError("length mismatch between received block and reference")
    return received @ correlation_matrix(reference, W)


def correlator_bank_fft(received, reference, W):
    """FFT evaluation of :func:`correlator_bank` (same values to rounding)."""
    received = np.asarray(received)
    reference = np.asarray(reference)
    N = reference.size
    full = np.fft.ifft(np.fft.fft(received, axis=-1) * np.conj(np.fft.fft(reference)), axis=-1)
    return full[..., :W] / N


def autocorr_offset(seq, delta_kappa, delta_lambda):
    """
    Brute-force autocorrelation of `seq` at lag `delta_kappa` under a
    normalized frequency offset `delta_lambda` (subcarrier units)::

        (1/N) sum_n seq[(n + dk) mod N] conj(seq[n]) exp(2j pi dl n / N)
    """
    s = np.asarray(seq)
    N = s.size
    n = np.arange(N)
    rot = np.exp(2j * np.pi * delta_lambda * n / N)
    return complex(np.sum(np.roll(s, -int(delta_kappa)) * np.conj(s) * rot) / N)


def sinc_n(x, N):
    """
    Periodic sinc ``sin(pi x) / (N sin(pi x / N))``.

    At ``x = 0 (mod N)`` the removable singularity takes its limit, which has
    magnitude one. Arguments are reduced before multiplying by pi so that
    large ``|x|`` keeps full precision.
    """
    x = np.asarray(x, dtype=float)
    # symmetric reductions (exact in floating point) keep small |x| small
    r = x - 2 * N * np.round(x / (2 * N))
    m = r - 2 * np.round(r / 2)
    # exact zeros at the integers, where sin(pi m) would leave rounding noise
    num = np.where(m == np.round(m), 0.0, np.sin(np.pi * m))
    den = N * np.sin(np.pi * r / N)
    singular = np.mod(r, N) == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(singular, np.where(np.mod(r, 2 * N) == 0, 1.0, (-1.0) ** (N + 1)),
                       num / np.where(singular, 1.0, den))
    return out if out.ndim else float(out)


def autocorr_mag_sq_closed(mu, N, delta_kappa, delta_lambda):
    """Closed-form ``|sinc(delta_lambda - mu*delta_kappa)|**2``."""
    x = np.asarray(delta_lambda, dtype=float) - mu * np.asarray(delta_kappa, dtype=np.int64)
    return sinc_n(x, N) ** 2
