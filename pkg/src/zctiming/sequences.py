"""
Zadoff-Chu and truncated PN (m-sequence) generators.

All sequence indexing in this package is modulo the sequence period.
"""

from dataclasses import dataclass
from math import gcd

import numpy as np

#: Default LFSR for the PN baseline: x^25 + x^3 + 1, period 2**25 - 1.
DEFAULT_PN_DEGREE = 25
DEFAULT_PN_TAPS = (25, 3)

# Above this degree the exhaustive maximal-length check is skipped.
_MAX_VERIFIED_DEGREE = 16


def _frozen(arr):
    arr = np.asarray(arr)
    arr.setflags(write=False)
    return arr


def mod_index(n, N):
    """Reduce index (or index array) `n` into ``[0, N-1]``, negatives included."""
    if N <= 0:
        raise ValueError(f"period N must be positive, got {N}")
    return np.mod(n, N)


@dataclass(frozen=True, eq=False)
class ZcSequence:
    """A length-N Zadoff-Chu sequence with root `mu`."""

    N: int
    mu: int
    samples: np.ndarray

    def __len__(self):
        return self.N

    def __array__(self, dtype=None, copy=None):
        return self.samples if dtype is None else self.samples.astype(dtype)


@dataclass(frozen=True, eq=False)
class PnSequence:
    """Truncated m-sequence mapped to +/-1 symbols (bit 0 -> +1, bit 1 -> -1)."""

    degree: int
    taps: tuple
    length: int
    symbols: np.ndarray

    @property
    def period(self):
        return 2**self.degree - 1

    def __len__(self):
        return self.length

    def __array__(self, dtype=None, copy=None):
        return self.symbols if dtype is None else self.symbols.astype(dtype)


def validate_zc_params(N, mu):
    if int(N) != N or N < 3 or N % 2 == 0:
        raise ValueError(f"N must be odd and >= 3, got N={N}")
    if int(mu) != mu or not 1 <= mu <= N - 1:
        raise ValueError(f"mu must be an integer in [1, N-1], got mu={mu}")
    if gcd(int(mu), int(N)) != 1:
        raise ValueError(f"mu must be coprime to N, got gcd(mu={mu}, N={N}) != 1")


def zc_generate(N, mu):
    """
    Generate the Zadoff-Chu sequence ``x[n] = exp(-1j*pi*mu*n*(n+1)/N)``.

    Parameters
    ----------
    N : int
        Odd sequence length, at least 3.
    mu : int
        Root index, ``1 <= mu <= N-1`` and coprime to N.

    Returns
    -------
    ZcSequence
    """
    validate_zc_params(N, mu)
    N, mu = int(N), int(mu)
    n = np.arange(N, dtype=np.int64)
    # mu*n*(n+1) is even, so reducing it modulo 2N keeps the phase exact
    # and the float argument small.
    phase = np.mod(mu * (n * (n + 1)), 2 * N)
    samples = np.exp(-1j * np.pi * phase / N)
    return ZcSequence(N, mu, _frozen(samples))


def _lfsr_bits(degree, taps, count, state=None):
    """
    Run a Fibonacci LFSR with recurrence ``a[n+d] = XOR_t a[n+d-t]``.

    Returns `count` output bits and the final register state. Bit i of the
    integer state holds ``a[n+i]``.
    """
    if state is None:
        state = (1 << degree) - 1
    mask = 0
    for t in taps:
        mask |= 1 << (degree - t)
    out = np.empty(count, dtype=np.uint8)
    top = degree - 1
    for i in range(count):
        out[i] = state & 1
        fb = (state & mask).bit_count() & 1
        state = (state >> 1) | (fb << top)
    return out, state


def lfsr_cycle_length(degree, taps):
    """Cycle length of the LFSR started from the all-ones state (exhaustive walk)."""
    start = (1 << degree) - 1
    mask = 0
    for t in taps:
        mask |= 1 << (degree - t)
    top = degree - 1
    state = start
    for steps in range(1, 2**degree + 1):
        fb = (state & mask).bit_count() & 1
        state = (state >> 1) | (fb << top)
        if state == start:
            return steps
    return None


def pn_generate(degree=DEFAULT_PN_DEGREE, taps=DEFAULT_PN_TAPS, length=839):
    """
    Truncated PN sequence from a maximal-length LFSR seeded with all ones.

    For ``degree <= 16`` the taps are checked exhaustively to produce the full
    period ``2**degree - 1``; larger registers are trusted as given.
    """
    taps = tuple(sorted({int(t) for t in taps}, reverse=True))
    if not taps:
        raise ValueError("taps must be a non-empty set of tap positions")
    if degree < 1 or taps[0] != degree or taps[-1] < 1:
        raise ValueError(
            f"taps must lie in [1, degree] and include degree={degree}, got {taps}")
    period = 2**degree - 1
    if length < 1 or length > period:
        raise ValueError(
            f"length must be in [1, 2**degree - 1 = {period}], got {length}")
    if degree <= _MAX_VERIFIED_DEGREE and lfsr_cycle_length(degree, taps) != period:
        raise ValueError(f"taps {taps} do not give a maximal-length sequence")
    bits, _ = _lfsr_bits(degree, taps, length)
    symbols = (1.0 - 2.0 * bits).astype(np.complex128)
    return PnSequence(degree, taps, length, _frozen(symbols))


def cyclic_shift(seq, k):
    """Return ``out[n] = seq[(n + k) mod N]``."""
    seq = np.asarray(seq)
    return np.roll(seq, -int(k))
