"""Shared numeric primitives: Hadamard matrices, constellations, bit mapping.

Everything here is a pure function of its inputs; callers may use these
concurrently without synchronization.
"""

from __future__ import annotations

import numpy as np

BPSK = "bpsk"
QPSK = "qpsk"

# Point order is the fixed enumeration order used for nearest-point
# tie-breaking and for lexicographic candidate ordering in the ML search.
# Index equals the integer value of the Gray-coded bit label.
_CONSTELLATIONS = {
    BPSK: np.array([1.0 + 0.0j, -1.0 + 0.0j]),
    QPSK: np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0),
}

_BITS_PER_SYMBOL = {BPSK: 1, QPSK: 2}


class NotPowerOfTwoError(ValueError):
    """Requested Hadamard order is not a power of two."""


class OddBitCountError(ValueError):
    """QPSK modulation needs an even number of bits."""


class CapExceededError(RuntimeError):
    """A configured work cap (search space, grid size) would be exceeded."""


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def constellation_points(constellation: str) -> np.ndarray:
    """Unit-average-energy points of a named constellation, in enumeration order."""
    try:
        return _CONSTELLATIONS[constellation]
    except KeyError:
        raise ValueError(f"unknown constellation {constellation!r}") from None


def bits_per_symbol(constellation: str) -> int:
    constellation_points(constellation)
    return _BITS_PER_SYMBOL[constellation]


def hadamard(order: int) -> np.ndarray:
    """Sylvester-ordered +-1 Hadamard matrix of the given power-of-two order.

    Satisfies H @ H.T == order * I exactly (integer entries).  The natural
    Sylvester ordering matters: it fixes the sign pattern of the combined
    symbols across radiation states, so a row-permuted Hadamard matrix would
    produce a different (and untested) codeword layout.
    """
    if not is_power_of_two(order):
        raise NotPowerOfTwoError(f"Hadamard order must be a power of two, got {order}")
    h = np.array([[1]], dtype=np.int64)
    while h.shape[0] < order:
        h = np.block([[h, h], [h, -h]])
    return h


def modulate(bits, constellation: str) -> np.ndarray:
    """Map a 0/1 bit sequence to unit-energy symbols.

    BPSK: bit 0 -> +1, bit 1 -> -1.  QPSK: Gray-coded bit pairs, first bit
    selects the real sign, second the imaginary sign (0 -> +, 1 -> -).
    """
    bits = np.asarray(bits, dtype=np.int64)
    if bits.ndim != 1:
        raise ValueError("bits must be one-dimensional")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("bits must contain only 0 and 1")
    points = constellation_points(constellation)
    k = bits_per_symbol(constellation)
    if bits.size % k != 0:
        raise OddBitCountError(f"{constellation} needs a multiple of {k} bits, got {bits.size}")
    labels = bits.reshape(-1, k) @ (1 << np.arange(k - 1, -1, -1))
    return points[labels]


def demodulate(symbols, constellation: str) -> np.ndarray:
    """Nearest-point hard decision, inverse of :func:`modulate` on exact points.

    Distance ties go to the point that comes first in the constellation's
    enumeration order, so the decision is deterministic.
    """
    symbols = np.asarray(symbols, dtype=complex)
    points = constellation_points(constellation)
    k = bits_per_symbol(constellation)
    # argmin returns the first minimal index, which is the tie rule we want.
    labels = np.argmin(np.abs(symbols[:, None] - points[None, :]), axis=1)
    shifts = np.arange(k - 1, -1, -1)
    bits = (labels[:, None] >> shifts[None, :]) & 1
    return bits.reshape(-1).astype(np.int64)


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Zero-mean circular complex Gaussian samples, total variance per sample.

    Real and imaginary parts are interleaved in the underlying draw so that a
    leading-dimension prefix of a larger request reproduces the smaller
    request exactly (used for common-random-number pairing across scenarios).
    """
    raw = rng.standard_normal(size=(*tuple(shape), 2))
    return (raw[..., 0] + 1j * raw[..., 1]) * np.sqrt(variance / 2.0)
