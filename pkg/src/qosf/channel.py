"""Frequency-selective Rayleigh channel: tap draws, frequency response, noise.

The link is simulated directly per subcarrier; with quasi-static fading and a
cyclic prefix covering the delay spread this is exactly equivalent to the
time-domain CP/FFT chain, which :func:`validate_against_time_domain`
demonstrates via a DFT identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import SfCodeword
from .config import SystemConfig
from .core import complex_normal


class NonIntegerDelayError(ValueError):
    """A tap delay is not an integer number of sample periods."""


@dataclass
class ChannelRealization:
    """Complex tap amplitudes, shape (P, num_rx, num_tx, L), plus the profile."""

    taps: np.ndarray
    delays_s: tuple
    path_powers: tuple


@dataclass
class ChannelFrequencyGrid:
    """Per-subcarrier response, shape (P, num_subcarriers, num_rx, num_tx)."""

    response: np.ndarray


@dataclass
class ReceivedBlock:
    """Post-FFT receive samples, shape (P, num_subcarriers, num_rx)."""

    samples: np.ndarray
    snr_linear: float


def draw_channel(config: SystemConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw one quasi-static realization.

    Taps are independent zero-mean circular Gaussians across state, antenna
    pair and path, with per-path variance from the configured power profile.
    """
    shape = (config.num_states, config.num_rx, config.num_tx, config.num_paths)
    taps = complex_normal(rng, shape)
    sigma = np.sqrt(np.asarray(config.path_powers))  # [P, L]
    taps *= sigma[:, None, None, :]
    return ChannelRealization(taps=taps, delays_s=config.delays_s, path_powers=config.path_powers)


def frequency_response(
    realization: ChannelRealization, config: SystemConfig
) -> ChannelFrequencyGrid:
    """Evaluate H_p(n) = sum_l alpha_l * exp(-j 2 pi n df tau_l) on every tone."""
    n = np.arange(config.num_subcarriers)
    delays = np.asarray(realization.delays_s)  # [P, L]
    # [P, L, Nc] twiddle factors; delta_f * tau in units of cycles per tone.
    phase = np.exp(-2j * np.pi * config.subcarrier_spacing_hz * delays[:, :, None] * n)
    response = np.einsum("pjil,pln->pnji", realization.taps, phase)
    return ChannelFrequencyGrid(response=response)


def apply(
    codeword: SfCodeword,
    grid: ChannelFrequencyGrid,
    snr_linear: float,
    rng: np.random.Generator,
    noiseless: bool = False,
) -> ReceivedBlock:
    """Pass a codeword through the channel at received SNR gamma.

    y_p^j(n) = sqrt(gamma / num_tx) * sum_i H_p^{i,j}(n) c_p^i(n) + z, with z
    unit-variance circular Gaussian per complex sample (or zero when
    noiseless).
    """
    h = grid.response
    c = codeword.states
    p, nc, num_rx, num_tx = h.shape
    if c.shape != (p, num_tx, nc):
        raise ValueError(f"codeword shape {c.shape} does not match channel {h.shape}")
    if snr_linear <= 0:
        raise ValueError("snr_linear must be positive")
    signal = np.sqrt(snr_linear / num_tx) * np.einsum("pnji,pin->pnj", h, c)
    if not noiseless:
        signal = signal + complex_normal(rng, signal.shape)
    return ReceivedBlock(samples=signal, snr_linear=float(snr_linear))


def validate_against_time_domain(
    realization: ChannelRealization, config: SystemConfig
) -> float:
    """Max deviation between the tone-wise response and a DFT of the taps.

    Places each tap at its integer sample index in a length-Nc impulse
    response and compares the Nc-point DFT against frequency_response.
    Requires every delay to be an integer multiple of the sample period.
    """
    nc = config.num_subcarriers
    sample = config.sample_period_s
    delays = np.asarray(realization.delays_s)
    positions = delays / sample
    rounded = np.rint(positions)
    if np.any(np.abs(positions - rounded) > 1e-6):
        raise NonIntegerDelayError(
            f"delays {delays.tolist()} are not integer multiples of {sample} s"
        )
    if np.any(rounded >= nc):
        raise NonIntegerDelayError("delay exceeds the OFDM symbol length")
    grid = frequency_response(realization, config)
    impulse = np.zeros((config.num_states, config.num_rx, config.num_tx, nc), dtype=complex)
    for p in range(config.num_states):
        for l, k in enumerate(rounded[p].astype(int)):
            impulse[p, :, :, k] += realization.taps[p, :, :, l]
    dft = np.fft.fft(impulse, axis=-1)  # [P, Mr, Mt, Nc]
    return float(np.max(np.abs(np.moveaxis(dft, -1, 1) - grid.response)))
