"""Maximum-likelihood decoding of the space-frequency block code.

The code places each group of 2*P*L symbols on a disjoint window of L*Mt
subcarriers, and the frequency-domain channel acts independently per
subcarrier, so the ML metric separates over groups.  Decoding therefore runs
an exhaustive (or decoupled) search per group over the candidate codeword set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelFrequencyGrid, ReceivedBlock
from .codec import NUM_TX, build_theta, group_codewords
from .config import SystemConfig
from .core import CapExceededError, constellation_points, demodulate

# Largest candidate set an exhaustive search will enumerate.  QPSK with
# P=2, L=2 needs 4**16 = 2**32 candidates, which is out of reach; the decoupled
# search brings that back to 2 * 4**8.
DEFAULT_SEARCH_CAP = 2 ** 20

EXHAUSTIVE = "exhaustive"
DECOUPLED = "decoupled"


@dataclass
class GroupObservation:
    """Received samples and channel gains for one code group.

    received : complex [P, L*Mt, Mr]
        Frequency-domain receive samples on the group's subcarrier window,
        one slice per antenna state.
    response : complex [P, L*Mt, Mr, Mt]
        Channel frequency response on the same window.
    snr_linear : float
        Per-subcarrier SNR used in the transmit scaling sqrt(snr / Mt).
    """

    received: np.ndarray
    response: np.ndarray
    snr_linear: float

    @property
    def num_states(self) -> int:
        return self.received.shape[0]

    @property
    def span(self) -> int:
        return self.received.shape[1]


def group_observation(
    received: ReceivedBlock,
    grid: ChannelFrequencyGrid,
    config: SystemConfig,
    group_index: int,
) -> GroupObservation:
    """Slice out the window for one group (0-based index)."""
    if not 0 <= group_index < config.num_groups:
        raise ValueError(f"group_index {group_index} out of range [0, {config.num_groups})")
    span = config.group_span
    window = slice(group_index * span, (group_index + 1) * span)
    return GroupObservation(
        received=received.samples[:, window, :],
        response=grid.response[:, window, :, :],
        snr_linear=received.snr_linear,
    )


def enumerate_symbol_tuples(constellation: str, length: int) -> np.ndarray:
    """All symbol tuples of the given length, lexicographic in symbol index.

    Row r spells r in base Q with the first symbol as the most significant
    digit, so ties resolved by np.argmin pick the lexicographically smallest
    candidate.
    """
    points = constellation_points(constellation)
    q = len(points)
    count = q ** length
    idx = np.arange(count)
    digits = np.empty((count, length), dtype=np.intp)
    for t in range(length):
        digits[:, t] = (idx // q ** (length - 1 - t)) % q
    return points[digits]


_candidate_cache: dict = {}


def _candidates(constellation: str, theta: np.ndarray, num_states: int, num_paths: int, half: str):
    """Candidate (symbols, codewords, outer products), cached per code.

    half selects the search space: "full" enumerates all 2PL positions,
    "odd"/"even" enumerate only that sub-stream with the other one zeroed.
    The outer-product table conj(c_i) c_j per subcarrier feeds the batched
    decoder's energy term.
    """
    key = (constellation, num_states, num_paths, half, theta.tobytes())
    hit = _candidate_cache.get(key)
    if hit is not None:
        return hit
    pl = num_states * num_paths
    if half == "full":
        symbols = enumerate_symbol_tuples(constellation, 2 * pl)
    else:
        active = enumerate_symbol_tuples(constellation, pl)
        symbols = np.zeros((active.shape[0], 2 * pl), dtype=complex)
        offset = 0 if half == "odd" else 1
        symbols[:, offset::2] = active
    codewords = group_codewords(symbols, theta, num_states, num_paths)
    outer = np.conj(codewords)[:, :, :, :, None] * codewords[:, :, :, None, :]
    if len(_candidate_cache) >= 16:
        _candidate_cache.clear()
    _candidate_cache[key] = (symbols, codewords, outer)
    return _candidate_cache[key]


def _metric(obs: GroupObservation, codewords: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance of each candidate from the observation."""
    scale = np.sqrt(obs.snr_linear / NUM_TX)
    predicted = scale * np.einsum("pnji,kpni->kpnj", obs.response, codewords)
    diff = predicted - obs.received[None, :, :, :]
    return np.einsum("kpnj,kpnj->k", diff, np.conj(diff)).real


def ml_decode_group(
    obs: GroupObservation,
    theta: np.ndarray,
    constellation: str,
    cap: int = DEFAULT_SEARCH_CAP,
) -> np.ndarray:
    """Exhaustive ML search over all candidate groups; returns 2PL symbols."""
    num_states = obs.num_states
    num_paths = obs.span // NUM_TX
    q = len(constellation_points(constellation))
    count = q ** (2 * num_states * num_paths)
    if count > cap:
        raise CapExceededError(
            f"exhaustive search needs {count} candidates, cap is {cap}; "
            "use the decoupled decoder or a smaller code"
        )
    symbols, codewords, _ = _candidates(constellation, theta, num_states, num_paths, "full")
    best = int(np.argmin(_metric(obs, codewords)))
    return symbols[best].copy()


def decoupled_ml_decode_group(
    obs: GroupObservation,
    theta: np.ndarray,
    constellation: str,
    cap: int = DEFAULT_SEARCH_CAP,
) -> np.ndarray:
    """Two independent half-searches over the odd and even sub-streams.

    Each codeword entry carries either odd-indexed or even-indexed symbols,
    never a mix, so the ML metric evaluated with the complementary sub-stream
    zeroed scores one half in isolation.  When the channel response is equal
    across each subcarrier pair the cross term between the halves vanishes and
    the combined result equals the exhaustive search.
    """
    num_states = obs.num_states
    num_paths = obs.span // NUM_TX
    q = len(constellation_points(constellation))
    count = q ** (num_states * num_paths)
    if count > cap:
        raise CapExceededError(
            f"decoupled search needs {count} candidates per half, cap is {cap}"
        )
    out = np.empty(2 * num_states * num_paths, dtype=complex)
    for half, offset in (("odd", 0), ("even", 1)):
        symbols, codewords, _ = _candidates(constellation, theta, num_states, num_paths, half)
        best = int(np.argmin(_metric(obs, codewords)))
        out[offset::2] = symbols[best, offset::2]
    return out


_GROUP_DECODERS = {
    EXHAUSTIVE: ml_decode_group,
    DECOUPLED: decoupled_ml_decode_group,
}


def _batched_argmin(received, grid, config, codewords, outer):
    """Index of the metric-minimizing candidate for every group at once.

    Minimizes the expanded metric |y|^2 - 2 Re<y, s H c> + s^2 c^H (H^H H) c
    with the candidate-independent |y|^2 dropped; the remaining terms reduce
    to two small matrix products over the cached candidate tables, which is
    far cheaper than forming every predicted observation.
    """
    m = config.num_groups
    span = config.group_span
    p = config.num_states
    num_rx = config.num_rx
    # [M, P, span, Mr] observations and [M, P, span, Mr, Mt] responses
    y = received.samples[:, : m * span, :].reshape(p, m, span, num_rx).transpose(1, 0, 2, 3)
    h = grid.response[:, : m * span, :, :].reshape(p, m, span, num_rx, NUM_TX).transpose(1, 0, 2, 3, 4)
    scale = np.sqrt(received.snr_linear / NUM_TX)
    matched = np.einsum("mpnji,mpnj->mpni", np.conj(h), y)
    gram = np.einsum("mpnji,mpnjk->mpnik", np.conj(h), h)
    k = codewords.shape[0]
    cross = (matched.reshape(m, -1) @ np.conj(codewords).reshape(k, -1).T).real
    energy = (gram.reshape(m, -1) @ outer.reshape(k, -1).T).real
    return np.argmin(scale * scale * energy - 2.0 * scale * cross, axis=1)


def decode(
    received: ReceivedBlock,
    grid: ChannelFrequencyGrid,
    config: SystemConfig,
    mode: str = EXHAUSTIVE,
    cap: int = DEFAULT_SEARCH_CAP,
) -> np.ndarray:
    """Recover the transmitted bit stream from one received OFDM block.

    Returns the bits in the original stream order (group by group, symbol by
    symbol).  mode selects "exhaustive" or "decoupled" per-group search; both
    process all groups in one vectorized pass and agree with the per-group
    functions above.
    """
    if mode not in _GROUP_DECODERS:
        raise ValueError(f"unknown decoder mode {mode!r}")
    theta = build_theta(config.rotation_angles, config.pl)
    p, el = config.num_states, config.num_paths
    q = len(constellation_points(config.constellation))
    decoded = np.empty((config.num_groups, config.symbols_per_group), dtype=complex)
    if mode == EXHAUSTIVE:
        if q ** config.symbols_per_group > cap:
            raise CapExceededError(
                f"exhaustive search needs {q ** config.symbols_per_group} "
                f"candidates per group, cap is {cap}"
            )
        symbols, codewords, outer = _candidates(config.constellation, theta, p, el, "full")
        decoded[:, :] = symbols[_batched_argmin(received, grid, config, codewords, outer)]
    else:
        if q ** (p * el) > cap:
            raise CapExceededError(
                f"decoupled search needs {q ** (p * el)} candidates per half, cap is {cap}"
            )
        for half, offset in (("odd", 0), ("even", 1)):
            symbols, codewords, outer = _candidates(config.constellation, theta, p, el, half)
            best = _batched_argmin(received, grid, config, codewords, outer)
            decoded[:, offset::2] = symbols[best][:, offset::2]
    return demodulate(decoded.ravel(), config.constellation)
