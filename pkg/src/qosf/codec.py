"""Quasi-orthogonal space-frequency codeword construction.

A block of 2*P*L source symbols per group is phase-rotated and Hadamard
combined, then laid out as L stacked Alamouti sub-blocks per radiation state.
Each state's matrix spans all subcarriers of the group, giving one symbol per
tone per state (rate one) while spreading every source symbol across space,
frequency and radiation state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .core import hadamard

NUM_TX = 2  # Alamouti sub-block size; the construction is specific to two antennas


@dataclass
class SfCodeword:
    """Per-state transmit matrices, one row per antenna, one column per tone.

    states has shape (P, num_tx, num_subcarriers).  Columns past
    num_groups * 2 * L are zero padding and transmit no energy.
    """

    states: np.ndarray
    num_groups: int

    @property
    def num_states(self) -> int:
        return self.states.shape[0]

    @property
    def num_subcarriers(self) -> int:
        return self.states.shape[2]


def build_theta(angles, pl: int) -> np.ndarray:
    """Combining matrix: Hadamard times a diagonal of unit phasors.

    theta = H(pl) @ diag(1, e^{j*a1}, ..., e^{j*a_{pl-1}}), so that
    theta^H @ theta = pl * I for any angle choice.
    """
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (pl - 1,):
        raise ValueError(f"expected {pl - 1} rotation angles, got {angles.shape}")
    phases = np.concatenate(([1.0 + 0.0j], np.exp(1j * angles)))
    return hadamard(pl) * phases[None, :]


def combine(group, theta: np.ndarray) -> np.ndarray:
    """Rotate-and-combine one symbol group, keeping unit average entry energy.

    Odd-position and even-position sub-streams are combined independently with
    the same matrix; the 1/sqrt(PL) factor makes each combined value unit
    energy for unit-energy inputs.
    """
    group = np.asarray(group, dtype=complex)
    pl = theta.shape[0]
    if theta.shape != (pl, pl):
        raise ValueError("theta must be square")
    if group.shape != (2 * pl,):
        raise ValueError(f"expected a group of {2 * pl} symbols, got {group.shape}")
    kappa = 1.0 / np.sqrt(pl)
    out = np.empty(2 * pl, dtype=complex)
    out[0::2] = kappa * (theta @ group[0::2])
    out[1::2] = kappa * (theta @ group[1::2])
    return out


def alamouti(x1: complex, x2: complex) -> np.ndarray:
    """The 2x2 orthogonal design [[x1, x2], [-x2*, x1*]]."""
    return np.array([[x1, x2], [-np.conj(x2), np.conj(x1)]], dtype=complex)


def encode_group(combined, state: int, num_paths: int) -> np.ndarray:
    """Stack the L Alamouti sub-blocks of one state from a combined group.

    state is 1-based; state p consumes combined values 2(p-1)L+1 .. 2pL
    (1-based), i.e. L consecutive (odd, even) pairs.
    """
    combined = np.asarray(combined, dtype=complex)
    num_states = combined.size // (2 * num_paths)
    if combined.size != num_states * 2 * num_paths:
        raise ValueError("combined group length must be 2 * states * paths")
    if not 1 <= state <= num_states:
        raise ValueError(f"state {state} out of range 1..{num_states}")
    base = 2 * (state - 1) * num_paths
    blocks = [
        alamouti(combined[base + 2 * k], combined[base + 2 * k + 1])
        for k in range(num_paths)
    ]
    return np.vstack(blocks)


def group_codewords(groups, theta: np.ndarray, num_states: int, num_paths: int) -> np.ndarray:
    """Per-state transmit blocks for a batch of symbol groups.

    groups has shape [G, 2*P*L]; the result has shape [G, P, 2L, num_tx],
    indexed (group, state, local subcarrier, antenna).  Used both by
    :func:`encode` and by the ML decoder's candidate enumeration so the layout
    has a single source of truth.
    """
    groups = np.atleast_2d(np.asarray(groups, dtype=complex))
    pl = num_states * num_paths
    if theta.shape != (pl, pl):
        raise ValueError(f"theta must be {pl}x{pl} for {num_states} states, {num_paths} paths")
    if groups.shape[1] != 2 * pl:
        raise ValueError(f"expected groups of {2 * pl} symbols, got {groups.shape[1]}")
    kappa = 1.0 / np.sqrt(pl)
    g = groups.shape[0]
    odd = (kappa * (groups[:, 0::2] @ theta.T)).reshape(g, num_states, num_paths)
    even = (kappa * (groups[:, 1::2] @ theta.T)).reshape(g, num_states, num_paths)
    out = np.empty((g, num_states, 2 * num_paths, NUM_TX), dtype=complex)
    out[:, :, 0::2, 0] = odd
    out[:, :, 0::2, 1] = even
    out[:, :, 1::2, 0] = -np.conj(even)
    out[:, :, 1::2, 1] = np.conj(odd)
    return out


def encode(symbols, config: SystemConfig) -> SfCodeword:
    """Build the full per-state codeword set from a symbol stream.

    The stream is split into num_groups consecutive groups of 2*P*L symbols;
    group m occupies subcarriers [m*2L, (m+1)*2L) in every state.
    """
    symbols = np.asarray(symbols, dtype=complex)
    p, el = config.num_states, config.num_paths
    m = config.num_groups
    expected = m * config.symbols_per_group
    if symbols.shape != (expected,):
        raise ValueError(
            f"expected {expected} symbols ({m} groups of {config.symbols_per_group}), "
            f"got {symbols.shape}"
        )
    if config.num_tx != NUM_TX:
        raise ValueError("encoding is only defined for two transmit antennas")

    theta = build_theta(config.rotation_angles, config.pl)
    blocks = group_codewords(symbols.reshape(m, config.symbols_per_group), theta, p, el)
    states = np.zeros((p, NUM_TX, config.num_subcarriers), dtype=complex)
    # blocks is [group, state, local subcarrier, antenna]; concatenate groups
    # along the subcarrier axis, leaving any trailing columns as zero padding.
    states[:, :, : m * config.group_span] = blocks.transpose(1, 3, 0, 2).reshape(
        p, NUM_TX, m * config.group_span
    )
    return SfCodeword(states=states, num_groups=m)


# Text serialization --------------------------------------------------------


def _format_complex(z: complex) -> str:
    re, im = float(z.real), float(z.imag)
    sign = "+" if im >= 0 else "-"
    return f"{re!r}{sign}{abs(im)!r}j"


def write_codeword(codeword: SfCodeword, fh) -> None:
    """One line per (state, antenna) pair, comma-separated "re+imj" entries."""
    close = False
    if isinstance(fh, (str, bytes)) or hasattr(fh, "__fspath__"):
        fh = open(fh, "w")
        close = True
    try:
        for state in codeword.states:
            for row in state:
                fh.write(",".join(_format_complex(z) for z in row) + "\n")
    finally:
        if close:
            fh.close()


def read_codeword(path, num_tx: int = NUM_TX) -> np.ndarray:
    """Parse a codeword dump back into a (P, num_tx, Nc) array."""
    with open(path) as fh:
        rows = [
            np.array([complex(tok) for tok in line.split(",")])
            for line in fh
            if line.strip()
        ]
    if not rows or len(rows) % num_tx != 0:
        raise ValueError(f"expected a multiple of {num_tx} non-empty lines")
    widths = {row.size for row in rows}
    if len(widths) != 1:
        raise ValueError("all lines must have the same number of entries")
    return np.array(rows).reshape(len(rows) // num_tx, num_tx, rows[0].size)
