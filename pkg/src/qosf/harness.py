"""Seeded Monte Carlo BER engine: sweep SNR, persist results, fit slopes.

Every random draw comes from a counter-based seed tree keyed on
(master_seed, snr_index, block_index, stream), so results do not depend on
worker count or scheduling, and schemes sharing a master seed see the same
channel and noise per block (common random numbers) unless a sweep opts out.
"""

from __future__ import annotations

import concurrent.futures
import json
import os
import time
import zlib
from dataclasses import dataclass, field

import numpy as np

from .channel import apply, draw_channel, frequency_response
from .config import SystemConfig, config_from_dict, config_to_dict
from .decoder import DECOUPLED, EXHAUSTIVE
from .schemes import AlamoutiSfScheme, QosfScheme
from .version import __version__

SCHEME_QOSF = "qosf"
SCHEME_ALAMOUTI = "alamouti-sf"
_SCHEMES = (SCHEME_QOSF, SCHEME_ALAMOUTI)

# Sub-stream ids under each (snr point, block) seed node.
_STREAM_BITS = 0
_STREAM_CHANNEL = 1
_STREAM_NOISE = 2

DEFAULT_SNR_DB = tuple(float(s) for s in range(0, 21, 2))


class InvalidSpecError(ValueError):
    """Sweep description fails validation."""


class InsufficientDataError(ValueError):
    """Too few usable points for a slope fit."""


class ResultsParseError(ValueError):
    """Results file is malformed; message names the offending line."""


@dataclass(frozen=True)
class SweepSpec:
    """Everything run_sweep needs: scenario, stopping rule, decoder choice.

    independent_streams breaks the common-random-numbers pairing by folding
    the scenario label into the seed tree, for runs that must not share
    channel draws with other scenarios.
    """

    config: SystemConfig
    snr_db_points: tuple = DEFAULT_SNR_DB
    min_bit_errors: int = 200
    max_ofdm_blocks: int = 20_000
    decoder_mode: str = EXHAUSTIVE
    scenario_label: str = "proposed"
    scheme: str = SCHEME_QOSF
    noiseless: bool = False
    independent_streams: bool = False

    def __post_init__(self):
        points = tuple(float(s) for s in self.snr_db_points)
        object.__setattr__(self, "snr_db_points", points)
        if not points:
            raise InvalidSpecError("need at least one SNR point")
        if any(later <= earlier for earlier, later in zip(points, points[1:])):
            raise InvalidSpecError("SNR points must be strictly increasing")
        if self.min_bit_errors < 1:
            raise InvalidSpecError("min_bit_errors must be at least 1")
        if self.max_ofdm_blocks < 1:
            raise InvalidSpecError("max_ofdm_blocks must be at least 1")
        if self.scheme not in _SCHEMES:
            raise InvalidSpecError(f"unknown scheme {self.scheme!r}")
        if self.decoder_mode not in (EXHAUSTIVE, DECOUPLED):
            raise InvalidSpecError(f"unknown decoder mode {self.decoder_mode!r}")
        if not self.scenario_label or any(c in self.scenario_label for c in "\t\n"):
            raise InvalidSpecError("scenario_label must be non-empty printable text")


@dataclass
class BerPoint:
    snr_db: float
    bits_simulated: int
    bit_errors: int
    ber: float

    def __post_init__(self):
        if self.bits_simulated <= 0:
            raise ValueError("bits_simulated must be positive")
        if not 0.0 <= self.ber <= 1.0:
            raise ValueError(f"ber {self.ber} outside [0, 1]")

    @classmethod
    def from_counts(cls, snr_db: float, bits: int, errors: int) -> "BerPoint":
        return cls(snr_db=float(snr_db), bits_simulated=bits, bit_errors=errors,
                   ber=errors / bits)


@dataclass
class SweepResult:
    spec: SweepSpec
    points: list
    code_version: str
    master_seed: int
    wall_time_s: float = field(default=0.0, compare=False)


def build_scheme(spec: SweepSpec):
    if spec.scheme == SCHEME_QOSF:
        return QosfScheme(spec.config, decoder_mode=spec.decoder_mode)
    return AlamoutiSfScheme(spec.config)


def block_rng(
    master_seed: int,
    snr_index: int,
    block_index: int,
    stream: int,
    scenario_key: int | None = None,
) -> np.random.Generator:
    """Generator for one (point, block, stream) node of the seed tree."""
    spawn = (snr_index, block_index, stream)
    if scenario_key is not None:
        spawn = (scenario_key,) + spawn
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=spawn))


def _scenario_key(spec: SweepSpec) -> int | None:
    if not spec.independent_streams:
        return None
    return zlib.crc32(spec.scenario_label.encode("utf-8"))


def run_point(spec: SweepSpec, snr_db: float, snr_index: int) -> BerPoint:
    """Simulate one SNR point until min_bit_errors or the block cap.

    snr_index is the point's position in the sweep grid; it selects the
    random stream, so sweeps whose grids share a common prefix draw the same
    channels and noise at the same SNR.
    """
    scheme = build_scheme(spec)
    key = _scenario_key(spec)
    snr_linear = 10.0 ** (snr_db / 10.0)
    seed = spec.config.master_seed
    bits_total = 0
    errors = 0
    block = 0
    while errors < spec.min_bit_errors and block < spec.max_ofdm_blocks:
        bit_rng = block_rng(seed, snr_index, block, _STREAM_BITS, key)
        bits = bit_rng.integers(0, 2, size=scheme.bits_per_block, dtype=np.int64)
        codeword = scheme.encode_bits(bits)
        realization = draw_channel(spec.config, block_rng(seed, snr_index, block, _STREAM_CHANNEL, key))
        grid = frequency_response(realization, spec.config)
        received = apply(codeword, grid, snr_linear,
                         block_rng(seed, snr_index, block, _STREAM_NOISE, key),
                         noiseless=spec.noiseless)
        decoded = scheme.decode_bits(received, grid)
        errors += int(np.count_nonzero(decoded != bits))
        bits_total += bits.size
        block += 1
    return BerPoint.from_counts(snr_db, bits_total, errors)


def _point_task(args):
    spec, snr_db, snr_index = args
    return run_point(spec, snr_db, snr_index)


def default_worker_count() -> int:
    env = os.environ.get("QOSF_WORKERS")
    if env:
        count = int(env)
        if count < 1:
            raise ValueError("QOSF_WORKERS must be at least 1")
        return count
    return 1


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Run every SNR point, possibly in parallel; output is worker-invariant."""
    if workers is None:
        workers = default_worker_count()
    start = time.perf_counter()
    tasks = [(spec, snr, i) for i, snr in enumerate(spec.snr_db_points)]
    if workers == 1 or len(tasks) == 1:
        points = [_point_task(t) for t in tasks]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_point_task, tasks))
    return SweepResult(
        spec=spec,
        points=points,
        code_version=__version__,
        master_seed=spec.config.master_seed,
        wall_time_s=time.perf_counter() - start,
    )


def estimate_diversity_order(points, window: int = 3) -> float:
    """Negative slope of log10(BER) vs SNR, in decades per 10 dB.

    Fits the highest-SNR `window` points that have nonzero BER; steeper decay
    means higher diversity order.
    """
    usable = [p for p in points if p.ber > 0]
    usable = usable[-window:]
    if len(usable) < 2:
        raise InsufficientDataError(
            f"need at least 2 points with nonzero BER, have {len(usable)}"
        )
    snr = np.array([p.snr_db for p in usable])
    log_ber = np.log10([p.ber for p in usable])
    slope = np.polyfit(snr, log_ber, 1)[0]
    return float(-10.0 * slope)


def snr_at_ber(points, target: float) -> float:
    """SNR in dB where the measured curve crosses the target BER.

    Linear interpolation in (snr_db, log10 ber) between the first adjacent
    pair of nonzero-BER points bracketing the target.
    """
    if target <= 0:
        raise ValueError("target BER must be positive")
    usable = [p for p in points if p.ber > 0]
    log_t = np.log10(target)
    for a, b in zip(usable, usable[1:]):
        la, lb = np.log10(a.ber), np.log10(b.ber)
        if (la - log_t) * (lb - log_t) <= 0:
            if la == lb:
                return float(a.snr_db)
            frac = (log_t - la) / (lb - la)
            return float(a.snr_db + frac * (b.snr_db - a.snr_db))
    raise InsufficientDataError(f"curve never crosses BER {target:g}")


# --- persistence ---------------------------------------------------------

_CSV_HEADER = "snr_db,bits,errors,ber"


def _header_pairs(result: SweepResult):
    spec = result.spec
    return [
        ("scenario", spec.scenario_label),
        ("scheme", spec.scheme),
        ("decoder_mode", spec.decoder_mode),
        ("snr_db_points", ",".join(repr(s) for s in spec.snr_db_points)),
        ("min_bit_errors", str(spec.min_bit_errors)),
        ("max_ofdm_blocks", str(spec.max_ofdm_blocks)),
        ("noiseless", str(spec.noiseless).lower()),
        ("independent_streams", str(spec.independent_streams).lower()),
        ("master_seed", str(result.master_seed)),
        ("code_version", result.code_version),
        ("config", json.dumps(config_to_dict(spec.config), sort_keys=True)),
    ]


def format_results(result: SweepResult) -> str:
    lines = [f"# {key}: {value}" for key, value in _header_pairs(result)]
    lines.append(_CSV_HEADER)
    for p in result.points:
        lines.append(f"{p.snr_db!r},{p.bits_simulated},{p.bit_errors},{p.ber:.5e}")
    return "\n".join(lines) + "\n"


def write_results(result: SweepResult, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_results(result))


def read_results(path) -> SweepResult:
    """Parse a results file back into a SweepResult (wall time not stored)."""
    headers = {}
    points = []
    saw_csv_header = False
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                if saw_csv_header:
                    raise ResultsParseError(f"line {lineno}: header after data rows")
                key, sep, value = line[1:].partition(":")
                if not sep:
                    raise ResultsParseError(f"line {lineno}: expected '# key: value'")
                headers[key.strip()] = value.strip()
                continue
            if not saw_csv_header:
                if line != _CSV_HEADER:
                    raise ResultsParseError(
                        f"line {lineno}: expected column header {_CSV_HEADER!r}"
                    )
                saw_csv_header = True
                continue
            cells = line.split(",")
            if len(cells) != 4:
                raise ResultsParseError(f"line {lineno}: expected 4 columns, got {len(cells)}")
            try:
                snr = float(cells[0])
                bits = int(cells[1])
                errors = int(cells[2])
                float(cells[3])
            except ValueError as exc:
                raise ResultsParseError(f"line {lineno}: {exc}") from None
            points.append(BerPoint.from_counts(snr, bits, errors))
    if not saw_csv_header:
        raise ResultsParseError("line 0: truncated file, no column header")
    try:
        config = config_from_dict(json.loads(headers["config"]))
        spec = SweepSpec(
            config=config,
            snr_db_points=tuple(float(s) for s in headers["snr_db_points"].split(",")),
            min_bit_errors=int(headers["min_bit_errors"]),
            max_ofdm_blocks=int(headers["max_ofdm_blocks"]),
            decoder_mode=headers["decoder_mode"],
            scenario_label=headers["scenario"],
            scheme=headers["scheme"],
            noiseless=headers["noiseless"] == "true",
            independent_streams=headers["independent_streams"] == "true",
        )
        version = headers["code_version"]
        seed = int(headers["master_seed"])
    except KeyError as exc:
        raise ResultsParseError(f"missing header {exc.args[0]!r}") from None
    return SweepResult(spec=spec, points=points, code_version=version, master_seed=seed)


def emit_plot_data(results, path) -> None:
    """Tab-separated BER table, one column per scenario, NA for gaps."""
    if not results:
        raise ValueError("need at least one result")
    labels = [r.spec.scenario_label for r in results]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate scenario labels: {labels}")
    series = [{p.snr_db: p.ber for p in r.points} for r in results]
    grid = sorted({snr for s in series for snr in s})
    lines = ["\t".join(["snr_db"] + labels)]
    for snr in grid:
        cells = [repr(snr)]
        for s in series:
            cells.append(f"{s[snr]:.5e}" if snr in s else "NA")
        lines.append("\t".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
