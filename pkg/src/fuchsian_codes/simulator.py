"""Monte Carlo codeword error rates over AWGN, with QAM baselines.

Randomness comes from numpy's Philox generator.  Every (SNR point, trial
block) pair owns its own substream keyed by ``(seed, snr index, block index)``,
so results do not depend on how blocks are spread over worker processes.
"""
from __future__ import annotations

import csv
import enum
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .codec import Codebook, decode_batch
from .errors import EmptyConstellation, UnsupportedSize

BLOCK_SIZE = 8192


class ChannelMode(str, enum.Enum):
    AWGN = "awgn"
    PHASE_ROTATION = "phase_rotation"


@dataclass(frozen=True)
class ChannelConfig:
    n0: float = 0.0
    mode: ChannelMode = ChannelMode.AWGN
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.n0 >= 0:
            raise ValueError("noise variance must be non-negative")
        object.__setattr__(self, "mode", ChannelMode(self.mode))


@dataclass(frozen=True)
class SweepRow:
    snr_db: float
    trials: int
    errors: int

    @property
    def cer(self) -> float:
        return self.errors / self.trials


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    @property
    def cer(self) -> np.ndarray:
        return np.array([r.cer for r in self.rows])


def average_energy(points) -> float:
    pts = np.asarray(points, dtype=complex)
    if pts.size == 0:
        raise EmptyConstellation("no points")
    return float(np.mean(np.abs(pts) ** 2))


def snr_to_n0(snr_db: float, energy: float) -> float:
    if not energy > 0:
        raise ValueError("energy must be positive")
    return energy / 10.0 ** (snr_db / 10.0)


def make_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *key])))


def awgn_sample(rng: np.random.Generator, n0: float, size=None):
    """Circular complex Gaussian with total variance ``n0``."""
    if n0 < 0:
        raise ValueError("n0 must be non-negative")
    if n0 == 0:
        return 0j if size is None else np.zeros(size, dtype=complex)
    s = math.sqrt(n0 / 2.0)
    re = rng.normal(0.0, s, size)
    im = rng.normal(0.0, s, size)
    return complex(re, im) if size is None else re + 1j * im


# ---------------------------------------------------------------------------
# QAM


def qam_reference(size: int) -> np.ndarray:
    grid16 = np.array([complex(x, y) for x in (-3, -1, 1, 3) for y in (-3, -1, 1, 3)])
    if size == 16:
        return grid16
    if size == 4:
        return np.array([complex(x, y) for x in (-1, 1) for y in (-1, 1)])
    if size == 8:
        return _min_energy_symmetric_subset(grid16, 8)
    raise UnsupportedSize(f"no {size}-QAM reference; use 4, 8 or 16")


def _min_energy_symmetric_subset(points: np.ndarray, size: int) -> np.ndarray:
    """Brute force over unions of negation pairs; lexicographic tie-break."""
    key = sorted(points, key=lambda p: (p.real, p.imag))
    pairs = [p for p in key if (p.real, p.imag) > (-p.real, -p.imag)]
    best = None
    for combo in itertools.combinations(pairs, size // 2):
        sel = sorted([*combo, *(-c for c in combo)], key=lambda p: (p.real, p.imag))
        cand = (sum(abs(p) ** 2 for p in sel), [(p.real, p.imag) for p in sel])
        if best is None or cand < best[0]:
            best = (cand, sel)
    return np.array(best[1])


def ml_decode(points, v) -> Union[int, np.ndarray]:
    """Nearest point index; ``argmin`` keeps the lowest index on ties."""
    pts = np.asarray(points, dtype=complex)
    if pts.size == 0:
        raise EmptyConstellation("no points")
    vv = np.atleast_1d(np.asarray(v, dtype=complex))
    out = np.argmin(np.abs(vv[:, None] - pts[None, :]), axis=1)
    return int(out[0]) if np.ndim(v) == 0 else out


def qpsk_ser(snr_db: float) -> float:
    """Closed-form 4-QAM symbol error rate at ``E/N0`` given in dB."""
    q = math.erfc(math.sqrt(10.0 ** (snr_db / 10.0) / 2.0))
    return q - 0.25 * q * q


# ---------------------------------------------------------------------------
# sweeps

@dataclass(frozen=True)
class _Task:
    points: np.ndarray
    decoder: object           # Codebook, or None for ML decoding over ``points``
    n0: float
    mode: ChannelMode
    seed: int
    snr_idx: int
    block_idx: int
    count: int


def _run_block(task: _Task) -> int:
    rng = make_rng(task.seed, task.snr_idx, task.block_idx)
    sent = rng.integers(0, len(task.points), task.count)
    noise = awgn_sample(rng, task.n0, task.count)
    y = task.points[sent] + noise
    if task.mode == ChannelMode.PHASE_ROTATION:
        theta = rng.uniform(0.0, 2.0 * math.pi, task.count)
        h = np.exp(1j * theta)
        y = np.conj(h) * (h * task.points[sent] + noise)
    if task.decoder is None:
        got = ml_decode(task.points, y)
    else:
        got = decode_batch(task.decoder, y)
    return int(np.count_nonzero(got != sent))


def _sweep(points: np.ndarray, decoder, n0s: Sequence[float], snr_grid: Sequence[float], trials: int,
           cfg: ChannelConfig, workers: int, block_size: int) -> SweepResult:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if block_size < 1:
        raise ValueError("block size must be at least 1")
    tasks = []
    for si, n0 in enumerate(n0s):
        for bi, start in enumerate(range(0, trials, block_size)):
            tasks.append(_Task(points, decoder, n0, cfg.mode, cfg.seed, si, bi, min(block_size, trials - start)))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            errs = list(ex.map(_run_block, tasks))
    else:
        errs = [_run_block(t) for t in tasks]
    totals = [0] * len(snr_grid)
    for t, e in zip(tasks, errs):
        totals[t.snr_idx] += e
    return SweepResult(tuple(SweepRow(float(s), trials, totals[i]) for i, s in enumerate(snr_grid)))


def run_sweep(book: Codebook, snr_grid: Sequence[float], trials: int, cfg: ChannelConfig = ChannelConfig(),
              workers: int = 1, block_size: int = BLOCK_SIZE) -> SweepResult:
    """CER of the Fuchsian decoder at each SNR (dB, relative to the codebook's mean energy)."""
    pts = book.points
    e = average_energy(pts)
    return _sweep(pts, book, [snr_to_n0(s, e) for s in snr_grid], snr_grid, trials, cfg, workers, block_size)


def run_fixed_noise(book: Codebook, trials: int, cfg: ChannelConfig, workers: int = 1,
                    block_size: int = BLOCK_SIZE) -> SweepRow:
    """A single point at the absolute noise level ``cfg.n0`` (``0`` allowed)."""
    e = average_energy(book.points)
    snr = math.inf if cfg.n0 == 0 else 10.0 * math.log10(e / cfg.n0)
    return _sweep(book.points, book, [cfg.n0], [snr], trials, cfg, workers, block_size).rows[0]


def run_qam_sweep(size: int, snr_grid: Sequence[float], trials: int, cfg: ChannelConfig = ChannelConfig(),
                  workers: int = 1, block_size: int = BLOCK_SIZE) -> SweepResult:
    pts = qam_reference(size)
    e = average_energy(pts)
    return _sweep(pts, None, [snr_to_n0(s, e) for s in snr_grid], snr_grid, trials, cfg, workers, block_size)


SWEEP_COLUMNS = ("snr_db", "trials", "errors", "cer")


def write_sweep_csv(result: SweepResult, path: Union[str, Path]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in result.rows:
            w.writerow([format(r.snr_db, ".17g"), r.trials, r.errors, format(r.cer, ".17g")])


def read_sweep_csv(path: Union[str, Path]) -> SweepResult:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != SWEEP_COLUMNS:
            raise ValueError(f"expected columns {','.join(SWEEP_COLUMNS)}")
        return SweepResult(tuple(SweepRow(float(r["snr_db"]), int(r["trials"]), int(r["errors"])) for r in reader))
