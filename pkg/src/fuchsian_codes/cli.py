"""Command-line front end.

Exit codes: 0 success, 1 failed self-test or runtime error, 2 usage error
(bad flags, unknown preset).
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from .codec import (
    compute_rates,
    decode,
    default_tau,
    encode,
    gen_phi,
    normic_form,
    nuf_codebook,
    spiral_labels,
    write_codebook_csv,
)
from .errors import FuchsianError, PresetError
from .fuchsian import GroupPreset, load_preset, parse_preset, reduced_words, step_profile, word_length
from .simulator import ChannelConfig, average_energy, run_qam_sweep, run_sweep, write_sweep_csv

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _snr_grid(args) -> list[float]:
    if not args.snr_step > 0:
        raise UsageError("--snr-step must be positive")
    if args.snr_max < args.snr_min:
        raise UsageError("--snr-max must not be below --snr-min")
    n = int(math.floor((args.snr_max - args.snr_min) / args.snr_step + 1e-9)) + 1
    return [args.snr_min + i * args.snr_step for i in range(n)]


def _preset(args) -> GroupPreset:
    try:
        if args.preset_file:
            return parse_preset(Path(args.preset_file).read_text())
        return load_preset(args.preset)
    except (KeyError, OSError, PresetError) as exc:
        name = args.preset_file or args.preset
        raise UsageError(f"cannot load preset {name!r}: {exc}") from None


def _codebook(args, preset: GroupPreset):
    if args.size < 1:
        raise UsageError("--size must be at least 1")
    tau = complex(args.tau_re, args.tau_im) if args.tau_re is not None else None
    return nuf_codebook(preset, args.size, tau, args.duplicate)


def _out(args, default: str) -> Path:
    return Path(args.out or default)


def cmd_gen_constellation(args) -> int:
    preset = _preset(args)
    book = _codebook(args, preset)
    path = _out(args, f"{preset.name}_{args.size}nuf.csv")
    write_codebook_csv(book, path)
    r, rc = compute_rates(book)
    print(f"preset={preset.name} |C|={len(book)} R={r:g} bpcu Rc={rc} dpcu "
          f"E={average_energy(book.points):.6g} tau={book.tau.real:.12g}{book.tau.imag:+.12g}i")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_optimize_tau(args) -> int:
    preset = _preset(args)
    labels = spiral_labels(preset, args.size)
    tau = default_tau(preset, labels, args.grid)
    print(f"{tau.real:.17g} {tau.imag:.17g}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    preset = _preset(args)
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    grid = _snr_grid(args)
    book = _codebook(args, preset)
    cfg = ChannelConfig(0.0, args.mode, args.seed)
    res = run_sweep(book, grid, args.trials, cfg, workers=args.workers)
    path = _out(args, f"{preset.name}_{len(book)}nuf_sweep.csv")
    write_sweep_csv(res, path)
    for row in res.rows:
        print(f"snr={row.snr_db:g} dB  cer={row.cer:.6g}  ({row.errors}/{row.trials})")
    print(f"wrote {path}")
    if args.baseline == "qam":
        qres = run_qam_sweep(len(book), grid, args.trials, cfg, workers=args.workers)
        qpath = path.with_name(path.stem + "_qam" + path.suffix)
        write_sweep_csv(qres, qpath)
        print(f"wrote {qpath}")
    return EXIT_OK


def _check(name: str, ok: bool, detail: str = "") -> None:
    print(f"{'PASS' if ok else 'FAIL'} {name}{': ' + detail if detail else ''}")
    if not ok:
        raise _SelftestFailure(name)


class _SelftestFailure(Exception):
    pass


def cmd_selftest(args) -> int:
    try:
        for label, want in (((1, 0, 1), (2, 0, 3, 2)), ((2, 0, 1), (7, 0, 12, 8)), ((2, 1, 1), (14, 7, 12, 8))):
            got = tuple(gen_phi(*label))
            _check(f"phi{label}={got}", got == want)
        try:
            preset = _preset(args)
        except UsageError as exc:
            _check("preset", False, str(exc))
        for size in (4, 8, 16):
            book = nuf_codebook(preset, size, duplicate=args.duplicate)
            _check(f"normic {size}", all(normic_form(e.tuple) == 1 for e in book.entries))
            bad = [e.label for e in book.entries if decode(book, encode(book, e.label)) != e.label]
            _check(f"round trip {preset.name} {size}-NUF", not bad, f"{len(book)} labels" if not bad else str(bad))
        if preset.is_strip:
            words = reduced_words(3, list(dict.fromkeys(n for n, _ in preset.letters)))
            steps = step_profile(preset, words)
            over = [(w, s) for w, s in zip(words, steps) if s > word_length(w)]
            _check("step bound", not over, f"{len(words)} words, max {max(steps)} steps")
    except _SelftestFailure:
        return EXIT_FAIL
    except FuchsianError as exc:
        print(f"FAIL {type(exc).__name__}: {exc}")
        return EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", default="e2d1D6ii", help="built-in preset name")
    common.add_argument("--preset-file", help="preset text file (overrides --preset)")
    common.add_argument("--size", type=int, default=4, help="codewords before duplication")
    common.add_argument("--duplicate", action="store_true", help="add the negated codewords")
    common.add_argument("--tau-re", type=float, help="base point real part (default: optimized)")
    common.add_argument("--tau-im", type=float, help="base point imaginary part")
    common.add_argument("--out", help="output CSV path")

    p = argparse.ArgumentParser(prog="fuchsian-codes", description="Fuchsian codes over AWGN channels")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("gen-constellation", parents=[common], help="write a codebook CSV")
    opt = sub.add_parser("optimize-tau", parents=[common], help="print the optimized base point")
    opt.add_argument("--grid", type=int, default=41)
    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo CER sweep")
    sim.add_argument("--snr-min", type=float, default=25.0)
    sim.add_argument("--snr-max", type=float, default=75.0)
    sim.add_argument("--snr-step", type=float, default=10.0)
    sim.add_argument("--trials", type=int, default=10_000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--mode", choices=["awgn", "phase_rotation"], default="awgn")
    sim.add_argument("--baseline", choices=["none", "qam"], default="none")
    sim.add_argument("--workers", type=int, default=1)
    sub.add_parser("selftest", parents=[common], help="run built-in checks")
    return p


COMMANDS = {
    "gen-constellation": cmd_gen_constellation,
    "optimize-tau": cmd_optimize_tau,
    "simulate": cmd_simulate,
    "selftest": cmd_selftest,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if (args.tau_re is None) != (args.tau_im is None):
        print("error: give both --tau-re and --tau-im", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FuchsianError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
