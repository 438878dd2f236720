"""Command-line front end: ``vidmanet run | grid | synth``.

Exit codes: 0 success, 1 bad configuration, 2 I/O failure, 3 simulation
error (for ``grid``: at least one cell failed). Configuration keys can be
overridden through ``VIDMANET_*`` environment variables, see
:mod:`vidmanet.config`.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from . import __version__
from .config import dump_config, load_config
from .errors import BadDimensions, ConfigError, TruncatedFile
from .grid import run_grid
from .reports import write_run
from .scenario import run_scenario
from .synth import write_synth
from .video import PsnrCache, PsnrConfig, load_yuv

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_SIM = 0, 1, 2, 3
log = logging.getLogger("vidmanet")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vidmanet", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key = value scenario file (defaults apply without it)")
        sp.add_argument("--yuv", required=True, help="raw YUV 4:2:0 input")
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--seed", type=int, help="override the configured seed")
        sp.add_argument("--window", type=_positive_int, default=100,
                        help="moving-average width for smoothed series (default 100)")
        sp.add_argument("--theta", type=float,
                        help="extractability threshold on the decodable-frame ratio (default 0.05)")

    run = sub.add_parser("run", help="simulate one scenario")
    common(run)
    run.add_argument("--events", action="store_true", help="also write the executed-event log")

    grid = sub.add_parser("grid", help="run the full experiment grid")
    common(grid)
    grid.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")

    synth = sub.add_parser("synth", help="write the deterministic synthetic test clip")
    synth.add_argument("--out", required=True, help="output .yuv path")
    synth.add_argument("--frames", type=int, default=2000)
    synth.add_argument("--width", type=int, default=352)
    synth.add_argument("--height", type=int, default=288)
    return p


def _load(args):
    try:
        fc = load_config(args.config)
        s = fc.scenario
        if args.seed is not None:
            s = dataclasses.replace(s, seed=args.seed)
        if args.theta is not None:
            s = dataclasses.replace(s, theta=args.theta)
        fc.scenario = s.validate()
    except FileNotFoundError as exc:
        raise CliError(EXIT_IO, f"cannot read config: {exc}") from None
    except OSError as exc:
        raise CliError(EXIT_IO, str(exc)) from None
    except (ConfigError, ValueError) as exc:
        raise CliError(EXIT_CONFIG, f"{type(exc).__name__}: {exc}") from None
    return fc


def _open_video(fc, path):
    v = fc.video
    try:
        seq = load_yuv(path, v.width, v.height, v.bits)
    except (OSError, TruncatedFile) as exc:
        raise CliError(EXIT_IO, f"{type(exc).__name__}: {exc}") from None
    except BadDimensions as exc:
        raise CliError(EXIT_CONFIG, f"BadDimensions: {exc}") from None
    if len(seq) < fc.scenario.n_frames:
        raise CliError(EXIT_CONFIG, f"{path} has {len(seq)} frames, n_frames = {fc.scenario.n_frames}")
    return seq


def cmd_run(args) -> int:
    fc = _load(args)
    seq = _open_video(fc, args.yuv)
    try:
        result = run_scenario(fc.scenario, seq, psnr_cache=PsnrCache(seq, PsnrConfig(bits=fc.video.bits)),
                              record_events=args.events)
    except Exception as exc:
        raise CliError(EXIT_SIM, f"simulation failed: {type(exc).__name__}: {exc}") from None
    try:
        out = write_run(result, args.out, args.window)
        (out / "config.txt").write_text(dump_config(fc))
    except OSError as exc:
        raise CliError(EXIT_IO, str(exc)) from None
    s = result.summary()
    print(f"{s['protocol']} N={s['n_nodes']} D={s['spacing']:g} {s['mobility']}: "
          f"loss {s['loss_rate']:.3f}, decodable {s['decodable_rate']:.3f}, "
          f"extractable {'Y' if s['extractable'] else 'N'} -> {out}")
    return EXIT_OK


def cmd_grid(args) -> int:
    fc = _load(args)
    _open_video(fc, args.yuv)  # fail fast on unreadable input
    v = fc.video
    try:
        outcome = run_grid(fc.scenario, args.yuv, args.out, axes=fc.grid, jobs=args.jobs,
                           window=args.window, width=v.width, height=v.height, bits=v.bits)
    except OSError as exc:
        raise CliError(EXIT_IO, str(exc)) from None
    print(f"{len(outcome.summaries)} cells done, {len(outcome.failures)} failed -> {args.out}")
    if not outcome.ok:
        raise CliError(EXIT_SIM, f"{len(outcome.failures)} cell(s) failed, see failures.tsv")
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        write_synth(args.out, args.frames, args.width, args.height)
    except OSError as exc:
        raise CliError(EXIT_IO, str(exc)) from None
    except ValueError as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from None
    return EXIT_OK


COMMANDS = {"run": cmd_run, "grid": cmd_grid, "synth": cmd_synth}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"vidmanet {args.command}: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
