"""Command line: play, replay, fuzz, check-lemmas, experiment.

Exit codes: 0 Alice wins (or a check passed), 1 Bob wins (or a check failed),
2 malformed input or a transcript that does not replay.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from . import lemmas
from .core import Player
from .experiments import ExperimentSpec, fuzz, make_alice, make_bob, run_experiment, summarize, write_csv
from .match import ReplayDivergence, replay, run_match
from .referee import GameConfig
from .transcript import MalformedTranscript, Transcript

EXIT_ALICE, EXIT_BOB, EXIT_MALFORMED = 0, 1, 2


def _default_seed() -> int:
    return int(os.environ.get("NIDGAMES_SEED", "0"))


def _verdict_exit(v) -> int:
    return EXIT_ALICE if v.winner is Player.ALICE else EXIT_BOB


def _print_verdict(v):
    print(f"winner={v.winner.value} reason={v.reason} round={v.round} witness={json.dumps(v.witness, sort_keys=True)}")


def config_from_args(args) -> GameConfig:
    if args.game == "g":
        return GameConfig("G", args.n, c=args.c, k=args.k, threshold=args.threshold,
                          max_rounds=args.max_rounds, relaxed=args.relaxed)
    return GameConfig("H", args.n, eps=args.eps, a=args.a, threshold=args.threshold, max_rounds=args.max_rounds)


def cmd_play(args) -> int:
    try:
        cfg = config_from_args(args)
        alice, bob = make_alice(args.alice), make_bob(args.bob)
        tr = run_match(alice, bob, cfg, seed=args.seed)
    except (ValueError, TypeError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MALFORMED
    if args.transcript:
        tr.write(args.transcript)
    _print_verdict(tr.verdict)
    for rec in getattr(alice, "levels", []):
        print("level " + " ".join(f"{k}={v}" for k, v in rec.items() if k != "chain"))
    return _verdict_exit(tr.verdict)


def cmd_replay(args) -> int:
    try:
        tr = Transcript.read(args.path)
        v = replay(tr, incremental=not args.full_check)
    except (MalformedTranscript, OSError) as e:
        print(f"malformed transcript: {e}", file=sys.stderr)
        return EXIT_MALFORMED
    except ReplayDivergence as e:
        print(f"replay divergence: {e}", file=sys.stderr)
        return EXIT_MALFORMED
    _print_verdict(v)
    return _verdict_exit(v)


def cmd_fuzz(args) -> int:
    kinds = ("G", "H") if args.game == "both" else (args.game.upper(),)
    rep = fuzz(args.seeds, start=args.seed, n_min=args.n_min, n_max=args.n_max, kinds=kinds)
    print(f"fuzz: {rep.seeds} seeds, {len(rep.failures)} failures, verdicts {json.dumps(rep.reasons, sort_keys=True)}")
    for f in rep.failures:
        print(f"  {f}")
    return 0 if rep.ok else 1


def cmd_check_lemmas(args) -> int:
    names = args.only or None
    try:
        reports = lemmas.run_all(names, seed=args.seed, scale=args.scale)
    except KeyError as e:
        print(f"unknown check {e}; choose from {sorted(lemmas.CHECKS)}", file=sys.stderr)
        return EXIT_MALFORMED
    for r in reports:
        print(r.line())
        if args.verbose and r.info:
            for k, v in r.info.items():
                print(f"    {k}: {v}")
    return 0 if all(r.ok for r in reports) else 1


def cmd_experiment(args) -> int:
    try:
        spec = ExperimentSpec.read(args.spec)
    except (OSError, ValueError, TypeError) as e:
        print(f"bad experiment spec: {e}", file=sys.stderr)
        return EXIT_MALFORMED
    if args.no_timing:
        spec.timing = False
    out = args.output or spec.output or "results.csv"
    rows = run_experiment(spec)
    write_csv(rows, out)
    print(f"{len(rows)} rows -> {out}")
    for line in summarize(rows):
        print(line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nidgames", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    play = sub.add_parser("play", help="run one match")
    play.add_argument("--game", choices=["g", "h"], required=True)
    play.add_argument("--n", type=int, required=True)
    play.add_argument("--c", type=int)
    play.add_argument("--k", type=int)
    play.add_argument("--eps", type=Fraction)
    play.add_argument("--a", type=Fraction)
    play.add_argument("--threshold", default="sqrt", help="sqrt | const:INT | pow:NUM")
    play.add_argument("--alice", required=True, help="NAME[:key=value,...]")
    play.add_argument("--bob", required=True, help="NAME[:key=value,...]")
    play.add_argument("--seed", type=int, default=_default_seed())
    play.add_argument("--max-rounds", type=int)
    play.add_argument("--relaxed", action="store_true", help="allow strat-g outside c >= 3, n > 16c^2")
    play.add_argument("--transcript", help="write the JSONL transcript here")
    play.set_defaults(func=cmd_play)

    rp = sub.add_parser("replay", help="re-run a transcript and check its verdict")
    rp.add_argument("path")
    rp.add_argument("--full-check", action="store_true", help="check every pair each round")
    rp.set_defaults(func=cmd_replay)

    fz = sub.add_parser("fuzz", help="random matches with soundness checks")
    fz.add_argument("--seeds", type=int, default=100)
    fz.add_argument("--seed", type=int, default=_default_seed(), help="first seed")
    fz.add_argument("--n-min", type=int, default=3)
    fz.add_argument("--n-max", type=int, default=8)
    fz.add_argument("--game", choices=["g", "h", "both"], default="both")
    fz.set_defaults(func=cmd_fuzz)

    cl = sub.add_parser("check-lemmas", help="property checks of the supporting lemmas")
    cl.add_argument("--only", nargs="*", help=f"subset of {sorted(lemmas.CHECKS)}")
    cl.add_argument("--seed", type=int, default=_default_seed())
    cl.add_argument("--scale", type=float, default=1.0, help="multiply trial counts")
    cl.set_defaults(func=cmd_check_lemmas)

    ex = sub.add_parser("experiment", help="parameter sweep to CSV")
    ex.add_argument("spec", help="JSON experiment spec")
    ex.add_argument("--output")
    ex.add_argument("--no-timing", action="store_true", help="leave wall_time empty so rows are reproducible")
    ex.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_MALFORMED if e.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
