"""Command line: play, tournament, sweep, trace."""
from __future__ import annotations

import argparse
import sys

from scsa.agents import AGENT_NAMES, LABELS
from scsa.games import load_config, sample_initial_state
from scsa.games.config import GAMES
from scsa.engine import apply_action
from scsa import harness


def _game(value: str) -> str:
    g = value.upper()
    if g not in GAMES:
        raise argparse.ArgumentTypeError(f"unknown game {value!r}; choose from {', '.join(GAMES)}")
    return g


def _agent(value: str) -> str:
    if value not in AGENT_NAMES:
        raise argparse.ArgumentTypeError(f"unknown agent {value!r}; choose from {', '.join(AGENT_NAMES)}")
    return value


def _agent_list(value: str) -> list[str]:
    return [_agent(v.strip()) for v in value.split(",") if v.strip()]


def _int_list(value: str) -> list[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}") from None


def _scale_kw(args) -> dict:
    if args.budget is None:
        return {}
    if args.scale_batch:
        return harness.desk_scale(args.game, args.budget)
    return {"budget": args.budget}


def cmd_play(args) -> int:
    spec = harness.MatchSpec(args.game, args.a, args.b, args.seed, args.match_seed, a_side=args.side,
                             **_scale_kw(args))
    result = harness.run_match(spec)
    if args.verbose:
        state = sample_initial_state(load_config(args.game), args.seed)
        print(state.render())
        for action in result.actions:
            state = apply_action(state, action)
            print(f"round {state.round:3d}  {action}")
        print(state.render())
    winner = {"A": LABELS[args.a], "B": LABELS[args.b]}.get(result.winner, result.winner)
    print(f"{args.game} {LABELS[args.a]} vs {LABELS[args.b]}: winner={winner} rounds={result.rounds} "
          f"moves={len(result.actions)}")
    if result.error:
        print(f"error: {result.error}", file=sys.stderr)
        return 1
    return 0


def cmd_tournament(args) -> int:
    table, _ = harness.run_tournament(
        args.game, args.agents, args.positions, args.seeds, workers=args.workers, out=args.out,
        games_out=args.games_out, **_scale_kw(args),
    )
    print(table.format())
    return 0


def cmd_sweep(args) -> int:
    rows = harness.sweep_size_limit(args.game, args.limits, args.games, workers=args.workers, out=args.out,
                                    **_scale_kw(args))
    for r in rows:
        print(f"SIZE_LIMIT={r['size_limit']}: {100 * r['win_rate']:.1f}% ({100 * r['se']:.1f}) "
              f"over {r['games']} games")
    return 0


def cmd_trace(args) -> int:
    kw = {}
    if args.budget is not None:
        kw = dict(harness.scaled_overrides(args.game, args.budget)) if args.scale_batch else {"budget": args.budget}
    trace = harness.trace_compression(args.game, args.modes, args.runs, out=args.out,
                                      summary_out=args.summary_out, **kw)
    for row in trace.summary():
        split = f" split@{row['split_iteration']}" if row["split_iteration"] != "" else ""
        print(f"{row['mode']:>8} iter {row['iteration']:5d}: {row['mean']:.3f} ({row['se']:.3f}){split}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scsa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, game_default=None):
        p.add_argument("--game", type=_game, required=game_default is None, default=game_default)
        p.add_argument("--budget", type=int, default=None, help="forward-model calls per move")
        p.add_argument("--no-scale-batch", dest="scale_batch", action="store_false",
                       help="keep B=20 when --budget is reduced")
        p.add_argument("--workers", type=int, default=None, help="parallel matches (default: $SCSA_THREADS or 1)")

    p = sub.add_parser("play", help="play one seeded match")
    common(p)
    p.add_argument("--a", type=_agent, default="scsa")
    p.add_argument("--b", type=_agent, default="rule")
    p.add_argument("--seed", type=int, default=0, help="initial-position seed")
    p.add_argument("--match-seed", type=int, default=0)
    p.add_argument("--side", type=int, choices=(0, 1), default=0, help="player id agent A controls")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("tournament", help="round-robin between agents")
    common(p)
    p.add_argument("--agents", type=_agent_list, default=list(AGENT_NAMES))
    p.add_argument("--positions", type=int, default=50)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--out", default=None, help="win-rate table CSV")
    p.add_argument("--games-out", default=None, help="per-game CSV")
    p.set_defaults(func=cmd_tournament)

    p = sub.add_parser("sweep", help="SCSA vs Rule-based across SIZE_LIMIT values")
    common(p)
    p.add_argument("--limits", type=_int_list, default=[2, 3, 4, 5])
    p.add_argument("--games", type=int, default=100)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("trace", help="compression rate over a search")
    common(p, game_default="KTK")
    p.add_argument("--modes", type=lambda v: [m.strip() for m in v.split(",")], default=["elastic", "scsa"])
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--out", default=None, help="raw per-run CSV")
    p.add_argument("--summary-out", default=None, help="mean and standard error per checkpoint")
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "workers", None) is not None and args.workers < 1:
        print("--workers must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
