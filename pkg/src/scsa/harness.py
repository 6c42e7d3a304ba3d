"""Experiment driver: seeded matches, tournaments, sweeps and traces."""
from __future__ import annotations

import csv
import itertools
import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from scsa.agents import agent_params, make_agent, scaled_overrides
from scsa.engine import apply_action, terminal_outcome
from scsa.games import load_config, sample_initial_state
from scsa.search import SearchParams, run_search

MOVE_TIME_CAP = 60.0


@dataclass(frozen=True)
class MatchSpec:
    game: str
    agent_a: str
    agent_b: str
    position_seed: int
    match_seed: int
    budget: int | None = None
    round_limit: int | None = None
    a_side: int = 0  # player id agent A controls
    options: tuple = ()  # game-config option overrides, as (key, value) pairs
    agent_overrides: tuple = ()  # SearchParams overrides, as (key, value) pairs
    move_time_cap: float = MOVE_TIME_CAP


@dataclass
class MatchResult:
    spec: MatchSpec
    winner: str  # "A" | "B" | "draw" | "error"
    rounds: int = 0
    actions: list = field(default_factory=list)
    # (side, iterations, fm_calls, tree_nodes, abstract_nodes, wall_time_ms) per searched move
    move_stats: list = field(default_factory=list)
    error: str = ""

    def signature(self) -> tuple:
        """Everything except wall-clock timings."""
        return (self.winner, self.rounds, tuple(self.actions), tuple(m[:5] for m in self.move_stats))

    @property
    def fm_calls(self) -> list[int]:
        return [m[2] for m in self.move_stats]


def desk_scale(game: str, budget: int | None) -> dict:
    """MatchSpec keywords for a reduced budget with the batch scaled to match."""
    if budget is None:
        return {}
    ov = scaled_overrides(game, budget)
    return {"budget": ov["budget"], "agent_overrides": (("batch", ov["batch"]),)}


def _config_for(spec: MatchSpec):
    overrides = dict(spec.options)
    if spec.round_limit is not None:
        overrides["round_limit"] = spec.round_limit
    return load_config(spec.game, **overrides)


def _agent_seed(spec: MatchSpec, side: int) -> int:
    return random.Random(f"{spec.match_seed}:{spec.position_seed}:{side}").getrandbits(32)


def run_match(spec: MatchSpec) -> MatchResult:
    cfg = _config_for(spec)
    state = sample_initial_state(cfg, spec.position_seed)
    overrides = dict(spec.agent_overrides)
    if spec.budget is not None:
        overrides["budget"] = spec.budget
    names = {spec.a_side: spec.agent_a, 1 - spec.a_side: spec.agent_b}
    agents = {p: make_agent(names[p], spec.game, **overrides) for p in (0, 1)}
    for p, agent in agents.items():
        agent.start_game(state, p, _agent_seed(spec, p))

    result = MatchResult(spec, "draw")
    while not terminal_outcome(state).terminal:
        p = state.to_move
        t0 = time.perf_counter()
        action, stats = agents[p].act(state)
        elapsed = time.perf_counter() - t0
        if elapsed > spec.move_time_cap:
            result.winner = "error"
            result.error = f"player {p} took {elapsed:.1f}s for one move"
            result.rounds = state.round
            return result
        if stats is not None:
            result.move_stats.append(
                (p, stats.iterations, stats.fm_calls, stats.tree_nodes, stats.abstract_nodes, stats.wall_time_ms)
            )
        result.actions.append(action)
        state = apply_action(state, action)

    out = terminal_outcome(state)
    result.rounds = state.round
    if out.kind == "win":
        result.winner = "A" if out.winner == spec.a_side else "B"
    return result


# tournaments ----------------------------------------------------------


def standard_error(p: float, n: int) -> float:
    return math.sqrt(p * (1.0 - p) / n) if n else 0.0


@dataclass
class PairRecord:
    agent_a: str
    agent_b: str
    wins_a: int = 0
    wins_b: int = 0
    draws: int = 0
    errors: int = 0

    @property
    def games(self) -> int:
        return self.wins_a + self.wins_b + self.draws

    @property
    def rate_a(self) -> float:
        return self.wins_a / self.games if self.games else 0.0

    @property
    def rate_b(self) -> float:
        return self.wins_b / self.games if self.games else 0.0

    @property
    def se_a(self) -> float:
        return standard_error(self.rate_a, self.games)

    @property
    def se_b(self) -> float:
        return standard_error(self.rate_b, self.games)

    def add(self, result: MatchResult):
        if result.winner == "A":
            self.wins_a += 1
        elif result.winner == "B":
            self.wins_b += 1
        elif result.winner == "draw":
            self.draws += 1
        else:
            self.errors += 1


@dataclass
class TournamentTable:
    game: str
    pairs: dict = field(default_factory=dict)  # (a, b) -> PairRecord

    FIELDS = ("game", "agent_a", "agent_b", "wins_a", "wins_b", "draws", "errors", "games",
              "win_rate_a", "se_a", "win_rate_b", "se_b")

    def record(self, a: str, b: str) -> PairRecord:
        return self.pairs.setdefault((a, b), PairRecord(a, b))

    def rows(self) -> list[dict]:
        out = []
        for rec in self.pairs.values():
            out.append({
                "game": self.game,
                "agent_a": rec.agent_a,
                "agent_b": rec.agent_b,
                "wins_a": rec.wins_a,
                "wins_b": rec.wins_b,
                "draws": rec.draws,
                "errors": rec.errors,
                "games": rec.games,
                "win_rate_a": round(rec.rate_a, 6),
                "se_a": round(rec.se_a, 6),
                "win_rate_b": round(rec.rate_b, 6),
                "se_b": round(rec.se_b, 6),
            })
        return out

    @classmethod
    def from_rows(cls, rows) -> TournamentTable:
        rows = list(rows)
        table = cls(rows[0]["game"] if rows else "")
        for r in rows:
            rec = table.record(r["agent_a"], r["agent_b"])
            rec.wins_a, rec.wins_b = int(r["wins_a"]), int(r["wins_b"])
            rec.draws, rec.errors = int(r["draws"]), int(r["errors"])
        return table

    def format(self) -> str:
        lines = [f"{'agent A':>10} {'agent B':>10} {'A win %':>14} {'B win %':>14} {'draws':>6} {'games':>6}"]
        for rec in self.pairs.values():
            lines.append(
                f"{rec.agent_a:>10} {rec.agent_b:>10} "
                f"{100 * rec.rate_a:7.1f} ({100 * rec.se_a:4.1f}) "
                f"{100 * rec.rate_b:7.1f} ({100 * rec.se_b:4.1f}) {rec.draws:6d} {rec.games:6d}"
            )
        return "\n".join(lines)


def _workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get("SCSA_THREADS", "1") or 1)
    return max(1, workers)


def run_matches(specs: list[MatchSpec], workers: int | None = None) -> list[MatchResult]:
    """Run matches, possibly in parallel; results come back in spec order."""
    workers = _workers(workers)
    if workers == 1 or len(specs) <= 1:
        return [run_match(s) for s in specs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_match, specs))


def tournament_specs(game, agents, n_positions=50, seeds_per_eval=5, position_offset=0, **spec_kw) -> list[MatchSpec]:
    specs = []
    for a, b in itertools.combinations(agents, 2):
        for pos in range(position_offset, position_offset + n_positions):
            for side in (0, 1):
                for seed in range(seeds_per_eval):
                    specs.append(MatchSpec(game.upper(), a, b, pos, seed, a_side=side, **spec_kw))
    return specs


def run_tournament(game, agents, n_positions=50, seeds_per_eval=5, workers=None, out=None, games_out=None,
                   **spec_kw) -> tuple[TournamentTable, list[MatchResult]]:
    """Every unordered pair plays positions x 2 sides x seeds games."""
    if len(agents) < 2:
        raise ValueError("a tournament needs at least two agents")
    specs = tournament_specs(game, agents, n_positions, seeds_per_eval, **spec_kw)
    results = run_matches(specs, workers)
    table = TournamentTable(game.upper())
    for a, b in itertools.combinations(agents, 2):
        table.record(a, b)
    for r in results:
        table.record(r.spec.agent_a, r.spec.agent_b).add(r)
    if out is not None:
        emit_csv(table, out)
    if games_out is not None:
        emit_csv(game_rows(results), games_out, fields=GAME_FIELDS)
    return table, results


GAME_FIELDS = ("game", "agent_a", "agent_b", "a_side", "position_seed", "match_seed", "winner", "rounds",
               "moves", "mean_fm_calls", "max_fm_calls", "error")


def game_rows(results) -> list[dict]:
    rows = []
    for r in results:
        fm = r.fm_calls
        rows.append({
            "game": r.spec.game,
            "agent_a": r.spec.agent_a,
            "agent_b": r.spec.agent_b,
            "a_side": r.spec.a_side,
            "position_seed": r.spec.position_seed,
            "match_seed": r.spec.match_seed,
            "winner": r.winner,
            "rounds": r.rounds,
            "moves": len(r.actions),
            "mean_fm_calls": round(sum(fm) / len(fm), 3) if fm else 0,
            "max_fm_calls": max(fm) if fm else 0,
            "error": r.error,
        })
    return rows


# size-limit sweep -----------------------------------------------------

SWEEP_FIELDS = ("game", "size_limit", "games", "wins", "losses", "draws", "win_rate", "se")


def sweep_specs(game, value, n_games, position_offset=0, **spec_kw) -> list[MatchSpec]:
    """``n_games`` SCSA-vs-rule games: positions in pairs, sides switched."""
    extra = tuple(spec_kw.pop("agent_overrides", ())) + (("size_limit", value),)
    return [
        MatchSpec(game.upper(), "scsa", "rule", position_offset + i // 2, 0, a_side=i % 2,
                  agent_overrides=extra, **spec_kw)
        for i in range(n_games)
    ]


def sweep_size_limit(game, values=(2, 3, 4, 5), n_games=100, workers=None, out=None, **spec_kw) -> list[dict]:
    rows = []
    for v in values:
        results = run_matches(sweep_specs(game, v, n_games, **dict(spec_kw)), workers)
        rec = PairRecord("scsa", "rule")
        for r in results:
            rec.add(r)
        rows.append({
            "game": game.upper(),
            "size_limit": v,
            "games": rec.games,
            "wins": rec.wins_a,
            "losses": rec.wins_b,
            "draws": rec.draws,
            "win_rate": round(rec.rate_a, 6),
            "se": round(rec.se_a, 6),
        })
    if out is not None:
        emit_csv(rows, out, fields=SWEEP_FIELDS)
    return rows


# compression traces ---------------------------------------------------

TRACE_FIELDS = ("iteration", "ground_nodes", "abstract_nodes", "compression_rate", "mode", "seed")
TRACE_SUMMARY_FIELDS = ("iteration", "mode", "runs", "mean", "se", "split_iteration")


@dataclass
class CompressionTrace:
    game: str
    rows: list = field(default_factory=list)  # raw per-run checkpoints
    splits: dict = field(default_factory=dict)  # mode -> list of split iterations (None if none)

    def summary(self) -> list[dict]:
        by = {}
        for r in self.rows:
            by.setdefault((r["mode"], r["iteration"]), []).append(r["compression_rate"])
        out = []
        for (mode, it), vals in sorted(by.items()):
            n = len(vals)
            mean = sum(vals) / n
            var = sum((v - mean) ** 2 for v in vals) / (n - 1) if n > 1 else 0.0
            splits = [s for s in self.splits.get(mode, []) if s is not None]
            out.append({
                "iteration": it,
                "mode": mode,
                "runs": n,
                "mean": mean,
                "se": math.sqrt(var / n),
                "split_iteration": min(splits) if splits else "",
            })
        return out

    def series(self, mode: str) -> list[tuple[int, float]]:
        return [(r["iteration"], r["mean"]) for r in self.summary() if r["mode"] == mode]


def trace_compression(game="KTK", modes=("elastic", "scsa"), n_runs=10, budget=None, out=None,
                      summary_out=None, position_offset=0, **overrides) -> CompressionTrace:
    """Log the compression rate every batch of a root search, per mode.

    Each run searches from a seeded initial position with the mode's default
    parameters.
    """
    game = game.upper()
    cfg = load_config(game)
    trace = CompressionTrace(game)
    for mode in modes:
        trace.splits[mode] = []
        for run in range(n_runs):
            seed = position_offset + run
            state = sample_initial_state(cfg, seed)
            kw = dict(overrides)
            if budget is not None:
                kw["budget"] = budget
            params = agent_params(game, mode, seed=seed, **kw)
            _, stats = run_search(state, params)
            trace.splits[mode].append(stats.split_iteration)
            for it, ground, abstract, rate in stats.trace:
                trace.rows.append({
                    "iteration": it,
                    "ground_nodes": ground,
                    "abstract_nodes": abstract,
                    "compression_rate": rate,
                    "mode": mode,
                    "seed": seed,
                })
    if out is not None:
        emit_csv(trace.rows, out, fields=TRACE_FIELDS)
    if summary_out is not None:
        emit_csv(trace.summary(), summary_out, fields=TRACE_SUMMARY_FIELDS)
    return trace


# csv ------------------------------------------------------------------


def emit_csv(data, path, fields=None) -> Path:
    """Write rows (or a TournamentTable) as CSV with a header row."""
    if isinstance(data, TournamentTable):
        rows, fields = data.rows(), fields or TournamentTable.FIELDS
    else:
        rows = list(data)
        if fields is None:
            if not rows:
                raise ValueError("cannot infer columns of an empty table; pass fields")
            fields = list(rows[0].keys())
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(fields))
        writer.writeheader()
        for r in rows:
            writer.writerow(r)
    return path


def read_csv(path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


__all__ = [
    "CompressionTrace",
    "MatchResult",
    "MatchSpec",
    "PairRecord",
    "SearchParams",
    "TournamentTable",
    "desk_scale",
    "emit_csv",
    "read_csv",
    "run_match",
    "run_matches",
    "run_tournament",
    "standard_error",
    "sweep_size_limit",
    "trace_compression",
]
