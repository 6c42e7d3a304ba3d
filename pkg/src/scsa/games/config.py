"""Game definitions loaded from plain-text JSON config files.

A config file describes one game: the ASCII map (terrain plus optional unit
placements), the unit stat table, the army composition used for seeded
initial positions, the TK economy, and the round limit.  The grammar is
documented in ``docs/config_format.md`` and enforced with
``data/config_schema.json``.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from scsa.engine.state import GameState, GridMap, Unit

GAMES = ("KTK", "PTA", "TK")

# map letters for unit placements; upper case = player 0, lower case = player 1
KIND_LETTERS = {
    "K": "king",
    "W": "warrior",
    "A": "archer",
    "H": "healer",
    "P": "pusher",
    "R": "worker",
    "N": "knight",
    "Z": "wizard",
    "C": "castle",
}
LETTER_OF_KIND = {v: k for k, v in KIND_LETTERS.items()}
TERRAIN_CHARS = {".": "plain", "#": "wall", "O": "hole", "G": "gold-vein"}

# first-placed kinds when sampling seeded positions
_ANCHOR_KINDS = ("castle", "king")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class UnitStats:
    max_hp: int
    damage: int = 0
    attack_range: int = 0
    heal: int = 0
    heal_range: int = 0
    mobile: bool = True
    actions: tuple[str, ...] = ("move",)

    def can(self, verb: str) -> bool:
        return verb in self.actions


@dataclass(frozen=True)
class Economy:
    start_gold: int = 0
    collect_yield: int = 10
    spawn_costs: dict[str, int] = field(default_factory=dict)
    spawn_requires: dict[str, str] = field(default_factory=dict)
    technologies: tuple[str, ...] = ()

    def __hash__(self):
        return hash((self.start_gold, self.collect_yield, tuple(sorted(self.spawn_costs.items()))))


@dataclass(frozen=True, eq=False)
class GameConfig:
    game: str
    map: GridMap
    stats: dict[str, UnitStats]
    army: tuple[str, ...]
    placements: tuple[tuple[str, int, int, int], ...] = ()
    economy: Economy | None = None
    round_limit: int = 100
    options: dict[str, Any] = field(default_factory=dict)
    name: str = ""

    def __eq__(self, other):
        if not isinstance(other, GameConfig):
            return NotImplemented
        return to_dict(self) == to_dict(other)

    def __hash__(self):
        return id(self)

    def option(self, key: str, default=None):
        return self.options.get(key, default)


def _schema() -> dict:
    text = resources.files("scsa.data").joinpath("config_schema.json").read_text()
    return json.loads(text)


def from_dict(data: dict) -> GameConfig:
    try:
        jsonschema.validate(data, _schema())
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid game config: {exc.message}") from exc

    rows = data["map"]
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ConfigError("map rows must all have the same width")

    terrain_rows = []
    placements = []
    for y, row in enumerate(rows):
        cells = []
        for x, ch in enumerate(row):
            if ch in TERRAIN_CHARS:
                cells.append(ch)
            elif ch.upper() in KIND_LETTERS:
                owner = 0 if ch.isupper() else 1
                placements.append((KIND_LETTERS[ch.upper()], owner, x, y))
                cells.append(".")
            else:
                raise ConfigError(f"unknown map character {ch!r} at ({x}, {y})")
        terrain_rows.append("".join(cells))
    grid = GridMap(width, len(rows), tuple(terrain_rows))

    stats = {}
    for kind, s in data["units"].items():
        stats[kind] = UnitStats(
            max_hp=s["hp"],
            damage=s.get("damage", 0),
            attack_range=s.get("range", 0),
            heal=s.get("heal", 0),
            heal_range=s.get("heal_range", 0),
            mobile=s.get("mobile", True),
            actions=tuple(s.get("actions", ["move"])),
        )

    army = tuple(data["army"])
    for kind in army + tuple(k for k, *_ in placements):
        if kind not in stats:
            raise ConfigError(f"army references unknown unit kind {kind!r}")

    economy = None
    if "economy" in data:
        e = data["economy"]
        economy = Economy(
            start_gold=e.get("start_gold", 0),
            collect_yield=e.get("collect_yield", 10),
            spawn_costs=dict(e.get("spawn_costs", {})),
            spawn_requires=dict(e.get("spawn_requires", {})),
            technologies=tuple(e.get("technologies", [])),
        )
        for kind in economy.spawn_costs:
            if kind not in stats:
                raise ConfigError(f"economy references unknown unit kind {kind!r}")

    return GameConfig(
        game=data["game"],
        map=grid,
        stats=stats,
        army=army,
        placements=tuple(placements),
        economy=economy,
        round_limit=data.get("round_limit", 100),
        options=dict(data.get("options", {})),
        name=data.get("name", ""),
    )


def to_dict(cfg: GameConfig) -> dict:
    rows = [list(r) for r in cfg.map.cells]
    for kind, owner, x, y in cfg.placements:
        letter = LETTER_OF_KIND[kind]
        rows[y][x] = letter if owner == 0 else letter.lower()
    units = {}
    for kind, s in cfg.stats.items():
        entry: dict[str, Any] = {"hp": s.max_hp}
        if s.damage:
            entry["damage"] = s.damage
        if s.attack_range:
            entry["range"] = s.attack_range
        if s.heal:
            entry["heal"] = s.heal
        if s.heal_range:
            entry["heal_range"] = s.heal_range
        if not s.mobile:
            entry["mobile"] = False
        entry["actions"] = list(s.actions)
        units[kind] = entry
    out: dict[str, Any] = {
        "game": cfg.game,
        "name": cfg.name,
        "round_limit": cfg.round_limit,
        "map": ["".join(r) for r in rows],
        "units": units,
        "army": list(cfg.army),
    }
    if cfg.economy is not None:
        e = cfg.economy
        out["economy"] = {
            "start_gold": e.start_gold,
            "collect_yield": e.collect_yield,
            "spawn_costs": dict(e.spawn_costs),
            "spawn_requires": dict(e.spawn_requires),
            "technologies": list(e.technologies),
        }
    if cfg.options:
        out["options"] = dict(cfg.options)
    return out


def load_config(source: str | Path, **overrides) -> GameConfig:
    """Load a config by game tag (``"ktk"``) or by file path.

    Keyword overrides replace top-level keys (``round_limit=30``) or, when
    the key names an option, entries of ``options``.
    """
    text = None
    if isinstance(source, str) and source.upper() in GAMES:
        name = f"{source.lower()}.cfg"
        text = resources.files("scsa.data").joinpath(name).read_text()
    else:
        text = Path(source).read_text()
    data = json.loads(text)
    for key, value in overrides.items():
        if key in ("round_limit", "army", "map", "units", "economy", "name"):
            data[key] = value
        else:
            data.setdefault("options", {})[key] = value
    return from_dict(data)


def dump_config(cfg: GameConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(to_dict(cfg), indent=2) + "\n")


def _initial_gold(cfg: GameConfig) -> tuple[int, int]:
    g = cfg.economy.start_gold if cfg.economy else 0
    return (g, g)


def canonical_state(cfg: GameConfig) -> GameState:
    """The start state drawn on the config's map (unit letters)."""
    units = []
    # kings and castles get the lowest ids, as in sampled positions
    order = sorted(cfg.placements, key=lambda p: (p[1], p[0] not in _ANCHOR_KINDS, p[3], p[2]))
    for uid, (kind, owner, x, y) in enumerate(order):
        units.append(Unit(uid, owner, kind, x, y, cfg.stats[kind].max_hp))
    return GameState.initial(cfg, units, _initial_gold(cfg))


def _spawn_region(cfg: GameConfig, owner: int) -> list[tuple[int, int]]:
    h = cfg.map.height
    ys = range(0, h // 2) if owner == 0 else range(h - h // 2, h)
    return [(x, y) for y in ys for x in range(cfg.map.width)]


def sample_initial_state(cfg: GameConfig, seed: int) -> GameState:
    """Seeded initial position.

    Procedure: ``random.Random(seed)``; for player 0 then player 1, place the
    army (castle and king first, remaining kinds in config order) by uniform
    rejection sampling of tiles in the player's half of the map (player 0 the
    top ``height // 2`` rows, player 1 the bottom rows).  A tile is accepted
    when it is plain and unoccupied; a castle additionally needs at least two
    free plain 4-neighbours so it can spawn.
    """
    rng = random.Random(seed)
    grid = cfg.map
    occupied: set[tuple[int, int]] = set()
    units = []
    uid = 0
    for owner in (0, 1):
        region = _spawn_region(cfg, owner)
        kinds = sorted(cfg.army, key=lambda k: _ANCHOR_KINDS.index(k) if k in _ANCHOR_KINDS else 2)
        for kind in kinds:
            for _ in range(100_000):
                x, y = region[rng.randrange(len(region))]
                if not grid.is_plain(x, y) or (x, y) in occupied:
                    continue
                if kind == "castle":
                    free = sum(
                        1
                        for nx, ny in grid.neighbours(x, y)
                        if grid.is_plain(nx, ny) and (nx, ny) not in occupied
                    )
                    if free < 2:
                        continue
                break
            else:
                raise ConfigError(f"could not place {kind} for player {owner}")
            occupied.add((x, y))
            units.append(Unit(uid, owner, kind, x, y, cfg.stats[kind].max_hp))
            uid += 1
    return GameState.initial(cfg, units, _initial_gold(cfg))


def mirror_state(state: GameState) -> GameState:
    """Point-reflect the board and swap ownership (and who moves first).

    On a point-symmetric map the mirrored game is the original game with the
    player labels exchanged.
    """
    cfg = state.config
    w, h = cfg.map.width, cfg.map.height
    units = [
        Unit(u.id, 1 - u.owner, u.kind, w - 1 - u.x, h - 1 - u.y, u.hp) for u in state.units
    ]
    return state.replace(
        units=tuple(units),
        to_move=1 - state.to_move,
        first=1 - state.first,
        gold=state.gold[::-1],
        research=state.research[::-1],
        pending=state.pending[::-1],
    )
