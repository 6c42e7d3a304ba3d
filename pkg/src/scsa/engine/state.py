from __future__ import annotations

from typing import Any, NamedTuple

# N, E, S, W
DIRECTIONS: tuple[tuple[int, int], ...] = ((0, -1), (1, 0), (0, 1), (-1, 0))
DIRECTION_NAMES = ("N", "E", "S", "W")


class GridMap:
    """Rectangular tile map.  ``cells`` holds one row string per y."""

    __slots__ = ("width", "height", "cells", "_plain", "holes", "veins")

    def __init__(self, width: int, height: int, cells: tuple[str, ...]):
        if width < 1 or height < 1:
            raise ValueError("map must be at least 1x1")
        if len(cells) != height or any(len(r) != width for r in cells):
            raise ValueError("map cells do not match width/height")
        self.width = width
        self.height = height
        self.cells = tuple(cells)
        self._plain = frozenset(
            (x, y) for y, row in enumerate(cells) for x, c in enumerate(row) if c == "."
        )
        self.holes = frozenset(
            (x, y) for y, row in enumerate(cells) for x, c in enumerate(row) if c == "O"
        )
        self.veins = tuple(
            (x, y) for y, row in enumerate(cells) for x, c in enumerate(row) if c == "G"
        )

    def terrain(self, x: int, y: int) -> str:
        return {".": "plain", "#": "wall", "O": "hole", "G": "gold-vein"}[self.cells[y][x]]

    def inside(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def is_plain(self, x: int, y: int) -> bool:
        return (x, y) in self._plain

    def neighbours(self, x: int, y: int):
        for dx, dy in DIRECTIONS:
            nx, ny = x + dx, y + dy
            if 0 <= nx < self.width and 0 <= ny < self.height:
                yield nx, ny

    @property
    def diameter(self) -> int:
        """Largest Manhattan distance between two tiles."""
        return self.width + self.height - 2

    @property
    def diagonal(self) -> float:
        return ((self.width - 1) ** 2 + (self.height - 1) ** 2) ** 0.5

    def __eq__(self, other):
        return isinstance(other, GridMap) and self.cells == other.cells

    def __hash__(self):
        return hash(self.cells)


class Unit(NamedTuple):
    id: int
    owner: int
    kind: str
    x: int
    y: int
    hp: int

    @property
    def pos(self) -> tuple[int, int]:
        return (self.x, self.y)


class UnitAction(NamedTuple):
    """One atomic action.

    ``target`` depends on the verb: a tile for ``move``, a unit id for
    ``attack``/``heal``, a unit kind for ``spawn``, a technology for
    ``research``, and for ``push`` the triple ``(move_dir, select_dir,
    push_dir)`` with ``move_dir`` ``None`` for staying put.
    """

    actor: int | None
    verb: str
    target: Any = None

    def __str__(self):
        if self.verb == "end-turn":
            return "end-turn"
        return f"{self.actor}:{self.verb}:{self.target}" if self.target is not None else f"{self.actor}:{self.verb}"


END_TURN = UnitAction(None, "end-turn", None)


class Outcome(NamedTuple):
    kind: str  # "win" | "draw" | "ongoing"
    winner: int | None = None

    @property
    def terminal(self) -> bool:
        return self.kind != "ongoing"

    def score(self, player: int) -> float:
        if self.kind == "win":
            return 1.0 if self.winner == player else -1.0
        return 0.0


ONGOING = Outcome("ongoing")
DRAW = Outcome("draw")


class GameState:
    """Immutable game position.  Successors are built with :meth:`replace`."""

    __slots__ = (
        "config",
        "units",
        "to_move",
        "first",
        "acted",
        "round",
        "gold",
        "research",
        "pending",
        "next_id",
        "_occ",
        "_by_id",
        "_outcome",
    )

    def __init__(self, config, units, to_move, first, acted, round, gold, research, pending, next_id):
        self.config = config
        self.units: tuple[Unit, ...] = units
        self.to_move: int = to_move
        self.first: int = first
        self.acted: frozenset[int] = acted
        self.round: int = round
        self.gold: tuple[int, int] = gold
        self.research: tuple[frozenset, frozenset] = research
        self.pending: tuple[frozenset, frozenset] = pending
        self.next_id: int = next_id
        self._occ = None
        self._by_id = None
        self._outcome = None

    @classmethod
    def initial(cls, config, units, gold=(0, 0), to_move: int = 0) -> GameState:
        units = tuple(sorted(units, key=lambda u: u.id))
        next_id = max((u.id for u in units), default=-1) + 1
        empty = frozenset()
        return cls(config, units, to_move, to_move, empty, 0, tuple(gold), (empty, empty), (empty, empty), next_id)

    def replace(self, **changes) -> GameState:
        fields = {
            "config": self.config,
            "units": self.units,
            "to_move": self.to_move,
            "first": self.first,
            "acted": self.acted,
            "round": self.round,
            "gold": self.gold,
            "research": self.research,
            "pending": self.pending,
            "next_id": self.next_id,
        }
        fields.update(changes)
        if "units" in changes:
            fields["units"] = tuple(sorted(fields["units"], key=lambda u: u.id))
        return GameState(**fields)

    # lookups -----------------------------------------------------------
    @property
    def occupancy(self) -> dict[tuple[int, int], Unit]:
        if self._occ is None:
            self._occ = {(u.x, u.y): u for u in self.units}
        return self._occ

    @property
    def by_id(self) -> dict[int, Unit]:
        if self._by_id is None:
            self._by_id = {u.id: u for u in self.units}
        return self._by_id

    def unit(self, uid: int) -> Unit | None:
        return self.by_id.get(uid)

    def units_of(self, player: int) -> list[Unit]:
        return [u for u in self.units if u.owner == player]

    def eligible(self) -> list[Unit]:
        """Living units of the player to move that have not acted this turn."""
        p, acted = self.to_move, self.acted
        return [u for u in self.units if u.owner == p and u.id not in acted]

    def stats(self, unit: Unit):
        return self.config.stats[unit.kind]

    # serialization -----------------------------------------------------
    def key(self) -> tuple:
        return (
            self.units,
            self.to_move,
            self.first,
            tuple(sorted(self.acted)),
            self.round,
            self.gold,
            tuple(tuple(sorted(r)) for r in self.research),
            tuple(tuple(sorted(r)) for r in self.pending),
            self.next_id,
        )

    def to_dict(self) -> dict:
        return {
            "game": self.config.game,
            "units": [u._asdict() for u in self.units],
            "to_move": self.to_move,
            "first": self.first,
            "acted": sorted(self.acted),
            "round": self.round,
            "gold": list(self.gold),
            "research": [sorted(r) for r in self.research],
            "pending": [sorted(r) for r in self.pending],
            "next_id": self.next_id,
        }

    def __eq__(self, other):
        if not isinstance(other, GameState):
            return NotImplemented
        return self.key() == other.key() and (self.config is other.config or self.config == other.config)

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"GameState({self.config.game}, round={self.round}, to_move={self.to_move}, units={len(self.units)})"

    def render(self) -> str:
        from scsa.games.config import LETTER_OF_KIND

        rows = [list(r) for r in self.config.map.cells]
        for u in self.units:
            ch = LETTER_OF_KIND.get(u.kind, "?")
            rows[u.y][u.x] = ch if u.owner == 0 else ch.lower()
        return "\n".join("".join(r) for r in rows)
