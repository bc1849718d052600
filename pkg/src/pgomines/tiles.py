"""Tile specifications and machine verification of gadget implementations.

A tile is a square Minesweeper fragment: clue cells, covered cells (some of
which are forced mines in every solution), and designated port cells at the
middle of used sides.  Adjacent tiles interact only through facing port
pairs, which hold exactly one mine; a mine at a port cell means the edge
points into the tile.

Verification enumerates all mine placements over the covered cells against
the tile's clues under a one-tile margin of frame context (everything
outside is safe except facing ports, which mirror the tile's own ports) and
checks constraint match, parsimony, silence, constant mine count, and
forcedness of the declared mines.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from pgomines.gadgets import Gadget
from pgomines.rules import (
    ClueDatum,
    Coord,
    Ruleset,
    VANILLA,
    clue_matches,
    clue_value,
)

#: counterclockwise cycle of tile sides, shared with induced-network rotations
SIDE_CYCLE = ("n", "w", "s", "e")
OPPOSITE = {"n": "s", "s": "n", "w": "e", "e": "w"}

#: left rules checkable within a tile plus a one-tile margin
LOCAL_LEFT_RULES = ("Q", "T", "T'", "U", "H", "A", "D", "D'")


class TileError(ValueError):
    """Malformed tile specification."""


def port_cell(size: int, side: str) -> Coord:
    mid = size // 2
    return {
        "n": (0, mid),
        "s": (size - 1, mid),
        "w": (mid, 0),
        "e": (mid, size - 1),
    }[side]


@dataclass(frozen=True)
class TileSpec:
    """A square tile: clues, ports, declared mines, and intended solutions.

    ``solutions`` are the author's intended mine placements (tile-local
    coordinates, ports included); clue values are derived from them and the
    verifier independently confirms the clue system admits exactly these.
    """

    name: str
    size: int
    clues: Mapping[Coord, ClueDatum]
    ports: Mapping[str, Coord]
    solutions: Tuple[FrozenSet[Coord], ...]
    fixed_mines: FrozenSet[Coord] = frozenset()
    gadget: Optional[Gadget] = None
    ruleset: Ruleset = VANILLA
    paired_mines: bool = False  # mine-count constancy holds minus port cells

    def __post_init__(self) -> None:
        for side, cell in self.ports.items():
            if side not in SIDE_CYCLE:
                raise TileError(f"unknown side {side!r}")
            if cell != port_cell(self.size, side):
                raise TileError(f"port {side} must sit at {port_cell(self.size, side)}")
            if cell in self.clues:
                raise TileError(f"port cell {cell} must stay covered")
        for cell in self.fixed_mines:
            if cell in self.clues:
                raise TileError(f"fixed mine {cell} collides with a clue")
        for (r, c) in self.clues:
            if not (0 <= r < self.size and 0 <= c < self.size):
                raise TileError(f"clue {(r, c)} outside the tile")

    def covered(self) -> List[Coord]:
        return [
            (r, c)
            for r in range(self.size)
            for c in range(self.size)
            if (r, c) not in self.clues
        ]

    def port_order(self) -> Tuple[str, ...]:
        return tuple(s for s in SIDE_CYCLE if s in self.ports)

    def pattern_of(self, solution: FrozenSet[Coord]) -> FrozenSet[str]:
        return frozenset(s for s, cell in self.ports.items() if cell in solution)

    def solution_for(self, pattern: FrozenSet[str]) -> FrozenSet[Coord]:
        for sol in self.solutions:
            if self.pattern_of(sol) == pattern:
                return sol
        raise KeyError(f"no solution for port pattern {sorted(pattern)}")

    # -- geometry -----------------------------------------------------------

    def rotated(self) -> "TileSpec":
        """Quarter turn; (r, c) maps to (c, size-1-r) and sides advance."""
        side_map = {"n": "e", "e": "s", "s": "w", "w": "n"}
        return self._transform(
            lambda rc: (rc[1], self.size - 1 - rc[0]), side_map, "r"
        )

    def reflected(self) -> "TileSpec":
        """Left-right mirror; west and east swap."""
        side_map = {"n": "n", "s": "s", "w": "e", "e": "w"}
        return self._transform(
            lambda rc: (rc[0], self.size - 1 - rc[1]), side_map, "m"
        )

    def _transform(self, f, side_map, suffix: str) -> "TileSpec":
        gadget = None
        if self.gadget is not None:
            new_sides = [side_map[p] for p in self.gadget.ports]
            order = tuple(s for s in SIDE_CYCLE if s in new_sides)
            constraint = frozenset(
                frozenset(side_map[p] for p in subset)
                for subset in self.gadget.constraint
            )
            gadget = Gadget(f"{self.gadget.name}-{suffix}", order, constraint)
        return TileSpec(
            name=f"{self.name}-{suffix}",
            size=self.size,
            clues={f(c): v for c, v in self.clues.items()},
            ports={side_map[s]: f(c) for s, c in self.ports.items()},
            solutions=tuple(
                frozenset(f(c) for c in sol) for sol in self.solutions
            ),
            fixed_mines=frozenset(f(c) for c in self.fixed_mines),
            gadget=gadget,
            ruleset=self.ruleset,
            paired_mines=self.paired_mines,
        )

    def oriented(self, sides: Sequence[str]) -> "TileSpec":
        """The rotation/reflection of this tile using exactly ``sides``."""
        want = frozenset(sides)
        cand = self
        for _ in range(4):
            if frozenset(cand.ports) == want:
                return cand
            cand = cand.rotated()
        cand = self.reflected()
        for _ in range(4):
            if frozenset(cand.ports) == want:
                return cand
            cand = cand.rotated()
        raise TileError(f"{self.name} has no orientation with sides {sorted(want)}")


def derive_clues(
    size: int,
    covered: Iterable[Coord],
    solutions: Sequence[FrozenSet[Coord]],
    ports: Mapping[str, Coord],
    rs: Ruleset = VANILLA,
) -> Dict[Coord, ClueDatum]:
    """Clue values for all non-covered cells, computed from the intended
    solutions under frame context; raises if any cell's value is ambiguous."""
    covered_set = set(covered)
    clues: Dict[Coord, ClueDatum] = {}
    for r in range(size):
        for c in range(size):
            if (r, c) in covered_set:
                continue
            values = {
                _context_value(size, ports, sol, (r, c), rs) for sol in solutions
            }
            if len(values) != 1:
                raise TileError(
                    f"cell {(r, c)} sees different values across solutions: "
                    f"{sorted(values)}"
                )
            clues[(r, c)] = values.pop()
    return clues


def _context_mines(
    size: int,
    ports: Mapping[str, Coord],
    solution: FrozenSet[Coord],
) -> Set[Coord]:
    """Tile mines in margin coordinates plus the mirrored facing ports."""
    mines = {(r + 1, c + 1) for (r, c) in solution}
    facing = {
        "n": lambda rc: (rc[0], rc[1] + 1),
        "s": lambda rc: (rc[0] + 2, rc[1] + 1),
        "w": lambda rc: (rc[0] + 1, rc[1]),
        "e": lambda rc: (rc[0] + 1, rc[1] + 2),
    }
    for side, cell in ports.items():
        if cell not in solution:
            mines.add(facing[side](cell))
    return mines


def _context_value(
    size: int,
    ports: Mapping[str, Coord],
    solution: FrozenSet[Coord],
    cell: Coord,
    rs: Ruleset,
) -> ClueDatum:
    mines = _context_mines(size, ports, solution)
    return clue_value(size + 2, size + 2, mines, (cell[0] + 1, cell[1] + 1), rs)


def tile_solutions(
    t: TileSpec, budget_cells: int = 25
) -> List[FrozenSet[Coord]]:
    """All covered-cell mine placements consistent with the tile's clues and
    the window-local part of its ruleset, under frame context."""
    cells = t.covered()
    if len(cells) > budget_cells:
        raise TileError(
            f"{t.name}: {len(cells)} covered cells exceed the {budget_cells}-cell budget"
        )
    from pgomines.rules import check_left_rules

    local_rules = [r for r in t.ruleset.left_rules if r in LOCAL_LEFT_RULES]
    out = []
    for bits in itertools.product((False, True), repeat=len(cells)):
        sol = frozenset(c for c, b in zip(cells, bits) if b)
        mines = _context_mines(t.size, t.ports, sol)
        ok = True
        for cell, shown in t.clues.items():
            true_value = clue_value(
                t.size + 2, t.size + 2, mines, (cell[0] + 1, cell[1] + 1), t.ruleset
            )
            if not clue_matches(shown, true_value, t.ruleset):
                ok = False
                break
        if ok and local_rules:
            report = check_left_rules(t.size + 2, t.size + 2, mines, local_rules)
            ok = all(report.values())
        if ok:
            out.append(sol)
    return out


@dataclass
class TileReport:
    tile: str
    achieved: Dict[FrozenSet[str], int]  # pattern -> number of solutions
    constraint_match: bool
    parsimonious: bool
    silent: bool
    constant_mines: bool
    mines_forced: bool
    mine_counts: Tuple[int, ...] = ()
    deferred_rules: Tuple[str, ...] = ()
    silence_failures: Tuple[Coord, ...] = ()

    @property
    def all_passed(self) -> bool:
        return (
            self.constraint_match
            and self.parsimonious
            and self.silent
            and self.constant_mines
            and self.mines_forced
        )


def implements_gadget(t: TileSpec, g: Gadget, budget_cells: int = 25) -> TileReport:
    """Project tile solutions to port patterns and compare with the gadget."""
    sols = tile_solutions(t, budget_cells)
    achieved: Dict[FrozenSet[str], int] = {}
    for sol in sols:
        p = t.pattern_of(sol)
        achieved[p] = achieved.get(p, 0) + 1
    mine = Gadget("achieved", t.port_order(), frozenset(achieved))
    match = mine.same_behavior(g)
    parsimonious = bool(achieved) and all(v == 1 for v in achieved.values())
    counts = tuple(
        len(s - set(t.ports.values())) if t.paired_mines else len(s) for s in sols
    )
    silent_ok, failures = _check_silence(t, sols)
    forced = all(all(m in s for m in t.fixed_mines) for s in sols)
    deferred = tuple(
        r for r in t.ruleset.left_rules if r not in LOCAL_LEFT_RULES
    )
    return TileReport(
        tile=t.name,
        achieved=achieved,
        constraint_match=match,
        parsimonious=parsimonious,
        silent=silent_ok,
        constant_mines=len(set(counts)) <= 1,
        mines_forced=forced,
        mine_counts=counts,
        deferred_rules=deferred,
        silence_failures=failures,
    )


def _check_silence(
    t: TileSpec, sols: Sequence[FrozenSet[Coord]]
) -> Tuple[bool, Tuple[Coord, ...]]:
    failures = []
    for cell in t.covered():
        data = {
            _context_value(t.size, t.ports, sol, cell, t.ruleset)
            for sol in sols
            if cell not in sol
        }
        if len(data) > 1:
            failures.append(cell)
    return (not failures, tuple(failures))


def solution_datum(t: TileSpec, solution: FrozenSet[Coord], cell: Coord) -> ClueDatum:
    """The clue datum ``cell`` would reveal under ``solution`` (frame context)."""
    return _context_value(t.size, t.ports, solution, cell, t.ruleset)


def verify_tile_properties(
    t: TileSpec, g: Optional[Gadget] = None, budget_cells: int = 25
) -> TileReport:
    """Full property report; also confirms the authored solutions are exactly
    the solutions the clue system admits."""
    target = g or t.gadget
    if target is None:
        raise TileError(f"{t.name} declares no gadget to verify against")
    report = implements_gadget(t, target, budget_cells)
    admitted = set(tile_solutions(t, budget_cells))
    if admitted != set(t.solutions):
        report.constraint_match = False
        report.parsimonious = False
    return report
