"""Board model and the variant rule engine: clue semantics and global rules.

Clue variants (right rules): V vanilla, X cross, X' mini-cross, K knight,
W wall, P partition, W' longest wall, E eyesight, E' eyesight difference,
N negation, with M (multiple) and L (liar) composing onto counting bases.
Left rules add global constraints on the mine set: Q C T O D S B T' D' A H U.

Checkerboard shading is anchored at (0, 0) being unshaded; boards are
bounded and neighborhoods truncate at the borders.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple, Union

Coord = Tuple[int, int]  # (row, col)
ClueDatum = Union[int, Tuple[int, ...]]

COUNTING_BASES = ("V", "X", "X'", "K")
RING_BASES = ("W", "P", "W'")
SIGHT_BASES = ("E", "E'")
BASES = COUNTING_BASES + RING_BASES + SIGHT_BASES

LEFT_RULES = ("Q", "C", "T", "O", "D", "S", "B", "T'", "D'", "A", "H", "U")

# cyclic order of the eight neighbors, for wall runs
RING = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))
ORTHO = ((-1, 0), (0, 1), (1, 0), (0, -1))
KNIGHT = ((1, 2), (2, 1), (-1, 2), (-2, 1), (1, -2), (2, -1), (-1, -2), (-2, -1))


class RulesetError(ValueError):
    """Unsupported rule combination or unknown rule letter."""


@dataclass(frozen=True)
class Ruleset:
    """Clue variant (base plus M/L/N modifiers) and a set of left rules."""

    base: str = "V"
    multiple: bool = False
    liar: bool = False
    negation: bool = False
    left_rules: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.base not in BASES:
            raise RulesetError(f"unknown clue variant {self.base!r}")
        if (self.multiple or self.negation) and self.base not in COUNTING_BASES:
            raise RulesetError("M and N compose only with counting clue variants")
        if self.liar and self.base == "W":
            raise RulesetError("liar clues over wall multisets are undefined")
        for r in self.left_rules:
            if r not in LEFT_RULES:
                raise RulesetError(f"unknown left rule {r!r}")

    @classmethod
    def parse(cls, text: str) -> "Ruleset":
        """Parse strings like ``"X+M+L;Q,C"``; ``"V"`` is plain vanilla."""
        right, _, left = text.partition(";")
        base = None
        multiple = liar = negation = False
        for token in filter(None, (t.strip() for t in right.split("+"))):
            if token == "M":
                multiple = True
            elif token == "L":
                liar = True
            elif token == "N":
                negation = True
            elif token in BASES:
                if base is not None:
                    raise RulesetError(f"two base variants: {base}, {token}")
                base = token
            else:
                raise RulesetError(f"unknown clue token {token!r}")
        rules = tuple(
            sorted(filter(None, (t.strip() for t in left.split(","))))
        )
        return cls(base or "V", multiple, liar, negation, rules)

    def __str__(self) -> str:
        tokens = [self.base]
        if self.multiple:
            tokens.append("M")
        if self.negation:
            tokens.append("N")
        if self.liar:
            tokens.append("L")
        out = "+".join(tokens)
        if self.left_rules:
            out += ";" + ",".join(self.left_rules)
        return out


VANILLA = Ruleset()


@dataclass(frozen=True)
class PartialBoard:
    """Rectangular grid of covered cells and uncovered cells with clue data."""

    width: int
    height: int
    clues: Mapping[Coord, ClueDatum] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for (r, c) in self.clues:
            if not (0 <= r < self.height and 0 <= c < self.width):
                raise ValueError(f"clue at {(r, c)} is off the board")

    def cells(self) -> Iterable[Coord]:
        return itertools.product(range(self.height), range(self.width))

    def covered(self) -> List[Coord]:
        return [c for c in self.cells() if c not in self.clues]

    def uncovered(self) -> Dict[Coord, ClueDatum]:
        return dict(self.clues)

    def reveal(self, updates: Mapping[Coord, ClueDatum]) -> "PartialBoard":
        merged = dict(self.clues)
        for cell, datum in updates.items():
            if cell in merged and merged[cell] != datum:
                raise ValueError(f"cell {cell} already uncovered differently")
            merged[cell] = datum
        return PartialBoard(self.width, self.height, merged)

    def in_bounds(self, cell: Coord) -> bool:
        return 0 <= cell[0] < self.height and 0 <= cell[1] < self.width


def shaded(cell: Coord) -> bool:
    return (cell[0] + cell[1]) % 2 == 1


def _in_grid(width: int, height: int, cell: Coord) -> bool:
    return 0 <= cell[0] < height and 0 <= cell[1] < width


def neighborhood(width: int, height: int, cell: Coord, offsets) -> List[Coord]:
    r, c = cell
    out = []
    for dr, dc in offsets:
        p = (r + dr, c + dc)
        if _in_grid(width, height, p):
            out.append(p)
    return out


def clue_scope(width: int, height: int, cell: Coord, rs: Ruleset) -> List[Coord]:
    """Cells whose mine status a counting clue at ``cell`` can see."""
    if rs.base == "V":
        return neighborhood(width, height, cell, RING)
    if rs.base == "X":
        offs = [(d * s, 0) for d in (1, 2) for s in (1, -1)] + [
            (0, d * s) for d in (1, 2) for s in (1, -1)
        ]
        return neighborhood(width, height, cell, offs)
    if rs.base == "X'":
        return neighborhood(width, height, cell, ORTHO)
    if rs.base == "K":
        return neighborhood(width, height, cell, KNIGHT)
    raise RulesetError(f"{rs.base} clues have no simple counting scope")


def cell_weight(cell: Coord, rs: Ruleset) -> int:
    """Signed weight a mine at ``cell`` contributes to a counting clue."""
    w = 2 if rs.multiple and shaded(cell) else 1
    if rs.negation and not shaded(cell):
        w = -w
    return w


def _ring_runs(
    width: int, height: int, mines: FrozenSet[Coord], cell: Coord
) -> List[int]:
    """Lengths of maximal cyclic runs of mines around the eight-cell ring."""
    r, c = cell
    flags = []
    for dr, dc in RING:
        p = (r + dr, c + dc)
        flags.append(_in_grid(width, height, p) and p in mines)
    if all(flags):
        return [8]
    if not any(flags):
        return []
    # rotate so the ring starts on a non-mine, then split runs linearly
    start = flags.index(False)
    rotated = flags[start:] + flags[:start]
    runs = []
    count = 0
    for f in rotated:
        if f:
            count += 1
        elif count:
            runs.append(count)
            count = 0
    if count:
        runs.append(count)
    return runs


def _sight(
    width: int, height: int, mines: FrozenSet[Coord], cell: Coord, dirs
) -> int:
    """Non-mines seen from ``cell`` along ``dirs``, exclusive of the cell."""
    r, c = cell
    total = 0
    for dr, dc in dirs:
        k = 1
        while True:
            p = (r + dr * k, c + dc * k)
            if not _in_grid(width, height, p) or p in mines:
                break
            total += 1
            k += 1
    return total


def clue_value(
    width: int,
    height: int,
    mines: Iterable[Coord],
    cell: Coord,
    rs: Ruleset = VANILLA,
) -> ClueDatum:
    """The true clue datum at a non-mine cell under the active variant.

    Liar adjustment is not applied here: a shown liar clue is checked as
    off-by-one against this value during consistency checking.
    """
    mine_set = frozenset(mines)
    if cell in mine_set:
        raise ValueError(f"clue undefined: {cell} is a mine")
    if not _in_grid(width, height, cell):
        raise ValueError(f"{cell} is off the board")
    if rs.base in COUNTING_BASES:
        return sum(
            cell_weight(p, rs)
            for p in clue_scope(width, height, cell, rs)
            if p in mine_set
        )
    if rs.base == "W":
        return tuple(sorted(_ring_runs(width, height, mine_set, cell)))
    if rs.base == "P":
        return len(_ring_runs(width, height, mine_set, cell))
    if rs.base == "W'":
        runs = _ring_runs(width, height, mine_set, cell)
        return max(runs) if runs else 0
    if rs.base == "E":
        return 1 + _sight(width, height, mine_set, cell, ORTHO)
    if rs.base == "E'":
        h = _sight(width, height, mine_set, cell, ((0, 1), (0, -1)))
        v = _sight(width, height, mine_set, cell, ((1, 0), (-1, 0)))
        return h - v
    raise RulesetError(f"unhandled clue variant {rs.base!r}")


def clue_matches(shown: ClueDatum, true_value: ClueDatum, rs: Ruleset) -> bool:
    if rs.liar:
        if not isinstance(shown, int) or not isinstance(true_value, int):
            raise RulesetError("liar clues need integer clue data")
        return abs(shown - true_value) == 1
    return shown == true_value


# -- left rules -----------------------------------------------------------------


def _components(cells: Set[Coord], offsets) -> List[Set[Coord]]:
    remaining = set(cells)
    comps = []
    while remaining:
        start = remaining.pop()
        comp = {start}
        stack = [start]
        while stack:
            r, c = stack.pop()
            for dr, dc in offsets:
                p = (r + dr, c + dc)
                if p in remaining:
                    remaining.discard(p)
                    comp.add(p)
                    stack.append(p)
        comps.append(comp)
    return comps


def _rule_Q(w, h, m):
    for r in range(h - 1):
        for c in range(w - 1):
            if not any(
                (r + dr, c + dc) in m for dr in (0, 1) for dc in (0, 1)
            ):
                return False
    return True


def _rule_C(w, h, m):
    return len(_components(set(m), RING)) <= 1


def _triples(w, h, m):
    for (r, c) in m:
        for dr, dc in ((0, 1), (1, 0), (1, 1), (1, -1)):
            if (r + dr, c + dc) in m and (r + 2 * dr, c + 2 * dc) in m:
                yield (r, c), dr, dc


def _rule_T(w, h, m):
    return next(_triples(w, h, m), None) is None


def _rule_O(w, h, m):
    non_mines = {
        (r, c)
        for r in range(h)
        for c in range(w)
        if (r, c) not in m
    }
    if len(_components(non_mines, ORTHO)) > 1:
        return False
    for comp in _components(set(m), ORTHO):
        if not any(
            r in (0, h - 1) or c in (0, w - 1) for (r, c) in comp
        ):
            return False
    return True


def _rule_D(w, h, m):
    for (r, c) in m:
        degree = sum((r + dr, c + dc) in m for dr, dc in ORTHO)
        if degree != 1:
            return False
    return True


def _rule_S(w, h, m):
    if len(m) <= 1:
        return True
    degrees = {}
    for (r, c) in m:
        degrees[(r, c)] = sum((r + dr, c + dc) in m for dr, dc in ORTHO)
    if any(d > 2 for d in degrees.values()):
        return False
    ends = [cell for cell, d in degrees.items() if d == 1]
    if len(ends) != 2:
        return False
    if len(_components(set(m), ORTHO)) != 1:
        return False
    # connected with max degree 2 and two endpoints: a simple path
    return True


def _rule_B(w, h, m):
    rows = [sum((r, c) in m for c in range(w)) for r in range(h)]
    cols = [sum((r, c) in m for r in range(h)) for c in range(w)]
    return len(set(rows) | set(cols)) == 1


def _rule_Tp(w, h, m):
    in_triple = set()
    for (r, c), dr, dc in _triples(w, h, m):
        in_triple.update({(r, c), (r + dr, c + dc), (r + 2 * dr, c + 2 * dc)})
    return all(cell in in_triple for cell in m)


def _rule_Dp(w, h, m):
    for comp in _components(set(m), RING):
        rows = {r for r, _ in comp}
        cols = {c for _, c in comp}
        if len(rows) > 1 and len(cols) > 1:
            return False
        if len(comp) > 4:
            return False
        # a straight component must be contiguous
        if len(rows) == 1:
            cs = sorted(cols)
            if cs[-1] - cs[0] != len(cs) - 1:
                return False
        else:
            rws = sorted(rows)
            if rws[-1] - rws[0] != len(rws) - 1:
                return False
    return True


def _rule_A(w, h, m):
    for (r, c) in m:
        for dr, dc in KNIGHT:
            if (r + dr, c + dc) in m:
                return False
    return True


def _rule_H(w, h, m):
    return all((r, c + 1) not in m for (r, c) in m)


def _rule_U(w, h, m):
    for (r, c) in m:
        if (r, c + 1) in m or (r + 1, c) in m:
            return False
    return True


_LEFT_IMPL = {
    "Q": _rule_Q,
    "C": _rule_C,
    "T": _rule_T,
    "O": _rule_O,
    "D": _rule_D,
    "S": _rule_S,
    "B": _rule_B,
    "T'": _rule_Tp,
    "D'": _rule_Dp,
    "A": _rule_A,
    "H": _rule_H,
    "U": _rule_U,
}


def check_left_rules(
    width: int, height: int, mines: Iterable[Coord], rules: Iterable[str]
) -> Dict[str, bool]:
    """Per-rule report of whether the mine set satisfies each requested rule."""
    m = frozenset(mines)
    report = {}
    for rule in rules:
        if rule not in _LEFT_IMPL:
            raise RulesetError(f"unknown left rule {rule!r}")
        report[rule] = _LEFT_IMPL[rule](width, height, m)
    return report


def is_consistent(
    board: PartialBoard, mines: Iterable[Coord], rs: Ruleset = VANILLA
) -> bool:
    """Mines avoid uncovered cells, match every clue, and obey the left rules."""
    m = frozenset(mines)
    for cell in m:
        if not board.in_bounds(cell) or cell in board.clues:
            return False
    if not all(
        check_left_rules(board.width, board.height, m, rs.left_rules).values()
    ):
        return False
    for cell, shown in board.clues.items():
        true_value = clue_value(board.width, board.height, m, cell, rs)
        if not clue_matches(shown, true_value, rs):
            return False
    return True
