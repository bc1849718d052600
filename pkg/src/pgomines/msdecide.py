"""Minesweeper deciders: consistency search, inference, solvability, certificates.

Consistency runs a backtracking search over covered cells with unit
propagation on counting clues and early cuts for the window-local left
rules; every candidate is re-checked by the authoritative rule engine.
Inference and solvability are built on top exactly as the decision
problems' containment proofs prescribe.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from pgomines.network import BudgetExceeded
from pgomines.rules import (
    COUNTING_BASES,
    Coord,
    KNIGHT,
    ORTHO,
    PartialBoard,
    RING,
    Ruleset,
    VANILLA,
    cell_weight,
    clue_scope,
    clue_value,
    is_consistent,
)

DEFAULT_CELL_BUDGET = 2_000_000


class InconsistentBoard(ValueError):
    """Inference is undefined on an inconsistent board; refusing to answer."""


@dataclass(frozen=True)
class SolvabilityInstance:
    """Secret mines M and initially-known cells K on a width x height grid."""

    width: int
    height: int
    mines: FrozenSet[Coord]
    known: FrozenSet[Coord]

    def __post_init__(self) -> None:
        if self.mines & self.known:
            raise ValueError("known cells cannot contain mines")

    def board(self, rs: Ruleset = VANILLA) -> PartialBoard:
        clues = {
            cell: clue_value(self.width, self.height, self.mines, cell, rs)
            for cell in self.known
        }
        return PartialBoard(self.width, self.height, clues)


class _Search:
    """DFS over covered cells; generic over clue variants and left rules."""

    def __init__(
        self,
        board: PartialBoard,
        rs: Ruleset,
        pinned: Optional[Mapping[Coord, bool]] = None,
        budget: int = DEFAULT_CELL_BUDGET,
    ) -> None:
        self.board = board
        self.rs = rs
        self.budget = budget
        self.nodes = 0
        self.cells = board.covered()
        self.index = {c: i for i, c in enumerate(self.cells)}
        self.state: List[Optional[bool]] = [None] * len(self.cells)
        self.pinned = dict(pinned or {})
        self.counting = rs.base in COUNTING_BASES
        self.clue_cells: List[Tuple[Coord, int, List[Coord]]] = []
        self.cell_clues: Dict[int, List[int]] = {i: [] for i in range(len(self.cells))}
        if self.counting:
            for cell, shown in board.clues.items():
                scope = [
                    p
                    for p in clue_scope(board.width, board.height, cell, rs)
                    if p in self.index
                ]
                if not isinstance(shown, int):
                    raise ValueError("counting variant expects integer clues")
                k = len(self.clue_cells)
                self.clue_cells.append((cell, shown, scope))
                for p in scope:
                    self.cell_clues[self.index[p]].append(k)

    def _targets(self, shown: int) -> Tuple[int, ...]:
        if self.rs.liar:
            return (shown - 1, shown + 1)
        return (shown,)

    def _clue_feasible(self, k: int) -> bool:
        cell, shown, scope = self.clue_cells[k]
        cur = lo = hi = 0
        for p in scope:
            s = self.state[self.index[p]]
            w = cell_weight(p, self.rs)
            if s is True:
                cur += w
            elif s is None:
                lo += min(0, w)
                hi += max(0, w)
        return any(cur + lo <= t <= cur + hi for t in self._targets(shown))

    def _forced_by_clue(self, k: int) -> Optional[List[Tuple[int, bool]]]:
        """None on wipeout, else the assignments this clue forces."""
        cell, shown, scope = self.clue_cells[k]
        und = [p for p in scope if self.state[self.index[p]] is None]
        if not und:
            return []
        cur = sum(
            cell_weight(p, self.rs)
            for p in scope
            if self.state[self.index[p]] is True
        )
        forced = []
        for q in und:
            w = cell_weight(q, self.rs)
            lo = sum(min(0, cell_weight(p, self.rs)) for p in und if p != q)
            hi = sum(max(0, cell_weight(p, self.rs)) for p in und if p != q)
            can_mine = any(
                cur + w + lo <= t <= cur + w + hi for t in self._targets(shown)
            )
            can_safe = any(
                cur + lo <= t <= cur + hi for t in self._targets(shown)
            )
            if not can_mine and not can_safe:
                return None
            if not can_mine:
                forced.append((self.index[q], False))
            elif not can_safe:
                forced.append((self.index[q], True))
        return forced

    def _status(self, cell: Coord) -> Optional[bool]:
        # True mine / False safe / None undecided; uncovered cells are safe
        if cell in self.board.clues:
            return False
        i = self.index.get(cell)
        if i is None:
            return False  # off-board treated as safe by callers that bound
        return self.state[i]

    def _local_rules_ok(self, cell: Coord, value: bool) -> bool:
        r, c = cell
        rules = self.rs.left_rules
        inb = self.board.in_bounds
        if value:
            if "U" in rules and any(
                self._status((r + dr, c + dc)) is True for dr, dc in ORTHO
            ):
                return False
            if "H" in rules and (
                self._status((r, c - 1)) is True or self._status((r, c + 1)) is True
            ):
                return False
            if "A" in rules and any(
                self._status((r + dr, c + dc)) is True for dr, dc in KNIGHT
            ):
                return False
            if "T" in rules:
                for dr, dc in ((0, 1), (1, 0), (1, 1), (1, -1)):
                    line = [
                        self._status((r + k * dr, c + k * dc)) for k in (-2, -1, 0, 1, 2)
                    ]
                    for s in range(3):
                        if all(v is True for v in line[s : s + 3]):
                            return False
            if "D" in rules or "S" in rules:
                limit = 1 if "D" in rules else 2
                deg = sum(
                    self._status((r + dr, c + dc)) is True for dr, dc in ORTHO
                )
                if deg > limit:
                    return False
        else:
            if "Q" in rules:
                for r0 in (r - 1, r):
                    for c0 in (c - 1, c):
                        window = [(r0 + dr, c0 + dc) for dr in (0, 1) for dc in (0, 1)]
                        if all(inb(p) for p in window) and all(
                            self._status(p) is False for p in window
                        ):
                            return False
        return True

    def solutions(self) -> Iterator[FrozenSet[Coord]]:
        trail: List[int] = []

        def assign(i: int, value: bool) -> bool:
            self.state[i] = value
            trail.append(i)
            if not self._local_rules_ok(self.cells[i], value):
                return False
            for k in self.cell_clues[i]:
                if not self._clue_feasible(k):
                    return False
            return True

        def undo(mark: int) -> None:
            while len(trail) > mark:
                self.state[trail.pop()] = None

        def propagate() -> bool:
            changed = True
            while changed:
                changed = False
                for k in range(len(self.clue_cells)):
                    forced = self._forced_by_clue(k)
                    if forced is None:
                        return False
                    for i, val in forced:
                        if self.state[i] is None:
                            if not assign(i, val):
                                return False
                            changed = True
            return True

        def pick() -> Optional[int]:
            best = None
            best_size = None
            for k, (_, _, scope) in enumerate(self.clue_cells):
                und = [p for p in scope if self.state[self.index[p]] is None]
                if und and (best_size is None or len(und) < best_size):
                    best_size = len(und)
                    best = self.index[und[0]]
            if best is not None:
                return best
            for i, s in enumerate(self.state):
                if s is None:
                    return i
            return None

        def dfs() -> Iterator[FrozenSet[Coord]]:
            self.nodes += 1
            if self.nodes > self.budget:
                raise BudgetExceeded(
                    f"board search exceeded {self.budget} nodes"
                )
            i = pick()
            if i is None:
                mines = frozenset(
                    self.cells[j] for j, s in enumerate(self.state) if s
                )
                if is_consistent(self.board, mines, self.rs):
                    yield mines
                return
            for value in (False, True):
                mark = len(trail)
                if assign(i, value) and propagate():
                    yield from dfs()
                undo(mark)

        mark0 = len(trail)
        ok = True
        for cell, value in self.pinned.items():
            i = self.index.get(cell)
            if i is None:
                if value:  # pinning a mine on an uncovered cell
                    return
                continue
            if self.state[i] is None and not assign(i, value):
                ok = False
                break
            if self.state[i] is not None and self.state[i] != value:
                ok = False
                break
        if ok and propagate():
            yield from dfs()
        undo(mark0)


def find_consistent(
    board: PartialBoard,
    rs: Ruleset = VANILLA,
    pinned: Optional[Mapping[Coord, bool]] = None,
    budget: int = DEFAULT_CELL_BUDGET,
) -> Optional[FrozenSet[Coord]]:
    """First consistent mine set extending the pinned cells, if any."""
    for m in _Search(board, rs, pinned, budget).solutions():
        return m
    return None


def enumerate_consistent(
    board: PartialBoard,
    rs: Ruleset = VANILLA,
    limit: Optional[int] = None,
    budget: int = DEFAULT_CELL_BUDGET,
) -> List[FrozenSet[Coord]]:
    out = []
    for m in _Search(board, rs, None, budget).solutions():
        out.append(m)
        if limit is not None and len(out) >= limit:
            break
    return out


@dataclass
class ConsistencyResult:
    answer: bool
    witness: Optional[FrozenSet[Coord]] = None

    @property
    def certificate(self) -> Optional[FrozenSet[Coord]]:
        return self.witness


def decide_consistency(
    board: PartialBoard, rs: Ruleset = VANILLA, budget: int = DEFAULT_CELL_BUDGET
) -> ConsistencyResult:
    """Exhaustive/backtracking search for a witness mine set."""
    m = find_consistent(board, rs, budget=budget)
    return ConsistencyResult(m is not None, m)


@dataclass
class InferenceResult:
    inferences: FrozenSet[Coord]
    # consistent arrangement containing each non-inferred covered cell
    mine_witness: Dict[Coord, FrozenSet[Coord]] = field(default_factory=dict)

    @property
    def answer(self) -> bool:
        return bool(self.inferences)

    @property
    def certificate(self) -> Optional[Dict[Coord, FrozenSet[Coord]]]:
        return None if self.inferences else self.mine_witness


def find_inferences(
    board: PartialBoard, rs: Ruleset = VANILLA, budget: int = DEFAULT_CELL_BUDGET
) -> InferenceResult:
    """Covered cells safe in every consistent arrangement.

    Mine deductions do not count; an inconsistent board is an error rather
    than a vacuous all-cells answer.  When there is no inference the result
    carries the per-cell noninference certificate.
    """
    first = find_consistent(board, rs, budget=budget)
    if first is None:
        raise InconsistentBoard("no consistent arrangement exists")
    witness: Dict[Coord, FrozenSet[Coord]] = {c: first for c in first}
    inferred = []
    for cell in board.covered():
        if cell in witness:
            continue
        m = find_consistent(board, rs, pinned={cell: True}, budget=budget)
        if m is None:
            inferred.append(cell)
        else:
            for c in m:
                witness.setdefault(c, m)
    return InferenceResult(frozenset(inferred), witness)


@dataclass
class SolvabilityResult:
    answer: bool
    trace: List[FrozenSet[Coord]]
    stuck_board: Optional[PartialBoard] = None
    certificate: Optional[object] = None


def decide_solvability(
    inst: SolvabilityInstance,
    rs: Ruleset = VANILLA,
    budget: int = DEFAULT_CELL_BUDGET,
) -> SolvabilityResult:
    """Greedy closure: repeatedly uncover all current inferences.

    The containment proof's argument makes the greedy order-irrelevant, so
    batching per round is sound; the trace records the inference batches.
    On an unsolvable instance the certificate is the stuck known-set with
    its noninference certificate.
    """
    board = inst.board(rs)
    all_cells = set(itertools.product(range(inst.height), range(inst.width)))
    trace: List[FrozenSet[Coord]] = []
    while True:
        if set(board.clues) == all_cells - inst.mines:
            return SolvabilityResult(True, trace)
        result = find_inferences(board, rs, budget)
        if not result.inferences:
            cert = (
                frozenset(board.clues),
                {c: sorted(m) for c, m in result.mine_witness.items()},
            )
            return SolvabilityResult(False, trace, board, cert)
        batch = result.inferences
        trace.append(batch)
        board = board.reveal(
            {
                cell: clue_value(inst.width, inst.height, inst.mines, cell, rs)
                for cell in batch
            }
        )


# -- certificate verification (polynomial-time checks, no search) ----------------


def verify_certificate(
    kind: str,
    instance,
    certificate,
    rs: Ruleset = VANILLA,
) -> bool:
    """Check a containment-proof certificate exactly as the propositions state.

    ``consistency``: instance is a PartialBoard, certificate a mine set.
    ``noninference``: instance is a PartialBoard, certificate maps every
    covered cell to a consistent arrangement containing it.
    ``unsolvability``: instance is a SolvabilityInstance, certificate is a
    pair (K', nested noninference certificate) with K' extending the known
    cells consistently with the secret mines.
    """
    if kind == "consistency":
        board: PartialBoard = instance
        return is_consistent(board, frozenset(certificate), rs)

    if kind == "noninference":
        board = instance
        witness: Mapping[Coord, Sequence[Coord]] = dict(certificate)
        for cell in board.covered():
            if cell not in witness:
                return False
            m = frozenset(map(tuple, witness[cell]))
            if cell not in m or not is_consistent(board, m, rs):
                return False
        return True

    if kind == "unsolvability":
        inst: SolvabilityInstance = instance
        known2, nested = certificate
        known2 = frozenset(map(tuple, known2))
        if not inst.known <= known2 or known2 & inst.mines:
            return False
        board = SolvabilityInstance(
            inst.width, inst.height, inst.mines, known2
        ).board(rs)
        return verify_certificate("noninference", board, nested, rs)

    raise ValueError(f"unknown certificate kind {kind!r}")
