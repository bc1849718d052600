"""Deciders against naive oracles, plus certificate round-trips."""

import itertools
import random

import pytest

from pgomines.rules import PartialBoard, Ruleset, clue_value, is_consistent
from pgomines.msdecide import (
    InconsistentBoard,
    SolvabilityInstance,
    decide_consistency,
    decide_solvability,
    enumerate_consistent,
    find_consistent,
    find_inferences,
    verify_certificate,
)


def naive_consistent_sets(board, rs=Ruleset()):
    out = []
    covered = board.covered()
    for bits in itertools.product((False, True), repeat=len(covered)):
        m = frozenset(c for c, b in zip(covered, bits) if b)
        if is_consistent(board, m, rs):
            out.append(m)
    return out


def naive_inferences(board, rs=Ruleset()):
    sets = naive_consistent_sets(board, rs)
    assert sets, "oracle called on inconsistent board"
    return frozenset(
        c for c in board.covered() if all(c not in m for m in sets)
    )


def naive_solvable(inst, rs=Ruleset()):
    """Definition-oracle: search over click orderings with memoized states."""
    all_cells = {
        (r, c) for r in range(inst.height) for c in range(inst.width)
    }
    to_click = frozenset(all_cells - inst.mines - inst.known)
    seen = set()

    def board_for(known):
        return PartialBoard(
            inst.width,
            inst.height,
            {
                cell: clue_value(inst.width, inst.height, inst.mines, cell, rs)
                for cell in known
            },
        )

    def rec(known, remaining):
        if not remaining:
            return True
        if known in seen:
            return False
        seen.add(known)
        inf = naive_inferences(board_for(known), rs)
        for cell in remaining & inf:
            if rec(known | {cell}, remaining - {cell}):
                return True
        return False

    return rec(inst.known, to_click)


def test_consistency_examples():
    b = PartialBoard(2, 1, {(0, 0): 1})
    res = decide_consistency(b)
    assert res.answer and res.witness == frozenset({(0, 1)})
    assert not decide_consistency(PartialBoard(2, 1, {(0, 0): 2})).answer
    nine = PartialBoard(3, 3, {(1, 1): 9})
    assert not decide_consistency(nine).answer


def test_inference_examples():
    mid0 = PartialBoard(3, 1, {(0, 1): 0})
    assert find_inferences(mid0).inferences == frozenset({(0, 0), (0, 2)})
    mid1 = PartialBoard(3, 1, {(0, 1): 1})
    assert find_inferences(mid1).inferences == frozenset()
    mid2 = PartialBoard(3, 1, {(0, 1): 2})
    assert find_inferences(mid2).inferences == frozenset()


def test_inference_rejects_inconsistent():
    with pytest.raises(InconsistentBoard):
        find_inferences(PartialBoard(2, 1, {(0, 0): 2}))


def test_solvability_examples():
    zero = SolvabilityInstance(2, 2, frozenset(), frozenset({(0, 0)}))
    res = decide_solvability(zero)
    assert res.answer and len(res.trace) == 1
    stuck = SolvabilityInstance(
        2, 2, frozenset({(1, 1)}), frozenset({(0, 0)})
    )
    res2 = decide_solvability(stuck)
    assert not res2.answer
    done = SolvabilityInstance(
        2, 2, frozenset({(1, 1)}), frozenset({(0, 0), (0, 1), (1, 0)})
    )
    res3 = decide_solvability(done)
    assert res3.answer and res3.trace == []


def random_board(seed, w=4, h=4):
    rng = random.Random(seed)
    mines = frozenset(
        (r, c) for r in range(h) for c in range(w) if rng.random() < 0.25
    )
    clues = {}
    for cell in itertools.product(range(h), range(w)):
        if cell not in mines and rng.random() < 0.4:
            clues[cell] = clue_value(w, h, mines, cell)
    return PartialBoard(w, h, clues)


@pytest.mark.parametrize("seed", range(25))
def test_consistency_matches_naive(seed):
    board = random_board(seed)
    fast = sorted(map(sorted, enumerate_consistent(board)))
    slow = sorted(map(sorted, naive_consistent_sets(board)))
    assert fast == slow


@pytest.mark.parametrize("seed", range(25))
def test_inferences_match_naive(seed):
    board = random_board(seed)
    if not decide_consistency(board).answer:
        return
    assert find_inferences(board).inferences == naive_inferences(board)


@pytest.mark.parametrize("seed", range(20))
def test_solvability_matches_ordering_oracle(seed):
    rng = random.Random(seed + 1000)
    w = h = 3
    mines = frozenset(
        (r, c) for r in range(h) for c in range(w) if rng.random() < 0.25
    )
    known = frozenset(
        c
        for c in itertools.product(range(h), range(w))
        if c not in mines and rng.random() < 0.3
    )
    inst = SolvabilityInstance(w, h, mines, known)
    unknown = h * w - len(mines) - len(known)
    if unknown > 8:
        return
    assert decide_solvability(inst).answer == naive_solvable(inst)


def test_variant_consistency_search():
    # X' clue forces both orthogonal neighbors on a 1x3 board
    rs = Ruleset.parse("X'")
    b = PartialBoard(3, 1, {(0, 1): 2})
    sols = enumerate_consistent(b, rs)
    assert sols == [frozenset({(0, 0), (0, 2)})]
    # left rule U kills adjacent-mine solutions
    rs2 = Ruleset.parse("V;U")
    b2 = PartialBoard(2, 2, {(0, 0): 3})
    assert enumerate_consistent(b2) == [frozenset({(0, 1), (1, 0), (1, 1)})]
    assert enumerate_consistent(b2, rs2) == []


def test_certificate_round_trips():
    b = PartialBoard(2, 1, {(0, 0): 1})
    res = decide_consistency(b)
    assert verify_certificate("consistency", b, res.certificate)
    mid1 = PartialBoard(3, 1, {(0, 1): 1})
    inf = find_inferences(mid1)
    assert not inf.answer
    assert verify_certificate("noninference", mid1, inf.certificate)
    stuck = SolvabilityInstance(2, 2, frozenset({(1, 1)}), frozenset({(0, 0)}))
    res2 = decide_solvability(stuck)
    assert not res2.answer
    assert verify_certificate("unsolvability", stuck, res2.certificate)


def test_bad_certificates_rejected():
    b = PartialBoard(2, 1, {(0, 0): 1})
    assert not verify_certificate("consistency", b, frozenset())
    mid1 = PartialBoard(3, 1, {(0, 1): 1})
    # missing cell entry
    assert not verify_certificate("noninference", mid1, {})
    # arrangement not containing the cell
    bad = {
        (0, 0): [(0, 2)],
        (0, 2): [(0, 2)],
    }
    assert not verify_certificate("noninference", mid1, bad)
