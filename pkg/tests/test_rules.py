"""Variant clue semantics and global rule checks."""

import itertools
import random

import pytest

from pgomines.rules import (
    PartialBoard,
    Ruleset,
    RulesetError,
    VANILLA,
    check_left_rules,
    clue_value,
    is_consistent,
)


def test_vanilla_full_neighborhood():
    mines = [(r, c) for r in range(3) for c in range(3) if (r, c) != (1, 1)]
    assert clue_value(3, 3, mines, (1, 1)) == 8


def test_clue_undefined_on_mine():
    with pytest.raises(ValueError):
        clue_value(3, 3, [(1, 1)], (1, 1))


def test_wall_runs_are_cyclic():
    # mines at N, NE, E of center plus SW: runs 3 and 1 around the ring
    rs = Ruleset.parse("W")
    mines = [(0, 1), (0, 2), (1, 2), (2, 0)]
    assert clue_value(3, 3, mines, (1, 1), rs) == (1, 3)
    # a full ring is a single run of 8
    ring = [(r, c) for r in range(3) for c in range(3) if (r, c) != (1, 1)]
    assert clue_value(3, 3, ring, (1, 1), rs) == (8,)
    # corner-to-corner wrap: NW and N merge into one run
    assert clue_value(3, 3, [(0, 0), (0, 1)], (1, 1), rs) == (2,)


def test_cross_sees_distance_two():
    rs = Ruleset.parse("X")
    assert clue_value(5, 5, [(0, 2)], (2, 2), rs) == 1
    assert clue_value(5, 5, [(0, 0)], (2, 2), rs) == 0


def test_mini_cross_and_knight():
    assert clue_value(3, 3, [(0, 1), (0, 0)], (1, 1), Ruleset.parse("X'")) == 1
    assert clue_value(5, 5, [(0, 3), (0, 0)], (2, 2), Ruleset.parse("K")) == 1


def test_eyesight_row():
    rs = Ruleset.parse("E")
    assert clue_value(5, 1, [], (0, 2), rs) == 5
    # a mine blocks sight
    assert clue_value(5, 1, [(0, 3)], (0, 2), rs) == 3


def test_eyesight_difference():
    rs = Ruleset.parse("E'")
    assert clue_value(5, 3, [], (1, 2), rs) == 4 - 2


def test_multiple_weights_shaded_double():
    rs = Ruleset.parse("V+M")
    # (0,1) is shaded ((r+c) odd), (0,0) is not
    assert clue_value(2, 2, [(0, 1)], (1, 1)) == 1
    assert clue_value(2, 2, [(0, 1)], (1, 1), rs) == 2
    assert clue_value(2, 2, [(0, 0)], (1, 1), rs) == 1


def test_negation_difference():
    rs = Ruleset.parse("N")
    assert clue_value(2, 2, [(0, 1), (0, 0)], (1, 1), rs) == 0
    assert clue_value(2, 2, [(0, 0)], (1, 1), rs) == -1


def test_ruleset_parse_and_validation():
    rs = Ruleset.parse("X+M+L;Q,C")
    assert rs.base == "X" and rs.multiple and rs.liar
    assert rs.left_rules == ("C", "Q")
    assert str(Ruleset.parse("V")) == "V"
    with pytest.raises(RulesetError):
        Ruleset.parse("W+L")  # liar over multisets rejected
    with pytest.raises(RulesetError):
        Ruleset.parse("E+M")  # M needs a counting base
    with pytest.raises(RulesetError):
        Ruleset.parse("V;Z")


def test_left_rule_examples():
    assert check_left_rules(3, 3, [], ["U"]) == {"U": True}
    assert check_left_rules(3, 3, [(0, 0), (0, 1)], ["H"]) == {"H": False}
    assert check_left_rules(3, 3, [(0, 0), (1, 1), (2, 2)], ["T"]) == {"T": False}
    assert check_left_rules(2, 2, [(0, 0)], ["Q"]) == {"Q": True}
    assert check_left_rules(2, 2, [], ["Q"]) == {"Q": False}


def test_left_rule_structure_checks():
    # D: non-touching dominoes
    assert check_left_rules(4, 4, [(0, 0), (0, 1)], ["D"])["D"]
    assert not check_left_rules(4, 4, [(0, 0), (0, 1), (0, 2)], ["D"])["D"]
    # S: snake path
    assert check_left_rules(4, 4, [(0, 0), (0, 1), (1, 1)], ["S"])["S"]
    square = [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert not check_left_rules(4, 4, square, ["S"])["S"]
    # D': straight ships up to length 4, no touching
    assert check_left_rules(5, 5, [(0, 0), (0, 1), (0, 2)], ["D'"])["D'"]
    assert not check_left_rules(5, 5, [(0, 0), (0, 1), (1, 1)], ["D'"])["D'"]
    assert not check_left_rules(6, 6, [(0, k) for k in range(5)], ["D'"])["D'"]
    # B: common count across rows and columns
    assert check_left_rules(2, 2, [(0, 0), (1, 1)], ["B"])["B"]
    assert not check_left_rules(2, 2, [(0, 0)], ["B"])["B"]
    # O: non-mines connected, mines touch the border
    assert check_left_rules(3, 3, [(0, 0)], ["O"])["O"]
    assert not check_left_rules(3, 3, [(1, 1)], ["O"])["O"]
    # T': every mine in a three-run
    assert check_left_rules(5, 5, [(0, 0), (0, 1), (0, 2)], ["T'"])["T'"]
    assert not check_left_rules(5, 5, [(0, 0), (0, 1)], ["T'"])["T'"]


def test_is_consistent_examples():
    empty = PartialBoard(2, 2)
    assert is_consistent(empty, [])
    row = PartialBoard(3, 1, {(0, 1): 2})
    assert is_consistent(row, [(0, 0), (0, 2)])
    liar = Ruleset.parse("V+L")
    assert not is_consistent(row, [(0, 0), (0, 2)], liar)
    assert is_consistent(PartialBoard(3, 1, {(0, 1): 1}), [(0, 0), (0, 2)], liar)
    # mines may not sit on uncovered cells
    assert not is_consistent(row, [(0, 1)])


def test_consistency_monotone_under_uncovering():
    rng = random.Random(5)
    for _ in range(50):
        mines = frozenset(
            (r, c) for r in range(3) for c in range(3) if rng.random() < 0.3
        )
        board = PartialBoard(3, 3)
        assert is_consistent(board, mines)
        safe = [c for c in board.cells() if c not in mines]
        rng.shuffle(safe)
        for cell in safe[:4]:
            board = board.reveal({cell: clue_value(3, 3, mines, cell)})
            assert is_consistent(board, mines)


def test_cross_variant_identities_random():
    rng = random.Random(11)
    w = Ruleset.parse("W")
    wp = Ruleset.parse("W'")
    p = Ruleset.parse("P")
    for _ in range(200):
        mines = frozenset(
            (r, c) for r in range(6) for c in range(6) if rng.random() < 0.35
        )
        cell = (rng.randrange(6), rng.randrange(6))
        if cell in mines:
            continue
        runs = clue_value(6, 6, mines, cell, w)
        assert clue_value(6, 6, mines, cell, wp) == (max(runs) if runs else 0)
        assert clue_value(6, 6, mines, cell, p) == len(runs)
        v = clue_value(6, 6, mines, cell)
        assert 0 <= v <= 8
        assert clue_value(6, 6, mines, cell, Ruleset.parse("E")) >= 1
        assert 0 <= clue_value(6, 6, mines, cell, Ruleset.parse("X'")) <= 4
        if check_left_rules(6, 6, mines, ["U"])["U"]:
            assert check_left_rules(6, 6, mines, ["H"])["H"]
