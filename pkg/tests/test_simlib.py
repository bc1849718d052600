"""The concrete simulation library against its targets, including the NOR table."""

import pytest

from pgomines.gadgets import builtin_gadget, generalized_fanout
from pgomines.simlib import (
    NOR_TABLE_EDGES,
    library_simulation,
    nor_from_one_in_three,
    verify_against,
)
from pgomines.simulate import is_parsimonious, simulated_gadget


def test_nor_simulation_matches_proof_table():
    sim = nor_from_one_in_three()
    assert sim.validate() == []
    table = sim.solution_table()
    assert len(table) == 4

    ext = sim.extended()
    rows = set()
    for _, a in table:
        values = {}
        for label, end in NOR_TABLE_EDGES.items():
            i = ext.edge_at(end)
            inward = a.toward[i] == end
            # true means "pointing right": into the simulation for a and b,
            # out of it for c; for the x/y/z terminals, into the named port
            values[label] = (not inward) if label == "c" else inward
        rows.add("".join("T" if values[k] else "F" for k in "abxyzc"))
    assert rows == {"TTFFTF", "TFFTFF", "FTTFFF", "FFFFTT"}


def test_nor_simulation_is_parsimonious_nor():
    sim = nor_from_one_in_three()
    got = simulated_gadget(sim, port_names=("a", "b", "c"))
    assert got.constraint == builtin_gadget("nor").constraint
    assert is_parsimonious(sim)


@pytest.mark.parametrize(
    "target,base,kwargs",
    [
        ("not", "fanout", {}),
        ("nor", "1-in-3", {}),
        ("or", "nor", {}),
        ("and", "nor", {}),
        ("crossover", "nor", {}),
        ("1-in-3", "2-in-3", {}),
        ("1-in-3", "1-in-4", {}),
        ("1-in-3", "3-in-4", {}),
        ("turning wire", "fanout", {}),
        ("fanout", "fanout", {"arity": 3}),
        ("fanout", "fanout", {"arity": 5}),
    ],
)
def test_library_pairs_verify(target, base, kwargs):
    # library_simulation itself runs the machine checks; just ensure it builds
    sim = library_simulation(target, base, **kwargs)
    assert sim.validate() == []


def test_not_from_custom_generalized_fanout():
    custom = generalized_fanout("tile-fanout", ("n", "e", "s", "w"), ("n", "s"))
    sim = library_simulation("not", "fanout", fan=custom)
    got = simulated_gadget(sim, port_names=("a", "c"))
    assert got.constraint == builtin_gadget("not").constraint


def test_turning_wire_from_all_same_polarity_fanout():
    allsame = generalized_fanout("p3", ("x", "y", "z"), ("x", "y", "z"))
    sim = library_simulation("turning wire", "fanout", fan=allsame)
    got = simulated_gadget(sim, port_names=("a", "b"))
    assert got.constraint == frozenset({frozenset({"a"}), frozenset({"b"})})


def test_fanout_tree_from_custom_base():
    custom = generalized_fanout("tile-fanout", ("n", "e", "s", "w"), ("n", "s"))
    goal = builtin_gadget("fanout", 4)
    sim = library_simulation("fanout", "fanout", fan=custom, arity=4)
    got = simulated_gadget(sim, port_names=goal.ports)
    assert got.constraint == goal.constraint
