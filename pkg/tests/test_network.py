"""Network validation and satisfying-assignment search tests."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgomines.gadgets import builtin_gadget
from pgomines.network import (
    Assignment,
    BudgetExceeded,
    InvalidNetworkError,
    Network,
    brute_force_satisfying,
)

FREE = builtin_gadget("free")
ONE3 = builtin_gadget("1-in-3")


def two_terminals():
    return Network(
        {"u": FREE, "v": FREE},
        [(("u", "a"), ("v", "a"))],
    )


def test_two_free_terminals_valid_and_two_assignments():
    n = two_terminals()
    assert n.validate() == []
    sols = n.enumerate_satisfying()
    assert len(sols) == 2


def test_unmatched_port_reported():
    n = Network({"u": FREE}, [])
    assert any("unmatched" in p for p in n.validate())


def test_rotation_must_match_cyclic_port_order():
    g = builtin_gadget("or")
    terminals = {f"t{i}": FREE for i in range(3)}
    edges = [(("g", p), (f"t{i}", "a")) for i, p in enumerate(g.ports)]
    ok = Network({"g": g, **terminals}, edges, rotation={"g": ("b", "c", "a")})
    assert ok.validate() == []
    bad = Network({"g": g, **terminals}, edges, rotation={"g": ("a", "c", "b")})
    assert any("rotation" in p for p in bad.validate())


def test_fixed_true_forces_orientation():
    n = Network(
        {"u": builtin_gadget("fixed-true"), "v": FREE},
        [(("u", "a"), ("v", "a"))],
    )
    sols = n.enumerate_satisfying()
    assert len(sols) == 1
    assert sols[0].toward[0] == ("u", "a")


def test_vertex_satisfied_examples():
    # fixed-true terminal with its edge pointing in
    n = Network(
        {"u": builtin_gadget("fixed-true"), "v": FREE},
        [(("u", "a"), ("v", "a"))],
    )
    a_in = Assignment((("u", "a"),))
    assert n.vertex_satisfied(a_in, "u")
    a_out = Assignment((("v", "a"),))
    assert not n.vertex_satisfied(a_out, "u")
    # NOT gate with both edges pointing in is satisfied
    n2 = Network(
        {"g": builtin_gadget("not"), "t1": FREE, "t2": FREE},
        [(("g", "a"), ("t1", "a")), (("g", "c"), ("t2", "a"))],
    )
    both_in = Assignment((("g", "a"), ("g", "c")))
    assert n2.vertex_satisfied(both_in, "g")
    with pytest.raises(KeyError):
        n2.vertex_satisfied(both_in, "nope")


def clause_with_terminals():
    terminals = {f"t{i}": FREE for i in range(3)}
    edges = [(("c", p), (f"t{i}", "a")) for i, p in enumerate(ONE3.ports)]
    return Network({"c": ONE3, **terminals}, edges)


def test_one_in_three_with_free_terminals_has_three_solutions():
    n = clause_with_terminals()
    sols = n.enumerate_satisfying()
    assert len(sols) == 3
    # 1-in-3 vertex with zero in-edges is unsatisfied
    all_out = n.assignment_from_towards([1, 1, 1])
    assert not n.vertex_satisfied(all_out, "c")
    assert sorted(map(sorted, (n.in_ports(a, "c") for a in sols))) == [
        ["a"],
        ["b"],
        ["c"],
    ]


def test_enumeration_matches_brute_force_on_clause():
    n = clause_with_terminals()
    fast = {a.toward for a in n.enumerate_satisfying()}
    slow = {a.toward for a in brute_force_satisfying(n)}
    assert fast == slow


def test_limit_and_determinism():
    n = clause_with_terminals()
    first = n.enumerate_satisfying(limit=2)
    again = n.enumerate_satisfying()
    assert [a.toward for a in first] == [a.toward for a in again[:2]]


def test_budget_exceeded():
    terminals = {f"t{i}": FREE for i in range(3)}
    edges = [(("c", p), (f"t{i}", "a")) for i, p in enumerate(ONE3.ports)]
    n = Network({"c": ONE3, **terminals}, edges)
    with pytest.raises(BudgetExceeded):
        n.enumerate_satisfying(node_budget=1)


def test_flip_symmetry_for_fanout_and_free_networks():
    # networks of generalized fanouts and free terminals: reversing every
    # edge of a satisfying assignment stays satisfying
    fan = builtin_gadget("fanout", 3)
    vertices = {"f": fan, **{f"t{i}": FREE for i in range(4)}}
    edges = [(("f", p), (f"t{i}", "a")) for i, p in enumerate(fan.ports)]
    n = Network(vertices, edges)
    sols = n.enumerate_satisfying()
    assert len(sols) == 2
    for a in sols:
        assert n.is_satisfying(n.reversed_assignment(a))


def test_crossover_independent_wires():
    cx = builtin_gadget("crossover")
    vertices = {"x": cx, **{f"t{i}": FREE for i in range(4)}}
    edges = [(("x", p), (f"t{i}", "a")) for i, p in enumerate(cx.ports)]
    n = Network(vertices, edges)
    sols = n.enumerate_satisfying()
    assert len(sols) == 4


def test_planarity_rejects_k5():
    # K5 over crossover gadgets is non-planar whatever the rotation system
    cx = builtin_gadget("crossover")
    vertices = {f"x{i}": cx for i in range(5)}
    ports = {i: list(cx.ports) for i in range(5)}
    edges = []
    for i in range(5):
        for j in range(i + 1, 5):
            edges.append(((f"x{i}", ports[i].pop(0)), (f"x{j}", ports[j].pop(0))))
    problems = Network(vertices, edges).validate()
    assert any("planar" in p for p in problems)


@st.composite
def small_networks(draw):
    """Random trees of catalog gadgets with free terminals on spare ports."""
    pool = [
        builtin_gadget("1-in-3"),
        builtin_gadget("fanout", 2),
        builtin_gadget("or"),
        builtin_gadget("not"),
        builtin_gadget("free"),
    ]
    count = draw(st.integers(min_value=1, max_value=4))
    vertices = {}
    edges = []
    open_ports = []
    for i in range(count):
        if i > 0 and not open_ports:
            break
        g = pool[draw(st.integers(0, len(pool) - 1))]
        vid = f"g{i}"
        vertices[vid] = g
        ports = [(vid, p) for p in g.ports]
        if i > 0:
            attach = open_ports.pop(draw(st.integers(0, len(open_ports) - 1)))
            edges.append((attach, ports.pop(0)))
        open_ports.extend(ports)
    for j, end in enumerate(open_ports):
        vertices[f"t{j}"] = FREE
        edges.append((end, (f"t{j}", "a")))
    return Network(vertices, edges)


@given(small_networks())
@settings(max_examples=60, deadline=None)
def test_search_equals_brute_force(net):
    assert net.validate() == []
    fast = sorted(a.toward for a in net.enumerate_satisfying())
    slow = sorted(a.toward for a in brute_force_satisfying(net))
    assert fast == slow
