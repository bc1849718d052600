"""Reduction compilers against brute-force formula oracles."""

import pytest

from pgomines.cnf import (
    all_monotone_triples,
    CnfFormula,
    FormulaError,
    parse_dimacs,
    random_3sat,
    random_monotone3,
    random_planar_positive_1in3,
    to_dimacs,
)
from pgomines.reductions import (
    PromiseViolation,
    ReductionError,
    decide_artifact,
    decide_pgo,
    reduce_consistency,
    reduce_promise_inference,
    reduce_uniqueness,
)
from pgomines.gadgets import builtin_gadget
from pgomines.network import Network


def test_dimacs_round_trip():
    f = CnfFormula(4, ((1, -2, 3), (-1, 2, -4)), "general-3")
    assert parse_dimacs(to_dimacs(f)) == f
    g = CnfFormula(3, ((1, 2, 3),), "planar-positive-1-in-3", {1: (0,)})
    assert parse_dimacs(to_dimacs(g)) == g
    with pytest.raises(FormulaError):
        parse_dimacs("p cnf 2 1\n1 2\n")  # missing terminating 0


def test_flavor_validation():
    with pytest.raises(FormulaError):
        CnfFormula(3, ((1, 2, -3),), "monotone-3")
    with pytest.raises(FormulaError):
        CnfFormula(3, ((1, 2, 3), (3, 2, 1)), "monotone-3")  # duplicate
    with pytest.raises(FormulaError):
        CnfFormula(3, ((1, 2, -3),), "planar-positive-1-in-3")
    with pytest.raises(FormulaError):
        CnfFormula(3, ((1, 2),), "general-3")  # arity


def test_consistency_single_clause():
    f = CnfFormula(3, ((1, 2, 3),), "planar-positive-1-in-3")
    art = reduce_consistency(f)
    sols = art.network.enumerate_satisfying()
    assert len(sols) == 3 == f.count_models()


def test_consistency_no_clauses_one_variable():
    f = CnfFormula(1, (), "planar-positive-1-in-3")
    art = reduce_consistency(f)
    assert len(art.network.enumerate_satisfying()) == 2


def test_consistency_shared_variable_counts():
    f = CnfFormula(5, ((1, 2, 3), (1, 4, 5)), "planar-positive-1-in-3")
    art = reduce_consistency(f)
    assert len(art.network.enumerate_satisfying()) == f.count_models()


def test_consistency_wrong_flavor_rejected():
    with pytest.raises(ReductionError):
        reduce_consistency(CnfFormula(3, ((1, 2, 3),), "general-3"))


@pytest.mark.parametrize("seed", range(8))
def test_consistency_random(seed):
    f = random_planar_positive_1in3(4, 3, seed)
    art = reduce_consistency(f)
    sat = bool(art.network.enumerate_satisfying(limit=1))
    assert sat == f.satisfiable()
    d = decide_pgo("consistency", art.network)
    assert d.answer == sat


def test_promise_satisfiable_has_no_inference():
    f = CnfFormula(3, ((1, 2, 3), (-1, -2, -3)), "monotone-3")
    art = reduce_promise_inference(f)
    d = decide_artifact(art)
    assert d.answer is False
    assert d.certificate  # per-edge-per-orientation family


def test_promise_unsatisfiable_forces_r():
    # taking every positive and negative triple over five variables pins the
    # true-count both above and below; the smallest unsatisfiable instances
    # of this monotone family start there
    f = all_monotone_triples(5)
    assert not f.satisfiable()
    art = reduce_promise_inference(f)
    d = decide_artifact(art)
    assert d.answer is True
    assert d.witness == art.designated["r"]  # r itself is the forced edge


def test_promise_semilocal_is_full_constraint():
    f = CnfFormula(3, ((1, 2, 3),), "monotone-3")
    art = reduce_promise_inference(f)
    for v, g in art.network.vertices.items():
        assert art.semilocal[v] == set(g.constraint)


def test_promise_violation_detected():
    # a fixed-true terminal pair forces an edge that is also locally forced,
    # but claiming a free semilocal constraint breaks the promise
    n = Network(
        {"u": builtin_gadget("fixed-true"), "v": builtin_gadget("free")},
        [(("u", "a"), ("v", "a"))],
    )
    semilocal = {"u": set(n.vertices["u"].constraint), "v": {frozenset({"a"})}}
    with pytest.raises(PromiseViolation):
        decide_pgo("promise-inference", n, semilocal=semilocal)


@pytest.mark.parametrize("seed", range(10))
def test_promise_random_matches_oracle(seed):
    f = random_monotone3(4, 5, seed)
    art = reduce_promise_inference(f)
    d = decide_artifact(art)
    assert d.answer == (not f.satisfiable())


def test_uniqueness_count_law_tiny():
    f = CnfFormula(1, ((1, 1, 1),), "general-3")
    art = reduce_uniqueness(f)
    assert len(art.network.enumerate_satisfying()) == 2
    d = decide_artifact(art)
    assert d.answer is False  # satisfiable formula: a second assignment exists
    assert d.certificate is not None


def test_uniqueness_unsatisfiable_is_unique():
    clauses = tuple(
        (s1 * 1, s2 * 2, s3 * 3)
        for s1 in (1, -1)
        for s2 in (1, -1)
        for s3 in (1, -1)
    )
    f = CnfFormula(3, clauses, "general-3")
    assert not f.satisfiable()
    art = reduce_uniqueness(f)
    sols = art.network.enumerate_satisfying()
    assert len(sols) == 1
    d = decide_artifact(art)
    assert d.answer is True


@pytest.mark.parametrize("seed", range(10))
def test_uniqueness_random_count_law(seed):
    f = random_3sat(4, 5, seed)
    art = reduce_uniqueness(f)
    assert len(art.network.enumerate_satisfying()) == f.count_models() + 1


def test_uniqueness_orientations_determined_by_z_and_vars():
    f = random_3sat(3, 3, seed=7)
    art = reduce_uniqueness(f)
    net = art.network
    key_edges = [art.designated["z"]] + [
        art.designated[f"var:{v}"] for v in range(1, f.num_vars + 1)
    ]
    seen = set()
    for a in net.iter_satisfying():
        key = tuple(a.toward[i] for i in key_edges)
        assert key not in seen
        seen.add(key)


def test_decide_pgo_trivial_examples():
    free = builtin_gadget("free")
    n = Network({"u": free, "v": free}, [(("u", "a"), ("v", "a"))])
    sols = n.enumerate_satisfying()
    d = decide_pgo("uniqueness", n, given_assignment=sols[0])
    assert d.answer is False and d.witness.toward == sols[1].toward
    n2 = Network(
        {"u": builtin_gadget("fixed-true"), "v": free},
        [(("u", "a"), ("v", "a"))],
    )
    assert decide_pgo("consistency", n2).answer is True
