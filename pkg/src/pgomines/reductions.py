"""Hardness-reduction compilers from CNF to planar gadget networks,
plus the three PGO decision procedures with containment certificates.

Wire crossings between variable columns and clause inputs are planarized by
a bubble sweep that inserts crossover gadgets; chains of AND/OR gates fold
in clause-index order.  All constructions are validated as planar networks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from pgomines.cnf import CnfFormula, FormulaError
from pgomines.gadgets import Gadget, builtin_gadget
from pgomines.network import (
    Assignment,
    DEFAULT_NODE_BUDGET,
    EdgeEnd,
    InvalidNetworkError,
    Network,
)
from pgomines.simulate import Semilocal

FREE = builtin_gadget("free")
NOT = builtin_gadget("not")
OR = builtin_gadget("or")
AND = builtin_gadget("and")
ONE3 = builtin_gadget("1-in-3")
CROSS = builtin_gadget("crossover")
FIXED_TRUE = builtin_gadget("fixed-true")

KINDS = ("consistency", "promise-inference", "uniqueness")


class ReductionError(ValueError):
    """Input formula or embedding unusable for the requested reduction."""


class PromiseViolation(RuntimeError):
    """A promise-inference instance fails its promise; refusing to answer."""


@dataclass
class ReductionArtifact:
    kind: str
    network: Network
    formula: CnfFormula
    designated: Dict[str, int] = field(default_factory=dict)
    semilocal: Optional[Semilocal] = None
    given_assignment: Optional[Assignment] = None


class _Builder:
    """Accumulates vertices and edges; edges are indexed in creation order."""

    def __init__(self) -> None:
        self.vertices: Dict[str, Gadget] = {}
        self.edges: List[Tuple[EdgeEnd, EdgeEnd]] = []

    def add(self, vid: str, g: Gadget) -> str:
        if vid in self.vertices:
            raise ValueError(f"duplicate vertex {vid}")
        self.vertices[vid] = g
        return vid

    def connect(self, a: EdgeEnd, b: EdgeEnd) -> int:
        self.edges.append((a, b))
        return len(self.edges) - 1

    def network(self) -> Network:
        return Network(self.vertices, self.edges)


def _occurrences(f: CnfFormula, var: int) -> List[Tuple[int, int]]:
    return [
        (j, pos)
        for j, cl in enumerate(f.clauses)
        for pos, lit in enumerate(cl)
        if abs(lit) == var
    ]


# -- consistency: planar positive 1-in-3SAT ------------------------------------


def reduce_consistency(f: CnfFormula) -> ReductionArtifact:
    """Variables become free terminals feeding fanouts, clauses 1-in-3 gadgets.

    An edge pointing into a clause gadget means the literal is true; the
    formula's occurrence rotations fix the fanout output order, and the
    result must validate as a planar network.
    """
    if f.flavor != "planar-positive-1-in-3":
        raise ReductionError(f"consistency reduction needs 1-in-3 flavor, got {f.flavor}")
    b = _Builder()
    clause_port: Dict[Tuple[int, int], EdgeEnd] = {}
    for j, cl in enumerate(f.clauses):
        b.add(f"c{j}", ONE3)
        for pos in range(3):
            clause_port[(j, pos)] = (f"c{j}", ONE3.ports[pos])
    designated: Dict[str, int] = {}
    for v in range(1, f.num_vars + 1):
        term = b.add(f"x{v}", FREE)
        occ = f.occurrence_order(v)
        if not occ:
            cap = b.add(f"x{v}cap", FREE)
            designated[f"var:{v}"] = b.connect((term, "a"), (cap, "a"))
            continue
        positions = {j: cl.index(v) for j, cl in enumerate(f.clauses) if v in cl}
        if len(occ) == 1:
            j = occ[0]
            designated[f"var:{v}"] = b.connect(
                (term, "a"), clause_port[(j, positions[j])]
            )
            continue
        fan = b.add(f"f{v}", builtin_gadget("fanout", len(occ)))
        designated[f"var:{v}"] = b.connect((term, "a"), (fan, "a"))
        for i, j in enumerate(occ):
            b.connect((fan, f"c{i + 1}"), clause_port[(j, positions[j])])
    net = b.network()
    problems = net.validate()
    if problems:
        raise ReductionError("embedding is not planar: " + "; ".join(problems))
    return ReductionArtifact("consistency", net, f, designated)


# -- shared machinery for the two gate-network reductions ----------------------


def _channel(
    b: _Builder,
    pending: List[Tuple[EdgeEnd, Tuple[int, int]]],
    targets: Dict[Tuple[int, int], EdgeEnd],
    tag: str,
    flip: bool = False,
) -> None:
    """Connect pending wire ends to their target slots, planarizing with
    crossovers via a bubble sweep over adjacent inversions.

    The crossover's through-pairs are (a1, a2) and (b1, b2); with wires
    flowing toward the targets the incoming-left wire takes a1 and exits at
    a2 on the outgoing-right.  ``flip`` mirrors the box for channels whose
    wires flow the other way.
    """
    ends = [e for e, _ in pending]
    slots = [s for _, s in pending]
    in_l, in_r, out_l, out_r = ("a1", "b2", "b1", "a2")
    if flip:
        in_l, in_r, out_l, out_r = ("b2", "a1", "a2", "b1")
    n_cross = 0
    changed = True
    while changed:
        changed = False
        for k in range(len(slots) - 1):
            if slots[k] > slots[k + 1]:
                x = b.add(f"{tag}x{n_cross}", CROSS)
                n_cross += 1
                b.connect(ends[k], (x, in_l))
                b.connect(ends[k + 1], (x, in_r))
                ends[k], ends[k + 1] = (x, out_l), (x, out_r)
                slots[k], slots[k + 1] = slots[k + 1], slots[k]
                changed = True
    for end, slot in zip(ends, slots):
        b.connect(end, targets[slot])


def _clause_pair(
    b: _Builder, tag: str, j: int, flip: bool
) -> Tuple[List[EdgeEnd], EdgeEnd]:
    """Two chained OR gates for one clause; returns (literal ports, output end).

    ``flip`` mirrors the input assignments for the upper half of the layout.
    """
    o1 = b.add(f"{tag}or1_{j}", OR)
    o2 = b.add(f"{tag}or2_{j}", OR)
    if flip:
        lits = [(o1, "a"), (o1, "b"), (o2, "b")]
        b.connect((o1, "c"), (o2, "a"))
    else:
        lits = [(o1, "b"), (o1, "a"), (o2, "a")]
        b.connect((o1, "c"), (o2, "b"))
    return lits, (o2, "c")


def _and_chain(
    b: _Builder, tag: str, inputs: List[EdgeEnd], flip: bool
) -> EdgeEnd:
    """Fold a list of gate-output ends with AND gates in index order."""
    if len(inputs) == 1:
        return inputs[0]
    first, second = ("a", "b") if flip else ("b", "a")
    g = b.add(f"{tag}and0", AND)
    b.connect(inputs[0], (g, first))
    b.connect(inputs[1], (g, second))
    out = (g, "c")
    for i, nxt in enumerate(inputs[2:], start=1):
        g = b.add(f"{tag}and{i}", AND)
        b.connect(out, (g, first))
        b.connect(nxt, (g, second))
        out = (g, "c")
    return out


# -- promise-inference: complement of monotone 3SAT ----------------------------


def reduce_promise_inference(f: CnfFormula) -> ReductionArtifact:
    """Two half-circuits of clause OR pairs joined by AND chains and z gates.

    Every vertex gets its full constraint as semilocal constraint; the
    output edge r is forced exactly when the formula is unsatisfiable.
    A half with no clauses degenerates to a free-terminal input on the
    final AND, keeping r meaningful.
    """
    if f.flavor != "monotone-3":
        raise ReductionError(f"promise reduction needs monotone-3, got {f.flavor}")
    b = _Builder()
    pos = [cl for cl in f.clauses if all(l > 0 for l in cl)]
    neg = [cl for cl in f.clauses if all(l < 0 for l in cl)]
    designated: Dict[str, int] = {}

    halves = {}
    for tag, clauses, flip in (("n", pos, True), ("s", neg, False)):
        targets: Dict[Tuple[int, int], EdgeEnd] = {}
        outs: List[EdgeEnd] = []
        for j in range(len(clauses)):
            lits, out = _clause_pair(b, tag, j, flip)
            for pos_i in range(3):
                targets[(j, pos_i)] = lits[pos_i]
            outs.append(out)
        halves[tag] = (clauses, targets, outs, flip)

    # variable trunks: one edge joining the positive and negative fanouts;
    # the upper fanout's outputs run right to left in its cyclic order
    pend: Dict[str, List[Tuple[EdgeEnd, Tuple[int, int]]]] = {"n": [], "s": []}
    for v in range(1, f.num_vars + 1):
        attach: Dict[str, EdgeEnd] = {}
        for tag in ("n", "s"):
            clauses = halves[tag][0]
            occ = sorted(
                (j, pos_i)
                for j, cl in enumerate(clauses)
                for pos_i, lit in enumerate(cl)
                if abs(lit) == v
            )
            if not occ:
                cap = b.add(f"{tag}cap{v}", FREE)
                attach[tag] = (cap, "a")
                continue
            fan = b.add(f"{tag}fan{v}", builtin_gadget("fanout", len(occ)))
            attach[tag] = (fan, "a")
            if tag == "s":
                wires = [((fan, f"c{i + 1}"), slot) for i, slot in enumerate(occ)]
            else:
                wires = [
                    ((fan, f"c{i + 1}"), slot)
                    for i, slot in enumerate(reversed(occ))
                ]
                wires.reverse()
            pend[tag].extend(wires)
        designated[f"var:{v}"] = b.connect(attach["n"], attach["s"])

    for tag in ("n", "s"):
        _channel(b, pend[tag], halves[tag][1], tag, flip=(tag == "n"))

    half_out: Dict[str, EdgeEnd] = {}
    for tag in ("n", "s"):
        clauses, _, outs, flip = halves[tag]
        if not outs:
            const = b.add(f"{tag}const", FREE)
            half_out[tag] = (const, "a")
            continue
        chain = _and_chain(b, tag, outs, flip)
        z = b.add(f"{tag}z", FREE)
        g = b.add(f"{tag}zand", AND)
        if flip:
            designated["z1"] = b.connect((z, "a"), (g, "a"))
            b.connect(chain, (g, "b"))
        else:
            designated["z2"] = b.connect((z, "a"), (g, "b"))
            b.connect(chain, (g, "a"))
        half_out[tag] = (g, "c")

    final = b.add("final", AND)
    b.connect(half_out["n"], (final, "a"))
    b.connect(half_out["s"], (final, "b"))
    rterm = b.add("rterm", FREE)
    designated["r"] = b.connect((final, "c"), (rterm, "a"))

    net = b.network()
    problems = net.validate()
    if problems:
        raise ReductionError("promise network invalid: " + "; ".join(problems))
    semilocal: Semilocal = {v: set(g.constraint) for v, g in net.vertices.items()}
    return ReductionArtifact("promise-inference", net, f, designated, semilocal)


# -- uniqueness: complement of 3SAT --------------------------------------------


def reduce_uniqueness(f: CnfFormula) -> ReductionArtifact:
    """Variable fanouts, NOT gates on negated literals, clause OR pairs, a
    satisfaction AND chain, an all-false detector chain, and a final OR into
    a fixed-true terminal selected by the z edge.

    The given assignment is the all-variables-false, z-up solution; the
    network has exactly one satisfying assignment per model of the formula
    plus that one.
    """
    if f.flavor != "general-3":
        raise ReductionError(f"uniqueness reduction needs general-3, got {f.flavor}")
    b = _Builder()
    designated: Dict[str, int] = {}

    targets: Dict[Tuple[int, int], EdgeEnd] = {}
    outs: List[EdgeEnd] = []
    for j in range(len(f.clauses)):
        lits, out = _clause_pair(b, "c", j, flip=False)
        for pos_i in range(3):
            targets[(j, pos_i)] = lits[pos_i]
        outs.append(out)

    # top chain inputs: the upper ends of the variable trunk edges
    top_ports: List[EdgeEnd] = []
    n = f.num_vars
    if n == 1:
        pass  # the single trunk feeds the z AND directly
    top_ands: List[str] = []
    if n >= 2:
        g = b.add("vand0", AND)
        top_ands.append(g)
        for i in range(n - 2):
            g = b.add(f"vand{i + 1}", AND)
            top_ands.append(g)
    for v in range(1, n + 1):
        if n == 1:
            break
        if v == 1:
            top_ports.append((top_ands[0], "a"))
        elif v == 2:
            top_ports.append((top_ands[0], "b"))
        else:
            top_ports.append((top_ands[v - 2], "b"))
    for i in range(1, len(top_ands)):
        b.connect((top_ands[i - 1], "c"), (top_ands[i], "a"))

    zand_top = b.add("zandt", AND)
    zand_bot = b.add("zandb", AND)
    designated["z"] = b.connect((zand_top, "b"), (zand_bot, "a"))
    if n == 1:
        all_false_out: Optional[EdgeEnd] = None
    else:
        all_false_out = (top_ands[-1], "c")
        b.connect(all_false_out, (zand_top, "a"))

    pend: List[Tuple[EdgeEnd, Tuple[int, int]]] = []
    for v in range(1, n + 1):
        occ = sorted(_occurrences(f, v))
        top = top_ports[v - 1] if n >= 2 else (zand_top, "a")
        if not occ:
            cap = b.add(f"cap{v}", FREE)
            designated[f"var:{v}"] = b.connect(top, (cap, "a"))
            continue
        fan = b.add(f"fan{v}", builtin_gadget("fanout", len(occ)))
        designated[f"var:{v}"] = b.connect(top, (fan, "a"))
        for i, (j, pos_i) in enumerate(occ):
            end: EdgeEnd = (fan, f"c{i + 1}")
            if f.clauses[j][pos_i] < 0:
                nt = b.add(f"not{v}_{i}", NOT)
                b.connect(end, (nt, "a"))
                end = (nt, "c")
            pend.append((end, (j, pos_i)))
    _channel(b, pend, targets, "c")

    sat_out = _and_chain(b, "sat", outs, flip=False) if outs else None
    if sat_out is None:
        const = b.add("satconst", FREE)
        sat_out = (const, "a")
    b.connect(sat_out, (zand_bot, "b"))

    final = b.add("finalor", OR)
    b.connect((zand_top, "c"), (final, "a"))
    b.connect((zand_bot, "c"), (final, "b"))
    pin = b.add("pin", FIXED_TRUE)
    b.connect((final, "c"), (pin, "a"))

    net = b.network()
    problems = net.validate()
    if problems:
        raise ReductionError("uniqueness network invalid: " + "; ".join(problems))

    fixed = {designated["z"]: _end_index(net, designated["z"], (zand_top, "b"))}
    for v in range(1, n + 1):
        i = designated[f"var:{v}"]
        top = top_ports[v - 1] if n >= 2 else (zand_top, "a")
        fixed[i] = _end_index(net, i, top)
    sols = list(net.iter_satisfying(fixed=fixed))
    if len(sols) != 1:
        raise ReductionError(
            f"expected a unique all-false z-up assignment, found {len(sols)}"
        )
    return ReductionArtifact(
        "uniqueness", net, f, designated, given_assignment=sols[0]
    )


def _end_index(net: Network, edge_index: int, end: EdgeEnd) -> int:
    ea, eb = net.edges[edge_index]
    if end == ea:
        return 0
    if end == eb:
        return 1
    raise ValueError(f"{end} is not an endpoint of edge {edge_index}")


# -- decision procedures --------------------------------------------------------


@dataclass
class PgoDecision:
    kind: str
    answer: bool
    witness: Optional[object] = None
    certificate: Optional[object] = None


def _locally_free_edges(net: Network, semilocal: Semilocal) -> List[int]:
    free_edges = []
    for i, (ea, eb) in enumerate(net.edges):
        forced = False
        for v, p in (ea, eb):
            elems = semilocal[v]
            if all(p in s for s in elems) or all(p not in s for s in elems):
                forced = True
        if not forced:
            free_edges.append(i)
    return free_edges


def decide_pgo(
    kind: str,
    network: Network,
    semilocal: Optional[Semilocal] = None,
    given_assignment: Optional[Assignment] = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> PgoDecision:
    """Decide a PGO instance by exhaustive search and emit the containment
    certificate (witness assignment, assignment family, or second assignment)."""
    if kind == "consistency":
        sols = network.enumerate_satisfying(limit=1, node_budget=node_budget)
        witness = sols[0] if sols else None
        return PgoDecision(kind, bool(sols), witness, certificate=witness)

    if kind == "uniqueness":
        if given_assignment is None:
            raise ValueError("uniqueness needs the given assignment")
        if not network.is_satisfying(given_assignment):
            raise ValueError("given assignment is not satisfying")
        second = None
        for a in network.iter_satisfying(node_budget=node_budget):
            if a.toward != given_assignment.toward:
                second = a
                break
        return PgoDecision(kind, second is None, second, certificate=second)

    if kind == "promise-inference":
        if semilocal is None:
            raise ValueError("promise-inference needs semilocal constraints")
        sols = network.enumerate_satisfying(node_budget=node_budget)
        if not sols:
            raise PromiseViolation("instance has no satisfying assignment")
        for a in sols:
            for v in network.vertices:
                if network.in_ports(a, v) not in semilocal[v]:
                    raise PromiseViolation(
                        f"assignment violates semilocal constraint at {v!r}"
                    )
        free_edges = _locally_free_edges(network, semilocal)
        forced = [
            i
            for i in free_edges
            if len({a.toward[i] for a in sols}) == 1
        ]
        achieved = all(
            s in {network.in_ports(a, v) for a in sols}
            for v, elems in semilocal.items()
            for s in elems
        )
        if forced and achieved:
            raise PromiseViolation("both promise options hold; inconsistent input")
        if not forced and not achieved:
            raise PromiseViolation("neither promise option holds")
        if forced:
            return PgoDecision(kind, True, forced[0], certificate=None)
        family = {
            i: {a.toward[i]: a for a in sols} for i in free_edges
        }
        return PgoDecision(kind, False, None, certificate=family)

    raise ValueError(f"unknown PGO problem kind {kind!r}")


def decide_artifact(art: ReductionArtifact, node_budget: int = DEFAULT_NODE_BUDGET) -> PgoDecision:
    return decide_pgo(
        art.kind,
        art.network,
        semilocal=art.semilocal,
        given_assignment=art.given_assignment,
        node_budget=node_budget,
    )
