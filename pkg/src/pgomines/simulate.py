"""Simulations: networks with dangling edges that stand in for a single gadget.

A simulation's dangling edges are its ports; the induced (simulated) gadget
admits an in-set exactly when some satisfying assignment of the inner
network points exactly those dangling edges inward.  Substituting
simulations for vertices composes networks while preserving satisfying
assignments, parsimony, and semilocal constraints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple

from pgomines.gadgets import Gadget
from pgomines.network import (
    Assignment,
    DEFAULT_NODE_BUDGET,
    EdgeEnd,
    InvalidNetworkError,
    Network,
)

OUTSIDE = "~out"

Semilocal = Dict[str, Set[FrozenSet[str]]]


class SimulationMismatch(ValueError):
    """A library entry does not simulate the gadget it is keyed under."""


@dataclass
class Simulation:
    """Inner network plus an ordered list of dangling edge-ends.

    ``dangling[i]`` is the inner attachment end of the i-th dangling edge;
    the order is the port order of the simulated gadget.  Zero dangling
    edges are rejected: every gadget in this artifact has at least one port.
    """

    vertices: Mapping[str, Gadget]
    edges: Sequence[Tuple[EdgeEnd, EdgeEnd]]
    dangling: Sequence[EdgeEnd]
    rotation: Optional[Mapping[str, Sequence[str]]] = None
    _cache: Optional[List[Tuple[FrozenSet[int], Assignment]]] = field(
        default=None, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        self.dangling = tuple(tuple(d) for d in self.dangling)
        if not self.dangling:
            raise ValueError("a simulation needs at least one dangling edge")

    @property
    def arity(self) -> int:
        return len(self.dangling)

    def extended(self) -> Network:
        """The simulation with the outside world made explicit.

        The outside vertex sees the dangling edges in reverse order, so the
        extended graph is planar exactly when the dangling edges lie on the
        external face.
        """
        d = self.arity
        out_ports = tuple(f"d{i}" for i in reversed(range(d)))
        trivial = frozenset(
            frozenset(f"d{i}" for i in range(d) if (bits >> i) & 1)
            for bits in range(1 << d)
        )
        outside = Gadget("outside-world", out_ports, trivial)
        vertices = dict(self.vertices)
        if OUTSIDE in vertices:
            raise ValueError(f"vertex id {OUTSIDE!r} is reserved")
        vertices[OUTSIDE] = outside
        edges = list(self.edges) + [
            (end, (OUTSIDE, f"d{i}")) for i, end in enumerate(self.dangling)
        ]
        rotation = dict(self.rotation or {})
        rotation[OUTSIDE] = out_ports
        return Network(vertices, edges, rotation)

    def validate(self) -> List[str]:
        problems: List[str] = []
        seen = set()
        for end in self.dangling:
            if end in seen:
                problems.append(f"dangling end {end} listed twice")
            seen.add(end)
        return problems + self.extended().validate()

    def solution_table(
        self, node_budget: int = DEFAULT_NODE_BUDGET
    ) -> List[Tuple[FrozenSet[int], Assignment]]:
        """All satisfying assignments of the extended network, with the
        dangling in-pattern (as a set of port indices) of each."""
        if self._cache is None:
            ext = self.extended()
            ext.require_valid()
            table = []
            dangle_edge = {
                i: ext.edge_at((OUTSIDE, f"d{i}")) for i in range(self.arity)
            }
            for a in ext.iter_satisfying(node_budget=node_budget):
                pattern = frozenset(
                    i
                    for i in range(self.arity)
                    if a.toward[dangle_edge[i]] != (OUTSIDE, f"d{i}")
                )
                table.append((pattern, a))
            self._cache = table
        return self._cache

    def inner_assignment(self, ext_assignment: Assignment) -> Assignment:
        return Assignment(ext_assignment.toward[: len(self.edges)])


def simulated_gadget(
    sim: Simulation,
    name: str = "simulated",
    port_names: Optional[Sequence[str]] = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> Gadget:
    """The gadget induced by a simulation; ports follow the dangling order."""
    names = tuple(port_names) if port_names else tuple(
        f"p{i}" for i in range(sim.arity)
    )
    if len(names) != sim.arity:
        raise ValueError("port_names arity mismatch")
    patterns = {p for p, _ in sim.solution_table(node_budget)}
    constraint = frozenset(
        frozenset(names[i] for i in pattern) for pattern in patterns
    )
    return Gadget(name, names, constraint)


def is_parsimonious(sim: Simulation, node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """True iff every legal dangling pattern has exactly one inner solution."""
    counts: Dict[FrozenSet[int], int] = {}
    for pattern, _ in sim.solution_table(node_budget):
        counts[pattern] = counts.get(pattern, 0) + 1
    return bool(counts) and all(c == 1 for c in counts.values())


def identity_simulation(g: Gadget, vid: str = "g") -> Simulation:
    """The gadget itself with every port dangling."""
    return Simulation({vid: g}, [], [(vid, p) for p in g.ports])


def check_library(
    net_gadgets: Mapping[str, Gadget], lib: Mapping[str, Simulation]
) -> None:
    """Verify each library entry simulates the gadget it is keyed under.

    The dangling order must realize the gadget's ports positionally.
    """
    for gname, g in net_gadgets.items():
        if gname not in lib:
            raise SimulationMismatch(f"no simulation for gadget {gname!r}")
        sim = lib[gname]
        if sim.arity != g.arity:
            raise SimulationMismatch(
                f"simulation for {gname!r} has {sim.arity} dangling edges, "
                f"gadget has {g.arity} ports"
            )
        got = simulated_gadget(sim, name=gname, port_names=g.ports)
        if got.constraint != g.constraint:
            raise SimulationMismatch(
                f"simulation for {gname!r} realizes {got}, expected constraint "
                f"{sorted(map(sorted, g.constraint))}"
            )


def _copy_id(outer: str, inner: str) -> str:
    return f"{outer}/{inner}"


def substitute(
    net: Network,
    lib: Mapping[str, Simulation],
    semilocal: Optional[Semilocal] = None,
    assignment: Optional[Assignment] = None,
    check: bool = True,
) -> Tuple[Network, Optional[Semilocal], Optional[Assignment]]:
    """Replace each vertex of ``net`` with its simulation from ``lib``.

    Dangling edges are spliced onto the inter-simulation edges respecting
    cyclic order.  When per-vertex semilocal constraints are supplied, the
    transformed semilocal constraint of an inner vertex collects its in-sets
    over the simulation's satisfying assignments compatible with the host
    vertex's semilocal constraint.  When an assignment is supplied (the
    library must then be parsimonious) its unique image is returned.
    """
    gadgets = {g.name: g for g in net.vertices.values()}
    if check:
        check_library(gadgets, lib)

    vertices: Dict[str, Gadget] = {}
    edges: List[Tuple[EdgeEnd, EdgeEnd]] = []
    rotation: Dict[str, Sequence[str]] = {}
    dangle_map: Dict[EdgeEnd, EdgeEnd] = {}  # (host vertex, port) -> new inner end
    inner_edge_base: Dict[str, int] = {}

    for v, g in net.vertices.items():
        sim = lib[g.name]
        inner_edge_base[v] = len(edges)
        for w, wg in sim.vertices.items():
            vertices[_copy_id(v, w)] = wg
            if sim.rotation and w in sim.rotation:
                rotation[_copy_id(v, w)] = tuple(sim.rotation[w])
        for (wa, pa), (wb, pb) in sim.edges:
            edges.append(((_copy_id(v, wa), pa), (_copy_id(v, wb), pb)))
        for port, (w, p) in zip(g.ports, sim.dangling):
            dangle_map[(v, port)] = (_copy_id(v, w), p)

    splice_base = len(edges)
    for enda, endb in net.edges:
        edges.append((dangle_map[enda], dangle_map[endb]))

    composed = Network(vertices, edges, rotation)

    semilocal2: Optional[Semilocal] = None
    if semilocal is not None:
        semilocal2 = {}
        for v, g in net.vertices.items():
            sim = lib[g.name]
            allowed = semilocal[v]
            sets: Dict[str, Set[FrozenSet[str]]] = {
                _copy_id(v, w): set() for w in sim.vertices
            }
            ext = sim.extended()
            for pattern, a in sim.solution_table():
                in_ports = frozenset(g.ports[i] for i in pattern)
                if in_ports not in allowed:
                    continue
                for w in sim.vertices:
                    sets[_copy_id(v, w)].add(ext.in_ports(a, w))
            semilocal2.update(sets)

    assignment2: Optional[Assignment] = None
    if assignment is not None:
        if not net.is_satisfying(assignment):
            raise ValueError("assignment to substitute is not satisfying")
        towards: List[Optional[EdgeEnd]] = [None] * len(edges)
        for v, g in net.vertices.items():
            sim = lib[g.name]
            want = frozenset(
                i
                for i, port in enumerate(g.ports)
                if assignment.toward[net.edge_at((v, port))] == (v, port)
            )
            fills = [a for pattern, a in sim.solution_table() if pattern == want]
            if not fills:
                raise SimulationMismatch(
                    f"no inner solution matches pattern at vertex {v!r}"
                )
            fill = fills[0]
            base = inner_edge_base[v]
            for j in range(len(sim.edges)):
                w, p = fill.toward[j]
                towards[base + j] = (_copy_id(v, w), p)
        for j, (enda, endb) in enumerate(net.edges):
            tv, tp = assignment.toward[net.edge_at(enda)]
            # pick the new end on the tile the original edge points toward
            towards[splice_base + j] = dangle_map[(tv, tp)]
        assignment2 = Assignment(tuple(towards))  # type: ignore[arg-type]
        if not composed.is_satisfying(assignment2):
            raise SimulationMismatch("transformed assignment is not satisfying")

    return composed, semilocal2, assignment2


def substitute_simulation(
    sim: Simulation, lib: Mapping[str, Simulation], check: bool = True
) -> Simulation:
    """Substitute inside a simulation; dangling edges are carried through."""
    gadgets = {g.name: g for g in sim.vertices.values()}
    if check:
        check_library(gadgets, lib)
    net = Network(sim.vertices, sim.edges, sim.rotation)

    vertices: Dict[str, Gadget] = {}
    edges: List[Tuple[EdgeEnd, EdgeEnd]] = []
    rotation: Dict[str, Sequence[str]] = {}
    dangle_map: Dict[EdgeEnd, EdgeEnd] = {}

    for v, g in net.vertices.items():
        entry = lib[g.name]
        for w, wg in entry.vertices.items():
            vertices[_copy_id(v, w)] = wg
            if entry.rotation and w in entry.rotation:
                rotation[_copy_id(v, w)] = tuple(entry.rotation[w])
        for (wa, pa), (wb, pb) in entry.edges:
            edges.append(((_copy_id(v, wa), pa), (_copy_id(v, wb), pb)))
        for port, (w, p) in zip(g.ports, entry.dangling):
            dangle_map[(v, port)] = (_copy_id(v, w), p)

    for enda, endb in net.edges:
        edges.append((dangle_map[enda], dangle_map[endb]))

    new_dangling = [dangle_map[end] for end in sim.dangling]
    return Simulation(vertices, edges, new_dangling, rotation)
