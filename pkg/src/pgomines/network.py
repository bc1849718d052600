"""Networks of gadgets, assignments, validation, and satisfying-assignment search.

A network is an undirected graph whose vertices are labeled with gadgets and
whose edges pair up ports.  An assignment orients every edge; a vertex is
satisfied when the set of ports whose edges point into it is one of its
gadget's legal in-sets.  The embedding is carried by a rotation system that
must agree with each gadget's cyclic port order, and is validated against
Euler's formula rather than recomputed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from pgomines.gadgets import Gadget

EdgeEnd = Tuple[str, str]  # (vertex id, port id)
Edge = Tuple[EdgeEnd, EdgeEnd]

#: Default cap on backtracking search nodes; desk-scale guarantee.
DEFAULT_NODE_BUDGET = 10_000_000


class BudgetExceeded(RuntimeError):
    """Search exceeded the configured node budget; instance is beyond desk scale."""


class InvalidNetworkError(ValueError):
    """Raised when an operation requires a valid network and validation fails."""


@dataclass(frozen=True)
class Assignment:
    """An orientation for every edge: the endpoint each edge points toward."""

    toward: Tuple[EdgeEnd, ...]

    def __len__(self) -> int:
        return len(self.toward)

    def points_into(self, edge_index: int, vertex: str) -> bool:
        return self.toward[edge_index][0] == vertex


class Network:
    """Gadget-labeled graph with a rotation system.

    ``vertices`` maps vertex id to its gadget label; ``edges`` is a sequence
    of unordered endpoint pairs ``((v1, p1), (v2, p2))``.  ``rotation`` may
    override the cyclic order of ports at a vertex but must stay a rotation
    of the gadget's own port order.
    """

    def __init__(
        self,
        vertices: Mapping[str, Gadget],
        edges: Sequence[Edge],
        rotation: Optional[Mapping[str, Sequence[str]]] = None,
    ) -> None:
        self.vertices: Dict[str, Gadget] = dict(vertices)
        self.edges: Tuple[Edge, ...] = tuple(
            (tuple(e[0]), tuple(e[1])) for e in edges
        )
        self.rotation: Dict[str, Tuple[str, ...]] = {
            v: tuple(rotation[v]) if rotation and v in rotation else g.ports
            for v, g in self.vertices.items()
        }
        self._ends_at: Dict[EdgeEnd, int] = {}
        for i, (e0, e1) in enumerate(self.edges):
            for end in (e0, e1):
                if end in self._ends_at:
                    # recorded; validation reports the duplicate
                    continue
                self._ends_at[end] = i

    # -- structure ---------------------------------------------------------

    def edge_at(self, end: EdgeEnd) -> Optional[int]:
        return self._ends_at.get(end)

    def incident_edges(self, v: str) -> List[int]:
        out = []
        for p in self.vertices[v].ports:
            i = self._ends_at.get((v, p))
            if i is not None:
                out.append(i)
        return out

    def canonical_edge_order(self) -> List[int]:
        """Edge indices sorted by their lexicographically smaller endpoint."""
        return sorted(range(len(self.edges)), key=lambda i: tuple(sorted(self.edges[i])))

    def validate(self) -> List[str]:
        """Report every violated network invariant; empty iff valid and planar."""
        problems: List[str] = []
        seen_ends: Dict[EdgeEnd, int] = {}
        for i, (e0, e1) in enumerate(self.edges):
            for v, p in (e0, e1):
                if v not in self.vertices:
                    problems.append(f"edge {i}: unknown vertex {v!r}")
                elif p not in self.vertices[v].ports:
                    problems.append(f"edge {i}: vertex {v!r} has no port {p!r}")
                elif (v, p) in seen_ends and seen_ends[(v, p)] != i:
                    problems.append(
                        f"port {v}.{p} used by edges {seen_ends[(v, p)]} and {i}"
                    )
                else:
                    seen_ends[(v, p)] = i
            if e0 == e1:
                problems.append(f"edge {i} joins a port to itself")
        for v, g in self.vertices.items():
            if g.arity == 0:
                problems.append(f"vertex {v!r}: gadget {g.name!r} has no ports")
            for p in g.ports:
                if (v, p) not in seen_ends:
                    problems.append(f"port {v}.{p} is unmatched")
            rot = self.rotation[v]
            if not _is_cyclic_rotation(rot, g.ports):
                problems.append(
                    f"rotation at {v!r} is not the cyclic port order of {g.name!r}"
                )
        if not problems:
            problems.extend(self._planarity_problems())
        return problems

    def require_valid(self) -> None:
        problems = self.validate()
        if problems:
            raise InvalidNetworkError("; ".join(problems))

    def _planarity_problems(self) -> List[str]:
        """Euler check V - E + F = 2 on every connected component."""
        problems = []
        for comp in self._components():
            v_count = len(comp)
            edge_ids = {
                i
                for v in comp
                for i in self.incident_edges(v)
            }
            faces = self._count_faces(comp, edge_ids)
            if v_count - len(edge_ids) + faces != 2:
                problems.append(
                    f"component {sorted(comp)} is not planar under its rotation "
                    f"system (V={v_count} E={len(edge_ids)} F={faces})"
                )
        return problems

    def _components(self) -> List[List[str]]:
        seen = set()
        comps = []
        for start in self.vertices:
            if start in seen:
                continue
            stack, comp = [start], []
            seen.add(start)
            while stack:
                v = stack.pop()
                comp.append(v)
                for i in self.incident_edges(v):
                    for u, _ in self.edges[i]:
                        if u not in seen:
                            seen.add(u)
                            stack.append(u)
            comps.append(comp)
        return comps

    def _count_faces(self, comp: Sequence[str], edge_ids: Sequence[int]) -> int:
        # darts are (edge index, end index); the face permutation follows the
        # reversed dart's successor in the rotation at its head vertex
        comp_set = set(comp)
        darts = [(i, k) for i in edge_ids for k in (0, 1)]
        succ_port: Dict[EdgeEnd, EdgeEnd] = {}
        for v in comp_set:
            rot = self.rotation[v]
            for a, b in zip(rot, rot[1:] + rot[:1]):
                succ_port[(v, a)] = (v, b)
        faces = 0
        unvisited = set(darts)
        while unvisited:
            dart = unvisited.pop()
            cur = dart
            while True:
                i, k = cur
                head = self.edges[i][1 - k]  # end the dart arrives at
                nxt_end = succ_port[head]
                j = self._ends_at[nxt_end]
                nxt = (j, 0 if self.edges[j][0] == nxt_end else 1)
                if nxt == dart:
                    break
                unvisited.discard(nxt)
                cur = nxt
            faces += 1
        return faces

    # -- satisfaction ------------------------------------------------------

    def in_ports(self, a: Assignment, v: str) -> frozenset:
        return frozenset(
            p
            for p in self.vertices[v].ports
            if a.toward[self._ends_at[(v, p)]] == (v, p)
        )

    def vertex_satisfied(self, a: Assignment, v: str) -> bool:
        """True iff the in-pointing port set at ``v`` is in its constraint."""
        if v not in self.vertices:
            raise KeyError(f"unknown vertex {v!r}")
        return self.vertices[v].allows(self.in_ports(a, v))

    def is_satisfying(self, a: Assignment) -> bool:
        if len(a) != len(self.edges):
            raise ValueError("assignment does not cover the edge set")
        return all(self.vertex_satisfied(a, v) for v in self.vertices)

    def reversed_assignment(self, a: Assignment) -> Assignment:
        flipped = tuple(
            e[0] if a.toward[i] == e[1] else e[1] for i, e in enumerate(self.edges)
        )
        return Assignment(flipped)

    def assignment_from_towards(self, towards: Sequence[int]) -> Assignment:
        return Assignment(tuple(self.edges[i][k] for i, k in enumerate(towards)))

    # -- search ------------------------------------------------------------

    def enumerate_satisfying(
        self,
        limit: Optional[int] = None,
        node_budget: int = DEFAULT_NODE_BUDGET,
        validate: bool = True,
    ) -> List[Assignment]:
        """All satisfying assignments in canonical order (or the first ``limit``).

        Backtracks over edge orientations with unit propagation on the
        partially determined vertex constraints.
        """
        if validate:
            self.require_valid()
        out = []
        for a in self.iter_satisfying(node_budget=node_budget):
            out.append(a)
            if limit is not None and len(out) >= limit:
                break
        return out

    def count_satisfying(self, node_budget: int = DEFAULT_NODE_BUDGET) -> int:
        return sum(1 for _ in self.iter_satisfying(node_budget=node_budget))

    def iter_satisfying(
        self,
        node_budget: int = DEFAULT_NODE_BUDGET,
        fixed: Optional[Mapping[int, int]] = None,
    ) -> Iterator[Assignment]:
        """Yield satisfying assignments; ``fixed`` pins edge index -> end index."""
        yield from _Search(self, node_budget, fixed).run()


class _Search:
    """Backtracking over edge orientations with per-vertex bitmask propagation."""

    def __init__(
        self,
        net: Network,
        node_budget: int,
        fixed: Optional[Mapping[int, int]] = None,
    ) -> None:
        self.net = net
        self.budget = node_budget
        self.nodes = 0
        self.vids = list(net.vertices)
        self.vindex = {v: i for i, v in enumerate(self.vids)}
        self.port_bit: List[Dict[str, int]] = []
        self.masks: List[List[int]] = []
        for v in self.vids:
            g = net.vertices[v]
            bits = {p: 1 << i for i, p in enumerate(g.ports)}
            self.port_bit.append(bits)
            self.masks.append(
                sorted(sum(bits[p] for p in subset) for subset in g.constraint)
            )
        # edge -> ((vertex idx, bit) for end 0, same for end 1)
        self.edge_ends: List[Tuple[Tuple[int, int], Tuple[int, int]]] = []
        for e0, e1 in net.edges:
            self.edge_ends.append(
                (
                    (self.vindex[e0[0]], self.port_bit[self.vindex[e0[0]]][e0[1]]),
                    (self.vindex[e1[0]], self.port_bit[self.vindex[e1[0]]][e1[1]]),
                )
            )
        self.vertex_edges: List[List[int]] = [[] for _ in self.vids]
        for i, ((va, _), (vb, _)) in enumerate(self.edge_ends):
            self.vertex_edges[va].append(i)
            if vb != va:
                self.vertex_edges[vb].append(i)
        self.order = net.canonical_edge_order()
        self.fixed = dict(fixed or {})

    def run(self) -> Iterator[Assignment]:
        n_edges = len(self.net.edges)
        towards: List[Optional[int]] = [None] * n_edges
        decided = [0] * len(self.vids)  # bitmask of decided ports
        in_mask = [0] * len(self.vids)

        def orient(i: int, k: int, trail: List[int]) -> bool:
            # returns False on immediate vertex wipeout
            towards[i] = k
            trail.append(i)
            ok = True
            for side, (vi, bit) in enumerate(self.edge_ends[i]):
                decided[vi] |= bit
                if side == k:
                    in_mask[vi] |= bit
                if not self._candidates(vi, decided[vi], in_mask[vi]):
                    ok = False
            return ok

        def undo(trail: List[int], mark: int) -> None:
            while len(trail) > mark:
                i = trail.pop()
                k = towards[i]
                towards[i] = None
                for side, (vi, bit) in enumerate(self.edge_ends[i]):
                    decided[vi] &= ~bit
                    if side == k:
                        in_mask[vi] &= ~bit

        def propagate(trail: List[int]) -> bool:
            # iterate to fixpoint: force edges all candidate in-sets agree on
            changed = True
            while changed:
                changed = False
                for vi in range(len(self.vids)):
                    if decided[vi] == (1 << len(self.port_bit[vi])) - 1:
                        continue
                    cands = self._candidates(vi, decided[vi], in_mask[vi])
                    if not cands:
                        return False
                    all_and = ~0
                    all_or = 0
                    for m in cands:
                        all_and &= m
                        all_or |= m
                    for j in self.vertex_edges[vi]:
                        if towards[j] is not None:
                            continue
                        for side, (vj, bit) in enumerate(self.edge_ends[j]):
                            if vj != vi or decided[vi] & bit:
                                continue
                            if all_and & bit:
                                if not orient(j, side, trail):
                                    return False
                                changed = True
                            elif not (all_or & bit):
                                if not orient(j, 1 - side, trail):
                                    return False
                                changed = True
            return True

        def solution_ok() -> bool:
            return all(
                in_mask[vi] in self.masks[vi] for vi in range(len(self.vids))
            )

        def dfs() -> Iterator[Assignment]:
            self.nodes += 1
            if self.nodes > self.budget:
                raise BudgetExceeded(
                    f"satisfying-assignment search exceeded {self.budget} nodes"
                )
            branch = next((i for i in self.order if towards[i] is None), None)
            if branch is None:
                if solution_ok():
                    yield self.net.assignment_from_towards(towards)  # type: ignore[arg-type]
                return
            for k in (0, 1):
                trail: List[int] = []
                if orient(branch, k, trail) and propagate(trail):
                    yield from dfs()
                undo(trail, 0)

        trail0: List[int] = []
        ok = True
        for i, k in self.fixed.items():
            if not orient(i, k, trail0):
                ok = False
                break
        if ok and propagate(trail0):
            yield from dfs()
        undo(trail0, 0)

    def _candidates(self, vi: int, decided: int, in_mask: int) -> List[int]:
        return [m for m in self.masks[vi] if m & decided == in_mask]


def _is_cyclic_rotation(rot: Sequence[str], ports: Sequence[str]) -> bool:
    if len(rot) != len(ports) or set(rot) != set(ports):
        return False
    if not ports:
        return True
    n = len(ports)
    for s in range(n):
        if all(rot[(s + i) % n] == ports[i] for i in range(n)):
            return True
    return False


def brute_force_satisfying(net: Network) -> List[Assignment]:
    """Oracle: filter all 2^|E| orientations by per-vertex satisfaction."""
    out = []
    n = len(net.edges)
    if n > 24:
        raise ValueError("brute force oracle limited to 24 edges")
    for bits in itertools.product((0, 1), repeat=n):
        a = net.assignment_from_towards(bits)
        if net.is_satisfying(a):
            out.append(a)
    return out
