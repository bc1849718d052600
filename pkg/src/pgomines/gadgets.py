"""Gadget algebra: ports in cyclic order plus a constraint of legal in-sets.

A gadget constrains the set of incident edges that may point *into* a
vertex labeled with it.  Constraints are stored explicitly as frozensets
of port subsets; every built-in has at most six ports, so the explicit
representation is exact and cheap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, FrozenSet, Iterable, Sequence, Tuple

Constraint = FrozenSet[FrozenSet[str]]


class UnknownGadgetError(ValueError):
    """Raised for a builtin_gadget name outside the catalog."""


@dataclass(frozen=True)
class Gadget:
    """A named gadget: ports in cyclic order and the set of legal in-sets."""

    name: str
    ports: Tuple[str, ...]
    constraint: Constraint = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if len(set(self.ports)) != len(self.ports):
            raise ValueError(f"duplicate port ids in gadget {self.name!r}")
        for subset in self.constraint:
            if not subset <= set(self.ports):
                raise ValueError(
                    f"constraint element {sorted(subset)} of {self.name!r} "
                    "is not a subset of its ports"
                )

    @property
    def arity(self) -> int:
        return len(self.ports)

    def allows(self, in_ports: Iterable[str]) -> bool:
        """True iff the given in-pointing port set is legal."""
        return frozenset(in_ports) in self.constraint

    def renamed(self, name: str) -> "Gadget":
        return Gadget(name, self.ports, self.constraint)

    def same_behavior(self, other: "Gadget") -> bool:
        """Equality up to cyclic rotation of the port list.

        Port names are matched positionally; rotating the start of the
        cyclic order does not change the gadget, mirroring does.
        """
        if self.arity != other.arity:
            return False
        n = self.arity
        for shift in range(max(n, 1)):
            rotated = other.ports[shift:] + other.ports[:shift]
            mapping = dict(zip(rotated, self.ports))
            mapped = frozenset(
                frozenset(mapping[p] for p in subset) for subset in other.constraint
            )
            if mapped == self.constraint:
                return True
        return False

    def __str__(self) -> str:
        subsets = sorted(
            ("{" + ",".join(sorted(s)) + "}") for s in self.constraint
        )
        return f"{self.name}({','.join(self.ports)}): {{{', '.join(subsets)}}}"


def _c(*subsets: Sequence[str]) -> Constraint:
    return frozenset(frozenset(s) for s in subsets)


def gate_gadget(
    name: str,
    inputs: Sequence[str],
    outputs: Sequence[str],
    fn: Callable[[Tuple[bool, ...]], Tuple[bool, ...]],
) -> Gadget:
    """Build a logic-gate gadget from a boolean function.

    Ports are listed inputs-then-outputs-reversed so the cyclic order walks
    counterclockwise around a left-to-right drawing.  For each subset S of
    true inputs, the constraint contains S together with the outputs that
    are false on S.
    """
    subsets = []
    for bits in itertools.product((False, True), repeat=len(inputs)):
        outs = fn(bits)
        if len(outs) != len(outputs):
            raise ValueError("gate function arity mismatch")
        in_true = {p for p, b in zip(inputs, bits) if b}
        out_false = {p for p, b in zip(outputs, outs) if not b}
        subsets.append(in_true | out_false)
    ports = tuple(inputs) + tuple(reversed(outputs))
    return Gadget(name, ports, frozenset(frozenset(s) for s in subsets))


def generalized_fanout(
    name: str, ports: Sequence[str], true_side: Iterable[str]
) -> Gadget:
    """A gadget whose two legal configurations are a subset and its complement."""
    ports = tuple(ports)
    if len(ports) < 3:
        raise ValueError("a generalized fanout needs at least three ports")
    side = frozenset(true_side)
    if not side <= set(ports):
        raise ValueError("true_side must be a subset of ports")
    return Gadget(name, ports, frozenset({side, frozenset(ports) - side}))


def is_generalized_fanout(g: Gadget) -> bool:
    """At least three ports, exactly two legal sets, which are complements."""
    if g.arity < 3 or len(g.constraint) != 2:
        return False
    a, b = tuple(g.constraint)
    return a | b == frozenset(g.ports) and not (a & b)


def _exactly_k(name: str, ports: Sequence[str], k: int) -> Gadget:
    subsets = itertools.combinations(ports, k)
    return Gadget(name, tuple(ports), _c(*subsets))


_ALIASES = {
    "fixed-true terminal": "fixed-true",
    "fixed-false terminal": "fixed-false",
    "free terminal": "free",
    "and gate": "and",
    "or gate": "or",
    "not gate": "not",
    "nor gate": "nor",
    "fanout gate": "fanout",
    "k-way fanout": "fanout",
    "1-in-3 gadget": "1-in-3",
    "crossover gate": "crossover",
}


def builtin_gadget(name: str, arity: int | None = None) -> Gadget:
    """Return a catalog gadget by name; ``arity`` applies to fanout only.

    The catalog holds the ten core gadgets plus the 2-in-3, 1-in-4 and
    3-in-4 clause variants used by some tile families.
    """
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    if key == "fanout":
        if arity is None or arity < 1:
            raise UnknownGadgetError("fanout needs arity >= 1")
        outs = tuple(f"c{i}" for i in range(1, arity + 1))
        return Gadget(
            f"fanout-{arity}", ("a",) + outs, _c(["a"], list(outs))
        )
    if arity is not None:
        raise UnknownGadgetError(f"arity only applies to fanout, not {name!r}")
    try:
        return _CATALOG[key]
    except KeyError:
        raise UnknownGadgetError(f"unknown gadget {name!r}") from None


_CATALOG = {
    "fixed-true": Gadget("fixed-true", ("a",), _c(["a"])),
    "fixed-false": Gadget("fixed-false", ("a",), _c([])),
    "free": Gadget("free", ("a",), _c([], ["a"])),
    "and": Gadget("and", ("a", "b", "c"), _c(["c"], ["a", "c"], ["b", "c"], ["a", "b"])),
    "or": Gadget("or", ("a", "b", "c"), _c(["c"], ["a"], ["b"], ["a", "b"])),
    "not": Gadget("not", ("a", "c"), _c([], ["a", "c"])),
    "nor": Gadget("nor", ("a", "b", "c"), _c([], ["a", "c"], ["b", "c"], ["a", "b", "c"])),
    "1-in-3": _exactly_k("1-in-3", ("a", "b", "c"), 1),
    "2-in-3": _exactly_k("2-in-3", ("a", "b", "c"), 2),
    "1-in-4": _exactly_k("1-in-4", ("a", "b", "c", "d"), 1),
    "3-in-4": _exactly_k("3-in-4", ("a", "b", "c", "d"), 3),
    "crossover": Gadget(
        "crossover",
        ("a1", "b1", "a2", "b2"),
        _c(["a1", "b1"], ["a2", "b1"], ["a1", "b2"], ["a2", "b2"]),
    ),
}

#: Names accepted by :func:`builtin_gadget` (fanout additionally needs arity).
CATALOG_NAMES = tuple(sorted(_CATALOG)) + ("fanout",)
