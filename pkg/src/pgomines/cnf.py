"""CNF formulas with flavor tags, DIMACS I/O, brute-force oracles, generators.

Flavors: ``general-3`` (plain 3SAT), ``monotone-3`` (each clause all-positive
or all-negative), and ``planar-positive-1-in-3`` (all literals positive,
clauses satisfied by exactly one true literal, with a planar incidence
embedding given as per-variable occurrence rotations).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

FLAVORS = ("general-3", "monotone-3", "planar-positive-1-in-3")


class FormulaError(ValueError):
    """Malformed formula or flavor violation."""


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: Tuple[Tuple[int, ...], ...]
    flavor: str = "general-3"
    # planar flavor: variable -> cyclic order of the clause indices using it
    rotations: Optional[Dict[int, Tuple[int, ...]]] = None

    def __post_init__(self) -> None:
        if self.flavor not in FLAVORS:
            raise FormulaError(f"unknown flavor {self.flavor!r}")
        if self.num_vars < 1:
            raise FormulaError("need at least one variable")
        for cl in self.clauses:
            if len(cl) != 3:
                raise FormulaError(f"clause {cl} does not have three literals")
            for lit in cl:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise FormulaError(f"literal {lit} out of range")
        if self.flavor == "monotone-3":
            seen = set()
            for cl in self.clauses:
                if not (all(l > 0 for l in cl) or all(l < 0 for l in cl)):
                    raise FormulaError(f"clause {cl} is not monotone")
                key = tuple(sorted(cl))
                if key in seen:
                    raise FormulaError(f"duplicate clause {cl}")
                seen.add(key)
        if self.flavor == "planar-positive-1-in-3":
            for cl in self.clauses:
                if any(l < 0 for l in cl):
                    raise FormulaError(f"clause {cl} has a negative literal")
                if len(set(cl)) != 3:
                    raise FormulaError(f"clause {cl} repeats a variable")

    def occurrence_order(self, var: int) -> Tuple[int, ...]:
        """Clause indices using ``var``, in embedding order (default: index)."""
        if self.rotations and var in self.rotations:
            return self.rotations[var]
        return tuple(
            j for j, cl in enumerate(self.clauses) if var in map(abs, cl)
        )

    # -- brute-force oracles ------------------------------------------------

    def clause_satisfied(self, clause: Sequence[int], valuation: Sequence[bool]) -> bool:
        truths = [valuation[abs(l) - 1] ^ (l < 0) for l in clause]
        if self.flavor == "planar-positive-1-in-3":
            return sum(truths) == 1
        return any(truths)

    def satisfied_by(self, valuation: Sequence[bool]) -> bool:
        return all(self.clause_satisfied(cl, valuation) for cl in self.clauses)

    def count_models(self) -> int:
        """Model count by exhaustive enumeration of all valuations."""
        return sum(
            self.satisfied_by(v)
            for v in itertools.product((False, True), repeat=self.num_vars)
        )

    def satisfiable(self) -> bool:
        return any(
            self.satisfied_by(v)
            for v in itertools.product((False, True), repeat=self.num_vars)
        )


# -- DIMACS with a flavor header ------------------------------------------------


def to_dimacs(f: CnfFormula) -> str:
    lines = [f"c flavor: {f.flavor}"]
    if f.rotations:
        for var in sorted(f.rotations):
            order = " ".join(str(j) for j in f.rotations[var])
            lines.append(f"c rot {var}: {order}")
    lines.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    lines.extend(" ".join(map(str, cl)) + " 0" for cl in f.clauses)
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    flavor = "general-3"
    rotations: Dict[int, Tuple[int, ...]] = {}
    num_vars = None
    num_clauses = None
    clauses: List[Tuple[int, ...]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            body = line[1:].strip()
            if body.startswith("flavor:"):
                flavor = body.split(":", 1)[1].strip()
            elif body.startswith("rot"):
                head, order = body[3:].split(":", 1)
                rotations[int(head)] = tuple(int(t) for t in order.split())
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormulaError(f"bad problem line {line!r}")
            num_vars, num_clauses = int(parts[2]), int(parts[3])
            continue
        lits = [int(t) for t in line.split()]
        if lits[-1] != 0 or any(l == 0 for l in lits[:-1]):
            raise FormulaError(f"clause line {line!r} must end with a single 0")
        clauses.append(tuple(lits[:-1]))
    if num_vars is None:
        raise FormulaError("missing problem line")
    if num_clauses is not None and num_clauses != len(clauses):
        raise FormulaError("clause count does not match problem line")
    return CnfFormula(
        num_vars, tuple(clauses), flavor, rotations or None
    )


# -- seeded generators ----------------------------------------------------------


def random_3sat(num_vars: int, num_clauses: int, seed: int) -> CnfFormula:
    rng = random.Random(seed)
    clauses = []
    for _ in range(num_clauses):
        clauses.append(
            tuple(
                rng.choice((1, -1)) * rng.randint(1, num_vars) for _ in range(3)
            )
        )
    return CnfFormula(num_vars, tuple(clauses), "general-3")


def random_monotone3(num_vars: int, num_clauses: int, seed: int) -> CnfFormula:
    if num_vars < 3:
        raise FormulaError("monotone-3 generator needs >= 3 variables")
    rng = random.Random(seed)
    seen = set()
    clauses: List[Tuple[int, ...]] = []
    guard = 0
    while len(clauses) < num_clauses and guard < 10_000:
        guard += 1
        sign = rng.choice((1, -1))
        trio = rng.sample(range(1, num_vars + 1), 3)
        key = tuple(sorted(sign * v for v in trio))
        if key in seen:
            continue
        seen.add(key)
        clauses.append(tuple(sign * v for v in trio))
    return CnfFormula(num_vars, tuple(clauses), "monotone-3")


def random_planar_positive_1in3(
    num_vars: int, num_clauses: int, seed: int, max_tries: int = 100
) -> CnfFormula:
    """Sample a positive 1-in-3 formula together with a planar embedding.

    Clause sets are drawn at random; for each, a handful of shuffled
    within-clause orders and variable rotations are tried until the
    consistency reduction validates as planar.  Abstractly non-planar
    samples simply get rediscarded.
    """
    from pgomines.reductions import reduce_consistency

    rng = random.Random(seed)
    if num_vars < 3:
        raise FormulaError("1-in-3 generator needs >= 3 variables")
    for _ in range(max_tries):
        base = [
            tuple(rng.sample(range(1, num_vars + 1), 3))
            for _ in range(num_clauses)
        ]
        for _ in range(60):
            clauses = tuple(
                tuple(rng.sample(cl, 3)) for cl in base
            )
            rotations = {}
            for v in range(1, num_vars + 1):
                occ = [j for j, cl in enumerate(clauses) if v in cl]
                rng.shuffle(occ)
                rotations[v] = tuple(occ)
            f = CnfFormula(
                num_vars, clauses, "planar-positive-1-in-3", rotations
            )
            try:
                reduce_consistency(f)
            except Exception:
                continue
            return f
    raise FormulaError("no planar sample found; supply an explicit embedding")


def all_monotone_triples(num_vars: int) -> CnfFormula:
    """Every positive and negative triple; unsatisfiable from five variables up."""
    triples = list(itertools.combinations(range(1, num_vars + 1), 3))
    clauses = tuple(triples) + tuple(
        tuple(-v for v in t) for t in triples
    )
    return CnfFormula(num_vars, clauses, "monotone-3")
