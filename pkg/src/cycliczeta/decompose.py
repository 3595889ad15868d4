"""Exact rewriting of constrained index sums into nested-zeta symbols.

A sum over a domain mixing strict and non-strict inequalities splits into
sums over totally ordered chains: enumerate the ordered set partitions
(weak orders) of the variable set compatible with the constraints, merge
the exponents of tied variables, and read off one symbol per partition.
Completeness and disjointness of the split are exactly testable against a
brute-force lattice-point count, which this module also provides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from .errors import BudgetError, NonAdmissibleError, ParseError
from .model import ConstraintSystem, REL_LT, VarId


@dataclass(frozen=True)
class Composition:
    """A nested-zeta index (k_1, ..., k_t), smallest summation variable first.

    Admissible (convergent) symbols have last part >= 2.
    """

    parts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(int(p) for p in self.parts))
        if not self.parts or any(p < 1 for p in self.parts):
            raise ValueError("composition parts must be positive integers")

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def depth(self) -> int:
        return len(self.parts)

    @property
    def admissible(self) -> bool:
        return self.parts[-1] >= 2

    @classmethod
    def parse(cls, text: str) -> "Composition":
        try:
            return cls(tuple(int(p) for p in text.split(",")))
        except ValueError:
            raise ParseError(f"bad composition {text!r}") from None

    def sort_key(self):
        return self.parts

    def __str__(self) -> str:
        return ",".join(str(p) for p in self.parts)


class SymbolCombination:
    """Exact integer-coefficient linear combination of admissible symbols."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[Composition, int] | None = None):
        self._coeffs: dict[Composition, int] = {}
        if coeffs:
            for comp, c in coeffs.items():
                if c == 0:
                    continue
                if not comp.admissible:
                    raise NonAdmissibleError(
                        f"non-admissible symbol ({comp}) in combination", parts=comp.parts
                    )
                self._coeffs[comp] = self._coeffs.get(comp, 0) + int(c)
        self._coeffs = {k: v for k, v in self._coeffs.items() if v != 0}

    def items(self) -> list[tuple[Composition, int]]:
        return sorted(self._coeffs.items(), key=lambda kv: kv[0].sort_key())

    def coefficient(self, comp: Composition) -> int:
        return self._coeffs.get(comp, 0)

    def symbols(self) -> list[Composition]:
        return [c for c, _ in self.items()]

    def weight(self) -> int | None:
        """Common weight of the stored symbols, or None if empty/mixed."""
        ws = {c.weight for c in self._coeffs}
        return ws.pop() if len(ws) == 1 else None

    def __add__(self, other: "SymbolCombination") -> "SymbolCombination":
        out = dict(self._coeffs)
        for comp, c in other._coeffs.items():
            out[comp] = out.get(comp, 0) + c
        return SymbolCombination(out)

    def __sub__(self, other: "SymbolCombination") -> "SymbolCombination":
        out = dict(self._coeffs)
        for comp, c in other._coeffs.items():
            out[comp] = out.get(comp, 0) - c
        return SymbolCombination(out)

    def __rmul__(self, n: int) -> "SymbolCombination":
        return SymbolCombination({comp: n * c for comp, c in self._coeffs.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, SymbolCombination) and self._coeffs == other._coeffs

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __hash__(self):
        return hash(tuple(self.items()))

    def to_json_obj(self) -> dict[str, str]:
        return {str(comp): str(c) for comp, c in self.items()}

    @classmethod
    def from_json_obj(cls, obj: Mapping[str, str]) -> "SymbolCombination":
        return cls({Composition.parse(k): int(v) for k, v in obj.items()})

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for comp, c in self.items():
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            parts.append(f"{sign} {mag}z({comp})")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else text


@dataclass(frozen=True)
class OrderedSetPartition:
    """Disjoint nonempty variable levels, earlier levels strictly below later."""

    levels: tuple[tuple[VarId, ...], ...]

    def __post_init__(self):
        seen: set[VarId] = set()
        for lvl in self.levels:
            if not lvl:
                raise ValueError("empty level")
            for v in lvl:
                if v in seen:
                    raise ValueError(f"variable {v} appears in two levels")
                seen.add(v)

    def __str__(self) -> str:
        return "".join("(" + " ".join(str(v) for v in lvl) + ")" for lvl in self.levels)


@lru_cache(maxsize=None)
def weak_orders(cs: ConstraintSystem) -> tuple[OrderedSetPartition, ...]:
    """All ordered set partitions compatible with cs, canonically ordered.

    Recursive peeling: at each step every valid next level is a nonempty
    subset of the currently minimal variables, closed under non-strict
    in-edges; subsets are tried in binary-counter order over the sorted
    candidate list, which fixes the output order across runs.
    """
    vs = list(cs.variables)
    idx = {v: t for t, v in enumerate(vs)}
    edges = [(idx[c.lhs], idx[c.rhs], c.rel == REL_LT) for c in cs.constraints]
    out: list[OrderedSetPartition] = []
    levels: list[tuple[int, ...]] = []

    def valid_level(level: set[int], remaining: frozenset[int]) -> bool:
        for (u, w, strict) in edges:
            if w in level and u in remaining:
                if u not in level or strict:
                    return False
        return True

    def rec(remaining: frozenset[int]):
        if not remaining:
            out.append(
                OrderedSetPartition(tuple(tuple(vs[t] for t in lvl) for lvl in levels))
            )
            return
        blocked = {
            w for (u, w, strict) in edges if strict and u in remaining and w in remaining
        }
        cand = sorted(remaining - blocked)
        for mask in range(1, 1 << len(cand)):
            level = {cand[t] for t in range(len(cand)) if (mask >> t) & 1}
            if not valid_level(level, remaining):
                continue
            levels.append(tuple(sorted(level)))
            rec(remaining - frozenset(level))
            levels.pop()

    rec(frozenset(range(len(vs))))
    return tuple(out)


def partition_respects(cs: ConstraintSystem, osp: OrderedSetPartition) -> bool:
    """Check that a partition refines the constraint system (test helper)."""
    level_of = {v: t for t, lvl in enumerate(osp.levels) for v in lvl}
    if set(level_of) != set(cs.variables):
        return False
    for c in cs.constraints:
        a, b = level_of[c.lhs], level_of[c.rhs]
        if c.rel == REL_LT and not a < b:
            return False
        if c.rel != REL_LT and not a <= b:
            return False
    return True


def decompose_to_mzv(cs: ConstraintSystem, exponents: Mapping[VarId, int]) -> SymbolCombination:
    """Rewrite the sum over cs with the given nonnegative integer exponents
    as an exact combination of admissible symbols (one per weak order, with
    tied variables' exponents merged)."""
    for v in cs.variables:
        if v not in exponents:
            raise ValueError(f"missing exponent for variable {v}")
    for v, e in exponents.items():
        if int(e) != e or e < 0:
            raise ValueError(f"exponent of {v} must be a nonnegative integer")
    acc: dict[Composition, int] = {}
    for osp in weak_orders(cs):
        parts = tuple(sum(int(exponents[v]) for v in lvl) for lvl in osp.levels)
        if any(p < 1 for p in parts) or parts[-1] < 2:
            raise NonAdmissibleError(
                f"weak order {osp} yields non-admissible parts {parts}",
                partition=osp,
                parts=parts,
            )
        comp = Composition(parts)
        acc[comp] = acc.get(comp, 0) + 1
    return SymbolCombination(acc)


_GRID_CACHE: dict[tuple[int, int], list[np.ndarray]] = {}


def count_lattice_points(cs: ConstraintSystem, n_max: int, cap: int = 30) -> int:
    """Exact number of assignments in [1, n_max]^#vars satisfying cs.

    Brute force by full-box masking (independent of the weak-order split);
    n_max above the oracle cap is refused.
    """
    if n_max > cap:
        raise BudgetError(f"oracle cutoff {n_max} exceeds cap {cap}")
    if n_max < 1:
        return 0
    vs = list(cs.variables)
    k = len(vs)
    if n_max**k > 5 * 10**8:
        raise BudgetError("oracle grid too large")
    idx = {v: t for t, v in enumerate(vs)}
    cons = [(idx[c.lhs], c.rel == REL_LT, idx[c.rhs]) for c in cs.constraints]
    if k == 1:
        total = n_max
        return total if not cons else 0
    key = (k - 1, n_max)
    if key not in _GRID_CACHE:
        _GRID_CACHE[key] = list(
            np.indices((n_max,) * (k - 1), dtype=np.int16).reshape(k - 1, -1) + 1
        )
    grids = _GRID_CACHE[key]

    def axis(t: int, v0: int):
        return v0 if t == 0 else grids[t - 1]

    total = 0
    for v0 in range(1, n_max + 1):
        mask = np.ones(grids[0].shape, dtype=bool)
        for (a, strict, b) in cons:
            lhs, rhs = axis(a, v0), axis(b, v0)
            mask &= (lhs < rhs) if strict else (lhs <= rhs)
            if not mask.any():
                break
        total += int(mask.sum())
    return total


def chain_count(t: int, n_max: int) -> int:
    """Number of strict chains x_1 < ... < x_t in [1, n_max]."""
    if t < 1:
        raise ValueError("need at least one level")
    return math.comb(n_max, t)
