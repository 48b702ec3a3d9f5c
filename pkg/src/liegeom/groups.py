"""Partial maps, group-axiom checks and the diffeomorphism group of a manifold."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Any, Callable, Sequence

import numpy as np

from .calculus import DEFAULT_ORDER, DEFAULT_TOL, RealMap, identity_map, map_compose
from .errors import ContractError, LieGeomError
from .geometry import DiffeomorphismReport, Manifold, Region, diffeomorphism_check

_EVAL_FAILURES = (ArithmeticError, ValueError, OverflowError, LieGeomError)


@dataclass(frozen=True, eq=False)
class PartialMap:
    """A map that is only defined on ``dom``; elsewhere it yields ``None``."""

    fn: RealMap
    dom: Region

    def __post_init__(self):
        if self.fn.in_dim != self.dom.ambient_dim:
            raise ContractError("partial map domain lives in a different space than the map")

    def __call__(self, x) -> np.ndarray | None:
        return pmap_apply(self, x)

    @property
    def is_empty(self) -> bool:
        return self.dom.is_empty


def pmap_apply(f: PartialMap, x) -> np.ndarray | None:
    x = np.asarray(x, dtype=float).reshape(-1)
    if not f.dom.contains(x):
        return None
    return f.fn(x)


def the(value):
    """Unwrap a present value; unwrapping ``None`` is a contract violation."""
    if value is None:
        raise ContractError("unwrapped an absent value")
    return value


def pmap_compose(g: PartialMap, f: PartialMap) -> PartialMap:
    """``g o f`` on ``{x in dom f : f(x) in dom g}``; samples are inherited from ``dom f``."""
    if f.fn.out_dim != g.fn.in_dim:
        raise ContractError("cannot compose partial maps of incompatible dimensions")
    gdom, ffn = g.dom.contains, f.fn
    dom = f.dom.filter(lambda x: gdom(ffn(x)), name=f"dom({g.fn.name}∘{f.fn.name})")
    return PartialMap(map_compose(g.fn, f.fn), dom)


def pmap_id_on(U: Region) -> PartialMap:
    return PartialMap(identity_map(U.ambient_dim), U)


@dataclass(frozen=True)
class AutomorphismReport:
    passed: bool
    dom_matches: bool
    diffeomorphism: DiffeomorphismReport | None

    def __bool__(self):
        return self.passed


def automorphism_check(M: Manifold, f: PartialMap, f_inv: PartialMap, order: int = DEFAULT_ORDER,
                       tol: float = DEFAULT_TOL) -> AutomorphismReport:
    """``dom f`` equals the carrier (at samples) and the totalized maps are mutually inverse diffeomorphisms."""
    carrier = M.carrier
    dom_ok = all(f.dom.contains(x) for x in carrier.points) and all(M.contains(x) for x in f.dom.points)
    if not dom_ok:
        return AutomorphismReport(False, False, None)
    diffeo = diffeomorphism_check(M, M, f.fn, f_inv.fn, order, tol)
    return AutomorphismReport(diffeo.passed, True, diffeo)


# -- abstract groups ----------------------------------------------------------------------


def _array_distance(a, b) -> float:
    d = np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))
    return float(d)


@dataclass(frozen=True, eq=False)
class GroupOn:
    """Carrier predicate with explicit operation, unit and inverse."""

    contains: Callable[[Any], bool]
    op: Callable[[Any, Any], Any]
    unit: Any
    inv: Callable[[Any], Any]
    distance: Callable[[Any, Any], float] = _array_distance
    name: str = ""

    def sub(self, a, b):
        return self.op(a, self.inv(b))


@dataclass(frozen=True)
class GroupAxiomsReport:
    closure: bool
    associativity: bool
    identity: bool
    unit_in_carrier: bool
    inverses: bool
    max_residual: float
    tol: float
    samples: int
    counterexample: tuple | None = None

    @property
    def passed(self) -> bool:
        return self.closure and self.associativity and self.identity and self.unit_in_carrier and self.inverses

    def __bool__(self):
        return self.passed


def _safe_distance(G: GroupOn, a, b) -> float:
    try:
        d = G.distance(a, b)
    except _EVAL_FAILURES:
        return float("inf")
    return d if np.isfinite(d) else float("inf")


def group_axioms_check(G: GroupOn, elements: Sequence, tol: float = 0.0) -> GroupAxiomsReport:
    """Closure, associativity, two-sided identity, unit membership and inverses on ``elements``."""
    elements = list(elements)
    worst = 0.0
    counter = None

    def within(r, what):
        nonlocal worst, counter
        worst = max(worst, r)
        if r > tol and counter is None:
            counter = what
        return r <= tol

    closure = all(G.contains(G.op(a, b)) for a, b in product(elements, repeat=2))
    assoc = True
    for a, b, c in product(elements, repeat=3):
        r = _safe_distance(G, G.op(G.op(a, b), c), G.op(a, G.op(b, c)))
        assoc &= within(r, ("associativity", a, b, c))
    ident = True
    for a in elements:
        ident &= within(_safe_distance(G, G.op(G.unit, a), a), ("left identity", a))
        ident &= within(_safe_distance(G, G.op(a, G.unit), a), ("right identity", a))
    inverses = True
    for a in elements:
        ia = G.inv(a)
        inverses &= bool(G.contains(ia))
        inverses &= within(_safe_distance(G, G.op(ia, a), G.unit), ("left inverse", a))
        inverses &= within(_safe_distance(G, G.op(a, ia), G.unit), ("right inverse", a))
    return GroupAxiomsReport(closure, assoc, ident, bool(G.contains(G.unit)), inverses, worst, tol,
                             len(elements), counter)


@dataclass(frozen=True)
class InverseWitnesses:
    """Result of the existence form of the inverse axiom on a finite element list."""

    passed: bool
    witnesses: tuple  # index of a right inverse for every element, or None


def grp_on_check(contains, op, unit, elements: Sequence, distance=_array_distance,
                 tol: float = 0.0) -> tuple[GroupAxiomsReport, InverseWitnesses]:
    """Group axioms where inverses only have to exist among ``elements``."""
    elements = list(elements)
    wit = []
    for x in elements:
        found = None
        for j, y in enumerate(elements):
            if contains(y) and distance(op(x, y), unit) <= tol:
                found = j
                break
        wit.append(found)
    witnesses = InverseWitnesses(all(w is not None for w in wit), tuple(wit))
    table = {i: elements[w] for i, w in enumerate(wit) if w is not None}

    def inv(x):
        for i, y in enumerate(elements):
            if distance(x, y) <= tol and i in table:
                return table[i]
        raise ContractError("element has no inverse witness in the sample list")

    G = GroupOn(contains, op, unit, inv, distance)
    if not witnesses.passed:
        rep = group_axioms_check(GroupOn(contains, op, unit, lambda x: x, distance), elements, tol)
        return GroupAxiomsReport(rep.closure, rep.associativity, rep.identity, rep.unit_in_carrier, False,
                                 rep.max_residual, tol, len(elements), ("no inverse witness",)), witnesses
    return group_axioms_check(G, elements, tol), witnesses


def group_on_with_from_grp_on(contains, op, unit, elements: Sequence, distance=_array_distance,
                              tol: float = 0.0) -> GroupOn:
    """Turn existence witnesses into an explicit inverse operator on ``elements``."""
    _, witnesses = grp_on_check(contains, op, unit, elements, distance, tol)
    if not witnesses.passed:
        raise ContractError("some element has no inverse among the samples")
    elements = list(elements)

    def inv(x):
        for i, y in enumerate(elements):
            if distance(x, y) <= tol:
                return elements[witnesses.witnesses[i]]
        raise ContractError("inverse requested for an element outside the sample list")

    return GroupOn(contains, op, unit, inv, distance)


# -- Diff(M) ----------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DiffGroupElement:
    pmap: PartialMap
    inverse_pmap: PartialMap

    @classmethod
    def from_maps(cls, M: Manifold, f: RealMap, f_inv: RealMap) -> "DiffGroupElement":
        return cls(PartialMap(f, M.carrier), PartialMap(f_inv, M.carrier))


def diff_group(M: Manifold, order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL) -> GroupOn:
    """Diffeomorphisms of ``M`` under domain-respecting composition.

    Membership is the automorphism judgment; distance compares two elements
    at every carrier sample (absent against present is infinitely far).
    """
    carrier = M.carrier
    cache: dict = {}

    def contains(a: DiffGroupElement) -> bool:
        if id(a) not in cache:
            cache[id(a)] = (a, automorphism_check(M, a.pmap, a.inverse_pmap, order, tol).passed)
        return cache[id(a)][1]

    products: dict = {}

    def op(a: DiffGroupElement, b: DiffGroupElement) -> DiffGroupElement:
        # elements are immutable, so compositions can be shared across axiom checks
        key = (id(a), id(b))
        if key not in products:
            ab = DiffGroupElement(pmap_compose(a.pmap, b.pmap), pmap_compose(b.inverse_pmap, a.inverse_pmap))
            products[key] = (a, b, ab)
        return products[key][2]

    def inv(a: DiffGroupElement) -> DiffGroupElement:
        return DiffGroupElement(a.inverse_pmap, a.pmap)

    def distance(a: DiffGroupElement, b: DiffGroupElement) -> float:
        worst = 0.0
        for x in carrier.points:
            u, v = pmap_apply(a.pmap, x), pmap_apply(b.pmap, x)
            if (u is None) != (v is None):
                return float("inf")
            if u is not None:
                worst = max(worst, float(np.max(np.abs(u - v))))
        return worst

    unit = DiffGroupElement(pmap_id_on(carrier), pmap_id_on(carrier))
    return GroupOn(contains, op, unit, inv, distance, name=f"Diff({M.name})")
