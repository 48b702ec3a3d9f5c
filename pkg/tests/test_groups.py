import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from liegeom.calculus import affine_map, identity_map
from liegeom.errors import ContractError
from liegeom.geometry import Region
from liegeom.groups import (
    DiffGroupElement,
    GroupOn,
    PartialMap,
    automorphism_check,
    diff_group,
    group_axioms_check,
    group_on_with_from_grp_on,
    grp_on_check,
    pmap_apply,
    pmap_compose,
    pmap_id_on,
    the,
)
from liegeom.models import disk_diffeos, disk_manifold, euclidean_manifold

disk = Region.ball([0.0, 0.0], 1.0, seed=0, name="disk")


def rot(t):
    return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])


def test_partial_application():
    f = PartialMap(identity_map(2), disk)
    assert pmap_apply(f, [0.0, 0.0]).tolist() == [0.0, 0.0]
    assert pmap_apply(f, [2.0, 0.0]) is None
    # absence is informative: it certifies the point is outside the domain
    assert f([2.0, 0.0]) is None and not disk.contains([2.0, 0.0])
    with pytest.raises(ContractError):
        the(f([2.0, 0.0]))
    assert the(f([0.5, 0.0])).tolist() == [0.5, 0.0]
    with pytest.raises(ContractError):
        PartialMap(identity_map(3), disk)


def test_composition():
    r = PartialMap(affine_map(rot(0.4)), disk)
    same = pmap_compose(r, pmap_id_on(disk))
    assert all(np.array_equal(same(p), r(p)) for p in disk.points)
    rr = pmap_compose(r, r)
    assert len(rr.dom.points) == len(disk.points)
    assert all(np.allclose(rr(p), rot(0.8) @ p, atol=1e-15) for p in disk.points)
    away = PartialMap(affine_map(np.eye(2), [5.0, 0.0]), disk)
    assert pmap_compose(r, away).is_empty


def test_identity_on_region():
    i = pmap_id_on(disk)
    assert i([0.1, 0.2]).tolist() == [0.1, 0.2] and i([3.0, 0.0]) is None
    ii = pmap_compose(i, i)
    assert all(np.array_equal(ii(p), p) for p in disk.points)


def test_automorphism_examples():
    M = euclidean_manifold(2)
    c = M.carrier
    assert automorphism_check(M, pmap_id_on(c), pmap_id_on(c)).passed
    t = affine_map(np.eye(2), [0.5, -1.0])
    t_inv = affine_map(np.eye(2), [-0.5, 1.0])
    assert automorphism_check(M, PartialMap(t, c), PartialMap(t_inv, c)).passed
    D = disk_manifold()
    half = Region.from_predicate(2, lambda x: D.contains(x) and x[1] > 0, [p for p in D.carrier.points if p[1] > 0])
    rep = automorphism_check(D, PartialMap(identity_map(2), half), PartialMap(identity_map(2), half))
    assert not rep.passed and not rep.dom_matches


# -- abstract group axioms --------------------------------------------------------------------


def real_line_group():
    return GroupOn(lambda x: np.isfinite(x), lambda a, b: a + b, 0.0, lambda a: -a, lambda a, b: abs(a - b))


def test_reals_under_addition_are_exact():
    rng = np.random.default_rng(0)
    # dyadic rationals add exactly in binary floating point
    elems = list(rng.integers(-2**20, 2**20, 8) / 2**10)
    rep = group_axioms_check(real_line_group(), elems, tol=0.0)
    assert rep.passed and rep.max_residual == 0.0


def test_subtraction_is_not_associative():
    G = GroupOn(lambda x: True, lambda a, b: a - b, 0.0, lambda a: a, lambda a, b: abs(a - b))
    rep = group_axioms_check(G, [1.0, 2.0])
    assert not rep.associativity and not rep.passed
    kind, a, b, c = rep.counterexample
    assert kind == "associativity" and (a - b) - c != a - (b - c)


def test_diff_group_on_disk():
    D = disk_manifold()
    G = diff_group(D)
    r, r_inv = disk_diffeos()[1]
    elems = [G.unit, DiffGroupElement.from_maps(D, r, r_inv), DiffGroupElement.from_maps(D, r_inv, r)]
    assert all(G.contains(e) for e in elems)
    rep = group_axioms_check(G, elems, tol=1e-9)
    assert rep.passed and rep.max_residual <= 1e-9


def test_diff_group_distance_sees_domains():
    D = disk_manifold()
    G = diff_group(D)
    small = Region.ball([0.0, 0.0], 0.5)
    partial = DiffGroupElement(PartialMap(identity_map(2), small), PartialMap(identity_map(2), small))
    assert G.distance(G.unit, partial) == float("inf")
    assert not G.contains(partial)


def test_inverse_witnesses():
    elems = [0, 1, 2, 3, 4]
    add5 = lambda a, b: (a + b) % 5  # noqa: E731
    dist = lambda a, b: float(a != b)  # noqa: E731
    rep, wit = grp_on_check(lambda x: x in elems, add5, 0, elems, dist)
    assert rep.passed and wit.witnesses == (0, 4, 3, 2, 1)
    G = group_on_with_from_grp_on(lambda x: x in elems, add5, 0, elems, dist)
    assert [G.inv(x) for x in elems] == [0, 4, 3, 2, 1]
    rep, wit = grp_on_check(lambda x: x in (0, 1, 2), lambda a, b: min(a + b, 2), 0, [0, 1, 2], dist)
    assert not wit.passed and not rep.passed
    with pytest.raises(ContractError):
        group_on_with_from_grp_on(lambda x: x in (0, 1, 2), lambda a, b: min(a + b, 2), 0, [0, 1, 2], dist)


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_partial_map_is_never_numeric_outside_domain(x, y):
    f = PartialMap(affine_map(rot(1.0)), disk)
    out = f([x, y])
    assert (out is None) == (not disk.contains([x, y]))
