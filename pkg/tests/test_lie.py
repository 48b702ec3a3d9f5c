import numpy as np
import pytest

from liegeom.calculus import RealMap, constant_map, fd_jacobian, identity_map
from liegeom.calculus import jet as J
from liegeom.errors import ContractError, InconclusiveSpanError, NotALieGroupError
from liegeom.field import VectorField, lie_bracket, vf_apply
from liegeom.groups import PartialMap
from liegeom.lie import (
    action_check,
    certify_left_mult,
    invariant_under_check,
    left_action,
    left_invariant_extend,
    left_mult,
    lie_algebra_check,
    lie_algebra_of,
    lie_group_new,
    lie_subalgebra_check,
    sample_group_elements,
)
from liegeom.models import euclidean_lie_group, euclidean_manifold, gl_group, polynomial_field, random_polynomial_field
from liegeom.polynomial import parse_field
from liegeom.tangent import coordinate_vector


@pytest.fixture(scope="module")
def R2():
    return euclidean_lie_group(2)


@pytest.fixture(scope="module")
def GL2():
    return gl_group(2)


def test_constructed_groups_carry_certificates(R2, GL2):
    for G in (R2, GL2):
        assert G.mult_certificate.passed and G.inv_certificate.passed and G.group_report.passed
    assert R2.dim == 2 and GL2.dim == 4
    assert np.array_equal(GL2.unit, np.eye(2).ravel())


def test_non_smooth_inverse_is_rejected():
    M = euclidean_manifold(1)
    plus = RealMap(2, 1, lambda z: [z[0] + z[1]])
    # off by at most 2e-12 on the samples, so only smoothness can catch it
    kink = RealMap(1, 1, lambda x: [-x[0] + 1e-12 * J.fabs(x[0])], "kinked negation")
    with pytest.raises(NotALieGroupError) as exc:
        lie_group_new(M, plus, [0.0], kink)
    assert "inversion" in str(exc.value) and not exc.value.report.passed
    with pytest.raises(NotALieGroupError):
        lie_group_new(M, RealMap(2, 1, lambda z: [z[0] - z[1]]), [0.0], identity_map(1))
    with pytest.raises(ContractError):
        lie_group_new(M, identity_map(2), [0.0], identity_map(1))


def test_left_multiplication(R2, GL2):
    for G in (R2, GL2):
        L = left_mult(G, G.unit)
        assert all(np.array_equal(L(p), p) for p in G.manifold.carrier.points)
    g = np.array([1.0, -2.0])
    assert left_mult(R2, g)([0.5, 0.5]).tolist() == [1.5, -1.5]
    A = np.array([[1.0, 0.5], [0.0, 2.0]])
    LA = left_mult(GL2, A.ravel())
    B = np.array([[0.3, 1.0], [-1.0, 0.2]])
    assert np.allclose(LA(B.ravel()), (A @ B).ravel())
    assert certify_left_mult(GL2, A.ravel()).passed


def test_left_action(GL2):
    L = left_action(GL2, GL2.unit)
    assert all(np.array_equal(L(p), p) for p in GL2.manifold.carrier.points)
    assert L(np.zeros(4)) is None
    gs = sample_group_elements(GL2, n_random=2)
    g, h = gs[1], gs[2]
    lhs = left_action(GL2, GL2.mul(g, h))
    for p in GL2.manifold.carrier.points:
        assert np.max(np.abs(lhs(p) - left_action(GL2, g)(left_action(GL2, h)(p)))) <= 1e-9


def test_action_checks(R2):
    gs = sample_group_elements(R2, n_random=2)[:4]
    rep = action_check(R2, R2.manifold, lambda g: left_action(R2, g), gs, tol=1e-9)
    assert rep.passed and rep.joint.passed and rep.homomorphism_residual <= 1e-9
    c = R2.manifold.carrier
    flat = action_check(R2, R2.manifold, lambda g: PartialMap(constant_map(2, [0.0, 0.0]), c), gs[:2])
    assert not flat.automorphisms_passed and not flat.passed


def test_invariance(R2):
    M = R2.manifold
    X = random_polynomial_field(M, 3)
    same = invariant_under_check(X, identity_map(2))
    assert same.passed and same.max_residual == 0.0
    C = VectorField.constant(M, [1.0, -2.0])
    for g in sample_group_elements(R2, n_random=3):
        assert invariant_under_check(C, left_mult(R2, g)).passed
    R1 = euclidean_lie_group(1)
    x_dx = polynomial_field(R1.manifold, parse_field("x0", 1))
    x = RealMap(1, 1, lambda z: [z[0]], "x")
    rep = invariant_under_check(x_dx, left_mult(R1, [1.0]), [x])
    # comps at p + 1 are p + 1, pushed comps are p
    assert not rep.passed and rep.max_residual == pytest.approx(1.0)


def test_left_invariant_extension(R2, GL2):
    c = R2.manifold.covering_chart(R2.unit)
    for i in range(2):
        X = left_invariant_extend(R2, coordinate_vector(c, R2.unit, i))
        assert all(np.array_equal(vf_apply(X, p).comps, np.eye(2)[i]) for p in R2.manifold.carrier.points)
    B = np.array([[0.0, 1.0], [2.0, -1.0]])
    cg = GL2.manifold.covering_chart(GL2.unit)
    XB = left_invariant_extend(GL2, coordinate_vector(cg, GL2.unit, B.ravel()))
    for p in GL2.manifold.carrier.points:
        A = p.reshape(2, 2)
        oracle = fd_jacobian(left_mult(GL2, p), GL2.unit) @ B.ravel()
        assert np.allclose(vf_apply(XB, p).comps, (A @ B).ravel(), atol=1e-12)
        assert np.allclose(vf_apply(XB, p).comps, oracle, atol=1e-8)
    Z = left_invariant_extend(GL2, coordinate_vector(cg, GL2.unit, np.zeros(4)))
    assert all(np.all(vf_apply(Z, p).comps == 0) for p in GL2.manifold.carrier.points)
    with pytest.raises(ContractError):
        left_invariant_extend(GL2, coordinate_vector(cg, GL2.manifold.carrier.points[1], 0))


# -- algebra checks --------------------------------------------------------------------------


def test_lie_algebra_check():
    M = euclidean_manifold(2)
    coords = [VectorField.constant(M, [1.0, 0.0]), VectorField.constant(M, [0.0, 1.0])]
    rep = lie_algebra_check(coords)
    assert rep.passed and rep.jacobi_residual == rep.alternating_residual == rep.bilinearity_residual == 0.0
    polys = [random_polynomial_field(M, s) for s in range(3)]
    assert lie_algebra_check(polys, tol=1e-5, n_points=6).passed
    offset = VectorField.constant(M, [1.0, 1.0])
    bad = lie_algebra_check(polys, bracket=lambda X, Y: lie_bracket(X, Y) + offset, n_points=4)
    assert not bad.jacobi_passed


def test_subalgebra_check(R2, GL2):
    cg = GL2.manifold.covering_chart(GL2.unit)
    B = np.array([[0.0, 1.0], [0.0, 0.0]])
    C = np.array([[1.0, 0.0], [0.0, -1.0]])
    XB, XC = (left_invariant_extend(GL2, coordinate_vector(cg, GL2.unit, M.ravel())) for M in (B, C))
    rep = lie_subalgebra_check([XB, XC], n_points=8)
    assert rep.passed
    # [X_B, X_C] = X_{BC - CB}; BC - CB = -2B here
    assert np.allclose(rep.coefficients[(0, 1)], [-2.0, 0.0], atol=1e-6)
    assert np.allclose(B @ C - C @ B, -2 * B)
    wild = polynomial_field(GL2.manifold, parse_field("x0^2, x1*x2, 0, x3", 4))
    escaped = lie_subalgebra_check([XB, wild], n_points=8)
    assert not escaped.passed and escaped.span_residual > 1e-6
    with pytest.raises(InconclusiveSpanError):
        lie_subalgebra_check([XB, XB.scale(2.0)], n_points=8)
    c = R2.manifold.covering_chart(R2.unit)
    flat = [left_invariant_extend(R2, coordinate_vector(c, R2.unit, i)) for i in range(2)]
    assert lie_subalgebra_check(flat).span_residual == 0.0


def test_lie_algebra_of_gl1():
    G = gl_group(1)
    res = lie_algebra_of(G)
    assert len(res.basis) == 1 and res.passed
    assert res.structure_constants.shape == (1, 1, 1) and res.structure_constants[0, 0, 0] == 0.0
    for p in G.manifold.carrier.points:
        assert vf_apply(res.basis[0], p).comps[0] == pytest.approx(p[0])


def test_lie_algebra_of_gl2(GL2):
    res = lie_algebra_of(GL2)
    E = [np.eye(4)[k].reshape(2, 2) for k in range(4)]
    for i in range(4):
        for j in range(4):
            assert np.allclose(res.structure_constants[i, j], (E[i] @ E[j] - E[j] @ E[i]).ravel(), atol=1e-6)
    assert res.passed and res.invariance_residual <= 1e-6


def test_translation_actions_on_r1():
    R1 = euclidean_lie_group(1)
    gs = [np.array([0.0]), np.array([0.75]), np.array([-1.25])]
    # rho must stay generic in g: the joint smoothness probe feeds jets through it
    def shift(g):
        return PartialMap(RealMap(1, 1, lambda m: [m[0] + g[0]], "shift"), R1.manifold.carrier)

    rep = action_check(R1, R1.manifold, shift, gs)
    assert rep.passed and rep.homomorphism_residual == 0.0
