import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from liegeom.calculus import (
    MAX_ORDER,
    RealMap,
    SmoothnessReport,
    affine_map,
    constant_map,
    coordinate_map,
    directional_derivative,
    fd_derivative,
    fd_hessians,
    fd_jacobian,
    function_battery,
    identity_map,
    map_add,
    map_compose,
    map_mul,
    map_product,
    map_scale,
    map_sub,
    merge_reports,
    probe_stencil,
    smooth_on_probe,
)
from liegeom.calculus import jet as J
from liegeom.errors import ContractError, NonDifferentiableError, UnsupportedOrderError
from liegeom.geometry import Region

square = RealMap(1, 1, lambda x: [x[0] * x[0]], "x^2")
sin_y = RealMap(2, 1, lambda x: [J.sin(x[0]) * x[1]], "sin(x)y")


def test_square_jet_coefficients():
    c = square.jet([3.0], 2)[0].coeffs
    assert float(c[0]) == 9.0
    assert c[1].tolist() == [6.0]
    assert c[2].tolist() == [[2.0]]


def test_identity_jacobian():
    jets = identity_map(2).jet([1.0, 2.0], 1)
    assert [j.value for j in jets] == [1.0, 2.0]
    assert np.array_equal(np.array([j.gradient() for j in jets]), np.eye(2))


def test_mixed_partial_matches_fd():
    ad = sin_y.jet([0.0, 1.0], 2)[0].hessian()
    fd = fd_hessians(sin_y, [0.0, 1.0], 1e-4)[0]
    assert ad[0, 1] == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(ad - fd)) < 1e-6


def test_fd_derivative_examples():
    assert fd_derivative(square, [3.0], [1.0], 1e-5) == pytest.approx(6.0, abs=1e-8)
    assert fd_derivative(constant_map(2, 7.0), [0.3, -1.0], [2.0, 5.0], 1e-3) == 0.0
    e = RealMap(1, 1, lambda x: [J.exp(x[0])], "exp")
    assert fd_derivative(e, [0.0], [1.0], 1e-5) == pytest.approx(e.jet([0.0], 1)[0].gradient()[0], abs=1e-9)


def test_fd_rejects_bad_step():
    with pytest.raises(ContractError):
        fd_derivative(square, [1.0], [1.0], 0.0)


# closed-form derivative sequences at a point, orders 0..4
ELEMENTARY = [
    (J.sin, math.sin, lambda a: [math.sin(a), math.cos(a), -math.sin(a), -math.cos(a), math.sin(a)]),
    (J.cos, math.cos, lambda a: [math.cos(a), -math.sin(a), -math.cos(a), math.sin(a), math.cos(a)]),
    (J.exp, math.exp, lambda a: [math.exp(a)] * 5),
    (J.log, math.log, lambda a: [math.log(a), 1 / a, -1 / a**2, 2 / a**3, -6 / a**4]),
    (J.sqrt, math.sqrt, lambda a: [a**0.5, 0.5 * a**-0.5, -0.25 * a**-1.5, 0.375 * a**-2.5, -0.9375 * a**-3.5]),
    (J.cbrt, lambda a: a ** (1 / 3),
     lambda a: [a ** (1 / 3), a ** (-2 / 3) / 3, -2 / 9 * a ** (-5 / 3), 10 / 27 * a ** (-8 / 3),
                -80 / 81 * a ** (-11 / 3)]),
]


@pytest.mark.parametrize("jfn,ffn,derivs", ELEMENTARY)
@pytest.mark.parametrize("a", [0.4, 1.3, 2.2])
def test_elementary_jets_match_closed_forms(jfn, ffn, derivs, a):
    f = RealMap(1, 1, lambda x: [jfn(x[0])])
    jet = f.jet([a], 4)[0]
    got = [float(np.ravel(jet.derivative(k))[0]) for k in range(5)]
    assert np.allclose(got, derivs(a), rtol=1e-12, atol=1e-12)
    assert jfn(a) == pytest.approx(ffn(a), rel=1e-15)


def test_power_and_reciprocal():
    f = RealMap(1, 1, lambda x: [J.power(x[0], 2.5) + 1 / x[0]])
    jet = f.jet([1.5], 2)[0]
    a = 1.5
    assert jet.gradient()[0] == pytest.approx(2.5 * a**1.5 - 1 / a**2, rel=1e-12)
    assert jet.hessian()[0, 0] == pytest.approx(2.5 * 1.5 * a**0.5 + 2 / a**3, rel=1e-12)


def test_fabs_kink():
    f = RealMap(1, 1, lambda x: [J.fabs(x[0])])
    assert f([-2.0])[0] == 2.0
    assert f.jet([-2.0], 1)[0].gradient()[0] == -1.0
    assert f.jet([0.0], 0)[0].value == 0.0
    with pytest.raises(NonDifferentiableError):
        f.jet([0.0], 1)


def test_order_limits():
    assert MAX_ORDER == 4
    with pytest.raises(UnsupportedOrderError):
        square.jet([1.0], 5)
    with pytest.raises(ContractError):
        square.jet([1.0], -1)


def test_dimension_contracts():
    with pytest.raises(ContractError):
        square([1.0, 2.0])
    bad = RealMap(1, 2, lambda x: [x[0]])
    with pytest.raises(ContractError):
        bad([1.0])


def test_directional_derivative_nests():
    # d/dx of d/dx (x^3) = 6x, taken through jets of the outer variable
    cube = lambda z: [z[0] ** 3]  # noqa: E731
    inner = RealMap(1, 1, lambda x: directional_derivative(cube, x, [1.0]))
    assert inner([2.0])[0] == pytest.approx(12.0)
    assert inner.jet([2.0], 1)[0].gradient()[0] == pytest.approx(12.0)


def test_combinators():
    f = function_battery(2)[8]
    pts = np.random.default_rng(0).uniform(-1, 1, (6, 2))
    for p in pts:
        assert map_compose(identity_map(1), f)(p)[0] == f(p)[0]
        assert map_add(f, map_scale(-1.0, f))(p)[0] == 0.0
        assert map_sub(f, f)(p)[0] == 0.0
    x = coordinate_map(1, 0)
    jet = map_mul(x, x).jet([2.0], 2)[0]
    assert (jet.value, jet.gradient()[0], jet.hessian()[0, 0]) == (4.0, 4.0, 2.0)
    pr = map_product(identity_map(1), square)
    assert pr([1.0, 3.0]).tolist() == [1.0, 9.0]


def test_affine_map_jacobian():
    A = np.array([[1.0, 2.0], [3.0, 4.0], [0.0, -1.0]])
    f = affine_map(A, [1.0, 0.0, 2.0])
    assert np.allclose(f.jacobian([0.3, 0.7]), A)
    assert np.allclose(fd_jacobian(f, [0.3, 0.7]), A, atol=1e-9)


def test_battery_shape():
    for dim in (1, 2, 4):
        b = function_battery(dim)
        assert len(b) == 10 and all(f.in_dim == dim and f.out_dim == 1 for f in b)


# -- probe -------------------------------------------------------------------------------


def test_probe_polynomial_on_unit_box():
    box = Region.box([0, 0], [1, 1], seed=2)
    f = RealMap(2, 1, lambda x: [x[0] ** 3 * x[1] - 2 * x[1] ** 2 + 1])
    rep = smooth_on_probe(box, f, 3)
    assert rep.passed and rep.failures == () and rep.samples_checked == len(box.points)


def test_probe_abs_fails_near_zero():
    region = Region.box([-1.0], [1.0], seed=0, extra_points=[[1e-6]])
    f = RealMap(1, 1, lambda x: [J.fabs(x[0])])
    rep = smooth_on_probe(region, f, 1)
    assert not rep.passed
    bad = [p for p, _, _ in rep.failures]
    assert all(abs(p[0]) < 1e-4 for p in bad)
    # direct computation: the central difference straddling the kink is far from the jet slope
    p = bad[0]
    assert abs(fd_derivative(f, p, [1.0], 1e-5) - 1.0) > 1e-5


def test_probe_reciprocal_passes():
    rep = smooth_on_probe(Region.box([0.5], [2.0], seed=3), RealMap(1, 1, lambda x: [1 / x[0]]), 3)
    assert rep.passed
    assert rep.max_fd_residual < 1e-5


def test_probe_stencil_size():
    st2 = probe_stencil(np.zeros(2), 1e-3)
    assert st2.shape[1] == 2
    assert np.max(np.abs(st2)) <= 2e-3


def test_report_invariant():
    with pytest.raises(ContractError):
        SmoothnessReport(1, 1, 0.0, False, ())
    ok = SmoothnessReport.vacuous(2)
    bad = SmoothnessReport(2, 3, 1.0, False, ((np.zeros(1), 1, 1.0),))
    merged = merge_reports([ok, bad])
    assert not merged.passed and merged.max_fd_residual == 1.0 and len(merged.failures) == 1


# -- properties --------------------------------------------------------------------------

coef = st.floats(-3, 3, allow_nan=False).map(lambda v: round(v, 3))


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=6, max_size=6), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_jet_symmetric_and_order0_exact(c, x, y):
    f = RealMap(2, 1, lambda z: [c[0] + c[1] * z[0] * z[1] ** 2 + c[2] * J.sin(z[0] + c[3] * z[1])
                                 + c[4] * z[0] ** 3 + c[5] * J.exp(z[1] / 3)])
    p = [x, y]
    jet = f.jet(p, 4)[0]
    for r in (2, 3, 4):
        T = jet.derivative(r)
        assert np.array_equal(T, np.swapaxes(T, 0, 1))
        assert np.array_equal(T, np.swapaxes(T, 0, r - 1))
    assert f.jet(p, 0)[0].value == f(p)[0]
    assert np.array_equal(f.jet(p, 3)[0].c, f.jet(p, 3)[0].c)


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=4, max_size=4), st.floats(-1, 1), st.floats(-1, 1))
def test_gradient_matches_central_differences(c, x, y):
    f = RealMap(2, 1, lambda z: [c[0] * z[0] ** 2 * z[1] + c[1] * J.cos(c[2] * z[0]) + c[3] * z[1] ** 3])
    jet = f.jet([x, y], 2)[0]
    scale = 1 + np.abs(jet.gradient())
    assert np.all(np.abs(fd_jacobian(f, [x, y])[0] - jet.gradient()) / scale < 1e-7)
    assert np.all(np.abs(fd_hessians(f, [x, y])[0] - jet.hessian()) / (1 + np.abs(jet.hessian())) < 1e-5)
