"""Concrete manifolds and groups: Euclidean spaces, GL(n) and small fixtures."""

from __future__ import annotations

import numpy as np

from .calculus import RealMap, affine_map, cbrt, fabs, sqrt, value_of
from .errors import ContractError, SingularMatrixError, UnsupportedOrderError
from .field import VectorField
from .geometry import Chart, Manifold, Region, manifold_new
from .lie import LieGroup, lie_group_new
from .polynomial import Polynomial, polynomial_map

GL_DELTA = 1e-6
SINGULAR_TOL = 1e-12
MAX_EXPANSION_N = 4
GL_CLEARANCE = 1e-2


# -- Euclidean ---------------------------------------------------------------------------


def euclidean_manifold(n: int, half_width: float = 2.0, n_samples: int = 16, seed: int = 0) -> Manifold:
    """``R^n`` with the identity chart, sampled in ``[-half_width, half_width]^n``."""
    if n < 1:
        raise ContractError("dimension must be positive")
    region = Region.whole(n, half_width, n_samples, seed, name=f"R^{n}")
    return manifold_new([Chart.identity(region, "id")], name=f"R^{n}")


def euclidean_lie_group(n: int, n_samples: int = 16, seed: int = 0) -> LieGroup:
    M = euclidean_manifold(n, n_samples=n_samples, seed=seed)
    times = RealMap(2 * n, n, lambda z: [z[i] + z[n + i] for i in range(n)], "+")
    neg = RealMap(n, n, lambda x: [-t for t in x], "neg")
    gens = list(np.eye(n))
    return lie_group_new(M, times, np.zeros(n), neg, generators=gens, name=f"(R^{n},+)")


# -- matrices ---------------------------------------------------------------------------------


def flatten(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {A.shape}")
    return A.reshape(-1).copy()


def unflatten(v, n: int | None = None) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if n is None:
        n = int(round(np.sqrt(v.size)))
    if n * n != v.size:
        raise ContractError(f"{v.size} entries do not form an {n}x{n} matrix")
    return v.reshape(n, n).copy()


def det_entries(xs, n: int):
    """Determinant of the row-major ``n x n`` entries by Laplace expansion (floats or jets)."""
    if n == 1:
        return xs[0] * 1.0
    if n == 2:
        return xs[0] * xs[3] - xs[1] * xs[2]
    total = 0.0
    for j in range(n):
        a = xs[j]
        if isinstance(a, float) and a == 0.0:
            continue
        minor = [xs[r * n + c] for r in range(1, n) for c in range(n) if c != j]
        term = a * det_entries(minor, n - 1)
        total = total + term if j % 2 == 0 else total - term
    return total


def determinant(A) -> float:
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n > MAX_EXPANSION_N:
        return float(np.linalg.det(A))
    return float(det_entries([float(t) for t in A.reshape(-1)], n))


def det_map(n: int) -> RealMap:
    """``det`` on ``R^(n^2)``; jet evaluation is limited to the expansion range ``n <= 4``."""

    def fn(xs):
        if n > MAX_EXPANSION_N:
            if any(not isinstance(t, float) for t in xs):
                raise UnsupportedOrderError(f"jet evaluation of det needs n <= {MAX_EXPANSION_N}")
            return [float(np.linalg.det(np.array(xs).reshape(n, n)))]
        return [det_entries(list(xs), n)]

    return RealMap(n * n, 1, fn, f"det{n}")


def adjugate_entries(xs, n: int) -> list:
    """Row-major adjugate (transposed cofactors) of row-major entries."""
    if n == 1:
        return [1.0]
    if n > MAX_EXPANSION_N:
        raise UnsupportedOrderError(f"cofactor expansion is implemented for n <= {MAX_EXPANSION_N}")
    out = [0.0] * (n * n)
    for i in range(n):
        for j in range(n):
            minor = [xs[r * n + c] for r in range(n) if r != i for c in range(n) if c != j]
            cof = det_entries(minor, n - 1)
            out[j * n + i] = cof if (i + j) % 2 == 0 else -cof
    return out


def adjugate(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    return np.array(adjugate_entries([float(t) for t in A.reshape(-1)], n), dtype=float).reshape(n, n)


def matrix_inv(A) -> np.ndarray:
    """``adjugate(A) / det(A)``; refuses matrices with ``|det| <= 1e-12``."""
    d = determinant(A)
    if abs(d) <= SINGULAR_TOL:
        raise SingularMatrixError(f"matrix is singular to working precision (det = {d:.3g})")
    return adjugate(A) / d


def matmul_entries(xs, ys, n: int) -> list:
    return [
        sum((xs[i * n + k] * ys[k * n + j] for k in range(1, n)), xs[i * n] * ys[j])
        for i in range(n) for j in range(n)
    ]


def inverse_entries(xs, n: int) -> list:
    d = det_entries(list(xs), n)
    if abs(value_of(d)) <= SINGULAR_TOL:
        raise SingularMatrixError("matrix is singular to working precision")
    return [c / d for c in adjugate_entries(list(xs), n)]


# -- GL(n) -----------------------------------------------------------------------------------------


def _gl_candidates(n: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    if n == 1:
        pos = 0.5 + 1.5 * rng.random((count + 1) // 2)
        vals = np.concatenate([[1.0], pos, -(0.5 + 1.5 * rng.random(count // 2))])
        return vals.reshape(-1, 1)
    eye = np.eye(n)
    out = [eye.reshape(-1)]
    flip = np.diag([-1.0] + [1.0] * (n - 1))
    while len(out) < count + 1:
        A = eye + 0.4 * rng.standard_normal((n, n))
        if abs(np.linalg.det(A)) < 0.2:
            continue
        # alternate components of GL(n): det > 0 and det < 0
        out.append((A if len(out) % 2 else flip @ A).reshape(-1))
    return np.array(out)


def gl_region(n: int, n_samples: int = 12, seed: int = 0, delta: float = GL_DELTA) -> Region:
    """``{A : |det A| > delta}`` in ``R^(n^2)`` with the identity and seeded perturbations as samples."""
    if n < 1:
        raise ContractError("matrix size must be positive")
    d = det_map(n)
    return Region.from_predicate(n * n, lambda x: abs(float(d(x)[0])) > delta, _gl_candidates(n, n_samples, seed),
                                 name=f"GL({n})", seed=seed, start=GL_CLEARANCE)


def gl_manifold(n: int, n_samples: int = 12, seed: int = 0) -> Manifold:
    return manifold_new([Chart.identity(gl_region(n, n_samples, seed), "GL")], name=f"GL({n})")


def _gl_generators(n: int) -> list[np.ndarray]:
    if n == 1:
        return [np.array([2.0]), np.array([-1.0])]
    gens = []
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n))
            E[i, j] = 0.5
            gens.append((np.eye(n) + E).reshape(-1))
    return gens[:3]


def gl_group(n: int, n_samples: int = 12, seed: int = 0) -> LieGroup:
    if n not in (1, 2, 3):
        raise ContractError("GL(n) is provided for n in {1, 2, 3}")
    M = gl_manifold(n, n_samples, seed)
    N = n * n
    times = RealMap(2 * N, N, lambda z: matmul_entries(z[:N], z[N:], n), "matmul")
    inv = RealMap(N, N, lambda x: inverse_entries(x, n), "matrix_inv")
    return lie_group_new(M, times, np.eye(n).reshape(-1), inv, generators=_gl_generators(n), name=f"GL({n})")


def positive_det_region(M: Manifold) -> Region:
    n = int(round(np.sqrt(M.ambient_dim)))
    d = det_map(n)
    return M.carrier.filter(lambda x: float(d(x)[0]) > 0, name=f"GL+({n})")


# -- fixtures ---------------------------------------------------------------------------------------


def test_diffeos(n: int) -> list[tuple[RealMap, RealMap]]:
    """Affine diffeomorphisms ``x -> A x + b`` of ``R^n`` with exact inverses; identity first."""
    rng = np.random.default_rng(1234 + n)
    mats = [np.eye(n), 2.0 * np.eye(n), np.eye(n) + np.triu(np.ones((n, n)), 1) * 0.5]
    shifts = [np.zeros(n), np.zeros(n), 0.25 * np.ones(n)]
    if n >= 2:
        t = 0.7
        R = np.eye(n)
        R[:2, :2] = [[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]]
        mats.append(R)
        shifts.append(np.array([1.0] + [0.0] * (n - 1)))
    M = np.eye(n) + 0.3 * rng.standard_normal((n, n))
    mats.append(M)
    shifts.append(rng.uniform(-0.5, 0.5, n))
    out = []
    for A, b in zip(mats, shifts):
        Ainv = np.linalg.inv(A)
        out.append((affine_map(A, b), affine_map(Ainv, -Ainv @ b)))
    return out


def disk_manifold(n_samples: int = 16, seed: int = 0) -> Manifold:
    return manifold_new([Chart.identity(Region.ball(np.zeros(2), 1.0, n_samples, seed, name="disk"), "disk")],
                        name="disk")


def disk_diffeos() -> list[tuple[RealMap, RealMap]]:
    """Six orthogonal maps of the unit disk (identity, rotations, reflections) with inverses."""

    def rot(t):
        return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])

    mats = [np.eye(2), rot(np.pi / 3), rot(-np.pi / 3), rot(np.pi / 2),
            np.array([[1.0, 0.0], [0.0, -1.0]]), np.array([[0.0, 1.0], [1.0, 0.0]])]
    return [(affine_map(A), affine_map(A.T)) for A in mats]


def _cardano(y):
    # real root of x^3 + x - y = 0
    s = sqrt(y * y / 4.0 + 1.0 / 27.0)
    return cbrt(y / 2.0 + s) + cbrt(y / 2.0 - s)


def nonlinear_chart_pair(n_samples: int = 12, seed: int = 0) -> tuple[Chart, Chart]:
    """Identity on (-1, 1) and ``x -> x^3 + x`` onto (-2, 2) with its Cardano inverse."""
    dom = Region.box([-1.0], [1.0], n_samples, seed, name="(-1,1)")
    cod = Region.box([-2.0], [2.0], n_samples, seed + 1, name="(-2,2)")
    cubic = RealMap(1, 1, lambda x: [x[0] ** 3 + x[0]], "x^3+x")
    root = RealMap(1, 1, lambda y: [_cardano(y[0])], "cardano")
    return Chart.identity(dom, "id"), Chart("cubic", dom, cod, cubic, root)


def cube_root_chart_pair(n_samples: int = 12, seed: int = 0) -> tuple[Chart, Chart]:
    """Identity on (-1, 1) and ``x -> x^(1/3)``: homeomorphic but not smoothly compatible."""
    dom = Region.box([-1.0], [1.0], n_samples, seed, name="(-1,1)", extra_points=[[1e-3], [-4e-3]])
    c = RealMap(1, 1, lambda x: [cbrt(x[0])], "cbrt")
    cube = RealMap(1, 1, lambda y: [y[0] ** 3], "cube")
    cod = Region.box([-1.0], [1.0], n_samples, seed + 1, name="(-1,1)'")
    return Chart.identity(dom, "id"), Chart("cbrt", dom, cod, c, cube)


def nonlinear_manifold(n_samples: int = 12, seed: int = 0) -> Manifold:
    return manifold_new(list(nonlinear_chart_pair(n_samples, seed)), name="(-1,1) two charts")


def abs_field(M: Manifold | None = None) -> VectorField:
    """``|x| d/dx`` on the line: continuous but not differentiable at 0."""
    M = M or euclidean_manifold(1)
    return VectorField.from_chart(M, M.charts[0].id, RealMap(1, 1, lambda x: [fabs(x[0])], "|x|"), "|x|d/dx")


def polynomial_field(M: Manifold, polys: list[Polynomial], name: str = "") -> VectorField:
    return VectorField.from_chart(M, M.charts[0].id, polynomial_map(polys), name or f"({', '.join(map(str, polys))})")


def random_polynomial_field(M: Manifold, seed: int, degree: int = 2) -> VectorField:
    rng = np.random.default_rng(seed)
    return polynomial_field(M, [Polynomial.random(M.dim, degree, rng) for _ in range(M.dim)], f"P{seed}")


def positive_field(M: Manifold | None = None) -> VectorField:
    """A fixed polynomial field on the plane: ``(x0^2 - x1, x0 x1 + 1)``."""
    M = M or euclidean_manifold(2)
    x0, x1 = Polynomial.var(2, 0), Polynomial.var(2, 1)
    one = Polynomial.const(2, 1.0)
    return polynomial_field(M, [x0 ** 2 - x1, x0 * x1 + one], "positive")

