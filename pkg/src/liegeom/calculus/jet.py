"""Truncated multivariate Taylor arithmetic.

A :class:`Jet` holds the Taylor coefficients of a scalar map around a point,
up to a fixed total order, in a fixed number of variables.  Coefficients are
stored per monomial in graded order; derivative tensors are recovered by
multiplying with the multi-index factorials, so they are symmetric by
construction.

Maps written against plain Python arithmetic plus the elementary functions of
this module (``sin``, ``exp``, ...) accept either floats or jets, which is all
forward-mode propagation needs.
"""

from __future__ import annotations

import itertools
import math
import numbers
from functools import lru_cache

import numpy as np

from ..errors import ContractError, EvaluationError, NonDifferentiableError

MAX_ORDER = 4


def _exponents(dim, degree):
    if dim == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in _exponents(dim - 1, degree - first):
            yield (first,) + rest


class JetSpace:
    """Monomial bookkeeping for jets in ``dim`` variables truncated at ``order``."""

    def __init__(self, dim: int, order: int):
        if dim < 1:
            raise ContractError(f"jet space needs at least one variable, got {dim}")
        if order < 0:
            raise ContractError(f"negative jet order {order}")
        self.dim = dim
        self.order = order
        monos = [e for deg in range(order + 1) for e in _exponents(dim, deg)]
        self.monomials = np.array(monos, dtype=np.int64).reshape(len(monos), dim)
        self.size = len(monos)
        self.degrees = self.monomials.sum(axis=1)
        self._radix = (order + 1) ** np.arange(dim, dtype=np.int64)
        self._keys = self.monomials @ self._radix
        self._sorted = np.argsort(self._keys)
        self._sorted_keys = self._keys[self._sorted]
        self.factorials = np.array(
            [math.prod(math.factorial(int(a)) for a in row) for row in self.monomials],
            dtype=float,
        )
        # graded order: monomials of degree <= t occupy a prefix
        upto = np.searchsorted(self.degrees, np.arange(order + 1), side="right")
        rows, cols, dest = [], [], []
        for i in range(self.size):
            m = int(upto[order - self.degrees[i]])
            js = np.arange(m)
            rows.append(np.full(m, i))
            cols.append(js)
            dest.append(self.lookup(self._keys[i] + self._keys[:m]))
        self._mul_i = np.concatenate(rows)
        self._mul_j = np.concatenate(cols)
        self._mul_k = np.concatenate(dest)
        self._tensor_cache = {}

    def __repr__(self):
        return f"JetSpace(dim={self.dim}, order={self.order})"

    def lookup(self, keys):
        return self._sorted[np.searchsorted(self._sorted_keys, keys)]

    def index_of(self, exponent) -> int:
        key = int(np.dot(np.asarray(exponent, dtype=np.int64), self._radix))
        pos = int(np.searchsorted(self._sorted_keys, key))
        if pos >= self.size or self._sorted_keys[pos] != key:
            raise KeyError(exponent)
        return int(self._sorted[pos])

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.bincount(self._mul_k, weights=a[self._mul_i] * b[self._mul_j], minlength=self.size)

    def tensor_layout(self, rank: int):
        """Monomial index and factorial weight for every entry of a rank-``rank`` tensor."""
        if rank not in self._tensor_cache:
            shape = (self.dim,) * rank
            idx = np.empty(shape, dtype=np.int64)
            for multi in itertools.product(range(self.dim), repeat=rank):
                exponent = np.bincount(np.array(multi, dtype=np.int64), minlength=self.dim)
                idx[multi] = self.index_of(exponent)
            self._tensor_cache[rank] = (idx, self.factorials[idx])
        return self._tensor_cache[rank]


@lru_cache(maxsize=None)
def get_space(dim: int, order: int) -> JetSpace:
    return JetSpace(dim, order)


@lru_cache(maxsize=None)
def _lift_tables(dim: int, order: int):
    """Indices of (alpha, 0) and (alpha, 1) in the space with one extra variable and order."""
    small = get_space(dim, order)
    big = get_space(dim + 1, order + 1)
    padded = np.hstack([small.monomials, np.zeros((small.size, 1), dtype=np.int64)])
    keys0 = padded @ big._radix
    keys1 = keys0 + big._radix[-1]
    return big.lookup(keys0), big.lookup(keys1)


@lru_cache(maxsize=None)
def _partial_table(dim: int, order: int, var: int):
    small = get_space(dim, order - 1)
    big = get_space(dim, order)
    shifted = small.monomials.copy()
    shifted[:, var] += 1
    return big.lookup(shifted @ big._radix), shifted[:, var].astype(float)


def _is_number(x) -> bool:
    return isinstance(x, numbers.Real) and not isinstance(x, bool)


class Jet:
    """Truncated Taylor expansion of a scalar quantity around a base point."""

    __slots__ = ("space", "c")
    __array_ufunc__ = None  # numpy scalars must defer to our reflected operators

    def __init__(self, space: JetSpace, coeffs):
        self.space = space
        self.c = np.asarray(coeffs, dtype=float)

    @classmethod
    def constant(cls, value, space: JetSpace) -> "Jet":
        c = np.zeros(space.size)
        c[0] = value
        return cls(space, c)

    @classmethod
    def variable(cls, value, index: int, space: JetSpace) -> "Jet":
        c = np.zeros(space.size)
        c[0] = value
        if space.order >= 1:
            c[1 + index] = 1.0
        return cls(space, c)

    @property
    def value(self) -> float:
        return float(self.c[0])

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def order(self) -> int:
        return self.space.order

    def __repr__(self):
        return f"Jet(value={self.value!r}, dim={self.dim}, order={self.order})"

    # -- derivative access -------------------------------------------------

    def derivative(self, rank: int) -> np.ndarray:
        """The symmetric tensor of rank-``rank`` partial derivatives."""
        if rank > self.order:
            raise ContractError(f"jet of order {self.order} has no rank-{rank} derivatives")
        if rank == 0:
            return np.array(self.c[0])
        idx, fac = self.space.tensor_layout(rank)
        return self.c[idx] * fac

    @property
    def coeffs(self) -> list:
        return [self.derivative(r) for r in range(self.order + 1)]

    def gradient(self) -> np.ndarray:
        return self.derivative(1)

    def hessian(self) -> np.ndarray:
        return self.derivative(2)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.c)))

    def partial(self, var: int) -> "Jet":
        """Jet of the partial derivative along variable ``var`` (one order lower)."""
        if self.order == 0:
            raise ContractError("cannot differentiate an order-0 jet")
        idx, weight = _partial_table(self.dim, self.order, var)
        return Jet(get_space(self.dim, self.order - 1), self.c[idx] * weight)

    # -- arithmetic ----------------------------------------------------------

    def _other(self, other):
        if isinstance(other, Jet):
            if other.space is not self.space:
                raise ContractError(f"mixing jets from {self.space} and {other.space}")
            return other
        return None

    def __add__(self, other):
        if _is_number(other):
            c = self.c.copy()
            c[0] += other
            return Jet(self.space, c)
        o = self._other(other)
        if o is None:
            return NotImplemented
        return Jet(self.space, self.c + o.c)

    __radd__ = __add__

    def __sub__(self, other):
        if _is_number(other):
            c = self.c.copy()
            c[0] -= other
            return Jet(self.space, c)
        o = self._other(other)
        if o is None:
            return NotImplemented
        return Jet(self.space, self.c - o.c)

    def __rsub__(self, other):
        if _is_number(other):
            c = -self.c
            c[0] = other - self.c[0]
            return Jet(self.space, c)
        return NotImplemented

    def __neg__(self):
        return Jet(self.space, -self.c)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if _is_number(other):
            return Jet(self.space, self.c * other)
        o = self._other(other)
        if o is None:
            return NotImplemented
        return Jet(self.space, self.space.mul(self.c, o.c))

    __rmul__ = __mul__

    def _reciprocal(self) -> "Jet":
        a0 = self.value
        if a0 == 0.0:
            raise EvaluationError("division by a jet with zero value")
        derivs = [(-1) ** k * math.factorial(k) / a0 ** (k + 1) for k in range(self.order + 1)]
        return self._series(derivs)

    def __truediv__(self, other):
        if _is_number(other):
            if other == 0:
                raise EvaluationError("division by zero")
            return Jet(self.space, self.c / other)
        o = self._other(other)
        if o is None:
            return NotImplemented
        q = self * o._reciprocal()
        q.c[0] = self.c[0] / o.c[0]
        return q

    def __rtruediv__(self, other):
        if _is_number(other):
            q = self._reciprocal() * other
            q.c[0] = other / self.c[0]
            return q
        return NotImplemented

    def __pow__(self, exponent):
        if not _is_number(exponent):
            return NotImplemented
        a0 = self.value
        if float(exponent).is_integer():
            n = int(exponent)
            if n == 0:
                return Jet.constant(1.0, self.space)
            if n < 0 and a0 == 0.0:
                raise EvaluationError("negative power of a jet with zero value")
            base = self if n > 0 else self._reciprocal()
            out = base
            for _ in range(abs(n) - 1):
                out = out * base
            out.c[0] = self.c[0] ** n
            return out
        return power(self, exponent)

    def __rpow__(self, base):
        if not _is_number(base):
            return NotImplemented
        if base <= 0:
            raise EvaluationError("real power of a non-positive base")
        out = exp(self * math.log(base))
        out.c[0] = base ** self.c[0]
        return out

    def __abs__(self):
        return fabs(self)

    # comparisons act on values so piecewise definitions can branch
    def __lt__(self, other):
        return self.value < value_of(other)

    def __le__(self, other):
        return self.value <= value_of(other)

    def __gt__(self, other):
        return self.value > value_of(other)

    def __ge__(self, other):
        return self.value >= value_of(other)

    def _series(self, derivs) -> "Jet":
        """Compose a univariate map with Taylor data ``derivs`` at the value onto this jet."""
        order = self.order
        delta = self.c.copy()
        delta[0] = 0.0
        out = np.zeros(self.space.size)
        out[0] = derivs[order] / math.factorial(order)
        for k in range(order - 1, -1, -1):
            out = self.space.mul(out, delta)
            out[0] = derivs[k] / math.factorial(k)
        return Jet(self.space, out)


def value_of(x) -> float:
    return x.value if isinstance(x, Jet) else float(x)


def is_jet(x) -> bool:
    return isinstance(x, Jet)


# -- elementary functions ------------------------------------------------------


def sin(x):
    if not isinstance(x, Jet):
        return math.sin(x)
    s, c = math.sin(x.value), math.cos(x.value)
    cycle = (s, c, -s, -c)
    return x._series([cycle[k % 4] for k in range(x.order + 1)])


def cos(x):
    if not isinstance(x, Jet):
        return math.cos(x)
    s, c = math.sin(x.value), math.cos(x.value)
    cycle = (c, -s, -c, s)
    return x._series([cycle[k % 4] for k in range(x.order + 1)])


def exp(x):
    if not isinstance(x, Jet):
        return math.exp(x)
    e = math.exp(x.value)
    return x._series([e] * (x.order + 1))


def log(x):
    if not isinstance(x, Jet):
        if x <= 0:
            raise EvaluationError(f"log of non-positive value {x}")
        return math.log(x)
    a0 = x.value
    if a0 <= 0:
        raise EvaluationError(f"log of non-positive value {a0}")
    derivs = [math.log(a0)] + [
        (-1) ** (k - 1) * math.factorial(k - 1) / a0**k for k in range(1, x.order + 1)
    ]
    return x._series(derivs)


def power(x, p: float):
    """``x ** p`` for real ``p``; the base must be positive unless ``p`` is an integer."""
    if float(p).is_integer():
        return x ** int(p)
    if not isinstance(x, Jet):
        if x < 0 or (x == 0 and p < 0):
            raise EvaluationError(f"{x} ** {p} is not real")
        return x**p
    a0 = x.value
    if a0 < 0:
        raise EvaluationError(f"{a0} ** {p} is not real")
    if a0 == 0:
        if x.order == 0 and p > 0:
            return Jet.constant(0.0, x.space)
        raise NonDifferentiableError(f"x ** {p} is not differentiable at 0")
    derivs, falling = [], 1.0
    for k in range(x.order + 1):
        derivs.append(falling * a0 ** (p - k))
        falling *= p - k
    return x._series(derivs)


def sqrt(x):
    if not isinstance(x, Jet):
        if x < 0:
            raise EvaluationError(f"sqrt of negative value {x}")
        return math.sqrt(x)
    out = power(x, 0.5)
    out.c[0] = math.sqrt(x.value)
    return out


def _cbrt_float(a: float) -> float:
    return math.copysign(abs(a) ** (1.0 / 3.0), a)


def cbrt(x):
    """Real cube root, defined for negative arguments too."""
    if not isinstance(x, Jet):
        return _cbrt_float(x)
    a0 = x.value
    r = _cbrt_float(a0)
    if x.order == 0:
        return Jet.constant(r, x.space)
    if a0 == 0.0:
        raise NonDifferentiableError("cube root is not differentiable at 0")
    derivs, falling = [], 1.0
    for k in range(x.order + 1):
        derivs.append(falling * r / a0**k)
        falling *= 1.0 / 3.0 - k
    return x._series(derivs)


def fabs(x):
    if not isinstance(x, Jet):
        return abs(x)
    a0 = x.value
    if a0 == 0.0:
        if x.order == 0:
            return Jet.constant(0.0, x.space)
        raise NonDifferentiableError("|x| is not differentiable at 0")
    return x if a0 > 0 else -x


# -- lifting and directional derivatives ------------------------------------------


def common_space(values):
    space = None
    for v in values:
        if isinstance(v, Jet):
            if space is None:
                space = v.space
            elif v.space is not space:
                raise ContractError(f"mixing jets from {space} and {v.space}")
    return space


def directional_derivative(fn, x, direction):
    """``D fn(x)[direction]`` for a function on lists of scalars.

    ``x`` and ``direction`` may hold floats or jets of one shared space; the
    result then carries jets of that same space (derivative data of the
    directional derivative itself).  ``fn`` must not close over jets: every
    jet-valued input has to arrive through ``x`` (with zero direction if it
    is not to be differentiated).
    """
    if len(x) != len(direction):
        raise ContractError(f"point has {len(x)} coordinates, direction has {len(direction)}")
    space = common_space(list(x) + list(direction))
    if space is None:
        big = get_space(1, 1)
        lift = lambda v: Jet.constant(v, big)  # noqa: E731
    else:
        big = get_space(space.dim + 1, space.order + 1)
        idx0, idx1 = _lift_tables(space.dim, space.order)

        def lift(v):
            if isinstance(v, Jet):
                c = np.zeros(big.size)
                c[idx0] = v.c
                return Jet(big, c)
            return Jet.constant(v, big)

    s = Jet.variable(0.0, big.dim - 1, big)
    z = []
    for xi, di in zip(x, direction):
        if _is_number(di) and di == 0:
            z.append(lift(xi))
        else:
            z.append(lift(xi) + s * lift(di))
    out = fn(z)
    result = []
    for o in out:
        if not isinstance(o, Jet):
            result.append(0.0 if space is None else Jet.constant(0.0, space))
        elif space is None:
            result.append(float(o.c[1]))
        else:
            result.append(Jet(space, o.c[idx1]))
    return result
