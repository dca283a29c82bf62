"""Truncated multivariate Taylor jets (degree <= 3 in three variables).

A :class:`Jet3` stores the 20 Taylor coefficients of a function at a point,
in graded lexicographic monomial order, along a trailing axis.  Leading axes
are free, so a ``(3, 3)``-shaped jet is a matrix of jets and the arithmetic
broadcasts like numpy.  Products are truncated at degree 3, which makes them
exact for every coefficient that is kept.

Differentiating a jet drops its ``order`` by one: the top-degree coefficients
of the derivative are unknown and are zeroed.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .expr import (
    BinOp,
    Call,
    DomainError,
    Expr,
    Neg,
    Num,
    Var,
    VARIABLES,
    integer_exponent,
)

__all__ = [
    "MONOMIALS",
    "NCOEF",
    "Jet3",
    "OrderError",
    "eval_jet",
    "partial",
    "jeinsum",
    "stack",
]

MAX_ORDER = 3

MONOMIALS: tuple[tuple[int, int, int], ...] = tuple(
    m
    for d in range(MAX_ORDER + 1)
    for m in sorted(
        (m for m in itertools.product(range(d + 1), repeat=3) if sum(m) == d),
        reverse=True,
    )
)
NCOEF = len(MONOMIALS)
_INDEX = {m: i for i, m in enumerate(MONOMIALS)}
_DEGREE = np.array([sum(m) for m in MONOMIALS])
_FACTORIAL_WEIGHT = np.array([math.prod(math.factorial(k) for k in m) for m in MONOMIALS], float)


def _product_matrix() -> np.ndarray:
    P = np.zeros((NCOEF * NCOEF, NCOEF))
    for i, a in enumerate(MONOMIALS):
        for j, b in enumerate(MONOMIALS):
            m = (a[0] + b[0], a[1] + b[1], a[2] + b[2])
            if sum(m) <= MAX_ORDER:
                P[i * NCOEF + j, _INDEX[m]] = 1.0
    return P


_PRODUCT = _product_matrix()


def _derivative_maps():
    maps = []
    for axis in range(3):
        tgt, src, fac = [], [], []
        for k, m in enumerate(MONOMIALS):
            if sum(m) == MAX_ORDER:
                continue
            up = list(m)
            up[axis] += 1
            tgt.append(k)
            src.append(_INDEX[tuple(up)])
            fac.append(up[axis])
        maps.append((np.array(tgt), np.array(src), np.array(fac, float)))
    return maps


_DERIVATIVE = _derivative_maps()
_MASKS = [(_DEGREE <= k).astype(float) for k in range(MAX_ORDER + 1)]


class OrderError(ValueError):
    """A derivative was requested beyond the order the jet was computed to."""


class Jet3:
    """Array of truncated Taylor expansions.

    ``coeffs`` has shape ``shape + (20,)``; coefficients of degree above
    ``order`` are always zero.
    """

    __slots__ = ("coeffs", "order")
    __array_priority__ = 100  # keep ndarray * Jet3 routed to Jet3.__rmul__

    def __init__(self, coeffs, order: int = MAX_ORDER):
        coeffs = np.array(coeffs, dtype=float)
        if coeffs.ndim == 0 or coeffs.shape[-1] != NCOEF:
            raise ValueError(f"jet coefficients need a trailing axis of length {NCOEF}")
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"jet order must be in 0..{MAX_ORDER}")
        if order < MAX_ORDER:
            coeffs = coeffs * _MASKS[order]
        coeffs.flags.writeable = False
        self.coeffs = coeffs
        self.order = order

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, value, order: int = MAX_ORDER) -> "Jet3":
        value = np.asarray(value, dtype=float)
        c = np.zeros(value.shape + (NCOEF,))
        c[..., 0] = value
        return cls(c, order)

    @classmethod
    def variable(cls, axis: int, value, order: int = MAX_ORDER) -> "Jet3":
        value = np.asarray(value, dtype=float)
        c = np.zeros(value.shape + (NCOEF,))
        c[..., 0] = value
        if order >= 1:
            c[..., 1 + axis] = 1.0
        return cls(c, order)

    # array-like surface ------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[:-1]

    @property
    def value(self) -> np.ndarray:
        return self.coeffs[..., 0]

    @property
    def gradient(self) -> np.ndarray:
        """First partials along a new trailing axis of length 3."""
        if self.order < 1:
            raise OrderError("jet of order 0 has no gradient")
        return self.coeffs[..., 1:4]

    def __getitem__(self, idx) -> "Jet3":
        if not isinstance(idx, tuple):
            idx = (idx,)
        if any(i is Ellipsis for i in idx):
            raise IndexError("Ellipsis indexing is not supported on jets")
        return Jet3(self.coeffs[idx], self.order)

    def __len__(self) -> int:
        return self.shape[0]

    def transpose(self, *axes) -> "Jet3":
        n = len(self.shape)
        axes = tuple(axes) if axes else tuple(reversed(range(n)))
        return Jet3(np.transpose(self.coeffs, axes + (n,)), self.order)

    def reshape(self, *shape) -> "Jet3":
        return Jet3(self.coeffs.reshape(tuple(shape) + (NCOEF,)), self.order)

    def truncate(self, order: int) -> "Jet3":
        return Jet3(self.coeffs, min(order, self.order))

    def __repr__(self) -> str:
        return f"Jet3(shape={self.shape}, order={self.order}, value={self.value!r})"

    # arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "Jet3":
        if isinstance(other, Jet3):
            return other
        return Jet3.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        return Jet3(self.coeffs + other.coeffs, min(self.order, other.order))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return Jet3(self.coeffs - other.coeffs, min(self.order, other.order))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Jet3(-self.coeffs, self.order)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, Jet3):
            other = np.asarray(other, dtype=float)
            return Jet3(self.coeffs * other[..., None], self.order)
        a, b = self.coeffs, other.coeffs
        outer = a[..., :, None] * b[..., None, :]
        prod = outer.reshape(outer.shape[:-2] + (NCOEF * NCOEF,)) @ _PRODUCT
        return Jet3(prod, min(self.order, other.order))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet3):
            other = np.asarray(other, dtype=float)
            return Jet3(self.coeffs / other[..., None], self.order)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, n):
        if isinstance(n, (int, np.integer)):
            return self.ipow(int(n))
        return self.rpow(float(n))

    def ipow(self, n: int) -> "Jet3":
        if n < 0:
            return self.reciprocal().ipow(-n)
        result = Jet3.constant(np.ones(self.shape), self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def rpow(self, p: float) -> "Jet3":
        x = self.value
        if np.any(x <= 0.0):
            raise ValueError("real power of a nonpositive base")
        derivs = [x**p, p * x ** (p - 1), p * (p - 1) * x ** (p - 2), p * (p - 1) * (p - 2) * x ** (p - 3)]
        return self.compose(derivs)

    def reciprocal(self) -> "Jet3":
        x = self.value
        if np.any(x == 0.0):
            raise ZeroDivisionError("reciprocal of a jet with zero value")
        inv = 1.0 / x
        return self.compose([inv, -inv**2, 2 * inv**3, -6 * inv**4])

    def compose(self, derivs) -> "Jet3":
        """Apply a scalar function given its derivatives ``f, f', f'', f'''`` at the value."""
        delta = Jet3(self.coeffs - Jet3.constant(self.value).coeffs, self.order)
        out = Jet3.constant(derivs[0], self.order)
        power = None
        for k in range(1, self.order + 1):
            power = delta if power is None else power * delta
            out = out + power * (np.asarray(derivs[k]) / math.factorial(k))
        return out

    # calculus ----------------------------------------------------------
    def derivative(self, axis: int) -> "Jet3":
        if self.order < 1:
            raise OrderError("cannot differentiate a jet of order 0")
        tgt, src, fac = _DERIVATIVE[axis]
        c = np.zeros_like(self.coeffs)
        c[..., tgt] = self.coeffs[..., src] * fac
        return Jet3(c, self.order - 1)

    def grad(self) -> "Jet3":
        """Jet of the gradient, with the derivative index as a new leading axis."""
        return stack([self.derivative(k) for k in range(3)])

    def partial(self, multi_index) -> np.ndarray:
        multi_index = tuple(int(k) for k in multi_index)
        if len(multi_index) != 3 or min(multi_index) < 0:
            raise ValueError("multi-index must be three nonnegative integers")
        degree = sum(multi_index)
        if degree > self.order:
            raise OrderError(f"jet of order {self.order} cannot supply a degree-{degree} partial")
        k = _INDEX[multi_index]
        return self.coeffs[..., k] * _FACTORIAL_WEIGHT[k]


def partial(j: Jet3, multi_index) -> float | np.ndarray:
    """Mixed partial derivative ``d^(i+j+k) / dx^i dy^j dz^k`` of a jet."""
    out = j.partial(multi_index)
    return float(out) if np.ndim(out) == 0 else out


def stack(jets, axis: int = 0) -> Jet3:
    jets = list(jets)
    order = min(j.order for j in jets)
    if axis < 0:
        axis += len(jets[0].shape) + 1
    return Jet3(np.stack([j.coeffs for j in jets], axis=axis), order)


_SPARE = "YZ"


def jeinsum(subscripts: str, a: Jet3, b: Jet3) -> Jet3:
    """Two-operand einsum in which the scalar products are jet products.

    Subscripts use lowercase letters only, e.g. ``jeinsum("kl,ijl->kij", ginv, A)``.
    """
    inputs, output = subscripts.replace(" ", "").split("->")
    sa, sb = inputs.split(",")
    if any(c in _SPARE for c in subscripts):
        raise ValueError("uppercase Y and Z are reserved in jeinsum subscripts")
    outer = np.einsum(f"{sa}Y,{sb}Z->{output}YZ", a.coeffs, b.coeffs)
    prod = outer.reshape(outer.shape[:-2] + (NCOEF * NCOEF,)) @ _PRODUCT
    return Jet3(prod, min(a.order, b.order))


def jtrace_einsum(subscripts: str, a: Jet3) -> Jet3:
    """Single-operand linear einsum (traces, transposes) acting on the leading axes."""
    inputs, output = subscripts.replace(" ", "").split("->")
    return Jet3(np.einsum(f"{inputs}Y->{output}Y", a.coeffs), a.order)


# --------------------------------------------------------------------------
# expression evaluation

_FUNC_DERIVS = {
    "sin": lambda x: (np.sin(x), np.cos(x), -np.sin(x), -np.cos(x)),
    "cos": lambda x: (np.cos(x), -np.sin(x), -np.cos(x), np.sin(x)),
    "exp": lambda x: (np.exp(x),) * 4,
    "log": lambda x: (np.log(x), 1 / x, -1 / x**2, 2 / x**3),
    "sqrt": lambda x: (np.sqrt(x), 0.5 / np.sqrt(x), -0.25 * x**-1.5, 0.375 * x**-2.5),
}


def _tan_derivs(x):
    t = np.tan(x)
    s = 1 + t * t
    return t, s, 2 * t * s, 2 * s * (1 + 3 * t * t)


def _apply(func: str, a: Jet3, node: Expr) -> Jet3:
    x = a.value
    differentiable = a.order >= 1
    if func == "log" and np.any(x <= 0.0):
        raise DomainError("log of a nonpositive value", node)
    if func == "sqrt" and (np.any(x < 0.0) or (differentiable and np.any(x == 0.0))):
        raise DomainError("sqrt outside its (differentiable) domain", node)
    if func == "abs":
        if differentiable and np.any(x == 0.0):
            raise DomainError("abs is not differentiable at 0", node)
        return a * np.sign(x) if differentiable else Jet3.constant(np.abs(x), 0)
    if func == "tan":
        if np.any(np.abs(np.cos(x)) < 1e-300):
            raise DomainError("tan at a pole", node)
        return a.compose(_tan_derivs(x))
    if not differentiable:
        return Jet3.constant(getattr(np, func)(x), 0)  # sin, cos, exp, log, sqrt
    return a.compose(_FUNC_DERIVS[func](x))


def _eval(e: Expr, variables: list[Jet3]) -> Jet3:
    if isinstance(e, Num):
        return Jet3.constant(np.full(variables[0].shape, e.value), variables[0].order)
    if isinstance(e, Var):
        return variables[VARIABLES.index(e.name)]
    if isinstance(e, Neg):
        return -_eval(e.operand, variables)
    if isinstance(e, BinOp):
        left = _eval(e.left, variables)
        if e.op == "^":
            n = integer_exponent(e.right)
            if n is not None:
                if n < 0 and np.any(left.value == 0.0):
                    raise DomainError("division by zero", e)
                return left.ipow(n)
            right = _eval(e.right, variables)
            if np.any(left.value <= 0.0):
                raise DomainError("real power of a nonpositive base", e)
            return _apply("exp", right * _apply("log", left, e), e)
        right = _eval(e.right, variables)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        if np.any(right.value == 0.0):
            raise DomainError("division by zero", e)
        return left / right
    return _apply(e.func, _eval(e.arg, variables), e)


def eval_jet(e: Expr, p, order: int = MAX_ORDER) -> Jet3:
    """Taylor expansion of ``e`` at ``p`` up to ``order``.

    ``p`` may be a single point of shape ``(3,)`` or a batch ``(..., 3)``; the
    jet then has the batch shape.
    """
    if order not in range(MAX_ORDER + 1):
        raise ValueError(f"order must be one of 0..{MAX_ORDER}")
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3:
        raise ValueError("points must have three coordinates")
    variables = [Jet3.variable(k, p[..., k], order) for k in range(3)]
    return _eval(e, variables)

