import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contactcurv.expr import BinOp, Call, DomainError, Neg, Num, Var, evaluate, parse_expr
from contactcurv.jet import MONOMIALS, NCOEF, Jet3, OrderError, eval_jet, jeinsum, jtrace_einsum, partial, stack

MULTI = [m for m in MONOMIALS if sum(m) <= 3]


def fd_partial(e, p, m, h=1e-3):
    """Central-difference mixed partial d^m e at p (tensor product stencil)."""
    p = np.asarray(p, float)
    stencils = {0: ([0.0], [1.0]), 1: ([-1, 1], [-0.5, 0.5]), 2: ([-1, 0, 1], [1, -2, 1]), 3: ([-2, -1, 1, 2], [-0.5, 1, -1, 0.5])}
    total = 0.0
    for (ox, wx), (oy, wy), (oz, wz) in itertools.product(*(zip(*stencils[k]) for k in m)):
        total += wx * wy * wz * evaluate(e, p + h * np.array([ox, oy, oz]))
    return total / h ** sum(m)


def test_monomial_layout():
    assert NCOEF == 20
    assert MONOMIALS[0] == (0, 0, 0)
    assert MONOMIALS[1:4] == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_product_example():
    j = eval_jet(parse_expr("x*y"), (2, 3, 0), 1)
    assert j.value == 6
    assert np.array_equal(j.gradient, [3, 2, 0])


def test_polynomial_example():
    j = eval_jet(parse_expr("z^2"), (0, 0, 5), 2)
    assert partial(j, (0, 0, 0)) == 25
    assert partial(j, (0, 0, 1)) == 10
    assert partial(j, (0, 0, 2)) == 2


def test_exp_taylor_coefficients():
    e = parse_expr("exp(x)")
    j = eval_jet(e, (0, 0, 0), 3)
    for k in range(4):
        assert abs(j.coeffs[MONOMIALS.index((k, 0, 0))] - 1 / math.factorial(k)) < 1e-15
        assert abs(partial(j, (k, 0, 0)) - fd_partial(e, (0, 0, 0), (k, 0, 0))) < 1e-6


def test_partial_examples():
    assert partial(eval_jet(parse_expr("x*y*z"), (1, 1, 1)), (1, 1, 1)) == 1
    seven = eval_jet(parse_expr("7"), (0.4, 0.1, -2))
    assert all(partial(seven, m) == 0 for m in MULTI if m != (0, 0, 0))
    s = eval_jet(parse_expr("sin(x)"), (0.3, 0, 0))
    assert abs(partial(s, (2, 0, 0)) + math.sin(0.3)) < 1e-15
    assert abs(partial(s, (2, 0, 0)) - fd_partial(parse_expr("sin(x)"), (0.3, 0, 0), (2, 0, 0))) < 1e-6


def test_order_tracking():
    j = eval_jet(parse_expr("x^3 + y*z"), (1, 2, 3), 2)
    with pytest.raises(OrderError):
        j.partial((3, 0, 0))
    d = j.derivative(0)
    assert d.order == 1
    assert d.derivative(1).order == 0
    with pytest.raises(OrderError):
        Jet3.constant(1.0, 0).gradient
    assert np.all(j.coeffs[[sum(m) > 2 for m in MONOMIALS]] == 0)


def test_coefficients_read_only():
    j = eval_jet(parse_expr("x"), (1, 2, 3))
    with pytest.raises(ValueError):
        j.coeffs[0] = 5.0


def test_domain_errors_point_at_subexpression():
    with pytest.raises(DomainError) as info:
        eval_jet(parse_expr("x + log(y)"), (1, 0, 0))
    assert info.value.subexpr == parse_expr("log(y)")
    with pytest.raises(DomainError):
        eval_jet(parse_expr("abs(x)"), (0, 1, 1))
    with pytest.raises(DomainError):
        eval_jet(parse_expr("1/x"), (0, 1, 1))
    # abs is fine away from 0 and sqrt is fine at 0 only without derivatives
    assert eval_jet(parse_expr("abs(x)"), (-2, 0, 0)).gradient[0] == -1
    assert eval_jet(parse_expr("sqrt(x)"), (0, 0, 0), 0).value == 0


def test_chain_rule():
    e = parse_expr("sin(exp(x) * y)")
    p = (0.2, 0.7, 0.0)
    j = eval_jet(e, p)
    u = math.exp(0.2) * 0.7
    # d/dx = cos(u) u, d2/dx2 = -sin(u) u^2 + cos(u) u
    assert abs(partial(j, (1, 0, 0)) - math.cos(u) * u) < 1e-14
    assert abs(partial(j, (2, 0, 0)) - (-math.sin(u) * u * u + math.cos(u) * u)) < 1e-14
    assert abs(partial(j, (0, 1, 0)) - math.cos(u) * math.exp(0.2)) < 1e-14


def test_batch_evaluation_matches_pointwise():
    e = parse_expr("x*exp(y) - z^3/(1 + x^2)")
    pts = np.random.default_rng(1).uniform(-1, 1, (5, 3))
    batch = eval_jet(e, pts)
    for i, p in enumerate(pts):
        assert np.allclose(batch[i].coeffs, eval_jet(e, p).coeffs, rtol=0, atol=1e-14)


def test_jeinsum_matrix_product():
    rng = np.random.default_rng(2)
    A = Jet3(rng.normal(size=(3, 3, NCOEF)))
    B = Jet3(rng.normal(size=(3, 3, NCOEF)))
    C = jeinsum("ij,jk->ik", A, B)
    for i in range(3):
        for k in range(3):
            ref = A[i, 0] * B[0, k] + A[i, 1] * B[1, k] + A[i, 2] * B[2, k]
            assert np.allclose(C[i, k].coeffs, ref.coeffs, atol=1e-12)
    T = jtrace_einsum("ii->", A)
    assert np.allclose(T.coeffs, (A[0, 0] + A[1, 1] + A[2, 2]).coeffs)
    with pytest.raises(ValueError):
        jeinsum("iY,jY->ij", A, B)


def test_grad_layout():
    j = eval_jet(parse_expr("x*y^2"), (1, 2, 0))
    g = j.grad()
    assert g.shape == (3,)
    assert np.allclose(g.value, [4, 4, 0])
    assert stack([j, j]).shape == (2,)


# property tests on random smooth expressions -----------------------------

leaves = st.one_of(
    st.sampled_from([Var("x"), Var("y"), Var("z")]),
    st.floats(0.2, 2.0).map(lambda v: Num(round(v, 2))),
)


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from("+-*"), children, children).map(lambda t: BinOp(*t)),
        children.map(Neg),
        st.tuples(st.sampled_from(["sin", "cos"]), children).map(lambda t: Call(*t)),
        children.map(lambda c: Call("exp", BinOp("*", Num(0.3), c))),
        children.map(lambda c: BinOp("/", c, BinOp("+", Num(2.0), BinOp("^", c, Num(2.0))))),
        children.map(lambda c: BinOp("^", c, Num(3.0))),
    )


smooth = st.recursive(leaves, _extend, max_leaves=6)
points = st.tuples(*[st.floats(-0.8, 0.8)] * 3)


@settings(max_examples=200, deadline=None)
@given(smooth, points)
def test_value_matches_plain_evaluation(e, p):
    v = evaluate(e, p)
    assert abs(eval_jet(e, p).value - v) <= 1e-13 * max(1.0, abs(v))


@settings(max_examples=200, deadline=None)
@given(smooth, smooth, points)
def test_product_of_jets_is_jet_of_product(f, g, p):
    lhs = eval_jet(BinOp("*", f, g), p).coeffs
    rhs = (eval_jet(f, p) * eval_jet(g, p)).coeffs
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(smooth, points)
def test_partials_match_finite_differences(e, p):
    j = eval_jet(e, p)
    scale = max(1.0, float(np.max(np.abs(j.coeffs))))
    for m in MULTI:
        fd = fd_partial(e, p, m, h=2e-3 if sum(m) == 3 else 1e-4)
        assert abs(partial(j, m) - fd) < 2e-4 * scale * max(1.0, math.factorial(sum(m)))
