import numpy as np
import pytest

from contactcurv.contact import contact_frame, extract_kappa_mu
from contactcurv.expr import parse_expr
from contactcurv.geometry import (
    Chart,
    MetricField,
    SingularMetricError,
    TensorValue,
    christoffel,
    contract,
    covariant_derivative,
    inverse3,
    lower_index,
    raise_index,
    ricci_scalar,
    riemann,
)

IDENTITY = MetricField.from_strings([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]])
POLAR_LIKE = MetricField.from_strings([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "z^2"]])
CONSTANT = MetricField.from_strings([["2.5", "0", "0"], ["0", "2.5", "0"], ["0", "0", "2.5"]])

rng = np.random.default_rng(7)


def test_chart_rejects_degenerate_interval():
    with pytest.raises(ValueError):
        Chart("bad", ((0.0, 1.0), (1.0, 1.0), (0.0, 1.0)))
    with pytest.raises(ValueError):
        Chart("bad", ((0.0, 1.0), (2.0, 1.0), (0.0, 1.0)))


def test_locus_distance():
    c = Chart("c", ((-1, 1),) * 3, (parse_expr("z"),))
    assert c.locus_distance((0.1, 0.2, 0.25)) == pytest.approx(0.25)
    assert Chart("free", ((-1, 1),) * 3).locus_distance((0, 0, 0)) == np.inf


@pytest.mark.parametrize("m", [IDENTITY, CONSTANT])
def test_flat_christoffel_and_curvature(m):
    p = rng.uniform(-1, 1, 3)
    assert christoffel(m, p).max_abs() == 0
    R, Rlow = riemann(m, p)
    assert R.max_abs() == 0 and Rlow.max_abs() == 0
    S, r = ricci_scalar(m, p)
    assert S.max_abs() == 0 and r == 0


def test_christoffel_hand_value():
    G = christoffel(POLAR_LIKE, (0, 0, 2)).components.copy()
    assert G[2, 2, 2] == pytest.approx(0.5, abs=1e-15)
    G[2, 2, 2] = 0
    assert np.max(np.abs(G)) == 0


def test_flat_in_disguise():
    R, _ = riemann(POLAR_LIKE, (0.3, -0.1, 1.7))
    assert R.max_abs() < 1e-14


def test_round_sphere_curvature():
    # unit 2-sphere times a line: sectional curvature 1 on the sphere factor
    m = MetricField.from_strings([["1", "0", "0"], ["0", "sin(x)^2", "0"], ["0", "0", "1"]])
    p = (0.9, 0.2, 0.0)
    _, Rlow = riemann(m, p)
    g = m.value(p)
    K = Rlow.components[0, 1, 1, 0] / (g[0, 0] * g[1, 1])
    assert K == pytest.approx(1.0, abs=1e-12)
    S, r = ricci_scalar(m, p)
    assert r == pytest.approx(2.0, abs=1e-12)


def test_curvature_symmetries_on_gallery(gallery):
    for name, man in gallery.items():
        M = man.manifold
        pts = rng.uniform(M.chart.lower, M.chart.upper, (20, 3))
        for p in pts:
            if M.chart.locus_distance(p) < 1e-3:
                continue
            Rl = riemann(M.metric, p)[1].components
            assert np.max(np.abs(Rl + Rl.transpose(1, 0, 2, 3))) < 1e-9, name
            assert np.max(np.abs(Rl + Rl.transpose(0, 1, 3, 2))) < 1e-9, name
            assert np.max(np.abs(Rl - Rl.transpose(2, 3, 0, 1))) < 1e-9, name
            # first Bianchi identity
            b = Rl + Rl.transpose(1, 2, 0, 3) + Rl.transpose(2, 0, 1, 3)
            assert np.max(np.abs(b)) < 1e-9, name


def test_scalar_curvature_and_ricci_xi_on_nonconstant_entry(gallery, gallery_points):
    M = gallery["kmu_nonconstant"].manifold
    for p in gallery_points["kmu_nonconstant"][:10]:
        km = extract_kappa_mu(M, p)
        fr = contact_frame(M, p)
        S, r = ricci_scalar(M.metric, p)
        assert abs(r - 2 * (km.kappa - km.mu)) < 1e-6
        for U in rng.normal(size=(10, 3)):
            assert abs(U @ S.components @ fr.xi - 2 * km.kappa * fr.eta @ U) < 1e-6


def test_metric_is_parallel(gallery):
    for name, man in gallery.items():
        M = man.manifold
        pts = [p for p in rng.uniform(M.chart.lower, M.chart.upper, (20, 3)) if M.chart.locus_distance(p) > 1e-3]
        for p in pts:
            ng = covariant_derivative(M.metric.value, ("d", "d"), p, M.metric)
            assert ng.max_abs() < 1e-5, name


def test_constant_field_on_flat_metric():
    T = rng.normal(size=(3, 3))
    out = covariant_derivative(lambda q: T, ("u", "d"), (0.1, 0.2, 0.3), IDENTITY)
    assert out.signature == ("d", "u", "d")
    assert out.max_abs() < 1e-9


def test_phi_parallel_formula_on_sasakian_entry(gallery, gallery_points):
    M = gallery["heisenberg"].manifold
    for p in gallery_points["heisenberg"][:5]:
        fr = contact_frame(M, p)
        nphi = covariant_derivative(lambda q: contact_frame(M, q).phi, ("u", "d"), p, M.metric).components
        for X, Y in rng.normal(size=(5, 2, 3)):
            lhs = np.einsum("i,iaj,j->a", X, nphi, Y)
            rhs = (X @ fr.g @ Y) * fr.xi - (fr.eta @ Y) * X
            assert np.max(np.abs(lhs - rhs)) < 1e-4


def test_contraction_and_index_gymnastics(gallery, gallery_points):
    I = TensorValue((0, 0, 0), ("u", "d"), np.eye(3))
    assert float(contract(I, 0, 1).components) == 3.0
    with pytest.raises(ValueError):
        contract(TensorValue((0, 0, 0), ("d", "d"), np.eye(3)), 0, 1)
    for name, man in gallery.items():
        fr = contact_frame(man.manifold, gallery_points[name][0])
        h = TensorValue(fr.point, ("u", "d"), fr.h, fr.g)
        assert abs(float(contract(h, 0, 1).components)) < 1e-8
    g = gallery["kmu_nonconstant"].manifold.metric.value(gallery_points["kmu_nonconstant"][0])
    T = TensorValue((0, 0, 0), ("d", "u", "d"), rng.normal(size=(3, 3, 3)), g)
    back = lower_index(raise_index(T, 0), 0)
    assert np.max(np.abs(back.components - T.components)) < 1e-12
    assert back.signature == T.signature
    with pytest.raises(ValueError):
        raise_index(T, 1)


def test_tensor_value_validates_shape():
    with pytest.raises(ValueError):
        TensorValue((0, 0, 0), ("u", "d"), np.zeros((3, 3, 3)))


def test_singular_metric():
    with pytest.raises(SingularMetricError):
        inverse3(np.diag([1.0, 1.0, 0.0]))


def test_metric_field_checks():
    assert POLAR_LIKE.is_positive_definite((0, 0, 1))
    assert not POLAR_LIKE.is_positive_definite((0, 0, 0))
    skew = MetricField.from_strings([["1", "x", "0"], ["0", "1", "0"], ["0", "0", "1"]])
    assert skew.symmetry_residual((0.5, 0, 0)) == 0.5
