from pathlib import Path

import numpy as np
import pytest

from contactcurv.contact import (
    ContactManifold,
    check_axioms,
    contact_frame,
    extract_kappa_mu,
    kmu_ricci,
    kmu_riemann,
    structure_scale,
    verify_structure_identities,
)
from contactcurv.geometry import Chart, covariant_derivative
from contactcurv.harness import load_manifest

FIXTURES = Path(__file__).parent / "fixtures"
rng = np.random.default_rng(11)


def test_gallery_passes_axioms(gallery, gallery_points):
    for name, man in gallery.items():
        rep = check_axioms(man.manifold, gallery_points[name])
        assert rep.passed, (name, [(c.name, c.max_residual) for c in rep.checks if not c.passed])
        assert rep["nabla_xi"].max_residual < 1e-4


def test_non_contact_structure_fails():
    M = ContactManifold.from_strings(
        "euclid", Chart("euclid", ((-1, 1),) * 3), [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]], ["0", "0", "1"]
    )
    rep = check_axioms(M, [(0.1, 0.2, 0.3), (-0.5, 0.5, 0.0)])
    assert not rep.passed
    # phi = g^-1 d(eta) = 0, so phi^2 = -I + eta (x) xi cannot hold
    assert not rep["phi_squared"].passed
    assert rep["phi_squared"].worst_point is not None


def test_sasakian_frame(gallery, gallery_points):
    M = gallery["heisenberg"].manifold
    for p in gallery_points["heisenberg"][:10]:
        assert np.max(np.abs(contact_frame(M, p).h)) < 1e-7


def test_phi_squared_on_vectors(gallery, gallery_points):
    for name, man in gallery.items():
        fr = contact_frame(man.manifold, gallery_points[name][3])
        for X in rng.normal(size=(10, 3)):
            res = fr.phi @ fr.phi @ X + X - (fr.eta @ X) * fr.xi
            assert np.max(np.abs(res)) < 1e-8, name


def test_flat_entry_has_zero_l(gallery, gallery_points):
    M = gallery["flat"].manifold
    for p in gallery_points["flat"][:10]:
        assert np.max(np.abs(contact_frame(M, p).l)) < 1e-7
        km = extract_kappa_mu(M, p)
        assert not km.sasakian
        assert abs(km.kappa) < 1e-6 and abs(km.mu) < 1e-6


def test_sasakian_kappa(gallery, gallery_points):
    M = gallery["heisenberg"].manifold
    for p in gallery_points["heisenberg"][:10]:
        km = extract_kappa_mu(M, p)
        assert km.sasakian and km.mu is None
        assert abs(km.kappa - 1.0) < 1e-6


def test_nonconstant_entry_certificate(gallery, gallery_points):
    M = gallery["kmu_nonconstant"].manifold
    a, b = (extract_kappa_mu(M, p) for p in gallery_points["kmu_nonconstant"][:2])
    assert abs(a.kappa - b.kappa) > 1e-3 and abs(a.mu - b.mu) > 1e-3
    assert a.residual < 1e-6 and b.residual < 1e-6
    assert a.theta == pytest.approx(np.sqrt(1 - a.kappa))


def test_nabla_xi_matches_finite_differences(gallery, gallery_points):
    M = gallery["kmu_nonconstant"].manifold
    p = gallery_points["kmu_nonconstant"][5]
    fd = covariant_derivative(lambda q: contact_frame(M, q).xi, ("u",), p, M.metric).components  # [i, a]
    assert np.max(np.abs(fd.T - contact_frame(M, p).nabla_xi)) < 1e-6


def test_closed_forms_are_consistent():
    # the Ricci closed form is the contraction of the curvature closed form
    k, m, th = 0.36, -0.7, 0.8
    g, eta, xi, h = np.eye(3), np.array([1.0, 0, 0]), np.array([1.0, 0, 0]), np.diag([0, th, -th])
    R = kmu_riemann(g, eta, xi, h, k, m)
    assert np.max(np.abs(np.einsum("iijk->jk", R) - kmu_ricci(g, eta, h, k, m))) < 1e-14


def _identities(gallery, gallery_points, name, n=20):
    return verify_structure_identities(gallery[name].manifold, gallery_points[name][:n])


@pytest.mark.parametrize("name", ["kmu_constant", "su2_mu_zero", "flat"])
def test_constant_entries_satisfy_all_identities(gallery, gallery_points, name):
    rep = _identities(gallery, gallery_points, name)
    assert rep.passed, [(c.name, c.max_residual) for c in rep.checks if not c.passed]


def test_sasakian_identities(gallery, gallery_points):
    rep = _identities(gallery, gallery_points, "heisenberg")
    assert rep.passed
    assert rep["nabla_phi"].max_residual < 1e-4
    assert {c.name for c in rep.checks} == {"h_squared", "nabla_phi", "xi_kappa", "xi_r"}


def test_nonconstant_entry_identities(gallery, gallery_points):
    rep = _identities(gallery, gallery_points, "kmu_nonconstant")
    for name in ("h_squared", "q_phi_commutator", "scalar_curvature", "ricci_xi", "kmu_certificate"):
        assert rep[name].max_residual < 1e-6, name
    for name in ("xi_kappa", "xi_r", "h_grad_mu", "nabla_phi"):
        assert rep[name].max_residual < 1e-4, name
    for name in ("riemann_closed_form", "ricci_closed_form"):
        assert rep[name].max_residual < 1e-5, name


def test_nabla_h_formula_misses_gradient_of_theta(gallery):
    """The constant-coefficient formula for nabla h omits X(theta) on the eigenlines."""
    M = gallery["kmu_nonconstant"].manifold
    p = (0.3, -0.4, 1.5)
    rep = verify_structure_identities(M, [p])
    assert rep["nabla_h"].max_residual > 0.1
    km = extract_kappa_mu(M, p)
    e = km.eigenvector
    fr = contact_frame(M, p)
    nh = covariant_derivative(lambda q: contact_frame(M, q).h, ("u", "d"), p, M.metric).components
    # g((nabla_i h) e, e) = d_i theta for a unit eigenvector e with h e = theta e
    lhs = np.einsum("a,ab,ibc,c->i", e, fr.g, nh, e)
    step = 1e-5
    dtheta = [
        (extract_kappa_mu(M, np.add(p, d)).theta - extract_kappa_mu(M, np.subtract(p, d)).theta) / (2 * step)
        for d in step * np.eye(3)
    ]
    assert np.max(np.abs(lhs - dtheta)) < 1e-6


def test_rescaled_manifest(tmp_path):
    man = load_manifest(FIXTURES / "heisenberg_raw.toml")
    assert man.rescale == pytest.approx(0.5)
    M = man.manifold
    assert structure_scale(M, (0.2, 0.1, 0.0)) == pytest.approx(1.0)
    assert check_axioms(M, [(0.2, 0.1, 0.0), (-0.7, 0.4, 0.5)]).passed
