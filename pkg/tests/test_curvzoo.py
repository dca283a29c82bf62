import numpy as np
import pytest

from contactcurv.algmodel import ModelPoint, draw_model_points, model_curvature, printed_ws_form
from contactcurv.contact import contact_frame, extract_kappa_mu
from contactcurv.curvzoo import (
    CurvatureContext,
    CurvaturePreset,
    conharmonic_closed_form,
    derive_on_curvature,
    derive_on_ricci,
    preset_coefficients,
    w_tilde,
    w_tilde_kmu_closed_form,
    xi_slice_closed_form,
    xi_xi_slice_closed_form,
)

rng = np.random.default_rng(3)


def test_preset_examples():
    assert preset_coefficients("conharmonic", 1, 17.0) == (-1.0, -1.0, 0.0)
    assert preset_coefficients("conformal", 1, 4.0) == (-1.0, -1.0, 2.0)
    assert preset_coefficients("riemann", 3, 2.0) == (0.0, 0.0, 0.0)
    assert preset_coefficients("concircular", 1, 6.0) == (0.0, 0.0, -1.0)
    assert preset_coefficients("projective", 1) == (-0.5, 0.0, 0.0)
    assert preset_coefficients("m_projective", 1) == (-0.25, -0.25, 0.0)
    assert preset_coefficients("w1", 1) == (0.5, 0.0, 0.0)
    assert preset_coefficients("w2", 1) == (0.0, -0.5, 0.0)
    assert preset_coefficients("w4", 1) == (0.0, 0.0, -0.5)
    assert preset_coefficients("w4", 2, reading="literal") == (0.0, 0.0, -1.0)
    with pytest.raises(ValueError):
        preset_coefficients("w1", 1, reading="literal")
    with pytest.raises(ValueError):
        preset_coefficients("weyl")
    assert CurvaturePreset.explicit(1, 2, 3).label == "abc(1,2,3)"


def _contexts(gallery, gallery_points, name, n=10):
    M = gallery[name].manifold
    out = []
    for p in gallery_points[name][:n]:
        out.append((CurvatureContext.from_frame(contact_frame(M, p)), extract_kappa_mu(M, p)))
    return out


def test_riemann_preset_is_r(gallery, gallery_points):
    for ctx, _ in _contexts(gallery, gallery_points, "kmu_nonconstant", 3):
        assert np.array_equal(w_tilde(ctx, "riemann").components, ctx.R)


@pytest.mark.parametrize("name", ["kmu_nonconstant", "kmu_constant", "su2_mu_zero"])
def test_conharmonic_closed_form(gallery, gallery_points, name):
    for ctx, km in _contexts(gallery, gallery_points, name):
        H = w_tilde(ctx, "conharmonic").components
        assert np.max(np.abs(H - conharmonic_closed_form(ctx, km.kappa, km.mu).components)) < 1e-6


def test_conformal_vanishes_on_gallery(gallery, gallery_points):
    for name in gallery:
        for ctx, _ in _contexts(gallery, gallery_points, name, 50):
            assert w_tilde(ctx, "conformal").max_abs() < 1e-6, name


def test_kmu_closed_form_on_certified_contexts(gallery, gallery_points):
    for ctx, km in _contexts(gallery, gallery_points, "kmu_nonconstant", 5):
        for a, b, c in rng.uniform(-2, 2, (20, 3)):
            W = w_tilde(ctx, CurvaturePreset.explicit(a, b, c)).components
            closed = w_tilde_kmu_closed_form(ctx, a, b, c, km.kappa, km.mu).components
            assert np.max(np.abs(W - closed)) < 1e-6


def test_xi_slices_on_model():
    for mp in draw_model_points(50, seed=5):
        ctx = model_curvature(mp)
        a, b, c = mp.abc
        W = w_tilde(ctx, CurvaturePreset.explicit(a, b, c)).components
        T = np.einsum("lijk,i->ljk", W, ctx.xi)
        assert np.max(np.abs(T - xi_slice_closed_form(ctx, a, b, c, mp.kappa, mp.mu))) < 1e-9
        TT = np.einsum("ljk,k->lj", T, ctx.xi)
        assert np.max(np.abs(TT - xi_xi_slice_closed_form(ctx, a, b, c, mp.kappa, mp.mu))) < 1e-9


def _derivation_loops(A, B):
    out = np.zeros((3,) * 6)
    for a, x, y, u, v, z in np.ndindex(*(3,) * 6):
        s = 0.0
        for m in range(3):
            s += A[a, x, y, m] * B[m, u, v, z]
            s -= B[a, m, v, z] * A[m, x, y, u]
            s -= B[a, u, m, z] * A[m, x, y, v]
            s -= B[a, u, v, m] * A[m, x, y, z]
        out[a, x, y, u, v, z] = s
    return out


def test_derivation_against_loops(gallery, gallery_points):
    ctx, _ = _contexts(gallery, gallery_points, "kmu_nonconstant", 1)[0]
    W = w_tilde(ctx, "m_projective").components
    assert np.max(np.abs(derive_on_curvature(W, ctx.R) - _derivation_loops(W, ctx.R))) < 1e-12


def test_flat_derivations_vanish(gallery, gallery_points):
    for ctx, _ in _contexts(gallery, gallery_points, "flat", 5):
        assert np.max(np.abs(derive_on_curvature(ctx.R, ctx.R))) < 1e-30
        assert np.max(np.abs(derive_on_ricci(ctx.R, ctx.S))) < 1e-30


def test_curvature_annihilates_metric(gallery, gallery_points):
    for name in ("kmu_nonconstant", "heisenberg", "su2_mu_zero"):
        for ctx, _ in _contexts(gallery, gallery_points, name, 5):
            assert np.max(np.abs(derive_on_ricci(ctx.R, ctx.g))) < 1e-9
            c = 2.7
            A = ctx.R
            expect = -c * (np.einsum("mv,mxyu->xyuv", ctx.g, A) + np.einsum("um,mxyv->xyuv", ctx.g, A))
            assert np.max(np.abs(derive_on_ricci(A, c * ctx.g) - expect)) < 1e-12


def test_ricci_derivation_matches_expanded_form():
    for mp in draw_model_points(50, seed=9):
        ctx = model_curvature(mp)
        W = w_tilde(ctx, mp.abc).components
        D = derive_on_ricci(W, ctx.S)[0]  # X = xi
        assert np.max(np.abs(D + printed_ws_form(mp))) < 1e-10


@pytest.mark.xfail(strict=True, reason="W(conharmonic) is -kappa X^Y at mu = 0, which does not annihilate R (see ledger)")
def test_conharmonic_annihilates_r_at_mu_zero(gallery, gallery_points):
    for ctx, _ in _contexts(gallery, gallery_points, "su2_mu_zero", 5):
        H = w_tilde(ctx, "conharmonic").components
        assert np.max(np.abs(derive_on_curvature(H, ctx.R))) < 1e-5


def test_conharmonic_action_at_mu_zero_is_2_kappa_squared():
    for k in (0.3, 0.75, -1.0):
        ctx = model_curvature(ModelPoint(k, 0.0))
        H = w_tilde(ctx, "conharmonic").components
        assert np.max(np.abs(derive_on_curvature(H, ctx.R))) == pytest.approx(2 * k * k, rel=1e-12)
