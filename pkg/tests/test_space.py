import numpy as np
import pytest

from fracsplap import DomainSpec, build_space, project
from fracsplap.space import NoiseTruncation, coefficients, l2_norm, lp_norm, lp_norm_nodal


def test_single_hat_normalized(unit_domain):
    space = build_space(unit_domain, m=1, n_modes=1)
    h1 = space.h_basis[:, 0]
    assert h1.shape == (1,)
    assert h1[0] == pytest.approx(1.0 / np.sqrt(2.0 * space.h / 3.0))
    assert l2_norm(space, h1) == pytest.approx(1.0, abs=1e-13)


def test_orthonormality_m64(unit_domain):
    space = build_space(unit_domain, m=64, n_modes=16)
    gram = space.h_basis.T @ space.mass_matrix @ space.h_basis
    assert np.max(np.abs(gram - np.eye(16))) < 1e-10


def test_mass_matrix_spd(space16):
    eigvals = np.linalg.eigvalsh(space16.mass_matrix)
    assert np.all(eigvals > 0)
    assert np.max(np.abs(space16.mass_matrix - space16.mass_matrix.T)) == 0.0


def test_basis_vanishes_at_boundary(space16):
    # hats live on interior nodes; the padded vector pins the endpoints to zero
    vbar = space16.pad(space16.h_basis[:, 3])
    assert vbar[0] == 0.0 and vbar[-1] == 0.0


def test_build_space_rejects_bad_dims(unit_domain):
    with pytest.raises(ValueError):
        build_space(unit_domain, m=4, n_modes=5)
    with pytest.raises(ValueError):
        build_space(unit_domain, m=0, n_modes=1)


def test_projection_idempotent_and_identity_on_span(space16):
    rng = np.random.default_rng(0)
    z = rng.standard_normal(8)
    v = space16.h_basis[:, :8] @ z
    assert np.max(np.abs(project(space16, v, 8) - v)) < 1e-12
    pv = project(space16, rng.standard_normal(16), 8)
    assert np.max(np.abs(project(space16, pv, 8) - pv)) < 1e-12


def test_projection_kills_orthogonal_complement(space16):
    v = space16.h_basis[:, 10]  # orthogonal to span{h_1..h_8}
    assert np.max(np.abs(project(space16, v, 8))) < 1e-12


def test_projection_pythagoras_and_contraction(space16):
    rng = np.random.default_rng(1)
    for _ in range(20):
        v = rng.standard_normal(16)
        pv = project(space16, v, 8)
        n2 = l2_norm(space16, v) ** 2
        split = l2_norm(space16, pv) ** 2 + l2_norm(space16, v - pv) ** 2
        assert abs(n2 - split) < 1e-9
        assert l2_norm(space16, pv) <= l2_norm(space16, v) + 1e-12


def test_projection_self_adjoint(space16):
    rng = np.random.default_rng(2)
    M = space16.mass_matrix
    for _ in range(20):
        u = rng.standard_normal(16)
        v = rng.standard_normal(16)
        lhs = project(space16, u, 8) @ (M @ v)
        rhs = u @ (M @ project(space16, v, 8))
        assert abs(lhs - rhs) < 1e-10


def test_norm_contraction_bulk(space16):
    rng = np.random.default_rng(3)
    V = rng.standard_normal((10_000, 16))
    M = space16.mass_matrix
    H8 = space16.h_basis[:, :8]
    PV = V @ (M @ H8) @ H8.T
    norms = np.einsum("ij,jk,ik->i", V, M, V)
    pnorms = np.einsum("ij,jk,ik->i", PV, M, PV)
    assert np.all(pnorms <= norms + 1e-10)


def test_projection_rank_bounds(space16):
    with pytest.raises(ValueError):
        project(space16, np.zeros(16), 17)
    with pytest.raises(ValueError):
        project(space16, np.zeros(16), 0)


def test_coefficients_roundtrip(space16):
    rng = np.random.default_rng(4)
    z = rng.standard_normal(16)
    v = space16.h_basis @ z
    assert np.max(np.abs(coefficients(space16, v) - z)) < 1e-10


def test_lp_norms(space32):
    # constant-one interior vector: interpolant ramps at the boundary elements
    v = np.ones(space32.m)
    exact_sq = space32.domain.length - 2 * space32.h + 2 * space32.h / 3.0
    assert lp_norm(space32, v, 2.0) == pytest.approx(np.sqrt(exact_sq), rel=1e-12)
    assert l2_norm(space32, v) == pytest.approx(np.sqrt(exact_sq), rel=1e-12)
    # nodal rule dominates the Gauss rule (Jensen)
    rng = np.random.default_rng(5)
    for p in (2.0, 3.0, 4.0):
        w = rng.standard_normal(space32.m)
        assert lp_norm_nodal(space32, w, p) >= lp_norm(space32, w, p) - 1e-12


def test_lp_norm_gradient(space16):
    rng = np.random.default_rng(6)
    v = rng.standard_normal(16)
    p = 3.0
    _, grad = lp_norm(space16, v, p, with_grad=True)
    eps = 1e-6
    for i in (0, 7, 15):
        vp = v.copy()
        vp[i] += eps
        vm = v.copy()
        vm[i] -= eps
        fd = (lp_norm(space16, vp, p) ** p - lp_norm(space16, vm, p) ** p) / (2 * eps)
        assert grad[i] == pytest.approx(fd, rel=1e-5, abs=1e-8)


def test_noise_truncation_validation():
    nt = NoiseTruncation(n_noise=4, beta_tail=0.1, gamma_tail=0.0)
    assert nt.n_noise == 4
    with pytest.raises(ValueError):
        NoiseTruncation(n_noise=0, beta_tail=0.0, gamma_tail=0.0)
    with pytest.raises(ValueError):
        NoiseTruncation(n_noise=1, beta_tail=-0.5, gamma_tail=0.0)
