"""Piecewise-linear Galerkin space with an L2-orthonormal basis."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .domain import DomainSpec

_ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class GalerkinSpace:
    """Uniform P1 mesh on (a, b) with zero exterior values.

    ``nodes`` holds the m interior nodes; every discrete function is the hat
    interpolant of its interior nodal values, extended by zero outside the
    domain.  The columns of ``h_basis`` are the nodal coordinates of the
    L2-orthonormal basis obtained from the Cholesky factor of the mass
    matrix, so ``span{h_1..h_k}`` equals the span of the first k hats.
    """

    domain: DomainSpec
    nodes: np.ndarray
    h: float
    mass_matrix: np.ndarray
    h_basis: np.ndarray
    n_modes: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def m(self) -> int:
        return self.nodes.shape[0]

    @property
    def all_nodes(self) -> np.ndarray:
        """Mesh nodes including the two boundary nodes."""
        return np.concatenate(([self.domain.a], self.nodes, [self.domain.b]))

    def pad(self, v: np.ndarray) -> np.ndarray:
        """Interior nodal vector -> full nodal vector with zero boundary values."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.m,):
            raise ValueError(f"expected nodal vector of length {self.m}, got shape {v.shape}")
        out = np.zeros(self.m + 2)
        out[1:-1] = v
        return out

    def element_gauss(self, n_points: int = 8):
        """Gauss points/weights on every element, cached per point count."""
        key = ("egauss", n_points)
        if key not in self._cache:
            xi, w = np.polynomial.legendre.leggauss(n_points)
            loc = 0.5 * (xi + 1.0)
            xs = self.all_nodes[:-1, None] + self.h * loc[None, :]
            ws = np.broadcast_to(0.5 * self.h * w[None, :], xs.shape)
            self._cache[key] = (xs, np.array(ws), loc)
        return self._cache[key]


def build_space(domain: DomainSpec, m: int, n_modes: int) -> GalerkinSpace:
    """Assemble the mesh, mass matrix and orthonormal basis.

    Raises if ``n_modes > m`` or if the orthonormality check fails.
    """
    if m < 1:
        raise ValueError(f"need at least one interior node, got m={m}")
    if not 1 <= n_modes <= m:
        raise ValueError(f"n_modes must satisfy 1 <= n_modes <= m, got n_modes={n_modes}, m={m}")
    h = domain.length / (m + 1)
    nodes = domain.a + h * np.arange(1, m + 1)
    mass = np.zeros((m, m))
    idx = np.arange(m)
    mass[idx, idx] = 2.0 * h / 3.0
    mass[idx[:-1], idx[:-1] + 1] = h / 6.0
    mass[idx[:-1] + 1, idx[:-1]] = h / 6.0
    L = cholesky(mass, lower=True)
    h_full = solve_triangular(L, np.eye(m), lower=True).T  # = L^{-T}
    h_basis = np.ascontiguousarray(h_full[:, :n_modes])
    gram = h_basis.T @ mass @ h_basis
    err = np.max(np.abs(gram - np.eye(n_modes)))
    if err > _ORTHO_TOL:
        raise RuntimeError(f"orthonormalization failed, Gram deviation {err:.3e}")
    return GalerkinSpace(domain=domain, nodes=nodes, h=h, mass_matrix=mass, h_basis=h_basis, n_modes=n_modes)


def project(space: GalerkinSpace, v: np.ndarray, k: int) -> np.ndarray:
    """L2-orthogonal projection of a nodal vector onto span{h_1..h_k}."""
    if not 1 <= k <= space.n_modes:
        raise ValueError(f"projection rank must satisfy 1 <= k <= {space.n_modes}, got k={k}")
    Hk = space.h_basis[:, :k]
    return Hk @ (Hk.T @ (space.mass_matrix @ np.asarray(v, dtype=float)))


def coefficients(space: GalerkinSpace, v: np.ndarray, k: int | None = None) -> np.ndarray:
    """Coefficients of a nodal vector in the orthonormal basis."""
    k = space.n_modes if k is None else k
    return space.h_basis[:, :k].T @ (space.mass_matrix @ np.asarray(v, dtype=float))


def l2_norm(space: GalerkinSpace, v: np.ndarray) -> float:
    v = np.asarray(v, dtype=float)
    return float(np.sqrt(max(v @ (space.mass_matrix @ v), 0.0)))


def lp_norm(space: GalerkinSpace, v: np.ndarray, p: float, n_points: int = 8, with_grad: bool = False):
    """L^p norm of the hat interpolant, by per-element Gauss quadrature.

    With ``with_grad`` also returns the nodal gradient of ``||v||_p^p``.
    """
    vbar = space.pad(v)
    xs, ws, loc = space.element_gauss(n_points)
    vals = vbar[:-1, None] * (1.0 - loc)[None, :] + vbar[1:, None] * loc[None, :]
    total = float(np.sum(ws * np.abs(vals) ** p))
    norm = total ** (1.0 / p)
    if not with_grad:
        return norm
    gfac = p * ws * np.abs(vals) ** (p - 2.0) * vals
    gbar = np.zeros(space.m + 2)
    np.add.at(gbar, np.arange(space.m + 1), np.sum(gfac * (1.0 - loc)[None, :], axis=1))
    np.add.at(gbar, np.arange(1, space.m + 2), np.sum(gfac * loc[None, :], axis=1))
    return norm, gbar[1:-1]


def lp_norm_nodal(space: GalerkinSpace, v: np.ndarray, p: float) -> float:
    """L^p norm by the trapezoidal (nodal) rule, i.e. the hat interpolant of |v|^p.

    Dominates :func:`lp_norm` by Jensen's inequality; the coefficient growth
    checks use this variant so that pointwise bounds survive discretization.
    """
    vbar = space.pad(v)
    w = np.full(space.m + 2, space.h)
    w[0] = w[-1] = space.h / 2.0
    return float(np.sum(w * np.abs(vbar) ** p) ** (1.0 / p))


@dataclass(frozen=True)
class NoiseTruncation:
    """Retained noise directions and the neglected series mass."""

    n_noise: int
    beta_tail: float
    gamma_tail: float

    def __post_init__(self):
        if self.n_noise < 1:
            raise ValueError("n_noise must be >= 1")
        if not (self.beta_tail >= 0 and np.isfinite(self.beta_tail)):
            raise ValueError("beta tail mass must be finite and nonnegative")
        if not (self.gamma_tail >= 0 and np.isfinite(self.gamma_tail)):
            raise ValueError("gamma tail mass must be finite and nonnegative")
