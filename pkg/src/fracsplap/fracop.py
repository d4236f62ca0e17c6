"""Singular-kernel quadrature for the Gagliardo seminorm and the weak p-Laplace form.

The double integral over the domain splits into element pairs:

* identical elements -- the integrand is a pure power of ``|x-y|`` because
  hat interpolants are linear per element, so the contribution is closed form;
* elements sharing a node -- tensor Gauss on geometrically graded
  subdivisions toward the shared node;
* separated elements -- plain tensor Gauss.

Zero extension outside the domain contributes ``2 * int |v|^{p-2} v u * tail``
with the tail kernel integrated analytically over a truncated exterior box.
The same quadrature points back every operation in this module, so algebraic
identities between the seminorm, the weak form and the assembled p = 2
stiffness matrix hold to rounding accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import FracOperatorParams
from .space import GalerkinSpace


@dataclass(frozen=True)
class FracQuadrature:
    """Quadrature controls: Gauss points per panel axis, grading depth."""

    panel_rule: int = 6
    near_diag_split: int = 6

    def __post_init__(self):
        if self.panel_rule < 2:
            raise ValueError("panel_rule must be >= 2")
        if self.near_diag_split < 2:
            raise ValueError("near_diag_split must be >= 2")


@dataclass(frozen=True)
class FracPlan:
    """Precomputed quadrature data for one (space, quad, s, p) combination.

    All pair weights already contain the kernel value and the factor 2 from
    enumerating unordered element pairs; the singular diagonal is never
    sampled.  ``elx``/``lx`` locate each x-point inside its element, so nodal
    vectors are evaluated by a gather against the padded vector.
    """

    m: int
    h: float
    inv_h: float
    exponent: float  # n + p*s
    p: float
    c_kernel: float
    elx: np.ndarray
    lx: np.ndarray
    ely: np.ndarray
    ly: np.ndarray
    w: np.ndarray
    j_same: float
    elt: np.ndarray
    lt: np.ndarray
    wt: np.ndarray
    tail_truncation_bound: float


def _gauss01(n: int):
    xi, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (xi + 1.0), 0.5 * w


def _graded_cells(width: float, levels: int):
    """Sub-intervals of (0, width) geometrically refined toward 0.

    Returns (starts, widths), ordered away from the singular end.
    """
    edges = width * 2.0 ** (-np.arange(levels, dtype=float))  # width, width/2, ...
    starts = np.concatenate(([0.0], edges[::-1][:-1]))
    widths = np.diff(np.concatenate(([0.0], edges[::-1])))
    return starts, widths


def get_plan(space: GalerkinSpace, quad: FracQuadrature, params: FracOperatorParams) -> FracPlan:
    """Build (or fetch from the space cache) the quadrature plan."""
    if params.n != 1:
        raise ValueError("quadrature is implemented for one-dimensional domains only")
    key = ("fracplan", quad.panel_rule, quad.near_diag_split, params.s, params.p)
    if key in space._cache:
        return space._cache[key]

    m, h = space.m, space.h
    a, b = space.domain.a, space.domain.b
    p, ps = params.p, params.p * params.s
    expo = 1.0 + ps
    loc, gw = _gauss01(quad.panel_rule)
    G = quad.panel_rule
    n_el = m + 1
    xall = space.all_nodes

    elx_parts, lx_parts, ely_parts, ly_parts, w_parts = [], [], [], [], []

    # separated pairs (gap of at least one element): tensor Gauss
    ep, eq = np.triu_indices(n_el, k=2)
    if ep.size:
        X = xall[ep][:, None] + h * loc[None, :]          # (npairs, G)
        Y = xall[eq][:, None] + h * loc[None, :]
        K = np.abs(X[:, :, None] - Y[:, None, :]) ** (-expo)
        W = 2.0 * (h * gw)[None, :, None] * (h * gw)[None, None, :] * K
        npairs = ep.size
        elx_parts.append(np.repeat(ep, G * G))
        ely_parts.append(np.repeat(eq, G * G))
        lx_parts.append(np.tile(np.repeat(loc, G), npairs))
        ly_parts.append(np.tile(np.tile(loc, G), npairs))
        w_parts.append(W.reshape(-1))

    # adjacent pairs: graded subdivision toward the shared node; geometry is
    # identical for every pair on the uniform mesh, so kernel weights are
    # computed once
    L = quad.near_diag_split
    starts, widths = _graded_cells(h, L)
    # offsets from the shared node: x side negative, y side positive
    xoff = -(starts[:, None] + widths[:, None] * loc[None, :])      # (L, G)
    yoff = starts[:, None] + widths[:, None] * loc[None, :]
    cell_w = widths[:, None] * gw[None, :]                          # (L, G)
    D = np.abs(xoff.reshape(-1)[:, None] - yoff.reshape(-1)[None, :])
    Krel = D ** (-expo)
    Wrel = 2.0 * cell_w.reshape(-1)[:, None] * cell_w.reshape(-1)[None, :] * Krel
    lx_rel = 1.0 + xoff.reshape(-1) / h      # local coordinate in the left element
    ly_rel = yoff.reshape(-1) / h
    npts = lx_rel.size
    e_left = np.arange(n_el - 1)
    elx_parts.append(np.repeat(e_left, npts * npts))
    ely_parts.append(np.repeat(e_left + 1, npts * npts))
    lx_parts.append(np.tile(np.repeat(lx_rel, npts), n_el - 1))
    ly_parts.append(np.tile(np.tile(ly_rel, npts), n_el - 1))
    w_parts.append(np.tile(Wrel.reshape(-1), n_el - 1))

    elx = np.concatenate(elx_parts).astype(np.int64)
    ely = np.concatenate(ely_parts).astype(np.int64)
    lx = np.concatenate(lx_parts)
    ly = np.concatenate(ly_parts)
    w = np.concatenate(w_parts)

    # identical elements: closed form for the pure power integral
    alpha = p - 1.0 - ps
    j_same = 2.0 * h ** (alpha + 2.0) / ((alpha + 1.0) * (alpha + 2.0))

    # exterior tail over the truncated box, graded on the boundary elements
    wt_box = space.domain.exterior_truncation

    def tail_kernel(x):
        return (
            (x - a) ** (-ps) - (x - a + wt_box) ** (-ps)
            + (b - x) ** (-ps) - (b - x + wt_box) ** (-ps)
        ) / ps

    elt_parts, lt_parts, wt_parts = [], [], []
    inner = np.arange(1, n_el - 1)
    if inner.size:
        Xi = xall[inner][:, None] + h * loc[None, :]
        elt_parts.append(np.repeat(inner, G))
        lt_parts.append(np.tile(loc, inner.size))
        wt_parts.append((2.0 * h * gw[None, :] * tail_kernel(Xi)).reshape(-1))
    for e, toward_left in ((0, True),) + (((n_el - 1, False),) if n_el > 1 else ()):
        st, wd = _graded_cells(h, L)
        if toward_left:
            pts = xall[e] + st[:, None] + wd[:, None] * loc[None, :]
            lcs = (pts - xall[e]) / h
        else:
            pts = xall[e + 1] - (st[:, None] + wd[:, None] * loc[None, :])
            lcs = (pts - xall[e]) / h
        wq = 2.0 * wd[:, None] * gw[None, :] * tail_kernel(pts)
        elt_parts.append(np.full(pts.size, e, dtype=np.int64))
        lt_parts.append(lcs.reshape(-1))
        wt_parts.append(wq.reshape(-1))
    elt = np.concatenate(elt_parts).astype(np.int64)
    lt = np.concatenate(lt_parts)
    wt = np.concatenate(wt_parts)

    trunc_bound = 2.0 * wt_box ** (-ps) / ps

    plan = FracPlan(
        m=m, h=h, inv_h=1.0 / h, exponent=1.0 + ps, p=p, c_kernel=params.c_kernel,
        elx=elx, lx=lx, ely=ely, ly=ly, w=w, j_same=j_same,
        elt=elt, lt=lt, wt=wt, tail_truncation_bound=trunc_bound,
    )
    space._cache[key] = plan
    return plan


def _pair_diffs(plan: FracPlan, vbar: np.ndarray) -> np.ndarray:
    vx = vbar[plan.elx] * (1.0 - plan.lx) + vbar[plan.elx + 1] * plan.lx
    vy = vbar[plan.ely] * (1.0 - plan.ly) + vbar[plan.ely + 1] * plan.ly
    return vx - vy


def _tail_vals(plan: FracPlan, vbar: np.ndarray) -> np.ndarray:
    return vbar[plan.elt] * (1.0 - plan.lt) + vbar[plan.elt + 1] * plan.lt


def _odd_power(x: np.ndarray, p: float) -> np.ndarray:
    """|x|^(p-2) * x, with the p = 2 case kept free of 0**0 artifacts."""
    if p == 2.0:
        return x
    return np.abs(x) ** (p - 2.0) * x


def seminorm_p(plan: FracPlan, v: np.ndarray, p: float) -> float:
    """p-th power of the Gagliardo seminorm of the hat interpolant."""
    vbar = np.zeros(plan.m + 2)
    vbar[1:-1] = v
    dv = _pair_diffs(plan, vbar)
    slopes = np.diff(vbar) * plan.inv_h
    vt = _tail_vals(plan, vbar)
    return float(
        np.dot(plan.w, np.abs(dv) ** p)
        + plan.j_same * np.sum(np.abs(slopes) ** p)
        + np.dot(plan.wt, np.abs(vt) ** p)
    )


def _form_residual(plan: FracPlan, vbar: np.ndarray, p: float):
    """Values B(v, e_i) of the p-form against every interior hat, plus B(v, v)."""
    dv = _pair_diffs(plan, vbar)
    slopes = np.diff(vbar) * plan.inv_h
    vt = _tail_vals(plan, vbar)
    f_pairs = plan.w * _odd_power(dv, p)
    f_same = plan.j_same * _odd_power(slopes, p)
    f_tail = plan.wt * _odd_power(vt, p)
    size = plan.m + 2
    gbar = (
        np.bincount(plan.elx, weights=f_pairs * (1.0 - plan.lx), minlength=size)
        + np.bincount(plan.elx + 1, weights=f_pairs * plan.lx, minlength=size)
        - np.bincount(plan.ely, weights=f_pairs * (1.0 - plan.ly), minlength=size)
        - np.bincount(plan.ely + 1, weights=f_pairs * plan.ly, minlength=size)
        + np.bincount(plan.elt, weights=f_tail * (1.0 - plan.lt), minlength=size)
        + np.bincount(plan.elt + 1, weights=f_tail * plan.lt, minlength=size)
    )
    el = np.arange(plan.m + 1)
    gbar += np.bincount(el, weights=-f_same * plan.inv_h, minlength=size)
    gbar += np.bincount(el + 1, weights=f_same * plan.inv_h, minlength=size)
    value = float(np.dot(f_pairs, dv) + np.dot(f_same, slopes) + np.dot(f_tail, vt))
    return gbar[1:-1], value


def seminorm_p_with_residual(plan: FracPlan, v: np.ndarray, p: float):
    """Return ``[v]^p`` together with the form residual ``B(v, e_i)``.

    The residual is ``(1/p)`` times the gradient of ``[v]^p`` in the nodal
    values; the weak operator action is ``-(C/2)`` times it.
    """
    vbar = np.zeros(plan.m + 2)
    vbar[1:-1] = v
    residual, value = _form_residual(plan, vbar, p)
    return value, residual


def gagliardo_seminorm(space: GalerkinSpace, quad: FracQuadrature, v: np.ndarray, params: FracOperatorParams) -> float:
    """Discrete seminorm ``[v]_{W^{s,p}}`` including the exterior-tail term."""
    plan = get_plan(space, quad, params)
    v = np.asarray(v, dtype=float)
    if v.shape != (space.m,):
        raise ValueError(f"expected nodal vector of length {space.m}")
    return seminorm_p(plan, v, params.p) ** (1.0 / params.p)


def apply_A1_weak(space: GalerkinSpace, quad: FracQuadrature, v: np.ndarray, u: np.ndarray, params: FracOperatorParams) -> float:
    """Duality pairing of the operator action at v against u (both nodal)."""
    plan = get_plan(space, quad, params)
    vbar = np.zeros(space.m + 2)
    vbar[1:-1] = np.asarray(v, dtype=float)
    ubar = np.zeros(space.m + 2)
    ubar[1:-1] = np.asarray(u, dtype=float)
    p = params.p
    dv = _pair_diffs(plan, vbar)
    du = _pair_diffs(plan, ubar)
    sv = np.diff(vbar) * plan.inv_h
    su = np.diff(ubar) * plan.inv_h
    vt = _tail_vals(plan, vbar)
    ut = _tail_vals(plan, ubar)
    form = (
        np.dot(plan.w * _odd_power(dv, p), du)
        + plan.j_same * np.dot(_odd_power(sv, p), su)
        + np.dot(plan.wt * _odd_power(vt, p), ut)
    )
    return float(-0.5 * params.c_kernel * form)


def apply_A1_residual(space: GalerkinSpace, quad: FracQuadrature, v: np.ndarray, params: FracOperatorParams) -> np.ndarray:
    """Vector of pairings against every interior hat, in one quadrature sweep."""
    plan = get_plan(space, quad, params)
    vbar = np.zeros(space.m + 2)
    vbar[1:-1] = np.asarray(v, dtype=float)
    residual, _ = _form_residual(plan, vbar, params.p)
    return -0.5 * params.c_kernel * residual


def assemble_frac_stiffness(space: GalerkinSpace, quad: FracQuadrature, params: FracOperatorParams) -> np.ndarray:
    """Matrix S with ``v^T S v = (C/2) [v]^2``; only defined for p = 2."""
    if params.p != 2.0:
        raise ValueError(f"stiffness assembly requires p = 2, got p={params.p}")
    key = ("fracstiff", quad.panel_rule, quad.near_diag_split, params.s)
    if key in space._cache:
        return space._cache[key]
    plan = get_plan(space, quad, params)
    size = plan.m + 2
    flat = np.zeros(size * size)
    idx = (plan.elx, plan.elx + 1, plan.ely, plan.ely + 1)
    coef = (1.0 - plan.lx, plan.lx, -(1.0 - plan.ly), -plan.ly)
    for ia, ca in zip(idx, coef):
        for ib, cb in zip(idx, coef):
            flat += np.bincount(ia * size + ib, weights=plan.w * ca * cb, minlength=size * size)
    tidx = (plan.elt, plan.elt + 1)
    tcoef = (1.0 - plan.lt, plan.lt)
    for ia, ca in zip(tidx, tcoef):
        for ib, cb in zip(tidx, tcoef):
            flat += np.bincount(ia * size + ib, weights=plan.wt * ca * cb, minlength=size * size)
    S = flat.reshape(size, size)
    el = np.arange(plan.m + 1)
    same = plan.j_same * plan.inv_h**2
    np.add.at(S, (el, el), same)
    np.add.at(S, (el + 1, el + 1), same)
    np.add.at(S, (el, el + 1), -same)
    np.add.at(S, (el + 1, el), -same)
    S = 0.5 * params.c_kernel * S[1:-1, 1:-1]
    S = np.ascontiguousarray(S)
    space._cache[key] = S
    return S


@dataclass(frozen=True)
class MonotonicityReport:
    p: float
    n_samples: int
    violations: int
    worst_slack: float


def check_scalar_monotonicity(p: float, n_samples: int, rng_seed: int = 0, tol: float = 1e-12) -> MonotonicityReport:
    """Sampled check of ``(|s1|^{p-2}s1 - |s2|^{p-2}s2)(s1-s2) >= 2^{1-p}|s1-s2|^p``."""
    if not p >= 2.0:
        raise ValueError(f"requires p >= 2, got p={p}")
    rng = np.random.default_rng(rng_seed)
    s1 = rng.uniform(-10.0, 10.0, n_samples)
    s2 = rng.uniform(-10.0, 10.0, n_samples)
    lhs = (_odd_power(s1, p) - _odd_power(s2, p)) * (s1 - s2)
    rhs = 2.0 ** (1.0 - p) * np.abs(s1 - s2) ** p
    slack = lhs - rhs
    violations = int(np.sum(slack < -tol))
    return MonotonicityReport(p=p, n_samples=n_samples, violations=violations, worst_slack=float(np.min(slack)))
