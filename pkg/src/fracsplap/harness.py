"""Ensemble studies: moment bounds, time regularity, stabilization, stability.

All reductions are order-independent: paths are computed from per-index
counter-based streams and collected by index, so results are bitwise
reproducible for a fixed master seed regardless of the thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .solver import Path, SimulationSetup, SolverConfig, brownian_increments, reference_solution_p2_linear, simulate_path
from .space import l2_norm


def run_ensemble(setup, config, x0, n_paths, threads=1, simulate=simulate_path, dw_for=None):
    """Simulate paths 0..n_paths-1; deterministic collection by path index."""

    def one(j):
        dW = dw_for(j) if dw_for is not None else None
        return simulate(setup, config, x0, path_index=j, dW=dW)

    if threads <= 1:
        return [one(j) for j in range(n_paths)]
    out = [None] * n_paths
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for j, path in zip(range(n_paths), pool.map(one, range(n_paths))):
            out[j] = path
    return out


def _completed(paths):
    done = [p for p in paths if p.diverged_at is None]
    if not done:
        raise RuntimeError("every path diverged; no statistics available")
    return done


def diverged_fraction(paths) -> float:
    return sum(1 for p in paths if p.diverged_at is not None) / max(len(paths), 1)


@dataclass
class MomentReport:
    """Monte Carlo estimates of the three bounded moment families."""

    p_values: tuple
    x_scales: tuple
    x_norms_sq: tuple
    sup_moments: np.ndarray      # (n_p, n_scales)
    sup_std_errors: np.ndarray
    energy_moments: np.ndarray
    energy_std_errors: np.ndarray
    cross_moments: np.ndarray
    cross_std_errors: np.ndarray
    affinity_ratios: np.ndarray  # sup moment / (1 + ||x||^{2p})
    affinity_factor: float
    affinity_flags: tuple        # per p: True when ratios spread beyond the factor
    n_paths: int
    diverged: int


def estimate_moments(
    setup: SimulationSetup,
    config: SolverConfig,
    x0_shape: np.ndarray,
    x_scales,
    p_values,
    n_paths: int,
    p_max: float = math.inf,
    affinity_factor: float = 3.0,
    threads: int = 1,
) -> MomentReport:
    """Estimate sup-norm, energy and cross moments over initial-data scales.

    Exponents at or above the admissible supremum ``p_max`` are refused.
    """
    if n_paths < 100:
        raise ValueError("moment estimation needs at least 100 paths")
    p_values = tuple(float(p) for p in p_values)
    for p in p_values:
        if p >= p_max:
            raise ValueError(
                f"moment exponent p={p} is outside the admissible range [1, {p_max}) "
                "implied by the coercivity/diffusion-growth ratios"
            )
        if p < 1.0:
            raise ValueError("moment exponents start at 1")
    x_scales = tuple(float(s) for s in x_scales)
    n_p, n_s = len(p_values), len(x_scales)
    sup_m = np.zeros((n_p, n_s))
    sup_se = np.zeros((n_p, n_s))
    en_m = np.zeros((n_p, n_s))
    en_se = np.zeros((n_p, n_s))
    cr_m = np.zeros((n_p, n_s))
    cr_se = np.zeros((n_p, n_s))
    x_norms_sq = []
    diverged = 0
    dt = config.dt
    for si, scale in enumerate(x_scales):
        x0 = scale * np.asarray(x0_shape, dtype=float)
        x_norms_sq.append(l2_norm(setup.space, x0) ** 2)
        paths = run_ensemble(setup, config, x0, n_paths, threads=threads)
        diverged += sum(1 for p in paths if p.diverged_at is not None)
        done = _completed(paths)
        sup_l2 = np.array([np.max(p.l2_norms) for p in done])
        energy = np.array([np.trapezoid(p.energy_series, dx=dt) for p in done])
        for pi, p in enumerate(p_values):
            sup_samples = sup_l2 ** (2.0 * p)
            en_samples = energy**p
            cr_samples = np.array(
                [np.trapezoid(pp.l2_norms ** (2.0 * p - 2.0) * pp.energy_series, dx=dt) for pp in done]
            )
            root = math.sqrt(len(done))
            sup_m[pi, si] = sup_samples.mean()
            sup_se[pi, si] = sup_samples.std(ddof=1) / root
            en_m[pi, si] = en_samples.mean()
            en_se[pi, si] = en_samples.std(ddof=1) / root
            cr_m[pi, si] = cr_samples.mean()
            cr_se[pi, si] = cr_samples.std(ddof=1) / root
    x_norms_sq = tuple(x_norms_sq)
    ratios = np.zeros((n_p, n_s))
    flags = []
    for pi, p in enumerate(p_values):
        denom = np.array([1.0 + xn**p for xn in x_norms_sq])
        ratios[pi] = sup_m[pi] / denom
        spread = ratios[pi].max() / ratios[pi].min() if ratios[pi].min() > 0 else math.inf
        flags.append(bool(spread > affinity_factor))
    return MomentReport(
        p_values=p_values,
        x_scales=x_scales,
        x_norms_sq=x_norms_sq,
        sup_moments=sup_m,
        sup_std_errors=sup_se,
        energy_moments=en_m,
        energy_std_errors=en_se,
        cross_moments=cr_m,
        cross_std_errors=cr_se,
        affinity_ratios=ratios,
        affinity_factor=affinity_factor,
        affinity_flags=tuple(flags),
        n_paths=n_paths,
        diverged=diverged,
    )


def time_seminorm_sq(values: np.ndarray, dt: float, sigma: float) -> float:
    """Double trapezoidal sum of ||v(t)-v(s)||^2 / |t-s|^{1+2*sigma}.

    ``values`` has one state per row (scalars allowed); the Euclidean row
    distance is the H norm when rows are orthonormal-basis coefficients.
    """
    if not 0.0 < sigma < 0.5:
        raise ValueError(f"time-regularity order must lie in (0, 1/2), got {sigma}")
    vals = np.asarray(values, dtype=float)
    if vals.ndim == 1:
        vals = vals[:, None]
    n = vals.shape[0]
    if n < 2:
        raise ValueError("need at least two grid points")
    t = dt * np.arange(n)
    gram = vals @ vals.T
    sq = np.diag(gram)
    dist = np.maximum(sq[:, None] + sq[None, :] - 2.0 * gram, 0.0)
    lag = np.abs(t[:, None] - t[None, :])
    np.fill_diagonal(lag, 1.0)
    kern = dist / lag ** (1.0 + 2.0 * sigma)
    np.fill_diagonal(kern, 0.0)
    w = np.full(n, dt)
    w[0] = w[-1] = 0.5 * dt
    return float(w @ kern @ w)


def slobodeckij_time_seminorm(path: Path, sigma: float) -> float:
    """W^{sigma,2}(0,T;H) norm of a trajectory: sqrt(int ||Z||^2 + seminorm^2)."""
    states = path.states
    if path.diverged_at is not None:
        states = states[: path.diverged_at]
    if states.shape[0] < 2:
        raise ValueError("need at least two recorded steps")
    semi = time_seminorm_sq(states, path.dt, sigma)
    w = np.full(states.shape[0], path.dt)
    w[0] = w[-1] = 0.5 * path.dt
    l2_part = float(w @ np.sum(states**2, axis=1))
    return math.sqrt(l2_part + semi)


@dataclass
class ConvergenceReport:
    """Mode-ladder gaps and/or dt-ladder strong errors with fitted orders."""

    mode_ladder: tuple = ()
    pairwise_gaps: tuple = ()
    gaps_monotone: bool = True
    dt_ladder: tuple = ()
    strong_errors: tuple = ()
    strong_slope: float = math.nan
    n_paths: int = 0


def _pairwise_gap_sq(path_a: Path, path_b: Path, dt: float) -> float:
    """L2(0,T;H) gap between nested-rung paths, in coefficient space."""
    za, zb = path_a.states, path_b.states
    na = za.shape[1]
    diff_sq = np.sum((zb[:, :na] - za) ** 2, axis=1) + np.sum(zb[:, na:] ** 2, axis=1)
    return float(np.trapezoid(diff_sq, dx=dt))


def galerkin_convergence_study(
    setup: SimulationSetup,
    config: SolverConfig,
    x0: np.ndarray,
    mode_ladder,
    n_paths: int,
    threads: int = 1,
) -> ConvergenceReport:
    """Gaps between consecutive rungs of a nested mode ladder, shared noise.

    Every rung consumes the same per-path increments (the coarse run sees the
    same stream as the fine one), so the gaps isolate the truncation effect.
    """
    ladder = tuple(int(n) for n in mode_ladder)
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("mode ladder must be strictly increasing")
    if ladder[-1] > setup.space.n_modes:
        raise ValueError("mode ladder exceeds the retained span of the space")
    K = config.n_steps

    def one(j):
        dW = brownian_increments(config.master_seed, j, K, config.n_noise, config.dt)
        paths = []
        for nm in ladder:
            cfg = SolverConfig(
                T=config.T, dt=config.dt, n_modes=nm, n_noise=config.n_noise,
                taming=config.taming, cap_R=config.cap_R, cap_mode=config.cap_mode,
                master_seed=config.master_seed,
            )
            paths.append(simulate_path(setup, cfg, x0, path_index=j, dW=dW))
        return [_pairwise_gap_sq(a, b, config.dt) for a, b in zip(paths, paths[1:])]

    if threads <= 1:
        rows = [one(j) for j in range(n_paths)]
    else:
        rows = [None] * n_paths
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for j, row in zip(range(n_paths), pool.map(one, range(n_paths))):
                rows[j] = row
    gaps_sq = np.array(rows)  # (n_paths, n_rungs-1)
    gaps = tuple(np.sqrt(gaps_sq.mean(axis=0)))
    monotone = all(b < a for a, b in zip(gaps, gaps[1:]))
    return ConvergenceReport(mode_ladder=ladder, pairwise_gaps=gaps, gaps_monotone=monotone, n_paths=n_paths)


def strong_order_study(
    setup: SimulationSetup,
    config: SolverConfig,
    x0: np.ndarray,
    dt_ladder,
    n_paths: int,
    ref_refine: int = 16,
    threads: int = 1,
) -> ConvergenceReport:
    """Endpoint RMS error of the tamed/plain scheme against the fine exponential
    reference on shared Brownian increments, with the fitted order."""
    dts = tuple(sorted((float(d) for d in dt_ladder), reverse=True))
    if len(dts) < 2:
        raise ValueError("need at least two dt rungs")
    dt_fine = dts[-1] / ref_refine
    K_fine = config.T / dt_fine
    if abs(K_fine - round(K_fine)) > 1e-9:
        raise ValueError("the refined step must divide the horizon")
    K_fine = int(round(K_fine))
    for d in dts:
        ratio = d / dt_fine
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("every dt rung must be a multiple of the refined step")

    ref_cfg = SolverConfig(
        T=config.T, dt=dt_fine, n_modes=config.n_modes, n_noise=config.n_noise,
        taming=False, master_seed=config.master_seed,
    )

    def one(j):
        dWf = brownian_increments(config.master_seed, j, K_fine, config.n_noise, dt_fine)
        ref = reference_solution_p2_linear(setup, ref_cfg, x0, path_index=j, dW=dWf)
        errs = []
        for d in dts:
            r = int(round(d / dt_fine))
            dW = dWf.reshape(-1, r, config.n_noise).sum(axis=1)
            cfg = SolverConfig(
                T=config.T, dt=d, n_modes=config.n_modes, n_noise=config.n_noise,
                taming=config.taming, master_seed=config.master_seed,
            )
            em = simulate_path(setup, cfg, x0, path_index=j, dW=dW)
            errs.append(float(np.sum((em.states[-1] - ref.states[-1]) ** 2)))
        return errs

    if threads <= 1:
        rows = [one(j) for j in range(n_paths)]
    else:
        rows = [None] * n_paths
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for j, row in zip(range(n_paths), pool.map(one, range(n_paths))):
                rows[j] = row
    err_sq = np.array(rows)
    rms = np.sqrt(err_sq.mean(axis=0))
    slope = float(np.polyfit(np.log2(dts), np.log2(rms), 1)[0])
    return ConvergenceReport(dt_ladder=dts, strong_errors=tuple(rms), strong_slope=slope, n_paths=n_paths)


@dataclass
class StabilityReport:
    """Pathwise gaps between runs from perturbed initial data on shared noise."""

    initial_gap_sq: float
    sup_gap_sq: np.ndarray  # per path
    gronwall_ratios: np.ndarray
    exp_factor: float
    bitwise_identical: bool
    gap_nonincreasing: bool
    n_paths: int


def pathwise_stability_study(
    setup: SimulationSetup,
    config: SolverConfig,
    x0: np.ndarray,
    x0_perturbed: np.ndarray,
    n_paths: int,
    g_l1_norm: float = 0.0,
    threads: int = 1,
) -> StabilityReport:
    """Run path pairs on identical increments from two initial states.

    The ratio column compares the per-path sup-gap against the one-sided
    Gronwall envelope ``||dx||^2 * exp(g_l1_norm)`` of the local-monotonicity
    weight (the shipped families have no state-dependent weight).
    """
    x0 = np.asarray(x0, dtype=float)
    x0_perturbed = np.asarray(x0_perturbed, dtype=float)
    gap0 = l2_norm(setup.space, x0 - x0_perturbed) ** 2
    exp_factor = math.exp(g_l1_norm)
    K = config.n_steps

    def one(j):
        dW = brownian_increments(config.master_seed, j, K, config.n_noise, config.dt)
        pa = simulate_path(setup, config, x0, path_index=j, dW=dW)
        pb = simulate_path(setup, config, x0_perturbed, path_index=j, dW=dW)
        diff = np.sum((pa.states - pb.states) ** 2, axis=1)
        identical = bool(np.array_equal(pa.states, pb.states))
        nonincr = bool(np.all(np.diff(diff) <= 1e-14 * max(diff[0], 1e-300)))
        return float(np.max(diff)), identical, nonincr

    if threads <= 1:
        rows = [one(j) for j in range(n_paths)]
    else:
        rows = [None] * n_paths
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for j, row in zip(range(n_paths), pool.map(one, range(n_paths))):
                rows[j] = row
    sup_gap = np.array([r[0] for r in rows])
    identical = all(r[1] for r in rows)
    nonincr = all(r[2] for r in rows)
    if gap0 > 0:
        ratios = sup_gap / (gap0 * exp_factor)
    else:
        ratios = np.where(sup_gap > 0, math.inf, 0.0)
    return StabilityReport(
        initial_gap_sq=gap0,
        sup_gap_sq=sup_gap,
        gronwall_ratios=ratios,
        exp_factor=exp_factor,
        bitwise_identical=identical,
        gap_nonincreasing=nonincr,
        n_paths=n_paths,
    )
