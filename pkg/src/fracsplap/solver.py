"""Drift-tamed Euler-Maruyama integration of the projected stochastic dynamics.

States are coefficient vectors in the orthonormal mode basis, so the L2 norm
of a state is the Euclidean norm of its coefficients and trajectories stay in
the retained span by construction.  Per-path noise comes from counter-based
Philox streams keyed by ``(master_seed, path_index)``: the stream of path i is
independent of how many paths run and in which order, and identical inputs
reproduce bitwise-identical paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coefficients import (
    DriftSpec,
    LipschitzPerturbationSpec,
    SuperlinearNoiseSpec,
    TransportNoiseSpec,
    eval_B,
    sqrt_operator,
)
from .domain import FracOperatorParams
from .fracop import FracQuadrature, assemble_frac_stiffness, get_plan, seminorm_p_with_residual
from .space import GalerkinSpace, lp_norm


@dataclass(frozen=True)
class SolverConfig:
    """Time grid, truncation ranks, taming and stopping controls."""

    T: float
    dt: float
    n_modes: int
    n_noise: int
    taming: bool = True
    cap_R: float = math.inf
    cap_mode: str = "record"  # "record" keeps integrating past the cap, "truncate" freezes
    master_seed: int = 0

    def __post_init__(self):
        if not (self.T > 0 and self.dt > 0):
            raise ValueError("horizon and time step must be positive")
        steps = self.T / self.dt
        if abs(steps - round(steps)) > 1e-9:
            raise ValueError(f"dt must divide T, got T/dt = {steps}")
        if self.n_modes < 1 or self.n_noise < 1:
            raise ValueError("n_modes and n_noise must be >= 1")
        if self.cap_mode not in ("record", "truncate"):
            raise ValueError(f"unknown cap_mode {self.cap_mode!r}")
        if not self.cap_R > 0:
            raise ValueError("cap radius must be positive")

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))


@dataclass
class Path:
    """One trajectory with per-step norms and stopping bookkeeping."""

    times: np.ndarray
    states: np.ndarray  # (n_steps+1, n_modes) mode coefficients
    l2_norms: np.ndarray
    v1_seminorms: np.ndarray
    lq_norms: np.ndarray
    energy_series: np.ndarray  # sum_j ||Z||_{V_j}^{q_j} per step
    stopped_at: int | None
    diverged_at: int | None
    master_seed: int
    path_index: int

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


class SimulationSetup:
    """Precomputed operators shared by every path of one configuration."""

    def __init__(
        self,
        space: GalerkinSpace,
        op_params: FracOperatorParams,
        quad: FracQuadrature,
        drift: DriftSpec,
        lip: LipschitzPerturbationSpec,
        noise: SuperlinearNoiseSpec,
        transport: TransportNoiseSpec | None = None,
    ):
        self.space = space
        self.op_params = op_params
        self.quad = quad
        self.drift = drift
        self.lip = lip
        self.noise = noise
        self.transport = transport
        self.H = space.h_basis
        self.M = space.mass_matrix
        self.HT_M = np.ascontiguousarray(self.H.T @ self.M)
        if op_params.p == 2.0:
            S = assemble_frac_stiffness(space, quad, op_params)
            self.S_red = np.ascontiguousarray(self.H.T @ S @ self.H)
            self.plan = None
        else:
            self.S_red = None
            self.plan = get_plan(space, quad, op_params)
        if transport is not None:
            if op_params.p != 2.0:
                raise ValueError("transport noise requires p = 2")
            self.R = sqrt_operator(space, quad, op_params)
        else:
            self.R = None

    def a1_coeffs(self, z: np.ndarray, nodal: np.ndarray, k: int) -> np.ndarray:
        """Mode coefficients of the operator action (pairings against h_1..h_k)."""
        if self.S_red is not None:
            return -(self.S_red[:k, :k] @ z)
        _, residual = seminorm_p_with_residual(self.plan, nodal, self.op_params.p)
        return self.H[:, :k].T @ (-0.5 * self.op_params.c_kernel * residual)

    def v1_seminorm(self, z: np.ndarray, nodal: np.ndarray, k: int) -> float:
        if self.S_red is not None:
            val = 2.0 / self.op_params.c_kernel * float(z @ (self.S_red[:k, :k] @ z))
            return math.sqrt(max(val, 0.0))
        value, _ = seminorm_p_with_residual(self.plan, nodal, self.op_params.p)
        return value ** (1.0 / self.op_params.p)

    def diffusion_cols(self, t: float, nodal: np.ndarray, n_noise: int) -> np.ndarray:
        cols = eval_B(self.noise, self.space, t, nodal, n_noise)
        if self.transport is not None:
            ng = min(self.transport.n_g, n_noise)
            gcols = self.transport.g_fields[:, :ng] * (self.R @ nodal)[:, None]
            cols[:, :ng] += gcols
        return cols


def brownian_increments(master_seed: int, path_index: int, n_steps: int, n_noise: int, dt: float) -> np.ndarray:
    """Increments of the truncated driving noise for one path, shape (n_steps, n_noise)."""
    bitgen = np.random.Philox(key=np.array([master_seed, path_index], dtype=np.uint64))
    rng = np.random.Generator(bitgen)
    return math.sqrt(dt) * rng.standard_normal((n_steps, n_noise))


def _integrate(setup: SimulationSetup, config: SolverConfig, x0, path_index: int, dW, stepper) -> Path:
    space = setup.space
    k = config.n_modes
    if k > space.n_modes:
        raise ValueError(f"config requests {k} modes but the space retains {space.n_modes}")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (space.m,):
        raise ValueError(f"initial state must be nodal of length {space.m}")
    K = config.n_steps
    if dW is None:
        dW = brownian_increments(config.master_seed, path_index, K, config.n_noise, config.dt)
    if dW.shape != (K, config.n_noise):
        raise ValueError(f"noise increments must have shape {(K, config.n_noise)}, got {dW.shape}")

    q = setup.drift.q
    p = setup.op_params.p
    z = setup.HT_M[:k] @ x0  # projection onto the retained span
    times = config.dt * np.arange(K + 1)
    states = np.full((K + 1, k), np.nan)
    l2 = np.full(K + 1, np.nan)
    v1 = np.full(K + 1, np.nan)
    lq = np.full(K + 1, np.nan)
    energy = np.full(K + 1, np.nan)
    stopped_at = None
    diverged_at = None

    def record(i, zi, nodal):
        states[i] = zi
        with np.errstate(over="ignore"):
            l2[i] = float(np.sqrt(zi @ zi))
            v1[i] = setup.v1_seminorm(zi, nodal, k)
            lq[i] = lp_norm(space, nodal, q)
            energy[i] = v1[i] ** p + lq[i] ** q + l2[i] ** 2

    nodal = setup.H[:, :k] @ z
    record(0, z, nodal)
    running_energy = 0.0
    if l2[0] >= config.cap_R:
        stopped_at = 0
    frozen = stopped_at is not None and config.cap_mode == "truncate"

    for i in range(K):
        if frozen:
            record(i + 1, z, nodal)
            running_energy += config.dt * 0.5 * (energy[i] + energy[i + 1])
            continue
        with np.errstate(over="ignore", invalid="ignore"):
            z_new = stepper(times[i], z, nodal, dW[i], k)
        if not np.all(np.isfinite(z_new)):
            diverged_at = i + 1
            break
        z = z_new
        nodal = setup.H[:, :k] @ z
        record(i + 1, z, nodal)
        running_energy += config.dt * 0.5 * (energy[i] + energy[i + 1])
        if stopped_at is None and l2[i + 1] + running_energy >= config.cap_R:
            stopped_at = i + 1
            if config.cap_mode == "truncate":
                frozen = True

    return Path(
        times=times,
        states=states,
        l2_norms=l2,
        v1_seminorms=v1,
        lq_norms=lq,
        energy_series=energy,
        stopped_at=stopped_at,
        diverged_at=diverged_at,
        master_seed=config.master_seed,
        path_index=path_index,
    )


def simulate_path(
    setup: SimulationSetup,
    config: SolverConfig,
    x0: np.ndarray,
    path_index: int = 0,
    dW: np.ndarray | None = None,
) -> Path:
    """Explicit Euler-Maruyama path with the drift increment tamed by 1/(1+dt*|D|).

    The taming factor rescales the whole projected drift vector, preserving
    its direction; the diffusion increment is left untouched.
    """

    def stepper(t, z, nodal, dw, k):
        drift_nodal = setup.drift.f(t, nodal) + setup.lip.h(t, nodal)
        D = setup.a1_coeffs(z, nodal, k) + setup.HT_M[:k] @ drift_nodal
        if config.taming:
            D = D / (1.0 + config.dt * float(np.sqrt(D @ D)))
        cols = setup.diffusion_cols(t, nodal, config.n_noise)
        return z + config.dt * D + (setup.HT_M[:k] @ cols) @ dw

    return _integrate(setup, config, x0, path_index, dW, stepper)


def reference_solution_p2_linear(
    setup: SimulationSetup,
    config: SolverConfig,
    x0: np.ndarray,
    path_index: int = 0,
    dW: np.ndarray | None = None,
) -> Path:
    """Exponential-integrator reference for the p = 2, linear-drift configuration.

    The linear part (nonlocal operator plus a linear zeroth-order drift) is
    integrated exactly in its eigenbasis each step; run it at a refined dt with
    the same Brownian increments as the compared path.
    """
    if setup.op_params.p != 2.0:
        raise ValueError("the exponential reference requires p = 2")
    if setup.drift.q != 2.0:
        raise ValueError("the exponential reference requires a linear drift (q = 2)")
    if setup.lip.phi3_amplitude != 0.0:
        raise ValueError("the exponential reference does not support the bounded-slope perturbation")
    k = config.n_modes
    c_lin = setup.drift.delta + setup.drift.linear
    A = setup.S_red[:k, :k] + c_lin * np.eye(k)
    vals, vecs = np.linalg.eigh(A)
    decay = vecs @ (np.exp(-vals * config.dt)[:, None] * vecs.T)

    def stepper(t, z, nodal, dw, k_):
        cols = setup.diffusion_cols(t, nodal, config.n_noise)
        return decay @ z + (setup.HT_M[:k_] @ cols) @ dw

    return _integrate(setup, config, x0, path_index, dW, stepper)


def stopping_functional(path: Path, upto_index: int) -> float:
    """L2 norm at the index plus the trapezoidal accumulated energy up to it."""
    if not 0 <= upto_index < path.times.shape[0]:
        raise ValueError(f"index {upto_index} outside the path grid")
    if upto_index == 0:
        return float(path.l2_norms[0])
    dt = path.dt
    acc = float(np.trapezoid(path.energy_series[: upto_index + 1], dx=dt))
    return float(path.l2_norms[upto_index]) + acc


def first_stop_index(path: Path, radius: float) -> int | None:
    """First grid index where the stopping functional reaches the radius."""
    for i in range(path.times.shape[0]):
        if not np.isfinite(path.energy_series[i]):
            return None
        if stopping_functional(path, i) >= radius:
            return i
    return None
