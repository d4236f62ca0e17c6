"""Flat typed key-value configuration with dotted section names.

The format is one ``section.key = value`` per line, ``#`` comments, no
nesting; it is diff-friendly and reproduces bit-exactly in artifact headers.
Unknown keys are rejected, every value is validated against its schema type,
and the resolved configuration (defaults filled in) serializes back to the
same format.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ConfigError(ValueError):
    """Raised for unknown keys, type errors or violated preconditions."""


_REQUIRED = object()


def _parse_bool(text: str) -> bool:
    if text.lower() in ("true", "1", "yes"):
        return True
    if text.lower() in ("false", "0", "no"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_float_list(text: str):
    text = text.strip()
    if not text:
        return ()
    return tuple(float(tok) for tok in text.split(","))


def _parse_int_list(text: str):
    text = text.strip()
    if not text:
        return ()
    return tuple(int(tok) for tok in text.split(","))


def _fmt_value(val) -> str:
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, float):
        if math.isinf(val):
            return "inf" if val > 0 else "-inf"
        return repr(val)
    if isinstance(val, tuple):
        return ",".join(_fmt_value(v) for v in val)
    return str(val)


# key -> (parser, default); _REQUIRED marks keys without defaults
_SCHEMA = {
    "operator.n": (int, 1),
    "operator.s": (float, _REQUIRED),
    "operator.p": (float, 2.0),
    "domain.a": (float, 0.0),
    "domain.b": (float, 1.0),
    "domain.exterior_truncation": (float, 0.0),  # 0 = default (10x the domain length)
    "domain.mesh_m": (int, _REQUIRED),
    "domain.n_modes": (int, _REQUIRED),
    "quadrature.panel_gauss": (int, 6),
    "quadrature.graded_levels": (int, 6),
    "drift.family": (str, "power"),
    "drift.q": (float, _REQUIRED),
    "drift.delta": (float, _REQUIRED),
    "drift.linear": (float, 0.0),
    "drift.delta3": (float, -1.0),  # -1 = the family default delta/2, 0 = weak monotonicity only
    "lipschitz.family": (str, "bounded_slope"),
    "lipschitz.phi3": (float, 0.0),
    "noise.family": (str, "power_sine"),
    "noise.p1": (float, 2.0),
    "noise.beta_b0": (float, 0.0),
    "noise.beta_r": (float, 2.0),
    "noise.gamma_g0": (float, 0.0),
    "noise.gamma_r": (float, 2.0),
    "noise.cutoff": (int, 0),  # 0 = infinite power-law family
    "noise.sigma1_amplitude": (float, 0.0),
    "noise.sigma1_decay": (float, 2.0),
    "transport.enabled": (_parse_bool, False),
    "transport.family": (str, "sine"),
    "transport.n_g": (int, 2),
    "transport.amplitude": (float, 0.0),
    "transport.decay": (float, 1.0),
    "transport.phi4": (float, 0.0),
    "solver.T": (float, _REQUIRED),
    "solver.dt": (float, _REQUIRED),
    "solver.n_noise": (int, _REQUIRED),
    "solver.taming": (_parse_bool, True),
    "solver.cap_R": (float, math.inf),
    "solver.cap_mode": (str, "record"),
    "solver.master_seed": (int, 0),
    "solver.x0_profile": (str, "bump"),  # "bump" or "sine"
    "solver.x0_scale": (float, 1.0),
    "solver.x0_center": (float, 0.25),
    "solver.x0_width": (float, 0.1),
    "solver.x0_support": (int, 0),  # zero the profile beyond this node index (0 = keep all)
    "harness.n_paths": (int, 400),
    "harness.p_values": (_parse_float_list, (1.0, 2.0)),
    "harness.x_scales": (_parse_float_list, (0.0, 1.0, 2.0, 4.0)),
    "harness.sigma": (float, 0.25),
    "harness.mode_ladder": (_parse_int_list, (8, 16, 32)),
    "harness.dt_ladder": (_parse_float_list, ()),
    "harness.ref_refine": (int, 16),
    "harness.affinity_factor": (float, 3.0),
    "harness.max_diverged_fraction": (float, 0.0),
    "harness.stability_epsilon": (float, 1e-3),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated flat configuration; values accessible by dotted key."""

    values: dict

    def __getitem__(self, key: str):
        return self.values[key]

    def resolved_lines(self):
        return [f"{key} = {_fmt_value(self.values[key])}" for key in sorted(self.values)]

    def resolved_text(self) -> str:
        return "\n".join(self.resolved_lines()) + "\n"


def parse_config_text(text: str) -> ExperimentConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        parser, _ = _SCHEMA[key]
        try:
            values[key] = parser(val)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    for key, (_, default) in _SCHEMA.items():
        if key not in values:
            if default is _REQUIRED:
                raise ConfigError(f"missing required key {key!r}")
            values[key] = default
    return ExperimentConfig(values=values)


def parse_config_file(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def parse_resolved_header(path) -> ExperimentConfig:
    """Rebuild a configuration from the '# config:' lines of an artifact."""
    lines = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            if raw.startswith("# config: "):
                lines.append(raw[len("# config: "):])
    if not lines:
        raise ConfigError(f"no resolved-config header found in {path}")
    return parse_config_text("".join(lines))


@dataclass
class Bundle:
    """Everything an experiment needs, constructed from one configuration."""

    config: ExperimentConfig
    domain: object
    op_params: object
    quad: object
    space: object
    drift: object
    lip: object
    noise: object
    transport: object
    setup: object
    solver_config: object
    x0_shape: np.ndarray
    poincare: object = None
    report: object = None

    def admissibility(self):
        """Poincare estimate plus the full admissibility report (cached)."""
        if self.report is None:
            from .domain import poincare_constant
            from .hypotheses import admissibility_report

            self.poincare = poincare_constant(self.space, self.op_params, self.quad, n_random=400, seed=0)
            self.report = admissibility_report(
                self.op_params, self.drift, self.lip, self.noise, self.transport,
                self.poincare, self.config["solver.T"],
            )
        return self.report


def _x0_shape(config: ExperimentConfig, space) -> np.ndarray:
    from .space import l2_norm

    profile = config["solver.x0_profile"]
    xi = (space.nodes - space.domain.a) / space.domain.length
    if profile == "bump":
        center, width = config["solver.x0_center"], config["solver.x0_width"]
        if width <= 0:
            raise ConfigError("solver.x0_width must be positive")
        shape = np.exp(-0.5 * ((xi - center) / width) ** 2)
    elif profile == "sine":
        shape = np.sin(np.pi * xi)
    else:
        raise ConfigError(f"unknown x0 profile {config['solver.x0_profile']!r}")
    support = config["solver.x0_support"]
    if support < 0 or support > space.m:
        raise ConfigError("solver.x0_support must lie in [0, mesh_m]")
    if support:
        shape = shape.copy()
        shape[support:] = 0.0
    norm = l2_norm(space, shape)
    if norm == 0.0:
        raise ConfigError("initial profile vanishes on the mesh")
    return shape / norm


def build_bundle(config: ExperimentConfig) -> Bundle:
    """Construct and cross-validate every component named by the configuration."""
    from .coefficients import DriftSpec, LipschitzPerturbationSpec, SuperlinearNoiseSpec, TransportNoiseSpec
    from .domain import DomainSpec, FracOperatorParams
    from .fracop import FracQuadrature
    from .solver import SimulationSetup, SolverConfig
    from .space import build_space

    registered = {
        "drift.family": ("power",),
        "lipschitz.family": ("bounded_slope",),
        "noise.family": ("power_sine",),
        "transport.family": ("sine",),
    }
    for key, names in registered.items():
        if config[key] not in names:
            raise ConfigError(f"unknown {key} {config[key]!r}; registered: {', '.join(names)}")
    try:
        trunc = config["domain.exterior_truncation"]
        domain = DomainSpec(
            config["domain.a"], config["domain.b"],
            exterior_truncation=None if trunc == 0.0 else trunc,
        )
        op_params = FracOperatorParams(s=config["operator.s"], p=config["operator.p"], n=config["operator.n"])
        quad = FracQuadrature(config["quadrature.panel_gauss"], config["quadrature.graded_levels"])
        space = build_space(domain, config["domain.mesh_m"], config["domain.n_modes"])
        delta3 = config["drift.delta3"]
        drift = DriftSpec(
            q=config["drift.q"], delta=config["drift.delta"], linear=config["drift.linear"],
            delta3=None if delta3 < 0 else delta3,
        )
        lip = LipschitzPerturbationSpec(config["lipschitz.phi3"])
        cutoff = config["noise.cutoff"]
        noise = SuperlinearNoiseSpec(
            p1=config["noise.p1"],
            beta_b0=config["noise.beta_b0"], beta_r=config["noise.beta_r"],
            gamma_g0=config["noise.gamma_g0"], gamma_r=config["noise.gamma_r"],
            cutoff=None if cutoff == 0 else cutoff,
            sigma1_amplitude=config["noise.sigma1_amplitude"], sigma1_decay=config["noise.sigma1_decay"],
        )
        transport = None
        if config["transport.enabled"]:
            transport = TransportNoiseSpec.from_family(
                space, quad, op_params,
                n_g=config["transport.n_g"], amplitude=config["transport.amplitude"],
                decay=config["transport.decay"], phi4_amplitude=config["transport.phi4"],
            )
        solver_config = SolverConfig(
            T=config["solver.T"], dt=config["solver.dt"],
            n_modes=config["domain.n_modes"], n_noise=config["solver.n_noise"],
            taming=config["solver.taming"], cap_R=config["solver.cap_R"],
            cap_mode=config["solver.cap_mode"], master_seed=config["solver.master_seed"],
        )
        setup = SimulationSetup(space, op_params, quad, drift, lip, noise, transport)
        x0_shape = _x0_shape(config, space)
        ladder = config["harness.mode_ladder"]
        if ladder and any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ConfigError("harness.mode_ladder must be strictly increasing")
        if config["harness.sigma"] <= 0 or config["harness.sigma"] >= 0.5:
            raise ConfigError("harness.sigma must lie in (0, 1/2)")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return Bundle(
        config=config, domain=domain, op_params=op_params, quad=quad, space=space,
        drift=drift, lip=lip, noise=noise, transport=transport, setup=setup,
        solver_config=solver_config, x0_shape=x0_shape,
    )
