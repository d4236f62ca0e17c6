import math
from pathlib import Path

import numpy as np
import pytest

from fracsplap import ConfigError, build_bundle, parse_config_file, parse_config_text, parse_resolved_header
from fracsplap.cli import main

CONFIG_DIR = Path(__file__).parent.parent / "configs"

MINI = """
operator.s = 0.4
domain.mesh_m = 12
domain.n_modes = 6
drift.q = 4.0
drift.delta = 1.0
noise.p1 = 2.0
noise.beta_b0 = 0.1
noise.beta_r = 2.0
noise.gamma_g0 = 0.1
noise.gamma_r = 2.0
solver.T = 0.25
solver.dt = 0.03125
solver.n_noise = 2
harness.n_paths = 100
"""


def test_parse_defaults_and_types():
    cfg = parse_config_text(MINI)
    assert cfg["operator.p"] == 2.0
    assert cfg["solver.taming"] is True
    assert cfg["solver.cap_R"] == math.inf
    assert cfg["harness.x_scales"] == (0.0, 1.0, 2.0, 4.0)
    assert cfg["harness.mode_ladder"] == (8, 16, 32)


def test_parse_rejections():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config_text(MINI + "\nbogus.key = 1\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config_text(MINI + "\noperator.s = 0.5\n")
    with pytest.raises(ConfigError, match="missing required"):
        parse_config_text("operator.s = 0.4\n")
    with pytest.raises(ConfigError, match="bad value"):
        parse_config_text(MINI.replace("solver.T = 0.25", "solver.T = quarter"))
    with pytest.raises(ConfigError, match="expected"):
        parse_config_text(MINI + "\nnot a kv line\n")


def test_build_bundle_validates_cross_fields():
    with pytest.raises(ConfigError):
        build_bundle(parse_config_text(MINI.replace("solver.dt = 0.03125", "solver.dt = 0.3")))
    with pytest.raises(ConfigError):
        build_bundle(parse_config_text(MINI.replace("domain.n_modes = 6", "domain.n_modes = 60")))
    with pytest.raises(ConfigError):
        build_bundle(parse_config_text(MINI + "harness.sigma = 0.6\n"))
    with pytest.raises(ConfigError):
        build_bundle(parse_config_text(MINI + "solver.x0_profile = wave\n"))
    with pytest.raises(ConfigError, match="registered"):
        build_bundle(parse_config_text(MINI + "drift.family = cubic_spline\n"))
    bundle = build_bundle(parse_config_text(MINI))
    assert bundle.space.m == 12
    assert bundle.x0_shape.shape == (12,)


def test_resolved_roundtrip_is_identity():
    cfg = parse_config_text(MINI)
    again = parse_config_text(cfg.resolved_text())
    assert again.values == cfg.values
    assert again.resolved_text() == cfg.resolved_text()


def test_shipped_configs_build():
    for name in (
        "theorem1_ok", "theorem2_ok", "theorem2_beta_boundary", "theorem3_ok",
        "moments", "deterministic_convergence", "strong_order", "galerkin_ladder", "uniqueness",
    ):
        bundle = build_bundle(parse_config_file(CONFIG_DIR / f"{name}.cfg"))
        assert bundle.setup is not None


def test_check_hypotheses_verdicts(tmp_path, capsys):
    rc = main(["check-hypotheses", "--config", str(CONFIG_DIR / "theorem2_ok.cfg"), "--out", str(tmp_path / "a")])
    assert rc == 0
    text = (tmp_path / "a" / "admissibility.txt").read_text()
    assert "strong_monotone_drift: PASS" in text
    assert "ADMISSIBLE" in text
    kv = (tmp_path / "a" / "admissibility.kv").read_text()
    assert "admissible = true" in kv
    rc = main(["check-hypotheses", "--config", str(CONFIG_DIR / "theorem2_beta_boundary.cfg"), "--out", str(tmp_path / "b")])
    assert rc == 0
    text = (tmp_path / "b" / "admissibility.txt").read_text()
    assert "[VIOLATED] sum(beta) < delta1" in text
    assert "NOT ADMISSIBLE" in text


def test_check_hypotheses_deterministic_bytes(tmp_path):
    outs = []
    for sub in ("x", "y"):
        rc = main(["check-hypotheses", "--config", str(CONFIG_DIR / "theorem1_ok.cfg"), "--out", str(tmp_path / sub)])
        assert rc == 0
        outs.append((tmp_path / sub / "admissibility.kv").read_bytes())
    assert outs[0] == outs[1]


def test_simulate_reproducible_and_headers(tmp_path, capsys):
    cfg_path = tmp_path / "mini.cfg"
    cfg_path.write_text(MINI)
    rc = main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "r1")])
    assert rc == 0
    rc = main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "r2")])
    assert rc == 0
    b1 = (tmp_path / "r1" / "path.csv").read_bytes()
    b2 = (tmp_path / "r2" / "path.csv").read_bytes()
    assert b1 == b2
    text = b1.decode()
    assert text.splitlines()[0].startswith("# fracsplap ")
    assert "time,l2_norm,gagliardo_seminorm,lq_norm,stopped_flag" in text
    # round-trip: the resolved header reproduces the identical run
    recovered = parse_resolved_header(tmp_path / "r1" / "path.csv")
    cfg_path2 = tmp_path / "recovered.cfg"
    cfg_path2.write_text(recovered.resolved_text())
    rc = main(["simulate", "--config", str(cfg_path2), "--out", str(tmp_path / "r3")])
    assert rc == 0
    assert (tmp_path / "r3" / "path.csv").read_bytes() == b1


def test_seed_override_changes_output(tmp_path):
    cfg_path = tmp_path / "mini.cfg"
    cfg_path.write_text(MINI)
    main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "a")])
    main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "b"), "--seed", "77"])
    assert (tmp_path / "a" / "path.csv").read_bytes() != (tmp_path / "b" / "path.csv").read_bytes()


def test_validation_failure_writes_nothing(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text(MINI + "\nbogus = 1\n")
    out = tmp_path / "out"
    rc = main(["simulate", "--config", str(bad), "--out", str(out)])
    assert rc == 2
    assert not out.exists()
    rc = main(["simulate", "--config", str(tmp_path / "missing.cfg"), "--out", str(out)])
    assert rc == 2
    assert not out.exists()


def test_moments_exponent_filtering(tmp_path, capsys):
    rc = main([
        "moments", "--config", str(CONFIG_DIR / "theorem2_ok.cfg"), "--out", str(tmp_path / "m"),
        "--threads", "2",
    ])
    assert rc == 0
    text = (tmp_path / "m" / "moments.csv").read_text()
    assert "p,x_scale,sup_moment,energy_moment,cross_moment,std_err,affinity_ratio" in text
    rows = [l for l in text.splitlines() if l and not l.startswith("#") and not l.startswith("p,")]
    assert len(rows) == 3  # the single requested p times three scales
    # sum(beta) = 0.5 puts the admissible supremum at 1.5: p = 2 is dropped
    filtered = tmp_path / "filtered.cfg"
    filtered.write_text(
        MINI.replace("noise.beta_b0 = 0.1", "noise.beta_b0 = 0.5")
        .replace("noise.gamma_g0 = 0.1", "noise.gamma_g0 = 0.5")
        + "noise.cutoff = 1\nharness.p_values = 1.0,2.0\nharness.x_scales = 0.0,1.0\n"
    )
    rc = main(["moments", "--config", str(filtered), "--out", str(tmp_path / "f"), "--threads", "2"])
    assert rc == 0
    err = capsys.readouterr().err
    assert "dropping moment exponents" in err
    text = (tmp_path / "f" / "moments.csv").read_text()
    rows = [l for l in text.splitlines() if l and not l.startswith("#") and not l.startswith("p,")]
    assert len(rows) == 2  # p = 1 only, two scales
    assert all(row.startswith("1.0,") for row in rows)


def test_moments_threads_bitwise_identical(tmp_path):
    outs = []
    for threads, sub in (("1", "t1"), ("4", "t4")):
        rc = main([
            "moments", "--config", str(CONFIG_DIR / "theorem2_ok.cfg"), "--out", str(tmp_path / sub),
            "--threads", threads,
        ])
        assert rc == 0
        outs.append((tmp_path / sub / "moments.csv").read_bytes())
    assert outs[0] == outs[1]


def test_converge_and_uniqueness_artifacts(tmp_path):
    rc = main(["converge", "--config", str(CONFIG_DIR / "deterministic_convergence.cfg"), "--out", str(tmp_path / "c")])
    assert rc == 0
    text = (tmp_path / "c" / "convergence.csv").read_text()
    assert "rung,gap,slope" in text and "# strong_order_slope" in text
    rc = main(["uniqueness", "--config", str(CONFIG_DIR / "uniqueness.cfg"), "--out", str(tmp_path / "u")])
    assert rc == 0
    text = (tmp_path / "u" / "stability.csv").read_text()
    assert "# identical_data_bitwise = true" in text
    assert "# gap_nonincreasing = true" in text


def test_selftest_passes(capsys):
    rc = main(["selftest"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "FAIL" not in out
