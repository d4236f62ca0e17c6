"""Admissibility reports for the shipped example configurations.

A report evaluates the growth-index algebra (kappa, the gap condition, the
moment-exponent range) for the active setting and every applicable theorem
check; each failed check names the violated inequality with its margin.
"""

from pathlib import Path

from fracsplap import build_bundle, parse_config_file

CONFIG_DIR = Path(__file__).parent.parent / "configs"

for name in ("theorem2_ok", "theorem2_beta_boundary", "theorem3_ok", "theorem1_ok"):
    bundle = build_bundle(parse_config_file(CONFIG_DIR / f"{name}.cfg"))
    report = bundle.admissibility()
    print(f"===== {name} =====")
    print(report.to_text())
