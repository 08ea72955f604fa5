"""f-mean curvature flow simulator and Harnack verification."""

import json
import os
from pathlib import Path

_bundled = Path(__file__).with_name("scenarios")
if "FMCF_SCENARIOS" not in os.environ and _bundled.is_dir():
    os.environ["FMCF_SCENARIOS"] = str(_bundled)

from . import _core  # noqa: E402
from ._core import (  # noqa: E402,F401
    ConfigError,
    DegenerateMeshError,
    DomainError,
    Error,
    InputError,
    bundled_scenarios,
    check_names,
    circle,
    describe,
    ellipse,
    geometry,
    harnack_min,
    radial_harnack,
    radial_solution,
    simulate,
)


def run_scenario(config, out_root=None, tol_scale=1.0, run_checks=True, write_files=True):
    """Run a scenario given as a path or a dict; returns (exit_code, summary, out_dir)."""
    if isinstance(config, dict):
        spec = json.dumps(config)
    else:
        spec = Path(config).read_text()
    if out_root is None:
        out_root = os.environ.get("FMCF_OUT", "fmcf_out")
    code, summary, out_dir = _core.run_scenario_json(spec, str(out_root), tol_scale, run_checks, write_files)
    return code, json.loads(summary), out_dir
