"""Built-in scenario configurations.

Each preset is a complete, runnable scenario config (JSON-serializable
dict).  The two regime presets (``twovalue-K8`` and ``example2-power``)
share time horizon, domain and tracker settings, so their speed-gap
signatures are directly comparable.
"""

from __future__ import annotations

import copy

from .errors import ParameterError
from .media import geometric_sequences

_COSINE = {"kind": "cosine", "m": 2.0, "amp": 1.0}


def _two_value_medium_dict(K1: float, K2: float, x0: float, x_max: float) -> dict:
    seq = geometric_sequences(4.0, 1.0, K1, K2, x0, x_max)
    return {"two_value": {"mu_plus": 4.0, "mu_minus": 1.0,
                          "x_seq": list(seq.x_seq), "y_seq": list(seq.y_seq),
                          "K1": K1, "K2": K2}}


def _build_presets() -> dict:
    presets = {}

    presets["homogeneous"] = {
        "scenario": "homogeneous",
        "medium": {"profile": {"kind": "constant", "m": 1.0},
                   "phase": {"kind": "affine", "L": 1.0}},
        "solver": {"X_max": 500.0, "n_cells": 5000, "dt": 0.02, "t_end": 200.0},
        "tracker": {"level": 0.5, "window": 10.0, "transient": 0.3},
        "theory": {"w_infinity": True, "wL": [], "bounds": True},
        "expect": {"w_low_in": [1.94, 2.06], "w_up_in": [1.94, 2.06]},
    }

    presets["example1-log-power"] = {
        "scenario": "example1-log-power",
        "medium": {"profile": dict(_COSINE),
                   "phase": {"kind": "log_power", "alpha": 0.5, "beta": 1.0}},
        "solver": {"X_max": 2000.0, "n_cells": 8000, "dt": 0.06, "t_end": 800.0},
        "tracker": {"level": 0.5, "window": 25.0, "transient": 0.3},
        "theory": {"w_infinity": True, "wL": [], "bounds": True},
        "expect": {},
    }

    presets["example2-power"] = {
        "scenario": "example2-power",
        "medium": {"profile": dict(_COSINE),
                   "phase": {"kind": "power", "alpha": 0.5}},
        "solver": {"X_max": 4000.0, "n_cells": 16000, "dt": 0.06, "t_end": 1400.0},
        "tracker": {"level": 0.5, "window": 100.0, "transient": 0.3},
        "theory": {"w_infinity": True, "wL": [], "bounds": True},
        "expect": {"gap_max": 0.3},
    }

    presets["example3-x-over-log"] = {
        "scenario": "example3-x-over-log",
        "medium": {"profile": dict(_COSINE),
                   "phase": {"kind": "x_over_log", "alpha": 1.0}},
        "solver": {"X_max": 2000.0, "n_cells": 8000, "dt": 0.06, "t_end": 700.0},
        "tracker": {"level": 0.5, "window": 50.0, "transient": 0.3},
        "theory": {"w_infinity": True, "wL": [], "bounds": True},
        "expect": {},
    }

    twovalue = {
        "scenario": "twovalue-K8",
        "medium": _two_value_medium_dict(8.0, 8.0, 20.0, 4000.0),
        "solver": {"X_max": 4000.0, "n_cells": 16000, "dt": 0.05, "t_end": 1400.0},
        "tracker": {"level": 0.5, "window": 100.0, "transient": 0.3},
        "theory": {"w_infinity": False, "wL": [], "bounds": True},
        "expect": {"w_up_min": 3.4, "w_low_max": 2.5, "gap_min": 1.0},
    }
    presets["twovalue-K8"] = twovalue
    presets["twovalue-K"] = copy.deepcopy(twovalue)
    presets["twovalue-K"]["scenario"] = "twovalue-K"

    presets["convergence-wL"] = {
        "scenario": "convergence-wL",
        "medium": {"profile": dict(_COSINE), "phase": {"kind": "affine", "L": 1.0}},
        "solver": None,
        "tracker": {"level": 0.5, "window": 10.0, "transient": 0.3},
        "theory": {"w_infinity": True, "wL": [5.0, 20.0, 80.0], "bounds": True},
        "expect": {"wL_gaps_decreasing": True},
    }

    return presets


_PRESETS = _build_presets()


def list_presets() -> list[str]:
    """Names of every built-in scenario preset."""
    return sorted(_PRESETS)


def preset_config(name: str) -> dict:
    """A deep copy of the named preset's config."""
    if name not in _PRESETS:
        raise ParameterError(
            f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return copy.deepcopy(_PRESETS[name])
