# SPDX-License-Identifier: Apache-2.0
"""Heterogeneity statistics for meta-analysis.

The numerics live in the compiled ``_metahet`` extension; this module only
adapts inputs (mappings for configs, JSON text for reports).
"""

import json as _json

from metahet._metahet import (
    MetahetError,
    MetahetInputError,
    __version__,
    effective_sample_size,
    example_names,
    hedges_correction,
    icc_ht,
    icc_ma,
    md_effect,
    panel,
    panel_two_arm,
    run_example,
    smd_effect,
)
from metahet import _metahet

__all__ = [
    "MetahetError",
    "MetahetInputError",
    "__version__",
    "effective_sample_size",
    "example_names",
    "hedges_correction",
    "icc_ht",
    "icc_ma",
    "md_effect",
    "panel",
    "panel_two_arm",
    "report_one_arm",
    "report_two_arm",
    "run_example",
    "simulate",
    "simulate_summary_csv",
    "smd_effect",
]


def _config_text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def report_one_arm(y, n, var_y):
    """Same JSON report the ``analyze`` command writes, as a dict."""
    return _json.loads(_metahet.report_one_arm(list(y), list(n), list(var_y)))


def report_two_arm(y_t, se_t, n_t, y_c, se_c, n_c, kind="md", smd_method="hedges"):
    return _json.loads(
        _metahet.report_two_arm(
            list(y_t), list(se_t), list(n_t), list(y_c), list(se_c), list(n_c), kind, smd_method
        )
    )


def simulate(config, draws=False):
    """Run a Monte Carlo study. ``config`` is a dict or JSON text using the
    CLI schema; the resolved config comes back under ``"config"``."""
    out = _metahet.simulate(_config_text(config), draws)
    out["config"] = _json.loads(out["config"])
    return out


def simulate_summary_csv(config):
    return _metahet.simulate_summary_csv(_config_text(config))
