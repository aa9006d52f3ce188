"""Cooperative sequential adsorption: sampling core and verification harness.

Thin wrapper around the compiled extension. Configurations may be passed as
JSON text or as plain dicts; verification reports come back as dicts.
"""

import json as _json

from ._core import (
    RefusalError,
    StallError,
    ball_volume_coeff,
    cumulant_estimate,
)
from . import _core as _impl

__all__ = [
    "RefusalError",
    "StallError",
    "ball_volume_coeff",
    "canonical_config",
    "compute_g",
    "compute_j",
    "compute_un",
    "config_issues",
    "cumulant_estimate",
    "execute",
    "joint_density_oracle",
    "neighbor_count",
    "simulate",
    "verify",
]


def _as_text(config):
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def config_issues(config):
    """Validation issues as (where, message) pairs; empty when valid."""
    return _impl.config_issues(_as_text(config))


def canonical_config(config):
    """Parse and normalize a configuration; returns a dict."""
    return _json.loads(_impl.canonical_config(_as_text(config)))


def simulate(config, m=None, seed=None, replicate=0):
    """Sample one replicate; returns (points, attempts_per_point)."""
    return _impl.simulate(_as_text(config), m, seed, replicate)


def neighbor_count(config, points, x):
    return _impl.neighbor_count(_as_text(config), points, x)


def compute_j(config):
    return _impl.compute_j(_as_text(config))


def compute_g(config):
    return _impl.compute_g(_as_text(config))


def compute_un(config, n):
    return _impl.compute_un(_as_text(config), n)


def joint_density_oracle(config, points):
    return _impl.joint_density_oracle(_as_text(config), points)


def verify(test, config):
    """Run one verification test; returns the report as a dict."""
    return _json.loads(_impl.verify_json(test, _as_text(config)))


def execute(command, config):
    """Run a CLI command (writes artifacts); returns the exit status."""
    return _impl.execute(command, _as_text(config))
