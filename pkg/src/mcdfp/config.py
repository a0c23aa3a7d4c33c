"""Scenario configuration: named presets, defaults, and strict file parsing."""

from __future__ import annotations

from pathlib import Path

import yaml

from .agent import LearnParams
from .channel import CommParams
from .engine import ScenarioConfig, Variant
from .mobility import MobilityParams


class ConfigError(Exception):
    """Unreadable, malformed, or out-of-schema configuration input."""


SCENARIO1_STARTS = [[0.0, 0.0]] * 5
SCENARIO1_TARGETS = [[0.0, 1.0], [1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]
SCENARIO2_STARTS = [[-0.5, 0.0], [-0.5, -0.5], [-0.5, 0.5], [0.5, 0.5], [0.5, -0.5]]
SCENARIO2_TARGETS = [[0.0, 0.0], [-0.5, 1.5], [-0.5, -1.5], [0.5, 1.5], [0.5, -1.5]]

PRESETS = {
    "scenario1": {"robots": SCENARIO1_STARTS, "targets": SCENARIO1_TARGETS, "alpha": 0.1},
    "scenario2": {"robots": SCENARIO2_STARTS, "targets": SCENARIO2_TARGETS, "alpha": 0.05},
}

_LEARN_KEYS = {"rho1", "rho2", "inertia"}
_COMM_KEYS = {"eta1", "eta2", "delta1", "fading_r"}
_MOBILITY_KEYS = {"alpha", "dt", "coverage_tol", "clamp_step"}
_TOP_KEYS = {
    "robots",
    "targets",
    "learn",
    "comm",
    "mobility",
    "horizon",
    "variant",
    "seed",
    "replications",
}


def _check_keys(section: dict, allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} key(s): {', '.join(sorted(unknown))}")


def build_config(
    robots,
    targets,
    *,
    variant: str | Variant = Variant.MCDFP,
    alpha: float | None = None,
    horizon: int = 100,
    seed: int = 0,
    replications: int = 50,
    learn: dict | None = None,
    comm: dict | None = None,
    mobility: dict | None = None,
) -> ScenarioConfig:
    """Assemble a ScenarioConfig from raw pieces, applying the defaults.

    An explicit `alpha` wins over any `mobility` section value.
    """
    learn = dict(learn or {})
    comm = dict(comm or {})
    mobility = dict(mobility or {})
    _check_keys(learn, _LEARN_KEYS, "learn")
    _check_keys(comm, _COMM_KEYS, "comm")
    _check_keys(mobility, _MOBILITY_KEYS, "mobility")
    if alpha is not None:
        mobility["alpha"] = alpha
    try:
        return ScenarioConfig(
            robot_starts=robots,
            targets=targets,
            learn=LearnParams(**learn),
            comm=CommParams(**comm),
            mobility=MobilityParams(**mobility),
            horizon=int(horizon),
            variant=Variant(variant),
            seed=int(seed),
            replications=int(replications),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def preset_config(name: str, **overrides) -> ScenarioConfig:
    """One of the built-in scenarios, with optional overrides (variant, alpha,
    seed, replications, horizon, learn/comm/mobility sections).

    Overrides passed as None are ignored, so CLI flags can be forwarded as-is.
    """
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    preset = PRESETS[name]
    kwargs = {k: v for k, v in overrides.items() if v is not None}
    mobility = dict(kwargs.pop("mobility", None) or {})
    if "alpha" not in kwargs:
        mobility.setdefault("alpha", preset["alpha"])
    return build_config(preset["robots"], preset["targets"], mobility=mobility, **kwargs)


def load_config_file(path: str | Path) -> ScenarioConfig:
    """Parse a YAML (or JSON, which YAML subsumes) scenario file.

    Unknown keys are a hard error; missing optional keys fall back to the
    standard defaults. `robots` and `targets` are required.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must contain a mapping at the top level")
    _check_keys(doc, _TOP_KEYS, "config")
    if "robots" not in doc or "targets" not in doc:
        raise ConfigError("config file must define 'robots' and 'targets'")
    kwargs = {}
    for key in ("variant", "horizon", "seed", "replications", "learn", "comm", "mobility"):
        if key in doc:
            kwargs[key] = doc[key]
    for section in ("learn", "comm", "mobility"):
        if section in kwargs and not isinstance(kwargs[section], dict):
            raise ConfigError(f"config section '{section}' must be a mapping")
    return build_config(doc["robots"], doc["targets"], **kwargs)
