"""JSON experiment configuration: schema validation and spec construction."""

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema

from .montecarlo import ExperimentSpec
from .scenario import Scenario, linear_to_db

PAPER_PFA = 1e-4
PAPER_TRIALS_THRESHOLD = 1_000_000

DEFAULTS = {
    "cnr_db": 30.0,
    "inr_db": 30.0,
    "sigma_n2": 1.0,
    "one_lag_corr": 0.95,
    "pfa": 1e-2,
    "seed": 0,
    "trials_threshold": 200_000,
    "trials_pd": 5000,
    "monte_carlo": False,
    "format": "csv",
}


class ConfigError(ValueError):
    """Configuration is malformed or violates the schema."""


@lru_cache(maxsize=None)
def schema():
    text = resources.files("invdet").joinpath("configs/experiment.schema.json").read_text()
    return json.loads(text)


def builtin_configs():
    """Names of the shipped example configs."""
    root = resources.files("invdet").joinpath("configs")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.startswith("fig") and p.name.endswith(".json"))


def read_config(path):
    """Load a config from ``path`` or, failing that, from a shipped config name."""
    p = Path(path)
    if p.is_file():
        text = p.read_text()
    else:
        name = p.name[:-5] if p.name.endswith(".json") else p.name
        if name not in builtin_configs():
            raise ConfigError(f"no such config file: {path}")
        text = resources.files("invdet").joinpath(f"configs/{name}.json").read_text()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from None
    return validate(cfg)


def validate(cfg):
    """Schema-check ``cfg`` and fill defaults; unknown keys are rejected."""
    try:
        jsonschema.validate(cfg, schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise ConfigError(f"config error at {where}: {exc.message}") from None
    out = dict(DEFAULTS)
    out.update(cfg)
    return out


def scenario_from_config(cfg) -> Scenario:
    return Scenario.from_settings(
        N=cfg["N"], K=cfg["K"], r=cfg["r"], t=cfg["t"],
        signal_freqs=cfg.get("signal_freqs"),
        jammer_freqs=cfg.get("jammer_freqs"),
        cnr_db=cfg["cnr_db"],
        sigma_n2=cfg["sigma_n2"],
        one_lag_corr=cfg["one_lag_corr"],
    )


def scenario_to_config(scenario, inr_db=None):
    """Config fields that rebuild ``scenario`` through :func:`scenario_from_config`."""
    if not scenario.signal_freqs or not scenario.jammer_freqs:
        raise ConfigError("only scenarios built from frequencies can be serialized")
    cnr = scenario.sigma_c2 / scenario.sigma_n2
    return {
        "N": scenario.N, "K": scenario.K, "r": scenario.r, "t": scenario.t,
        "signal_freqs": [float(f) for f in scenario.signal_freqs],
        "jammer_freqs": [float(f) for f in scenario.jammer_freqs],
        "cnr_db": float(linear_to_db(cnr)) if cnr > 0 else None,
        "inr_db": inr_db,
        "sigma_n2": float(scenario.sigma_n2),
        "one_lag_corr": float(scenario.one_lag_corr),
    }


def spec_from_config(cfg, threads=1, paper_scale=False, monte_carlo=None) -> ExperimentSpec:
    """Build an :class:`ExperimentSpec`; ``paper_scale`` switches to Pfa 1e-4 with 1e6 threshold trials."""
    pfa = PAPER_PFA if paper_scale else cfg["pfa"]
    trials = max(cfg["trials_threshold"], PAPER_TRIALS_THRESHOLD) if paper_scale else cfg["trials_threshold"]
    return ExperimentSpec(
        scenario=scenario_from_config(cfg),
        detectors=cfg["detectors"],
        pfa=pfa,
        sinr_grid_db=cfg["sinr_grid_db"],
        trials_threshold=trials,
        trials_pd=cfg["trials_pd"],
        seed=cfg["seed"],
        inr_db=cfg["inr_db"],
        monte_carlo=cfg["monte_carlo"] if monte_carlo is None else monte_carlo,
        threads=threads,
    )
