"""The five intervention scenarios and their run configuration."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .disease import DiseaseParams, InfectiousnessProfile, SensitivityCurve
from .errors import ConfigurationError
from .tracer import TraceParams

APP_PROPORTIONS = (0.0, 0.30, 0.50, 0.70, 0.95)
ASYMPTOMATIC_RATIOS = (0.20, 0.40, 0.60, 0.80)
PERIODIC_INTERVAL = 14
EXTENDED_POPULATION = 5000
BASE_POPULATION = 180

SCENARIO_NAMES = {
    1: "quarantine first-degree contacts",
    2: "follow-up testing of 1st-3rd degree contacts",
    3: "pre-exposure notification",
    4: "pre-exposure notification with periodic testing",
    5: "scenario 4 on the extended graph",
}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario_id: int
    app_proportion: float = 0.0
    asymptomatic_ratio: float = 0.40
    followup_testing: bool = False
    pre_exposure: bool = False
    periodic_test_interval: int | None = None
    use_extended_graph: bool = False
    horizon_days: int = 120
    population: int = BASE_POPULATION
    trials: int = 1800
    seed: int = 20201221
    disease: DiseaseParams = field(default_factory=DiseaseParams)
    trace: TraceParams = field(default_factory=TraceParams)

    def __post_init__(self):
        if not 0.0 <= self.app_proportion <= 1.0:
            raise ConfigurationError("app_proportion must lie in [0, 1]")
        if not 0.0 <= self.asymptomatic_ratio <= 1.0:
            raise ConfigurationError("asymptomatic_ratio must lie in [0, 1]")
        if self.periodic_test_interval is not None and self.periodic_test_interval < 1:
            raise ConfigurationError("periodic_test_interval must be >= 1")
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")

    @property
    def disease_params(self):
        if self.disease.asymptomatic_ratio == self.asymptomatic_ratio:
            return self.disease
        return replace(self.disease, asymptomatic_ratio=self.asymptomatic_ratio)

    @property
    def name(self):
        return SCENARIO_NAMES.get(self.scenario_id, f"scenario {self.scenario_id}")

    def with_app(self, proportion):
        return replace(self, app_proportion=proportion)

    def to_dict(self):
        out = asdict(self)
        out["disease"]["profile"] = list(self.disease.profile.values)
        out["disease"]["sensitivity"] = list(self.disease.sensitivity.false_negative)
        return out


def build_scenario(scenario_id, app_proportion=0.0, asymptomatic_ratio=0.40, **overrides):
    """Flag combination for one of the five scenarios."""
    flags = {
        1: dict(),
        2: dict(followup_testing=True),
        3: dict(followup_testing=True, pre_exposure=True),
        4: dict(followup_testing=True, pre_exposure=True, periodic_test_interval=PERIODIC_INTERVAL),
        5: dict(followup_testing=True, pre_exposure=True, periodic_test_interval=PERIODIC_INTERVAL,
                use_extended_graph=True, population=EXTENDED_POPULATION, trials=500),
    }
    if scenario_id not in flags:
        raise ConfigurationError(f"unknown scenario {scenario_id!r}; expected 1-5")
    kwargs = dict(flags[scenario_id])
    kwargs.update(overrides)
    return ScenarioConfig(scenario_id, app_proportion, asymptomatic_ratio, **kwargs)


def count_app_users(population, proportion):
    return int(np.floor(proportion * population + 0.5 + 1e-9))


def assign_app_users(population, proportion, rng):
    """Boolean mask of a uniformly random subset of round(proportion * n) users."""
    if not 0.0 <= proportion <= 1.0:
        raise ConfigurationError("proportion must lie in [0, 1]")
    k = count_app_users(population, proportion)
    mask = np.zeros(population, dtype=bool)
    if k:
        mask[rng.choice(population, size=k, replace=False)] = True
    return mask


def periodic_test_set(day, interval, confirmed):
    """Everyone not already confirmed, on synchronised rounds ``day % interval == 0``."""
    confirmed = np.asarray(confirmed, dtype=bool)
    if interval is None or day <= 0 or day % interval:
        return np.zeros(0, dtype=np.int64)
    return np.flatnonzero(~confirmed)


def _from_mapping(cls, data):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigurationError(f"unknown {cls.__name__} fields: {sorted(unknown)}")
    return cls(**data)


def load_config(path_or_dict):
    """Build a ScenarioConfig from a JSON file or an already-parsed dict.

    ``scenario_id`` selects the flag defaults; any ScenarioConfig field can
    be overridden, and ``disease`` / ``trace`` hold parameter overrides.
    """
    if isinstance(path_or_dict, dict):
        data = dict(path_or_dict)
    else:
        with open(path_or_dict) as fh:
            data = json.load(fh)
    disease = dict(data.pop("disease", {}) or {})
    trace = dict(data.pop("trace", {}) or {})
    if "profile" in disease:
        disease["profile"] = InfectiousnessProfile(tuple(disease["profile"]))
    if "sensitivity" in disease:
        disease["sensitivity"] = SensitivityCurve(tuple(disease["sensitivity"]))
    sid = data.pop("scenario_id", 1)
    app = data.pop("app_proportion", 0.0)
    asym = data.pop("asymptomatic_ratio", 0.40)
    cfg = build_scenario(sid, app, asym, **data)
    if disease:
        base = asdict(DiseaseParams())
        base.pop("profile"), base.pop("sensitivity")
        cfg = replace(cfg, disease=_from_mapping(DiseaseParams, {**base, **disease}))
    if trace:
        cfg = replace(cfg, trace=_from_mapping(TraceParams, {**asdict(TraceParams()), **trace}))
    return cfg
