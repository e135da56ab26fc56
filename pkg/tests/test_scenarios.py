import json

import numpy as np
import pytest

from tracenet.errors import ConfigurationError
from tracenet.scenarios import (assign_app_users, build_scenario, count_app_users, load_config,
                                periodic_test_set)


@pytest.mark.parametrize("sid, followup, pre, periodic, extended", [
    (1, False, False, None, False),
    (2, True, False, None, False),
    (3, True, True, None, False),
    (4, True, True, 14, False),
    (5, True, True, 14, True),
])
def test_scenario_flags(sid, followup, pre, periodic, extended):
    cfg = build_scenario(sid, 0.5, 0.4)
    assert (cfg.followup_testing, cfg.pre_exposure) == (followup, pre)
    assert cfg.periodic_test_interval == periodic
    assert cfg.use_extended_graph == extended
    assert cfg.population == (5000 if extended else 180)


@pytest.mark.parametrize("sid", [0, 6, "two"])
def test_unknown_scenario(sid):
    with pytest.raises(ConfigurationError):
        build_scenario(sid)


def test_out_of_range_proportion():
    with pytest.raises(ConfigurationError):
        build_scenario(1, 1.2)


def test_app_user_counts(rng):
    assert count_app_users(180, 0.5) == 90
    assert count_app_users(180, 0.3) == 54
    assert count_app_users(180, 0.95) == 171
    assert not assign_app_users(180, 0.0, rng).any()
    assert assign_app_users(180, 1.0, rng).all()
    assert assign_app_users(180, 0.5, rng).sum() == 90


def test_periodic_rounds():
    confirmed = np.zeros(10, dtype=bool)
    confirmed[3] = True
    days = [t for t in range(1, 121) if periodic_test_set(t, 14, confirmed).size]
    assert days == list(range(14, 113, 14))
    assert len(days) == 8
    assert 3 not in periodic_test_set(28, 14, confirmed)
    assert periodic_test_set(28, None, confirmed).size == 0


def test_load_config_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"scenario_id": 4, "app_proportion": 0.7, "trials": 20,
                                "disease": {"p": 0.05}, "trace": {"cutoff": 0.2}}))
    cfg = load_config(str(path))
    assert cfg.scenario_id == 4 and cfg.periodic_test_interval == 14
    assert cfg.app_proportion == 0.7 and cfg.trials == 20
    assert cfg.disease.p == 0.05 and cfg.trace.cutoff == 0.2
    assert cfg.disease.recovery_prob == 0.11


def test_load_config_rejects_unknown_field():
    with pytest.raises(ConfigurationError):
        load_config({"disease": {"beta": 1.0}})
