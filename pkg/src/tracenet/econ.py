"""Economic cost of an ensemble and report tables."""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .errors import UndefinedInputError

REPORT_COLUMNS = ("scenario", "app_proportion", "asymptomatic_ratio", "infected", "q_false",
                  "q_true", "q_tested", "tests", "total_cost", "per_user_value")


@dataclass(frozen=True)
class CostModel:
    cost_per_quarantine_day: float = 358.0
    cost_per_test: float = 127.0
    cost_per_infection: float = 8500.0

    def __post_init__(self):
        if min(self.cost_per_quarantine_day, self.cost_per_test, self.cost_per_infection) < 0:
            raise ValueError("costs must be non-negative")


def _metric(agg, key):
    if isinstance(agg, dict):
        return float(agg.get(key, 0.0))
    return float(agg.means[key])


def economic_cost(agg, cost_model: CostModel = CostModel()):
    """Infections, quarantine days (all three kinds) and tests priced in USD."""
    quarantine = sum(_metric(agg, k) for k in
                     ("quarantine_days_false", "quarantine_days_true", "quarantine_days_tested"))
    return (_metric(agg, "final_infected") * cost_model.cost_per_infection
            + quarantine * cost_model.cost_per_quarantine_day
            + _metric(agg, "tests_used") * cost_model.cost_per_test)


def per_user_value(scenario_agg, baseline_agg, n_app_users, cost_model: CostModel = CostModel()):
    """Cost saved relative to the baseline, per app user (may be negative)."""
    if n_app_users <= 0:
        raise UndefinedInputError("per-user value needs at least one app user")
    return (economic_cost(baseline_agg, cost_model) - economic_cost(scenario_agg, cost_model)) / n_app_users


def report_row(config, agg, baseline_agg=None, cost_model: CostModel = CostModel()):
    from .scenarios import count_app_users

    m = agg.means if not isinstance(agg, dict) else agg
    users = count_app_users(config.population, config.app_proportion)
    value = ""
    if baseline_agg is not None and users > 0:
        value = round(per_user_value(agg, baseline_agg, users, cost_model), 2)
    return {
        "scenario": config.scenario_id,
        "app_proportion": config.app_proportion,
        "asymptomatic_ratio": config.asymptomatic_ratio,
        "infected": round(m["final_infected"], 2),
        "q_false": round(m["quarantine_days_false"], 2),
        "q_true": round(m["quarantine_days_true"], 2),
        "q_tested": round(m["quarantine_days_tested"], 2),
        "tests": round(m["tests_used"], 2),
        "total_cost": round(economic_cost(agg, cost_model), 2),
        "per_user_value": value,
    }


def write_report(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def read_report(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
