"""Single trials, ensembles, R0 calibration and app-usage sweeps."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .disease import E, I, R, S, UNSET, Population, TestQueue, step_progression, step_transmission, \
    symptomatic_seekers
from .network import effective_day, extend_graph, synthesize_day
from .scenarios import assign_app_users, build_scenario, periodic_test_set
from .tracer import Tracer

log = logging.getLogger(__name__)

SERIES = ("S", "E", "I", "R", "Q", "T", "U", "tests")
TOTALS = ("final_infected", "quarantine_days_false", "quarantine_days_true",
          "quarantine_days_tested", "tests_used", "secondary_infections_of_seed")


@dataclass
class TrialResult:
    """Outcome of one trial.

    ``series[k][t]`` is the state at the end of day ``t`` (``t = 0`` is the
    seeded initial state). ``Q`` counts quarantined people without a positive
    result, ``T`` confirmed cases still isolating, ``U`` infected people
    (E or I) without a positive result.
    """

    series: dict
    final_infected: int
    quarantine_days_false: int
    quarantine_days_true: int
    quarantine_days_tested: int
    tests_used: int
    secondary_infections_of_seed: int
    seed_person: int = -1
    n_app_users: int = 0
    confirmed_uninfected: int = 0

    def totals(self):
        return {k: getattr(self, k) for k in TOTALS}

    def __eq__(self, other):
        if not isinstance(other, TrialResult):
            return NotImplemented
        return (self.totals() == other.totals()
                and all(np.array_equal(self.series[k], other.series[k]) for k in SERIES))


@dataclass
class AggregateResult:
    means: dict
    mean_series: dict
    trials: int
    std: dict = field(default_factory=dict)
    config: object = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("an aggregate needs at least one trial")

    def __getitem__(self, key):
        return self.means[key]

    @property
    def infected(self):
        return self.means["final_infected"]

    def stderr(self, key):
        return self.std.get(key, 0.0) / np.sqrt(self.trials)


def trial_rng(master_seed, trial_index):
    """Independent generator for one trial of an ensemble."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial_index,)))


def _as_rng(rng_seed):
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    if isinstance(rng_seed, tuple):
        return trial_rng(*rng_seed)
    return np.random.default_rng(rng_seed)


def run_trial(config, graph, seed_person, rng_seed, *, calibration=False):
    """Simulate one outbreak seeded by ``seed_person``.

    Daily order: deliver due test results, refresh the tracer and the
    quarantine/notification state, build the effective contact graph,
    transmit, progress, then sample today's tests. With ``calibration`` the
    run stops once the seed can no longer infect anyone.
    """
    rng = _as_rng(rng_seed)
    n = graph.population_size
    if not 0 <= seed_person < n:
        raise ValueError(f"seed_person {seed_person} outside population of {n}")
    H = config.horizon_days
    params = config.disease_params
    profile = params.profile
    last_infectious_offset = int(profile.offsets[-1])

    app = assign_app_users(n, config.app_proportion, rng)
    pop = Population(n, app)
    tracer = Tracer(n, H, app, config.trace) if app.any() else None
    queue = TestQueue()
    tally = np.zeros(n, dtype=np.int64)
    pop.expose([seed_person], 0, params, rng)

    ser = {k: np.zeros(H + 1, dtype=np.int64) for k in SERIES}
    counts = pop.counts()
    for k, c in zip("SEIR", counts):
        ser[k][0] = c
    ser["U"][0] = counts[E] + counts[I]
    q_false = q_true = q_tested = 0
    no_factors = None

    t = 0
    for t in range(1, H + 1):
        # 1. results from earlier samples
        new_pos = queue.deliver(pop, t)
        if tracer is not None and new_pos.size:
            tracer.report_positive(new_pos, t)
            already = new_pos[pop.compartment[new_pos] == R]
            if already.size:
                tracer.report_recovery(already, t)

        # 2. tracing state for today
        confirmed = pop.confirmed
        isolating = confirmed & (pop.compartment != R)
        followup = np.zeros(0, dtype=np.int64)
        factors = no_factors
        if tracer is not None:
            tracer.update_exposure_matrix(t - 1)
            tracer.classify(t)
            quarantined = tracer.quarantine_set(isolating, confirmed)
            if config.pre_exposure:
                factors = tracer.notification_factors()
            if config.followup_testing:
                followup = tracer.followup_test_set(t, confirmed)
        else:
            quarantined = isolating
        pop.in_quarantine = quarantined

        # 3. today's contacts
        day = effective_day(synthesize_day(graph.base_days, rng), quarantined, factors)
        if tracer is not None:
            tracer.record_contacts(day, t)

        # 4-5. disease
        step_transmission(day, pop, t, params, rng, profile=profile, infector_tally=tally)
        recovered, _ = step_progression(pop, t, params, rng)
        if tracer is not None and recovered.size:
            tracer.report_recovery(recovered[confirmed[recovered]], t)

        # 6. tests sampled today
        seekers = symptomatic_seekers(pop, t, params, rng)
        periodic = periodic_test_set(t, config.periodic_test_interval, confirmed)
        if followup.size or periodic.size:
            ids = np.union1d(np.union1d(seekers, followup), periodic)
            ids = ids[~confirmed[ids] & ~pop.pending[ids]]
        else:
            ids = seekers
        before = queue.administered
        queue.administer(pop, ids, t, params, rng)

        comp = pop.compartment
        counts = np.bincount(comp, minlength=4)
        for k, c in zip("SEIR", counts):
            ser[k][t] = c
        infected_now = (comp == E) | (comp == I)
        tested = quarantined & confirmed
        untested_q = quarantined & ~confirmed
        n_tested = int(tested.sum())
        n_true = int((untested_q & infected_now).sum())
        n_untested_q = int(untested_q.sum())
        q_tested += n_tested
        q_true += n_true
        q_false += n_untested_q - n_true
        ser["Q"][t] = n_untested_q
        ser["T"][t] = n_tested
        ser["U"][t] = int((infected_now & ~pop.confirmed).sum())
        ser["tests"][t] = queue.administered - before

        if calibration:
            c = comp[seed_person]
            if c == R or (c == I and t - pop.onset_day[seed_person] >= last_infectious_offset):
                break
        elif counts[E] + counts[I] == 0 and len(queue) == 0 and (
                tracer is None or not tracer.active(t)):
            _fast_forward(ser, t, H, config, pop.confirmed)
            break

    final = int(ser["E"][H] + ser["I"][H] + ser["R"][H]) if not calibration else \
        int(n - (pop.compartment == S).sum())
    return TrialResult(
        series=ser,
        final_infected=final,
        quarantine_days_false=q_false,
        quarantine_days_true=q_true,
        quarantine_days_tested=q_tested,
        tests_used=int(ser["tests"].sum()),
        secondary_infections_of_seed=int(tally[seed_person]),
        seed_person=int(seed_person),
        n_app_users=int(app.sum()),
        confirmed_uninfected=int((pop.confirmed & (pop.exposure_day == UNSET)).sum()),
    )


def _fast_forward(ser, t, H, config, confirmed):
    """Fill the remaining days of an outbreak that has died out.

    Nothing changes any more except periodic test rounds, which keep testing
    everyone not already confirmed.
    """
    for k in "SEIR":
        ser[k][t + 1:] = ser[k][t]
    ser["Q"][t + 1:] = 0
    ser["T"][t + 1:] = 0
    ser["U"][t + 1:] = 0
    interval = config.periodic_test_interval
    if interval:
        eligible = int((~confirmed).sum())
        for day in range(t + 1, H + 1):
            if day % interval == 0:
                ser["tests"][day] = eligible


def seed_people(n, trials, master_seed):
    """Seed person per trial: a fixed random order of everyone, cycled."""
    perm = np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(2**31,))).permutation(n)
    return perm[np.arange(trials) % n]


def graph_for(config, graph):
    """The contact graph a config runs on, extending it when requested."""
    if config.use_extended_graph and graph.population_size < config.population:
        rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(2**31 + 1,)))
        log.info("extending graph from %d to %d people", graph.population_size, config.population)
        graph = extend_graph(graph, config.population, rng)
    return graph


def _run_chunk(args):
    config, graph, items, calibration = args
    return [run_trial(config, graph, int(sp), (config.seed, int(k)), calibration=calibration)
            for k, sp in items]


def aggregate(results, config=None):
    if not results:
        raise ValueError("no trials to aggregate")
    means, std = {}, {}
    for key in TOTALS:
        vals = np.array([getattr(r, key) for r in results], dtype=float)
        means[key] = float(vals.mean())
        std[key] = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
    mean_series = {k: np.mean([r.series[k] for r in results], axis=0) for k in SERIES}
    return AggregateResult(means, mean_series, len(results), std, config)


def run_trials(config, graph, *, calibration=False, workers=1, progress=None):
    """All trials of an ensemble, ordered by trial index."""
    graph = graph_for(config, graph)
    seeds = seed_people(graph.population_size, config.trials, config.seed)
    items = list(enumerate(seeds))
    if workers and workers > 1:
        chunks = [items[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_run_chunk, [(config, graph, c, calibration) for c in chunks]))
        results = [None] * len(items)
        for chunk, part in zip(chunks, parts):
            for (k, _), res in zip(chunk, part):
                results[k] = res
        return results
    results = []
    for k, sp in items:
        results.append(run_trial(config, graph, int(sp), (config.seed, k), calibration=calibration))
        if progress is not None:
            progress(k + 1, len(items))
    return results


def run_ensemble(config, graph, *, workers=1, progress=None):
    """Mean metrics over ``config.trials`` independent trials."""
    return aggregate(run_trials(config, graph, workers=workers, progress=progress), config)


def calibration_config(p, trials=1800, seed=20201221, horizon_days=120):
    """Scenario 1 without app users and without symptomatic testing.

    Nobody is isolated, so the seed's secondary cases measure the
    unmitigated reproduction number.
    """
    base = build_scenario(1, 0.0, 0.40, trials=trials, seed=seed, horizon_days=horizon_days)
    return replace(base, disease=replace(base.disease, p=float(p), daily_symptomatic_test_prob=0.0))


def default_p_grid():
    """100 values of p from 0 in steps of 0.0025."""
    return np.round(np.arange(100) * 0.0025, 6)


def calibrate_r0(graph, p_grid=None, trials=1800, seed=20201221, workers=1):
    """Mean number of people infected directly by the seed, for each p."""
    grid = default_p_grid() if p_grid is None else p_grid
    out = []
    for p in grid:
        cfg = calibration_config(p, trials=trials, seed=seed)
        results = run_trials(cfg, graph, calibration=True, workers=workers)
        r0 = float(np.mean([r.secondary_infections_of_seed for r in results]))
        log.info("p=%.4f R0=%.3f", p, r0)
        out.append((float(p), r0))
    return out


def sweep_app_usage(config, graph, proportions=None, workers=1):
    """Mean infections as app usage goes from 0% to 100% in steps of 5%."""
    props = np.round(np.arange(21) * 0.05, 2) if proportions is None else proportions
    rows = []
    for prop in props:
        agg = run_ensemble(replace(config, app_proportion=float(prop)), graph, workers=workers)
        rows.append((float(prop), agg.infected, agg))
    return rows
