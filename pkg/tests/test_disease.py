import numpy as np
import pytest
from scipy import stats

from tracenet.disease import (E, I, R, S, DiseaseParams, InfectiousnessProfile, Population,
                              TestQueue, gamma_profile, infectiousness, sample_incubation,
                              step_progression, step_transmission, symptomatic_seekers,
                              test_sensitivity, transmission_probability)
from tracenet.network import DaySnapshot

PARAMS = DiseaseParams()
PROFILE = InfectiousnessProfile()


def test_incubation_median_and_floor(rng):
    x = sample_incubation(PARAMS, rng, size=100_000)
    assert np.median(x) == 5
    assert x.min() >= 1


def test_incubation_mostly_two_to_fourteen_days(rng):
    # Oracle: P(1.5 <= X < 14.5) for the log-normal itself.
    dist = stats.lognorm(s=PARAMS.incubation_sigma, scale=np.exp(PARAMS.incubation_mu))
    expected = dist.cdf(14.5) - dist.cdf(1.5)
    assert expected >= 0.95
    x = sample_incubation(PARAMS, rng, size=100_000)
    inside = np.mean((x >= 2) & (x <= 14))
    assert inside == pytest.approx(expected, abs=0.003)
    assert inside >= 0.95


def test_profile_shape():
    assert infectiousness(PROFILE, -10) == 0.0
    assert infectiousness(PROFILE, 11) == 0.0
    assert PROFILE.offsets[np.argmax(PROFILE.table)] == -1
    assert PROFILE.table.sum() == pytest.approx(1.0, abs=1e-9)
    assert PROFILE.top_mean(6) == pytest.approx(0.11, abs=0.005)


def test_profile_table_matches_shifted_gamma():
    np.testing.assert_allclose(PROFILE.table, gamma_profile(3.13683377, 2.10591954), atol=2e-6)


def test_transmission_probability():
    assert transmission_probability(0, 0, PARAMS) == 0.0
    zero = DiseaseParams(p=0.0)
    assert np.all(transmission_probability(np.arange(500), -1, zero) == 0.0)
    flat = InfectiousnessProfile(values=(1.0,), start=0)
    q = transmission_probability(180, 0, DiseaseParams(p=0.011), flat)
    assert q == pytest.approx(1 - 0.989 ** 180)
    assert q == pytest.approx(0.8634, abs=5e-4)


def _infected_pop(n, infectious, day=0, onset=0):
    pop = Population(n)
    pop.compartment[infectious] = I
    pop.onset_day[infectious] = onset
    pop.exposure_day[infectious] = onset - 3
    return pop


def test_no_infectious_means_no_exposure(rng):
    pop = Population(10)
    day = DaySnapshot.from_dict(10, {(0, 1): 500, (2, 3): 500})
    assert step_transmission(day, pop, 1, PARAMS, rng).size == 0
    assert np.all(pop.compartment == S)


def test_two_infectors_combine_independently():
    # node 2 is susceptible with infectious neighbours 0 (d=20) and 1 (d=50).
    day = DaySnapshot.from_dict(3, {(0, 2): 20, (1, 2): 50})
    q1 = transmission_probability(20, 0, PARAMS)
    q2 = transmission_probability(50, 0, PARAMS)
    expected = 1 - (1 - q1) * (1 - q2)
    rng = np.random.default_rng(3)
    trials = 100_000
    hits = 0
    for _ in range(trials):
        pop = _infected_pop(3, [0, 1])
        hits += step_transmission(day, pop, 0, PARAMS, rng).size
    assert hits / trials == pytest.approx(expected, abs=0.01)


def test_newly_exposed_get_state(rng):
    pop = _infected_pop(2, [0])
    day = DaySnapshot.from_dict(2, {(0, 1): 10_000})
    out = step_transmission(day, pop, 4, DiseaseParams(p=1.0), rng)
    assert out.tolist() == [1]
    assert pop.compartment[1] == E
    assert pop.exposure_day[1] == 4
    assert pop.onset_day[1] >= 5


def test_infector_tally(rng):
    pop = _infected_pop(4, [0])
    day = DaySnapshot.from_dict(4, {(0, 1): 10_000, (0, 2): 10_000, (1, 3): 5})
    tally = np.zeros(4, dtype=np.int64)
    step_transmission(day, pop, 0, DiseaseParams(p=1.0), rng, infector_tally=tally)
    assert tally.tolist() == [2, 0, 0, 0]


def test_progression_onset_and_absorbing(rng):
    pop = Population(3)
    pop.compartment[:] = [E, R, E]
    pop.onset_day[:] = [5, 1, 6]
    step_progression(pop, 5, PARAMS, rng)
    assert pop.compartment.tolist() == [I, R, E]
    for day in range(6, 200):
        step_progression(pop, day, DiseaseParams(recovery_prob=1.0), rng)
    assert pop.compartment.tolist() == [R, R, R]
    assert pop.recovery_day[1] == -1


def test_mean_infectious_period(rng):
    n = 100_000
    pop = Population(n)
    pop.compartment[:] = I
    pop.onset_day[:] = 0
    day = 0
    while (pop.compartment == I).any():
        day += 1
        step_progression(pop, day, PARAMS, rng)
    duration = pop.recovery_day - pop.onset_day
    assert duration.min() >= 1
    assert duration.mean() == pytest.approx(1 / 0.11, abs=0.2)


def test_sensitivity_schedule():
    fn = lambda off: 1 - test_sensitivity(off)
    assert test_sensitivity(-10) == 0.0
    assert fn(-5) == pytest.approx(1.0)
    assert fn(-3) == pytest.approx(0.95)
    assert fn(0) == pytest.approx(0.67)
    assert fn(1) == pytest.approx(0.40)
    assert fn(3) == pytest.approx(0.20)
    assert fn(4) == fn(9) == pytest.approx(0.25)
    assert fn(12) == pytest.approx(0.40)
    assert fn(14) == pytest.approx(0.50)
    assert fn(15) == fn(40) == pytest.approx(0.60)


def test_susceptible_and_recovered_always_negative(rng):
    pop = Population(1000)
    pop.compartment[500:] = R
    pop.onset_day[500:] = 0
    queue = TestQueue()
    positive = queue.administer(pop, np.arange(1000), 1, PARAMS, rng)
    assert not positive.any()
    assert queue.deliver(pop, 2).size == 0
    assert not pop.confirmed.any()


def test_result_delivered_after_delay(rng):
    pop = _infected_pop(1, [0], onset=10)
    queue = TestQueue()
    queue.administer(pop, [0], 13, DiseaseParams(), np.random.default_rng(0))
    pending = queue.pending_tests()
    assert pending[0].sample_day == 13 and pending[0].delivery_day == 14
    assert queue.deliver(pop, 13).size == 0
    assert pop.pending[0]
    got = queue.deliver(pop, 14)
    assert not pop.pending[0]
    if pending[0].positive:
        assert got.tolist() == [0] and pop.positive_day[0] == 14


def test_positive_rate_follows_sensitivity():
    rng = np.random.default_rng(5)
    n = 50_000
    pop = _infected_pop(n, np.arange(n), onset=10)
    queue = TestQueue()
    pos = queue.administer(pop, np.arange(n), 10, PARAMS, rng)
    assert pos.mean() == pytest.approx(0.33, abs=0.01)


def test_symptomatic_test_delay_distribution(rng):
    # Test-seeking starts on the onset day with 19% per day.
    n = 100_000
    pop = Population(n)
    pop.compartment[:] = I
    pop.onset_day[:] = 0
    delay = np.full(n, -1)
    day = 0
    while (delay < 0).any():
        seekers = symptomatic_seekers(pop, day, PARAMS, rng)
        delay[seekers] = day
        pop.pending[seekers] = True
        day += 1
    q1, med, q3 = np.percentile(delay, [25, 50, 75], method="inverted_cdf")
    assert (med, q1, q3) == (3, 1, 6)


def test_asymptomatic_never_seek(rng):
    pop = Population(100)
    pop.compartment[:] = I
    pop.onset_day[:] = 0
    pop.asymptomatic[:] = True
    for day in range(30):
        assert symptomatic_seekers(pop, day, PARAMS, rng).size == 0
