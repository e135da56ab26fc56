"""SEIR dynamics, infectiousness, and diagnostic testing."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammainc

S, E, I, R = 0, 1, 2, 3
UNSET = -1

# Daily relative infectiousness for days -5..+10 around symptom onset: a
# shifted gamma (shape 3.1368, scale 2.1059, starting 5 days before onset)
# integrated over each day and normalised. Peak at day -1, top-6 mean 0.11.
DEFAULT_INFECTIOUSNESS = (
    0.009697, 0.050577, 0.093099, 0.119042, 0.126943, 0.121443, 0.108091, 0.091382,
    0.074335, 0.058684, 0.045233, 0.034189, 0.025424, 0.018647, 0.013516, 0.009698,
)
PROFILE_START = -5

# False-negative rate of a PCR test by days since (possibly latent) onset,
# for offsets -5..+15; clamped outside that range.
DEFAULT_FALSE_NEGATIVE = (
    1.00, 1.00, 0.95, 0.85, 0.75,          # -5..-1
    0.67, 0.40, 0.30, 0.20,                # 0..+3
    0.25, 0.25, 0.25, 0.25, 0.25, 0.25,    # +4..+9
    0.30, 0.35, 0.40, 0.45, 0.50,          # +10..+14
    0.60,                                  # +15 and later
)
SENSITIVITY_START = -5


def gamma_profile(shape, scale, start=-5, stop=10):
    """Discretised shifted-gamma infectiousness over ``start..stop``."""
    edges = np.arange(start, stop + 2) - start
    cdf = gammainc(shape, edges / scale)
    w = np.diff(cdf)
    return w / w.sum()


@dataclass(frozen=True)
class InfectiousnessProfile:
    values: tuple = DEFAULT_INFECTIOUSNESS
    start: int = PROFILE_START

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(v < 0):
            raise ValueError("infectiousness weights must be non-negative")
        object.__setattr__(self, "_table", v / v.sum())

    @property
    def table(self):
        return self._table

    @property
    def offsets(self):
        return np.arange(self.start, self.start + len(self.values))

    def top_mean(self, k=6):
        return float(np.sort(self._table)[-k:].mean())

    def __call__(self, offset):
        off = np.asarray(offset) - self.start
        inside = (off >= 0) & (off < self._table.size)
        out = np.where(inside, self._table[np.clip(off, 0, self._table.size - 1)], 0.0)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class SensitivityCurve:
    false_negative: tuple = DEFAULT_FALSE_NEGATIVE
    start: int = SENSITIVITY_START

    def __post_init__(self):
        object.__setattr__(self, "_table", 1.0 - np.asarray(self.false_negative, dtype=float))

    def __call__(self, days_since_onset):
        off = np.clip(np.asarray(days_since_onset) - self.start, 0, self._table.size - 1)
        out = self._table[off]
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class DiseaseParams:
    p: float = 0.10
    recovery_prob: float = 0.11
    incubation_mu: float = 1.621
    incubation_sigma: float = 0.418
    asymptomatic_ratio: float = 0.40
    daily_symptomatic_test_prob: float = 0.19
    result_delay_days: int = 1
    profile: InfectiousnessProfile = field(default_factory=InfectiousnessProfile)
    sensitivity: SensitivityCurve = field(default_factory=SensitivityCurve)

    def __post_init__(self):
        for name in ("p", "recovery_prob", "asymptomatic_ratio", "daily_symptomatic_test_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.result_delay_days < 0:
            raise ValueError("result_delay_days must be non-negative")


def test_sensitivity(days_since_onset, curve: SensitivityCurve | None = None):
    return (curve or SensitivityCurve())(days_since_onset)


test_sensitivity.__test__ = False


def infectiousness(profile: InfectiousnessProfile, day_offset):
    return profile(day_offset)


def sample_incubation(params: DiseaseParams, rng, size=None):
    x = np.exp(rng.normal(params.incubation_mu, params.incubation_sigma, size=size))
    days = np.maximum(np.floor(x + 0.5), 1).astype(np.int64)
    return days if size is not None else int(days)


def transmission_probability(d, day_offset, params: DiseaseParams, profile=None):
    q = params.p * (profile or params.profile)(day_offset)
    return 1.0 - (1.0 - q) ** np.asarray(d)


class Population:
    """Per-person disease and intervention state as parallel arrays."""

    def __init__(self, n, app_users=None):
        self.n = n
        self.compartment = np.zeros(n, dtype=np.int8)
        self.exposure_day = np.full(n, UNSET, dtype=np.int64)
        self.onset_day = np.full(n, UNSET, dtype=np.int64)
        self.recovery_day = np.full(n, UNSET, dtype=np.int64)
        self.positive_day = np.full(n, UNSET, dtype=np.int64)
        self.asymptomatic = np.zeros(n, dtype=bool)
        self.app_user = np.zeros(n, dtype=bool) if app_users is None else np.asarray(app_users, dtype=bool)
        self.in_quarantine = np.zeros(n, dtype=bool)
        self.pending = np.zeros(n, dtype=bool)

    @property
    def confirmed(self):
        return self.positive_day != UNSET

    def counts(self):
        return np.bincount(self.compartment, minlength=4)

    def infectious_mask(self):
        c = self.compartment
        return (c == E) | (c == I)

    def expose(self, ids, day, params: DiseaseParams, rng):
        ids = np.asarray(ids, dtype=np.int64)
        if ids.size == 0:
            return
        self.compartment[ids] = E
        self.exposure_day[ids] = day
        self.onset_day[ids] = day + sample_incubation(params, rng, size=ids.size)
        self.asymptomatic[ids] = rng.random(ids.size) < params.asymptomatic_ratio


def step_transmission(day_graph, pop: Population, day, params: DiseaseParams, rng,
                      profile=None, infector_tally=None):
    """Expose susceptibles over one day's (already modified) contacts.

    Every edge between an E/I person and a susceptible gets its own Bernoulli
    draw; a susceptible is exposed if any of its draws succeed. When
    ``infector_tally`` is given, each successful draw is credited to its
    infector. Returns the sorted array of newly exposed ids.
    """
    profile = profile or params.profile
    comp = pop.compartment
    a, b = day_graph.i, day_graph.j
    ca, cb = comp[a], comp[b]
    inf_a = (ca == E) | (ca == I)
    inf_b = (cb == E) | (cb == I)
    fwd = inf_a & (cb == S)
    back = inf_b & (ca == S)
    src = np.concatenate([a[fwd], b[back]])
    if src.size == 0:
        return np.zeros(0, dtype=np.int64)
    dst = np.concatenate([b[fwd], a[back]])
    dur = np.concatenate([day_graph.d[fwd], day_graph.d[back]])
    q = 1.0 - (1.0 - params.p * profile(day - pop.onset_day[src])) ** dur
    hit = rng.random(q.size) < q
    if infector_tally is not None:
        np.add.at(infector_tally, src[hit], 1)
    exposed = np.unique(dst[hit])
    pop.expose(exposed, day, params, rng)
    return exposed


def step_progression(pop: Population, day, params: DiseaseParams, rng):
    """Recover infectious people, then move due exposed people to I.

    Recovery draws apply only to people whose onset is before ``day``, so the
    infectious period is geometric with mean ``1 / recovery_prob``.
    Returns ``(recovered_ids, onset_ids)``.
    """
    comp = pop.compartment
    infectious = np.flatnonzero(comp == I)
    if infectious.size:
        infectious = infectious[pop.onset_day[infectious] < day]
        recovered = infectious[rng.random(infectious.size) < params.recovery_prob]
        comp[recovered] = R
        pop.recovery_day[recovered] = day
    else:
        recovered = infectious
    exposed = np.flatnonzero(comp == E)
    onset = exposed[pop.onset_day[exposed] <= day]
    comp[onset] = I
    return recovered, onset


@dataclass
class PendingTest:
    person: int
    sample_day: int
    delivery_day: int
    positive: bool


class TestQueue:
    """Test results waiting for delivery, keyed by delivery day."""

    __test__ = False

    def __init__(self):
        self._due = {}
        self.administered = 0

    def administer(self, pop: Population, ids, day, params: DiseaseParams, rng):
        """Sample tests for ``ids`` on ``day`` and queue their results.

        Only E/I people can test positive, with probability given by the
        sensitivity curve at ``day - onset``. Returns the positive mask.
        """
        ids = np.asarray(ids, dtype=np.int64)
        if ids.size == 0:
            return np.zeros(0, dtype=bool)
        comp = pop.compartment[ids]
        infected = (comp == E) | (comp == I)
        sens = params.sensitivity(day - pop.onset_day[ids])
        positive = infected & (rng.random(ids.size) < np.where(infected, sens, 0.0))
        due = day + max(params.result_delay_days, 1)
        pop.pending[ids] = True
        self.administered += ids.size
        sample = np.full(ids.size, day, dtype=np.int64)
        old = self._due.get(due)
        if old is None:
            self._due[due] = (ids, positive, sample)
        else:
            self._due[due] = tuple(np.concatenate([x, y]) for x, y in zip(old, (ids, positive, sample)))
        return positive

    def pending_tests(self):
        out = []
        for due, (ids, pos, sample) in sorted(self._due.items()):
            out.extend(PendingTest(int(p), int(s), due, bool(x)) for p, x, s in zip(ids, pos, sample))
        return out

    def deliver(self, pop: Population, day):
        """Release every result due by ``day``; returns newly confirmed ids."""
        confirmed = []
        for due in sorted(k for k in self._due if k <= day):
            ids, pos, _ = self._due.pop(due)
            pop.pending[ids] = False
            new = ids[pos & (pop.positive_day[ids] == UNSET)]
            pop.positive_day[new] = day
            confirmed.append(new)
        if not confirmed:
            return np.zeros(0, dtype=np.int64)
        return np.unique(np.concatenate(confirmed))

    def __len__(self):
        return sum(entry[0].size for entry in self._due.values())


def symptomatic_seekers(pop: Population, day, params: DiseaseParams, rng):
    """People seeking a test today because of symptoms."""
    eligible = np.flatnonzero((pop.compartment == I) & ~pop.asymptomatic
                              & ~pop.confirmed & ~pop.pending)
    return eligible[rng.random(eligible.size) < params.daily_symptomatic_test_prob]
