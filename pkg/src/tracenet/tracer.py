"""Digital contact-tracing app: contact log, exposure chains, and degree rules."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

NEVER = np.iinfo(np.int64).max


@dataclass(frozen=True)
class TraceParams:
    p_prime: float = 0.011
    cutoff: float = 0.10
    window: int = 10
    max_degree: int = 3
    followup_test_interval: int = 3
    second_degree_factor: float = 0.25
    third_degree_factor: float = 0.50

    def __post_init__(self):
        if not 0 < self.p_prime < 1:
            raise ValueError("p_prime must lie in (0, 1)")
        if not 0 < self.cutoff <= 1:
            raise ValueError("cutoff must lie in (0, 1]")
        if self.window < 1 or self.max_degree < 1 or self.followup_test_interval < 1:
            raise ValueError("window, max_degree and followup interval must be >= 1")
        for f in (self.second_degree_factor, self.third_degree_factor):
            if not 0 < f <= 1:
                raise ValueError("reduction factors must lie in (0, 1]")

    def contact_weight(self, d):
        """Estimated transmission probability of a contact of ``d`` units."""
        return 1.0 - (1.0 - self.p_prime) ** np.asarray(d, dtype=float)


@dataclass(frozen=True)
class AppContact:
    p1: int
    p2: int
    day: int
    duration: int


@dataclass(frozen=True)
class DegreeStatus:
    person: int
    degree: int | None
    since_day: int | None


class Tracer:
    """State of the tracing app for one trial.

    ``M[l, t, x]`` holds the summed weight of qualifying contact chains of
    length ``l`` that end at person ``x`` with a final contact on day ``t``.
    Degree-1 entries come straight from positive reports over the recall
    window; longer chains follow the recursion

        M[l, t, x] = sum_s w(x, s, t) * sum_{r=1..W} M[l-1, t-r, s]

    over contacts on day ``t`` whose parties have not reported recovery by
    ``t``. Late reports mark earlier days dirty and everything from the
    earliest dirty day onward is recomputed.
    """

    def __init__(self, n, horizon, app_users, params: TraceParams | None = None):
        self.n = n
        self.horizon = horizon
        self.params = params or TraceParams()
        self.app_users = np.asarray(app_users, dtype=bool)
        L = self.params.max_degree
        self.M = np.zeros((L + 1, horizon + 1, n))
        self._log = [None] * (horizon + 1)
        self.positive_day = np.full(n, -1, dtype=np.int64)
        self.recovery_day = np.full(n, NEVER, dtype=np.int64)
        self.degree = np.zeros(n, dtype=np.int64)
        self.since_day = np.full(n, -1, dtype=np.int64)
        self._dirty = horizon + 1
        self._computed_through = -1

    # contact log -----------------------------------------------------------

    def record_contacts(self, day_graph, day):
        """Log every edge whose endpoints are both app users."""
        users = self.app_users
        sel = users[day_graph.i] & users[day_graph.j]
        a, b, d = day_graph.i[sel], day_graph.j[sel], day_graph.d[sel]
        self._log[day] = (a, b, d, self.params.contact_weight(d))
        self._dirty = min(self._dirty, day)

    def contacts(self, day=None):
        days = range(self.horizon + 1) if day is None else [day]
        out = []
        for t in days:
            entry = self._log[t]
            if entry is None:
                continue
            out.extend(AppContact(int(a), int(b), t, int(d)) for a, b, d in zip(*entry[:3]))
        return out

    # reports ---------------------------------------------------------------

    def report_positive(self, people, test_day):
        """Register positive app users; duplicates are ignored."""
        people = np.atleast_1d(np.asarray(people, dtype=np.int64))
        people = people[self.app_users[people] & (self.positive_day[people] < 0)]
        if people.size == 0:
            return
        self.positive_day[people] = test_day
        self._dirty = min(self._dirty, max(test_day - self.params.window, 0))

    def report_recovery(self, people, day):
        people = np.atleast_1d(np.asarray(people, dtype=np.int64))
        people = people[self.app_users[people] & (self.positive_day[people] >= 0)]
        self.recovery_day[people] = np.minimum(self.recovery_day[people], day)

    # exposure matrix -------------------------------------------------------

    def _recompute_day(self, t):
        M = self.M
        W = self.params.window
        entry = self._log[t]
        M[:, t, :] = 0.0
        if entry is None or entry[0].size == 0:
            return
        a, b, _, w = entry
        ok = (self.recovery_day[a] > t) & (self.recovery_day[b] > t)
        if not ok.all():
            a, b, w = a[ok], b[ok], w[ok]
        n = self.n
        T = self.positive_day
        src_a = (T[a] >= t) & (T[a] <= t + W)
        src_b = (T[b] >= t) & (T[b] <= t + W)
        M[1, t] = (np.bincount(b, weights=w * src_a, minlength=n)
                   + np.bincount(a, weights=w * src_b, minlength=n))
        lo = max(t - W, 0)
        for level in range(2, self.params.max_degree + 1):
            prior = M[level - 1, lo:t].sum(axis=0)
            M[level, t] = (np.bincount(b, weights=w * prior[a], minlength=n)
                           + np.bincount(a, weights=w * prior[b], minlength=n))

    def update_exposure_matrix(self, day):
        """Bring ``M`` up to date for every day up to and including ``day``."""
        start = min(self._dirty, self._computed_through + 1)
        for t in range(max(start, 0), day + 1):
            self._recompute_day(t)
        self._dirty = self.horizon + 1
        self._computed_through = max(self._computed_through, day)

    def active(self, day):
        """True while any chain weight can still influence day ``day`` or later."""
        lo = max(day - self.params.max_degree * self.params.window, 0)
        return bool(self.M[1:, lo:day + 1].any())

    # classification --------------------------------------------------------

    def window_sums(self, day):
        """Per-degree sums of ``M`` over the ``W`` days before ``day``."""
        lo = max(day - self.params.window, 0)
        return self.M[1:, lo:day].sum(axis=1)

    def degrees_on(self, day):
        """Smallest qualifying degree for everyone (0 means none)."""
        cum = np.cumsum(self.window_sums(day), axis=0)
        hit = cum >= self.params.cutoff
        return np.where(hit.any(axis=0), hit.argmax(axis=0) + 1, 0)

    def classify(self, day):
        """Refresh every person's degree status for ``day``."""
        degree = self.degrees_on(day)
        changed = degree != self.degree
        self.since_day[changed] = day
        self.since_day[degree == 0] = -1
        self.degree = degree
        return degree

    def classify_degree(self, person, day):
        degree = int(self.degrees_on(day)[person])
        if degree == 0:
            return DegreeStatus(person, None, None)
        since = int(self.since_day[person]) if self.degree[person] == degree else day
        return DegreeStatus(person, degree, since)

    def quarantine_set(self, isolating=None, confirmed=None):
        """Degree-1 app users plus confirmed cases still isolating.

        Anyone who ever tested positive is exempt from degree-1 quarantine
        once recovered.
        """
        q = self.degree == 1
        if confirmed is not None:
            q &= ~np.asarray(confirmed, dtype=bool)
        if isolating is not None:
            q |= np.asarray(isolating, dtype=bool)
        return q

    def followup_test_set(self, day, confirmed=None):
        cadence = self.params.followup_test_interval
        sel = (self.degree > 0) & ((day - self.since_day) % cadence == 0)
        if confirmed is not None:
            sel &= ~np.asarray(confirmed, dtype=bool)
        return np.flatnonzero(sel)

    def notification_factors(self):
        """Contact-reduction factor per person (1.0 for everyone unaffected)."""
        f = np.ones(self.n)
        f[self.degree == 2] = self.params.second_degree_factor
        if self.params.max_degree >= 3:
            f[self.degree == 3] = self.params.third_degree_factor
        return f

    def dump_degrees(self, path_or_file, day):
        """Append ``day, person, degree, window_sum`` rows for flagged people."""
        sums = np.cumsum(self.window_sums(day), axis=0)
        close = isinstance(path_or_file, str)
        fh = open(path_or_file, "a", newline="") if close else path_or_file
        try:
            writer = csv.writer(fh)
            for person in np.flatnonzero(self.degree > 0):
                k = self.degree[person]
                writer.writerow([day, int(person), int(k), f"{sums[k - 1, person]:.6g}"])
        finally:
            if close:
                fh.close()
