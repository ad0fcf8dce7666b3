"""Exact event-driven GPS fluid simulation over piecewise-linear inputs.

Inside an input segment every arrival and service rate is constant; the
departure rates then follow from max-min fairness with backlogged flows
requesting without limit.  Events occur at input breakpoints and whenever a
backlog drains to zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import maxmin
from .curves import FlowSpec
from .plf import INF, PLF, PiecewiseLinear, as_q, breakpoints, linear_combination
from .report import BoundReport


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    flows: Tuple[FlowSpec, ...]
    service: PLF
    horizon: Fraction

    def __post_init__(self):
        object.__setattr__(self, "flows", tuple(self.flows))
        object.__setattr__(self, "horizon", as_q(self.horizon))
        if self.horizon <= 0:
            raise ScenarioError("horizon must be positive")
        ids = [fl.id for fl in self.flows]
        if len(set(ids)) != len(ids):
            raise ScenarioError("flow ids must be unique")
        for fl in self.flows:
            if fl.arrivals is None:
                raise ScenarioError(f"flow {fl.id!r} has no arrivals")

    @property
    def ids(self) -> List:
        return [fl.id for fl in self.flows]

    @property
    def weights(self) -> Dict:
        return {fl.id: fl.weight for fl in self.flows}

    def input_breakpoints(self) -> List[Fraction]:
        pts = breakpoints(self.service, *(fl.arrivals for fl in self.flows))
        return [p for p in pts if p < self.horizon]


@dataclass(frozen=True)
class Trajectory:
    """Simulated (or hand-built) departures and backlogs on ``[0, horizon]``."""

    scenario: Scenario
    departures: Dict[object, PLF]
    backlogs: Dict[object, PiecewiseLinear]
    events: Tuple[Tuple[Fraction, frozenset], ...] = ()
    internal_events: Tuple[int, ...] = field(default=())

    @classmethod
    def from_departures(cls, scenario: Scenario, departures: Dict[object, PLF]) -> "Trajectory":
        backlogs = {
            fl.id: linear_combination([(1, fl.arrivals), (-1, departures[fl.id])])
            for fl in scenario.flows
        }
        return cls(scenario, dict(departures), backlogs)

    @property
    def horizon(self) -> Fraction:
        return self.scenario.horizon

    def check_times(self) -> List[Fraction]:
        """All breakpoints of inputs and outputs inside ``[0, horizon]``."""
        fs = [self.scenario.service]
        fs += [fl.arrivals for fl in self.scenario.flows]
        fs += list(self.departures.values()) + list(self.backlogs.values())
        pts = {p for p in breakpoints(*fs) if p <= self.horizon}
        pts.add(self.horizon)
        return sorted(pts)

    def event_times(self) -> List[Fraction]:
        return [t for t, _ in self.events]


# ---------------------------------------------------------------------------


def apply_jump(backlogs: Sequence, arrival_jumps: Sequence, service_jump, weights: Sequence):
    """Serve an instantaneous service mass against backlog plus arrival jumps.

    Returns ``(new_backlogs, departures)``.
    """
    x = [b + a for b, a in zip(backlogs, arrival_jumps)]
    if service_jump == 0:
        return x, [Fraction(0)] * len(x)
    f, _ = maxmin.waterfill(weights, x, service_jump)
    if f == INF:
        return [Fraction(0)] * len(x), x
    served = [min(xj, w * f) for xj, w in zip(x, weights)]
    return [xj - y for xj, y in zip(x, served)], served


def segment_rates(backlogs: Sequence, arrival_rates: Sequence, service_rate, weights: Sequence):
    """Departure rates on a stretch with constant inputs, and time to next drain.

    Returns ``(rates, dt)`` where ``dt`` is ``INF`` when no backlog drains.
    """
    x = [INF if b > 0 else a for b, a in zip(backlogs, arrival_rates)]
    f, _ = maxmin.waterfill(weights, x, service_rate)
    if f == INF:
        rates = list(x)
    else:
        rates = [min(xj, w * f) for xj, w in zip(x, weights)]
    dt = INF
    for b, a, d in zip(backlogs, arrival_rates, rates):
        if b > 0 and d > a:
            dt = min(dt, b / (d - a))
    return rates, dt


def _members(backlogs, arrival_rates, rates, ids):
    return frozenset(j for j, b, a, d in zip(ids, backlogs, arrival_rates, rates) if b == 0 and d == a)


def simulate(s: Scenario) -> Trajectory:
    ids = s.ids
    n = len(ids)
    weights = [fl.weight for fl in s.flows]
    arrivals = [fl.arrivals for fl in s.flows]
    bps = s.input_breakpoints()
    B = [Fraction(0)] * n
    dsegs: List[List[Tuple]] = [[] for _ in range(n)]
    bsegs: List[List[Tuple]] = [[] for _ in range(n)]
    events = []
    internal = []
    last_members = None
    for idx, tl in enumerate(bps):
        tnext = bps[idx + 1] if idx + 1 < len(bps) else s.horizon
        dA = [A.jump_at(tl) for A in arrivals]
        newB, served = apply_jump(B, dA, s.service.jump_at(tl), weights)
        bjump = [nb - b for nb, b in zip(newB, B)]
        B = newB
        a = [A.slope_after(tl) for A in arrivals]
        c = s.service.slope_after(tl)
        t = tl
        first = True
        count = 0
        while True:
            rates, dt = segment_rates(B, a, c, weights)
            members = _members(B, a, rates, ids)
            if first or members != last_members:
                events.append((t, members))
                last_members = members
            end = tnext if dt == INF or t + dt >= tnext else t + dt
            for k in range(n):
                dsegs[k].append((t, served[k] if first else 0, rates[k]))
                bsegs[k].append((t, bjump[k] if first else 0, a[k] - rates[k]))
                B[k] = B[k] + (a[k] - rates[k]) * (end - t)
            first = False
            t = end
            if t >= tnext:
                break
            count += 1
        internal.append(count)
    departures = {j: PLF.from_segments(dsegs[k]).canonical() for k, j in enumerate(ids)}
    backlogs = {j: PiecewiseLinear.from_segments(bsegs[k]).canonical() for k, j in enumerate(ids)}
    return Trajectory(s, departures, backlogs, tuple(events), tuple(internal))


# ---------------------------------------------------------------------------
# compliance with the GPS definition


def backlogged_intervals(traj: Trajectory, j) -> List[Tuple[Fraction, Fraction]]:
    """Maximal open intervals ``(a, b)`` on which flow ``j`` has positive backlog."""
    B = traj.backlogs[j]
    times = traj.check_times()
    out = []
    start = None
    for u, v in zip(times, times[1:]):
        positive = B.eval_right(u) > 0 or B.eval(v) > 0
        if positive and start is None:
            start = u
        if start is not None and (not positive or B.eval(v) <= 0):
            out.append((start, v if positive else u))
            start = None
    if start is not None:
        out.append((start, times[-1]))
    return out


def gps_compliance(traj: Trajectory, weights: Optional[Dict] = None, tolerance=0):
    """Check the GPS ratio condition on backlogged intervals and work conservation.

    Returns a :class:`~gpscurve.report.BoundReport`; the witness is
    ``(kind, s, t, flows)`` for the worst spot found.
    """
    weights = weights or traj.scenario.weights
    tolerance = as_q(tolerance)
    times = traj.check_times()
    D = traj.departures
    worst = Fraction(0)
    witness = None
    checked = 0

    def note(slack, wit):
        nonlocal worst, witness, checked
        checked += 1
        if slack < worst:
            worst, witness = slack, wit

    ids = list(D)
    for i in ids:
        for a, b in backlogged_intervals(traj, i):
            pts = [u for u in times if a <= u <= b]
            for u, v in zip(pts, pts[1:]):
                # a jump counts only if i still has unmet demand after it
                through_jump = traj.backlogs[i].eval_right(u) > 0
                for j in ids:
                    if j == i:
                        continue
                    ratio = weights[i] / weights[j]
                    if through_jump:
                        jump = D[i].jump_at(u) - ratio * D[j].jump_at(u)
                        note(jump, ("ratio", u, u, (i, j)))
                    slope = D[i].slope_after(u) - ratio * D[j].slope_after(u)
                    note(slope * (v - u), ("ratio", u, v, (i, j)))
    C = traj.scenario.service
    for u, v in zip(times, times[1:]):
        total_after = sum(traj.backlogs[j].eval_right(u) for j in ids)
        total_end = sum(traj.backlogs[j].eval(v) for j in ids)
        gap = C.jump_at(u) - sum(D[j].jump_at(u) for j in ids)
        note(gap if total_after <= 0 else -abs(gap), ("workconserving", u, u, tuple(ids)))
        rgap = (C.slope_after(u) - sum(D[j].slope_after(u) for j in ids)) * (v - u)
        busy = total_after > 0 or total_end > 0
        note(rgap if not busy else -abs(rgap), ("workconserving", u, v, tuple(ids)))
    return BoundReport("gps-compliance", worst, checked, witness, tolerance)
