"""Slow, independent references for the fast paths.

Subset enumeration is exact: all values are scaled to integers over a common
denominator, subset sums are built by doubling, and candidate fractions are
compared by cross-multiplication.  The fixed-step simulator runs in float64 on
the kernels in :mod:`gpscurve.kernels`.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence

import numpy as np

from . import kernels
from .curves import FlowSpec, _index, _service_plf
from .maxmin import AllocationProblem
from .plf import INF, as_q
from .simulator import Scenario, Trajectory


class EnumerationTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    max_enumeration: int = 12
    dt: Fraction = Fraction(1, 100)

    def __post_init__(self):
        object.__setattr__(self, "dt", as_q(self.dt))
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if not 0 <= self.max_enumeration <= 20:
            raise ValueError("enumeration size must lie in [0, 20]")


DEFAULT = OracleConfig()


def _subset_sums(values: Sequence[int]) -> List[int]:
    sums = [0]
    for v in values:
        sums += [s + v for s in sums]
    return sums


def subset_max(weights: Sequence, requests: Sequence, resource, cap: int = DEFAULT.max_enumeration):
    """``max_M (X - sum_M x_j) / sum_{j not in M} phi_j`` by literal enumeration.

    Players requesting ``INF`` can never be in ``M`` (their term would be
    ``-inf``).  ``M`` equal to every player follows the sign convention: the
    empty denominator yields ``+inf`` for a nonnegative numerator and ``-inf``
    otherwise.
    """
    if len(weights) > cap:
        raise EnumerationTooLarge(f"{len(weights)} players exceed the enumeration cap {cap}")
    weights = [as_q(w) for w in weights]
    finite = [k for k, x in enumerate(requests) if x != INF]
    xs = [as_q(requests[k]) for k in finite]
    ws = [weights[k] for k in finite]
    w_always = sum((w for k, w in enumerate(weights) if requests[k] == INF), Fraction(0))
    resource = as_q(resource)
    scale = math.lcm(*(v.denominator for v in xs + ws + [w_always, resource]))
    X = int(resource * scale)
    xi = [int(v * scale) for v in xs]
    wi = [int(v * scale) for v in ws]
    W = sum(wi) + int(w_always * scale)
    sx = _subset_sums(xi)
    sw = _subset_sums(wi)
    full = len(sx) - 1
    best_num, best_den = None, None
    for m in range(len(sx)):
        num = X - sx[m]
        den = W - sw[m]
        if den == 0:
            if m == full and num >= 0:
                return INF
            continue
        if best_num is None or num * best_den > best_num * den:
            best_num, best_den = num, den
    if best_num is None:
        return -INF
    return Fraction(best_num, best_den)


def fair_share_bruteforce(p: AllocationProblem, config: OracleConfig = DEFAULT):
    ids = p.players
    return subset_max([p.weights[j] for j in ids], [p.requests[j] for j in ids], p.resource,
                      config.max_enumeration)


def leftover_bruteforce(flows: Sequence[FlowSpec], curve, i, t, config: OracleConfig = DEFAULT):
    """Leftover curve of flow ``i`` at ``t`` by enumerating subsets of the others."""
    t = as_q(t)
    if t <= 0:
        raise ValueError("t must be positive")
    k = _index(flows, i)
    C = _service_plf(curve).eval(t)
    others = [fl for fl in flows if fl.id != i]
    weights = [fl.weight for fl in others] + [flows[k].weight]
    requests = [fl.envelope(t) for fl in others] + [INF]
    f = subset_max(weights, requests, C, config.max_enumeration)
    return flows[k].weight * f


def universal_bruteforce(flows: Sequence[FlowSpec], curve, t, config: OracleConfig = DEFAULT):
    t = as_q(t)
    if t <= 0:
        raise ValueError("t must be positive")
    C = _service_plf(curve).eval(t)
    return subset_max([fl.weight for fl in flows], [fl.envelope(t) for fl in flows], C,
                      config.max_enumeration)


def universal_affine(sigmas, rhos, weights, rate, t):
    """The classical token-bucket universal curve at ``t``, enumerated."""
    t = as_q(t)
    requests = [as_q(s) + as_q(r) * t for s, r in zip(sigmas, rhos)]
    return subset_max(weights, requests, as_q(rate) * t, cap=20)


# ---------------------------------------------------------------------------
# fixed-step simulation


@dataclass(frozen=True)
class EulerTrajectory:
    """Backlogs of the fixed-step run, held constant between nodes.

    ``held[k]`` is the backlog just after node ``times[k]``; it stands for the
    whole step ``(times[k], times[k+1]]``.  ``at_node[k]`` is the value at the
    node itself, before any jump there.
    """

    ids: tuple
    times: tuple
    held: np.ndarray
    at_node: np.ndarray

    def backlog(self, t) -> np.ndarray:
        k = bisect.bisect_left(self.times, as_q(t)) - 1
        return self.held[k] if k >= 0 else np.zeros(len(self.ids))


def step_nodes(start: Fraction, end: Fraction, dt: Fraction) -> List[Fraction]:
    """``start, start + dt, ...`` truncated at ``end`` (included)."""
    n = math.ceil((end - start) / dt)
    return [start + k * dt for k in range(n)] + [end]


def simulate_euler(s: Scenario, dt, backend=kernels) -> EulerTrajectory:
    """Repeat the one-interval backlog recursion on steps of length ``dt``.

    Steps never cross an input breakpoint; jumps are served at the breakpoint
    itself by one water-filling round.
    """
    dt = as_q(dt)
    if dt <= 0:
        raise ValueError("dt must be positive")
    phi = np.array([float(fl.weight) for fl in s.flows])
    arrivals = [fl.arrivals for fl in s.flows]
    b = np.zeros(len(phi))
    times: List[Fraction] = []
    rows = []
    lefts = []
    bps = s.input_breakpoints()
    for idx, tl in enumerate(bps):
        tnext = bps[idx + 1] if idx + 1 < len(bps) else s.horizon
        lefts.append(b.copy())
        x = b + np.array([float(A.jump_at(tl)) for A in arrivals])
        dc = float(s.service.jump_at(tl))
        if dc > 0:
            f = backend.waterfill(phi, x, dc)
            x = np.zeros_like(x) if math.isinf(f) else np.maximum(x - phi * f, 0.0)
        b = x
        nodes = step_nodes(tl, tnext, dt)
        steps = np.array([float(v - u) for u, v in zip(nodes, nodes[1:])])
        rates = np.array([float(A.slope_after(tl)) for A in arrivals])
        out = backend.backlog_steps(b, rates, float(s.service.slope_after(tl)), phi, steps)
        times.append(tl)
        rows.append(b.copy())
        times.extend(nodes[1:-1])
        rows.extend(out[:-1])
        lefts.extend(out[:-1])
        b = out[-1] if len(out) else b
    times.append(s.horizon)
    rows.append(b.copy())
    lefts.append(b.copy())
    return EulerTrajectory(tuple(s.ids), tuple(times), np.array(rows), np.array(lefts))


def _candidate_times(traj: Trajectory, euler: EulerTrajectory) -> List[Fraction]:
    pts = set(euler.times)
    pts.update(t for t in traj.check_times() if t <= traj.horizon)
    return sorted(pts)


def sup_gap(traj: Trajectory, euler: EulerTrajectory) -> float:
    """``sup_t sum_j |B_j(t) - B_j^euler(t)|`` over ``(0, horizon]``.

    Both sides are piecewise affine between the candidate times, so the sum of
    absolute values is convex there and peaks at the ends; each candidate is
    checked from the left and from the right.
    """
    B = [traj.backlogs[j] for j in euler.ids]
    times = euler.times
    gap = 0.0
    for u in _candidate_times(traj, euler):
        if u <= 0:
            continue
        k_left = bisect.bisect_left(times, u) - 1
        left = np.array([float(f.eval(u)) for f in B])
        gap = max(gap, float(np.abs(left - euler.held[k_left]).sum()))
        if u < traj.horizon:
            k_right = bisect.bisect_right(times, u) - 1
            right = np.array([float(f.eval_right(u)) for f in B])
            gap = max(gap, float(np.abs(right - euler.held[k_right]).sum()))
    return gap


def max_backlog_speed(traj: Trajectory) -> Fraction:
    """``max_t sum_j |B_j'(t)|`` over ``[0, horizon)``; the constant ``K``."""
    best = Fraction(0)
    for u in traj.check_times():
        if u >= traj.horizon:
            break
        best = max(best, sum(abs(traj.backlogs[j].slope_after(u)) for j in traj.backlogs))
    return best


def node_gap(traj: Trajectory, euler: EulerTrajectory) -> float:
    """Largest ``sum_j |B_j - B_j^euler|`` at the step nodes themselves."""
    gap = 0.0
    for u, row in zip(euler.times, euler.at_node):
        exact = np.array([float(traj.backlogs[j].eval(u)) for j in euler.ids])
        gap = max(gap, float(np.abs(exact - row).sum()))
    return gap
