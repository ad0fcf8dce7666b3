"""Departure, backlog and output-burstiness bounds for feasible flow subsets.

The infima and suprema over continuous time are evaluated exactly: every
quantity is piecewise linear, so extremes sit at breakpoints or their right
limits.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional

from . import maxmin
from .plf import (
    PiecewiseLinear,
    as_q,
    inf_increment_gap,
    linear_combination,
    min_on,
    running_min,
)
from .report import BoundReport, merge
from .simulator import Trajectory, backlogged_intervals


def b_star(A: PiecewiseLinear, x, C: PiecewiseLinear, t) -> Fraction:
    """``sup_{r <= t} {A(r, t) - x C(r, t)}`` over the breakpoint candidates."""
    x, t = as_q(x), as_q(t)
    if not 0 <= x <= 1:
        raise ValueError("share x must lie in [0, 1]")
    if t <= 0:
        return Fraction(0)
    top = A.eval(t) - x * C.eval(t)
    best = Fraction(0)  # r = t
    for r in sorted(set(A.starts) | set(C.starts)):
        if r >= t:
            break
        for low in (A.eval(r) - x * C.eval(r), A.eval_right(r) - x * C.eval_right(r)):
            best = max(best, top - low)
    return best


def b_star_curve(A: PiecewiseLinear, x, C: PiecewiseLinear) -> PiecewiseLinear:
    """``t -> b_star(A, x, C, t)`` as a piecewise-linear function."""
    g = linear_combination([(1, A), (-as_q(x), C)])
    return linear_combination([(1, g), (-1, running_min(g))])


def b_star_affine_bound(sigma, rho, x, R, L) -> Fraction:
    """Token bucket against a latency-rate service share: ``sigma + rho L``."""
    sigma, rho, x, R, L = map(as_q, (sigma, rho, x, R, L))
    if rho > x * R:
        raise ValueError("bound needs rho <= x R")
    if sigma < 0 or L < 0:
        raise ValueError("bound needs sigma >= 0 and L >= 0")
    return sigma + rho * L


def _require_feasible(traj: Trajectory, x: Mapping):
    x = {j: as_q(v) for j, v in x.items()}
    if not set(x) <= set(traj.departures):
        raise ValueError("shares name unknown flows")
    if x and not maxmin.is_feasible(traj.scenario.weights, x, 1):
        raise ValueError("shares are not a feasible subset for the resource 1")
    return x


def _arrivals(traj: Trajectory) -> Dict:
    return {fl.id: fl.arrivals for fl in traj.scenario.flows}


def _min_report(name, f: PiecewiseLinear, horizon, tolerance) -> BoundReport:
    value, when, side = min_on(f, 0, horizon)
    n = sum(1 for p in f.starts if p <= horizon) * 2 + 1
    return BoundReport(name, value, n, (when, side), as_q(tolerance))


def check_theorem2(traj: Trajectory, x: Mapping, t=None, tolerance=0) -> BoundReport:
    """Aggregate departures of a feasible subset versus dedicated shares of ``C``.

    ``x`` maps the flows of the subset to their shares.  With ``t=None`` the
    inequality is checked at every time in ``[0, horizon]``.
    """
    x = _require_feasible(traj, x)
    C = traj.scenario.service
    A = _arrivals(traj)
    terms = []
    for j, xj in x.items():
        g = linear_combination([(1, A[j]), (-xj, C)])
        # D_j - inf_s {A_j(s) + x_j C(s, t)}
        terms += [(1, traj.departures[j]), (-xj, C), (-1, running_min(g))]
    slack = linear_combination(terms) if terms else PiecewiseLinear.zero()
    if t is None:
        return _min_report("theorem2", slack, traj.horizon, tolerance)
    t = as_q(t)
    return BoundReport("theorem2", slack.eval(t), 1, (t, "at"), as_q(tolerance))


def check_corollaries(traj: Trajectory, x: Mapping, s=None, t=None, tolerance=0):
    """Backlog and output-burstiness bounds; returns ``(backlog, output)`` reports.

    With ``s`` and ``t`` omitted the backlog bound is checked at every time and
    the output bound over every pair ``s <= t`` in ``[0, horizon]``.
    """
    x = _require_feasible(traj, x)
    C = traj.scenario.service
    A = _arrivals(traj)
    bstars = {j: b_star_curve(A[j], xj, C) for j, xj in x.items()}
    bsum = linear_combination([(1, b) for b in bstars.values()]) if x else PiecewiseLinear.zero()
    backlog = linear_combination([(1, traj.backlogs[j]) for j in x]) if x else PiecewiseLinear.zero()
    cor1 = linear_combination([(1, bsum), (-1, backlog)])
    h = linear_combination(
        [(1, traj.departures[j]) for j in x] + [(-xj, C) for xj in x.values()]
    ) if x else PiecewiseLinear.zero()
    if s is None and t is None:
        # worst s for each t is the running minimum of h
        cor2 = linear_combination([(1, bsum), (-1, h), (1, running_min(h))])
        return (
            _min_report("corollary1", cor1, traj.horizon, tolerance),
            _min_report("corollary2", cor2, traj.horizon, tolerance),
        )
    s, t = as_q(s if s is not None else 0), as_q(t if t is not None else traj.horizon)
    if not 0 <= s <= t:
        raise ValueError("need 0 <= s <= t")
    r1 = BoundReport("corollary1", cor1.eval(t), 1, (t, "at"), as_q(tolerance))
    r2 = BoundReport("corollary2", bsum.eval(t) - (h.eval(t) - h.eval(s)), 1, (s, t), as_q(tolerance))
    return r1, r2


def check_strict_service(traj: Trajectory, i, curve: PiecewiseLinear, tolerance=0) -> BoundReport:
    """``D_i(s, t) >= curve(t - s)`` on every maximal backlogged interval of ``i``."""
    D = traj.departures[i]
    reports = []
    for a, b in backlogged_intervals(traj, i):
        value, witness = inf_increment_gap(D, curve, a, b)
        reports.append(BoundReport("strict-service", value, 1, witness, as_q(tolerance), f"interval ({a}, {b})"))
    return merge(f"strict-service[{i}]", reports, as_q(tolerance))


def random_feasible_shares(weights: Mapping, members: Iterable, rng, exact_edge=False) -> Dict:
    """Random feasible shares for ``members`` with resource 1.

    Shares are ``lam * u_j * w_j`` with ``u_j`` uniform on a grid and ``lam``
    below the feasibility limit (at the limit when ``exact_edge``).
    """
    members = list(members)
    if not members:
        return {}
    weights = {j: as_q(w) for j, w in weights.items()}
    u = {j: Fraction(rng.randint(1, 16), 16) for j in members}
    outside = sum((w for j, w in weights.items() if j not in u), Fraction(0))
    denom = max(u.values()) * outside + sum(u[j] * weights[j] for j in members)
    lam = 1 / denom
    if not exact_edge:
        lam *= Fraction(rng.randint(1, 16), 16)
    return {j: lam * u[j] * weights[j] for j in members}


def check_all_bounds(traj: Trajectory, x: Mapping, tolerance=0):
    """Theorem-2 and both corollary reports for one feasible subset."""
    return [check_theorem2(traj, x, tolerance=tolerance), *check_corollaries(traj, x, tolerance=tolerance)]
