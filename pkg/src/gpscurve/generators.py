"""Seeded random instances: envelopes, service curves, compliant processes.

Compliance is obtained by construction rather than by rejection:

* arrivals ``A = lam * E(g(t))`` with ``g`` nondecreasing and 1-Lipschitz
  comply with a concave ``E`` because ``E`` is subadditive;
* service ``C = curve(h(t)) + K(t)`` with ``h(t) - h(s) >= t - s`` and ``K``
  nondecreasing complies with a convex ``curve`` because it is superadditive.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Optional

from .curves import Envelope, FlowSpec, ServiceCurve
from .maxmin import AllocationProblem
from .plf import INF, PLF, PiecewiseLinear, as_q, linear_combination
from .simulator import Scenario


def rational(rng: random.Random, lo, hi, den: int = 8) -> Fraction:
    """Uniform on the grid ``lo + k / den`` inside ``[lo, hi]``."""
    lo, hi = as_q(lo), as_q(hi)
    steps = int((hi - lo) * den)
    return lo + Fraction(rng.randint(0, steps), den)


def compose(F: PiecewiseLinear, g: PiecewiseLinear) -> PLF:
    """``t -> F(g(t))`` for nondecreasing ``F`` and ``g``, exactly."""
    segs = []
    fb = F.starts
    g_segs = g.segments
    for k, (tk, jump, m) in enumerate(g_segs):
        v = g.eval(tk)
        w = v + jump
        right = F.eval_right(w) if m > 0 else F.eval(w)
        segs.append((tk, right - F.eval(v), m * F.slope_after(w)))
        if m == 0:
            continue
        end = g_segs[k + 1][0] if k + 1 < len(g_segs) else None
        top = None if end is None else w + m * (end - tk)
        for b in fb:
            if b <= w or (top is not None and b >= top):
                continue
            segs.append((tk + (b - w) / m, F.jump_at(b), m * F.slope_after(b)))
    return PLF.from_segments(segs).canonical()


def random_envelope(rng: random.Random, pieces: int = 3, rate_hi=4, burst_hi=4) -> Envelope:
    """Concave envelope with up to ``pieces`` token buckets."""
    k = rng.randint(1, pieces)
    rhos = sorted({rational(rng, Fraction(1, 8), rate_hi) for _ in range(k)}, reverse=True)
    sigma = rational(rng, 0, burst_hi)
    lines = [(sigma, rhos[0])]
    for r in rhos[1:]:
        sigma += rational(rng, Fraction(1, 8), burst_hi)
        lines.append((sigma, r))
    return Envelope.token_buckets(lines)


def random_service_curve(rng: random.Random, pieces: int = 2, rate_lo=1, rate_hi=8, latency_hi=2) -> ServiceCurve:
    k = rng.randint(1, pieces)
    out = []
    for _ in range(k):
        out.append((rational(rng, rate_lo, rate_hi), rational(rng, 0, latency_hi)))
    return ServiceCurve.latency_rates(out)


def random_clock(rng: random.Random, horizon, pieces: int = 3, lipschitz: bool = True) -> PLF:
    """Random nondecreasing time change.

    With ``lipschitz`` the slopes lie in ``[0, 1]`` and there are no jumps;
    otherwise the slopes lie in ``[1, 2]`` and jumps are allowed.
    """
    horizon = as_q(horizon)
    starts = sorted({Fraction(0)} | {rational(rng, 0, horizon, 4) for _ in range(pieces - 1)})
    segs = []
    for s in starts:
        if lipschitz:
            slope = Fraction(0) if rng.random() < 0.3 else rational(rng, Fraction(1, 8), 1)
            segs.append((s, 0, slope))
        else:
            jump = rational(rng, 0, 1, 4) if rng.random() < 0.4 else Fraction(0)
            segs.append((s, jump, rational(rng, 1, 2)))
    return PLF.from_segments(segs)


def compliant_arrivals(rng: random.Random, env: Envelope, horizon, greedy_prob=0.1) -> PLF:
    if env.unbounded:
        # any process complies; use a random token bucket shape
        env = random_envelope(rng)
    if rng.random() < greedy_prob:
        return env.plf
    lam = rational(rng, Fraction(1, 4), 1, 4)
    A = compose(env.plf, random_clock(rng, horizon))
    return linear_combination([(lam, A)]).canonical() if lam != 1 else A


def compliant_service(rng: random.Random, curve: ServiceCurve, horizon, lazy_prob=0.1) -> PLF:
    if rng.random() < lazy_prob:
        return curve.plf
    C = compose(curve.plf, random_clock(rng, horizon, lipschitz=False))
    if rng.random() < 0.5:
        extra = PLF.from_segments([(0, rational(rng, 0, 1, 4), rational(rng, 0, 1, 4))])
        C = linear_combination([(1, C), (1, extra)])
    return PLF.from_segments(C.segments).canonical()


def random_flows(rng: random.Random, n: int, pieces: int = 3, unbounded_prob=0.0,
                 rate_hi=4) -> List[FlowSpec]:
    flows = []
    for j in range(n):
        env = Envelope.infinite() if rng.random() < unbounded_prob else random_envelope(rng, pieces, rate_hi)
        flows.append(FlowSpec(f"f{j}", rational(rng, Fraction(1, 4), 4, 4), env))
    return flows


def greedy_lazy_scenario(rng: random.Random, n: int, horizon, env_pieces=6, curve_pieces=4):
    """Flows with ``A_j = E_j`` and service ``C = curve``; returns ``(scenario, curve)``."""
    curve = random_service_curve(rng, curve_pieces)
    flows = [
        FlowSpec(fl.id, fl.weight, fl.envelope, fl.envelope.plf)
        for fl in random_flows(rng, n, env_pieces)
    ]
    return Scenario(flows, curve.plf, horizon), curve


def random_scenario(rng: random.Random, n: int, horizon, env_pieces=3, curve_pieces=2,
                    unstable: Optional[bool] = None):
    """Compliant non-greedy scenario; returns ``(scenario, curve)``.

    ``unstable=True`` forces the long-run envelope rates to exceed the largest
    service rate, ``False`` forces the opposite, ``None`` leaves it to chance.
    """
    curve = random_service_curve(rng, curve_pieces)
    flows = random_flows(rng, n, env_pieces)
    peak = curve.plf.final_slope
    total = sum(fl.envelope.plf.final_slope for fl in flows)
    if unstable is not None and (total > peak) != unstable:
        target = peak * (rational(rng, Fraction(9, 8), 2) if unstable else rational(rng, Fraction(1, 4), Fraction(7, 8)))
        scale = target / total
        flows = [
            FlowSpec(fl.id, fl.weight, Envelope.token_buckets(
                [(p.sigma, p.rho * scale) for p in fl.envelope.pieces()]))
            for fl in flows
        ]
    flows = [
        FlowSpec(fl.id, fl.weight, fl.envelope, compliant_arrivals(rng, fl.envelope, horizon))
        for fl in flows
    ]
    return Scenario(flows, compliant_service(rng, curve, horizon), horizon), curve


def random_problem(rng: random.Random, n: int, inf_prob=0.1, den: int = 16) -> AllocationProblem:
    """Weights in ``[0.1, 10]``, requests in ``[0, 10]`` or ``INF``, resource in ``[0, 20]``."""
    weights = {j: rational(rng, Fraction(1, 10), 10, den * 10) for j in range(n)}
    requests = {j: INF if rng.random() < inf_prob else rational(rng, 0, 10, den) for j in range(n)}
    return AllocationProblem(weights, requests, rational(rng, 0, 20, den))
