"""Envelopes, service curves and the GPS leftover service curve.

The leftover curve of flow ``i`` at time ``t`` is the per-player share of the
allocation problem in which every other flow ``j`` requests ``E_j(t)``, flow
``i`` requests without limit, and the resource is ``C(t)``.  The builders here
return it as an exact convex :class:`~gpscurve.plf.PLF`.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from . import maxmin
from .plf import (
    INF,
    PLF,
    AffinePiece,
    PiecewiseLinear,
    as_q,
    breakpoints,
    complies_envelope,
    lines_lower_envelope,
    lines_upper_envelope,
    pointwise_min,
    shape_check,
    tangent,
)

FlowId = Hashable


class CurveError(ValueError):
    """Invalid curve shape or flow reference."""


class DegenerateSlope(CurveError):
    """The service curve has zero left slope at the requested time."""


@dataclass(frozen=True)
class Envelope:
    """Concave arrival envelope (burst allowed at 0+), or unbounded."""

    plf: Optional[PLF] = None
    unbounded: bool = False

    def __post_init__(self):
        if self.unbounded:
            if self.plf is not None:
                raise CurveError("an unbounded envelope carries no PLF")
            return
        if self.plf is None:
            raise CurveError("bounded envelope needs a PLF")
        if shape_check(self.plf) not in ("concave", "both"):
            raise CurveError("envelope not concave")

    @classmethod
    def token_buckets(cls, pieces: Iterable[Tuple]) -> "Envelope":
        """``min_k (sigma_k + rho_k t)`` from ``(sigma, rho)`` pairs."""
        return cls(lines_lower_envelope(pieces))

    @classmethod
    def token_bucket(cls, sigma, rho) -> "Envelope":
        return cls.token_buckets([(sigma, rho)])

    @classmethod
    def infinite(cls) -> "Envelope":
        return cls(None, True)

    def __call__(self, t):
        if self.unbounded:
            return INF if t > 0 else Fraction(0)
        return self.plf.eval(t)

    def eval_right(self, t):
        if self.unbounded:
            return INF if t >= 0 else Fraction(0)
        return self.plf.eval_right(t)

    def pieces(self) -> List[AffinePiece]:
        """Token-bucket view: one affine piece per segment."""
        if self.unbounded:
            raise CurveError("unbounded envelope has no affine pieces")
        out = []
        for s, _, r in self.plf.segments:
            out.append(AffinePiece(self.plf.eval_right(s) - r * s, r))
        return out


@dataclass(frozen=True)
class ServiceCurve:
    """Convex, nonnegative, continuous service curve with value 0 at 0."""

    plf: PLF

    def __post_init__(self):
        if shape_check(self.plf) not in ("convex", "both"):
            raise CurveError("service curve not convex")

    @classmethod
    def latency_rates(cls, pieces: Iterable[Tuple]) -> "ServiceCurve":
        """``max(0, max_k R_k (t - L_k))`` from ``(R, L)`` pairs."""
        lines = [(0, 0)]
        for R, L in pieces:
            R, L = as_q(R), as_q(L)
            if R < 0 or L < 0:
                raise CurveError("latency-rate pieces need R >= 0 and L >= 0")
            lines.append((-R * L, R))
        return cls(lines_upper_envelope(lines))

    @classmethod
    def latency_rate(cls, R, L=0) -> "ServiceCurve":
        return cls.latency_rates([(R, L)])

    @classmethod
    def constant_rate(cls, R) -> "ServiceCurve":
        return cls.latency_rates([(R, 0)])

    def __call__(self, t):
        return self.plf.eval(t)


@dataclass(frozen=True)
class FlowSpec:
    id: FlowId
    weight: Fraction
    envelope: Envelope
    arrivals: Optional[PLF] = None

    def __post_init__(self):
        object.__setattr__(self, "weight", as_q(self.weight))
        if self.weight <= 0:
            raise CurveError(f"flow {self.id!r}: weight must be positive")

    def complies(self) -> bool:
        if self.arrivals is None or self.envelope.unbounded:
            return True
        return complies_envelope(self.arrivals, self.envelope.plf)


def _index(flows: Sequence[FlowSpec], i: FlowId) -> int:
    for k, fl in enumerate(flows):
        if fl.id == i:
            return k
    raise CurveError(f"unknown flow id {i!r}")


def _service_plf(curve) -> PLF:
    if isinstance(curve, ServiceCurve):
        return curve.plf
    if isinstance(curve, PiecewiseLinear) and shape_check(curve) in ("convex", "both"):
        return curve
    raise CurveError("service curve not convex")


# ---------------------------------------------------------------------------
# exact construction


def _lex_level(values, slopes, weights, resource, exempt):
    """Water-filling at ``t+``: players compared by (value, slope) pairs.

    ``exempt`` players always count as unsatisfied.  Returns the satisfied
    indices and the level as a ``(value, slope)`` pair, or ``None`` when every
    player is satisfied.
    """
    order = sorted(
        (k for k in range(len(values)) if k not in exempt),
        key=lambda k: (values[k] / weights[k], slopes[k] / weights[k]),
    )
    rv, rs = resource
    wsum = sum(weights, Fraction(0))
    sat = []
    for k in order:
        if (values[k] * wsum, slopes[k] * wsum) > (rv * weights[k], rs * weights[k]):
            break
        rv -= values[k]
        rs -= slopes[k]
        wsum -= weights[k]
        sat.append(k)
    if wsum == 0:
        return sat, None
    return sat, (rv / wsum, rs / wsum)


def _fair_level_plf(flows: Sequence[FlowSpec], curve: PLF, exclude: Optional[int]):
    """Fair share of ``(E_j(t))`` against ``curve(t)`` as a PLF in ``t``.

    ``exclude`` is a flow treated as an unlimited requester.  Returns the
    segments and the time from which the level is infinite (or ``None``).
    """
    weights = [fl.weight for fl in flows]
    bounded = [k for k, fl in enumerate(flows) if not fl.envelope.unbounded and k != exclude]
    exempt = set(range(len(flows))) - set(bounded)
    plfs = [flows[k].envelope.plf for k in bounded]
    base = breakpoints(curve, *plfs)
    segs: List[Tuple[Fraction, Fraction]] = []  # (start, slope); continuity checked
    values: List[Fraction] = []
    for idx, a in enumerate(base):
        b = base[idx + 1] if idx + 1 < len(base) else None
        ev = [Fraction(0)] * len(flows)
        es = [Fraction(0)] * len(flows)
        for k in bounded:
            p = flows[k].envelope.plf
            ev[k], es[k] = p.eval_right(a), p.slope_after(a)
        cv, cs = curve.eval_right(a), curve.slope_after(a)
        t = a
        while True:
            # values at t+ from the affine pieces on (a, b]
            vals = [ev[k] + es[k] * (t - a) for k in range(len(flows))]
            sat, level = _lex_level(vals, es, weights, (cv + cs * (t - a), cs), exempt)
            if level is None:
                return segs, values, t
            fv, fs = level
            segs.append((t, fs))
            values.append(fv)
            nxt = b
            for k in bounded:
                # crossing of E_k / w_k with the level
                dv = vals[k] / weights[k] - fv
                ds = es[k] / weights[k] - fs
                if ds != 0:
                    dt = -dv / ds
                    if dt > 0 and (nxt is None or t + dt < nxt):
                        nxt = t + dt
            if nxt is None or nxt == b:
                break
            t = nxt
    return segs, values, None


def _segments_to_plf(segs, values, scale, inf_from=None) -> PLF:
    out = []
    prev_end = Fraction(0)
    for k, (s, slope) in enumerate(segs):
        v = values[k] * scale
        out.append((s, v - prev_end, slope * scale))
        if k + 1 < len(segs):
            prev_end = v + slope * scale * (segs[k + 1][0] - s)
    if not out:
        out = [(Fraction(0), Fraction(0), Fraction(0))]
    return PLF.from_segments(out, inf_from).canonical()


def leftover(flows: Sequence[FlowSpec], i: FlowId, curve) -> PLF:
    """Leftover strict service curve of flow ``i`` as an exact convex PLF."""
    k = _index(flows, i)
    cplf = _service_plf(curve)
    segs, values, inf_from = _fair_level_plf(flows, cplf, exclude=k)
    assert inf_from is None
    out = _segments_to_plf(segs, values, flows[k].weight)
    if any(j != 0 for j in out.jumps):
        raise AssertionError("leftover curve must be continuous")
    return out


def universal(flows: Sequence[FlowSpec], curve) -> PLF:
    """Aggregate curve: pointwise fair share of ``(E_j(t))`` against ``C(t)``.

    The result is ``+inf`` from the exhaustion time on (``inf_from``).
    """
    cplf = _service_plf(curve)
    segs, values, inf_from = _fair_level_plf(flows, cplf, exclude=None)
    if inf_from is not None and inf_from == 0:
        return PLF.from_segments([(0, 0, 0)], inf_from=Fraction(0))
    return _segments_to_plf(segs, values, Fraction(1), inf_from)


# ---------------------------------------------------------------------------
# pointwise views


def _problem_at(flows: Sequence[FlowSpec], curve: PLF, t, unlimited: Optional[int] = None):
    weights = {fl.id: fl.weight for fl in flows}
    requests = {}
    for k, fl in enumerate(flows):
        requests[fl.id] = INF if k == unlimited else fl.envelope(t)
    return maxmin.AllocationProblem(weights, requests, curve.eval(t))


def leftover_at(flows: Sequence[FlowSpec], i: FlowId, curve, t):
    """Leftover curve value at ``t`` from the allocation problem directly."""
    if t <= 0:
        return Fraction(0)
    k = _index(flows, i)
    return maxmin.per_player_share(_problem_at(flows, _service_plf(curve), t, k), i)


def universal_at(flows: Sequence[FlowSpec], curve, t):
    if t <= 0:
        return Fraction(0)
    return maxmin.fair_share(_problem_at(flows, _service_plf(curve), t))


def maximizer_set(flows: Sequence[FlowSpec], curve, t, i: FlowId) -> frozenset:
    """Satisfied flows at ``t`` with flow ``i`` treated as unlimited."""
    if t <= 0:
        raise ValueError("maximizer set needs t > 0")
    k = _index(flows, i)
    res = maxmin.allocate(_problem_at(flows, _service_plf(curve), t, k))
    return res.satisfied


def slope_requests(flows: Sequence[FlowSpec], curve, tau, i: FlowId) -> Dict[FlowId, Fraction]:
    """Left-slope ratios ``E_j'(tau-) / C'(tau-)`` over the maximizer set."""
    cplf = _service_plf(curve)
    rate = cplf.left_slope(tau)
    if rate == 0:
        raise DegenerateSlope(f"service curve has zero left slope at tau={tau}")
    members = maximizer_set(flows, curve, tau, i)
    return {fl.id: fl.envelope.plf.left_slope(tau) / rate for fl in flows if fl.id in members}


def tangent_scenario(flows: Sequence[FlowSpec], curve, tau):
    """Token-bucket and latency-rate tangents at ``tau``.

    Returns ``(flows', service')``; unbounded envelopes pass through.  The
    leftover curve of the tangent scenario agrees with the original at ``tau``.
    """
    cplf = _service_plf(curve)
    line = tangent(cplf, tau)
    if line.slope == 0:
        raise DegenerateSlope(f"service curve has zero left slope at tau={tau}")
    new_flows = []
    for fl in flows:
        if fl.envelope.unbounded:
            new_flows.append(fl)
            continue
        piece = tangent(fl.envelope.plf, tau)
        new_flows.append(replace(fl, envelope=Envelope.token_bucket(piece.sigma, piece.rho)))
    return new_flows, ServiceCurve.latency_rate(line.rate, line.latency)


def greedy_lazy(flows: Sequence[FlowSpec], curve) -> Dict[FlowId, PiecewiseLinear]:
    """Departures ``min(E_j, S_j)`` when all flows are greedy and service is lazy."""
    out = {}
    for fl in flows:
        if fl.envelope.unbounded:
            raise CurveError(f"flow {fl.id!r}: greedy arrivals need a bounded envelope")
    for fl in flows:
        s = leftover(flows, fl.id, curve)
        out[fl.id] = pointwise_min(fl.envelope.plf, s, cls=PLF).canonical()
    return out
