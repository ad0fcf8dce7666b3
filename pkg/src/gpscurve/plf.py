"""Exact piecewise-linear functions on the time axis.

Every cumulative process (arrivals, departures, service, backlog) and every
curve (envelope, service curve) is stored as a sequence of segments
``(start, jump, slope)`` with exact :class:`~fractions.Fraction` values.

Conventions
-----------
* The domain starts at 0 and the value is 0 for ``t <= 0``.
* Functions are left-continuous: the jump recorded at ``start`` takes effect
  for ``t > start``.
* The last segment extends to ``+inf``.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

INF = math.inf

Number = Union[int, Fraction, str]


def as_q(value) -> Fraction:
    """Convert ``value`` to an exact rational (floats are converted exactly)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


@dataclass(frozen=True)
class AffinePiece:
    """``intercept + slope * t``.

    As an envelope this is a token bucket ``sigma + rho t``; as a service curve
    it is the latency-rate line ``R (t - L)`` with intercept ``-R L``.
    """

    intercept: Fraction
    slope: Fraction

    def __post_init__(self):
        object.__setattr__(self, "intercept", as_q(self.intercept))
        object.__setattr__(self, "slope", as_q(self.slope))
        if self.slope < 0:
            raise ValueError("affine piece must have a nonnegative slope")

    def __call__(self, t) -> Fraction:
        return self.intercept + self.slope * t

    @property
    def sigma(self) -> Fraction:
        return self.intercept

    @property
    def rho(self) -> Fraction:
        return self.slope

    @property
    def rate(self) -> Fraction:
        return self.slope

    @property
    def latency(self) -> Fraction:
        if self.slope == 0:
            raise ZeroDivisionError("latency undefined for a zero-rate piece")
        return -self.intercept / self.slope


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """Left-continuous piecewise-linear function, zero on ``t <= 0``.

    Jumps and slopes may have any sign; :class:`PLF` restricts to
    nondecreasing functions.  ``inf_from`` marks an extended-real function that
    equals ``+inf`` for ``t > 0, t >= inf_from``.
    """

    starts: Tuple[Fraction, ...]
    jumps: Tuple[Fraction, ...]
    slopes: Tuple[Fraction, ...]
    inf_from: Optional[Fraction] = None
    _values: Tuple[Fraction, ...] = field(init=False, repr=False)

    def __post_init__(self):
        starts = tuple(as_q(s) for s in self.starts)
        jumps = tuple(as_q(j) for j in self.jumps)
        slopes = tuple(as_q(r) for r in self.slopes)
        if not starts or len(starts) != len(jumps) or len(starts) != len(slopes):
            raise ValueError("segments must be a non-empty list of (start, jump, slope)")
        if starts[0] != 0:
            raise ValueError("first segment must start at 0")
        for a, b in zip(starts, starts[1:]):
            if not a < b:
                raise ValueError("segment starts must be strictly increasing")
        object.__setattr__(self, "starts", starts)
        object.__setattr__(self, "jumps", jumps)
        object.__setattr__(self, "slopes", slopes)
        if self.inf_from is not None:
            object.__setattr__(self, "inf_from", as_q(self.inf_from))
        values = [Fraction(0)]
        for k in range(len(starts) - 1):
            values.append(values[-1] + jumps[k] + slopes[k] * (starts[k + 1] - starts[k]))
        object.__setattr__(self, "_values", tuple(values))

    # construction -----------------------------------------------------------

    @classmethod
    def from_segments(cls, segments: Iterable[Sequence[Number]], inf_from=None):
        segs = list(segments)
        return cls(
            tuple(s[0] for s in segs),
            tuple(s[1] for s in segs),
            tuple(s[2] for s in segs),
            inf_from,
        )

    @classmethod
    def affine(cls, jump: Number = 0, slope: Number = 0):
        """``jump`` at 0+ followed by constant ``slope``."""
        return cls((0,), (jump,), (slope,))

    @classmethod
    def zero(cls):
        return cls.affine(0, 0)

    @property
    def segments(self) -> Tuple[Tuple[Fraction, Fraction, Fraction], ...]:
        return tuple(zip(self.starts, self.jumps, self.slopes))

    def __repr__(self) -> str:
        body = ", ".join(f"({s}, {j}, {r})" for s, j, r in self.segments)
        tail = f", inf_from={self.inf_from}" if self.inf_from is not None else ""
        return f"{type(self).__name__}([{body}]{tail})"

    # evaluation -------------------------------------------------------------

    def __call__(self, t):
        return self.eval(t)

    def _is_inf(self, t) -> bool:
        return self.inf_from is not None and t > 0 and t >= self.inf_from

    def eval(self, t):
        """Value at ``t`` (the left limit)."""
        if t <= 0:
            return Fraction(0)
        if self._is_inf(t):
            return INF
        k = bisect_left(self.starts, t) - 1
        return self._values[k] + self.jumps[k] + self.slopes[k] * (t - self.starts[k])

    def eval_right(self, t):
        """Limit from the right at ``t``."""
        if t < 0:
            return Fraction(0)
        if self.inf_from is not None and t >= self.inf_from:
            return INF
        k = bisect_right(self.starts, t) - 1
        return self._values[k] + self.jumps[k] + self.slopes[k] * (t - self.starts[k])

    def jump_at(self, t) -> Fraction:
        k = bisect_left(self.starts, t)
        if k < len(self.starts) and self.starts[k] == t:
            return self.jumps[k]
        return Fraction(0)

    def slope_after(self, t) -> Fraction:
        """Slope on ``(t, t + eps)``."""
        k = max(bisect_right(self.starts, t) - 1, 0)
        return self.slopes[k]

    def left_slope(self, t) -> Fraction:
        """Left derivative at ``t > 0``."""
        if t <= 0:
            raise ValueError("left derivative needs t > 0")
        return self.slopes[bisect_left(self.starts, t) - 1]

    @property
    def final_slope(self) -> Fraction:
        return self.slopes[-1]

    def canonical(self) -> "PiecewiseLinear":
        """Same function with redundant breakpoints merged."""
        segs = [self.segments[0]]
        for s, j, r in self.segments[1:]:
            if j == 0 and r == segs[-1][2]:
                continue
            segs.append((s, j, r))
        return type(self).from_segments(segs, self.inf_from)

    def same_function(self, other: "PiecewiseLinear") -> bool:
        a, b = self.canonical(), other.canonical()
        return a.segments == b.segments and a.inf_from == b.inf_from

    def __eq__(self, other):
        if not isinstance(other, PiecewiseLinear):
            return NotImplemented
        return self.segments == other.segments and self.inf_from == other.inf_from

    def __hash__(self):
        return hash((self.segments, self.inf_from))

    def to_float(self):
        """Segments as float triples (for plotting and the float kernels)."""
        return [(float(s), float(j), float(r)) for s, j, r in self.segments]


class PLF(PiecewiseLinear):
    """Nondecreasing left-continuous piecewise-linear function."""

    def __post_init__(self):
        super().__post_init__()
        if any(j < 0 for j in self.jumps) or any(r < 0 for r in self.slopes):
            raise ValueError("PLF must be nondecreasing (jumps and slopes >= 0)")


# ---------------------------------------------------------------------------
# elementary operations


def eval(f: PiecewiseLinear, t):  # noqa: A001 - mirrors the operation name
    return f.eval(t)


def range_(f: PiecewiseLinear, s, t) -> Fraction:
    """Increment ``f(t) - f(s)`` over ``[s, t)``."""
    if s < 0 or s > t:
        raise ValueError(f"need 0 <= s <= t, got s={s}, t={t}")
    return f.eval(t) - f.eval(s)


def shape_check(f: PiecewiseLinear) -> str:
    """Classify ``f`` as ``"concave"``, ``"convex"``, ``"both"`` or ``"neither"``.

    A jump at 0+ is allowed for concavity (token-bucket burst); any jump rules
    out convexity.
    """
    slopes = f.slopes
    interior_jump = any(j != 0 for j in f.jumps[1:])
    nonincreasing = all(b <= a for a, b in zip(slopes, slopes[1:]))
    nondecreasing = all(b >= a for a, b in zip(slopes, slopes[1:]))
    concave = nonincreasing and not interior_jump
    convex = nondecreasing and not interior_jump and f.jumps[0] == 0
    if concave and convex:
        return "both"
    if concave:
        return "concave"
    if convex:
        return "convex"
    return "neither"


def is_concave(f: PiecewiseLinear) -> bool:
    return shape_check(f) in ("concave", "both")


def is_convex(f: PiecewiseLinear) -> bool:
    return shape_check(f) in ("convex", "both")


def tangent(f: PiecewiseLinear, tau) -> AffinePiece:
    """Tangent line at ``tau`` using the left derivative."""
    if tau <= 0:
        raise ValueError("tangent needs tau > 0")
    slope = f.left_slope(tau)
    return AffinePiece(f.eval(tau) - slope * tau, slope)


def breakpoints(*fs: PiecewiseLinear) -> list:
    pts = set()
    for f in fs:
        pts.update(f.starts)
    return sorted(pts)


# ---------------------------------------------------------------------------
# compliance checks


def _pair_candidates(fb: Sequence[Fraction], gb: Sequence[Fraction], lo, hi):
    """Vertices of the cells on which ``F(t) - F(s) - G(t - s)`` is affine."""
    pairs = set()
    for i, s in enumerate(fb):
        for t in fb[i:]:
            pairs.add((s, t))
        for e in gb:
            t = s + e
            if hi is None or t <= hi:
                pairs.add((s, t))
    for t in fb:
        for e in gb:
            s = t - e
            if s >= lo:
                pairs.add((s, t))
    return pairs


def _window_breaks(F: PiecewiseLinear, lo, hi):
    pts = {lo}
    if hi is not None:
        pts.add(hi)
    for s in F.starts:
        if s >= lo and (hi is None or s <= hi):
            pts.add(s)
    return sorted(pts)


def _tail_witness(F, G, lo, sign):
    t = max(F.starts[-1], G.starts[-1], lo) + 1
    while sign * (F.eval(t) - F.eval(lo) - G.eval(t - lo)) <= 0:
        t *= 2
    return t


def sup_increment_gap(F: PiecewiseLinear, G: PiecewiseLinear, lo=0, hi=None):
    """``sup {F(t) - F(s) - G(t - s) : lo <= s < t <= hi}`` and a witness pair.

    ``G`` may jump only at 0+.  Returns ``(value, (s, t))``; the value is
    ``INF`` when the tail slope of ``F`` exceeds that of ``G`` on an unbounded
    window.  The witness is approached from the right in ``t`` when ``F`` jumps
    there.
    """
    lo = as_q(lo)
    if hi is not None:
        hi = as_q(hi)
        if hi <= lo:
            return Fraction(0), (lo, lo)
    if hi is None and F.final_slope > G.final_slope:
        return INF, (lo, _tail_witness(F, G, lo, 1))
    fb = _window_breaks(F, lo, hi)
    gb = [Fraction(0)] + [s for s in G.starts if s > 0]
    best = None
    witness = (lo, lo)
    g0 = G.eval_right(0)
    for s, t in _pair_candidates(fb, gb, lo, hi):
        if t < s:
            continue
        open_right = hi is None or t < hi
        ft = F.eval_right(t) if open_right else F.eval(t)
        if t == s:
            if not open_right:
                continue
            val = ft - F.eval(t) - g0
        else:
            val = ft - F.eval(s) - G.eval(t - s)
        if best is None or val > best:
            best, witness = val, (s, t)
    if best is None:
        best = Fraction(0)
    return best, witness


def inf_increment_gap(F: PiecewiseLinear, G: PiecewiseLinear, lo=0, hi=None):
    """``inf {F(t) - F(s) - G(t - s) : lo <= s < t <= hi}`` and a witness pair.

    ``G`` must be continuous on ``t > 0``.  Returns ``-INF`` when the tail
    slope of ``F`` is below that of ``G`` on an unbounded window.
    """
    lo = as_q(lo)
    if hi is not None:
        hi = as_q(hi)
        if hi <= lo:
            return Fraction(0), (lo, lo)
    if hi is None and F.final_slope < G.final_slope:
        return -INF, (lo, _tail_witness(F, G, lo, -1))
    fb = _window_breaks(F, lo, hi)
    gb = [Fraction(0)] + [s for s in G.starts if s > 0]
    best = -G.eval_right(0)
    witness = (lo, lo)
    for s, t in _pair_candidates(fb, gb, lo, hi):
        if t <= s:
            continue
        val = F.eval(t) - F.eval_right(s) - G.eval(t - s)
        if val < best:
            best, witness = val, (s, t)
    return best, witness


def envelope_violation(A: PiecewiseLinear, E: PiecewiseLinear):
    """Witness ``(s, t)`` with ``A(s, t) > E(t - s)``, or ``None``."""
    value, witness = sup_increment_gap(A, E)
    return witness if value > 0 else None


def complies_envelope(A: PiecewiseLinear, E: Optional[PiecewiseLinear]) -> bool:
    """``A(s, t) <= E(t - s)`` for all ``0 <= s <= t``; ``E=None`` is unbounded."""
    if E is None:
        return True
    return envelope_violation(A, E) is None


def service_violation(C: PiecewiseLinear, curve: PiecewiseLinear):
    """Witness ``(s, t)`` with ``C(s, t) < curve(t - s)``, or ``None``."""
    value, witness = inf_increment_gap(C, curve)
    return witness if value < 0 else None


def complies_service(C: PiecewiseLinear, curve: PiecewiseLinear) -> bool:
    """``C(s, t) >= curve(t - s)`` for all ``0 <= s <= t``."""
    return service_violation(C, curve) is None


# ---------------------------------------------------------------------------
# algebra used by the curve builders and the bound checkers


def linear_combination(terms: Iterable[Tuple[Number, PiecewiseLinear]]) -> PiecewiseLinear:
    """``sum(c * f)`` as a general piecewise-linear function."""
    terms = [(as_q(c), f) for c, f in terms]
    pts = breakpoints(*(f for _, f in terms)) if terms else [Fraction(0)]
    jumps = [Fraction(0)] * len(pts)
    slopes = [Fraction(0)] * len(pts)
    for c, f in terms:
        if c == 0:
            continue
        fs, last, k = f.starts, len(f.starts) - 1, 0
        # one merge pass; pts is a superset of f.starts
        for n, p in enumerate(pts):
            if k < last and fs[k + 1] <= p:
                k += 1
            if fs[k] == p and f.jumps[k]:
                jumps[n] += c * f.jumps[k]
            if f.slopes[k]:
                slopes[n] += c * f.slopes[k]
    return PiecewiseLinear(tuple(pts), tuple(jumps), tuple(slopes))


def pointwise_min(f: PiecewiseLinear, g: PiecewiseLinear, cls=None) -> PiecewiseLinear:
    """Exact ``min(f, g)``, splitting segments where the two cross."""
    cls = cls or PiecewiseLinear
    pts = breakpoints(f, g)
    segs = []
    prev_end = Fraction(0)
    for k, a in enumerate(pts):
        b = pts[k + 1] if k + 1 < len(pts) else None
        fa, ga = f.eval_right(a), g.eval_right(a)
        fs, gs = f.slope_after(a), g.slope_after(a)
        lo_val, lo_slope = (fa, fs) if (fa, fs) <= (ga, gs) else (ga, gs)
        segs.append([a, lo_val - prev_end, lo_slope])
        # crossing inside (a, b)
        if fa != ga and fs != gs:
            dt = (ga - fa) / (fs - gs)
            if dt > 0 and (b is None or a + dt < b):
                c = a + dt
                other = gs if lo_slope == fs else fs
                segs.append([c, Fraction(0), other])
        if b is not None:
            prev_end = min(f.eval(b), g.eval(b))
    return cls.from_segments(segs)


def running_min(f: PiecewiseLinear) -> PiecewiseLinear:
    """``m(t) = inf_{s <= t} f(s)`` (left-continuous, includes right limits)."""
    segs = []
    cur = Fraction(0)  # m at the current start (value before the jump)
    level = Fraction(0)
    n = len(f.starts)
    for k in range(n):
        a = f.starts[k]
        b = f.starts[k + 1] if k + 1 < n else None
        after = f.eval_right(a)
        slope = f.slopes[k]
        new = min(level, after)
        jump = new - cur
        level = new
        if slope >= 0 or after > level:
            if slope < 0:
                # constant until f comes down to the running level
                dt = (after - level) / (-slope)
                segs.append((a, jump, Fraction(0)))
                if b is None or a + dt < b:
                    segs.append((a + dt, Fraction(0), slope))
                    if b is not None:
                        level = f.eval(b)
                cur = level
            else:
                segs.append((a, jump, Fraction(0)))
                cur = level
        else:
            segs.append((a, jump, slope))
            if b is not None:
                level = f.eval(b)
            cur = level
    return PiecewiseLinear.from_segments(segs).canonical()


def min_on(f: PiecewiseLinear, lo, hi):
    """Minimum of ``f`` over ``[lo, hi]`` including right limits inside.

    Returns ``(value, time, side)`` where ``side`` is ``"at"`` or ``"right"``.
    """
    lo, hi = as_q(lo), as_q(hi)
    best = (f.eval(lo), lo, "at")
    pts = [p for p in f.starts if lo <= p < hi]
    for p in pts:
        v = f.eval(p)
        if v < best[0]:
            best = (v, p, "at")
        v = f.eval_right(p)
        if v < best[0]:
            best = (v, p, "right")
    v = f.eval(hi)
    if v < best[0]:
        best = (v, hi, "at")
    if lo < hi and lo not in pts:
        v = f.eval_right(lo)
        if v < best[0]:
            best = (v, lo, "right")
    return best


def lines_lower_envelope(lines: Iterable[Tuple[Number, Number]]) -> PLF:
    """Concave PLF ``t -> min_k (a_k + b_k t)`` for ``t > 0``.

    The value at 0+ becomes a jump at 0; intercepts must be nonnegative.
    """
    lines = sorted({(as_q(a), as_q(b)) for a, b in lines})
    if not lines:
        raise ValueError("need at least one line")
    cur = min(lines)  # smallest intercept, then smallest slope
    t = Fraction(0)
    segs = [(Fraction(0), cur[0], cur[1])]
    while True:
        best = None
        for a, b in lines:
            if b < cur[1]:
                cross = (a - cur[0]) / (cur[1] - b)
                if cross > t and (best is None or (cross, b) < best):
                    best = (cross, b, a)
        if best is None:
            break
        t, b, a = best
        cur = (a, b)
        segs.append((t, Fraction(0), b))
    return PLF.from_segments(segs)


def lines_upper_envelope(lines: Iterable[Tuple[Number, Number]]) -> PLF:
    """Convex PLF ``t -> max_k (a_k + b_k t)`` for ``t >= 0``; must vanish at 0."""
    lines = sorted({(as_q(a), as_q(b)) for a, b in lines})
    if not lines:
        raise ValueError("need at least one line")
    top = max(a for a, _ in lines)
    if top != 0:
        raise ValueError("upper envelope must equal 0 at t=0")
    cur = max((ln for ln in lines if ln[0] == top), key=lambda ln: ln[1])
    t = Fraction(0)
    segs = [(Fraction(0), Fraction(0), cur[1])]
    while True:
        best = None
        for a, b in lines:
            if b > cur[1]:
                cross = (cur[0] - a) / (b - cur[1])
                if cross > t and (best is None or (cross, -b) < best):
                    best = (cross, -b, a)
        if best is None:
            break
        t, nb, a = best
        cur = (a, -nb)
        segs.append((t, Fraction(0), -nb))
    return PLF.from_segments(segs)
