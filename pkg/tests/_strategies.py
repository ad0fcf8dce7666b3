"""Hypothesis strategies shared by the test modules."""
from fractions import Fraction

from hypothesis import strategies as st

from gpscurve.plf import PLF, lines_lower_envelope, lines_upper_envelope


def rationals(lo=0, hi=10, den=8):
    lo, hi = Fraction(lo), Fraction(hi)
    return st.integers(int(lo * den), int(hi * den)).map(lambda k: Fraction(k, den))


positive = rationals(Fraction(1, 8), 10)


@st.composite
def plfs(draw, max_pieces=4, jumps=True):
    n = draw(st.integers(1, max_pieces))
    starts = sorted(set([Fraction(0)] + draw(st.lists(rationals(Fraction(1, 4), 8, 4), max_size=n - 1))))
    segs = []
    for s in starts:
        j = draw(rationals(0, 3, 4)) if jumps else Fraction(0)
        segs.append((s, j, draw(rationals(0, 4, 4))))
    return PLF.from_segments(segs)


@st.composite
def concave_plfs(draw, max_pieces=4):
    k = draw(st.integers(1, max_pieces))
    rhos = sorted(set(draw(st.lists(rationals(0, 4, 8), min_size=k, max_size=k))), reverse=True)
    sigma = draw(rationals(0, 4, 4))
    lines = [(sigma, rhos[0])]
    for r in rhos[1:]:
        sigma += draw(rationals(Fraction(1, 4), 3, 4))
        lines.append((sigma, r))
    return lines_lower_envelope(lines)


@st.composite
def convex_plfs(draw, max_pieces=3):
    k = draw(st.integers(1, max_pieces))
    lines = [(0, 0)]
    for _ in range(k):
        R = draw(rationals(Fraction(1, 4), 6, 4))
        L = draw(rationals(0, 3, 4))
        lines.append((-R * L, R))
    return lines_upper_envelope(lines)


def sample_times(f, *more, extra=()):
    """Breakpoints, midpoints and a point past the last breakpoint."""
    pts = set(extra)
    for g in (f,) + more:
        pts.update(g.starts)
    pts = sorted(pts)
    out = set(pts)
    for u, v in zip(pts, pts[1:]):
        out.add((u + v) / 2)
    out.add(pts[-1] + 1)
    out.add(pts[-1] + Fraction(17, 3))
    return sorted(out)
