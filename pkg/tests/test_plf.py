from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpscurve import plf
from gpscurve.plf import INF, PLF, PiecewiseLinear

from _strategies import concave_plfs, convex_plfs, plfs, rationals, sample_times

P = PLF.from_segments


# -- examples -----------------------------------------------------------------

def test_eval_linear():
    assert plf.eval(P([(0, 0, 2)]), 3) == 6


def test_eval_left_continuous_jump():
    f = P([(0, 1, 0)])
    assert plf.eval(f, 0) == 0
    assert plf.eval(f, Q(1, 1000)) == 1


def test_eval_two_segments():
    assert plf.eval(P([(0, 0, 3), (1, 0, 0)]), 2) == 3


def test_eval_nonpositive_times_are_zero():
    f = P([(0, 2, 1)])
    assert f.eval(-5) == 0 and f.eval(0) == 0 and f.eval_right(0) == 2


def test_range_examples():
    f = P([(0, 0, 2)])
    assert plf.range_(f, 2, 2) == 0
    assert plf.range_(f, 1, 3) == 4
    assert plf.range_(P([(0, 1, 1)]), 0, 2) == 3


@pytest.mark.parametrize("s,t", [(2, 1), (-1, 1)])
def test_range_rejects_bad_interval(s, t):
    with pytest.raises(ValueError):
        plf.range_(P([(0, 0, 1)]), s, t)


def test_shape_examples():
    assert plf.shape_check(P([(0, 0, 3), (1, 0, 1)])) == "concave"
    assert plf.shape_check(P([(0, 0, 1), (1, 0, 2)])) == "convex"
    assert plf.shape_check(P([(0, 0, 1)])) == "both"


def test_shape_jump_rules():
    assert plf.shape_check(P([(0, 2, 1)])) == "concave"  # burst at 0+
    assert plf.shape_check(P([(0, 0, 1), (1, 1, 1)])) == "neither"
    assert plf.shape_check(P([(0, 0, 1), (1, 0, 3), (2, 0, 2)])) == "neither"


def test_tangent_affine():
    t = plf.tangent(plf.lines_lower_envelope([(4, Q(1, 2))]), 7)
    assert (t.sigma, t.rho) == (4, Q(1, 2))


def test_tangent_convex_latency_rate():
    c = plf.lines_upper_envelope([(0, 0), (0, 1), (-2, 2)])  # max{t, 2t - 2}
    t = plf.tangent(c, 3)
    assert (t.rate, t.intercept, t.latency) == (2, -2, 1)


def test_tangent_concave():
    e = plf.lines_lower_envelope([(2, 1), (4, Q(1, 2))])
    t = plf.tangent(e, 6)
    assert (t.sigma, t.rho) == (4, Q(1, 2))


def test_tangent_uses_left_slope_at_breakpoint():
    e = plf.lines_lower_envelope([(2, 1), (4, Q(1, 2))])  # kink at 4
    assert plf.tangent(e, 4).rho == 1


def test_tangent_rejects_nonpositive_tau():
    with pytest.raises(ValueError):
        plf.tangent(P([(0, 0, 1)]), 0)


def test_complies_envelope_examples():
    E = plf.lines_lower_envelope([(1, 1)])
    assert plf.complies_envelope(E, E)
    assert not plf.complies_envelope(P([(0, 0, 2)]), E)
    assert plf.complies_envelope(P([(0, 1, 1)]), E)
    assert plf.complies_envelope(P([(0, 0, 50)]), None)


def test_envelope_violation_witness():
    E = plf.lines_lower_envelope([(1, 1)])
    A = P([(0, 0, 1), (2, 3, 1)])  # burst of 3 at t=2
    s, t = plf.envelope_violation(A, E)
    assert A.eval_right(t) - A.eval(s) > E.eval(t - s) or A.eval(t) - A.eval(s) > E.eval(t - s)


def test_complies_service_examples():
    lazy = plf.lines_upper_envelope([(0, 0), (-2, 2)])
    assert plf.complies_service(lazy, lazy)
    assert not plf.complies_service(P([(0, 0, 1)]), P([(0, 0, 2)]))
    assert plf.complies_service(P([(0, 0, 2)]), lazy)


def test_validation():
    with pytest.raises(ValueError):
        P([(0, -1, 1)])
    with pytest.raises(ValueError):
        P([(0, 0, -1)])
    with pytest.raises(ValueError):
        P([(1, 0, 1)])
    with pytest.raises(ValueError):
        P([(0, 0, 1), (0, 0, 2)])


def test_infinite_tail():
    f = PiecewiseLinear.from_segments([(0, 0, 1)], inf_from=4)
    assert f.eval(3) == 3 and f.eval(4) == INF and f.eval(9) == INF


def test_running_min_and_min_on():
    g = PiecewiseLinear.from_segments([(0, 0, -1), (2, 3, -2), (4, 0, 1)])
    r = plf.running_min(g)
    assert r.eval(1) == -1 and r.eval(2) == -2 and r.eval(3) == -2 and r.eval(4) == -3
    value, when, _ = plf.min_on(g, 0, 10)
    assert (value, when) == (-3, 4)


def test_pointwise_min_crossing():
    m = plf.pointwise_min(P([(0, 0, 2)]), P([(0, 1, 1)]))
    assert m.eval(Q(1, 2)) == 1 and m.eval(1) == 2 and m.eval(3) == 4


# -- properties -----------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(plfs(), rationals(0, 10), rationals(0, 10), rationals(0, 10))
def test_range_additive(f, a, b, c):
    s, t, u = sorted((a, b, c))
    assert plf.range_(f, s, u) == plf.range_(f, s, t) + plf.range_(f, t, u)


@settings(max_examples=60, deadline=None)
@given(plfs(), rationals(0, 10), rationals(0, 10))
def test_nondecreasing(f, a, b):
    s, t = sorted((a, b))
    assert f.eval(s) <= f.eval(t) <= f.eval_right(t)


@settings(max_examples=60, deadline=None)
@given(concave_plfs(), rationals(Q(1, 8), 10))
def test_tangent_dominates_concave(f, tau):
    line = plf.tangent(f, tau)
    assert line(tau) == f.eval(tau)
    for t in sample_times(f, extra=[tau]):
        if t > 0:
            assert line(t) >= f.eval(t)


@settings(max_examples=60, deadline=None)
@given(convex_plfs(), rationals(Q(1, 8), 10))
def test_tangent_below_convex(f, tau):
    line = plf.tangent(f, tau)
    assert line(tau) == f.eval(tau)
    for t in sample_times(f, extra=[tau]):
        assert line(t) <= f.eval(t)


@settings(max_examples=60, deadline=None)
@given(concave_plfs())
def test_concave_average_rate_nonincreasing(f):
    assert plf.shape_check(f) in ("concave", "both")
    ts = [t for t in sample_times(f) if t > 0]
    ratios = [f.eval(t) / t for t in ts]
    assert all(a >= b for a, b in zip(ratios, ratios[1:]))


def _grid_envelope_ok(A, E, step=Q(1, 4), top=12):
    n = int(top / step)
    pts = [k * step for k in range(n + 1)]
    return all(A.eval(t) - A.eval(s) <= E.eval(t - s) for i, s in enumerate(pts) for t in pts[i:])


@settings(max_examples=40, deadline=None)
@given(plfs(max_pieces=3), concave_plfs(max_pieces=3))
def test_complies_envelope_implies_grid(A, E):
    # exact compliance implies the grid check; a grid failure implies exact failure
    if plf.complies_envelope(A, E):
        assert _grid_envelope_ok(A, E)
    if not _grid_envelope_ok(A, E):
        assert not plf.complies_envelope(A, E)


@settings(max_examples=40, deadline=None)
@given(plfs(max_pieces=3, jumps=True), convex_plfs())
def test_complies_service_implies_grid(C, S):
    step, top = Q(1, 4), 12
    pts = [k * step for k in range(int(top / step) + 1)]
    grid_ok = all(C.eval(t) - C.eval(s) >= S.eval(t - s) for i, s in enumerate(pts) for t in pts[i:])
    if plf.complies_service(C, S):
        assert grid_ok


@settings(max_examples=60, deadline=None)
@given(plfs(), plfs())
def test_linear_combination_pointwise(f, g):
    h = plf.linear_combination([(2, f), (-1, g)])
    for t in sample_times(f, g):
        assert h.eval(t) == 2 * f.eval(t) - g.eval(t)
        assert h.eval_right(t) == 2 * f.eval_right(t) - g.eval_right(t)


@settings(max_examples=60, deadline=None)
@given(plfs(), plfs())
def test_pointwise_min_pointwise(f, g):
    h = plf.pointwise_min(f, g)
    for t in sample_times(f, g, extra=[h.starts[-1]]):
        assert h.eval(t) == min(f.eval(t), g.eval(t))


@settings(max_examples=60, deadline=None)
@given(plfs(), plfs())
def test_running_min_pointwise(f, g):
    d = plf.linear_combination([(1, f), (-1, g)])
    r = plf.running_min(d)
    ts = sample_times(f, g)
    for t in ts:
        cands = [d.eval(u) for u in ts if u <= t] + [d.eval_right(u) for u in ts if u < t]
        assert r.eval(t) == min(cands)


@settings(max_examples=40, deadline=None)
@given(plfs())
def test_canonical_same_function(f):
    c = f.canonical()
    assert c.same_function(f)
    for t in sample_times(f):
        assert c.eval(t) == f.eval(t)
