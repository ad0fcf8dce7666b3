import itertools
from fractions import Fraction as Q

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from gpscurve import maxmin, oracle
from gpscurve.maxmin import AllocationProblem as AP
from gpscurve.plf import INF

from _strategies import positive, rationals


def test_fair_share_examples():
    assert maxmin.fair_share(AP({1: 1, 2: 1}, {1: 1, 2: 3}, 2)) == 1
    assert maxmin.fair_share(AP({1: 1, 2: 1, 3: 2}, {1: 2, 2: 6, 3: 10}, 12)) == Q(10, 3)
    assert maxmin.fair_share(AP({1: 1, 2: 1}, {1: Q(1, 2), 2: Q(1, 2)}, 2)) == INF


def test_satisfied_set_example():
    res = maxmin.allocate(AP({1: 1, 2: 1, 3: 2}, {1: 2, 2: 6, 3: 10}, 12))
    assert res.satisfied == {1}
    assert res.shares == {1: 2, 2: Q(10, 3), 3: Q(20, 3)}
    assert sum(res.shares.values()) == 12


def test_allocate_two_players():
    res = maxmin.allocate(AP({1: 1, 2: 1}, {1: 1, 2: 3}, 2))
    assert res.shares == {1: 1, 2: 1} and res.unmet == {1: 0, 2: 2}


def test_zero_requests():
    res = maxmin.allocate(AP({1: 1, 2: 3}, {1: 0, 2: 0}, 7))
    assert all(v == 0 for v in res.shares.values()) and all(v == 0 for v in res.unmet.values())


def test_empty_player_set():
    assert maxmin.fair_share(AP({}, {}, 3)) == INF
    assert maxmin.fair_share(AP({}, {}, 0)) == INF


def test_zero_resource():
    assert maxmin.fair_share(AP({1: 1, 2: 1}, {1: 1, 2: 0}, 0)) == 0
    assert maxmin.fair_share(AP({1: 1, 2: 1}, {1: 0, 2: 0}, 0)) == INF


def test_tie_goes_to_satisfied():
    # x_1 / phi_1 equals the fair share exactly
    res = maxmin.allocate(AP({1: 1, 2: 1}, {1: 1, 2: 5}, 2))
    assert res.fair_share == 1 and 1 in res.satisfied


def test_infinite_request_never_satisfied():
    res = maxmin.allocate(AP({1: 1, 2: 1}, {1: INF, 2: Q(1, 2)}, 3))
    assert res.fair_share == Q(5, 2) and res.satisfied == {2} and res.unmet[1] == INF


def test_per_player_share_examples():
    assert maxmin.per_player_share(AP({1: 1, 2: 1}, {1: 0, 2: 3}, 2), 1) == 1
    assert maxmin.per_player_share(AP({"i": 2}, {"i": 0}, 5), "i") == 5
    for x1 in (1, 2, 5):
        p = AP({1: 1, 2: 1, 3: 2}, {1: x1, 2: 6, 3: 10}, 12)
        assert min(x1, maxmin.per_player_share(p, 1)) == maxmin.allocate(p).shares[1]


def test_per_player_share_unknown():
    with pytest.raises(KeyError):
        maxmin.per_player_share(AP({1: 1}, {1: 0}, 1), 9)


def test_problem_validation():
    with pytest.raises(ValueError):
        AP({1: 0}, {1: 1}, 1)
    with pytest.raises(ValueError):
        AP({1: 1}, {1: -1}, 1)
    with pytest.raises(ValueError):
        AP({1: 1}, {1: 1}, -1)
    with pytest.raises(ValueError):
        AP({1: 1}, {2: 1}, 1)


def test_is_feasible_examples():
    w = {1: 1, 2: 1, 3: 1}
    assert maxmin.is_feasible(w, {1: Q(3, 10)}, 1)
    assert not maxmin.is_feasible(w, {1: Q(4, 10)}, 1)
    assert maxmin.is_feasible(w, {}, 1)
    # single request below its guaranteed share
    assert maxmin.is_feasible({1: 2, 2: 3}, {1: Q(2, 5)}, 1)
    assert not maxmin.is_feasible({1: 2, 2: 3}, {1: Q(2, 5) + Q(1, 1000)}, 1)
    assert maxmin.is_feasible(w, {1: Q(1, 3), 2: Q(1, 3), 3: Q(1, 3)}, 1)


def test_is_feasible_rejects_resource():
    with pytest.raises(ValueError):
        maxmin.is_feasible({1: 1}, {1: 0}, 0)


def test_feasible_chain_examples():
    w = {1: 1, 2: 1, 3: 1}
    assert maxmin.feasible_chain(w, {1: Q(1, 5), 2: Q(3, 10)}, 1) == [2, 1]
    assert maxmin.feasible_chain(w, {}, 1) == []
    assert maxmin.feasible_chain(w, {3: Q(1, 10)}, 1) == [3]
    assert maxmin.feasible_chain(w, {1: Q(1, 5), 2: Q(1, 5)}, 1) == [1, 2]  # tie -> smallest id
    with pytest.raises(ValueError):
        maxmin.feasible_chain(w, {1: Q(1, 2)}, 1)


def test_feasible_ordering_examples():
    w = {1: 1, 2: 1, 3: 1}
    x = {1: Q(1, 10), 2: Q(2, 10), 3: Q(3, 10)}
    assert maxmin.is_feasible_ordering(w, x, 1, [1, 2, 3])
    assert maxmin.is_feasible_ordering(w, x, 1, [3, 2, 1])
    half = {1: Q(1, 2), 2: Q(1, 2), 3: Q(1, 2)}
    for order in itertools.permutations([1, 2, 3]):
        assert not maxmin.is_feasible_ordering(w, half, 1, list(order))
    with pytest.raises(ValueError):
        maxmin.is_feasible_ordering(w, x, 1, [1, 2])


# -- properties ---------------------------------------------------------------

requests = st.one_of(rationals(0, 10, 4), st.just(INF))


@st.composite
def problems(draw, min_n=1, max_n=6, allow_inf=True):
    n = draw(st.integers(min_n, max_n))
    w = {j: draw(positive) for j in range(n)}
    x = {j: draw(requests if allow_inf else rationals(0, 10, 4)) for j in range(n)}
    return AP(w, x, draw(rationals(0, 20, 4)))


@settings(max_examples=150, deadline=None)
@given(problems())
def test_fair_share_matches_enumeration(p):
    assert maxmin.fair_share(p) == oracle.fair_share_bruteforce(p)


@settings(max_examples=150, deadline=None)
@given(problems())
def test_allocation_invariants(p):
    res = maxmin.allocate(p)
    f = res.fair_share
    X = p.resource
    finite = all(x != INF for x in p.requests.values())
    for j in p.players:
        x = p.requests[j]
        assert res.shares[j] == (x if f == INF else min(x, p.weights[j] * f))
        assert res.shares[j] + res.unmet[j] == x
        assert (j in res.satisfied) == (f == INF or x <= p.weights[j] * f)
    total = sum(res.shares.values())
    if finite:
        assert total == min(sum(p.requests.values()), X)
    else:
        assert total == X
    assert f >= X / sum(p.weights.values()) if p.players else True
    assert (f != INF) == (not finite or sum(p.requests.values()) > X)


@settings(max_examples=100, deadline=None)
@given(problems(min_n=2), st.data())
def test_share_trichotomy(p, data):
    ids = p.players
    i = data.draw(st.sampled_from(ids))
    rest = [j for j in ids if j != i and p.requests[j] != INF]
    M = set(data.draw(st.lists(st.sampled_from(rest), unique=True))) if rest else set()
    assume(p.requests[i] != INF)
    M.add(i)
    wout = sum(p.weights[j] for j in ids if j not in M)
    assume(wout > 0)
    a = (p.resource - sum(p.requests[j] for j in M)) / wout
    b = (p.resource - sum(p.requests[j] for j in M - {i})) / (wout + p.weights[i])
    c = p.requests[i] / p.weights[i]
    # either a <= b <= c, or all reversed
    assert (a <= b <= c) or (a >= b >= c)


@settings(max_examples=100, deadline=None)
@given(problems(min_n=2, allow_inf=False), st.data())
def test_feasible_subset_always_satisfied(p, data):
    ids = p.players
    M = data.draw(st.lists(st.sampled_from(ids), unique=True, min_size=1))
    # scale M's requests to the feasibility limit or below
    w = p.weights
    X = Q(1)
    u = {j: data.draw(rationals(Q(1, 8), 1)) for j in M}
    outside = sum(w[j] for j in ids if j not in M)
    lam = 1 / (max(u.values()) * outside + sum(u[j] * w[j] for j in M))
    lam *= data.draw(rationals(Q(1, 8), 1))
    xM = {j: lam * u[j] * w[j] for j in M}
    assert maxmin.is_feasible(w, xM, X)
    for _ in range(3):
        completion = {j: data.draw(requests) for j in ids if j not in M}
        res = maxmin.allocate(AP(w, {**xM, **completion}, X))
        assert set(M) <= res.satisfied
    chain = maxmin.feasible_chain(w, xM, X)
    for k in range(len(chain)):
        assert maxmin.is_feasible(w, {j: xM[j] for j in chain[k:]}, X)


@settings(max_examples=150, deadline=None)
@given(problems(allow_inf=False), st.data())
def test_unmet_demand_monotone_and_contraction(p, data):
    ids = p.players
    x2 = {j: p.requests[j] + data.draw(rationals(0, 3, 4)) for j in ids}
    X2 = max(Q(0), p.resource - data.draw(rationals(0, 5, 4)))
    q = AP(p.weights, x2, X2)
    u1, u2 = maxmin.allocate(p).unmet, maxmin.allocate(q).unmet
    assert all(u1[j] <= u2[j] for j in ids)
    # contraction for an arbitrary second problem
    x3 = {j: data.draw(rationals(0, 10, 4)) for j in ids}
    X3 = data.draw(rationals(0, 20, 4))
    u3 = maxmin.allocate(AP(p.weights, x3, X3)).unmet
    lhs = sum(abs(u1[j] - u3[j]) for j in ids)
    assert lhs <= sum(abs(p.requests[j] - x3[j]) for j in ids) + abs(p.resource - X3)


@settings(max_examples=150, deadline=None)
@given(problems(), st.data())
def test_fair_share_monotone(p, data):
    f = maxmin.fair_share(p)
    more = AP(p.weights, p.requests, p.resource + data.draw(rationals(0, 5, 4)))
    assert maxmin.fair_share(more) >= f
    j = data.draw(st.sampled_from(p.players))
    if p.requests[j] != INF:
        bigger = dict(p.requests)
        bigger[j] = p.requests[j] + data.draw(rationals(0, 5, 4))
        assert maxmin.fair_share(AP(p.weights, bigger, p.resource)) <= f


@settings(max_examples=150, deadline=None)
@given(problems(allow_inf=False), st.data(), st.sampled_from([Q(1, 4), Q(1, 2), Q(3, 4)]))
def test_fair_share_jointly_convex(p, data, lam):
    ids = p.players
    x2 = {j: data.draw(rationals(0, 10, 4)) for j in ids}
    q = AP(p.weights, x2, data.draw(rationals(0, 20, 4)))
    mid = AP(p.weights, {j: lam * p.requests[j] + (1 - lam) * x2[j] for j in ids},
             lam * p.resource + (1 - lam) * q.resource)
    fp, fq, fm = maxmin.fair_share(p), maxmin.fair_share(q), maxmin.fair_share(mid)
    if INF not in (fp, fq, fm):
        assert fm <= lam * fp + (1 - lam) * fq


@settings(max_examples=100, deadline=None)
@given(problems(min_n=1), st.data())
def test_per_player_share_consistent(p, data):
    i = data.draw(st.sampled_from(p.players))
    fi = maxmin.per_player_share(p, i)
    f = maxmin.fair_share(p)
    xi = p.requests[i]
    assert min(xi, fi) == min(xi, p.weights[i] * f)
    # the share is the enumerated maximum over subsets that exclude i
    others = [j for j in p.players if j != i]
    w = [p.weights[j] for j in others] + [p.weights[i]]
    x = [p.requests[j] for j in others] + [INF]
    assert fi == p.weights[i] * oracle.subset_max(w, x, p.resource)


@settings(max_examples=100, deadline=None)
@given(problems(min_n=2, allow_inf=False), rationals(Q(1, 8), 4))
def test_sorted_orderings_feasible_when_underloaded(p, slack):
    X = sum(p.requests.values()) + slack
    order = sorted(p.players, key=lambda j: (p.requests[j] / p.weights[j], j))
    assert maxmin.is_feasible_ordering(p.weights, p.requests, X, order)
