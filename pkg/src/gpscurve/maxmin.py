"""Weighted max-min fair allocation of a divisible resource.

Requests may be ``INF`` (a player that takes whatever it is given).  All
arithmetic is exact when the inputs are :class:`~fractions.Fraction`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Hashable, List, Mapping, Sequence, Tuple

from .plf import INF, as_q

Player = Hashable


def _q_or_inf(x):
    return INF if x == INF else as_q(x)


@dataclass(frozen=True)
class AllocationProblem:
    """Players with positive ``weights`` request ``requests`` of ``resource``."""

    weights: Mapping[Player, Fraction]
    requests: Mapping[Player, Fraction]
    resource: Fraction

    def __post_init__(self):
        weights = {j: as_q(w) for j, w in self.weights.items()}
        requests = {j: _q_or_inf(x) for j, x in self.requests.items()}
        if set(weights) != set(requests):
            raise ValueError("weights and requests must cover the same players")
        if any(w <= 0 for w in weights.values()):
            raise ValueError("weights must be positive")
        if any(x < 0 for x in requests.values()):
            raise ValueError("requests must be nonnegative")
        resource = as_q(self.resource)
        if resource < 0:
            raise ValueError("resource must be nonnegative")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "requests", requests)
        object.__setattr__(self, "resource", resource)

    @property
    def players(self) -> List[Player]:
        return list(self.weights)


@dataclass(frozen=True)
class AllocationResult:
    fair_share: object  # Fraction or INF
    shares: Dict[Player, Fraction]
    unmet: Dict[Player, object]
    satisfied: FrozenSet[Player]


def waterfill(weights: Sequence, requests: Sequence, resource) -> Tuple[object, List[int]]:
    """Fair share and indices of satisfied players, by water-filling.

    Players are absorbed in order of ``request / weight``; a player whose ratio
    equals the running level counts as satisfied.
    """
    order = sorted(range(len(weights)), key=lambda j: requests[j] / weights[j])
    remaining = resource
    wsum = sum(weights, Fraction(0))
    satisfied = []
    for j in order:
        x = requests[j]
        # x / w_j <= remaining / wsum, cross-multiplied (both weights positive)
        if x == INF or x * wsum > remaining * weights[j]:
            return remaining / wsum, satisfied
        remaining -= x
        wsum -= weights[j]
        satisfied.append(j)
    return INF, satisfied


def _split(p: AllocationProblem):
    ids = list(p.weights)
    return ids, [p.weights[j] for j in ids], [p.requests[j] for j in ids]


def fair_share(p: AllocationProblem):
    """Fair share ``f``; ``INF`` iff the total request fits in the resource."""
    _, w, x = _split(p)
    return waterfill(w, x, p.resource)[0]


def allocate(p: AllocationProblem) -> AllocationResult:
    ids, w, x = _split(p)
    f, sat = waterfill(w, x, p.resource)
    shares, unmet = {}, {}
    for k, j in enumerate(ids):
        y = x[k] if f == INF else min(x[k], w[k] * f)
        shares[j] = y
        unmet[j] = x[k] - y
    return AllocationResult(f, shares, unmet, frozenset(ids[k] for k in sat))


def per_player_share(p: AllocationProblem, i: Player):
    """``f_i``: the best over subsets excluding ``i``; ``min(x_i, f_i)`` is ``y_i``."""
    if i not in p.weights:
        raise KeyError(f"unknown player {i!r}")
    ids, w, x = _split(p)
    x[ids.index(i)] = INF
    f, _ = waterfill(w, x, p.resource)
    return p.weights[i] * f


def _check_resource(resource):
    resource = as_q(resource)
    if resource <= 0:
        raise ValueError("feasibility is defined for a positive resource")
    return resource


def is_feasible(weights: Mapping[Player, Fraction], requests: Mapping[Player, Fraction],
                resource) -> bool:
    """Whether the requests of the subset ``requests.keys()`` are feasible.

    Feasible requests are satisfied whatever the other players ask for.
    """
    resource = _check_resource(resource)
    if not set(requests) <= set(weights):
        raise ValueError("requests name unknown players")
    if not requests:
        return True
    if any(x == INF for x in requests.values()):
        return False
    total = sum((as_q(x) for x in requests.values()), Fraction(0))
    outside = sum((as_q(w) for j, w in weights.items() if j not in requests), Fraction(0))
    if outside == 0:
        return total <= resource
    top = max(as_q(x) / as_q(weights[j]) for j, x in requests.items())
    return top * outside <= resource - total


def feasible_chain(weights: Mapping[Player, Fraction], requests: Mapping[Player, Fraction],
                   resource) -> List[Player]:
    """Removal order of a feasible subset, largest ``x/weight`` first.

    Every set left after a removal is again feasible; ties go to the smallest id.
    """
    if not is_feasible(weights, requests, resource):
        raise ValueError("requests are not feasible")
    left = dict(requests)
    order = []
    while left:
        k = min(left, key=lambda j: (-(as_q(left[j]) / as_q(weights[j])), j))
        order.append(k)
        del left[k]
    return order


def is_feasible_ordering(weights: Mapping[Player, Fraction], requests: Mapping[Player, Fraction],
                         resource, order: Sequence[Player]) -> bool:
    """Strict feasible-ordering test along ``order`` (a permutation of all players)."""
    if sorted(map(repr, order)) != sorted(map(repr, weights)) or len(set(order)) != len(weights):
        raise ValueError("order must be a permutation of the players")
    resource = as_q(resource)
    used = Fraction(0)
    wleft = sum((as_q(w) for w in weights.values()), Fraction(0))
    for k in order:
        x, w = _q_or_inf(requests[k]), as_q(weights[k])
        if x == INF or not x * wleft < (resource - used) * w:
            return False
        used += x
        wleft -= w
    return True
