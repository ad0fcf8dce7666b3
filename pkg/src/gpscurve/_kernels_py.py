"""Pure-Python twins of the compiled kernels in ``_kernels.pyx``."""
import math

import numpy as np

BACKEND = "python"


def waterfill(phi, x, resource):
    phi = [float(v) for v in phi]
    x = [float(v) for v in x]
    remaining = float(resource)
    order = sorted(range(len(phi)), key=lambda j: x[j] / phi[j])
    # suffix weight sums from the back, so the last player sees exactly phi[k]
    suffix = [0.0] * (len(order) + 1)
    for i in range(len(order) - 1, -1, -1):
        suffix[i] = phi[order[i]] + suffix[i + 1]
    for i, k in enumerate(order):
        wsum = suffix[i]
        if math.isinf(x[k]) or x[k] * wsum > remaining * phi[k]:
            return remaining / wsum
        remaining -= x[k]
    return math.inf


def subset_max(phi, x, resource):
    phi = [float(v) for v in phi]
    x = [float(v) for v in x]
    n = len(phi)
    if n > 24:
        raise ValueError("too many players to enumerate")
    size = 1 << n
    full = size - 1
    xs = [0.0] * size
    ws = [0.0] * size
    for mask in range(1, size):
        low = mask & -mask
        bit = low.bit_length() - 1
        xs[mask] = xs[mask ^ low] + x[bit]
        ws[mask] = ws[mask ^ low] + phi[bit]
    best = -math.inf
    for mask in range(size):
        if math.isinf(xs[mask]):
            continue
        num = resource - xs[mask]
        if mask == full:
            val = math.inf if num >= 0 else -math.inf
        else:
            val = num / ws[full ^ mask]
        if val > best:
            best = val
    return best


def backlog_steps(backlog, arrival_rates, service_rate, phi, steps):
    b = [float(v) for v in backlog]
    a = [float(v) for v in arrival_rates]
    phi = [float(v) for v in phi]
    out = np.empty((len(steps), len(b)), dtype=np.float64)
    for k, h in enumerate(steps):
        x = [bj + aj * h for bj, aj in zip(b, a)]
        f = waterfill(phi, x, service_rate * h)
        if math.isinf(f):
            b = [0.0] * len(b)
        else:
            b = [max(xj - pj * f, 0.0) for xj, pj in zip(x, phi)]
        out[k] = b
    return out
