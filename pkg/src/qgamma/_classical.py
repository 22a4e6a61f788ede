"""Classical ln Γ and polygamma (orders 0..2) for x > 0.

Shift the argument to x >= 10 with the recurrence, then use the Stirling
series with Bernoulli numbers up to B_16.  The first omitted term at x = 10
is below 2e-18, so the reported error bound is dominated by rounding; for
x >= 0.1 it stays below the documented budget of 1e-12.
"""

import math

import numpy as np

EPS = np.finfo(float).eps
X_ASYMPTOTIC = 10.0
BUDGET = 1e-12

# B_2 .. B_18
_BERNOULLI = [1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510, 43867 / 798]
_B = _BERNOULLI[:-1]
_B_NEXT = _BERNOULLI[-1]
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


def _shift(x):
    m = max(0, math.ceil(X_ASYMPTOTIC - x))
    return m, x + m


def _stirling_lngamma(y):
    s = (y - 0.5) * math.log(y) - y + _HALF_LOG_2PI
    terms = [b / ((2 * k) * (2 * k - 1) * y ** (2 * k - 1)) for k, b in enumerate(_B, start=1)]
    trunc = abs(_B_NEXT) / (18 * 17 * y**17)
    return s + math.fsum(terms), trunc


def lngamma(x):
    """Return ``(ln Γ(x), err)``."""
    m, y = _shift(x)
    body, trunc = _stirling_lngamma(y)
    logs = [math.log(x + j) for j in range(m)]
    down = math.fsum(logs)
    value = body - down
    rounding = 4 * EPS * (abs(body) + math.fsum(abs(v) for v in logs) + abs(y * math.log(y)))
    return value, trunc + rounding


def lngamma_diff(s, t):
    """Return ``(ln Γ(t) - ln Γ(s), err)`` for ``0 < s <= t`` without cancellation."""
    h = t - s
    if h == 0:
        return 0.0, 0.0
    m, ys = _shift(s)
    # yt = ys + h is never formed, so the rounding of t + m cannot leak into h
    lr = math.log1p(h / ys)  # ln(yt / ys)
    log_yt = math.log(ys) + lr
    # (yt - 1/2) ln yt - (ys - 1/2) ln ys - h, rearranged
    main = (ys - 0.5) * lr + h * log_yt - h
    corr = [
        b / ((2 * k) * (2 * k - 1)) * ys ** (1 - 2 * k) * math.expm1((1 - 2 * k) * lr)
        for k, b in enumerate(_B, start=1)
    ]
    logs = [math.log1p(h / (s + j)) for j in range(m)]
    value = main + math.fsum(corr) - math.fsum(logs)
    trunc = 2 * abs(_B_NEXT) / (18 * 17 * ys**17) * min(1.0, 17 * h / ys)
    parts = abs((ys - 0.5) * lr) + abs(h * log_yt) + h + math.fsum(abs(c) for c in corr) + math.fsum(logs)
    rounding = 8 * EPS * parts
    return value, trunc + rounding


def polygamma(k, x):
    """Return ``(ψ^{(k)}(x), err)`` for k in {0, 1, 2}."""
    m, y = _shift(x)
    if k == 0:
        asym = [math.log(y), -0.5 / y] + [-b / (2 * j * y ** (2 * j)) for j, b in enumerate(_B, start=1)]
        trunc = abs(_B_NEXT) / (18 * y**18)
        down = [-1.0 / (x + j) for j in range(m)]
    elif k == 1:
        asym = [1 / y, 0.5 / y**2] + [b / y ** (2 * j + 1) for j, b in enumerate(_B, start=1)]
        trunc = abs(_B_NEXT) / y**19
        down = [1.0 / (x + j) ** 2 for j in range(m)]
    elif k == 2:
        asym = [-1 / y**2, -1 / y**3] + [-(2 * j + 1) * b / y ** (2 * j + 2) for j, b in enumerate(_B, start=1)]
        trunc = 19 * abs(_B_NEXT) / y**20
        down = [-2.0 / (x + j) ** 3 for j in range(m)]
    else:
        raise ValueError("k must be 0, 1 or 2")
    parts = asym + down
    value = math.fsum(parts)
    rounding = 4 * EPS * math.fsum(abs(p) for p in parts)
    return value, trunc + rounding + EPS * abs(value)
