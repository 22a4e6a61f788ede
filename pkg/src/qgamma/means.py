"""Stolarsky means, the sharp shift constants and the integral ψ_q mean."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _classical
from .core import (
    EPS,
    X_FLOOR,
    Branch,
    ConvergenceError,
    DomainError,
    Eval,
    QParam,
    RangeError,
    TruncationPolicy,
    _resolve,
    exp_series,
    psi_q,
    psi_q_deriv,
)

BRACKET_START = (1e-8, 1.0)
MAX_ITER = 400


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self):
        return self.hi - self.lo


@dataclass(frozen=True)
class SharpConstants:
    """Shift constants for ``Γ_q(x+1)/Γ_q(x+s)`` bracketed by ``exp((1-s) ψ_q(x+.))``.

    ``b`` is the best upper shift, ``a_mean`` the best lower shift
    ``I_{ψ_q}(s, 1)`` and ``aq`` the coefficient ``(q-1-ln q)/(ln q)^2``
    (``None`` unless ``0 < q < 1``).
    """

    q: float
    s: float
    b: float
    a_mean: Eval
    aq: float | None


def _log_expm1_ratio(z: float) -> float:
    """``ln(expm1(z) / z)``, finite for every real z."""
    if z == 0.0:
        return 0.0
    if abs(z) < 1e-5:
        return z / 2 + z * z / 24
    if z > 0:
        return z + math.log(-math.expm1(-z)) - math.log(z)
    return math.log(-math.expm1(z)) - math.log(-z)


def stolarsky_E(r: float, x: float, y: float) -> float:
    """One-parameter Stolarsky mean ``E(r, 0; x, y)``.

    ``((x^r - y^r) / (r (ln x - ln y)))^(1/r)``, the geometric mean for r = 0 and
    ``x`` on the diagonal.  Evaluated in log form so that large |r|, tiny |r|
    and x close to y neither overflow nor cancel.
    """
    x = float(x)
    y = float(y)
    if not (x > 0 and y > 0):
        raise DomainError(f"Stolarsky mean needs x, y > 0, got {x!r}, {y!r}")
    if x == y:
        return x
    if r == 0:
        return math.sqrt(x * y)
    # No switch to the geometric mean near r = 0: E(r) - E(0) is of order
    # r (ln x/y)^2 / 24, and the log form below is exact to rounding there.
    ell = math.log(x / y)
    return y * math.exp(_log_expm1_ratio(r * ell) / r)


def _check_s(s: float) -> float:
    s = float(s)
    if not 0 < s < 1:
        raise DomainError(f"s must lie in (0, 1), got {s!r}")
    return s


def best_b(q: float, s: float) -> float:
    """Best constant b(q, s) in the upper bound ``Γ_q(x+1)/Γ_q(x+s) < e^{(1-s)ψ_q(x+b)}``.

    Closed form for 0 < q < 1; ``(1+s)/2`` for q >= 1.
    """
    s = _check_s(s)
    q = float(q)
    if not q > 0:
        raise DomainError(f"q must be positive, got {q!r}")
    if q >= 1:
        return (1 + s) / 2
    L = math.log(q)
    # (q^s - q) / ((s-1) ln q) = q^s (1 - q^{1-s}) / ((1-s)(-ln q))
    ratio = math.exp(s * L) * -math.expm1((1 - s) * L) / ((1 - s) * -L)
    return math.log(ratio) / L


def aq_const(q: float) -> float:
    """``a_q = (q - 1 - ln q) / (ln q)^2`` for 0 < q < 1."""
    q = float(q)
    if not 0 < q < 1:
        raise DomainError(f"a_q needs 0 < q < 1, got {q!r}")
    L = math.log(q)
    # q - 1 - L = expm1(L) - L
    return (math.expm1(L) - L) / (L * L)


# ---------------------------------------------------------------------------
# integral mean of ψ_q


def _mean_psi_sub(s: float, t: float, q: float, pol: TruncationPolicy) -> Eval:
    L = math.log(q)
    h = t - s
    corr = Eval(0.0)
    if s * -L < X_FLOOR:
        m = math.ceil(X_FLOOR / -L - s)
        j = np.arange(m, dtype=float)
        # ln((1 - q^{s+j}) / (1 - q^{t+j}))
        lr = np.log1p(np.exp((s + j) * L) * math.expm1(h * L) / -np.expm1((t + j) * L))
        total = math.fsum(lr) / h
        corr = Eval(total, 8 * EPS * math.fsum(np.abs(lr)) / h + EPS * abs(total))
        s, t = s + m, t + m

    def coef(n):
        c = np.expm1(n * (h * L)) / (n * h * -np.expm1(n * L))
        return c, np.abs(c)

    series = exp_series(coef, q, s, degree=0, bound=lambda N: -L / -math.expm1(N * L), pol=pol)
    return series + corr - math.log1p(-q)


def mean_psi(q, s: float, t: float, pol: TruncationPolicy | None = None) -> Eval:
    """Average of ψ_q over [s, t], i.e. ``(ln Γ_q(t) - ln Γ_q(s)) / (t - s)``."""
    pol = _resolve(pol)
    qp = QParam.of(q)
    s, t = float(s), float(t)
    if not 0 < s <= t:
        raise DomainError(f"need 0 < s <= t, got s={s!r}, t={t!r}")
    if s == t:
        return psi_q(s, qp, pol)
    if qp.branch is Branch.SUB_UNIT:
        return _mean_psi_sub(s, t, qp.q, pol)
    if qp.branch is Branch.SUPER_UNIT:
        base = _mean_psi_sub(s, t, 1.0 / qp.q, pol)
        return base + qp.log * ((s + t) / 2 - 1.5)
    diff, err = _classical.lngamma_diff(s, t)
    v = diff / (t - s)
    return Eval(v, err / (t - s) + EPS * abs(v))


def _inverse(qp: QParam, y: float, y_err: float, pol: TruncationPolicy) -> Eval:
    if qp.branch is Branch.SUB_UNIT and y >= -math.log1p(-qp.q):
        raise RangeError(f"y={y!r} is not below sup psi_q = -ln(1-q) = {-math.log1p(-qp.q)!r}")

    def f(x):
        return psi_q(x, qp, pol).value - y

    lo, hi = BRACKET_START
    while f(lo) > 0:
        lo *= 1e-3
        if lo < 1e-300:
            raise RangeError(f"no bracket for y={y!r} near 0+")
    while f(hi) < 0:
        lo = hi
        hi *= 2
        if hi > 1e300:
            raise RangeError(f"no bracket for y={y!r}")
    res_target = pol.target_tol * max(1.0, abs(y))
    x = math.sqrt(lo * hi) if hi / lo > 4 else 0.5 * (lo + hi)
    for _ in range(MAX_ITER):
        fx = f(x)
        if fx == 0 or abs(fx) <= res_target:
            break
        if fx < 0:
            lo = x
        else:
            hi = x
        if hi - lo <= 4 * EPS * hi:
            break
        d = psi_q_deriv(x, qp, 1, pol).value
        step = x - fx / d if d > 0 else math.nan
        if lo < step < hi:
            x = step
        else:
            x = math.sqrt(lo * hi) if hi / lo > 4 else 0.5 * (lo + hi)
    else:
        raise ConvergenceError(f"psi_q inverse did not converge for y={y!r}")
    ev = psi_q(x, qp, pol)
    res = abs(ev.value - y)
    allowed = max(res_target, 8 * (ev.err + EPS * abs(y)))
    if res > allowed:
        raise ConvergenceError(f"psi_q inverse residual {res:.3g} exceeds {allowed:.3g}")
    slope = psi_q_deriv(x, qp, 1, pol).value
    if not slope > 0:
        raise ConvergenceError(f"psi_q is numerically flat at x={x!r}; inverse ill-conditioned")
    delta = 2 * (res + ev.err + y_err) / slope
    # ψ_q' is decreasing, so bound the slope on [x - delta, x + delta] by its right end
    slope_far = psi_q_deriv(x + delta, qp, 1, pol).value
    if slope_far > 0:
        delta = (res + ev.err + y_err) / slope_far
    return Eval(x, delta + EPS * x)


def psi_q_inverse(q, y: float, pol: TruncationPolicy | None = None) -> Eval:
    """Solve ``ψ_q(x) = y`` for x > 0 by bracket expansion and safeguarded Newton.

    The error bound is on x and accounts for the residual and the evaluation
    error of ψ_q.  Raises :class:`RangeError` when y is outside the range of
    ψ_q (only possible above ``-ln(1-q)`` for 0 < q < 1).
    """
    return _inverse(QParam.of(q), float(y), 0.0, _resolve(pol))


def integral_psi_mean(q, s: float, t: float, pol: TruncationPolicy | None = None) -> Eval:
    """``I_{ψ_q}(s, t) = ψ_q^{-1}(mean of ψ_q over [s, t])``, which lies in (s, t)."""
    pol = _resolve(pol)
    qp = QParam.of(q)
    s, t = float(s), float(t)
    if not 0 < s < t:
        raise DomainError(f"need 0 < s < t, got s={s!r}, t={t!r}")
    h = t - s
    if h <= 1e-12 * t:
        return Eval(0.5 * (s + t), h)
    m = mean_psi(qp, s, t, pol)
    out = _inverse(qp, m.value, m.err, pol)
    if not s < out.value < t:
        clipped = min(max(out.value, s + EPS * s), t - EPS * t)
        out = Eval(clipped, out.err + abs(clipped - out.value))
    return out


def best_a(q, s: float, pol: TruncationPolicy | None = None) -> Eval:
    """Best lower shift a(q, s) = I_{ψ_q}(s, 1)."""
    return integral_psi_mean(q, _check_s(s), 1.0, pol)


def sharp_constants(q, s: float, pol: TruncationPolicy | None = None) -> SharpConstants:
    qp = QParam.of(q)
    s = _check_s(s)
    aq = aq_const(qp.q) if qp.q < 1 else None
    return SharpConstants(qp.q, s, best_b(qp.q, s), best_a(qp, s, pol), aq)
