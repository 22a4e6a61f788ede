"""Evaluation of ln Γ_q, ψ_q and its first two derivatives for every q > 0.

All values come back as :class:`Eval` objects carrying an absolute error
bound that covers series truncation and an estimate of floating-point
rounding.  Three branches are supported:

* ``0 < q < 1``: q-Pochhammer products and the exponential (Lambert-type)
  series for ψ_q, summed with :func:`math.fsum` and a closed-form tail bound;
* ``q > 1``: reduced to base ``1/q`` through
  ``Γ_q(x) = Γ_{1/q}(x) q^{(x-1)(x-2)/2}``;
* ``q = 1``: the classical functions (see :mod:`qgamma._classical`).
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from . import _classical

EPS = np.finfo(float).eps

# q in these open intervals is refused: the series need ~1/|ln q| terms.
NEAR_ONE = 1e-4

# Below x|ln q| = X_FLOOR the ψ series is first shifted up by the recurrence.
X_FLOOR = 2e-3


class DomainError(ValueError):
    """Argument outside the domain of the requested function."""


class ConvergenceError(ArithmeticError):
    """Requested tolerance cannot be met within the term/iteration budget."""


class RangeError(DomainError):
    """Target value lies outside the range of the function being inverted."""


class Branch(enum.Enum):
    SUB_UNIT = "sub-unit"
    SUPER_UNIT = "super-unit"
    CLASSICAL = "classical"


@dataclass(frozen=True)
class QParam:
    """Validated deformation parameter ``q > 0``."""

    q: float

    def __post_init__(self):
        q = float(self.q)
        if not q > 0 or not math.isfinite(q):
            raise DomainError(f"q must be a positive finite number, got {self.q!r}")
        if 1 - NEAR_ONE < q < 1 or 1 < q < 1 + NEAR_ONE:
            raise DomainError(
                f"q={q!r} is within {NEAR_ONE:g} of 1; the series lose precision "
                "there, use the classical branch q=1"
            )
        object.__setattr__(self, "q", q)

    @property
    def branch(self) -> Branch:
        if self.q < 1:
            return Branch.SUB_UNIT
        if self.q > 1:
            return Branch.SUPER_UNIT
        return Branch.CLASSICAL

    @property
    def log(self) -> float:
        return math.log(self.q)

    @classmethod
    def of(cls, q: Union["QParam", float]) -> "QParam":
        return q if isinstance(q, QParam) else cls(q)


def _default_max_terms() -> int:
    raw = os.environ.get("QGAMMA_MAX_TERMS")
    if raw is None:
        return 1_000_000
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"QGAMMA_MAX_TERMS must be an integer, got {raw!r}") from None
    if value < 1:
        raise DomainError("QGAMMA_MAX_TERMS must be >= 1")
    return value


@dataclass(frozen=True)
class TruncationPolicy:
    """How far to sum: tail bound relative to the leading term, and a term cap."""

    target_tol: float = 1e-15
    max_terms: int = field(default_factory=_default_max_terms)

    def __post_init__(self):
        if not self.target_tol > 0:
            raise DomainError("target_tol must be > 0")
        if int(self.max_terms) < 1:
            raise DomainError("max_terms must be >= 1")


@dataclass(frozen=True)
class Eval:
    """A value together with a nonnegative absolute error bound."""

    value: float
    err: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "err", float(self.err))
        if not self.err >= 0:
            raise ValueError(f"error bound must be nonnegative, got {self.err!r}")
        if math.isfinite(self.value) and not math.isfinite(self.err):
            raise ValueError("finite value with infinite error bound")

    def __float__(self):
        return float(self.value)

    def __add__(self, other):
        if isinstance(other, Eval):
            v = self.value + other.value
            return Eval(v, self.err + other.err + EPS * abs(v))
        v = self.value + float(other)
        return Eval(v, self.err + EPS * abs(v))

    __radd__ = __add__

    def __neg__(self):
        return Eval(-self.value, self.err)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k):
        if isinstance(k, Eval):
            v = self.value * k.value
            err = abs(self.value) * k.err + abs(k.value) * self.err + self.err * k.err
            return Eval(v, err + EPS * abs(v))
        k = float(k)
        v = self.value * k
        return Eval(v, abs(k) * self.err + EPS * abs(v))

    __rmul__ = __mul__

    def __truediv__(self, k: float):
        return self * (1.0 / float(k))


def _resolve(pol: TruncationPolicy | None) -> TruncationPolicy:
    return TruncationPolicy() if pol is None else pol


def _check_x(x: float) -> float:
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"x must be a positive finite number, got {x!r}")
    return x


# ---------------------------------------------------------------------------
# exponential series engine


def power_tail(r: float, N: int, k: int) -> float:
    """Closed form of ``sum_{n >= N} n**k * r**n`` for ``0 <= r < 1``, k in {0,1,2}."""
    if r == 0.0:
        return 0.0
    rN = r**N
    d = 1.0 - r
    if k == 0:
        return rN / d
    if k == 1:
        return rN * (N - (N - 1) * r) / d**2
    if k == 2:
        return rN * (N * N - (2 * N * N - 2 * N - 1) * r + (N - 1) ** 2 * r * r) / d**3
    raise ValueError("k must be 0, 1 or 2")


Coefficients = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def exp_series(
    coef: Coefficients,
    q: float,
    x: float,
    *,
    degree: int,
    bound: Callable[[int], float],
    pol: TruncationPolicy | None = None,
) -> Eval:
    """Sum ``sum_{n >= 1} c_n q**(n x)`` for ``0 < q < 1``, ``x > 0``.

    ``coef(n)`` returns the coefficients and a per-coefficient magnitude scale
    (sum of absolute values of the parts that were combined, used for the
    rounding estimate).  ``bound(N)`` must satisfy ``|c_n| <= bound(N) n**degree``
    for all ``n >= N``; the tail is then bounded with :func:`power_tail`.
    """
    pol = _resolve(pol)
    L = math.log(q)
    r = math.exp(x * L)
    if r == 0.0:
        return Eval(0.0, 0.0)
    if r >= 1.0:
        raise ConvergenceError(f"series ratio q**x={r!r} is not below 1")
    thresh = pol.target_tol * bound(1) * r

    def tail(N):
        return bound(N) * power_tail(r, N, degree)

    N = max(2, math.ceil(math.log(pol.target_tol) / (x * L)) + 1)
    while tail(N) > thresh and N <= pol.max_terms + 1:
        N += max(1, N // 8)
    if N - 1 > pol.max_terms:
        raise ConvergenceError(
            f"series needs {N - 1} terms (q={q!r}, x={x!r}); max_terms={pol.max_terms}"
        )

    def partial(N):
        n = np.arange(1, N, dtype=float)
        c, scale = coef(n)
        expo = n * (x * L)
        powers = np.exp(expo)
        value = math.fsum(c * powers)
        rounding = EPS * math.fsum((4.0 * scale + np.abs(c) * (np.abs(expo) + 4.0)) * powers)
        return value, rounding

    value, rounding = partial(N)
    # When the leading coefficients cancel, the sum is far below bound(1) r and
    # the tail must be pushed below it as well so that the sign is resolved.
    cap = min(pol.max_terms + 1, 64 * N)
    while tail(N) > pol.target_tol * abs(value) and tail(N) > 1e-300 and N < cap:
        N = min(cap, 2 * N)
        value, rounding = partial(N)
    return Eval(value, tail(N) + rounding + EPS * abs(value))


# ---------------------------------------------------------------------------
# q-Pochhammer and ln Γ_q


def log_q_pochhammer(a: float, q, pol: TruncationPolicy | None = None) -> Eval:
    """``ln (a; q)_inf = sum_{n >= 0} ln(1 - a q**n)`` for ``0 <= a < 1 < 1/q``."""
    pol = _resolve(pol)
    qp = QParam.of(q)
    if qp.branch is not Branch.SUB_UNIT:
        raise DomainError("log_q_pochhammer needs 0 < q < 1")
    a = float(a)
    if not 0 <= a < 1:
        raise DomainError(f"a must lie in [0, 1), got {a!r}")
    if a == 0.0:
        return Eval(0.0, 0.0)
    q = qp.q
    first = abs(math.log1p(-a))
    thresh = pol.target_tol * first

    def tail(N):
        y = a * q**N
        return y / ((1 - q) * (1 - y))

    N = 1
    while tail(N) > thresh:
        N = N + max(1, N // 4)
        if N > pol.max_terms:
            raise ConvergenceError(f"(a;q) product needs more than {pol.max_terms} factors")
    n = np.arange(N, dtype=float)
    y = a * np.power(q, n)
    terms = np.log1p(-y)
    value = math.fsum(terms)
    rounding = EPS * math.fsum(np.abs(terms) * 4 + 2 * y / (1 - y))
    return Eval(value, tail(N) + rounding + EPS * abs(value))


def _log_qpoch_power(t: float, q: float, pol: TruncationPolicy) -> Eval:
    """``ln (q**t; q)_inf`` computed with ``expm1`` so that small t stays accurate."""
    L = math.log(q)
    first = abs(math.log(-math.expm1(t * L)))
    thresh = pol.target_tol * max(first, 1e-300)

    def tail(K):
        y = math.exp((t + K) * L)
        return y / ((1 - q) * (1 - y))

    K = 1
    while tail(K) > thresh:
        K = K + max(1, K // 4)
        if K > pol.max_terms:
            raise ConvergenceError(f"(q^t;q) product needs more than {pol.max_terms} factors")
    expo = (t + np.arange(K, dtype=float)) * L
    one_minus = -np.expm1(expo)
    terms = np.log(one_minus)
    value = math.fsum(terms)
    y = np.exp(expo)
    rounding = EPS * math.fsum(4 * np.abs(terms) + (np.abs(expo) + 2) * y / one_minus)
    return Eval(value, tail(K) + rounding + EPS * abs(value))


def _lngamma_sub(x: float, q: float, pol: TruncationPolicy) -> Eval:
    num = _log_qpoch_power(1.0, q, pol)
    den = _log_qpoch_power(x, q, pol)
    return num - den + (1 - x) * math.log1p(-q)


def lngamma_q(x: float, q, pol: TruncationPolicy | None = None) -> Eval:
    """ln Γ_q(x) for x > 0 and any q > 0."""
    pol = _resolve(pol)
    x = _check_x(x)
    qp = QParam.of(q)
    if qp.branch is Branch.SUB_UNIT:
        return _lngamma_sub(x, qp.q, pol)
    if qp.branch is Branch.SUPER_UNIT:
        base = _lngamma_sub(x, 1.0 / qp.q, pol)
        return base + qp.log * (x - 1) * (x - 2) / 2
    return Eval(*_classical.lngamma(x))


def lngamma_q_direct(x: float, q, pol: TruncationPolicy | None = None) -> Eval:
    """ln Γ_q(x) for q > 1 straight from the base-1/q product definition.

    Kept separate from :func:`lngamma_q` (which uses the reduction to 1/q) so
    the two can be cross-checked.
    """
    pol = _resolve(pol)
    x = _check_x(x)
    qp = QParam.of(q)
    if qp.branch is not Branch.SUPER_UNIT:
        raise DomainError("lngamma_q_direct is the q > 1 product formula")
    p = 1.0 / qp.q
    num = _log_qpoch_power(1.0, p, pol)
    den = _log_qpoch_power(x, p, pol)
    return num - den + (1 - x) * math.log(qp.q - 1) + qp.log * x * (x - 1) / 2


# ---------------------------------------------------------------------------
# ψ_q and derivatives


def _psi_sub(x: float, q: float, k: int, pol: TruncationPolicy) -> Eval:
    L = math.log(q)
    shift = Eval(0.0)
    if x * -L < X_FLOOR:
        m = math.ceil(X_FLOOR / -L - x)
        j = np.arange(m, dtype=float)
        expo = (x + j) * L
        r = np.exp(expo)
        d = -np.expm1(expo)
        if k == 0:
            parts = L * r / d
        elif k == 1:
            parts = L**2 * r / d**2
        else:
            parts = L**3 * r * (1 + r) / d**3
        s = math.fsum(parts)
        shift = Eval(s, EPS * math.fsum(np.abs(parts) * (np.abs(expo) + 8)) + EPS * abs(s))
        x = x + m

    def coef(n):
        c = n**k / -np.expm1(n * L)
        return c, c

    series = exp_series(coef, q, x, degree=k, bound=lambda N: 1.0 / -math.expm1(N * L), pol=pol)
    out = series * L ** (k + 1) + shift
    if k == 0:
        out = out - math.log1p(-q)
    return out


def _psi_any(x: float, q, k: int, pol: TruncationPolicy | None) -> Eval:
    pol = _resolve(pol)
    x = _check_x(x)
    qp = QParam.of(q)
    if qp.branch is Branch.SUB_UNIT:
        return _psi_sub(x, qp.q, k, pol)
    if qp.branch is Branch.SUPER_UNIT:
        base = _psi_sub(x, 1.0 / qp.q, k, pol)
        if k == 0:
            return base + (x - 1.5) * qp.log
        if k == 1:
            return base + qp.log
        return base
    return Eval(*_classical.polygamma(k, x))


def psi_q(x: float, q, pol: TruncationPolicy | None = None) -> Eval:
    """q-digamma ψ_q(x) = d/dx ln Γ_q(x)."""
    return _psi_any(x, q, 0, pol)


def psi_q_deriv(x: float, q, k: int, pol: TruncationPolicy | None = None) -> Eval:
    """ψ_q^{(k)}(x) for k in {1, 2}."""
    if k not in (1, 2):
        raise DomainError(f"only k=1 and k=2 are supported, got {k!r}")
    return _psi_any(x, q, k, pol)


def log_ratio(x: float, q: float) -> float:
    """``ln((1 - q**x) / (1 - q))`` for ``0 < q < 1`` without cancellation."""
    return math.log(-math.expm1(x * math.log(q))) - math.log1p(-q)


def q_ratio(x: float, q: float) -> float:
    """``q**x / (1 - q**x)`` for ``0 < q < 1``."""
    e = x * math.log(q)
    return math.exp(e) / -math.expm1(e)
