"""Coefficient families, proof kernels and complete-monotonicity checks.

Every function treated here has the form ``F(x) = sum_n c_n q^{nx}`` with
``0 < q < 1``.  Since each ``q^{nx}`` is completely monotonic, ``c_n >= 0``
for all n certifies that F is.  The families are stored already multiplied by
their sign factors, so a theorem always predicts ``c_n >= 0``.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .core import EPS, DomainError, Eval, TruncationPolicy, exp_series
from .means import aq_const, best_b

SIGN_SLACK = 1e-15
ZERO_SNAP = 1e-13
CM_TOL = 1e-10
DEFAULT_N = 10_000


class FamilyId(enum.Enum):
    PSI_SERIES = "psi"
    FPRIME_QSC = "fprime_qsc"
    GQC = "gqc"
    THM2 = "thm2"
    THM1A = "thm1a"
    THM1B = "thm1b"
    THM10A = "thm10a"
    THM10B = "thm10b"


@dataclass(frozen=True)
class Family:
    """A coefficient family.  ``q`` may be left unset to act as a template.

    ``c=None`` means the theorem's own constant: ``best_b(q, s)`` for
    FPRIME_QSC and 0 for GQC.  THM2 requires c = 0 (function is CM) or
    c >= 1/3 (its negative is CM; coefficients are negated accordingly).
    """

    id: FamilyId
    q: float | None = None
    s: float | None = None
    c: float | None = None

    def at(self, q: float) -> "Family":
        fam = replace(self, q=float(q))
        fam.validate()
        return fam

    @property
    def first_n(self) -> int:
        return 2 if self.id is FamilyId.THM10A else 1

    @property
    def sign(self) -> float:
        if self.id is FamilyId.THM2:
            return 1.0 if self.c == 0 else -1.0
        return 1.0

    def resolved_c(self) -> float | None:
        if self.c is not None:
            return float(self.c)
        if self.id is FamilyId.FPRIME_QSC:
            return best_b(self.q, self.s)
        if self.id is FamilyId.GQC:
            return 0.0
        return None

    def validate(self):
        if self.q is None or not 0 < self.q < 1:
            raise DomainError(f"{self.id.value}: need 0 < q < 1, got {self.q!r}")
        if self.id is FamilyId.FPRIME_QSC and (self.s is None or not 0 < self.s < 1):
            raise DomainError(f"fprime_qsc: need 0 < s < 1, got {self.s!r}")
        if self.id in (FamilyId.FPRIME_QSC, FamilyId.GQC) and self.c is not None and self.c < 0:
            raise DomainError(f"{self.id.value}: need c >= 0, got {self.c!r}")
        if self.id is FamilyId.THM2:
            if self.c is None or not (self.c == 0 or self.c >= 1 / 3):
                raise DomainError(f"thm2 makes claims only for c = 0 or c >= 1/3, got {self.c!r}")

    def label(self) -> str:
        parts = [self.id.value]
        for name in ("q", "s", "c"):
            v = getattr(self, name)
            if v is not None:
                parts.append(f"{name}={v:g}")
        return ",".join(parts)


# ---------------------------------------------------------------------------
# scalar kernels


class Kernel(enum.Enum):
    LEMMA25 = "lemma25"
    LEMMA26 = "lemma26"
    HQ = "hq"
    UN = "un"
    TAYLOR_THM4 = "taylor_thm4"
    TAYLOR_THM3 = "taylor_thm3"


def _one_minus_qn(n, L):
    return -np.expm1(n * L)


def lemma25(n, q):
    """``ln q/(1-q^n) + 1/n - ln q/2 - n^2 (ln q)^3 q^{n/2} / (12 (1-q^n))``; negative."""
    L = math.log(q)
    n = np.asarray(n, dtype=float)
    d = _one_minus_qn(n, L)
    return L / d + 1 / n - L / 2 - n**2 * L**3 * np.exp(n * L / 2) / (12 * d)


def lemma26(n, q):
    """Same as :func:`lemma25` without the ``q^{n/2}`` factor; positive."""
    L = math.log(q)
    n = np.asarray(n, dtype=float)
    d = _one_minus_qn(n, L)
    return L / d + 1 / n - L / 2 - n**2 * L**3 / (12 * d)


def h_q(t, q):
    """``-1 + t + e^{-t} - a_q t^2``; nonpositive for ``t >= -ln q``."""
    t = np.asarray(t, dtype=float)
    return -1 + t + np.exp(-t) - aq_const(q) * t * t


def u_n(n, q):
    """``n (1-q)(q + q^n) - 2q (1 - q^n)``; identically 0 at n = 2."""
    n = np.asarray(n, dtype=float)
    return n * (1 - q) * (q + q**n) - 2 * q * (1 - q**n)


def taylor_thm4(q, s, c):
    """First Taylor coefficient in z = q^x of ``f_{q,s,c}(x+1) - f_{q,s,c}(x)``."""
    L = math.log(q)
    return q**s - q + (1 - s) * L * q**c


def taylor_thm3(q, c):
    """First Taylor coefficient in z = q^x of ``g_{q,c}(x+1) - g_{q,c}(x)``."""
    L = math.log(q)
    return -L + q - 1 - aq_const(q) * L * L * q**c


def _require(args, *names):
    missing = [k for k in names if k not in args]
    if missing:
        raise DomainError(f"missing kernel arguments: {', '.join(missing)}")


def scalar_kernel(kind: Kernel | str, **args) -> float:
    """Evaluate one of the proof kernels by name, validating its domain."""
    kind = Kernel(kind)
    q = args.get("q")
    if q is None or not 0 < q < 1:
        raise DomainError(f"kernel {kind.value} needs 0 < q < 1, got {q!r}")
    if kind in (Kernel.LEMMA25, Kernel.LEMMA26, Kernel.UN):
        _require(args, "n")
        n = args["n"]
        if int(n) != n or n < 1:
            raise DomainError(f"n must be a positive integer, got {n!r}")
        fn = {Kernel.LEMMA25: lemma25, Kernel.LEMMA26: lemma26, Kernel.UN: u_n}[kind]
        return float(fn(n, q))
    if kind is Kernel.HQ:
        _require(args, "t")
        if args["t"] < -math.log(q):
            raise DomainError("h_q is only claimed for t >= -ln q")
        return float(h_q(args["t"], q))
    if kind is Kernel.TAYLOR_THM4:
        _require(args, "s", "c")
        if not 0 < args["s"] < 1 or args["c"] < 0:
            raise DomainError("taylor_thm4 needs 0 < s < 1 and c >= 0")
        return taylor_thm4(q, args["s"], args["c"])
    _require(args, "c")
    if args["c"] < 0:
        raise DomainError("taylor_thm3 needs c >= 0")
    return taylor_thm3(q, args["c"])


# ---------------------------------------------------------------------------
# coefficient families


def coefficients(fam: Family, n: np.ndarray, *, exact: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Oriented coefficients c_n and their rounding scales for a bound family.

    With ``exact=True`` coefficients that vanish identically (the n = 1 term
    at c = b(q, s), the n = 1 term of thm10b, u_2) are returned as exact
    zeros; series evaluation uses this so that their rounding residue does not
    hide the much smaller true value at large x.  Certificates use the
    computed values.
    """
    fam.validate()
    q = fam.q
    L = math.log(q)
    n = np.asarray(n, dtype=float)
    d = _one_minus_qn(n, L)
    c = fam.resolved_c()
    kind = fam.id
    if kind is FamilyId.PSI_SERIES:
        v = L * L * n / d
        return v, np.abs(v)
    if kind is FamilyId.FPRIME_QSC:
        s = fam.s
        qn, qns, qnc = np.exp(n * L), np.exp(n * s * L), np.exp(n * c * L)
        inner = qn - qns - (1 - s) * n * L * qnc
        v = L * inner / d
        scale = -L * (qn + qns - (1 - s) * n * L * qnc) / d
        if exact and fam.c is None:
            # b(q, s) is defined by the vanishing of the n = 1 coefficient
            v = np.where(n == 1, 0.0, v)
            scale = np.where(n == 1, 0.0, scale)
        return v, scale
    if kind in (FamilyId.GQC, FamilyId.THM2):
        a = aq_const(q) if kind is FamilyId.GQC else 0.5
        if kind is FamilyId.THM2:
            c = float(fam.c)
        parts = (L / d, 1 / n, a * L * L * n * np.exp(n * c * L) / d)
        v = fam.sign * (parts[0] + parts[1] + parts[2])
        scale = sum(np.abs(p) for p in parts)
        if kind is FamilyId.GQC:
            # n = 1 collapses to (1 - q^c)(1 - q + ln q)/(1 - q); zero at c = 0
            v1 = fam.sign * -math.expm1(c * L) * (L - math.expm1(L)) / -math.expm1(L)
            v = np.where(n == 1, v1, v)
            scale = np.where(n == 1, abs(v1), scale)
        return v, scale
    if kind in (FamilyId.THM1A, FamilyId.THM1B):
        tail = L**3 * n**2 / (12 * d)
        if kind is FamilyId.THM1A:
            tail = tail * np.exp(n * L / 2)
        parts = (L / d, 1 / n, -L / 2, -tail)
        v = parts[0] + parts[1] + parts[2] + parts[3]
        if kind is FamilyId.THM1A:
            v = -v
        return v, sum(np.abs(p) for p in parts)
    if kind is FamilyId.THM10A:
        qn = np.exp(n * L)
        k = L * L / (d * (1 - q) * (1 + q))
        pos = n * (1 - q) * (q + qn)
        neg = 2 * q * d
        first = 3 if exact else 2  # u_2 vanishes identically
        v = np.where(n >= first, k * (pos - neg), 0.0)
        return v, np.where(n >= first, k * (pos + neg), 0.0)
    # THM10B
    a = math.sqrt(q) / (1 - q)
    b = n * np.exp(n * L / 2) / d
    v, scale = L * L * (a - b), L * L * (a + b)
    if exact:
        # the two parts coincide at n = 1
        v, scale = np.where(n == 1, 0.0, v), np.where(n == 1, 0.0, scale)
    return v, scale


def _degree_bound(fam: Family) -> tuple[int, Callable[[int], float]]:
    q = fam.q
    L = -math.log(q)

    def inv(N):
        return 1.0 / -math.expm1(-N * L)

    kind = fam.id
    if kind is FamilyId.PSI_SERIES:
        return 1, lambda N: L * L * inv(N)
    if kind is FamilyId.FPRIME_QSC:
        return 1, lambda N: L * (2 + (1 - fam.s) * L) * inv(N)
    if kind in (FamilyId.GQC, FamilyId.THM2):
        a = aq_const(q) if kind is FamilyId.GQC else 0.5
        return 1, lambda N: (L + a * L * L) * inv(N) + 1
    if kind in (FamilyId.THM1A, FamilyId.THM1B):
        return 2, lambda N: (L + L**3 / 12) * inv(N) + 1 + L / 2
    if kind is FamilyId.THM10A:
        return 1, lambda N: L * L * (2 * (1 - q) + 2) * inv(N) / ((1 - q) * (1 + q))
    return 1, lambda N: L * L * (math.sqrt(q) / (1 - q) + inv(N))


def series_coefficient(fam: Family, n: int) -> float:
    """Coefficient of ``q^{nx}`` in the family's CM function (sign-oriented)."""
    if int(n) != n or n < fam.first_n:
        raise DomainError(f"{fam.id.value}: n must be an integer >= {fam.first_n}, got {n!r}")
    v, _ = coefficients(fam, np.array([float(n)]))
    return float(v[0])


def family_series(
    fam: Family, x: float, pol: TruncationPolicy | None = None, *, step: float | None = None
) -> Eval:
    """Value of ``F(x) = sum c_n q^{nx}``, or ``F(x) - F(x + step)`` when step is given.

    Summing the coefficients directly keeps full relative precision where the
    assembled function would be a difference of nearly equal numbers.
    """
    fam.validate()
    degree, bound = _degree_bound(fam)
    L = math.log(fam.q)
    if step is None:
        return exp_series(lambda n: coefficients(fam, n, exact=True), fam.q, x, degree=degree, bound=bound, pol=pol)

    def coef(n):
        v, scale = coefficients(fam, n, exact=True)
        w = -np.expm1(n * step * L)
        return v * w, scale * w

    return exp_series(coef, fam.q, x, degree=degree, bound=bound, pol=pol)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class CertificateReport:
    family: Family
    n_range: tuple[int, int]
    q_grid: tuple[float, ...]
    min_margin: float
    witness: tuple[int, float]
    verdict: bool
    per_q: tuple[tuple[float, float, int, bool], ...]
    first_failure: tuple[int, float] | None = None


def _sweep_one(fam: Family, N: int):
    n = np.arange(fam.first_n, N + 1, dtype=float)
    v, scale = coefficients(fam, n)
    v = np.where(np.abs(v) <= ZERO_SNAP * scale, 0.0, v)
    bad = np.flatnonzero(v < -SIGN_SLACK * scale)
    i = int(np.argmin(v))
    first_bad = int(n[bad[0]]) if bad.size else None
    return fam.q, float(v[i]), int(n[i]), first_bad is None, first_bad


def certify_signs(
    fam: Family, N: int = DEFAULT_N, q_grid: Sequence[float] = (), *, workers: int | None = None
) -> CertificateReport:
    """Check ``c_n >= -slack`` for every n up to N and every q in the grid.

    Values within ``1e-13 * scale`` of zero count as exact zeros (u_2 and the
    vanishing first coefficients).  The report is an order-independent minimum,
    so ``workers > 1`` gives the same result.
    """
    if int(N) != N or N < 2:
        raise DomainError(f"N must be an integer >= 2, got {N!r}")
    grid = tuple(float(q) for q in q_grid)
    if not grid:
        raise DomainError("empty q grid")
    bound = [fam.at(q) for q in grid]
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(lambda f: _sweep_one(f, int(N)), bound))
    else:
        rows = [_sweep_one(f, int(N)) for f in bound]
    margin, n_w, q_w = min((m, n, q) for q, m, n, _, _ in rows)
    failures = [(nb, q) for q, _, _, _, nb in rows if nb is not None]
    return CertificateReport(
        family=fam,
        n_range=(fam.first_n, int(N)),
        q_grid=grid,
        min_margin=margin,
        witness=(n_w, q_w),
        verdict=all(r[3] for r in rows),
        per_q=tuple(r[:4] for r in rows),
        first_failure=min(failures) if failures else None,
    )


@dataclass(frozen=True)
class CMReport:
    function_id: str
    x_grid: tuple[float, ...]
    h: float
    K: int
    worst: float
    witness: tuple[float, int]
    verdict: bool
    cm_tol: float = CM_TOL


def finite_difference_cm(
    f: Callable[[float], float],
    x_grid: Sequence[float],
    h: float,
    K: int,
    *,
    domain: tuple[float, float] = (0.0, math.inf),
    cm_tol: float = CM_TOL,
    function_id: str = "f",
) -> CMReport:
    """Finite-difference surrogate for complete monotonicity.

    Computes ``(-1)^k Δ_h^k f(x)`` for k = 0..K at every grid point and passes
    iff the smallest of them is ``>= -cm_tol``.
    """
    grid = tuple(float(x) for x in x_grid)
    if not grid:
        raise DomainError("empty x grid")
    if not h > 0:
        raise DomainError(f"h must be positive, got {h!r}")
    if int(K) != K or not 0 <= K <= 10:
        raise DomainError(f"K must be an integer in [0, 10], got {K!r}")
    lo, hi = domain
    for x in grid:
        if not (x > lo and x + K * h < hi):
            raise DomainError(f"x={x!r} with {K} steps of {h!r} leaves the domain ({lo}, {hi})")
    worst, witness = math.inf, (grid[0], 0)
    for x in grid:
        d = np.array([float(f(x + j * h)) for j in range(K + 1)])
        for k in range(K + 1):
            val = (-1) ** k * d[0]
            if val < worst:
                worst, witness = float(val), (x, k)
            d = np.diff(d)
    return CMReport(function_id, grid, float(h), int(K), worst, witness, worst >= -cm_tol, cm_tol)


__all__ = [
    "CM_TOL",
    "EPS",
    "CertificateReport",
    "CMReport",
    "Family",
    "FamilyId",
    "Kernel",
    "certify_signs",
    "coefficients",
    "family_series",
    "finite_difference_cm",
    "h_q",
    "lemma25",
    "lemma26",
    "scalar_kernel",
    "series_coefficient",
    "taylor_thm3",
    "taylor_thm4",
    "u_n",
]
