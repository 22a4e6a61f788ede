"""Grid verification of the complete-monotonicity theorems and inequalities.

Pointwise inequalities are checked as ``margin > err``.  For 0 < q < 1 the
margins are summed as exponential series with the constants already cancelled,
so they keep relative precision even when they are as small as ``q^{40}``;
q > 1 reuses the same series through the 1/q reduction, and q = 1 goes through
the classical functions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .certificates import (
    CM_TOL,
    DEFAULT_N,
    Family,
    FamilyId,
    certify_signs,
    family_series,
    finite_difference_cm,
    h_q,
    lemma25,
    lemma26,
    taylor_thm3,
    taylor_thm4,
    u_n,
)
from .core import (
    EPS,
    Branch,
    DomainError,
    Eval,
    QParam,
    TruncationPolicy,
    _resolve,
    exp_series,
    lngamma_q,
    log_ratio,
    psi_q,
    psi_q_deriv,
    q_ratio,
)
from .means import aq_const, best_a, best_b, integral_psi_mean, mean_psi

PROBE_X = (5.0, 10.0, 20.0, 40.0)
X_NEAR_ZERO = 1e-6
NEAR_ZERO_GAP = 1e-4
BELOW_SHIFT = 0.05
TAYLOR_SHIFT = 0.01
RESIDUAL_TOL = 1e-12
TAYLOR_ZERO_TOL = 1e-12
FD_STEP = 0.05
FD_ORDER = 6
FD_GRID = tuple(float(v) for v in np.round(np.linspace(0.2, 5.0, 17), 12))


class TheoremId(enum.Enum):
    THM4_PRIME = "thm4p"
    COR20 = "cor20"
    THM4 = "thm4"
    COR21 = "cor21"
    THM3 = "thm3"
    THM2 = "thm2"
    THM1 = "thm1"
    THM10 = "thm10"
    COR32 = "cor32"
    INEQ02 = "ineq02"
    INEQ11 = "ineq11"


class FunctionId(enum.Enum):
    FQSC = "fqsc"
    GQC = "gqc"
    T2 = "t2"
    T1A = "t1a"
    T1B = "t1b"
    T10A = "t10a"
    T10B = "t10b"


@dataclass(frozen=True)
class GridSpec:
    """Parameter grid for :func:`verify_theorem`.

    ``c_values=None`` lets each theorem use its own constants (best_b for
    thm4, 0 for thm3, {0, 1/3, 1/2} for thm2).  ``t_values`` are the right
    endpoints for the integral-mean theorem; certificates run over
    ``cert_q_values`` in addition to the sub-unit part of ``q_values``.
    """

    q_values: tuple[float, ...] = (0.1, 0.3, 0.5, 0.7, 0.9, 1.0, 1.5, 2.0, 5.0)
    x_values: tuple[float, ...] = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0)
    s_values: tuple[float, ...] = (0.1, 0.25, 0.5, 0.75, 0.9)
    c_values: tuple[float, ...] | None = None
    t_values: tuple[float, ...] = (1.0, 2.0)
    cert_q_values: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99)
    cert_N: int = DEFAULT_N

    def __post_init__(self):
        for name in ("q_values", "x_values", "s_values", "t_values", "cert_q_values"):
            vals = tuple(float(v) for v in getattr(self, name))
            if not vals:
                raise DomainError(f"{name} is empty")
            object.__setattr__(self, name, vals)
        for q in self.q_values:
            QParam(q)
        if any(not 0 < q < 1 for q in self.cert_q_values):
            raise DomainError("cert_q_values must lie in (0, 1)")
        if any(not x > 0 for x in self.x_values):
            raise DomainError("x_values must be positive")
        if any(not 0 < s < 1 for s in self.s_values):
            raise DomainError("s_values must lie in (0, 1)")
        if any(not t > 0 for t in self.t_values):
            raise DomainError("t_values must be positive")
        if self.c_values is not None:
            cs = tuple(float(c) for c in self.c_values)
            if not cs:
                raise DomainError("c_values is empty")
            if any(c < 0 for c in cs):
                raise DomainError("c_values must be >= 0")
            object.__setattr__(self, "c_values", cs)
        if int(self.cert_N) < 2:
            raise DomainError("cert_N must be >= 2")

    def as_dict(self) -> dict:
        return {
            "q_values": list(self.q_values),
            "x_values": list(self.x_values),
            "s_values": list(self.s_values),
            "c_values": None if self.c_values is None else list(self.c_values),
            "t_values": list(self.t_values),
            "cert_q_values": list(self.cert_q_values),
            "cert_N": int(self.cert_N),
        }


DEFAULT_GRID = GridSpec()


@dataclass(frozen=True)
class Check:
    point: dict
    quantity: str
    value: float
    threshold: float | None
    passed: bool
    err: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "passed", bool(self.passed))
        object.__setattr__(self, "err", float(self.err))


@dataclass
class TheoremReport:
    id: TheoremId
    grid: GridSpec
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def sharpness_probes(self) -> list[Check]:
        return [c for c in self.checks if c.quantity.startswith("sharp_")]

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def _pt(q=None, x=None, s=None, c=None) -> dict:
    return {"q": q, "x": x, "s": s, "c": c}


def _positive(point, quantity, ev: Eval) -> Check:
    """Strict positivity beyond the propagated error."""
    return Check(point, quantity, ev.value, ev.err, ev.value > ev.err, ev.err)


# ---------------------------------------------------------------------------
# assembled functions


def _require_sub(qp: QParam, what: str):
    if qp.branch is not Branch.SUB_UNIT:
        raise DomainError(f"{what} is defined for 0 < q < 1 only")


def theorem_function(
    fid: FunctionId | str,
    x: float,
    q,
    pol: TruncationPolicy | None = None,
    *,
    s: float | None = None,
    c: float | None = None,
) -> Eval:
    """Assemble one of the theorem functions from ln Γ_q, ψ_q, ψ_q', ψ_q''.

    FQSC is ``ln Γ_q(x+1) - ln Γ_q(x+s) - (1-s) ψ_q(x+c)`` (any q > 0); the
    others need 0 < q < 1.  The error bound is the sum of the component bounds.
    """
    fid = FunctionId(fid)
    pol = _resolve(pol)
    qp = QParam.of(q)
    x = float(x)
    if not x > 0:
        raise DomainError(f"x must be positive, got {x!r}")
    if fid is FunctionId.FQSC:
        if s is None or not 0 < s < 1:
            raise DomainError("fqsc needs 0 < s < 1")
        if c is None or c < 0:
            raise DomainError("fqsc needs c >= 0")
        return lngamma_q(x + 1, qp, pol) - lngamma_q(x + s, qp, pol) - (1 - s) * psi_q(x + c, qp, pol)
    _require_sub(qp, fid.value)
    q = qp.q
    L = qp.log
    lr = Eval(log_ratio(x, q), 4 * EPS * (abs(math.log(-math.expm1(x * L))) + abs(math.log1p(-q))))
    qr = q_ratio(x, q)
    if fid in (FunctionId.GQC, FunctionId.T2):
        cc = 0.0 if c is None else float(c)
        if cc < 0:
            raise DomainError("c must be >= 0")
        a = aq_const(q) if fid is FunctionId.GQC else 0.5
        return psi_q(x, qp, pol) - lr + a * psi_q_deriv(x + cc, qp, 1, pol)
    if fid is FunctionId.T1A:
        half = Eval(L * qr / 2, 4 * EPS * abs(L * qr))
        return -psi_q(x, qp, pol) + lr + half + psi_q_deriv(x + 0.5, qp, 2, pol) / 12
    if fid is FunctionId.T1B:
        half = Eval(L * qr / 2, 4 * EPS * abs(L * qr))
        return psi_q(x, qp, pol) - lr - half - psi_q_deriv(x, qp, 2, pol) / 12
    if fid is FunctionId.T10A:
        r1 = L * L * qr / (1 - q)
        r2 = L * L * qr * qr / (1 + q)
        rhs = Eval(r1 + r2, 8 * EPS * (abs(r1) + abs(r2)))
        return psi_q_deriv(x, qp, 1, pol) - rhs
    rhs = cor32_bound(x, q)
    return rhs - psi_q_deriv(x + 0.5, qp, 1, pol)


def cor32_bound(x: float, q: float) -> Eval:
    """``(ln q)^2 q^{x+1/2} / ((1-q)(1-q^x))``."""
    L = math.log(q)
    v = L * L * math.sqrt(q) * q_ratio(x, q) / (1 - q)
    return Eval(v, 8 * EPS * (abs(x * L) + 1) * v)


def ineq11_bound(x: float, q: float) -> Eval:
    """``ln(1/q) q^x / (1-q^x)``."""
    v = -math.log(q) * q_ratio(x, q)
    return Eval(v, 6 * EPS * (abs(x * math.log(q)) + 1) * v)


# ---------------------------------------------------------------------------
# the shifted-mean gap behind all Kershaw-type bounds


def _gap_sub(q: float, s: float, t: float, c: float, x: float, pol, *, first_zero: bool = False) -> Eval:
    L = math.log(q)
    h = t - s
    m0 = min(s, c)

    def coef(n):
        d = -np.expm1(n * L)
        e = np.expm1(n * (h * L)) / (n * (h * L))
        a = np.exp(n * (s - m0) * L) * e
        b = np.exp(n * (c - m0) * L)
        v, scale = L * (a - b) / d, -L * (a + b) / d
        if first_zero:
            v, scale = np.where(n == 1, 0.0, v), np.where(n == 1, 0.0, scale)
        return v, scale

    return exp_series(coef, q, x + m0, degree=0, bound=lambda N: -2 * L / -math.expm1(N * L), pol=pol)


def mean_shift_gap(
    q, s: float, t: float, c: float, x: float, pol: TruncationPolicy | None = None, *, c_err: float = 0.0
) -> Eval:
    """``mean of ψ_q over [x+s, x+t]  -  ψ_q(x+c)``.

    With t = 1 this is ``f_{q,s,c}(x) / (1-s)``; with c = I_{ψ_q}(s, t) it is
    the margin of the integral-mean inequality.  ``c_err`` (uncertainty in c)
    is propagated through ψ_q'.
    """
    pol = _resolve(pol)
    qp = QParam.of(q)
    s, t, c, x = float(s), float(t), float(c), float(x)
    if not (0 < s < t and c >= 0 and x > 0):
        raise DomainError("need 0 < s < t, c >= 0, x > 0")
    if qp.branch is Branch.SUB_UNIT:
        out = _gap_sub(qp.q, s, t, c, x, pol)
    elif qp.branch is Branch.SUPER_UNIT:
        out = _gap_sub(1.0 / qp.q, s, t, c, x, pol) + qp.log * ((s + t) / 2 - c)
    else:
        out = mean_psi(qp, x + s, x + t, pol) - psi_q(x + c, qp, pol)
    if c_err > 0:
        slope = psi_q_deriv(max(x + c - c_err, 0.5 * (x + c)), qp, 1, pol).value
        out = Eval(out.value, out.err + abs(slope) * c_err)
    return out


def f_qsc(q, s: float, c: float | None, x: float, pol=None, *, c_err: float = 0.0) -> Eval:
    """``f_{q,s,c}(x) = ln Γ_q(x+1) - ln Γ_q(x+s) - (1-s) ψ_q(x+c)`` in series form.

    ``c=None`` means the exact constant b(q, s).  For 0 < q < 1 the leading
    coefficient then vanishes identically and is dropped instead of being
    left as a rounding residue of size ``eps * q^x``, which would swamp the
    true value (of order ``q^{2x}``) once x is large.
    """
    qp = QParam.of(q)
    if c is None:
        b = best_b(qp.q, s)
        if qp.branch is Branch.SUB_UNIT:
            if not (0 < s < 1 and x > 0):
                raise DomainError("need 0 < s < 1, x > 0")
            return (1 - s) * _gap_sub(qp.q, float(s), 1.0, b, float(x), _resolve(pol), first_zero=True)
        c = b
    return (1 - s) * mean_shift_gap(qp, s, 1.0, c, x, pol, c_err=c_err)


@dataclass(frozen=True)
class KershawGaps:
    """Signed gaps ``ln(Γ_q(x+1)/Γ_q(x+s)) - (1-s) ψ_q(x+shift)``.

    lower uses a(q,s) (predicted > 0); upper uses (1+s)/2 and sharp_upper uses
    best_b (both predicted < 0, sharp one closer to 0).
    """

    lower_gap: Eval
    upper_gap: Eval
    sharp_upper_gap: Eval


def kershaw_bounds(q, s: float, x: float, pol: TruncationPolicy | None = None) -> KershawGaps:
    pol = _resolve(pol)
    qp = QParam.of(q)
    a = best_a(qp, s, pol)
    return KershawGaps(
        lower_gap=f_qsc(qp, s, a.value, x, pol, c_err=a.err),
        upper_gap=f_qsc(qp, s, (1 + s) / 2, x, pol),
        sharp_upper_gap=f_qsc(qp, s, None, x, pol),
    )


# ---------------------------------------------------------------------------
# per-theorem verification


def _sub_q(grid: GridSpec, report: TheoremReport) -> list[float]:
    qs = [q for q in grid.q_values if q < 1]
    skipped = [q for q in grid.q_values if q >= 1]
    if skipped:
        report.notes.append(f"q >= 1 not covered by this statement; skipped {skipped}")
    return qs


def _cert_q(grid: GridSpec, sub: Sequence[float]) -> list[float]:
    return sorted(set(sub) | set(grid.cert_q_values))


def _certificate_check(fam: Family, grid: GridSpec, qs, point) -> Check:
    rep = certify_signs(fam, grid.cert_N, qs)
    q_w = rep.witness[1]
    return Check(
        {**point, "q": q_w},
        f"certificate:{fam.id.value}:min_margin",
        rep.min_margin,
        0.0,
        rep.verdict,
    )


def _decreasing_checks(fam: Family, xs, pol, point, quantity) -> list[Check]:
    xs = sorted(xs)
    out = []
    for a, b in zip(xs, xs[1:]):
        ev = family_series(fam, a, pol, step=b - a)
        out.append(_positive({**point, "x": a}, quantity, ev))
    return out


def _reduction_note(report: TheoremReport, qs):
    if any(q > 1 for q in qs):
        report.notes.append("q > 1 points depend on the reduction Gamma_q(x) = Gamma_{1/q}(x) q^{(x-1)(x-2)/2}")
    if any(q == 1 for q in qs):
        report.notes.append("q = 1 points use the classical gamma/digamma branch")


def _verify_integral_mean(report: TheoremReport, grid: GridSpec, pol, t_values):
    qs = list(grid.q_values)
    _reduction_note(report, qs)
    for q in qs:
        for s in grid.s_values:
            for t in t_values:
                if not t > s:
                    continue
                I = integral_psi_mean(q, s, t, pol)
                base = _pt(q=q, s=s, c=I.value)
                m = mean_psi(q, s, t, pol)
                res = abs(psi_q(I.value, q, pol).value - m.value)
                tag = "" if t == 1.0 else f"[t={t:g}]"
                report.checks.append(Check(base, f"mean_in_(s,t){tag}", I.value, None, s < I.value < t, I.err))
                report.checks.append(Check(base, f"forward_residual{tag}", res, RESIDUAL_TOL, res <= RESIDUAL_TOL))
                for x in grid.x_values:
                    gap = mean_shift_gap(q, s, t, I.value, x, pol, c_err=I.err)
                    if report.id is TheoremId.COR20:
                        gap = (1 - s) * gap
                        name = "lower_gap"
                    else:
                        name = f"margin{tag}"
                    report.checks.append(_positive({**base, "x": x}, name, gap))
                near = mean_shift_gap(q, s, t, I.value, X_NEAR_ZERO, pol, c_err=I.err)
                report.checks.append(
                    Check(
                        {**base, "x": X_NEAR_ZERO},
                        f"sharp_gap_near_0{tag}",
                        near.value,
                        NEAR_ZERO_GAP,
                        near.value < NEAR_ZERO_GAP,
                        near.err,
                    )
                )


def _fd_cm_check(q, fid: FunctionId, pol, sign: float = 1.0, **params) -> Check:
    """Finite-difference CM surrogate for ``sign * theorem_function(fid)``."""

    def f(x):
        return sign * theorem_function(fid, x, q, pol, **params).value

    rep = finite_difference_cm(f, FD_GRID, FD_STEP, FD_ORDER, function_id=fid.value)
    label = fid.value if sign > 0 else f"-{fid.value}"
    return Check(
        _pt(q=q, x=rep.witness[0], s=params.get("s"), c=params.get("c")),
        f"fd_cm:{label}",
        rep.worst,
        -CM_TOL,
        rep.verdict,
    )


def _violation_probe(q, s, c, pol, point, quantity) -> Check:
    """Find x in PROBE_X with f_{q,s,c}(x) > err, i.e. the upper bound fails."""
    best = None
    for x in PROBE_X:
        f = f_qsc(q, s, c, x, pol)
        key = f.value - f.err
        if best is None or key > best[0]:
            best = (key, x, f)
    _, x, f = best
    return Check({**point, "x": x}, quantity, f.value, f.err, f.value > f.err, f.err)


def _verify_thm4(report, grid, pol):
    qs = _sub_q(grid, report)
    for s in grid.s_values:
        user_c = grid.c_values
        for q in qs:
            b = best_b(q, s)
            for c in (user_c if user_c is not None else (None,)):
                point = _pt(q=q, s=s, c=b if c is None else c)
                negs = {}
                for x in grid.x_values:
                    ev = -f_qsc(q, s, c, x, pol)
                    negs[x] = ev
                    report.checks.append(_positive({**point, "x": x}, "neg_f", ev))
                xs = sorted(negs)
                for a, bx in zip(xs, xs[1:]):
                    d = negs[a] - negs[bx]
                    report.checks.append(_positive({**point, "x": a}, "neg_f_decreasing", d))
                report.checks.append(
                    _certificate_check(Family(FamilyId.FPRIME_QSC, s=s, c=c), grid, [q], point)
                )
                report.checks.append(_fd_cm_check(q, FunctionId.FQSC, pol, -1.0, s=s, c=point["c"]))
            if user_c is None:
                point = _pt(q=q, s=s, c=b)
                tb = taylor_thm4(q, s, b)
                lo = taylor_thm4(q, s, b - TAYLOR_SHIFT)
                hi = taylor_thm4(q, s, b + TAYLOR_SHIFT)
                report.checks += [
                    Check(point, "sharp_taylor_at_b", tb, TAYLOR_ZERO_TOL, abs(tb) <= TAYLOR_ZERO_TOL),
                    Check({**point, "c": b - TAYLOR_SHIFT}, "sharp_taylor_below_b", lo, 0.0, lo < 0),
                    Check({**point, "c": b + TAYLOR_SHIFT}, "sharp_taylor_above_b", hi, 0.0, hi > 0),
                    _violation_probe(q, s, b - BELOW_SHIFT, pol, _pt(q=q, s=s, c=b - BELOW_SHIFT),
                                     "sharp_violation_below_b"),
                ]
        if user_c is None:
            qs_cert = _cert_q(grid, qs)
            report.checks.append(
                _certificate_check(Family(FamilyId.FPRIME_QSC, s=s), grid, qs_cert, _pt(s=s))
            )


def _verify_cor21(report, grid, pol):
    _reduction_note(report, grid.q_values)
    for q in grid.q_values:
        for s in grid.s_values:
            b = best_b(q, s)
            point = _pt(q=q, s=s, c=b)
            for x in grid.x_values:
                report.checks.append(_positive({**point, "x": x}, "upper_bound_margin", -f_qsc(q, s, None, x, pol)))
            if q < 1:
                report.checks.append(Check(point, "b_le_(1+s)/2", b, (1 + s) / 2, b <= (1 + s) / 2))
                report.checks.append(Check(point, "b_gt_s", b, s, b > s))
                report.checks.append(
                    _violation_probe(q, s, b - BELOW_SHIFT, pol, _pt(q=q, s=s, c=b - BELOW_SHIFT),
                                     "sharp_violation_below_b")
                )


def _verify_series_theorem(report, grid, pol, families, point_extra=None):
    """Pointwise positivity, monotonicity and certificates for CM families."""
    qs = _sub_q(grid, report)
    for fam in families:
        for q in qs:
            bound = fam.at(q)
            point = _pt(q=q, c=fam.c) if point_extra is None else {**_pt(q=q, c=fam.c), **point_extra}
            for x in grid.x_values:
                report.checks.append(_positive({**point, "x": x}, f"{fam.id.value}", family_series(bound, x, pol)))
            report.checks += _decreasing_checks(bound, grid.x_values, pol, point, f"{fam.id.value}_decreasing")
        report.checks.append(_certificate_check(fam, grid, _cert_q(grid, qs), _pt(c=fam.c)))
    return qs


def _verify_thm3(report, grid, pol):
    cs = grid.c_values if grid.c_values is not None else (0.0,)
    qs = _verify_series_theorem(report, grid, pol, [Family(FamilyId.GQC, c=c) for c in cs])
    for q in qs:
        L = -math.log(q)
        a = aq_const(q)
        report.checks.append(Check(_pt(q=q), "aq_in_(0,1/2)", a, 0.5, 0 < a < 0.5))
        for mult in (1.0, 1.5, 2.0, 5.0, 10.0, 100.0):
            t = mult * L
            v = float(h_q(t, q))
            slack = 4 * EPS * (1 + t + a * t * t)
            ok = abs(v) <= slack if mult == 1.0 else v < -slack
            report.checks.append(Check({**_pt(q=q), "x": t}, "hq_kernel", v, 0.0, ok))
        for c in cs:
            report.checks.append(_fd_cm_check(q, FunctionId.GQC, pol, c=c))
        if grid.c_values is None:
            v0 = taylor_thm3(q, 0.0)
            report.checks.append(Check(_pt(q=q, c=0.0), "sharp_taylor_at_0", v0, TAYLOR_ZERO_TOL,
                                       abs(v0) <= TAYLOR_ZERO_TOL))
            for d in (TAYLOR_SHIFT, 0.1):
                v = taylor_thm3(q, d)
                report.checks.append(Check(_pt(q=q, c=d), "sharp_taylor_positive_c", v, 0.0, v > 0))
            fam = Family(FamilyId.GQC, q=q, c=0.1)
            best = None
            for x in PROBE_X:
                # g(x+1) - g(x) = -(g(x) - g(x+1))
                ev = -family_series(fam, x, pol, step=1.0)
                if best is None or ev.value - ev.err > best[1].value - best[1].err:
                    best = (x, ev)
            x, ev = best
            report.checks.append(_positive(_pt(q=q, x=x, c=0.1), "sharp_increase_at_c_0.1", ev))


def _verify_thm2(report, grid, pol):
    cs = grid.c_values if grid.c_values is not None else (0.0, 1 / 3, 0.5)
    claimed = [c for c in cs if c == 0 or c >= 1 / 3]
    dropped = [c for c in cs if c not in claimed]
    if dropped:
        report.notes.append(f"no claim for 0 < c < 1/3; skipped c={dropped}")
    if claimed:
        qs = _verify_series_theorem(report, grid, pol, [Family(FamilyId.THM2, c=c) for c in claimed])
        for q in qs:
            for c in claimed:
                report.checks.append(_fd_cm_check(q, FunctionId.T2, pol, 1.0 if c == 0 else -1.0, c=c))


def _verify_thm1(report, grid, pol):
    qs = _verify_series_theorem(report, grid, pol, [Family(FamilyId.THM1A), Family(FamilyId.THM1B)])
    for q in qs:
        report.checks.append(_fd_cm_check(q, FunctionId.T1A, pol))
        report.checks.append(_fd_cm_check(q, FunctionId.T1B, pol))
    n = np.arange(1, grid.cert_N + 1, dtype=float)
    for q in _cert_q(grid, qs):
        k25 = float(np.max(lemma25(n, q)))
        k26 = float(np.min(lemma26(n, q)))
        report.checks.append(Check(_pt(q=q), "lemma25_max", k25, 0.0, k25 < 0))
        report.checks.append(Check(_pt(q=q), "lemma26_min", k26, 0.0, k26 > 0))


def _verify_thm10(report, grid, pol):
    qs = _verify_series_theorem(report, grid, pol, [Family(FamilyId.THM10A), Family(FamilyId.THM10B)])
    for q in qs:
        report.checks.append(_fd_cm_check(q, FunctionId.T10A, pol))
        report.checks.append(_fd_cm_check(q, FunctionId.T10B, pol))
    cert_qs = _cert_q(grid, qs)
    rep = certify_signs(Family(FamilyId.THM10A), grid.cert_N, cert_qs)
    for q, margin, n_at, _ in rep.per_q:
        report.checks.append(
            Check(_pt(q=q), "u2_witness_margin", margin, 1e-13, n_at == 2 and abs(margin) <= 1e-13)
        )
    n = np.arange(2, grid.cert_N + 1, dtype=float)
    for q in cert_qs:
        u = u_n(n, q)
        report.checks.append(Check(_pt(q=q), "u2_value", float(u[0]), 1e-13, abs(u[0]) <= 1e-13))
        report.checks.append(Check(_pt(q=q), "un_min_n>=3", float(np.min(u[1:])), 0.0, bool(np.min(u[1:]) > 0)))


def _verify_cor32(report, grid, pol):
    qs = _sub_q(grid, report)
    for q in qs:
        qp = QParam(q)
        L = math.log(q)
        fam = Family(FamilyId.THM10B, q=q)
        for x in grid.x_values:
            point = _pt(q=q, x=x)
            p1 = psi_q_deriv(x + 1, qp, 1, pol)
            ph = psi_q_deriv(x + 0.5, qp, 1, pol)
            report.checks.append(_positive(point, "psi1(x+1/2)-psi1(x+1)", ph - p1))
            report.checks.append(_positive(point, "cor32_bound-psi1(x+1/2)", family_series(fam, x, pol)))
            gain = -L * q_ratio(x, q) * (1 + L * math.sqrt(q) / (1 - q))
            ev = Eval(gain, 16 * EPS * (abs(x * L) + 1) * abs(-L * q_ratio(x, q)))
            report.checks.append(_positive(point, "ineq11_bound-cor32_bound", ev))


def _verify_ineq02(report, grid, pol):
    _reduction_note(report, grid.q_values)
    if any(q != 1 for q in grid.q_values):
        report.notes.append("the sqrt(s) lower bound is only asserted for q = 1")
    for q in grid.q_values:
        for s in grid.s_values:
            for x in grid.x_values:
                up = (1 + s) / 2
                report.checks.append(_positive(_pt(q=q, x=x, s=s, c=up), "upper_margin", -f_qsc(q, s, up, x, pol)))
                if q == 1:
                    lo = math.sqrt(s)
                    report.checks.append(_positive(_pt(q=q, x=x, s=s, c=lo), "lower_margin", f_qsc(q, s, lo, x, pol)))


def _verify_ineq11(report, grid, pol):
    qs = [q for q in grid.q_values if q <= 1]
    if any(q > 1 for q in grid.q_values):
        report.notes.append("q > 1 not covered; skipped")
    for q in qs:
        for x in grid.x_values:
            p1 = psi_q_deriv(x + 1, q, 1, pol)
            if q == 1:
                rhs = Eval(1 / x, EPS / x)
            else:
                rhs = ineq11_bound(x, q)
            report.checks.append(_positive(_pt(q=q, x=x), "bound-psi1(x+1)", rhs - p1))


_DISPATCH = {
    TheoremId.THM4_PRIME: lambda r, g, p: _verify_integral_mean(r, g, p, g.t_values),
    TheoremId.COR20: lambda r, g, p: _verify_integral_mean(r, g, p, (1.0,)),
    TheoremId.THM4: _verify_thm4,
    TheoremId.COR21: _verify_cor21,
    TheoremId.THM3: _verify_thm3,
    TheoremId.THM2: _verify_thm2,
    TheoremId.THM1: _verify_thm1,
    TheoremId.THM10: _verify_thm10,
    TheoremId.COR32: _verify_cor32,
    TheoremId.INEQ02: _verify_ineq02,
    TheoremId.INEQ11: _verify_ineq11,
}


def verify_theorem(
    tid: TheoremId | str, grid: GridSpec = DEFAULT_GRID, pol: TruncationPolicy | None = None
) -> TheoremReport:
    """Run every check for one statement; failures become report entries."""
    tid = TheoremId(tid)
    report = TheoremReport(tid, grid)
    _DISPATCH[tid](report, grid, _resolve(pol))
    return report
