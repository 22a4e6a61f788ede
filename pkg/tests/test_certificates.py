import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracle
from qgamma import DomainError, Family, FamilyId, certify_signs, finite_difference_cm, series_coefficient
from qgamma.certificates import (
    Kernel,
    coefficients,
    family_series,
    h_q,
    lemma25,
    lemma26,
    scalar_kernel,
    taylor_thm3,
    taylor_thm4,
    u_n,
)
from qgamma.means import aq_const, best_b

CERT_Q = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99)


# ---------------------------------------------------------------------------
# families and coefficients


def test_family_validation():
    with pytest.raises(DomainError):
        Family(FamilyId.FPRIME_QSC, q=0.5).validate()  # s missing
    with pytest.raises(DomainError):
        Family(FamilyId.GQC, q=1.5).validate()
    with pytest.raises(DomainError):
        Family(FamilyId.THM2, q=0.5, c=0.2).validate()
    with pytest.raises(DomainError):
        series_coefficient(Family(FamilyId.THM10A, q=0.5), 1)
    with pytest.raises(DomainError):
        series_coefficient(Family(FamilyId.PSI_SERIES, q=0.5), 0)


def test_thm10a_coefficients():
    fam = Family(FamilyId.THM10A, q=0.7)
    assert abs(series_coefficient(fam, 2)) <= 1e-13
    q = 0.5
    L = math.log(q)
    want = L * L * 0.0625 / ((1 - q**3) * (1 - q) * (1 + q))
    got = series_coefficient(Family(FamilyId.THM10A, q=q), 3)
    assert abs(got - want) <= 1e-15 * want
    assert u_n(3, 0.5) == pytest.approx(0.0625, rel=1e-15)


def test_fprime_at_b_first_coefficient():
    fam = Family(FamilyId.FPRIME_QSC, q=0.5, s=0.5)
    assert abs(series_coefficient(fam, 1)) <= 1e-13
    assert series_coefficient(fam, 2) > 0


def test_gqc_first_coefficient_boundary():
    assert abs(h_q(-math.log(0.5), 0.5)) <= 1e-15
    assert series_coefficient(Family(FamilyId.GQC, q=0.5, c=0.0), 1) == 0.0
    assert series_coefficient(Family(FamilyId.GQC, q=0.5, c=0.1), 1) < 0


@pytest.mark.parametrize("fid", list(FamilyId))
def test_series_matches_high_precision_sum(fid):
    """Series value of each family against an mpmath re-summation of the same coefficients."""
    q, x = 0.6, 1.7
    kw = {"s": 0.3} if fid is FamilyId.FPRIME_QSC else {}
    if fid is FamilyId.THM2:
        kw["c"] = 0.5
    fam = Family(fid, q=q, **kw)
    ev = family_series(fam, x)
    n = np.arange(1, 400, dtype=float)
    c, _ = coefficients(fam, n)
    ref = oracle.mp.fsum(oracle.mpf(float(ci)) * oracle.mpf(q) ** (int(ni) * oracle.mpf(x)) for ci, ni in zip(c, n))
    assert abs(ev.value - float(ref)) <= ev.err + 1e-15 * abs(float(ref))


def test_series_step_difference():
    fam = Family(FamilyId.THM1B, q=0.4)
    a, b = family_series(fam, 1.0), family_series(fam, 1.5)
    d = family_series(fam, 1.0, step=0.5)
    assert abs(d.value - (a.value - b.value)) <= d.err + a.err + b.err


# ---------------------------------------------------------------------------
# scalar kernels


def test_kernels():
    assert scalar_kernel(Kernel.HQ, t=-math.log(0.5), q=0.5) == pytest.approx(0, abs=1e-15)
    assert scalar_kernel(Kernel.UN, n=2, q=0.7) == pytest.approx(0, abs=1e-15)
    b = best_b(0.5, 0.5)
    assert abs(taylor_thm4(0.5, 0.5, b)) <= 1e-13
    assert taylor_thm4(0.5, 0.5, b - 0.05) < 0
    assert taylor_thm4(0.5, 0.5, b + 0.05) > 0
    assert abs(taylor_thm3(0.5, 0.0)) <= 1e-15
    assert taylor_thm3(0.5, 0.1) > 0
    with pytest.raises(DomainError):
        scalar_kernel(Kernel.HQ, t=0.1, q=0.5)


@pytest.mark.parametrize("q", CERT_Q)
def test_lemma_kernels_strict(q):
    n = np.arange(1, 10_001, dtype=float)
    assert np.all(lemma25(n, q) < 0)
    assert np.all(lemma26(n, q) > 0)


@pytest.mark.parametrize("q", CERT_Q)
def test_hq_kernel_sign(q):
    L = -math.log(q)
    t = np.concatenate([[L], L * np.geomspace(1.001, 1000, 200)])
    v = h_q(t, q)
    assert abs(v[0]) <= 1e-15
    assert np.all(v[1:] < 0)


@pytest.mark.parametrize("q", (0.1, 0.5, 0.9))
def test_kernel_values_against_oracle(q):
    mq = oracle.mpf(q)
    L = oracle.log(mq)
    for n in (1, 3, 17):
        d = 1 - mq**n
        base = L / d + oracle.mpf(1) / n - L / 2
        w25 = base - n * n * L**3 * mq ** (oracle.mpf(n) / 2) / (12 * d)
        w26 = base - n * n * L**3 / (12 * d)
        assert lemma25(float(n), q) == pytest.approx(float(w25), rel=1e-11, abs=1e-14)
        assert lemma26(float(n), q) == pytest.approx(float(w26), rel=1e-11, abs=1e-14)
    a = oracle.aq(q)
    t = oracle.mpf(2.5)
    want = -1 + t + oracle.mp.exp(-t) - a * t * t
    if t >= -L:
        assert h_q(2.5, q) == pytest.approx(float(want), rel=1e-12, abs=1e-15)


# ---------------------------------------------------------------------------
# certificates


@pytest.mark.parametrize(
    "fam",
    [
        Family(FamilyId.THM1A),
        Family(FamilyId.THM1B),
        Family(FamilyId.THM10A),
        Family(FamilyId.THM10B),
        Family(FamilyId.FPRIME_QSC, s=0.5),
        Family(FamilyId.GQC, c=0.0),
        Family(FamilyId.THM2, c=0.0),
        Family(FamilyId.THM2, c=1 / 3),
        Family(FamilyId.PSI_SERIES),
    ],
    ids=lambda f: f.label(),
)
def test_certificates_pass(fam):
    rep = certify_signs(fam, 10_000, CERT_Q)
    assert rep.verdict
    assert rep.min_margin >= 0
    assert rep.n_range == (fam.first_n, 10_000)
    assert rep.first_failure is None


def test_thm10a_witness():
    rep = certify_signs(Family(FamilyId.THM10A), 10_000, CERT_Q)
    for q, margin, n, ok in rep.per_q:
        assert n == 2 and abs(margin) <= 1e-13 and ok


def test_gqc_positive_c_fails_at_small_n():
    rep = certify_signs(Family(FamilyId.GQC, c=0.1), 1000, [0.5])
    assert not rep.verdict
    assert rep.first_failure == (1, 0.5)
    assert rep.min_margin < 0


def test_certificate_parallel_identical():
    fam = Family(FamilyId.THM1A)
    a = certify_signs(fam, 5000, CERT_Q)
    b = certify_signs(fam, 5000, tuple(reversed(CERT_Q)), workers=4)
    assert (a.min_margin, a.witness, a.verdict) == (b.min_margin, b.witness, b.verdict)


def test_certificate_validation():
    with pytest.raises(DomainError):
        certify_signs(Family(FamilyId.THM1A), 1, CERT_Q)
    with pytest.raises(DomainError):
        certify_signs(Family(FamilyId.THM1A), 100, [1.5])


# ---------------------------------------------------------------------------
# finite differences


def test_fd_cm_examples():
    rep = finite_difference_cm(lambda x: math.exp(-x), np.linspace(0.5, 5, 10), 0.1, 8)
    assert rep.verdict and rep.worst > 0
    neg = finite_difference_cm(lambda x: -x, [1.0, 2.0], 0.1, 2, function_id="-x")
    assert not neg.verdict and neg.witness[1] == 0


def test_fd_cm_domain_checked_before_eval():
    calls = []

    def f(x):
        calls.append(x)
        return x

    with pytest.raises(DomainError):
        finite_difference_cm(f, [0.1, 0.9], 0.05, 4, domain=(0.0, 1.0))
    assert calls == []
    with pytest.raises(DomainError):
        finite_difference_cm(f, [1.0], 0.05, 11)


@settings(max_examples=30, deadline=None)
@given(
    fid=st.sampled_from([FamilyId.THM1A, FamilyId.THM1B, FamilyId.THM10A, FamilyId.THM10B, FamilyId.PSI_SERIES]),
    q=st.floats(0.05, 0.95),
)
def test_prop_certificate_implies_fd_cm(fid, q):
    fam = Family(fid, q=q)
    if not certify_signs(fam, 2000, [q]).verdict:
        return
    rep = finite_difference_cm(lambda x: family_series(fam, x).value, np.linspace(0.2, 5, 9), 0.05, 6)
    assert rep.verdict


@settings(max_examples=50, deadline=None)
@given(q=st.floats(0.02, 0.98), s=st.floats(0.02, 0.98), d=st.floats(0.005, 0.2))
def test_prop_taylor_bracketing(q, s, d):
    b = best_b(q, s)
    assert abs(taylor_thm4(q, s, b)) <= 1e-12
    assert taylor_thm4(q, s, b - d) < 0 < taylor_thm4(q, s, b + d)


@settings(max_examples=50, deadline=None)
@given(q=st.floats(0.02, 0.98), n=st.integers(3, 10_000))
def test_prop_un_positive(q, n):
    assert u_n(float(n), q) > 0
    assert aq_const(q) > 0
