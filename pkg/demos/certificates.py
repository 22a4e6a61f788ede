"""Coefficient sign certificates: a passing family, a boundary witness and a failing one."""

from qgamma import Family, FamilyId, certify_signs

QS = (0.1, 0.5, 0.9, 0.99)

for fam in (Family(FamilyId.THM1A), Family(FamilyId.THM10A), Family(FamilyId.GQC, c=0.1)):
    rep = certify_signs(fam, 10_000, QS)
    status = "certified" if rep.verdict else f"fails first at (n, q) = {rep.first_failure}"
    print(f"{fam.label():<14} min margin {rep.min_margin:+.3e} at (n, q) = {rep.witness}: {status}")
