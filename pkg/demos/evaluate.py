"""Evaluate ln Γ_q, ψ_q and its derivatives on all three branches of q."""

from qgamma import lngamma_q, psi_q, psi_q_deriv

for q in (0.5, 1.0, 2.0):
    print(f"q = {q}")
    for x in (0.5, 1.0, 3.0):
        lg = lngamma_q(x, q)
        ps = psi_q(x, q)
        p1 = psi_q_deriv(x, q, 1)
        print(f"  x={x:<4} lnΓ={lg.value:+.15f} (±{lg.err:.1e})  ψ={ps.value:+.15f}  ψ'={p1.value:.15f}")

# The functional equation Γ_q(x+1) = (1-q^x)/(1-q) Γ_q(x) at q = 1/2, x = 2.
d = lngamma_q(3.0, 0.5).value - lngamma_q(2.0, 0.5).value
print("ln Γ_q(3) - ln Γ_q(2) =", d, " ln 1.5 =", __import__("math").log(1.5))
