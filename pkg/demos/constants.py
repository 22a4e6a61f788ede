"""Sharp constants b(q,s), a(q,s) and a_q as q approaches 1 from below."""

from qgamma import sharp_constants

s = 0.5
print(f"s = {s}; the classical limits are b -> {(1 + s) / 2} and a_q -> 0.5")
for q in (0.1, 0.5, 0.9, 0.99, 0.999):
    k = sharp_constants(q, s)
    print(f"q={q:<6} b={k.b:.12f}  a(q,s)={k.a_mean.value:.12f}  a_q={k.aq:.12f}")
