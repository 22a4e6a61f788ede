"""Run every theorem check on the default grid and summarise the outcome."""

import time

from qgamma import TheoremId, verify_theorem

t0 = time.perf_counter()
for tid in TheoremId:
    rep = verify_theorem(tid)
    print(f"{tid.value:<7} {'holds' if rep.verdict else 'FAILS':<6} {len(rep.checks):5d} checks, {len(rep.sharpness_probes)} sharpness probes")
    for note in rep.notes:
        print(f"          note: {note}")
print(f"done in {time.perf_counter() - t0:.1f} s")
