"""From the analytic bound on n to the end of the first reduction.

Prints the constant C, the crossing of the two log|y| bounds, and the
descent of the first lattice reduction under both lattice-constant rules:
the certified shortest vector and the column-norm heuristic.
"""

from fibthue.bounds import baker_constant, initial_n_bound, logy_lower_bound, logy_upper_bound
from fibthue.reduction import phase1

C = baker_constant()
print(f"C = {float(C.mid):.6e}")

N0 = initial_n_bound()
print(f"largest n where the bounds do not cross: {N0} ({N0:.3e})")
for n in (N0, N0 + 1):
    gap = logy_lower_bound(n).log() - logy_upper_bound(n).log()
    print(f"  n={n}: log(lower) - log(upper) in [{float(gap.lo):.3e}, {float(gap.hi):.3e}]")

for rule in ("shortest", "column_norm"):
    res = phase1(N0, rule=rule)
    steps = " -> ".join(str(v) for v in [res.start] + res.chain)
    print(f"{rule:>12}: {steps}")
    last = res.steps[-1]
    print(f"{'':>12}  closing step gives {last.new_bound}, c = 10^{len(str(last.c)) - 1}, certified={last.certified}")
