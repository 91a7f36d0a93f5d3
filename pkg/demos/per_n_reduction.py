"""Per-n reduction of the three-term unit form around the thresholds.

For a few n the script shows the three (j, k, l) cases, the bound each case
yields, and whether n is eliminated.  With |y| >= alpha^(2n) established by
the convergent check, the stronger third pass pushes the threshold to 48.
"""

from fibthue.reduction import convergent_check, convergent_solutions, exponent_box, phase2, phase3

for n in (20, 131, 132, 133, 300):
    r = phase2(n, n).per_n[0]
    cases = ", ".join(f"{cs.j}{cs.k}{cs.l}:{cs.n_step.new_bound}" for cs in r.cases)
    print(f"n={n:>3}  {cases}  -> {'eliminated' if r.eliminated else 'kept'}")

print("convergent check on 49..132:", all(convergent_check(n) for n in range(49, 133)))
print("small n for contrast, n=3:", convergent_solutions(3))

res = phase3(49, 132)
print(f"third pass threshold: {res.threshold}")

for n in (10, 25, 48):
    r = exponent_box(n)
    print(f"n={n}: exponent bound max(|b1|, |b2|) <= {r.b_bound}")
