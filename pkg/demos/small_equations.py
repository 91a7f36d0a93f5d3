"""Solving individual equations by walking the unit exponents.

For every n up to 12 the unit-enumeration solver is compared with an
exhaustive search over |y| <= 1000.  The two equations with extra
solutions are printed in full.
"""

import time

from fibthue.sequences import ThueInstance
from fibthue.solver import brute_force_solutions, solve

for n in (1, 3):
    sols = solve(ThueInstance(n), 20)
    print(f"n={n}:", ", ".join(f"({s.x},{s.y})" for s in sols.solutions))

t = time.time()
for n in range(1, 13):
    inst = ThueInstance(n)
    a, b = solve(inst, 20), brute_force_solutions(inst, 1000)
    extra = sorted((s.x, s.y) for s in a.nontrivial() if s.y > 0)
    print(f"n={n:>2} F={inst.fib:>3} L={inst.luc:>3}  {len(a):>2} solutions  agree={a.pairs() == b.pairs()}  extra={extra}")
print(f"{time.time() - t:.1f}s")
