"""One Fibonacci node set against a whole family of frequency rectangles.

With 233 nodes (n = 12) every rectangle |k_j| < 2^{s_j}, s_1 + s_2 = 3, is
integrated exactly up to triple size, and the discrete L_q norms track the
continuous ones: q = 2 is an exact identity, q = 1 and q = infinity stay
within a few percent. One level higher, the coarse admissibility rule still
holds but exactness breaks on the skewed rectangles.

    python demos/universal_discretization.py
"""
import math

from dispersia.cubature import fibonacci_rule
from dispersia.discretization import admissible_r, exactness_check, universality_sweep
from dispersia.hatfun import compositions

rule = fibonacci_rule(12)
top = admissible_r(12)
for r in (top - 1, top):
    print(f"r_total = {r}")
    for s in compositions(r, 2):
        ex = exactness_check(rule.nodes, rule.weights, [2**int(v) for v in s])
        note = "exact" if ex else f"not exact, first failure k={ex.failing}"
        print(f"  s={tuple(int(v) for v in s)}: {note}")
    for summ in universality_sweep(rule.nodes, rule.weights, r, 2, (1, 2, math.inf),
                                   trials=50, waive=True):
        q = "inf" if math.isinf(summ.q) else int(summ.q)
        print(f"  q={q:>3}: ratios in [{summ.min_ratio:.4f}, {summ.max_ratio:.4f}]")
