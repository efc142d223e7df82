"""Smooth discrepancy at fixed box volume, and why it controls dispersion.

An empty box B of volume V gives a cubature error equal to the full integral
of its hat, (V / r^d)^r. So the worst error over boxes of volume disp(T)
already certifies disp(T) <= 2^d sqrt(D^2(T, disp(T))), and for F_n the
normalized errors stay in a narrow band as n grows.

    python demos/smooth_discrepancy.py
"""
from dispersia import dispersion_discrepancy_check, fibonacci_set
from dispersia.discrepancy import discrepancy_decay_report

print(f"{'n':>3} {'disp':>10} {'2^d sqrt(D2)':>13}")
for n in range(4, 12):
    rep = dispersion_discrepancy_check(fibonacci_set(n), grid=12, aspects=9)
    print(f"{n:>3} {rep.V:>10.5f} {rep.bound:>13.5f}")

rows = discrepancy_decay_report("fibonacci", 2, range(6, 11), range(4), grid=12, aspects=9)
print(f"\n{'n':>3} {'V/V0':>5} {'D2':>11} {'normalized':>10}")
for row in rows:
    print(f"{row['param']:>3} {row['V'] / row['V0']:>5.0f} {row['value']:>11.3e} "
          f"{row['normalized']:>10.3f}")
