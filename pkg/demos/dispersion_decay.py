"""How fast do the largest empty boxes shrink?

Fibonacci sets F_n have b_n points and their dispersion times b_n settles
near a constant. The Frolov sets behave the same way against a^d, and since
they are dilated lattices the constant is hit essentially on the nose.

    python demos/dispersion_decay.py
"""
from dispersia import decay_report, dispersion_exact, fibonacci_set

print("Fibonacci sets")
print(f"{'n':>3} {'b_n':>5} {'disp':>12} {'disp*b_n':>9}")
for row in decay_report("fibonacci", range(4, 15)):
    print(f"{row['param']:>3} {row['N']:>5} {row['disp']:>12.6g} {row['disp_times_N']:>9.4f}")

print("\nFrolov sets, d = 2")
print(f"{'a':>3} {'N':>5} {'disp':>12} {'disp*a^2':>9}")
for row in decay_report("frolov", [3, 4, 6, 8, 10, 12]):
    a = row["param"]
    print(f"{a:>3} {row['N']:>5} {row['disp']:>12.6g} {row['disp'] * a * a:>9.4f}")

box = dispersion_exact(fibonacci_set(10)).witness
print(f"\nlargest empty box for F_10: lo={box.lo}, hi={box.hi}")
