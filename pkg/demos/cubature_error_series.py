"""The Frolov cubature error written as a sum over the dual lattice.

For a hat function h supported in the cube, the cubature error equals the
sum of its Fourier transform over the nonzero points aAm. We truncate the
sum to dyadic shells of total level at most v_max and bound what is left.
The smoother the hat, the faster the tail dies.

    python demos/cubature_error_series.py
"""
from dispersia.cubature import first_active_level, frolov_error_series, random_hat_boxes
from dispersia.geometry import frolov_matrix, frolov_set

lat = frolov_matrix(2)
a = 3
points = frolov_set(lat, a)
v0 = first_active_level(a, 2)
print(f"a={a}: {len(points)} nodes, first nonempty shell level v0={v0}\n")
print(f"{'r':>2} {'v_max':>5} {'direct':>12} {'series':>12} {'|diff|':>9} {'tail':>9}")
for r in (2, 3, 4):
    spec = random_hat_boxes(2, r, 1, seed=3)[0]
    for extra in (4, 8, 12):
        rep = frolov_error_series(lat, a, spec, v0 + extra, points=points)
        print(f"{r:>2} {rep.v_max:>5} {rep.direct_error:>12.4e} {rep.series_sum:>12.4e} "
              f"{rep.residual:>9.2e} {rep.tail_bound:>9.2e}")
