"""How many pairwise-almost-consistent histories fit in dimension d?

Prints the counting bound for the weak criterion next to the entropy-based
lower bound, shows the simplex family attaining the bound at eps = 1/(2d),
and checks the two-frame construction whose probability-sum violation grows
linearly with the frame size even though every pairwise overlap is tiny.
"""

import numpy as np

from qhistories.bounds import (packing_upper_bound, shannon_lower_bound,
                               simplex_packing)
from qhistories.constructions import frame_pair_matrix, frame_pair_mpv
from qhistories.consistency import mpv_exact

print("counting bounds at eps = 1/(2d), weak criterion")
print(f"{'d':>3} {'lower':>8} {'upper':>8}")
for d in range(1, 11):
    eps = 1.0 / (2 * d)
    lo = shannon_lower_bound(d, eps, "weak")
    up = packing_upper_bound(d, eps, "weak")
    print(f"{d:>3} {lo:>8} {up:>8}")

d = 4
V = simplex_packing(d)
G = V @ V.T
off = G[~np.eye(2 * d + 1, dtype=bool)]
print(f"\nsimplex family, d = {d}: {V.shape[0]} unit vectors,",
      f"pairwise dot products all {off[0]:+.6f} (= -1/(2d))")
print("spread of the off-diagonal dots:", float(off.max() - off.min()))

print("\ntwo-frame sets: tiny pairwise overlaps, growing total violation")
eps = 0.05
print(f"{'n':>3} {'mpv':>10} {'(n-1)eps/2':>12}")
for n in range(2, 7):
    val, witness = mpv_exact(frame_pair_matrix(n, eps))
    print(f"{n:>3} {val:>10.6f} {frame_pair_mpv(n, eps):>12.6f}")
