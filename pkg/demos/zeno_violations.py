"""Repeated projections with vanishing off-diagonals but O(1) violations.

A spin is rotated by theta/n between each of n projective measurements.
Every off-diagonal decoherence element is bounded by theta^2/n^2, so any
fixed pair of histories looks ever more consistent as n grows; yet two
distinguished coarse grainings X and Y violate the probability sum rules
by amounts that converge to finite (and for theta > pi/2, large) limits.
"""

from qhistories.constructions import (zeno_max_offdiag, zeno_violation,
                                      zeno_violation_limit)

for theta in (1.0, 2.0):
    print(f"theta = {theta}")
    limX = zeno_violation_limit(theta, "X")
    limY = zeno_violation_limit(theta, "Y")
    print(f"{'n':>5} {'max |D_ab|':>12} {'X violation':>12} "
          f"{'Y violation':>12}")
    for n in (10, 50, 200, 800):
        print(f"{n:>5} {zeno_max_offdiag(n, theta):>12.3e} "
              f"{zeno_violation(n, theta, 'X'):>12.6f} "
              f"{zeno_violation(n, theta, 'Y'):>12.6f}")
    print(f"{'limit':>5} {0.0:>12.3e} {limX:>12.6f} {limY:>12.6f}\n")

print("pairwise consistency checks are therefore not enough: the bound on")
print("a sum rule over m histories scales with m, and here m grows with n.")
