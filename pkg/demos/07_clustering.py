"""Agglomerative clustering: interpolating linkages and pruning the tree.

The C2 family mixes single linkage (rho=1) and complete linkage (rho=0)
linearly, so merge-order changes happen at exactly computable parameter
values; C1 and C3 cover the power-mean interpolations (C3 at rho=1 is
average linkage).  A k-median DP prunes the resulting tree to k clusters.
"""

import numpy as np

from algotune.cluster import (
    ClusterInstance,
    agglomerate,
    c2_breakpoints,
    merge_value,
    pair_counting_utility,
    prune_tree,
)

rng = np.random.default_rng(7)
blob = lambda cx, cy, k: rng.normal((cx, cy), 1.1, size=(k, 2))
points = np.vstack([blob(0, 0, 4), blob(3, 0, 4), blob(1.5, 2.5, 4)])
inst = ClusterInstance.from_points(points)
truth = [0] * 4 + [1] * 4 + [2] * 4

a, b = (0, 1, 2, 3), (4, 5, 6, 7)
print("merge values between the first two blobs:")
for fam, rho in (("C2", 1.0), ("C2", 0.0), ("C3", 1.0), ("C1", 8.0)):
    print(f"  {fam} rho={rho}: {merge_value(fam, rho, a, b, inst):.3f}")

tree = agglomerate(inst, "C2", 0.5)
clusters, cost = prune_tree(tree, 3, inst)
print("\n3-pruning of the C2(0.5) tree, k-median cost %.3f:" % cost)
for c in clusters:
    print("  cluster:", c)

util = pair_counting_utility(inst, truth, k=3)
fn = c2_breakpoints(inst, util)
print(f"\nC2 decomposition has {len(fn.pieces)} pieces; utility by piece:")
for i, (_, u, _) in enumerate(fn.pieces):
    lo, hi = fn.piece_bounds(i)
    print(f"  [{lo:.4f}, {hi:.4f})  pair agreement={u:.3f}")

best_rho = max(
    (0.5 * (fn.piece_bounds(i)[0] + fn.piece_bounds(i)[1]) for i in range(len(fn.pieces))),
    key=lambda r: fn.value(r),
)
print("a parameter maximizing training agreement:", round(best_rho, 4))
