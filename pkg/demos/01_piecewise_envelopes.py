"""Piecewise-linear algebra: envelopes, averaging, argmax, oscillation counts.

Every algorithm family in this package reduces questions about a tunable
parameter to questions about a piecewise-linear function.  This script walks
through the primitive operations on a toy family of lines.
"""

from algotune.piecewise import (
    Line1D,
    PiecewiseFunction1D,
    argmax,
    average,
    count_oscillations,
    upper_envelope,
)

# Three competing "solutions", each scoring linearly in the parameter.
lines = [
    Line1D(slope=1.0, intercept=0.0, tag=0),   # improves with the parameter
    Line1D(slope=-1.0, intercept=1.0, tag=1),  # degrades with the parameter
    Line1D(slope=0.0, intercept=0.4, tag=2),   # indifferent (never optimal here)
]

env = upper_envelope(lines, 0.0, 1.0)
print("upper envelope:", env)
print("winning solution at 0.2:", env.pieces[env.piece_index(0.2)][2])
print("winning solution at 0.9:", env.pieces[env.piece_index(0.9)][2])

# The same machinery averages per-instance utilities for ERM.
f = PiecewiseFunction1D(0, 1, [0.5], [(0, 1.0, None), (0, 0.0, None)])
g = PiecewiseFunction1D(0, 1, [0.25], [(0, 0.0, None), (0, 0.8, None)])
avg = average([f, g])
print("\naveraged utility:", avg)
best = argmax(avg)
print(f"empirically best parameter: {best.param:.3f} with value {best.value:.3f}")

# Oscillations of the thresholded indicator bound learnability.
for z in (0.2, 0.45, 0.9):
    print(f"oscillations of 1{{avg >= {z}}}:", count_oscillations(avg, z))

print("\nJSON form:", env.to_json())
