"""Data-driven algorithm configuration workbench.

Parameterized algorithm families (alignment, RNA folding, TAD prediction,
greedy knapsack/MWIS, agglomerative clustering, voting and selling
mechanisms), exact piecewise decompositions of their per-instance utilities
over one real parameter, empirical risk minimization over training sets, and
the sample-complexity calculators that bound how far training performance
can drift from expectation.
"""

from . import bounds, cluster, greedy, learn, mechanisms, piecewise, rnafold, seqalign, tad

__all__ = [
    "bounds",
    "cluster",
    "greedy",
    "learn",
    "mechanisms",
    "piecewise",
    "rnafold",
    "seqalign",
    "tad",
]

__version__ = "0.1.0"
