"""Voting and selling mechanisms: weighted welfare, transfers, reserve duals.

A neutral affine maximizer picks the alternative maximizing weighted values;
weighted-VCG transfers (credited to a zero-weight sink) keep it truthful and
exactly budget-balanced.  Second-price auctions with a reserve give the
canonical piecewise-linear revenue dual.
"""

import numpy as np

from algotune.bounds import verify_shattering
from algotune.mechanisms import (
    NamParams,
    ValuationProfile,
    anonymous_reserve_dual,
    nam_agent_utility,
    nam_outcome,
    nam_payments,
    nam_shatter_instances,
    nam_welfare,
    spa_revenue,
)
from algotune.piecewise import count_oscillations

v = ValuationProfile([[3.0, 0.0], [0.0, 2.0], [0.0, 0.0]])
p = NamParams((1.0, 1.0, 0.0))  # agent 2 is the sink
print("outcome (0-based alternative):", nam_outcome(v, p))
pay = nam_payments(v, p)
print("transfers credited per agent:", pay, " sum:", sum(pay))
print("welfare:", nam_welfare(v, p))

# Truthfulness: deviating cannot raise an agent's quasilinear utility.
truthful = nam_agent_utility(v.matrix[0], v, p, 0)
lie = v.matrix.copy()
lie[0] = [0.0, 10.0]
deviated = nam_agent_utility(v.matrix[0], ValuationProfile(lie), p, 0)
print(f"agent 0 utility: truthful={truthful}  after misreport={deviated}")

# The n/2 shattered welfare instances behind the NAM lower bound.
profiles, params, witnesses = nam_shatter_instances(6, epsilon=0.25)
duals = [(lambda q, prof=prof: nam_welfare(prof, q)) for prof in profiles]
cert = verify_shattering(duals, witnesses, params)
print("\nNAM shattering certificate:", cert.to_dict())

# Second-price auction with reserve: revenue and its dual.
bids = [0.8, 0.5, 0.3]
for reserve in (0.0, 0.6, 0.9):
    print(f"SPA revenue at reserve {reserve}: {spa_revenue(bids, reserve)}")

dual = anonymous_reserve_dual(bids)
print("\nreserve dual pieces:")
for i, (slope, icept, _) in enumerate(dual.pieces):
    lo, hi = dual.piece_bounds(i)
    print(f"  [{lo:.2f}, {hi:.2f})  slope={slope} intercept={icept}")
rng = np.random.default_rng(3)
worst = max(count_oscillations(dual, float(z)) for z in rng.uniform(0, 1, 100))
print("max oscillations over 100 thresholds:", worst, "(provably <= 2)")
