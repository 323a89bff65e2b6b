"""Training-set machinery: ERM over piecewise duals and estimation-error experiments.

Expectations are always computed by exact support enumeration (the
distributions here are finite), so the only randomness is the i.i.d. draw of
training samples.  Each trial owns an RNG stream derived from the master
seed XOR the trial index, split further by the training-set size, so any
trial is reproducible in isolation and results do not depend on how trials
are scheduled across threads.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bounds import finite_class_bound, spa_estimation_bound
from .mechanisms import (
    FiniteDistribution,
    anonymous_reserve_dual,
    build_nam_distribution,
    expected_utility,
)
from .piecewise import PiecewiseFunction1D, argmax, average

ADVERSARIAL_FAMILIES = ("spa_overfit", "nam_overfit")
KNOWN_FAMILIES = ("spa_overfit", "spa_erm", "nam_overfit")


@dataclass
class ExperimentConfig:
    family: str
    n_schedule: list[int]
    trials: int = 100
    seed: int = 0
    delta: float = 0.01
    threads: int = 1
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(n < 1 for n in self.n_schedule):
            raise ValueError("all training sizes must be >= 1")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        d = json.loads(text)
        return cls(
            family=d["family"],
            n_schedule=[int(n) for n in d["n_schedule"]],
            trials=int(d.get("trials", 100)),
            seed=int(d.get("seed", 0)),
            delta=float(d.get("delta", 0.01)),
            threads=int(d.get("threads", 1)),
            params=d.get("params", {}),
        )


@dataclass
class ExperimentRow:
    n: int
    mean_error: float
    std_error: float
    bound: float
    max_error: float | None = None

    def __post_init__(self):
        if self.mean_error < 0:
            raise ValueError("estimation error is nonnegative by definition")


def erm(duals: Sequence[PiecewiseFunction1D]):
    """Parameter maximizing the average of per-instance duals (leftmost tie-break)."""
    if not duals:
        raise ValueError("need at least one dual")
    res = argmax(average(duals))
    return res.param, res.value


def estimation_error(param, sample: Sequence, dist: FiniteDistribution, utility) -> float:
    """|average utility over the sample - exact expected utility| at ``param``."""
    if not sample:
        raise ValueError("need a nonempty sample")
    avg = math.fsum(utility(param, x) for x in sample) / len(sample)
    exp = expected_utility(dist, lambda x: utility(param, x))
    return abs(avg - exp)


def _trial_rng(seed: int, trial: int, n: int) -> np.random.Generator:
    # counter-based split: master seed XOR trial index, then the size
    return np.random.default_rng([seed ^ trial, n])


def synthetic_spa_values(n_low: int = 5334, n_high: int = 5278) -> np.ndarray:
    """Deterministic two-cluster value set: n_low in [1/4, 1/2], n_high in [3/4, 1]."""
    return np.concatenate(
        [np.linspace(0.25, 0.5, n_low), np.linspace(0.75, 1.0, n_high)]
    )


def spa_expected_revenue_anonymous(values: np.ndarray, reserve: float) -> float:
    """Exact expected revenue of one anonymous reserve over single-bidder profiles."""
    return float(reserve * (values >= reserve).sum() / len(values))


def optimal_anonymous_revenue(values: np.ndarray) -> tuple[float, float]:
    """Best anonymous reserve and its exact expected revenue (support enumeration).

    The revenue curve rises linearly between support values, so the optimum
    is attained at one of them (reserve 0 covered by the smallest value).
    """
    vals = np.sort(values)
    n = len(vals)
    # single bidder per profile, so revenue at reserve r is r * P(value >= r)
    best_r, best_rev = 0.0, 0.0
    for i, r in enumerate(vals):
        rev = r * (n - i) / n
        if rev > best_rev:
            best_r, best_rev = float(r), float(rev)
    return best_r, best_rev


def optimal_nonanonymous_revenue(values: np.ndarray) -> float:
    """Exact expected revenue of per-agent reserves set to each agent's value."""
    return float(values.mean())


class _SpaOverfitFamily:
    """Non-anonymous reserves fit to the sample, 3/4 elsewhere."""

    adversarial = True

    def __init__(self, cfg: ExperimentConfig):
        p = cfg.params
        if "values" in p:
            self.values = np.asarray(p["values"], dtype=float)
        else:
            self.values = synthetic_spa_values(
                int(p.get("n_low", 5334)), int(p.get("n_high", 5278))
            )
        self.fallback = float(p.get("fallback", 0.75))
        self.delta = cfg.delta
        self.seed = cfg.seed

    def bound(self, n: int) -> float:
        return spa_estimation_bound(n, self.delta)

    def trial(self, n: int, t: int) -> float:
        rng = _trial_rng(self.seed, t, n)
        w = self.values
        idx = rng.integers(0, len(w), size=n)
        seen = np.zeros(len(w), dtype=bool)
        seen[idx] = True
        # seen agents pay their own value; unseen agents face the fallback
        avg = float(w[idx].mean())
        expected = (
            float(w[seen].sum()) + self.fallback * float((~seen & (w >= self.fallback)).sum())
        ) / len(w)
        return abs(avg - expected)


class _SpaErmFamily:
    """ERM over the anonymous reserve, via averaged piecewise duals."""

    adversarial = False

    def __init__(self, cfg: ExperimentConfig):
        p = cfg.params
        if "values" in p:
            self.values = np.asarray(p["values"], dtype=float)
        else:
            self.values = synthetic_spa_values(
                int(p.get("n_low", 5334)), int(p.get("n_high", 5278))
            )
        self.delta = cfg.delta
        self.seed = cfg.seed

    def bound(self, n: int) -> float:
        return spa_estimation_bound(n, self.delta)

    def trial(self, n: int, t: int) -> float:
        rng = _trial_rng(self.seed, t, n)
        w = self.values
        sample = w[rng.integers(0, len(w), size=n)]
        duals = [anonymous_reserve_dual([float(v), 0.0]) for v in sample]
        rho_hat, train_value = erm(duals)
        return abs(train_value - spa_expected_revenue_anonymous(w, rho_hat))


class _NamOverfitFamily:
    """The bad NAM weight vector driven by which profiles were sampled."""

    adversarial = True

    def __init__(self, cfg: ExperimentConfig):
        p = cfg.params
        self.n_profiles = int(p.get("n_profiles", 500))
        self.delta = cfg.delta
        self.seed = cfg.seed
        pairs = p.get("pairs")
        if pairs is None:
            pairs = self._synthetic_pairs(
                int(p.get("n_group1", 870)), int(p.get("n_group2", 1677))
            )
        dist = build_nam_distribution(
            [tuple(pr) for pr in pairs],
            n_profiles=self.n_profiles,
            rng=np.random.default_rng([cfg.seed, 101]),
        )
        self.dist = dist
        self.n_agents = 2 * self.n_profiles
        self.w_seen = np.array([prof.welfare(prof.a) for prof in dist.support])
        self.w_unseen = np.array([prof.welfare(prof.b) for prof in dist.support])

    @staticmethod
    def _synthetic_pairs(n1: int, n2: int) -> list[tuple[float, float]]:
        g1 = zip(np.linspace(0.35, 0.5, n1), np.linspace(-0.5, 0.0, n1))
        g2 = zip(np.linspace(-0.5, 0.0, n2), np.linspace(0.15, 0.15 / n2, n2))
        return [(float(a), float(b)) for a, b in g1] + [
            (float(a), float(b)) for a, b in g2
        ]

    def bound(self, n: int) -> float:
        return finite_class_bound(self.n_agents, n, self.delta)

    def trial(self, n: int, t: int) -> float:
        rng = _trial_rng(self.seed, t, n)
        idx = rng.integers(0, self.n_profiles, size=n)
        seen = np.zeros(self.n_profiles, dtype=bool)
        seen[idx] = True
        avg = float(self.w_seen[idx].mean())
        expected = float(np.where(seen, self.w_seen, self.w_unseen).mean())
        return abs(avg - expected)


_FAMILIES = {
    "spa_overfit": _SpaOverfitFamily,
    "spa_erm": _SpaErmFamily,
    "nam_overfit": _NamOverfitFamily,
}


def run_experiment(cfg: ExperimentConfig) -> list[ExperimentRow]:
    """Estimation-error sweep over the training-size schedule.

    Per size N, ``cfg.trials`` independent draws are taken with per-trial
    derived seeds, the family's parameter construction is applied, and the
    exact estimation error is recorded.  Adversarial families also report the
    max over trials.  Output is identical for any thread count.
    """
    if cfg.family not in _FAMILIES:
        raise ValueError(f"unknown family {cfg.family!r}; known: {KNOWN_FAMILIES}")
    fam = _FAMILIES[cfg.family](cfg)

    rows = []
    for n in cfg.n_schedule:
        if cfg.threads > 1:
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                errors = list(pool.map(lambda t: fam.trial(n, t), range(cfg.trials)))
        else:
            errors = [fam.trial(n, t) for t in range(cfg.trials)]
        mean = math.fsum(errors) / cfg.trials
        std = math.sqrt(math.fsum((e - mean) ** 2 for e in errors) / cfg.trials)
        rows.append(
            ExperimentRow(
                n=n,
                mean_error=mean,
                std_error=std,
                bound=fam.bound(n),
                max_error=max(errors) if fam.adversarial else None,
            )
        )
    return rows


def rows_to_csv(rows: Sequence[ExperimentRow]) -> str:
    """CSV with header N,mean_error,std_error,bound (plus max_error when present)."""
    with_max = any(r.max_error is not None for r in rows)
    header = "N,mean_error,std_error"
    if with_max:
        header += ",max_error"
    header += ",bound"
    lines = [header]
    for r in rows:
        cells = [str(r.n), _fmt(r.mean_error), _fmt(r.std_error)]
        if with_max:
            cells.append(_fmt(r.max_error if r.max_error is not None else 0.0))
        cells.append(_fmt(r.bound))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return format(x, ".12g")
