"""Parameterized RNA folding without pseudoknots.

The folding DP maximizes ``rho * |pairs| + (1 - rho) * stacking`` where the
stacking credit of a pair (i, j) is paid only when the enclosing pair
(i-1, j+1) is also present.  Per pair count k, the best achievable stacking
score is computed by a size-indexed DP; the optimal objective over rho in
[0, 1] is then the upper envelope of one line per achievable k, which caps
the number of envelope pieces at n/2 + 1.

Base pairs keep one unpaired base between their ends (j >= i + 2), the
smallest separation consistent with binding of non-adjacent bases.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable

from .piecewise import Line1D, PiecewiseFunction1D, refine_constant, upper_envelope

BASES = ("A", "U", "C", "G")

#: minimum index separation of a pair's endpoints
MIN_SEP = 2

_WC = ({"A", "U"}, {"C", "G"})


class RnaSequence:
    __slots__ = ("bases",)

    def __init__(self, bases: Iterable[str] | str):
        toks = tuple(bases)
        bad = [b for b in toks if b not in BASES]
        if bad:
            raise ValueError(f"invalid bases {bad}; alphabet is {BASES}")
        self.bases = toks

    def __len__(self):
        return len(self.bases)

    def __getitem__(self, i):
        return self.bases[i]

    def __repr__(self):
        return f"RnaSequence({''.join(self.bases)!r})"


class Folding:
    """A non-crossing set of base pairs (1-based, min separation enforced)."""

    __slots__ = ("pairs",)

    def __init__(self, pairs: Iterable[tuple[int, int]] = ()):
        ps = tuple(sorted((int(i), int(j)) for i, j in pairs))
        used = set()
        for i, j in ps:
            if j < i + MIN_SEP:
                raise ValueError(f"pair {(i, j)} violates minimum separation")
            if i < 1:
                raise ValueError("indices are 1-based")
            for x in (i, j):
                if x in used:
                    raise ValueError(f"index {x} used by two pairs")
                used.add(x)
        for a in range(len(ps)):
            for b in range(a + 1, len(ps)):
                i, j = ps[a]
                k, l = ps[b]
                if i < k < j < l:
                    raise ValueError(f"pairs {(i, j)} and {(k, l)} cross")
        self.pairs = ps

    def __len__(self):
        return len(self.pairs)

    def __eq__(self, other):
        return isinstance(other, Folding) and self.pairs == other.pairs

    def __hash__(self):
        return hash(self.pairs)

    def __repr__(self):
        return f"Folding({list(self.pairs)})"

    def to_json(self) -> str:
        return json.dumps({"pairs": [list(p) for p in self.pairs]})

    @classmethod
    def from_json(cls, text: str) -> "Folding":
        return cls(tuple(p) for p in json.loads(text)["pairs"])


@dataclass
class StackScores:
    """Score table keyed by (S[i], S[j], S[i-1], S[j+1]); missing entries are 0."""

    table: dict[tuple[str, str, str, str], float] = field(default_factory=dict)

    def get(self, b1, b2, b3, b4) -> float:
        return self.table.get((b1, b2, b3, b4), 0.0)

    @classmethod
    def watson_crick(cls) -> "StackScores":
        """+1 whenever both the pair and its enclosing neighbor are A/U or C/G."""
        tbl = {}
        for b1 in BASES:
            for b2 in BASES:
                if {b1, b2} not in _WC:
                    continue
                for b3 in BASES:
                    for b4 in BASES:
                        if {b3, b4} in _WC:
                            tbl[(b1, b2, b3, b4)] = 1.0
        return cls(tbl)

    @classmethod
    def from_csv(cls, text: str) -> "StackScores":
        tbl = {}
        for row in csv.reader(io.StringIO(text)):
            if not row or row[0].startswith("#"):
                continue
            b1, b2, b3, b4, score = [x.strip() for x in row]
            tbl[(b1, b2, b3, b4)] = float(score)
        return cls(tbl)


def stacking_score(s: RnaSequence, phi: Folding, m: StackScores) -> float:
    """Total stacking credit of a folding: pair (i,j) scores when (i-1,j+1) is present."""
    present = set(phi.pairs)
    total = 0.0
    n = len(s)
    for i, j in phi.pairs:
        if i >= 2 and j <= n - 1 and (i - 1, j + 1) in present:
            total += m.get(s[i - 1], s[j - 1], s[i - 2], s[j])
    return total


def fold_objective(s: RnaSequence, phi: Folding, rho: float, m: StackScores) -> float:
    return rho * len(phi) + (1.0 - rho) * stacking_score(s, phi, m)


def fold(s: RnaSequence, rho: float, m: StackScores) -> tuple[Folding, float]:
    """Optimal folding for one rho in [0, 1].

    Interval DP with best / best-given-endpoints-paired tables so that
    stacking credit lands exactly when adjacent nesting occurs.  Among
    co-optimal foldings the DP prefers fewer pairs, then the
    lexicographically smallest pair tuple (applied at every cell).
    """
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [0, 1]")
    n = len(s)
    if n < 1:
        raise ValueError("sequence must be nonempty")
    stackf = 1.0 - rho

    empty = (0.0, ())

    def pick(cands):
        # maximize value; then fewest pairs; then lexicographically smallest
        return min(cands, key=lambda c: (-c[0], len(c[1]), c[1]))

    # paired[(i, j)]: (i, j) in phi; value includes rho for (i, j) and all
    # interior credits but not (i, j)'s own credit (owned by the enclosing pair).
    paired: dict[tuple[int, int], tuple[float, tuple]] = {}
    notp: dict[tuple[int, int], tuple[float, tuple]] = {}
    best: dict[tuple[int, int], tuple[float, tuple]] = {}

    def get_best(i, j):
        return best[(i, j)] if i <= j else empty

    for span in range(0, n):
        for i in range(1, n - span + 1):
            j = i + span
            if span >= MIN_SEP:
                inner: list[tuple[float, tuple]] = []
                iv, ip = notp[(i + 1, j - 1)] if span - 2 >= 0 else empty
                inner.append((iv, ip))
                if span - 2 >= MIN_SEP:
                    pv, pp = paired[(i + 1, j - 1)]
                    credit = stackf * m.get(s[i], s[j - 2], s[i - 1], s[j - 1])
                    inner.append((pv + credit, pp))
                v, ps = pick(inner)
                paired[(i, j)] = (v + rho, tuple(sorted(ps + ((i, j),))))

            cands = [get_best(i, j - 1)]  # j unpaired
            for t in range(i + 1, j - MIN_SEP + 1):
                lv, lp = get_best(i, t - 1)
                rv, rp = paired[(t, j)]
                cands.append((lv + rv, tuple(sorted(lp + rp))))
            notp[(i, j)] = pick(cands)
            if (i, j) in paired:
                best[(i, j)] = pick([notp[(i, j)], paired[(i, j)]])
            else:
                best[(i, j)] = notp[(i, j)]

    value, pairs = best[(1, n)]
    return Folding(pairs), value


def max_stack_by_size(s: RnaSequence, m: StackScores) -> list[tuple[int, float]]:
    """For each achievable pair count k, the maximum stacking score over foldings.

    Size-indexed variant of the folding DP; unreachable k are omitted and
    k = 0 always yields stacking 0.
    """
    n = len(s)
    if n < 1:
        raise ValueError("sequence must be nonempty")

    empty = {0: 0.0}

    def merge(dst, k, v):
        if k not in dst or v > dst[k]:
            dst[k] = v

    paired: dict[tuple[int, int], dict[int, float]] = {}
    notp: dict[tuple[int, int], dict[int, float]] = {}
    best: dict[tuple[int, int], dict[int, float]] = {}

    def get_best(i, j):
        return best[(i, j)] if i <= j else empty

    for span in range(0, n):
        for i in range(1, n - span + 1):
            j = i + span
            if span >= MIN_SEP:
                acc: dict[int, float] = {}
                base = notp[(i + 1, j - 1)] if span - 2 >= 0 else empty
                for k, v in base.items():
                    merge(acc, k + 1, v)
                if span - 2 >= MIN_SEP:
                    credit = m.get(s[i], s[j - 2], s[i - 1], s[j - 1])
                    for k, v in paired[(i + 1, j - 1)].items():
                        merge(acc, k + 1, v + credit)
                paired[(i, j)] = acc

            accn = dict(get_best(i, j - 1))
            for t in range(i + 1, j - MIN_SEP + 1):
                left = get_best(i, t - 1)
                for kr, vr in paired[(t, j)].items():
                    for kl, vl in left.items():
                        merge(accn, kl + kr, vl + vr)
            notp[(i, j)] = accn
            if (i, j) in paired:
                out = dict(accn)
                for k, v in paired[(i, j)].items():
                    merge(out, k, v)
                best[(i, j)] = out
            else:
                best[(i, j)] = accn

    return sorted(best[(1, n)].items())


def rho_breakpoints(s: RnaSequence, m: StackScores) -> PiecewiseFunction1D:
    """Exact envelope of the folding objective over rho in [0, 1].

    One line per achievable pair count k: slope k - stack_k, intercept
    stack_k, tag k.  Piece count is at most floor(n/2) + 1.
    """
    lines = [
        Line1D(slope=k - stack, intercept=stack, tag=k)
        for k, stack in max_stack_by_size(s, m)
    ]
    return upper_envelope(lines, 0.0, 1.0)


def pair_utility(candidate: Folding, truth: Folding) -> float:
    """Fraction of the ground-truth pairs recovered; 1 when the truth is empty."""
    if not truth.pairs:
        return 1.0
    shared = len(set(candidate.pairs) & set(truth.pairs))
    return shared / len(truth.pairs)


def utility_breakpoints(
    s: RnaSequence, m: StackScores, truth: Folding
) -> PiecewiseFunction1D:
    """Piecewise-constant pair utility of the folding algorithm against a truth.

    Evaluated through ``fold`` at each envelope piece's midpoint so tie-breaks
    match the algorithm; adjacent equal pieces merge.
    """
    env = rho_breakpoints(s, m)
    return refine_constant(env, lambda rho: pair_utility(fold(s, rho, m)[0], truth))


def sequence_from_fasta(text: str) -> RnaSequence:
    from .seqalign import parse_fasta

    records = parse_fasta(text)
    if len(records) != 1:
        raise ValueError("expected exactly one sequence record")
    return RnaSequence(records[0][1])
