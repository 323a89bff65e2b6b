"""Affine-gap pairwise alignment and progressive multiple-sequence alignment.

The pairwise aligner maximizes

    matches - rho1 * mismatches - rho2 * indels - rho3 * gap_runs

with a three-state dynamic program.  Tie-breaking is fixed globally
(diagonal, then gap in the second row, then gap in the first row) so the
output is a deterministic function of the parameters.  On the one-dimensional
indel slice (rho1 = rho3 = 0) the optimal objective is the upper envelope of
one line per reachable alignment, and ``indel_breakpoints`` computes that
envelope exactly by recursive parametric search.

``gen_lb_sequences`` builds the sequence-pair family whose thresholded
utilities realize every sign pattern, the worst case for this family.
"""

from __future__ import annotations

import math
import zlib
from collections import Counter
from dataclasses import dataclass
from itertools import groupby
from typing import Iterable, Sequence as Seq

from .piecewise import PiecewiseFunction1D, refine_constant

GAP = "-"

NEG = float("-inf")


class Sequence:
    """An ungapped sequence of symbols (arbitrary string tokens) with a label."""

    __slots__ = ("chars", "id")

    def __init__(self, chars: Iterable[str] | str, id: str = ""):
        toks = tuple(chars)
        if any(c == GAP for c in toks):
            raise ValueError(f"symbol {GAP!r} is reserved for gaps")
        self.chars = toks
        self.id = id

    def __len__(self):
        return len(self.chars)

    def __getitem__(self, i):
        return self.chars[i]

    def __iter__(self):
        return iter(self.chars)

    def __eq__(self, other):
        return isinstance(other, Sequence) and self.chars == other.chars

    def __hash__(self):
        return hash(self.chars)

    def __repr__(self):
        return f"Sequence({''.join(self.chars)!r}, id={self.id!r})"


def del_gaps(row: Seq[str]) -> tuple[str, ...]:
    return tuple(c for c in row if c != GAP)


class Alignment:
    """Rows of equal length over the gapped alphabet; no column is all gaps."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Seq[str]]):
        rows = tuple(tuple(r) for r in rows)
        if not rows:
            raise ValueError("need at least one row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("rows must have equal length")
        for j in range(width):
            if all(r[j] == GAP for r in rows):
                raise ValueError(f"column {j} is all gaps")
        self.rows = rows

    @property
    def n_columns(self):
        return len(self.rows[0])

    def sources(self) -> list[tuple[str, ...]]:
        return [del_gaps(r) for r in self.rows]

    def __eq__(self, other):
        return isinstance(other, Alignment) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return "Alignment(" + ", ".join("".join(r) for r in self.rows) + ")"


@dataclass(frozen=True)
class AlignmentFeatures:
    matches: int
    mismatches: int
    indels: int
    gaps: int  # maximal gap runs summed over rows; terminal runs count


@dataclass(frozen=True)
class AffineParams:
    """Penalties (mismatch, indel, gap-open); all nonnegative."""

    rho1: float = 0.0
    rho2: float = 0.0
    rho3: float = 0.0

    def __post_init__(self):
        for r in (self.rho1, self.rho2, self.rho3):
            if not math.isfinite(r) or r < 0:
                raise ValueError("penalties must be finite and nonnegative")


def pairwise_features(aln: Alignment) -> AlignmentFeatures:
    if len(aln.rows) != 2:
        raise ValueError("feature counts are defined for pairwise alignments")
    r1, r2 = aln.rows
    mt = ms = ind = 0
    for a, b in zip(r1, r2):
        if a == GAP or b == GAP:
            ind += 1
        elif a == b:
            mt += 1
        else:
            ms += 1
    gp = sum(sum(1 for k, g in groupby(row) if k == GAP) for row in aln.rows)
    return AlignmentFeatures(mt, ms, ind, gp)


def objective(feats: AlignmentFeatures, p: AffineParams) -> float:
    return feats.matches - p.rho1 * feats.mismatches - p.rho2 * feats.indels - p.rho3 * feats.gaps


# DP states: 0 = diagonal, 1 = gap in row 2 (consumes s1), 2 = gap in row 1.
_D, _P, _Q = 0, 1, 2


def affine_align(
    s1: Sequence, s2: Sequence, p: AffineParams, max_len: int = 10_000
) -> tuple[Alignment, AlignmentFeatures, float]:
    """Optimal affine-gap alignment of two sequences.

    Deterministic traceback: at equal score prefer the diagonal move, then a
    gap in row 2, then a gap in row 1, both for the final state and for every
    predecessor choice.
    """
    n, m = len(s1), len(s2)
    if n == 0 or m == 0:
        raise ValueError("sequences must be nonempty")
    if n > max_len or m > max_len:
        raise ValueError(f"sequence longer than configured max {max_len}")

    open_pen = p.rho2 + p.rho3
    ext_pen = p.rho2

    D = [[NEG] * (m + 1) for _ in range(n + 1)]
    P = [[NEG] * (m + 1) for _ in range(n + 1)]
    Q = [[NEG] * (m + 1) for _ in range(n + 1)]
    # back[state][i][j] = predecessor state
    back = [[[0] * (m + 1) for _ in range(n + 1)] for _ in range(3)]

    D[0][0] = 0.0
    for i in range(1, n + 1):
        P[i][0] = -(open_pen + (i - 1) * ext_pen)
        back[_P][i][0] = _D if i == 1 else _P
    for j in range(1, m + 1):
        Q[0][j] = -(open_pen + (j - 1) * ext_pen)
        back[_Q][0][j] = _D if j == 1 else _Q

    for i in range(1, n + 1):
        ci = s1[i - 1]
        Di_1, Pi_1, Qi_1 = D[i - 1], P[i - 1], Q[i - 1]
        Di, Pi, Qi = D[i], P[i], Q[i]
        bD, bP, bQ = back[_D][i], back[_P][i], back[_Q][i]
        for j in range(1, m + 1):
            sub = 1.0 if ci == s2[j - 1] else -p.rho1
            # diagonal: predecessor priority D > P > Q
            a, b, c = Di_1[j - 1], Pi_1[j - 1], Qi_1[j - 1]
            best = max(a, b, c)
            Di[j] = best + sub
            bD[j] = _D if a == best else (_P if b == best else _Q)
            # gap in row 2 (consume s1): extends P, opens from D or Q
            a, b, c = Di_1[j] - open_pen, Pi_1[j] - ext_pen, Qi_1[j] - open_pen
            best = max(a, b, c)
            Pi[j] = best
            bP[j] = _D if a == best else (_P if b == best else _Q)
            # gap in row 1 (consume s2)
            a, b, c = Di[j - 1] - open_pen, Pi[j - 1] - open_pen, Qi[j - 1] - ext_pen
            best = max(a, b, c)
            Qi[j] = best
            bQ[j] = _D if a == best else (_P if b == best else _Q)

    finals = (D[n][m], P[n][m], Q[n][m])
    best = max(finals)
    state = finals.index(best)  # index() returns the first, i.e. D > P > Q

    r1, r2 = [], []
    i, j = n, m
    while i > 0 or j > 0:
        prev = back[state][i][j]
        if state == _D:
            r1.append(s1[i - 1])
            r2.append(s2[j - 1])
            i -= 1
            j -= 1
        elif state == _P:
            r1.append(s1[i - 1])
            r2.append(GAP)
            i -= 1
        else:
            r1.append(GAP)
            r2.append(s2[j - 1])
            j -= 1
        state = prev
    aln = Alignment((reversed(r1), reversed(r2)))
    feats = pairwise_features(aln)
    return aln, feats, objective(feats, p)


def enumerate_alignments(s1: Sequence, s2: Sequence) -> list[Alignment]:
    """All alignments of two short sequences (brute-force oracle, length <= 6)."""
    n, m = len(s1), len(s2)
    if n == 0 or m == 0:
        raise ValueError("sequences must be nonempty")
    if n > 6 or m > 6:
        raise ValueError("oracle scale only")

    out: list[Alignment] = []

    def rec(i, j, r1, r2):
        if i == n and j == m:
            out.append(Alignment((tuple(r1), tuple(r2))))
            return
        if i < n and j < m:
            r1.append(s1[i])
            r2.append(s2[j])
            rec(i + 1, j + 1, r1, r2)
            r1.pop()
            r2.pop()
        if i < n:
            r1.append(s1[i])
            r2.append(GAP)
            rec(i + 1, j, r1, r2)
            r1.pop()
            r2.pop()
        if j < m:
            r1.append(GAP)
            r2.append(s2[j])
            rec(i, j + 1, r1, r2)
            r1.pop()
            r2.pop()

    rec(0, 0, [], [])
    return out


def matched_pairs(aln: Alignment) -> set[tuple[int, int]]:
    """Letter-position pairs (1-based) aligned in the two rows."""
    if len(aln.rows) != 2:
        raise ValueError("pairwise alignments only")
    pairs = set()
    i = j = 0
    for a, b in zip(*aln.rows):
        if a != GAP:
            i += 1
        if b != GAP:
            j += 1
        if a != GAP and b != GAP:
            pairs.add((i, j))
    return pairs


def q_score(candidate: Alignment, reference: Alignment) -> float:
    """Fraction of the reference's aligned letter pairs reproduced by the candidate."""
    if candidate.sources() != reference.sources():
        raise ValueError("alignments are over different sequence pairs")
    ref = matched_pairs(reference)
    if not ref:
        return 1.0
    return len(matched_pairs(candidate) & ref) / len(ref)


def consensus(a: Alignment) -> Sequence:
    """Per-column most-frequent non-gap symbol; ties break lexicographically."""
    chars = []
    for j in range(a.n_columns):
        counts = Counter(r[j] for r in a.rows if r[j] != GAP)
        top = max(counts.values())
        chars.append(min(c for c, k in counts.items() if k == top))
    return Sequence(chars, id="consensus")


class GuideTree:
    """Binary tree whose leaves name the input sequences of a progressive MSA."""

    class Node:
        __slots__ = ("label", "left", "right")

        def __init__(self, label=None, left=None, right=None):
            self.label = label
            self.left = left
            self.right = right

        @property
        def is_leaf(self):
            return self.label is not None

    def __init__(self, root: "GuideTree.Node"):
        self.root = root
        labels = self.leaf_labels()
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate leaf labels")

        def check(node):
            if node.is_leaf:
                if node.left or node.right:
                    raise ValueError("leaf with children")
            elif node.left is None or node.right is None:
                raise ValueError("internal nodes need exactly two children")
            else:
                check(node.left)
                check(node.right)

        check(root)

    def leaf_labels(self) -> list[str]:
        out = []

        def walk(node):
            if node.is_leaf:
                out.append(node.label)
            else:
                walk(node.left)
                walk(node.right)

        walk(self.root)
        return out

    @classmethod
    def from_newick(cls, text: str) -> "GuideTree":
        """Parse a binary Newick subset with leaf labels only: ((a,b),(c,d));"""
        s = text.strip()
        if s.endswith(";"):
            s = s[:-1]
        pos = 0

        def parse():
            nonlocal pos
            if pos < len(s) and s[pos] == "(":
                pos += 1
                left = parse()
                if pos >= len(s) or s[pos] != ",":
                    raise ValueError("expected ',' in newick input")
                pos += 1
                right = parse()
                if pos >= len(s) or s[pos] != ")":
                    raise ValueError("expected ')' in newick input")
                pos += 1
                return cls.Node(left=left, right=right)
            start = pos
            while pos < len(s) and s[pos] not in "(),;":
                pos += 1
            label = s[start:pos].strip()
            if not label:
                raise ValueError("empty leaf label in newick input")
            return cls.Node(label=label)

        root = parse()
        if pos != len(s):
            raise ValueError(f"trailing newick input at position {pos}")
        return cls(root)

    @classmethod
    def balanced(cls, labels: Seq[str]) -> "GuideTree":
        def build(lo, hi):
            if hi - lo == 1:
                return cls.Node(label=labels[lo])
            mid = (lo + hi) // 2
            return cls.Node(left=build(lo, mid), right=build(mid, hi))

        if not labels:
            raise ValueError("need at least one label")
        return cls(build(0, len(labels)))


def progressive_align(
    seqs: Seq[Sequence], tree: GuideTree, p: AffineParams
) -> Alignment:
    """Progressive MSA over a guide tree using consensus sequences.

    Bottom-up, each internal node pairwise-aligns its children's consensus
    sequences and stores its own consensus; top-down, gap columns are pushed
    into the children's alignment sequences ("once a gap, always a gap").
    """
    by_id = {s.id: s for s in seqs}
    labels = tree.leaf_labels()
    if len(by_id) != len(seqs):
        raise ValueError("sequence ids must be unique")
    if sorted(labels) != sorted(by_id):
        raise ValueError("guide-tree leaves do not match the sequence ids")

    cons: dict[int, Sequence] = {}
    pair: dict[int, Alignment] = {}

    def up(node):
        if node.is_leaf:
            cons[id(node)] = by_id[node.label]
            return
        up(node.left)
        up(node.right)
        aln, _, _ = affine_align(cons[id(node.left)], cons[id(node.right)], p)
        pair[id(node)] = aln
        cons[id(node)] = consensus(aln)

    up(tree.root)

    sigma: dict[int, tuple[str, ...]] = {id(tree.root): cons[id(tree.root)].chars}
    rows: dict[str, tuple[str, ...]] = {}

    def down(node):
        if node.is_leaf:
            rows[node.label] = sigma[id(node)]
            return
        tau1, tau2 = pair[id(node)].rows
        out1, out2 = [], []
        k = 0
        for c in sigma[id(node)]:
            if c == GAP:
                out1.append(GAP)
                out2.append(GAP)
            else:
                out1.append(tau1[k])
                out2.append(tau2[k])
                k += 1
        sigma[id(node.left)] = tuple(out1)
        sigma[id(node.right)] = tuple(out2)
        down(node.left)
        down(node.right)

    down(tree.root)
    return Alignment(rows[s.id] for s in seqs)


def _traceback_tag(aln: Alignment) -> int:
    return zlib.crc32("\n".join("".join(r) for r in aln.rows).encode())


def indel_breakpoints(
    s1: Sequence, s2: Sequence, rho_max: float, max_len: int = 500
) -> PiecewiseFunction1D:
    """Exact optimal-objective envelope over the indel penalty in [0, rho_max].

    Each alignment contributes the line ``matches - rho * indels``; the
    optimum is their upper envelope, found by solving at interval endpoints
    and recursing on the endpoint lines' intersection.  Breakpoints are exact
    ratios of integer feature counts.
    """
    if rho_max <= 0:
        raise ValueError("rho_max must be positive")
    if len(s1) > max_len or len(s2) > max_len:
        raise ValueError(f"sequence longer than configured max {max_len}")

    def solve(rho):
        aln, f, _ = affine_align(s1, s2, AffineParams(0.0, rho, 0.0))
        return f.matches, f.indels, aln

    segments: list[tuple[float, float, int, int, int]] = []  # lo, hi, mt, id, tag

    def rec(lo, hi, left, right):
        mt_l, id_l, aln_l = left
        mt_r, id_r, aln_r = right
        if (mt_l, id_l) == (mt_r, id_r):
            segments.append((lo, hi, mt_l, id_l, _traceback_tag(aln_l)))
            return
        if id_l == id_r:
            # parallel distinct lines: the higher one dominates the interval
            keep = left if mt_l >= mt_r else right
            segments.append((lo, hi, keep[0], keep[1], _traceback_tag(keep[2])))
            return
        x = (mt_l - mt_r) / (id_l - id_r)
        if not (lo + 1e-12 < x < hi - 1e-12):
            keep = left if (mt_l - 0.5 * (lo + hi) * id_l) >= (mt_r - 0.5 * (lo + hi) * id_r) else right
            segments.append((lo, hi, keep[0], keep[1], _traceback_tag(keep[2])))
            return
        mid = solve(x)
        cross = mt_l - x * id_l
        if mid[0] - x * mid[1] > cross + 1e-9:
            rec(lo, x, left, mid)
            rec(x, hi, mid, right)
        else:
            segments.append((lo, x, mt_l, id_l, _traceback_tag(aln_l)))
            segments.append((x, hi, mt_r, id_r, _traceback_tag(aln_r)))

    rec(0.0, float(rho_max), solve(0.0), solve(float(rho_max)))
    segments.sort(key=lambda s: s[0])
    bps = [s[0] for s in segments[1:]]
    pieces = [(-float(idl), float(mt), tag) for (_, _, mt, idl, tag) in segments]
    return PiecewiseFunction1D(0.0, float(rho_max), bps, pieces)


def utility_breakpoints(
    s1: Sequence,
    s2: Sequence,
    reference: Alignment,
    rho_max: float,
    max_len: int = 500,
) -> PiecewiseFunction1D:
    """Piecewise-constant Q-score of the parameterized aligner against a reference.

    Refines the objective envelope; each piece's value is the Q-score of the
    aligner's actual output at the piece midpoint, so tie-breaking matches the
    algorithm.  Adjacent equal-valued pieces merge.
    """
    env = indel_breakpoints(s1, s2, rho_max, max_len=max_len)

    def util(rho):
        aln, _, _ = affine_align(s1, s2, AffineParams(0.0, rho, 0.0))
        return q_score(aln, reference)

    return refine_constant(env, util)


def gen_lb_sequences(n: int):
    """Worst-case sequence-pair family over the indel slice.

    Returns ``(pairs, references, thresholds)``: N = log2(k+1) sequence pairs
    over the 4k-symbol alphabet with k = 2^floor(log2 sqrt(n/2)) - 1, their
    ground-truth alignments (alternating low/high sub-alignments, starting and
    ending low), and the list of utility flip thresholds per pair.
    """
    if n < 8:
        raise ValueError("need n >= 8")
    k = 2 ** int(math.floor(math.log2(math.sqrt(n / 2)))) - 1
    N = int(round(math.log2(k + 1)))

    def t1(j):
        return [f"a{j}"] * j + [f"b{j}", f"d{j}"]

    def t2(j):
        return [f"b{j}"] + [f"c{j}"] * j + [f"d{j}"]

    def low(j):  # b characters deliberately unmatched
        r1 = [f"a{j}"] * j + [f"b{j}"] + [GAP] * j + [f"d{j}"]
        r2 = [f"b{j}"] + [GAP] * j + [f"c{j}"] * j + [f"d{j}"]
        return r1, r2

    def high(j):  # b characters matched at the cost of 2j indels
        r1 = [f"a{j}"] * j + [f"b{j}"] + [GAP] * j + [f"d{j}"]
        r2 = [GAP] * j + [f"b{j}"] + [f"c{j}"] * j + [f"d{j}"]
        return r1, r2

    pairs, references, thresholds = [], [], []
    for i in range(1, N + 1):
        step = 2 ** (i - 1)
        js = list(range(step, k + 1 - step + 1, step))
        c1: list[str] = []
        c2: list[str] = []
        r1: list[str] = []
        r2: list[str] = []
        for pos, j in enumerate(js):
            c1 += t1(j)
            c2 += t2(j)
            a, b = low(j) if pos % 2 == 0 else high(j)
            r1 += a
            r2 += b
        pairs.append((Sequence(c1, id=f"S1_{i}"), Sequence(c2, id=f"S2_{i}")))
        references.append(Alignment((r1, r2)))
        thresholds.append([1.0 / (2 * j) for j in reversed(js)])
    return pairs, references, thresholds


def lb_verify(n: int):
    """Build the lower-bound family and check shattering with witnesses 3/4.

    Candidate parameters are midpoints of the full threshold grid (plus one
    point below and one above), which avoids evaluating at tie points.
    Returns ``(certificate, pairs, references, thresholds)``.
    """
    from .bounds import verify_shattering

    pairs, references, thresholds = gen_lb_sequences(n)
    grid = thresholds[0]  # pair 1 carries every threshold
    candidates = [grid[0] / 2]
    candidates += [0.5 * (a + b) for a, b in zip(grid, grid[1:])]
    candidates.append(grid[-1] * 1.5)

    duals = [
        (
            lambda rho, s=pair, ref=ref: q_score(
                affine_align(s[0], s[1], AffineParams(0.0, rho, 0.0))[0], ref
            )
        )
        for pair, ref in zip(pairs, references)
    ]
    cert = verify_shattering(duals, [0.75] * len(pairs), candidates)
    return cert, pairs, references, thresholds


# -- FASTA-lite / Newick IO ---------------------------------------------------


def parse_fasta(text: str) -> list[tuple[str, str]]:
    """Parse '>id' / sequence-line records; returns (id, raw string) pairs."""
    records: list[tuple[str, list[str]]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            records.append((line[1:].strip(), []))
        else:
            if not records:
                raise ValueError("sequence data before any '>' header")
            records[-1][1].append(line)
    return [(rid, "".join(chunks)) for rid, chunks in records]


def sequences_from_fasta(text: str) -> list[Sequence]:
    return [Sequence(raw, id=rid) for rid, raw in parse_fasta(text)]


def alignment_from_fasta(text: str) -> Alignment:
    return Alignment(tuple(raw) for _, raw in parse_fasta(text))


def to_fasta(rows: Seq[tuple[str, str]]) -> str:
    return "".join(f">{rid}\n{body}\n" for rid, body in rows)
