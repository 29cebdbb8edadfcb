"""Core types and the satisfaction calculus for systems of total orders.

A total order on labels 1..n is stored both as a tuple listing labels by
position and as a rank map (label -> position).  A ternary constraint
(x1, x2, x3) is an ordered triple of distinct labels; its relative order
under an ordering phi is the three-letter word in

    S3 = {123, 132, 213, 231, 312, 321}

telling which components come first, second and third when sorted by
rank.  An ordering between-satisfies a constraint when x2 falls strictly
between x1 and x3 (word 123 or 321), nonbetween-satisfies it otherwise,
and pattern-satisfies it for a pattern set Pi when the word lies in Pi.
An order system satisfies a constraint when at least one member does.

``verify_system`` checks a system against every constraint (or a seeded
uniform sample) and reports violations.  Pattern sets that are closed
under swapping a constraint's endpoints (the word map w1w2w3 ->
(4-w1)(4-w2)(4-w3); betweenness and nonbetweenness both are) only need
one representative per (middle, unordered endpoint pair), which cuts the
exhaustive universe from n(n-1)(n-2) ordered triples to n*C(n-1,2).
"""

from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Iterable, Iterator

import multiprocessing
import numpy as np

Constraint = tuple[int, int, int]
PatternSet = frozenset[str]

S3_WORDS: tuple[str, ...] = ("123", "132", "213", "231", "312", "321")
ALL_PATTERNS: PatternSet = frozenset(S3_WORDS)

#: The two words with label-index a in the middle position.
MIDDLE_CLASSES: dict[int, PatternSet] = {
    1: frozenset({"213", "312"}),
    2: frozenset({"123", "321"}),
    3: frozenset({"132", "231"}),
}
BETWEEN: PatternSet = MIDDLE_CLASSES[2]
NONBETWEEN: PatternSet = MIDDLE_CLASSES[1] | MIDDLE_CLASSES[3]


@dataclass(frozen=True)
class Ordering:
    """A total order on labels 1..n.

    ``tuple_form[p-1]`` is the label at position p (first = smallest),
    ``ranks[x-1]`` is the position of label x.  Both views are 1-based.
    """

    tuple_form: tuple[int, ...]
    ranks: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.tuple_form)
        if n < 1:
            raise ValueError("an ordering needs at least one label")
        ranks = [0] * n
        for pos, label in enumerate(self.tuple_form, start=1):
            if not isinstance(label, int) or not 1 <= label <= n or ranks[label - 1]:
                raise ValueError(
                    f"tuple form {self.tuple_form!r} is not a permutation of 1..{n}"
                )
            ranks[label - 1] = pos
        object.__setattr__(self, "ranks", tuple(ranks))

    @classmethod
    def identity(cls, n: int) -> "Ordering":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_ranks(cls, ranks: Iterable[int]) -> "Ordering":
        ranks = tuple(ranks)
        tup = [0] * len(ranks)
        for label, pos in enumerate(ranks, start=1):
            if not 1 <= pos <= len(ranks) or tup[pos - 1]:
                raise ValueError(f"rank map {ranks!r} is not a permutation of 1..{len(ranks)}")
            tup[pos - 1] = label
        return cls(tuple(tup))

    @property
    def n(self) -> int:
        return len(self.tuple_form)

    def position_of(self, label: int) -> int:
        if not 1 <= label <= self.n:
            raise ValueError(f"label {label} out of range 1..{self.n}")
        return self.ranks[label - 1]

    def label_at(self, position: int) -> int:
        if not 1 <= position <= self.n:
            raise ValueError(f"position {position} out of range 1..{self.n}")
        return self.tuple_form[position - 1]

    def inverse(self) -> "Ordering":
        """The inverse permutation: rank map and tuple form swap roles."""
        return Ordering(self.ranks)


@dataclass(frozen=True)
class OrderSystem:
    """A duplicate-free collection of orderings over a common label set 1..n.

    Member order is preserved (it is meaningful to humans reading the
    JSON form) but equality of membership should be tested as sets of
    tuple forms; see :meth:`member_set`.
    """

    n: int
    orderings: tuple[Ordering, ...]

    def __post_init__(self):
        seen = set()
        for phi in self.orderings:
            if phi.n != self.n:
                raise ValueError(f"ordering on {phi.n} labels in a system over 1..{self.n}")
            if phi.tuple_form in seen:
                raise ValueError(f"duplicate ordering {phi.tuple_form!r}")
            seen.add(phi.tuple_form)

    @classmethod
    def from_tuples(cls, n: int, tuples: Iterable[Iterable[int]]) -> "OrderSystem":
        return cls(n, tuple(Ordering(tuple(t)) for t in tuples))

    @property
    def size(self) -> int:
        return len(self.orderings)

    def __iter__(self) -> Iterator[Ordering]:
        return iter(self.orderings)

    def member_set(self) -> frozenset[tuple[int, ...]]:
        return frozenset(phi.tuple_form for phi in self.orderings)

    def to_json_dict(self) -> dict:
        return {"n": self.n, "orderings": [list(phi.tuple_form) for phi in self.orderings]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "OrderSystem":
        if not isinstance(data, dict) or "n" not in data or "orderings" not in data:
            raise ValueError('order-system JSON needs keys "n" and "orderings"')
        n = data["n"]
        if not isinstance(n, int) or n < 1:
            raise ValueError(f'"n" must be a positive integer, got {n!r}')
        return cls.from_tuples(n, data["orderings"])


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of checking an order system against its constraint universe.

    ``violations`` may be truncated at a cap; ``violation_total`` is the
    full count and ``passed`` is true exactly when it is zero.  In
    exhaustive mode ``checked`` equals the universe size for the chosen
    enumeration strategy; in sampled mode it is the number of draws.
    """

    mode: str  # "exhaustive" | "sampled"
    strategy: str  # "middle-centered" | "ordered-triples" | "triplets"
    checked: int
    violations: tuple[Constraint, ...]
    violation_total: int
    truncated: bool
    passed: bool
    seed: int | None = None

    def to_json_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "strategy": self.strategy,
            "checked": self.checked,
            "pass": self.passed,
            "violation_total": self.violation_total,
            "truncated": self.truncated,
            "violations": [list(v) for v in self.violations],
        }
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def parse_patterns(words: Iterable[str]) -> PatternSet:
    """Validate and freeze a collection of S3 words into a pattern set."""
    pi = frozenset(words)
    bad = sorted(pi - ALL_PATTERNS)
    if bad:
        raise ValueError(f"unknown pattern words {bad}; valid words are {sorted(S3_WORDS)}")
    if not pi:
        raise ValueError("pattern set must be nonempty")
    return pi


def pattern_words(pi: PatternSet) -> list[str]:
    """Canonical JSON form: the sorted word list."""
    return sorted(pi)


def word_reverse(word: str) -> str:
    """The relative order realised by the reversed ordering."""
    return word[::-1]


def endpoint_swap(word: str) -> str:
    """The relative order of (x3, x2, x1) given that of (x1, x2, x3)."""
    return "".join(str(4 - int(ch)) for ch in word)


def compose_words(sigma: str, word: str) -> str:
    """Apply the S3 element sigma symbol-wise: (sigma . w)_j = sigma(w_j)."""
    return "".join(sigma[int(ch) - 1] for ch in word)


def swap_closed(pi: PatternSet) -> bool:
    """True when satisfaction cannot depend on the order of the endpoints."""
    return all(endpoint_swap(w) in pi for w in pi)


def _word_of_values(va, vb, vc) -> str:
    # Relative order of three distinct comparables.
    if va < vb:
        if vb < vc:
            return "123"
        return "132" if va < vc else "312"
    if va < vc:
        return "213"
    return "231" if vb < vc else "321"


def _check_constraint(phi: Ordering, c: Constraint) -> None:
    x1, x2, x3 = c
    n = phi.n
    for x in c:
        if not isinstance(x, int) or not 1 <= x <= n:
            raise ValueError(f"constraint label {x} out of range 1..{n}")
    if x1 == x2 or x2 == x3 or x1 == x3:
        raise ValueError(f"constraint {c} has repeated labels")


def relative_order(phi: Ordering, c: Constraint) -> str:
    """The S3 word describing how phi ranks the constraint's three labels."""
    _check_constraint(phi, c)
    r = phi.ranks
    return _word_of_values(r[c[0] - 1], r[c[1] - 1], r[c[2] - 1])


def between_satisfies(phi: Ordering, c: Constraint) -> bool:
    """True when the middle label falls strictly between the endpoints."""
    return relative_order(phi, c) in BETWEEN


def nonbetween_satisfies(phi: Ordering, c: Constraint) -> bool:
    return relative_order(phi, c) not in BETWEEN


def pattern_satisfies(phi: Ordering, c: Constraint, pi: PatternSet) -> bool:
    if not pi:
        raise ValueError("pattern set must be nonempty")
    return relative_order(phi, c) in pi


def middle_class_deficiency(pi: PatternSet) -> int:
    """How many of the three middle classes the pattern set misses entirely."""
    if not pi:
        raise ValueError("pattern set must be nonempty")
    if not pi <= ALL_PATTERNS:
        raise ValueError(f"unknown pattern words {sorted(pi - ALL_PATTERNS)}")
    return sum(1 for cls in MIDDLE_CLASSES.values() if not pi & cls)


def reverse(phi: Ordering) -> Ordering:
    """The reversed order: rank x becomes n + 1 - rank x."""
    return Ordering(phi.tuple_form[::-1])


def relabel_system(sys: OrderSystem, sigma: Ordering) -> OrderSystem:
    """Relabel every member by sigma: the new rank of x is phi(sigma(x))."""
    if sigma.n != sys.n:
        raise ValueError(f"relabeling on {sigma.n} labels applied to a system over 1..{sys.n}")
    sr = sigma.ranks
    out = []
    for phi in sys.orderings:
        pr = phi.ranks
        out.append(Ordering.from_ranks(pr[sr[x] - 1] for x in range(sys.n)))
    return OrderSystem(sys.n, tuple(out))


def restrict_ordering(phi: Ordering, m: int) -> Ordering:
    """Keep labels 1..m in their induced order (ranks compressed to 1..m)."""
    if not 1 <= m <= phi.n:
        raise ValueError(f"cannot restrict an ordering on {phi.n} labels to 1..{m}")
    return Ordering(tuple(x for x in phi.tuple_form if x <= m))


def restrict_system(sys: OrderSystem, m: int) -> OrderSystem:
    """Restrict every member to labels 1..m, dropping duplicates that arise."""
    restricted = dict.fromkeys(restrict_ordering(phi, m).tuple_form for phi in sys.orderings)
    return OrderSystem.from_tuples(m, restricted)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

# 3-bit comparison code -> index into S3_WORDS; codes 2 and 5 cannot occur
# for distinct values.  code = (A<B)<<2 | (A<C)<<1 | (B<C).
_CODE_TO_WORD_INDEX = (5, 3, -1, 2, 4, -1, 1, 0)


def _pattern_lut(pi: PatternSet) -> np.ndarray:
    lut = np.zeros(8, dtype=bool)
    for code, widx in enumerate(_CODE_TO_WORD_INDEX):
        if widx >= 0 and S3_WORDS[widx] in pi:
            lut[code] = True
    return lut


def enumerate_constraints(n: int, pi: PatternSet) -> Iterator[Constraint]:
    """The exhaustive constraint universe for a system over 1..n.

    Middle-centered (one of (a,b,c)/(c,b,a) with a < c) when pi is
    endpoint-swap closed, all ordered triples of distinct labels
    otherwise.
    """
    if swap_closed(pi):
        for b in range(1, n + 1):
            for a, c in combinations((x for x in range(1, n + 1) if x != b), 2):
                yield (a, b, c)
    else:
        for a, b, c in permutations(range(1, n + 1), 3):
            yield (a, b, c)


def _verify_chunk(
    ranks_rows: list[tuple[int, ...]],
    lut: np.ndarray,
    n: int,
    b_lo: int,
    b_hi: int,
    symmetric: bool,
) -> tuple[int, list[Constraint]]:
    """Check all constraints with middle label in [b_lo, b_hi) (0-based)."""
    labels = np.arange(n)
    bs = np.arange(b_lo, b_hi)
    sat = np.zeros((n, len(bs), n), dtype=bool)
    for row in ranks_rows:
        r = np.asarray(row, dtype=np.int64)
        a_vals = r[:, None, None]
        b_vals = r[None, bs, None]
        c_vals = r[None, None, :]
        code = (
            ((a_vals < b_vals).astype(np.uint8) << 2)
            | ((a_vals < c_vals).astype(np.uint8) << 1)
            | (b_vals < c_vals).astype(np.uint8)
        )
        sat |= lut[code]
    a_idx = labels[:, None, None]
    b_idx = bs[None, :, None]
    c_idx = labels[None, None, :]
    valid = (a_idx != b_idx) & (c_idx != b_idx)
    if symmetric:
        valid &= a_idx < c_idx
    else:
        valid &= a_idx != c_idx
    checked = int(valid.sum())
    bad = np.argwhere(valid & ~sat)
    violations = [(int(a) + 1, int(b) + b_lo + 1, int(c) + 1) for a, b, c in bad]
    return checked, violations


def _chunk_ranges(n: int, pieces: int) -> list[tuple[int, int]]:
    step = (n + pieces - 1) // pieces
    return [(lo, min(lo + step, n)) for lo in range(0, n, step)]


def _sample_constraints(n: int, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` ordered triples of distinct labels, uniformly, seeded."""
    rng = np.random.default_rng(seed)
    out = rng.integers(1, n + 1, size=(count, 3), dtype=np.int64)
    while True:
        bad = (
            (out[:, 0] == out[:, 1]) | (out[:, 1] == out[:, 2]) | (out[:, 0] == out[:, 2])
        )
        k = int(bad.sum())
        if not k:
            return out
        out[bad] = rng.integers(1, n + 1, size=(k, 3), dtype=np.int64)


def verify_system(
    sys: OrderSystem,
    pi: PatternSet,
    *,
    sample: int | None = None,
    seed: int = 0,
    violation_cap: int | None = 100,
    threads: int = 1,
) -> VerificationReport:
    """Check that some member realises a word of pi on every constraint.

    Exhaustive by default; pass ``sample`` to draw that many constraints
    uniformly with the given seed instead (deterministic per seed).
    ``violation_cap`` truncates the reported violation list (None keeps
    all).  ``threads`` > 1 partitions the exhaustive universe across
    processes; the report does not depend on the partition.
    """
    if not pi:
        raise ValueError("pattern set must be nonempty")
    pi = parse_patterns(pi)
    if sys.size == 0:
        raise ValueError("cannot verify an empty order system")
    n = sys.n
    if n < 3:
        raise ValueError(f"ternary constraints need n >= 3, got n = {n}")

    lut = _pattern_lut(pi)
    ranks_rows = [tuple(r - 1 for r in phi.ranks) for phi in sys.orderings]

    if sample is not None:
        if sample < 1:
            raise ValueError("sample count must be positive")
        triples = _sample_constraints(n, sample, seed)
        sat = np.zeros(sample, dtype=bool)
        for row in ranks_rows:
            r = np.asarray(row, dtype=np.int64)
            a_vals = r[triples[:, 0] - 1]
            b_vals = r[triples[:, 1] - 1]
            c_vals = r[triples[:, 2] - 1]
            code = (
                ((a_vals < b_vals).astype(np.uint8) << 2)
                | ((a_vals < c_vals).astype(np.uint8) << 1)
                | (b_vals < c_vals).astype(np.uint8)
            )
            sat |= lut[code]
        bad = sorted({tuple(int(v) for v in t) for t in triples[~sat]})
        return _finish_report("sampled", "ordered-triples", sample, bad, violation_cap, seed)

    symmetric = swap_closed(pi)
    jobs = _chunk_ranges(n, max(threads, (n * n * n) // (1 << 24) + 1))
    args = [(ranks_rows, lut, n, lo, hi, symmetric) for lo, hi in jobs]
    if threads > 1 and len(args) > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(threads) as pool:
            parts = pool.starmap(_verify_chunk, args)
    else:
        parts = [_verify_chunk(*a) for a in args]
    checked = sum(p[0] for p in parts)
    violations = sorted(v for p in parts for v in p[1])
    strategy = "middle-centered" if symmetric else "ordered-triples"
    expected = n * (n - 1) * (n - 2) // (2 if symmetric else 1)
    if checked != expected:
        raise AssertionError(f"enumeration bug: checked {checked}, expected {expected}")
    return _finish_report("exhaustive", strategy, checked, violations, violation_cap, None)


def _finish_report(
    mode: str,
    strategy: str,
    checked: int,
    violations: list[Constraint],
    cap: int | None,
    seed: int | None,
) -> VerificationReport:
    total = len(violations)
    truncated = cap is not None and total > cap
    kept = violations[:cap] if truncated else violations
    return VerificationReport(
        mode=mode,
        strategy=strategy,
        checked=checked,
        violations=tuple(kept),
        violation_total=total,
        truncated=truncated,
        passed=total == 0,
        seed=seed,
    )
