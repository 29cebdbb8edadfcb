"""Exact values, bounds, and explicit constructions of covering order-systems.

Notation used throughout: ``nbet(n)`` / ``bet(n)`` are the minimum sizes
of order-systems over 1..n that nonbetween- / between-satisfy every
ternary constraint, ``p_pi(n)`` generalises this to an arbitrary
nonempty pattern set pi, and ``p(n)`` is the minimum number of rooted
binary trees needed to cover all phylogenetic triplets.

The closed forms implemented here:

  nbet(n)  = ceil(log2 log2 n) + 1                       (exact),
  bet(n)  >= ceil(log2 (n-1)) + 1,   bet(n) <= 2 ceil(log2 n),
  p_pi(n)  = 2                                  when pi misses no middle class,
  p_pi(n) in [nbet(n), 2 ceil(log2 log2 n) + 2] when pi misses one,
  p_pi(n) in [ceil(log2 (n-1)) + 1, 4 ceil(log2 n)] when pi misses two,
  p(n)    in [nbet(n), 2 ceil(log2 log2 n) + 2].

All logarithmic thresholds are computed by exact integer squaring or bit
length, never floating point: at threshold arguments (n a power of two,
or a double power of two) float rounding gives wrong ceilings.

The nonbetweenness construction reads the coordinates of a tight
extremal sequence (no monotone triple) as orderings and adds the
identity.  The betweenness construction writes labels in binary, takes
the k cyclic digit rotations as "separator" orders (every pair of labels
is split across the half boundary by some rotation), and pairs each with
its half-swapped companion.  General pattern sets reduce to one of these
two bases, translated so the missing middle class is the betweenness
class, and doubled with reversed copies when the base realises only one
word of a needed class.
"""

from dataclasses import dataclass

import numpy as np

from .core import (
    BETWEEN,
    MIDDLE_CLASSES,
    NONBETWEEN,
    ALL_PATTERNS,
    Ordering,
    OrderSystem,
    PatternSet,
    compose_words,
    middle_class_deficiency,
    parse_patterns,
    restrict_system,
    reverse,
)
from .sequences import build_tight_sequence

#: Known exact betweenness minima for small n (proven by exhaustive search;
#: reproduced by ordercover.search.minimal_size_table).
BET_SMALL_EXACT = {3: 3, 4: 4, 5: 5, 6: 5, 7: 5}

#: Construction guard: beyond this, building explicit systems is refused
#: (bound queries still work at any size).
MAX_CONSTRUCTION_N = 1 << 20


@dataclass(frozen=True)
class BoundPair:
    """Lower/upper bounds on a minimum system size, with the exact value
    when it is known (always populated when the bounds meet)."""

    lower: int
    upper: int
    exact: int | None = None

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")
        if self.exact is None and self.lower == self.upper:
            object.__setattr__(self, "exact", self.lower)
        if self.exact is not None and not self.lower <= self.exact <= self.upper:
            raise ValueError(f"exact value {self.exact} outside [{self.lower}, {self.upper}]")

    def to_json_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact}


def _ceil_log2(x: int) -> int:
    # Smallest k with 2^k >= x, for x >= 1.
    if x < 1:
        raise ValueError(f"need x >= 1, got {x}")
    return (x - 1).bit_length()


def _ceil_log2_log2(n: int) -> int:
    # Smallest d with 2^(2^d) >= n, for n >= 2, by iterated squaring.
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    d, t = 0, 2
    while t < n:
        t *= t
        d += 1
    return d


def _require_n(n: int) -> None:
    if not isinstance(n, int) or n < 3:
        raise ValueError(f"need an integer n >= 3, got {n!r}")


def nbet_exact(n: int) -> int:
    """The minimum nonbetweenness system size, ceil(log2 log2 n) + 1."""
    _require_n(n)
    return _ceil_log2_log2(n) + 1


def construct_nbet_system(n: int) -> OrderSystem:
    """A system of the minimum size nbet_exact(n) nonbetween-satisfying
    every constraint: the identity plus the coordinate orders of a tight
    (no monotone triple) d-dimensional sequence, restricted to n labels.
    """
    _require_n(n)
    d = _ceil_log2_log2(n)
    seq = build_tight_sequence(2, d)
    pts = seq.to_array()[:n]
    members = [Ordering.identity(n)]
    for k in range(d):
        # Compress the first n values of coordinate k to ranks 1..n.
        ranks = np.empty(n, dtype=np.int64)
        ranks[np.argsort(pts[:, k])] = np.arange(1, n + 1)
        members.append(Ordering.from_ranks(int(r) for r in ranks))
    return OrderSystem(n, tuple(members))


def bet_bounds(n: int) -> BoundPair:
    """Betweenness bounds; exact for n <= 7 where the minimum is known."""
    _require_n(n)
    return BoundPair(
        lower=_ceil_log2(n - 1) + 1,
        upper=2 * _ceil_log2(n),
        exact=BET_SMALL_EXACT.get(n),
    )


def _rotation_separators(k: int) -> list[Ordering]:
    # psi_i(x) = (left cyclic rotation by i of the k-bit digits of x-1) + 1.
    # For every pair x != y some rotation puts them on opposite sides of
    # the half boundary 2^(k-1): rotate the differing bit to the top.
    big = 1 << k
    out = []
    for i in range(1, k + 1):
        ranks = []
        for x in range(big):
            rot = ((x << i) | (x >> (k - i))) & (big - 1)
            ranks.append(rot + 1)
        out.append(Ordering.from_ranks(ranks))
    return out


def _half_swap(phi: Ordering, big: int) -> Ordering:
    half = big // 2
    return Ordering.from_ranks(r - half if r > half else r + half for r in phi.ranks)


def construct_bet_system(n: int) -> OrderSystem:
    """A system of size at most 2*ceil(log2 n) between-satisfying every
    constraint: binary-digit rotations paired with half-swapped copies,
    built over the next power of two and restricted to n labels."""
    _require_n(n)
    if n > MAX_CONSTRUCTION_N:
        raise ValueError(f"construction limited to n <= {MAX_CONSTRUCTION_N}")
    k = max(2, _ceil_log2(n))
    big = 1 << k
    members = []
    for psi in _rotation_separators(k):
        members.append(psi)
        members.append(_half_swap(psi, big))
    full = OrderSystem(big, tuple(members))
    return restrict_system(full, n) if n < big else full


def _translation_onto_between(cls_index: int) -> str:
    # S3 element moving middle class cls_index onto the betweenness class,
    # validated by direct computation rather than assumed.
    sigma = {2: "123", 1: "231", 3: "312"}[cls_index]
    moved = frozenset(compose_words(sigma, w) for w in MIDDLE_CLASSES[cls_index])
    if moved != BETWEEN:
        raise AssertionError(f"translation {sigma} maps M_{cls_index} to {sorted(moved)}")
    return sigma


def _doubled(system: OrderSystem) -> OrderSystem:
    tuples = dict.fromkeys(phi.tuple_form for phi in system.orderings)
    for phi in system.orderings:
        tuples.setdefault(reverse(phi).tuple_form)
    return OrderSystem.from_tuples(system.n, tuples)


def construct_etp_system(n: int, pi: PatternSet) -> OrderSystem:
    """A small system realising, on every constraint, some word of pi.

    The missing-middle-class count c of pi picks the recipe: c=0 needs
    just an order and its reverse; c=1 reduces to the nonbetweenness
    base, c=2 to the betweenness base, each translated so the missing
    class is the betweenness class (the family of valid systems is
    invariant under such translations) and doubled with reverses unless
    the translated pattern set already contains both words of every
    class the base realises.
    """
    _require_n(n)
    pi = parse_patterns(pi)
    if pi == ALL_PATTERNS:
        return OrderSystem(n, (Ordering.identity(n),))
    c = middle_class_deficiency(pi)
    if c == 0:
        ident = Ordering.identity(n)
        return OrderSystem(n, (ident, reverse(ident)))
    missing = [a for a in (1, 2, 3) if not pi & MIDDLE_CLASSES[a]]
    if c == 1:
        sigma = _translation_onto_between(missing[0])
        translated = frozenset(compose_words(sigma, w) for w in pi)
        if translated & BETWEEN:
            raise AssertionError(f"translation by {sigma} left {sorted(translated)} meeting M_2")
        base = construct_nbet_system(n)
        return base if translated == NONBETWEEN else _doubled(base)
    # c == 2: pi lives inside a single middle class.
    present = next(a for a in (1, 2, 3) if pi & MIDDLE_CLASSES[a])
    sigma = _translation_onto_between(present)
    translated = frozenset(compose_words(sigma, w) for w in pi)
    if not translated <= BETWEEN:
        raise AssertionError(f"translation by {sigma} sent pi to {sorted(translated)}")
    base = construct_bet_system(n)
    return base if translated == BETWEEN else _doubled(base)


def etp_bounds(n: int, pi: PatternSet) -> BoundPair:
    """Bounds on the minimum pi-realising system size, by deficiency class."""
    _require_n(n)
    pi = parse_patterns(pi)
    if pi == ALL_PATTERNS:
        return BoundPair(1, 1)
    c = middle_class_deficiency(pi)
    if c == 0:
        return BoundPair(2, 2)
    if c == 1:
        if pi == NONBETWEEN:
            exact = nbet_exact(n)
            return BoundPair(exact, exact)
        ll = _ceil_log2_log2(n)
        return BoundPair(ll + 1, 2 * ll + 2)
    return BoundPair(_ceil_log2(n - 1) + 1, 4 * _ceil_log2(n))


def phylo_bounds(n: int) -> BoundPair:
    """Bounds on the minimum number of rooted binary trees covering all
    triplets.  Accepts arbitrarily large n (exact integer thresholds)."""
    _require_n(n)
    ll = _ceil_log2_log2(n)
    return BoundPair(ll + 1, 2 * ll + 2)
