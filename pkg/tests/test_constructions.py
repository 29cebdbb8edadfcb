import random
from itertools import combinations

import pytest

from ordercover.core import (
    BETWEEN,
    NONBETWEEN,
    S3_WORDS,
    ALL_PATTERNS,
    restrict_system,
    verify_system,
)
from ordercover.constructions import (
    BoundPair,
    bet_bounds,
    construct_bet_system,
    construct_etp_system,
    construct_nbet_system,
    etp_bounds,
    nbet_exact,
    phylo_bounds,
    _rotation_separators,
)
from ordercover.sequences import CapacityError

ALL_PROPER_SUBSETS = [
    frozenset(c) for r in range(1, 6) for c in combinations(S3_WORDS, r)
]


def test_bound_pair_validation():
    assert BoundPair(3, 3).exact == 3
    assert BoundPair(2, 5).exact is None
    assert BoundPair(2, 5, 4).exact == 4
    with pytest.raises(ValueError):
        BoundPair(5, 2)
    with pytest.raises(ValueError):
        BoundPair(2, 5, 6)
    assert BoundPair(1, 2).to_json_dict() == {"lower": 1, "upper": 2, "exact": None}


# --- nonbetweenness ---------------------------------------------------------


def test_nbet_exact_values():
    assert nbet_exact(3) == 2
    assert nbet_exact(4) == 2
    assert nbet_exact(5) == 3
    assert nbet_exact(16) == 3
    assert nbet_exact(17) == 4
    assert nbet_exact(256) == 4
    assert nbet_exact(65536) == 5
    with pytest.raises(ValueError):
        nbet_exact(2)


def test_nbet_exact_threshold_table():
    # Float-free piecewise check: value is d+1 on (2^(2^(d-1)), 2^(2^d)].
    thresholds = [2, 4, 16, 256, 65536, 2**32]
    probes = set()
    for t in thresholds:
        probes.update({t - 1, t, t + 1})
    probes.update(range(3, 70))
    rng = random.Random(0)
    probes.update(rng.randint(3, 2**20) for _ in range(200))
    for n in sorted(p for p in probes if 3 <= p <= 2**20):
        d = next(i for i, t in enumerate(thresholds) if n <= t)
        assert nbet_exact(n) == d + 1, n


def test_nbet_exact_is_non_decreasing():
    values = [nbet_exact(n) for n in range(3, 600)]
    assert values == sorted(values)


def test_construct_nbet_small_example():
    sys4 = construct_nbet_system(4)
    assert sys4.member_set() == {(1, 2, 3, 4), (2, 1, 4, 3)}


@pytest.mark.parametrize("n", [3, 4, 5, 9, 16, 17, 40, 64])
def test_construct_nbet_is_tight_and_valid(n):
    system = construct_nbet_system(n)
    assert system.size == nbet_exact(n)
    assert verify_system(system, NONBETWEEN).passed


def test_construct_nbet_capacity():
    with pytest.raises(CapacityError):
        construct_nbet_system(65537)


# --- betweenness ------------------------------------------------------------


def test_bet_bounds_examples():
    assert bet_bounds(7) == BoundPair(4, 6, 5)
    assert bet_bounds(4) == BoundPair(3, 4, 4)
    assert bet_bounds(1024) == BoundPair(11, 20, None)
    assert bet_bounds(3) == BoundPair(2, 4, 3)


def test_construct_bet_small_example():
    sys4 = construct_bet_system(4)
    assert [phi.tuple_form for phi in sys4.orderings] == [
        (1, 3, 2, 4),
        (2, 4, 1, 3),
        (1, 2, 3, 4),
        (3, 4, 1, 2),
    ]


@pytest.mark.parametrize("k", range(2, 11))
def test_construct_bet_power_sizes(k):
    assert construct_bet_system(2**k).size == 2 * k


@pytest.mark.parametrize("n", [3, 4, 5, 6, 8, 12, 16, 27, 32, 50, 64])
def test_construct_bet_verifies_and_respects_bounds(n):
    system = construct_bet_system(n)
    bounds = bet_bounds(n)
    assert bounds.lower <= system.size <= bounds.upper
    assert verify_system(system, BETWEEN).passed


@pytest.mark.parametrize("k", range(2, 9))
def test_rotation_separators_split_every_pair(k):
    seps = _rotation_separators(k)
    assert len(seps) == k
    half = 1 << (k - 1)
    big = 1 << k
    for x in range(1, big + 1):
        for y in range(x + 1, big + 1):
            assert any(
                (s.position_of(x) <= half) != (s.position_of(y) <= half) for s in seps
            ), (x, y)


# --- general pattern sets -----------------------------------------------------


def test_etp_full_set_is_singleton_identity():
    system = construct_etp_system(7, ALL_PATTERNS)
    assert system.member_set() == {tuple(range(1, 8))}
    assert etp_bounds(7, ALL_PATTERNS) == BoundPair(1, 1, 1)


def test_etp_deficiency_zero_pairs():
    pi = frozenset({"123", "213", "132"})
    for n in (3, 5, 12):
        system = construct_etp_system(n, pi)
        assert system.size == 2
        assert verify_system(system, pi).passed
    assert etp_bounds(9, pi) == BoundPair(2, 2, 2)


def test_etp_examples_from_each_class():
    system = construct_etp_system(16, frozenset({"132", "213"}))
    assert system.size <= 6
    assert verify_system(system, frozenset({"132", "213"})).passed

    system = construct_etp_system(16, frozenset({"123"}))
    assert system.size <= 16
    assert verify_system(system, frozenset({"123"})).passed


def test_etp_nonbetween_specialisation_is_undoubled():
    system = construct_etp_system(256, NONBETWEEN)
    assert system.size == nbet_exact(256) == 4
    assert etp_bounds(256, NONBETWEEN) == BoundPair(4, 4, 4)


def test_etp_between_specialisation_is_undoubled():
    system = construct_etp_system(16, BETWEEN)
    assert system.size == 8
    assert verify_system(system, BETWEEN).passed


def test_etp_bounds_examples():
    assert etp_bounds(9, frozenset({"321"})) == BoundPair(4, 16, None)
    pair = etp_bounds(16, frozenset({"132", "213"}))
    assert (pair.lower, pair.upper) == (3, 6)
    with pytest.raises(ValueError):
        etp_bounds(9, frozenset())
    with pytest.raises(ValueError):
        construct_etp_system(9, frozenset())


def test_etp_sweep_small():
    # Every nonempty proper pattern set, constructed and verified at n = 8.
    for pi in ALL_PROPER_SUBSETS:
        system = construct_etp_system(8, pi)
        bounds = etp_bounds(8, pi)
        assert bounds.lower <= system.size <= bounds.upper, sorted(pi)
        assert verify_system(system, pi).passed, sorted(pi)


def test_large_constructions_pass_sampled_verification():
    # 10^6 seeded draws, zero violations, at the largest supported sizes.
    big_bet = construct_bet_system(2**16)
    assert big_bet.size == 32
    report = verify_system(big_bet, BETWEEN, sample=10**6, seed=161616)
    assert report.passed and report.checked == 10**6
    pi = frozenset({"132", "213"})
    big_etp = construct_etp_system(2**16, pi)
    assert verify_system(big_etp, pi, sample=10**6, seed=161617).passed


def test_restriction_preserves_membership():
    rng = random.Random(77)
    for _ in range(10):
        n = rng.randint(5, 24)
        m = rng.randint(3, n - 1)
        assert verify_system(restrict_system(construct_bet_system(n), m), BETWEEN).passed
        assert verify_system(
            restrict_system(construct_nbet_system(n), m), NONBETWEEN
        ).passed
    pi = frozenset({"123", "132"})
    assert verify_system(restrict_system(construct_etp_system(20, pi), 9), pi).passed


# --- tree-cover bounds --------------------------------------------------------


def test_phylo_bounds_values():
    assert phylo_bounds(10**50).upper == 18
    assert phylo_bounds(4) == BoundPair(2, 4, None)
    assert phylo_bounds(2**16) == BoundPair(5, 10, None)
    assert phylo_bounds(3) == BoundPair(2, 4, None)


def test_phylo_bounds_accepts_huge_n():
    pair = phylo_bounds(10**1000)
    assert pair.lower >= 12 and pair.upper == 2 * (pair.lower - 1) + 2
