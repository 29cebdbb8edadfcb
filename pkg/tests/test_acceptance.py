"""Acceptance suite: every criterion at its stated tolerance, one printed
pass/fail line each (run with ``pytest tests/test_acceptance.py -v -s``)."""

import random
import time
from contextlib import contextmanager
from itertools import combinations, permutations

from ordercover.core import (
    BETWEEN,
    MIDDLE_CLASSES,
    NONBETWEEN,
    S3_WORDS,
    Ordering,
    middle_class_deficiency,
    relative_order,
    verify_system,
)
from ordercover.constructions import (
    bet_bounds,
    construct_bet_system,
    construct_etp_system,
    construct_nbet_system,
    etp_bounds,
    nbet_exact,
    phylo_bounds,
)
from ordercover.search import minimal_size_table, verify_reference_witnesses
from ordercover.sequences import (
    PointSequence,
    build_tight_sequence,
    es_guarantee_check,
    has_monotone_of_length,
    longest_monotone_subsequence,
    random_permutation_grid,
)
from ordercover.phylo import (
    caterpillar_from_ordering,
    construct_ept_set,
    enumerate_triplets,
    is_consistent,
    nbet_from_trees,
    verify_ept,
)

from oracles import all_topologies, brute_consistent, brute_longest_monotone
from test_phylo import from_tuple_tree


@contextmanager
def criterion(num, description):
    start = time.monotonic()
    try:
        yield
    except Exception:
        print(f"[criterion {num:2d}] FAIL - {description}")
        raise
    elapsed = time.monotonic() - start
    print(f"[criterion {num:2d}] PASS - {description} ({elapsed:.1f}s)")


def test_criterion_01_small_value_table():
    with criterion(1, "minimum sizes for n=3..7 reproduced, minima proven"):
        start = time.monotonic()
        table = minimal_size_table()
        elapsed = time.monotonic() - start
        assert table.bet == (3, 4, 5, 5, 5)
        assert table.nbet == (2, 2, 3, 3, 3)
        assert table.bet_method[:3] == ("exhausted-strata",) * 3
        assert table.nbet_method[:3] == ("exhausted-strata",) * 3
        assert table.bet_method[3:] == ("monotone+witness",) * 2
        assert table.nbet_method[3:] == ("monotone+witness",) * 2
        assert elapsed < 60.0


def test_criterion_02_nonbetweenness_at_scale():
    with criterion(2, "nonbetweenness construction exact sizes, zero violations"):
        start = time.monotonic()
        for n in (4, 16, 256):
            system = construct_nbet_system(n)
            assert system.size == nbet_exact(n)
            assert verify_system(system, NONBETWEEN).passed
        assert time.monotonic() - start < 10.0
        big = construct_nbet_system(65536)
        assert big.size == 5
        report = verify_system(big, NONBETWEEN, sample=10**6, seed=20260810)
        assert report.violation_total == 0 and report.checked == 10**6


def test_criterion_03_betweenness_at_scale():
    with criterion(3, "betweenness construction size 2k, exhaustive pass for k=2..8"):
        start = time.monotonic()
        for k in range(2, 9):
            system = construct_bet_system(2**k)
            assert system.size == 2 * k
            assert verify_system(system, BETWEEN).passed
        assert time.monotonic() - start < 60.0


def test_criterion_04_tight_sequence_extremality():
    with criterion(4, "tight sequences have no longer monotone subsequence"):
        for d in (1, 2, 3):
            assert longest_monotone_subsequence(build_tight_sequence(2, d)).length == 2
        big = build_tight_sequence(2, 4)
        assert len(big) == 65536
        assert not has_monotone_of_length(big, 3)
        assert has_monotone_of_length(big, 2)
        assert longest_monotone_subsequence(build_tight_sequence(3, 1)).length == 3
        assert longest_monotone_subsequence(build_tight_sequence(3, 2)).length == 3


def test_criterion_05_guarantee_property_suite():
    with criterion(5, "1000 random sequences of m^(2^d)+1 points each contain m+1"):
        for m, d in ((2, 1), (2, 2), (3, 1)):
            report = es_guarantee_check(m, d, trials=1000, seed=1234)
            assert report.passed, (m, d, report.failures)


def test_criterion_06_pattern_set_sweep():
    with criterion(6, "all 62 pattern sets: deficiency class, verification, bounds"):
        start = time.monotonic()
        subsets = [
            frozenset(c) for r in range(1, 6) for c in combinations(S3_WORDS, r)
        ]
        assert len(subsets) == 62
        # Independent classification from the definition.
        by_class = {0: set(), 1: set(), 2: set()}
        for pi in subsets:
            missing = sum(1 for a in (1, 2, 3) if not pi & MIDDLE_CLASSES[a])
            by_class[missing].add(pi)
            assert middle_class_deficiency(pi) == missing
        assert len(by_class[0]) == 26 and len(by_class[1]) == 27 and len(by_class[2]) == 9
        singletons = {pi for pi in by_class[2] if len(pi) == 1}
        pairs = {pi for pi in by_class[2] if len(pi) == 2}
        assert len(singletons) == 6 and len(pairs) == 3
        assert pairs == {frozenset(cls) for cls in MIDDLE_CLASSES.values()}
        for pi in subsets:
            for n in (8, 16, 64):
                system = construct_etp_system(n, pi)
                bounds = etp_bounds(n, pi)
                assert bounds.lower <= system.size <= bounds.upper, (sorted(pi), n)
                assert verify_system(system, pi).passed, (sorted(pi), n)
        assert time.monotonic() - start < 300.0


def test_criterion_07_reference_witnesses():
    with criterion(7, "explicit n=3, n=4, n=7 betweenness witnesses verify"):
        report = verify_reference_witnesses()
        assert report.passed
        assert {c.n: c.system.size for c in report.checks} == {3: 3, 4: 4, 7: 5}


def test_criterion_08_tree_cover_pipeline():
    with criterion(8, "tree covers verify, feed back to nonbetweenness, bound 18"):
        for n in (4, 8, 16, 64):
            ts = construct_ept_set(n)
            assert ts.size <= 2 * (nbet_exact(n) - 1) + 2
            assert verify_ept(ts).passed
            assert verify_system(nbet_from_trees(ts), NONBETWEEN).passed
        assert phylo_bounds(10**50).upper == 18


def test_criterion_09a_consistency_oracle_equivalence():
    with criterion(9, "(a) meet-depth criterion equals path-intersection oracle"):
        for n in range(3, 7):
            for shape in all_topologies(range(1, n + 1)):
                tree = from_tuple_tree(shape)
                for a, b, c in enumerate_triplets(n):
                    assert is_consistent(tree, (a, b, c)) == brute_consistent(
                        shape, a, b, c
                    ), (shape, (a, b, c))


def test_criterion_09b_caterpillar_pattern_equivalence():
    with criterion(9, "(b) caterpillar consistency equals the {123,132} word test"):
        for n in range(3, 7):
            for tup in permutations(range(1, n + 1)):
                phi = Ordering(tup)
                cat = caterpillar_from_ordering(phi)
                for c in permutations(range(1, n + 1), 3):
                    assert is_consistent(cat, c) == (
                        relative_order(phi, c) in {"123", "132"}
                    ), (tup, c)


def test_criterion_09c_monotone_oracle_equivalence():
    with criterion(9, "(c) chain DP equals brute-force subsequence enumeration"):
        rng = random.Random(20260810)
        for trial in range(200):
            n = rng.randint(0, 8)
            d = rng.randint(1, 2)
            if trial % 2 and n:
                seq = random_permutation_grid(n, d, [7, trial])
            else:
                pts = tuple(
                    tuple(rng.randint(1, 5) for _ in range(d)) for _ in range(n)
                )
                seq = PointSequence(d, pts)
            expected = brute_longest_monotone(seq.points)
            assert longest_monotone_subsequence(seq).length == expected
            for length in (2, 3, 4):
                assert has_monotone_of_length(seq, length) == (expected >= length)


def test_criterion_10_bounds_sandwich():
    with criterion(10, "lower <= achieved <= upper at every tested size"):
        table = minimal_size_table()
        for n, bet_val, nbet_val in zip(table.ns, table.bet, table.nbet):
            bb = bet_bounds(n)
            assert bb.lower <= bet_val <= bb.upper
            assert bet_val == bb.exact
            assert nbet_val == nbet_exact(n)
        for n in (4, 16, 256, 65536):
            assert construct_nbet_system(n).size == nbet_exact(n)
        for k in range(2, 9):
            n = 2**k
            bb = bet_bounds(n)
            assert bb.lower <= construct_bet_system(n).size <= bb.upper
        for pi_words in (("123",), ("132", "213"), ("123", "213", "132")):
            pi = frozenset(pi_words)
            for n in (8, 16, 64):
                bounds = etp_bounds(n, pi)
                assert bounds.lower <= construct_etp_system(n, pi).size <= bounds.upper
