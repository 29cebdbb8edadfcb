import json
import random

import numpy as np
import pytest

from ordercover.sequences import (
    CapacityError,
    PointSequence,
    build_tight_sequence,
    es_guarantee_check,
    has_monotone_of_length,
    longest_monotone_subsequence,
    random_permutation_grid,
    tight_sequence_size,
)

from oracles import brute_longest_monotone


def random_sequence_with_ties(n, d, rng):
    pts = tuple(tuple(rng.randint(1, 4) for _ in range(d)) for _ in range(n))
    return PointSequence(d, pts)


def test_base_case_values():
    seq = build_tight_sequence(2, 1)
    assert [p[0] for p in seq.points] == [2, 1, 4, 3]
    seq3 = build_tight_sequence(3, 1)
    assert [p[0] for p in seq3.points] == [3, 2, 1, 6, 5, 4, 9, 8, 7]


def test_single_point_case():
    for d in (1, 2, 3):
        seq = build_tight_sequence(1, d)
        assert len(seq) == 1 and seq.points[0] == (1,) * d
        assert not has_monotone_of_length(seq, 2)


def test_sizes_and_capacity_guard():
    assert tight_sequence_size(2, 4) == 65536
    assert tight_sequence_size(3, 2) == 81
    with pytest.raises(CapacityError):
        tight_sequence_size(2, 5)
    with pytest.raises(CapacityError):
        build_tight_sequence(4, 4)
    with pytest.raises(ValueError):
        build_tight_sequence(0, 1)
    with pytest.raises(ValueError):
        build_tight_sequence(2, 0)


@pytest.mark.parametrize("m,d", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_permutation_grid_invariant(m, d):
    seq = build_tight_sequence(m, d)
    assert len(seq) == tight_sequence_size(m, d)
    assert seq.is_permutation_grid()


@pytest.mark.parametrize("m,d", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_tightness(m, d):
    seq = build_tight_sequence(m, d)
    result = longest_monotone_subsequence(seq)
    assert result.length == m
    assert not has_monotone_of_length(seq, m + 1)
    assert has_monotone_of_length(seq, m)


def test_witness_is_a_real_monotone_subsequence():
    seq = build_tight_sequence(3, 2)
    length, indices, directions = longest_monotone_subsequence(seq)
    assert length == len(indices) == 3
    assert list(indices) == sorted(indices)
    pts = seq.points
    for k, sign in enumerate(directions):
        vals = [pts[i][k] * sign for i in indices]
        assert vals == sorted(vals)


def test_longest_trivial_cases():
    assert longest_monotone_subsequence(PointSequence(1, ())).length == 0
    inc = PointSequence(1, tuple((v,) for v in range(1, 11)))
    res = longest_monotone_subsequence(inc)
    assert res.length == 10 and res.directions == (1,)
    assert has_monotone_of_length(inc, 1)
    with pytest.raises(ValueError):
        has_monotone_of_length(inc, 0)


def test_any_five_reals_contain_a_monotone_triple():
    rng = random.Random(4)
    for _ in range(200):
        vals = [rng.randint(1, 30) for _ in range(5)]
        seq = PointSequence(1, tuple((v,) for v in vals))
        assert has_monotone_of_length(seq, 3)
        assert longest_monotone_subsequence(seq).length >= 3


def test_oracle_against_brute_force_small():
    # Exact agreement with subset enumeration, ties included.
    rng = random.Random(17)
    for trial in range(250):
        n = rng.randint(0, 8)
        d = rng.randint(1, 2)
        if trial % 2:
            seq = random_sequence_with_ties(n, d, rng)
        elif n:
            seq = random_permutation_grid(n, d, trial)
        else:
            seq = PointSequence(d, ())
        expected = brute_longest_monotone(seq.points)
        got = longest_monotone_subsequence(seq)
        assert got.length == expected
        for length in range(1, n + 2):
            assert has_monotone_of_length(seq, length) == (expected >= length)


def test_fast_triple_path_agrees_with_dp_on_permutation_grids():
    for trial in range(100):
        n = 3 + trial % 15
        d = 1 + trial % 4
        seq = random_permutation_grid(n, d, [99, trial])
        assert has_monotone_of_length(seq, 3) == (
            longest_monotone_subsequence(seq).length >= 3
        )


def test_single_coordinate_reversal_preserves_longest():
    rng = random.Random(8)
    for trial in range(50):
        n = rng.randint(1, 12)
        d = rng.randint(1, 3)
        seq = random_permutation_grid(n, d, [5, trial])
        k = rng.randrange(d)
        flipped = tuple(
            tuple(n + 1 - v if i == k else v for i, v in enumerate(p)) for p in seq.points
        )
        assert (
            longest_monotone_subsequence(PointSequence(d, flipped)).length
            == longest_monotone_subsequence(seq).length
        )


def test_guarantee_check_passes_and_is_deterministic():
    a = es_guarantee_check(2, 1, 100, 7)
    b = es_guarantee_check(2, 1, 100, 7)
    assert a == b and a.passed and a.n_points == 5
    c = es_guarantee_check(2, 2, 100, 7)
    assert c.passed and c.n_points == 17
    d = es_guarantee_check(3, 1, 100, 7)
    assert d.passed and d.n_points == 10
    with pytest.raises(ValueError):
        es_guarantee_check(2, 1, 0, 7)


def test_point_sequence_json_round_trip():
    seq = build_tight_sequence(2, 2)
    data = json.loads(json.dumps(seq.to_json_dict()))
    assert PointSequence.from_json_dict(data) == seq
    with pytest.raises(ValueError):
        PointSequence.from_json_dict({"d": 2})
    with pytest.raises(ValueError):
        PointSequence(2, ((1, 2), (3,)))


def test_to_array_shape():
    seq = build_tight_sequence(2, 2)
    arr = seq.to_array()
    assert arr.shape == (16, 2) and arr.dtype == np.int64
