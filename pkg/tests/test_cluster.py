"""Seed/matrix layer: mutation rules, y-variables, permutations."""

import random
from fractions import Fraction

import numpy as np
import pytest

from braidvol.cluster import (
    ClusterSeed,
    DegenerateSeedError,
    ExchangeMatrix,
    SingularYError,
    build_exchange_matrix,
    mutate,
    mutate_y,
    permute,
    scalar_close,
    y_from_x,
)
from conftest import rand_seed

B7_ROWS = [
    [0, 1, -1, 0, 0, 0, 0],
    [-1, 0, 0, 1, 0, 0, 0],
    [1, 0, 0, -1, 0, 0, 0],
    [0, -1, 1, 0, 1, -1, 0],
    [0, 0, 0, -1, 0, 0, 1],
    [0, 0, 0, 1, 0, 0, -1],
    [0, 0, 0, 0, -1, 1, 0],
]

# the ten-node matrix expanded by hand from the per-strand block rule
B10_ROWS = [
    [0, 1, -1, 0, 0, 0, 0, 0, 0, 0],
    [-1, 0, 0, 1, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, -1, 0, 0, 0, 0, 0, 0],
    [0, -1, 1, 0, 1, -1, 0, 0, 0, 0],
    [0, 0, 0, -1, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, -1, 0, 0, 0],
    [0, 0, 0, 0, -1, 1, 0, 1, -1, 0],
    [0, 0, 0, 0, 0, 0, -1, 0, 0, 1],
    [0, 0, 0, 0, 0, 0, 1, 0, 0, -1],
    [0, 0, 0, 0, 0, 0, 0, -1, 1, 0],
]


def ones_seed(n: int) -> ClusterSeed:
    return ClusterSeed((Fraction(1),) * (3 * n + 1), build_exchange_matrix(n))


def test_seven_node_matrix_golden():
    B = build_exchange_matrix(2)
    assert B.data.tolist() == B7_ROWS


def test_entries_and_skew():
    B = build_exchange_matrix(2)
    assert B.b(1, 2) == 1
    assert B.b(2, 1) == -1
    assert B.b(1, 1) == 0


def test_ten_node_matrix_matches_hand_expansion():
    assert build_exchange_matrix(3).data.tolist() == B10_ROWS


def test_ten_node_restricts_to_seven_node_window():
    B10 = build_exchange_matrix(3).data
    B7 = build_exchange_matrix(2).data
    assert np.array_equal(B10[:7, :7], B7)
    assert np.array_equal(B10[3:10, 3:10], B7)


def test_strand_count_validation():
    with pytest.raises(ValueError):
        build_exchange_matrix(1)
    with pytest.raises(ValueError):
        build_exchange_matrix(0)


def test_exchange_matrix_rejects_non_skew():
    with pytest.raises(ValueError):
        ExchangeMatrix(np.array([[0, 1], [1, 0]]))


def test_mutate_ones_at_four():
    out = mutate(ones_seed(2), 4)
    assert out.x == (1, 1, 1, 2, 1, 1, 1)


def test_matrix_mutation_at_four():
    B = build_exchange_matrix(2).mutated(4)
    assert B.b(2, 3) == 1  # 0 + (|1|*1 + 1*|1|)/2
    assert B.b(2, 4) == -1
    assert B.b(4, 2) == 1
    # untouched far block
    assert B.b(1, 2) == 1


def test_mutation_is_involutive_exact(rng):
    for _ in range(20):
        seed = rand_seed(rng, 2)
        k = rng.randint(1, 7)
        assert mutate(mutate(seed, k), k) == seed


def test_mutation_is_involutive_complex(rng):
    crng = np.random.default_rng(5)
    B = build_exchange_matrix(2)
    for _ in range(20):
        x = tuple(complex(a, b) for a, b in crng.normal(1, 0.3, (7, 2)))
        seed = ClusterSeed(x, B)
        k = int(crng.integers(1, 8))
        back = mutate(mutate(seed, k), k)
        assert all(
            scalar_close(a, b, rel_tol=1e-12) for a, b in zip(back.x, seed.x)
        )


def test_disconnected_mutations_commute(rng):
    B = build_exchange_matrix(2)
    pairs = [(j, k) for j in range(1, 8) for k in range(j + 1, 8) if B.b(j, k) == 0]
    assert pairs
    for j, k in pairs:
        seed = rand_seed(rng, 2)
        assert mutate(mutate(seed, j), k) == mutate(mutate(seed, k), j)


def test_mutation_preserves_skew(rng):
    seed = rand_seed(rng, 3)
    for k in (1, 4, 7, 10):
        seed = mutate(seed, k)
        data = seed.B.data
        assert np.array_equal(data.T, -data)


def test_laurent_positivity_smoke(rng):
    seed = rand_seed(rng, 2)
    for _ in range(40):
        seed = mutate(seed, rng.randint(1, 7))
        assert all(v > 0 for v in seed.x)


def test_mutate_zero_entry_rejected():
    seed = ClusterSeed((Fraction(1), Fraction(0)) + (Fraction(1),) * 5,
                       build_exchange_matrix(2))
    with pytest.raises(DegenerateSeedError) as err:
        mutate(seed, 2)
    assert err.value.index == 2


def test_mutate_index_bounds():
    with pytest.raises(IndexError):
        mutate(ones_seed(2), 8)
    with pytest.raises(IndexError):
        mutate(ones_seed(2), 0)


def test_y_from_x_ones():
    assert y_from_x(ones_seed(2)) == (1,) * 7


def test_y_from_x_column_four_monomial():
    # distinct primes make the monomial structure visible: y4 = x2 x6 / (x3 x5)
    x = tuple(Fraction(p) for p in (2, 3, 5, 7, 11, 13, 17))
    y = y_from_x(ClusterSeed(x, build_exchange_matrix(2)))
    assert y[3] == Fraction(3 * 13, 5 * 11)


def test_y_from_x_zero_entry():
    seed = ClusterSeed((Fraction(1),) * 6 + (Fraction(0),), build_exchange_matrix(2))
    with pytest.raises(DegenerateSeedError):
        y_from_x(seed)


def test_y_mutation_ones_at_four():
    B = build_exchange_matrix(2)
    y, Bm = mutate_y((Fraction(1),) * 7, B, 4)
    assert y == (1, 2, Fraction(1, 2), 1, Fraction(1, 2), 2, 1)
    assert Bm == B.mutated(4)


def test_y_mutation_involutive(rng):
    B = build_exchange_matrix(2)
    for _ in range(20):
        y0 = tuple(Fraction(rng.randint(1, 50), rng.randint(1, 50)) for _ in range(7))
        k = rng.randint(1, 7)
        y1, B1 = mutate_y(y0, B, k)
        y2, B2 = mutate_y(y1, B1, k)
        assert y2 == y0 and B2 == B


def test_y_mutation_commutes_with_y_from_x(rng):
    # fifty random rational seeds: y_from_x(mutate(s, k)) == mutate_y(y_from_x(s), k)
    for _ in range(50):
        seed = rand_seed(rng, 2)
        k = rng.randint(1, 7)
        lhs = y_from_x(mutate(seed, k))
        rhs, _ = mutate_y(y_from_x(seed), seed.B, k)
        assert lhs == rhs


def test_y_mutation_singular_values():
    B = build_exchange_matrix(2)
    with pytest.raises(SingularYError):
        mutate_y((Fraction(0),) + (Fraction(1),) * 6, B, 1)
    with pytest.raises(SingularYError):
        mutate_y((Fraction(-1),) + (Fraction(1),) * 6, B, 1)


def test_permute_involution_and_swap(rng):
    seed = ClusterSeed(tuple(Fraction(i) for i in range(1, 8)), build_exchange_matrix(2))
    swapped = permute(seed, 3, 5)
    assert swapped.x == (1, 2, 5, 4, 3, 6, 7)
    assert permute(swapped, 3, 5) == seed
    data = swapped.B.data
    assert np.array_equal(data.T, -data)


def test_immutability():
    B = build_exchange_matrix(2)
    with pytest.raises(ValueError):
        B.data[0, 1] = 5
