"""Braid words, the braiding operators, and cluster trajectories."""

import json
from fractions import Fraction

import pytest

from braidvol.braid import (
    BraidParseError,
    BraidWord,
    MultiComponentError,
    apply_R_closed,
    apply_R_comp,
    apply_R_y,
    parse_braid,
    run_pattern,
    window_center,
)
from braidvol.cluster import (
    ClusterSeed,
    DegenerateSeedError,
    build_exchange_matrix,
    mutate,
    y_from_x,
)
from conftest import rand_fraction, rand_seed, rand_vector

ONES7 = (Fraction(1),) * 7


def seed7(x):
    return ClusterSeed(tuple(x), build_exchange_matrix(2))


# ---------------------------------------------------------------------------
# parsing


def test_parse_figure_eight():
    b = parse_braid("1 -2 1 -2")
    assert b.n == 3
    assert b.letters == ((1, 1), (2, -1), (1, 1), (2, -1))


def test_parse_trefoil():
    b = parse_braid("1 1 1")
    assert b.n == 2
    assert b.letters == ((1, 1),) * 3


def test_parse_zero_letter_position():
    with pytest.raises(BraidParseError) as err:
        parse_braid("0 2")
    assert err.value.position == 1


def test_parse_non_integer_position():
    with pytest.raises(BraidParseError) as err:
        parse_braid("1 x1")
    assert err.value.position == 2


def test_parse_strand_prefix():
    b = parse_braid("n=4; 1 -2 1 -2 3")
    assert b.n == 4


def test_parse_generator_out_of_range():
    with pytest.raises(BraidParseError):
        parse_braid("n=2; 2")
    with pytest.raises(BraidParseError):
        parse_braid("3", n=3)


def test_multi_component_closures_rejected():
    with pytest.raises(MultiComponentError):
        parse_braid("1 1")  # two-component closure on two strands
    with pytest.raises(MultiComponentError):
        parse_braid("n=3; 1 1 1")  # trefoil plus a split circle


def test_single_letter_is_trivial_unknot():
    b = parse_braid("1")
    assert b.closure_components() == 1
    assert b.trivially_unknotted
    assert not parse_braid("1 1 1").trivially_unknotted


def test_empty_word_single_strand():
    b = parse_braid("")
    assert b.n == 1 and b.letters == ()


# ---------------------------------------------------------------------------
# braiding operators


def test_r_comp_on_ones():
    out = apply_R_comp(seed7(ONES7), 1, 1)
    assert out.x == (1, 1, 3, 5, 3, 1, 1)
    assert out.B == build_exchange_matrix(2)


def test_r_closed_on_ones_both_signs():
    assert apply_R_closed(ONES7, 1, 1) == (1, 1, 3, 5, 3, 1, 1)
    assert apply_R_closed(ONES7, 1, -1) == (1, 3, 1, 5, 1, 3, 1)


def test_r_inverse_round_trip(rng):
    for _ in range(10):
        seed = rand_seed(rng, 2)
        assert apply_R_comp(apply_R_comp(seed, 1, 1), 1, -1) == seed
        x = rand_vector(rng, 2)
        assert apply_R_closed(apply_R_closed(x, 1, -1), 1, 1) == x


def test_closed_matches_comp(rng):
    for n in (2, 3):
        for _ in range(25):
            seed = rand_seed(rng, n)
            for i in range(1, n):
                for eps in (1, -1):
                    assert apply_R_closed(seed.x, i, eps) == apply_R_comp(seed, i, eps).x


def test_window_pass_through(rng):
    x = rand_vector(rng, 4)
    for eps in (1, -1):
        out = apply_R_closed(x, 2, eps)
        assert out[:3] == x[:3]
        assert out[10:] == x[10:]
        # window edges are fixed as well
        assert out[3] == x[3] and out[9] == x[9]


def test_degenerate_window_raises_with_index():
    x = (Fraction(1), Fraction(0)) + (Fraction(1),) * 5
    with pytest.raises(DegenerateSeedError) as err:
        apply_R_closed(x, 1, 1)
    assert err.value.index == 2


def test_window_center_is_first_mutation_output(rng):
    for eps in (1, -1):
        seed = rand_seed(rng, 2)
        assert window_center(seed.x, 1) == mutate(seed, 4).x[3]


def test_r_y_on_ones():
    out = apply_R_y(ONES7, None, 1, 1)
    assert out == (3, Fraction(1, 5), 5, Fraction(1, 9), 5, Fraction(1, 5), 3)


def test_r_y_round_trip(rng):
    for _ in range(10):
        y = rand_vector(rng, 2)
        assert apply_R_y(apply_R_y(y, None, 1, 1), None, 1, -1) == y


def test_r_y_matches_x_action(rng):
    B = build_exchange_matrix(2)
    for eps in (1, -1):
        for _ in range(15):
            seed = rand_seed(rng, 2)
            lhs = y_from_x(ClusterSeed(apply_R_closed(seed.x, 1, eps), B))
            rhs = apply_R_y(y_from_x(seed), B, 1, eps)
            assert lhs == rhs


def test_homogeneity_degree_one(rng):
    for eps in (1, -1):
        x = rand_vector(rng, 2)
        lam = rand_fraction(rng)
        scaled = tuple(lam * v for v in x)
        assert apply_R_closed(scaled, 1, eps) == tuple(
            lam * v for v in apply_R_closed(x, 1, eps)
        )


# ---------------------------------------------------------------------------
# trajectories


def test_empty_pattern_echoes_seed():
    b = parse_braid("", n=1)
    x0 = (Fraction(1), Fraction(2), Fraction(3), Fraction(4))
    traj = run_pattern(b, x0)
    assert traj.seeds == (x0,)
    assert traj.centers == ()
    assert traj.residual() == (0, 0, 0, 0)


def test_pattern_records_centers(rng):
    b = parse_braid("1 -2 1 -2")
    x0 = rand_vector(rng, 3)
    traj = run_pattern(b, x0)
    assert len(traj.seeds) == 5
    assert len(traj.centers) == 4
    for j, (i, _eps) in enumerate(b.letters):
        assert traj.centers[j] == window_center(traj.seeds[j], i)


def test_pattern_length_mismatch():
    with pytest.raises(ValueError):
        run_pattern(parse_braid("1 1 1"), (Fraction(1),) * 10)


def test_pattern_degenerate_step_reports_position():
    b = parse_braid("1 1 1")
    x0 = (Fraction(1), Fraction(0)) + (Fraction(1),) * 5
    with pytest.raises(DegenerateSeedError) as err:
        run_pattern(b, x0)
    assert "step 1" in str(err.value)


def test_trajectory_json_round_trip():
    b = parse_braid("1 1 1")
    x0 = tuple(complex(k, -k) for k in range(1, 8))
    doc = run_pattern(b, x0).to_json_dict()
    text = json.dumps(doc)
    back = json.loads(text)
    assert back["n"] == 2
    assert len(back["seeds"]) == 4
    assert back["seeds"][0][0] == [1.0, -1.0]
    assert all(len(pair) == 2 for seed in back["seeds"] for pair in seed)


def test_braid_word_validation():
    with pytest.raises(BraidParseError):
        BraidWord(n=3, letters=((3, 1),))
    with pytest.raises(BraidParseError):
        BraidWord(n=3, letters=((1, 2),))
