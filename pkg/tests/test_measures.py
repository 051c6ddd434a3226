import itertools
import json
import math
import random
from fractions import Fraction

import pytest

from loiqif import (
    Distribution,
    Domain,
    DomainMismatchError,
    InvalidDistributionError,
    Partition,
    bottom,
    capacity_achieving_distribution,
    channel_capacity,
    conditional_entropy,
    conditional_mutual_information,
    entropy,
    expected_guesses,
    ge_leakage,
    ge_prime,
    guess_prob,
    joint_entropy,
    kernel,
    me_leakage,
    me_prime,
    measure_report,
    meet,
    mutual_information,
    shannon_distance,
    top,
)
from loiqif.measures import (
    distribution_from_json,
    distribution_to_json,
    format_real,
    ge_leakage_direct,
    me_leakage_direct,
    measure_report_to_json,
    one_try_gain,
)

from helpers import (
    all_partitions,
    conditional_entropy_oracle,
    entropy_oracle,
    expected_guesses_oracle,
    guess_prob_oracle,
    random_partition,
)

TOL = 1e-9

D4 = Domain([0, 1, 2, 3])
U4 = Distribution.uniform(D4)
M1 = Partition(D4, [[1], [0, 2, 3]])   # reveals whether the secret is 1
M2 = top(D4)                           # reveals everything

D1234 = Domain([1, 2, 3, 4])
A = Partition(D1234, [[1, 2], [3, 4]])
B = Partition(D1234, [[1, 3], [2, 4]])
U1234 = Distribution.uniform(D1234)


# ---------------------------------------------------------------------------
# Distribution

def test_distribution_requires_exact_unit_mass():
    with pytest.raises(InvalidDistributionError, match="off from 1 by 1/8"):
        Distribution(D4, {0: "1/4", 1: "1/4", 2: "1/4", 3: "1/8"})


def test_distribution_rejects_negative_and_foreign_and_missing():
    with pytest.raises(InvalidDistributionError, match="negative"):
        Distribution(D4, {0: Fraction(3, 2), 1: Fraction(-1, 2), 2: 0, 3: 0})
    with pytest.raises(InvalidDistributionError, match="unknown atom"):
        Distribution(D4, {0: 1, 1: 0, 2: 0, 3: 0, 9: 0})
    with pytest.raises(InvalidDistributionError, match="no mass entry"):
        Distribution(D4, {0: 1, 1: 0, 2: 0})


def test_from_weights_normalizes_exactly():
    mu = Distribution.from_weights(D4, [1, 2, 3, 2])
    assert mu[2] == Fraction(3, 8)
    assert sum(mu.mass.values()) == 1


def test_uniform_on_support():
    mu = Distribution.uniform_on(D4, [1, 3])
    assert mu[1] == mu[3] == Fraction(1, 2) and mu[0] == mu[2] == 0


def test_random_distribution_is_seeded_and_exact():
    a = Distribution.random(D4, random.Random(7))
    b = Distribution.random(D4, random.Random(7))
    assert a == b
    assert sum(a.mass.values()) == 1


def test_distribution_json_round_trip():
    mu = Distribution(D4, {0: "1/16", 1: "3/8", 2: "9/16", 3: "0"})
    obj = distribution_to_json(mu)
    assert obj["mass"]["1"] == "3/8"
    assert distribution_from_json(obj) == mu


def test_distribution_json_reports_exact_deficit():
    obj = {"domain": [0, 1], "mass": {"0": "1/3", "1": "1/3"}}
    with pytest.raises(InvalidDistributionError, match="1/3"):
        distribution_from_json(obj)


# ---------------------------------------------------------------------------
# Entropy family

def test_entropy_of_one_bit_reveal():
    assert entropy(M1, U4) == pytest.approx(0.8112781244591328, abs=1e-3)


def test_entropy_extremes():
    assert entropy(bottom(D4), Distribution.from_weights(D4, [5, 1, 1, 1])) == 0.0
    assert entropy(M2, U4) == pytest.approx(2.0, abs=TOL)


def test_entropy_matches_oracle_on_random_inputs():
    rng = random.Random(99)
    for size in (2, 3, 5, 7):
        d = Domain(range(size))
        for _ in range(20):
            x = random_partition(d, rng)
            mu = Distribution.random(d, rng)
            assert entropy(x, mu) == pytest.approx(entropy_oracle(x, mu), abs=TOL)


def test_conditional_entropy_of_coarsening_is_zero():
    coarse = Partition(D4, [[0, 1], [2, 3]])
    fine = Partition(D4, [[0], [1], [2, 3]])
    assert conditional_entropy(coarse, fine, U4) == 0.0


def test_independent_partitions_have_zero_mutual_information():
    d = Domain([(i, j) for i in range(2) for j in range(2)])
    mu = Distribution.uniform(d)
    x = kernel(d, lambda a: a[0])
    y = kernel(d, lambda a: a[1])
    assert abs(mutual_information(x, y, mu)) <= TOL
    assert conditional_entropy(x, y, mu) == pytest.approx(entropy(x, mu), abs=TOL)


def test_joint_entropy_worked_values():
    assert joint_entropy(A, B, U1234) == pytest.approx(2.0, abs=TOL)
    assert entropy(A, U1234) == pytest.approx(1.0, abs=TOL)
    assert entropy(B, U1234) == pytest.approx(1.0, abs=TOL)
    assert entropy(meet(A, B), U1234) == 0.0
    # the weakened inclusion-exclusion inequality is tight here
    assert joint_entropy(A, B, U1234) == pytest.approx(
        entropy(A, U1234) + entropy(B, U1234) - entropy(meet(A, B), U1234), abs=TOL)


def test_conditional_entropy_matches_oracle():
    rng = random.Random(5)
    d = Domain(range(5))
    for _ in range(25):
        x, y = random_partition(d, rng), random_partition(d, rng)
        mu = Distribution.random(d, rng)
        assert conditional_entropy(x, y, mu) == pytest.approx(
            conditional_entropy_oracle(x, y, mu), abs=1e-7)


def test_mutual_information_identity_and_meet_bound():
    rng = random.Random(8)
    d = Domain(range(5))
    for _ in range(25):
        x, y = random_partition(d, rng), random_partition(d, rng)
        mu = Distribution.random(d, rng)
        mi = mutual_information(x, y, mu)
        assert mi == pytest.approx(
            entropy(x, mu) + entropy(y, mu) - joint_entropy(x, y, mu), abs=1e-7)
        # what the two observations agree on is shared information
        assert entropy(meet(x, y), mu) <= mi + TOL


def test_conditional_mutual_information_symmetry():
    rng = random.Random(6)
    d = Domain(range(5))
    for _ in range(15):
        x, y, z = (random_partition(d, rng) for _ in range(3))
        mu = Distribution.random(d, rng, zero_chance=0.0)
        lhs = conditional_mutual_information(x, y, z, mu)
        rhs = conditional_mutual_information(y, x, z, mu)
        assert lhs == pytest.approx(rhs, abs=1e-7)
        assert lhs >= -TOL


# ---------------------------------------------------------------------------
# Guessing measures

def test_two_try_guessing_worked_example():
    d = Domain(["x1", "x2", "x3", "x4", "x5", "x6"])
    x = Partition(d, [["x1", "x2", "x3", "x4"], ["x5", "x6"]])
    mu = Distribution(d, {"x1": "1/16", "x2": "1/16", "x3": "1/16",
                          "x4": "1/16", "x5": "3/8", "x6": "3/8"})
    assert guess_prob(x, mu, 2) == Fraction(7, 8)


def test_guess_prob_saturates_at_largest_block():
    mu = Distribution.from_weights(D4, [1, 2, 3, 4])
    x = Partition(D4, [[0, 1], [2, 3]])
    assert guess_prob(x, mu, 2) == 1
    assert guess_prob(x, mu, 9) == 1
    assert guess_prob(top(D4), mu, 1) == 1


def test_guess_prob_rejects_zero_tries():
    with pytest.raises(ValueError):
        guess_prob(M1, U4, 0)


def test_guess_prob_matches_best_subset_oracle():
    rng = random.Random(17)
    d = Domain(range(6))
    for _ in range(25):
        x = random_partition(d, rng)
        mu = Distribution.random(d, rng)
        for n in (1, 2, 3):
            assert guess_prob(x, mu, n) == guess_prob_oracle(x, mu, n)


def test_expected_guesses_worked_examples():
    d = Domain(["a", "b", "c", "d"])
    mu = Distribution(d, {"a": "1/2", "b": "1/4", "c": "1/8", "d": "1/8"})
    assert expected_guesses(bottom(d), mu) == Fraction(15, 8)
    assert expected_guesses(Partition(d, [["a", "d"], ["b", "c"]]), mu) == Fraction(10, 8)
    assert expected_guesses(top(d), mu) == 1


def test_expected_guesses_matches_best_order_oracle():
    rng = random.Random(23)
    d = Domain(range(5))
    for _ in range(25):
        x = random_partition(d, rng)
        mu = Distribution.random(d, rng)
        assert expected_guesses(x, mu) == expected_guesses_oracle(x, mu)


def test_tie_order_between_equal_masses_is_irrelevant():
    d1 = Domain(["a", "b", "c", "d"])
    d2 = Domain(["a", "c", "b", "d"])   # equal-mass atoms b, c swapped
    mass = {"a": Fraction(1, 3), "b": Fraction(1, 6),
            "c": Fraction(1, 6), "d": Fraction(1, 3)}
    mu1, mu2 = Distribution(d1, mass), Distribution(d2, mass)
    x1 = Partition(d1, [["a", "b", "c"], ["d"]])
    x2 = Partition(d2, [["a", "b", "c"], ["d"]])
    for n in (1, 2, 3):
        assert guess_prob(x1, mu1, n) == guess_prob(x2, mu2, n)
    assert expected_guesses(x1, mu1) == expected_guesses(x2, mu2)
    assert ge_prime(x1, mu1) == ge_prime(x2, mu2)


# ---------------------------------------------------------------------------
# Leakage measures (two-bit uniform reference values)

def test_me_leakage_reference_values():
    assert me_leakage(M1, U4) == pytest.approx(1.0, abs=1e-3)
    assert me_leakage(M2, U4) == pytest.approx(2.0, abs=1e-3)
    assert me_leakage(bottom(D4), U4) == 0.0


def test_ge_leakage_reference_values():
    assert ge_leakage(M1, U4) == Fraction(3, 4)
    assert ge_leakage(M2, U4) == Fraction(3, 2)
    assert ge_leakage(bottom(D4), U4) == 0


def test_prime_variant_reference_values():
    assert me_prime(M1, U4) == pytest.approx(0.415, abs=1e-3)
    assert ge_prime(M1, U4) == Fraction(5, 4)
    assert me_prime(M2, U4) == pytest.approx(2.0, abs=TOL)
    assert ge_prime(M2, U4) == Fraction(5, 2)
    assert me_prime(bottom(D4), U4) == 0.0
    assert ge_prime(bottom(D4), U4) == 1


def test_me_identity_against_direct_form():
    rng = random.Random(31)
    for size in (2, 4, 6):
        d = Domain(range(size))
        for _ in range(20):
            x = random_partition(d, rng)
            mu = Distribution.random(d, rng)
            ratio = one_try_gain(x, mu)
            assert ratio == me_leakage_direct(x, mu)
            # 2^ME multiplies the prior one-try probability into the posterior
            assert ratio * guess_prob(bottom(d), mu, 1) == guess_prob(x, mu, 1)
            assert me_leakage(x, mu) == pytest.approx(
                math.log2(float(ratio)), abs=TOL)


def test_ge_identity_against_direct_form():
    rng = random.Random(37)
    for size in (2, 4, 6):
        d = Domain(range(size))
        for _ in range(20):
            x = random_partition(d, rng)
            mu = Distribution.random(d, rng)
            assert ge_leakage(x, mu) == ge_leakage_direct(x, mu)
            assert ge_leakage(x, mu) >= 0


# ---------------------------------------------------------------------------
# Distance and capacity

def test_distance_to_self_is_zero():
    assert shannon_distance(A, A, U1234) == 0.0


def test_distance_of_unrelated_pair():
    assert shannon_distance(A, B, U1234) == pytest.approx(2.0, abs=TOL)


def test_zero_distance_characterizes_equality_under_positive_mass():
    d = Domain(range(3))
    mu = Distribution.from_weights(d, [2, 3, 5])   # strictly positive
    parts = all_partitions(d)
    for x, y in itertools.product(parts, parts):
        dist = shannon_distance(x, y, mu)
        assert dist >= -TOL
        assert (abs(dist) <= TOL) == (x == y)
        assert dist == pytest.approx(shannon_distance(y, x, mu), abs=TOL)


def test_distance_triangle_inequality_sampled():
    rng = random.Random(41)
    d = Domain(range(5))
    for _ in range(50):
        x, y, z = (random_partition(d, rng) for _ in range(3))
        mu = Distribution.random(d, rng)
        assert shannon_distance(x, z, mu) <= (
            shannon_distance(x, y, mu) + shannon_distance(y, z, mu) + TOL)


def test_channel_capacity_values():
    d = Domain(["a", "b", "c", "d"])
    assert channel_capacity(Partition(d, [["a", "b", "c"], ["d"]])) == 1.0
    assert channel_capacity(Partition(d, [["a", "b"], ["c", "d"]])) == 1.0
    assert channel_capacity(bottom(d)) == 0.0
    assert channel_capacity(top(d)) == 2.0


def test_capacity_achieved_exactly_by_one_atom_per_block():
    for blocks in ([[0], [1], [2, 3]],        # 3 blocks: log2(3) irrational
                   [[0, 1], [2, 3]],
                   [[0], [1], [2], [3]],
                   [[0, 1, 2, 3]]):
        x = Partition(D4, blocks)
        mu = capacity_achieving_distribution(x)
        assert entropy(x, mu) == channel_capacity(x)
    # and no sampled distribution beats it
    rng = random.Random(43)
    x = Partition(D4, [[0], [1], [2, 3]])
    for _ in range(50):
        mu = Distribution.random(D4, rng)
        assert entropy(x, mu) <= channel_capacity(x) + TOL


# ---------------------------------------------------------------------------
# Zero mass conventions

def test_zero_mass_atoms_change_nothing():
    d_small = Domain([0, 1, 2])
    d_big = Domain([0, 1, 2, 3])
    mu_small = Distribution.from_weights(d_small, [3, 2, 1])
    mu_big = Distribution(d_big, {0: Fraction(1, 2), 1: Fraction(1, 3),
                                  2: Fraction(1, 6), 3: Fraction(0)})
    x_small = Partition(d_small, [[0, 2], [1]])
    x_big = Partition(d_big, [[0, 2, 3], [1]])   # zero-mass atom 3 joined in
    assert entropy(x_small, mu_small) == entropy(x_big, mu_big)
    for n in (1, 2, 3):
        assert guess_prob(x_small, mu_small, n) == guess_prob(x_big, mu_big, n)
    assert expected_guesses(x_small, mu_small) == expected_guesses(x_big, mu_big)
    assert one_try_gain(x_small, mu_small) == one_try_gain(x_big, mu_big)
    assert ge_leakage(x_small, mu_small) == ge_leakage(x_big, mu_big)
    assert me_prime(x_small, mu_small) == me_prime(x_big, mu_big)
    assert ge_prime(x_small, mu_small) == ge_prime(x_big, mu_big)


# ---------------------------------------------------------------------------
# Monotonicity along refinement (spot check; the exhaustive run is in the
# acceptance suite)

def test_refinement_orders_all_measures():
    rng = random.Random(47)
    d = Domain(range(4))
    pairs = [(x, y) for x in all_partitions(d) for y in all_partitions(d)]
    from loiqif import leq
    for x, y in pairs:
        if not leq(x, y):
            continue
        for _ in range(5):
            mu = Distribution.random(d, rng)
            for n in (1, 2, 3, 4):
                assert guess_prob(x, mu, n) <= guess_prob(y, mu, n)
            assert expected_guesses(y, mu) <= expected_guesses(x, mu)
            assert entropy(x, mu) <= entropy(y, mu) + TOL


# ---------------------------------------------------------------------------
# Report plumbing

def test_measure_report_json_formats():
    r = measure_report(M1, U4)
    obj = measure_report_to_json(r)
    assert obj["guess_prob"] == {"1": "1/2", "2": "3/4", "3": "1", "4": "1"}
    assert obj["expected_guesses"] == "7/4"
    assert obj["entropy_bits"] == "0.811278124"
    assert obj["me_leakage_bits"] == "1"
    assert obj["ge_leakage"] == "3/4"
    assert obj["me_prime_bits"] == "0.415037499"
    assert obj["ge_prime"] == "5/4"
    assert obj["channel_capacity_bits"] == "1"
    json.dumps(obj)   # serializable as-is


def test_report_invariants_on_random_inputs():
    rng = random.Random(53)
    for _ in range(40):
        size = rng.randint(1, 6)
        d = Domain(range(size))
        x = random_partition(d, rng)
        mu = Distribution.random(d, rng)
        r = measure_report(x, mu)
        probs = [r.guess_prob[n] for n in sorted(r.guess_prob)]
        assert all(a <= b for a, b in zip(probs, probs[1:]))
        assert all(p <= 1 for p in probs)
        assert r.expected_guesses >= 1
        assert r.ge_leakage >= 0 and r.me_leakage_bits >= 0


def test_format_real_nine_significant_digits():
    assert format_real(0.8112781244591328) == "0.811278124"
    assert format_real(2.0) == "2"


def test_measure_domain_mismatch():
    other = Distribution.uniform(Domain(["a", "b"]))
    with pytest.raises(DomainMismatchError):
        entropy(M1, other)
    with pytest.raises(DomainMismatchError):
        guess_prob(M1, other, 1)
