"""Quantitative valuations of a partition under an exact distribution.

Probability mass is ``fractions.Fraction`` end to end, so every purely
probabilistic measure (guessing probabilities, expected guess counts,
guessing-entropy leakage) is exact.  Only logarithmic quantities
(entropies, min-entropy leakage, channel capacity, the information
distance) are floats; they are computed from the exact rationals with a
single rounding per logarithm and are good to well below 1e-9, the
tolerance the test suite pins.  Logs are base 2 throughout: results are
in bits.

Measures implemented, for a partition X under a distribution mu:

* ``entropy``               H(X), over block masses, 0·log 0 = 0;
* ``joint_entropy``         H(X,Y) = H(X ⊔ Y);
* ``conditional_entropy``   H(X|Y) = H(X ⊔ Y) − H(Y);
* ``mutual_information``    I(X;Y) = H(X) − H(X|Y), and the conditional form;
* ``guess_prob``            G_n: chance of guessing the secret within n
                            tries after learning the block;
* ``expected_guesses``      NG: expected number of guesses to pin the
                            secret down exactly, guessing best-first;
* ``me_leakage``            one-try-probability gain, in bits:
                            log2(G_1(X) / G_1(no observation));
* ``ge_leakage``            reduction in expected guesses:
                            NG(no observation) − NG(X);
* ``me_prime`` / ``ge_prime``  the same recipes applied to the blocks of X
                            as if they were the secrets themselves;
* ``shannon_distance``      d(X,Y) = H(X|Y) + H(Y|X), a pseudometric;
* ``channel_capacity``      log2(number of blocks), the maximum of H(X, ·)
                            over all distributions.

Ranking for the guessing measures is by descending mass with ties broken
by domain order; tie order is provably irrelevant to the values.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .partition import (
    Atom,
    Domain,
    DomainMismatchError,
    Partition,
    QifError,
    atom_key,
    block_count,
    bottom,
    domain_from_json,
    domain_to_json,
    join,
)


class InvalidDistributionError(QifError):
    """Mass entries are negative, missing, foreign, or do not sum to 1."""


class Distribution:
    """Exact rational probability mass over the atoms of a domain.

    Every atom carries an entry (zero mass is allowed) and the total is
    exactly 1.  Immutable once built.
    """

    __slots__ = ("domain", "mass")

    def __init__(self, domain: Domain, mass: Mapping[Atom, Fraction | int | str]):
        for a in mass:
            if a not in domain:
                raise InvalidDistributionError(f"mass entry for unknown atom {a!r}")
        out: dict[Atom, Fraction] = {}
        for a in domain.atoms:
            if a not in mass:
                raise InvalidDistributionError(f"no mass entry for atom {a!r}")
            v = Fraction(mass[a])
            if v < 0:
                raise InvalidDistributionError(f"negative mass {v} on atom {a!r}")
            out[a] = v
        total = sum(out.values())
        if total != 1:
            raise InvalidDistributionError(
                f"total mass is {total}, off from 1 by {1 - total}")
        self.domain = domain
        self.mass = out

    @classmethod
    def uniform(cls, domain: Domain) -> Distribution:
        p = Fraction(1, domain.size)
        return cls(domain, {a: p for a in domain.atoms})

    @classmethod
    def uniform_on(cls, domain: Domain, atoms: Iterable[Atom]) -> Distribution:
        """Uniform over the given atoms, zero elsewhere."""
        support = list(atoms)
        if not support:
            raise InvalidDistributionError("empty support")
        p = Fraction(1, len(support))
        mass = {a: Fraction(0) for a in domain.atoms}
        for a in support:
            mass[a] = p
        return cls(domain, mass)

    @classmethod
    def from_weights(cls, domain: Domain, weights: Mapping[Atom, int] | Sequence[int]) -> Distribution:
        """Normalize non-negative integer weights into exact probabilities."""
        if not isinstance(weights, Mapping):
            weights = dict(zip(domain.atoms, weights))
        total = sum(weights.values())
        if total <= 0:
            raise InvalidDistributionError("weights must have a positive total")
        return cls(domain, {a: Fraction(weights.get(a, 0), total) for a in domain.atoms})

    @classmethod
    def random(cls, domain: Domain, rng: random.Random,
               zero_chance: float = 0.25, max_weight: int = 1000) -> Distribution:
        """Seeded random rational distribution from normalized integer weights.

        Each atom independently gets weight 0 with probability
        ``zero_chance`` (degenerate corners matter), otherwise a uniform
        random positive integer.  At least one atom stays positive.
        """
        weights = [0 if rng.random() < zero_chance else rng.randint(1, max_weight)
                   for _ in domain.atoms]
        if not any(weights):
            weights[rng.randrange(domain.size)] = rng.randint(1, max_weight)
        return cls.from_weights(domain, weights)

    def __getitem__(self, atom: Atom) -> Fraction:
        try:
            return self.mass[atom]
        except KeyError:
            raise DomainMismatchError(f"atom {atom!r} is not in the distribution domain") from None

    def block_mass(self, block: Iterable[Atom]) -> Fraction:
        return sum((self.mass[a] for a in block), Fraction(0))

    def items(self):
        return self.mass.items()

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Distribution)
                and self.domain == other.domain
                and self.mass == other.mass)

    def __hash__(self) -> int:
        return hash((self.domain, tuple(self.mass.values())))

    def __repr__(self) -> str:
        inner = ", ".join(f"{a!r}: {m}" for a, m in self.mass.items())
        return f"Distribution({{{inner}}})"


def _check(x: Partition, mu: Distribution) -> None:
    if x.domain != mu.domain:
        raise DomainMismatchError("partition and distribution domains differ")


def _log2_fraction(q: Fraction) -> float:
    """log2 of a positive rational, via integer logs for accuracy."""
    return math.log2(q.numerator) - math.log2(q.denominator)


def _entropy_of_masses(masses: Iterable[Fraction]) -> float:
    # Over a common denominator D with counts c_i, H = log2(D) - sum(c_i log2 c_i)/D.
    # Keeps the all-equal case (uniform over k events) exactly log2(k).
    positive = [m for m in masses if m > 0]
    if len(positive) <= 1:
        return 0.0
    d = math.lcm(*(m.denominator for m in positive))
    counts = [m.numerator * (d // m.denominator) for m in positive]
    clogc = math.fsum(c * math.log2(c) for c in counts)
    return math.log2(d) - clogc / d


def entropy(x: Partition, mu: Distribution) -> float:
    """Shannon entropy of the block masses, in bits."""
    _check(x, mu)
    return _entropy_of_masses(mu.block_mass(b) for b in x.blocks)


def joint_entropy(x: Partition, y: Partition, mu: Distribution) -> float:
    return entropy(join(x, y), mu)


def conditional_entropy(x: Partition, y: Partition, mu: Distribution) -> float:
    """H(X|Y) = H(X ⊔ Y) − H(Y); exactly 0.0 when Y refines X."""
    return entropy(join(x, y), mu) - entropy(y, mu)


def mutual_information(x: Partition, y: Partition, mu: Distribution) -> float:
    return entropy(x, mu) - conditional_entropy(x, y, mu)


def conditional_mutual_information(x: Partition, y: Partition, z: Partition,
                                   mu: Distribution) -> float:
    """I(X;Y|Z) = H(X|Z) − H(X | Y ⊔ Z)."""
    return conditional_entropy(x, z, mu) - conditional_entropy(x, join(y, z), mu)


def _ranked_block_masses(block: Sequence[Atom], mu: Distribution) -> list[Fraction]:
    """Atom masses of a block, best guess first (descending mass, domain
    order on ties; blocks are stored in domain order, so stable sort does it)."""
    return sorted((mu.mass[a] for a in block), reverse=True)


def guess_prob(x: Partition, mu: Distribution, n: int) -> Fraction:
    """G_n: expected probability of guessing the secret within n tries
    after observing the block, optimal guessing order."""
    if n < 1:
        raise ValueError(f"number of tries must be >= 1, got {n}")
    _check(x, mu)
    total = Fraction(0)
    for block in x.blocks:
        masses = _ranked_block_masses(block, mu)
        total += sum(masses[:n], Fraction(0))
    return total


def expected_guesses(x: Partition, mu: Distribution) -> Fraction:
    """NG: expected number of guesses to identify the secret exactly,
    guessing likeliest-first within the observed block."""
    _check(x, mu)
    total = Fraction(0)
    for block in x.blocks:
        for i, m in enumerate(_ranked_block_masses(block, mu), start=1):
            if m == 0:
                break
            total += i * m
    return total


def one_try_gain(x: Partition, mu: Distribution) -> Fraction:
    """G_1(X) / G_1(no observation), the exact factor by which one
    observation multiplies the one-try guessing probability."""
    _check(x, mu)
    best_prior = max(mu.mass.values())
    g1 = sum((max(mu.mass[a] for a in block) for block in x.blocks), Fraction(0))
    return g1 / best_prior


def me_leakage(x: Partition, mu: Distribution) -> float:
    """Min-entropy leakage in bits: log2 of the one-try gain.

    0.0 for the one-block partition (no observation, no gain).
    """
    return _log2_fraction(one_try_gain(x, mu))


def me_leakage_direct(x: Partition, mu: Distribution) -> Fraction:
    """The one-try gain computed the long way round, as the before/after
    difference of -log2(best guess probability): returns the exact ratio
    2^(before-uncertainty − after-uncertainty).

    After observing X, the conditional probability of the best guess in
    block b is max_a mu(a)/mu(b); averaging with weight mu(b) gives the
    posterior one-try success probability.  Zero-mass blocks carry no
    weight.  Kept separate from ``one_try_gain`` so the two derivations
    can be checked against each other.
    """
    _check(x, mu)
    prior_best = max(mu.mass.values())
    posterior = Fraction(0)
    for block in x.blocks:
        bm = mu.block_mass(block)
        if bm == 0:
            continue
        cond_best = max(mu.mass[a] / bm for a in block)
        posterior += bm * cond_best
    return posterior / prior_best


def ge_leakage(x: Partition, mu: Distribution) -> Fraction:
    """Guessing-entropy leakage: NG(no observation) − NG(X), exact."""
    _check(x, mu)
    return expected_guesses(bottom(x.domain), mu) - expected_guesses(x, mu)


def ge_leakage_direct(x: Partition, mu: Distribution) -> Fraction:
    """Guessing-entropy leakage as the before/after difference of
    expected guess counts, with the posterior term computed from the
    conditional distribution inside each positive-mass block.  Kept
    separate from ``ge_leakage`` for cross-checking."""
    _check(x, mu)
    before = Fraction(0)
    for i, m in enumerate(sorted(mu.mass.values(), reverse=True), start=1):
        before += i * m
    after = Fraction(0)
    for block in x.blocks:
        bm = mu.block_mass(block)
        if bm == 0:
            continue
        cond = sorted((mu.mass[a] / bm for a in block), reverse=True)
        after += bm * sum((i * c for i, c in enumerate(cond, start=1)), Fraction(0))
    return before - after


def me_prime(x: Partition, mu: Distribution) -> float:
    """-log2 of the largest block mass (blocks treated as the secrets)."""
    _check(x, mu)
    best = max(mu.block_mass(b) for b in x.blocks)
    if best == 1:
        return 0.0   # not -0.0
    return -_log2_fraction(best)


def ge_prime(x: Partition, mu: Distribution) -> Fraction:
    """Expected number of guesses to name the block itself, blocks ranked
    by descending mass (ties by least atom, i.e. canonical block order)."""
    _check(x, mu)
    ranked = sorted((mu.block_mass(b) for b in x.blocks), reverse=True)
    return sum((i * m for i, m in enumerate(ranked, start=1)), Fraction(0))


def shannon_distance(x: Partition, y: Partition, mu: Distribution) -> float:
    """d(X,Y) = H(X|Y) + H(Y|X); zero iff the partitions carry the same
    information under every strictly positive distribution."""
    _check(x, mu)
    _check(y, mu)
    hj = entropy(join(x, y), mu)
    return (hj - entropy(y, mu)) + (hj - entropy(x, mu))


def channel_capacity(x: Partition) -> float:
    """Maximum possible leakage of the partition: log2(block count)."""
    return math.log2(block_count(x))


def capacity_achieving_distribution(x: Partition) -> Distribution:
    """Uniform over one atom per block; its entropy is exactly the capacity."""
    return Distribution.uniform_on(x.domain, (b[0] for b in x.blocks))


# ---------------------------------------------------------------------------
# Aggregate report

@dataclass(frozen=True)
class MeasureReport:
    """All measures of one partition under one distribution."""

    entropy_bits: float
    guess_prob: dict[int, Fraction]
    expected_guesses: Fraction
    me_leakage_bits: float
    ge_leakage: Fraction
    me_prime_bits: float
    ge_prime: Fraction
    channel_capacity_bits: float


def measure_report(x: Partition, mu: Distribution, max_tries: int = 4) -> MeasureReport:
    return MeasureReport(
        entropy_bits=entropy(x, mu),
        guess_prob={n: guess_prob(x, mu, n) for n in range(1, max_tries + 1)},
        expected_guesses=expected_guesses(x, mu),
        me_leakage_bits=me_leakage(x, mu),
        ge_leakage=ge_leakage(x, mu),
        me_prime_bits=me_prime(x, mu),
        ge_prime=ge_prime(x, mu),
        channel_capacity_bits=channel_capacity(x),
    )


def format_real(v: float) -> str:
    """Reals rendered with 9 significant digits (JSON and text output)."""
    return f"{v:.9g}"


def measure_report_to_json(r: MeasureReport) -> dict:
    return {
        "entropy_bits": format_real(r.entropy_bits),
        "guess_prob": {str(n): str(g) for n, g in r.guess_prob.items()},
        "expected_guesses": str(r.expected_guesses),
        "me_leakage_bits": format_real(r.me_leakage_bits),
        "ge_leakage": str(r.ge_leakage),
        "me_prime_bits": format_real(r.me_prime_bits),
        "ge_prime": str(r.ge_prime),
        "channel_capacity_bits": format_real(r.channel_capacity_bits),
    }


# ---------------------------------------------------------------------------
# Distribution JSON form: {"domain": [...], "mass": {"atom": "3/8", ...}}

def distribution_to_json(d: Distribution) -> dict:
    return {
        "domain": domain_to_json(d.domain),
        "mass": {atom_key(a): str(m) for a, m in d.mass.items()},
    }


def distribution_from_json(obj) -> Distribution:
    if not isinstance(obj, dict) or "domain" not in obj or "mass" not in obj:
        raise InvalidDistributionError('expected {"domain": [...], "mass": {...}}')
    domain = domain_from_json(obj["domain"])
    by_key = {atom_key(a): a for a in domain.atoms}
    mass: dict[Atom, Fraction] = {a: Fraction(0) for a in domain.atoms}
    for key, text in obj["mass"].items():
        if key not in by_key:
            raise InvalidDistributionError(f"mass entry for unknown atom {key!r}")
        try:
            mass[by_key[key]] = Fraction(str(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidDistributionError(f"bad mass {text!r} for atom {key!r}: {exc}") from None
    return Distribution(domain, mass)
