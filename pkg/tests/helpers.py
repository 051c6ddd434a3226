"""Shared test utilities: exhaustive partition enumeration and brute-force
oracles kept deliberately independent of the library's own algorithms."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from loiqif import Distribution, Domain, Partition

BELL = {1: 1, 2: 2, 3: 5, 4: 15, 5: 52, 6: 203, 7: 877, 8: 4140}


def set_partitions(items):
    """All partitions of ``items`` as lists of lists (standard recursion:
    place the head into each block of a partition of the tail, or alone)."""
    items = list(items)
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [head]] + part[i + 1:]
        yield part + [[head]]


def all_partitions(domain: Domain) -> list[Partition]:
    return [Partition(domain, blocks) for blocks in set_partitions(domain.atoms)]


def random_partition(domain: Domain, rng) -> Partition:
    labels = {a: rng.randint(0, domain.size - 1) for a in domain.atoms}
    groups: dict[int, list] = {}
    for a, lab in labels.items():
        groups.setdefault(lab, []).append(a)
    return Partition(domain, groups.values())


# ---------------------------------------------------------------------------
# Brute-force oracles

def leq_oracle(x: Partition, y: Partition) -> bool:
    """Refinement by its pairwise definition: every pair related by y is
    related by x."""
    atoms = x.domain.atoms
    for a, b in itertools.combinations(atoms, 2):
        if y.relates(a, b) and not x.relates(a, b):
            return False
    return True


def join_oracle(x: Partition, y: Partition) -> Partition:
    """Join as the intersection of the two equivalence relations."""
    atoms = x.domain.atoms
    blocks = {
        frozenset(b for b in atoms if x.relates(a, b) and y.relates(a, b))
        for a in atoms
    }
    return Partition(x.domain, blocks)


def meet_oracle(x: Partition, y: Partition) -> Partition:
    """Meet as the transitive closure of the union of the two relations
    (Warshall)."""
    atoms = x.domain.atoms
    n = len(atoms)
    rel = [[x.relates(atoms[i], atoms[j]) or y.relates(atoms[i], atoms[j])
            for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            if rel[i][k]:
                for j in range(n):
                    if rel[k][j]:
                        rel[i][j] = True
    blocks = {frozenset(atoms[j] for j in range(n) if rel[i][j]) for i in range(n)}
    return Partition(x.domain, blocks)


def entropy_oracle(x: Partition, mu: Distribution) -> float:
    """Entropy straight from the definition, in floats."""
    total = 0.0
    for block in x.blocks:
        p = float(mu.block_mass(block))
        if p > 0:
            total -= p * math.log2(p)
    return total


def conditional_entropy_oracle(x: Partition, y: Partition, mu: Distribution) -> float:
    """H(X|Y) as the mu(y)-weighted entropy of X's conditional block
    masses inside each y-block."""
    total = 0.0
    for yb in y.blocks:
        ym = mu.block_mass(yb)
        if ym == 0:
            continue
        inner = 0.0
        for xb in x.blocks:
            joint = sum((mu.mass[a] for a in xb if a in set(yb)), Fraction(0))
            if joint > 0:
                p = float(joint / ym)
                inner -= p * math.log2(p)
        total += float(ym) * inner
    return total


def guess_prob_oracle(x: Partition, mu: Distribution, n: int) -> Fraction:
    """Success probability of the best n-guess strategy: per block, the
    best mass any n-subset can cover."""
    total = Fraction(0)
    for block in x.blocks:
        k = min(n, len(block))
        total += max(
            sum((mu.mass[a] for a in subset), Fraction(0))
            for subset in itertools.combinations(block, k))
    return total


def expected_guesses_oracle(x: Partition, mu: Distribution) -> Fraction:
    """Expected guesses of the best strategy: per block, minimized over
    every guessing order (blocks must be small)."""
    total = Fraction(0)
    for block in x.blocks:
        total += min(
            sum((i * mu.mass[a] for i, a in enumerate(order, start=1)), Fraction(0))
            for order in itertools.permutations(block))
    return total
