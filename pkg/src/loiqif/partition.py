"""Exact algebra of finite set partitions under the refinement order.

A ``Domain`` fixes a finite, ordered universe of atoms (the possible
secret states).  A ``Partition`` groups those atoms into disjoint,
covering blocks: two atoms in the same block are indistinguishable to an
observer, atoms in different blocks are distinguished.  All partitions
of one domain form a complete lattice:

* ``leq(X, Y)`` — Y refines X: every block of Y sits inside a block of X,
  so Y distinguishes at least as much as X;
* ``join(X, Y)`` — least upper bound: non-empty pairwise intersections of
  blocks (what both observations together distinguish);
* ``meet(X, Y)`` — greatest lower bound: connected components of the union
  of the two block relations (what both observations agree on);
* ``top``/``bottom`` — all singletons / one block.

Partitions are held in a canonical form (atoms in domain order inside a
block, blocks ordered by least atom), so structural equality is partition
equality.  Every value is immutable and every operation is a pure
function returning a new value; everything here is safe to share across
threads.
"""

from __future__ import annotations

from typing import Callable, Hashable, Iterable, Mapping

Atom = Hashable


class QifError(Exception):
    """Base class for analyzer errors."""


class DomainMismatchError(QifError):
    """Values built over different domains were combined."""


class InvalidPartitionError(QifError):
    """Blocks overlap, miss atoms, or contain unknown or empty entries."""


class MissingMappingError(QifError):
    """A kernel map is undefined on some domain atom."""


class Domain:
    """An ordered universe of distinct atoms.

    Atom identifiers are opaque (strings, ints, tuples, ...); only their
    position in the construction sequence matters.  That order is fixed
    for the lifetime of the domain and drives every canonical form and
    tie-break downstream.
    """

    __slots__ = ("atoms", "_pos")

    def __init__(self, atoms: Iterable[Atom]):
        self.atoms: tuple[Atom, ...] = tuple(atoms)
        if not self.atoms:
            raise ValueError("a domain needs at least one atom")
        self._pos: dict[Atom, int] = {a: i for i, a in enumerate(self.atoms)}
        if len(self._pos) != len(self.atoms):
            seen: set[Atom] = set()
            for a in self.atoms:
                if a in seen:
                    raise ValueError(f"duplicate atom {a!r} in domain")
                seen.add(a)

    @property
    def size(self) -> int:
        return len(self.atoms)

    def position(self, atom: Atom) -> int:
        try:
            return self._pos[atom]
        except KeyError:
            raise InvalidPartitionError(f"atom {atom!r} is not in the domain") from None

    def __contains__(self, atom: Atom) -> bool:
        return atom in self._pos

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Domain) and self.atoms == other.atoms

    def __hash__(self) -> int:
        return hash(self.atoms)

    def __repr__(self) -> str:
        return f"Domain({list(self.atoms)!r})"


class Partition:
    """Disjoint non-empty blocks covering a domain.

    The constructor accepts blocks in any order and canonicalizes them;
    it rejects overlaps, gaps, empty blocks and foreign atoms with a
    diagnostic naming the offending atom.
    """

    __slots__ = ("domain", "blocks", "_block_of")

    def __init__(self, domain: Domain, blocks: Iterable[Iterable[Atom]]):
        self.domain = domain
        canon: list[tuple[Atom, ...]] = []
        block_of: dict[Atom, int] = {}
        for block in blocks:
            batoms = sorted(block, key=domain.position)
            if not batoms:
                raise InvalidPartitionError("empty block")
            canon.append(tuple(batoms))
        canon.sort(key=lambda b: domain.position(b[0]))
        for i, block in enumerate(canon):
            for a in block:
                if a in block_of:
                    raise InvalidPartitionError(
                        f"atom {a!r} appears in more than one block")
                block_of[a] = i
        if len(block_of) != domain.size:
            missing = next(a for a in domain.atoms if a not in block_of)
            raise InvalidPartitionError(f"atom {missing!r} is not covered by any block")
        self.blocks: tuple[tuple[Atom, ...], ...] = tuple(canon)
        self._block_of = block_of

    def block_of(self, atom: Atom) -> int:
        """Index of the block containing ``atom``."""
        try:
            return self._block_of[atom]
        except KeyError:
            raise InvalidPartitionError(f"atom {atom!r} is not in the domain") from None

    def block_containing(self, atom: Atom) -> tuple[Atom, ...]:
        return self.blocks[self.block_of(atom)]

    def relates(self, a: Atom, b: Atom) -> bool:
        """True when the two atoms share a block."""
        return self.block_of(a) == self.block_of(b)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Partition)
                and self.domain == other.domain
                and self.blocks == other.blocks)

    def __hash__(self) -> int:
        return hash((self.domain, self.blocks))

    def __str__(self) -> str:
        inner = ",".join("{" + ",".join(str(a) for a in b) + "}" for b in self.blocks)
        return "{" + inner + "}"

    def __repr__(self) -> str:
        return f"Partition({self})"


def kernel(domain: Domain, f: Callable[[Atom], Hashable] | Mapping[Atom, Hashable]) -> Partition:
    """Partition grouping atoms on which ``f`` takes the same value.

    ``f`` may be a callable or a mapping; it must be defined on every
    atom of the domain.
    """
    if callable(f):
        get = f
    else:
        get = f.__getitem__
    groups: dict[Hashable, list[Atom]] = {}
    for a in domain.atoms:
        try:
            v = get(a)
        except KeyError:
            raise MissingMappingError(f"kernel map is undefined on atom {a!r}") from None
        groups.setdefault(v, []).append(a)
    return Partition(domain, groups.values())


def _check_domains(x: Partition, y: Partition) -> None:
    if x.domain != y.domain:
        raise DomainMismatchError("partitions live on different domains")


def leq(x: Partition, y: Partition) -> bool:
    """Refinement order: every block of ``y`` lies inside a block of ``x``."""
    _check_domains(x, y)
    for block in y.blocks:
        home = x.block_of(block[0])
        for a in block[1:]:
            if x.block_of(a) != home:
                return False
    return True


def join(x: Partition, y: Partition) -> Partition:
    """Least upper bound: non-empty intersections of an x-block with a y-block."""
    _check_domains(x, y)
    groups: dict[tuple[int, int], list[Atom]] = {}
    for a in x.domain.atoms:
        groups.setdefault((x.block_of(a), y.block_of(a)), []).append(a)
    return Partition(x.domain, groups.values())


def meet(x: Partition, y: Partition) -> Partition:
    """Greatest lower bound: components of the union of both block relations."""
    _check_domains(x, y)
    n = x.domain.size
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri

    pos = x.domain.position
    for part in (x, y):
        for block in part.blocks:
            first = pos(block[0])
            for a in block[1:]:
                union(first, pos(a))
    groups: dict[int, list[Atom]] = {}
    for i, a in enumerate(x.domain.atoms):
        groups.setdefault(find(i), []).append(a)
    return Partition(x.domain, groups.values())


def top(domain: Domain) -> Partition:
    """The all-singletons partition (everything distinguished)."""
    return Partition(domain, ([a] for a in domain.atoms))


def bottom(domain: Domain) -> Partition:
    """The one-block partition (nothing distinguished)."""
    return Partition(domain, [domain.atoms])


def block_count(x: Partition) -> int:
    return len(x.blocks)


# ---------------------------------------------------------------------------
# JSON forms
#
# Atoms serialize as themselves when JSON-representable (str, int), tuples
# become arrays.  {"domain": [...], "blocks": [[...], ...]} with blocks in
# canonical order on output; input may be in any order and is canonicalized.

def atom_to_json(atom: Atom):
    if isinstance(atom, tuple):
        return [atom_to_json(a) for a in atom]
    return atom


def atom_from_json(value) -> Atom:
    if isinstance(value, list):
        return tuple(atom_from_json(v) for v in value)
    return value


def atom_key(atom: Atom) -> str:
    """Canonical string form of an atom, used as a JSON object key."""
    if isinstance(atom, tuple):
        return "(" + ",".join(atom_key(a) for a in atom) + ")"
    return str(atom)


def domain_to_json(domain: Domain) -> list:
    return [atom_to_json(a) for a in domain.atoms]


def domain_from_json(obj) -> Domain:
    if not isinstance(obj, list):
        raise InvalidPartitionError("domain must be a JSON array of atoms")
    return Domain(atom_from_json(v) for v in obj)


def partition_to_json(x: Partition) -> dict:
    return {
        "domain": domain_to_json(x.domain),
        "blocks": [[atom_to_json(a) for a in block] for block in x.blocks],
    }


def partition_from_json(obj) -> Partition:
    if not isinstance(obj, dict) or "domain" not in obj or "blocks" not in obj:
        raise InvalidPartitionError('expected {"domain": [...], "blocks": [...]}')
    domain = domain_from_json(obj["domain"])
    blocks = [[atom_from_json(a) for a in block] for block in obj["blocks"]]
    return Partition(domain, blocks)
