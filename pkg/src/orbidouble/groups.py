"""Finite groups given by multiplication tables.

Elements are the indices ``0..n-1``. Every constructor in this module puts
the identity at index 0; tables supplied by hand may put it anywhere.
"""

from __future__ import annotations

import itertools
import math
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InvariantError
from .linalg import is_prime


class FiniteGroup:
    """A finite group stored as its full Cayley table.

    Parameters
    ----------
    table : sequence of sequences of int
        ``table[a][b]`` is the index of the product ``a*b``.
    labels : optional sequence
        Human readable names, one per element (permutations, integers, ...).
    """

    def __init__(self, table: Sequence[Sequence[int]], labels: Sequence | None = None,
                 name: str | None = None):
        arr = np.array(table, dtype=np.int64)
        n = arr.shape[0] if arr.ndim == 2 else -1
        if n <= 0 or arr.shape != (n, n):
            raise InvariantError("square multiplication table", getattr(arr, "shape", None))
        if arr.min() < 0 or arr.max() >= n:
            raise InvariantError("table entries are element indices", int(arr.max()))
        ids = [e for e in range(n) if np.array_equal(arr[e], np.arange(n))
               and np.array_equal(arr[:, e], np.arange(n))]
        if not ids:
            raise InvariantError("identity element exists")
        e = ids[0]
        lhs = arr[arr]  # lhs[a, b, c] = (ab)c
        rhs = arr[np.arange(n)[:, None, None], arr[None, :, :]]  # a(bc)
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            raise InvariantError("associativity", tuple(int(v) for v in bad[0]))
        inv = []
        for a in range(n):
            hits = np.flatnonzero(arr[a] == e)
            if hits.size != 1 or arr[hits[0], a] != e:
                raise InvariantError("inverses exist", a)
            inv.append(int(hits[0]))
        self.table = tuple(tuple(int(v) for v in row) for row in arr)
        self.identity = e
        self.inverse = tuple(inv)
        self.labels = tuple(labels) if labels is not None else tuple(range(n))
        self.name = name or f"G{n}"
        self._np = arr

    @property
    def order(self) -> int:
        return len(self.table)

    def __len__(self):
        return len(self.table)

    def elements(self) -> range:
        return range(len(self.table))

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def conj(self, g: int, h: int) -> int:
        """``g h g^-1``."""
        return self.table[self.table[g][h]][self.inverse[g]]

    def prod(self, *elems: int) -> int:
        out = self.identity
        for a in elems:
            out = self.table[out][a]
        return out

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*(self.element_order(a) for a in self.elements()))

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self._np, self._np.T))

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """A small generating set, chosen greedily in index order."""
        gens: list[int] = []
        span = {self.identity}
        for a in self.elements():
            if a not in span:
                gens.append(a)
                span = _closure(self, gens)
        return tuple(gens)

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.table == other.table

    def __hash__(self):
        return hash(self.table)

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"


def _closure(group: FiniteGroup, gens: Iterable[int]) -> set[int]:
    gens = list(gens)
    seen = {group.identity}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = group.table[g][a]
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return seen


class GroupHom:
    """A homomorphism given by its image table; validated exhaustively."""

    def __init__(self, domain: FiniteGroup, codomain: FiniteGroup, images: Sequence[int]):
        images = tuple(int(v) for v in images)
        if len(images) != domain.order:
            raise InvariantError("homomorphism defined on every element", len(images))
        if any(not 0 <= v < codomain.order for v in images):
            raise InvariantError("images are codomain elements", images)
        if images[domain.identity] != codomain.identity:
            raise InvariantError("map(e) = e", domain.identity)
        for a in domain.elements():
            for b in domain.elements():
                if images[domain.table[a][b]] != codomain.table[images[a]][images[b]]:
                    raise InvariantError("map(gh) = map(g)map(h)", (a, b))
        self.domain = domain
        self.codomain = codomain
        self.images = images

    def __call__(self, a: int) -> int:
        return self.images[a]

    @property
    def is_injective(self) -> bool:
        return len(set(self.images)) == len(self.images)

    @property
    def is_bijective(self) -> bool:
        return self.is_injective and self.domain.order == self.codomain.order

    def preimage(self, g: int) -> list[int]:
        return [a for a, v in enumerate(self.images) if v == g]

    def compose(self, first: GroupHom) -> GroupHom:
        """``self o first``."""
        return GroupHom(first.domain, self.codomain, [self.images[v] for v in first.images])

    @classmethod
    def identity(cls, group: FiniteGroup) -> GroupHom:
        return cls(group, group, range(group.order))

    def __eq__(self, other):
        return (isinstance(other, GroupHom) and self.images == other.images
                and self.domain == other.domain and self.codomain == other.codomain)

    def __hash__(self):
        return hash((self.domain, self.codomain, self.images))

    def __repr__(self):
        return f"GroupHom({self.domain.name} -> {self.codomain.name}, {list(self.images)})"


def subgroup(group: FiniteGroup, elements: Iterable[int], name: str | None = None) -> GroupHom:
    """The inclusion of the subgroup on ``elements`` (identity placed first)."""
    elems = sorted(set(elements), key=lambda a: (a != group.identity, a))
    pos = {a: i for i, a in enumerate(elems)}
    try:
        table = [[pos[group.table[a][b]] for b in elems] for a in elems]
    except KeyError as exc:
        raise InvariantError("subset closed under multiplication", exc.args[0]) from None
    sub = FiniteGroup(table, labels=[group.labels[a] for a in elems],
                      name=name or f"{group.name}_sub{len(elems)}")
    return GroupHom(sub, group, elems)


def conjugacy_classes(group: FiniteGroup) -> list[list[int]]:
    """Orbits of conjugation, each sorted, ordered by smallest member."""
    seen: set[int] = set()
    classes = []
    for h in group.elements():
        if h in seen:
            continue
        cls = sorted({group.conj(g, h) for g in group.elements()})
        seen.update(cls)
        classes.append(cls)
    return classes


def centralizer(group: FiniteGroup, h: int) -> GroupHom:
    """Inclusion of ``{g : gh = hg}``; the subgroup itself is ``.domain``."""
    elems = [g for g in group.elements() if group.table[g][h] == group.table[h][g]]
    return subgroup(group, elems, name=f"C({group.labels[h]})")


def splitting_prime(group: FiniteGroup, limit: int = 10**6) -> int:
    """Smallest prime ``p`` with ``p`` coprime to ``|G|`` and ``p = 1 mod exp(G)``."""
    exp = group.exponent
    for p in range(2, limit + 1):
        if (p - 1) % exp == 0 and group.order % p != 0 and is_prime(p):
            return p
    raise RuntimeError(f"no splitting prime below {limit} for {group!r}")


def is_splitting_prime(group: FiniteGroup, p: int) -> bool:
    return is_prime(p) and group.order % p != 0 and (p - 1) % group.exponent == 0


# -- constructors ---------------------------------------------------------------


def trivial_group() -> FiniteGroup:
    return FiniteGroup([[0]], name="1")


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup([[(a + b) % n for b in range(n)] for a in range(n)], name=f"Z{n}")


def _compose(g: tuple[int, ...], h: tuple[int, ...]) -> tuple[int, ...]:
    # (gh)(i) = g(h(i)): permutations act on the left
    return tuple(g[i] for i in h)


def permutation_group(generators: Sequence[Sequence[int]], degree: int | None = None,
                      name: str | None = None) -> FiniteGroup:
    """Closure of permutation generators, elements in breadth-first order.

    Labels are the permutations as tuples; ``labels[0]`` is the identity.
    """
    gens = [tuple(int(v) for v in g) for g in generators]
    if degree is None:
        degree = len(gens[0]) if gens else 0
    for g in gens:
        if sorted(g) != list(range(degree)):
            raise InvariantError("generator is a permutation", g)
    ident = tuple(range(degree))
    elems = [ident]
    pos = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = _compose(g, a)
                if b not in pos:
                    pos[b] = len(elems)
                    elems.append(b)
                    nxt.append(b)
        frontier = nxt
    table = [[pos[_compose(a, b)] for b in elems] for a in elems]
    return FiniteGroup(table, labels=elems, name=name or f"Perm{len(elems)}")


def symmetric_group(n: int) -> FiniteGroup:
    perms = sorted(itertools.permutations(range(n)))
    pos = {q: i for i, q in enumerate(perms)}
    table = [[pos[_compose(a, b)] for b in perms] for a in perms]
    return FiniteGroup(table, labels=perms, name=f"S{n}")


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the n-gon as permutations of its vertices."""
    rot = [(i + 1) % n for i in range(n)]
    ref = [(-i) % n for i in range(n)]
    return permutation_group([rot, ref], degree=n, name=f"D{n}")


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    elems = [(x, y) for x in a.elements() for y in b.elements()]
    elems.sort(key=lambda t: (t[0] != a.identity, t[0], t[1] != b.identity, t[1]))
    pos = {t: i for i, t in enumerate(elems)}
    table = [[pos[(a.table[x1][x2], b.table[y1][y2])] for (x2, y2) in elems]
             for (x1, y1) in elems]
    return FiniteGroup(table, labels=[(a.labels[x], b.labels[y]) for x, y in elems],
                       name=f"{a.name}x{b.name}")
