"""Finite G-sets, action groupoids and their inertia.

A :class:`GroupAction` of ``G`` on ``{0..m-1}`` stands for the quotient
groupoid with objects ``X`` and arrows ``(g, x): x -> g.x``. The inertia of
such a groupoid is again an action of the same group, on the set of pairs
``(x, h)`` with ``h.x = x`` and ``g.(x, h) = (g.x, g h g^-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvariantError, MismatchError
from .groups import FiniteGroup, GroupHom, subgroup


class GroupAction:
    """Left action of ``group`` on ``range(size)`` given by ``table[g][x]``."""

    def __init__(self, group: FiniteGroup, table: Sequence[Sequence[int]],
                 labels: Sequence | None = None):
        arr = np.array(table, dtype=np.int64)
        n = group.order
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(n, 0)
        if arr.ndim != 2 or arr.shape[0] != n:
            raise InvariantError("action table has one row per group element", arr.shape)
        m = arr.shape[1]
        if m and (arr.min() < 0 or arr.max() >= m):
            raise InvariantError("action maps points to points")
        bad = np.flatnonzero(arr[group.identity] != np.arange(m))
        if bad.size:
            raise InvariantError("act(e, x) = x", int(bad[0]))
        if m:
            mul = group._np
            lhs = arr[np.arange(n)[:, None, None], arr[None, :, :]]  # g.(h.x)
            rhs = arr[mul]  # (gh).x
            bad = np.argwhere(lhs != rhs)
            if bad.size:
                raise InvariantError("act(g, act(h, x)) = act(gh, x)",
                                     tuple(int(v) for v in bad[0]))
        self.group = group
        self.table = tuple(tuple(int(v) for v in row) for row in arr)
        self.labels = tuple(labels) if labels is not None else tuple(range(m))

    @property
    def size(self) -> int:
        return len(self.table[0]) if self.table else 0

    def points(self) -> range:
        return range(self.size)

    def act(self, g: int, x: int) -> int:
        return self.table[g][x]

    @cached_property
    def orbits(self) -> tuple[tuple[int, ...], ...]:
        """Orbits as sorted tuples, ordered by smallest point."""
        seen: set[int] = set()
        out = []
        for x in self.points():
            if x in seen:
                continue
            orb = tuple(sorted({self.table[g][x] for g in self.group.elements()}))
            seen.update(orb)
            out.append(orb)
        return tuple(out)

    @cached_property
    def orbit_index(self) -> tuple[int, ...]:
        idx = [0] * self.size
        for k, orb in enumerate(self.orbits):
            for x in orb:
                idx[x] = k
        return tuple(idx)

    def stabilizer_elements(self, x: int) -> list[int]:
        return [g for g in self.group.elements() if self.table[g][x] == x]

    def stabilizer(self, x: int) -> GroupHom:
        """Inclusion of the stabilizer of ``x``."""
        return subgroup(self.group, self.stabilizer_elements(x), name=f"Stab({self.labels[x]})")

    def transporter(self, x: int, y: int) -> list[int]:
        """``{g : g.x = y}``."""
        return [g for g in self.group.elements() if self.table[g][x] == y]

    def __eq__(self, other):
        # an inertia action never equals a plain action with the same table
        return (type(other) is type(self) and self.group == other.group
                and self.table == other.table)

    def __hash__(self):
        return hash((type(self).__name__, self.group, self.table))

    def __repr__(self):
        return f"{type(self).__name__}({self.group.name} on {self.size} points)"

    # -- constructors ----------------------------------------------------------

    @classmethod
    def point(cls, group: FiniteGroup) -> GroupAction:
        return cls(group, [[0] for _ in group.elements()])

    @classmethod
    def trivial(cls, group: FiniteGroup, size: int) -> GroupAction:
        return cls(group, [list(range(size)) for _ in group.elements()])

    @classmethod
    def natural(cls, group: FiniteGroup) -> GroupAction:
        """Action of a permutation group (labels are permutations) on its points."""
        return cls(group, [list(perm) for perm in group.labels])

    @classmethod
    def from_generator_images(cls, group: FiniteGroup, images: dict[int, Sequence[int]],
                              size: int) -> GroupAction:
        """Extend the images of generators to the whole group by breadth-first words."""
        table: dict[int, tuple[int, ...]] = {group.identity: tuple(range(size))}
        frontier = [group.identity]
        while frontier:
            nxt = []
            for a in frontier:
                for g, img in images.items():
                    b = group.table[g][a]
                    perm = tuple(int(img[table[a][x]]) for x in range(size))
                    if b not in table:
                        table[b] = perm
                        nxt.append(b)
                    elif table[b] != perm:
                        raise InvariantError("generator images define an action", (g, a))
            frontier = nxt
        if len(table) != group.order:
            raise InvariantError("generator images cover the group", sorted(table))
        return cls(group, [table[g] for g in group.elements()])


def fixed_points(action: GroupAction, h: int) -> list[int]:
    """``{x : h.x = x}`` in ascending order."""
    row = action.table[h]
    return [x for x in action.points() if row[x] == x]


class EquivariantMap:
    """A morphism of actions ``(H on U) -> (G on X)``: a pair ``(alpha, gamma)``
    with ``alpha(h.u) = gamma(h).alpha(u)``."""

    def __init__(self, source: GroupAction, target: GroupAction, alpha: Sequence[int],
                 gamma: GroupHom | Sequence[int] | None = None):
        if gamma is None:
            if source.group != target.group:
                raise MismatchError("gamma may only be omitted between actions of one group")
            gamma = GroupHom.identity(source.group)
        elif not isinstance(gamma, GroupHom):
            gamma = GroupHom(source.group, target.group, gamma)
        if gamma.domain != source.group or gamma.codomain != target.group:
            raise MismatchError("gamma does not match the groups of source and target")
        alpha = tuple(int(v) for v in alpha)
        if len(alpha) != source.size or any(not 0 <= v < target.size for v in alpha):
            raise InvariantError("alpha maps source points to target points", alpha)
        for h in source.group.elements():
            gh = gamma(h)
            for u in source.points():
                if alpha[source.table[h][u]] != target.table[gh][alpha[u]]:
                    raise InvariantError("alpha(h.u) = gamma(h).alpha(u)", (h, u))
        self.source = source
        self.target = target
        self.alpha = alpha
        self.gamma = gamma

    def compose(self, first: EquivariantMap) -> EquivariantMap:
        """``self o first``."""
        if first.target != self.source:
            raise MismatchError("maps are not composable")
        return EquivariantMap(first.source, self.target,
                              [self.alpha[v] for v in first.alpha], self.gamma.compose(first.gamma))

    @classmethod
    def identity(cls, action: GroupAction) -> EquivariantMap:
        return cls(action, action, range(action.size))

    def __eq__(self, other):
        return (isinstance(other, EquivariantMap) and self.alpha == other.alpha
                and self.gamma == other.gamma and self.source == other.source
                and self.target == other.target)

    def __hash__(self):
        return hash((self.source, self.target, self.alpha, self.gamma.images))

    def __repr__(self):
        return f"EquivariantMap({self.source!r} -> {self.target!r})"


class TwoMorphism:
    """A natural transformation between two maps with common source and target.

    ``elements[u]`` is an arrow ``first(u) -> second(u)`` of the target
    groupoid, i.e. ``elements[u] . first.alpha[u] = second.alpha[u]``, and for
    every arrow ``(h, u)`` of the source,
    ``elements[h.u] * first.gamma(h) = second.gamma(h) * elements[u]``.
    """

    def __init__(self, first: EquivariantMap, second: EquivariantMap, elements: Sequence[int]):
        if first.source != second.source or first.target != second.target:
            raise MismatchError("2-morphism between maps with different ends")
        elements = tuple(int(v) for v in elements)
        src, tgt = first.source, first.target
        G = tgt.group
        if len(elements) != src.size:
            raise InvariantError("one component per source point", len(elements))
        for u in src.points():
            if tgt.table[elements[u]][first.alpha[u]] != second.alpha[u]:
                raise InvariantError("component is an arrow first(u) -> second(u)", u)
        for h in src.group.elements():
            for u in src.points():
                hu = src.table[h][u]
                if G.table[elements[hu]][first.gamma(h)] != G.table[second.gamma(h)][elements[u]]:
                    raise InvariantError("naturality", (h, u))
        self.first = first
        self.second = second
        self.elements = elements

    def __getitem__(self, u: int) -> int:
        return self.elements[u]


class NaturalLoop(TwoMorphism):
    """A 2-automorphism of a single map."""

    def __init__(self, map: EquivariantMap, elements: Sequence[int]):
        super().__init__(map, map, elements)

    @property
    def map(self) -> EquivariantMap:
        return self.first


class InertiaAction(GroupAction):
    """The G-set ``F = {(x, h) : h.x = x}`` with ``g.(x, h) = (g.x, g h g^-1)``.

    Pairs are ordered lexicographically by ``(x, h)``.
    """

    def __init__(self, base: GroupAction):
        G = base.group
        pairs = [(x, h) for x in base.points() for h in G.elements() if base.table[h][x] == x]
        index = {pr: i for i, pr in enumerate(pairs)}
        table = [[index[(base.table[g][x], G.conj(g, h))] for (x, h) in pairs]
                 for g in G.elements()]
        super().__init__(G, table, labels=[(base.labels[x], G.labels[h]) for x, h in pairs])
        self.base = base
        self.pairs = tuple(pairs)
        self.index = index

    @cached_property
    def pi(self) -> EquivariantMap:
        return EquivariantMap(self, self.base, [x for x, _ in self.pairs])

    @cached_property
    def zeta(self) -> NaturalLoop:
        """The canonical loop of ``pi``: the pair ``(x, h)`` carries ``h``."""
        return NaturalLoop(self.pi, [h for _, h in self.pairs])

    def __eq__(self, other):
        return super().__eq__(other) and self.base == other.base

    __hash__ = GroupAction.__hash__

    def pairs_over(self, x: int) -> list[int]:
        """Indices of the pairs ``(x, h)``, ordered by ``h``."""
        return [i for i, (y, _) in enumerate(self.pairs) if y == x]

    def untwisted(self) -> list[int]:
        e = self.group.identity
        return [i for i, (_, h) in enumerate(self.pairs) if h == e]


def inertia(action: GroupAction) -> InertiaAction:
    return InertiaAction(action)


class DoubleInertia(NamedTuple):
    action: GroupAction
    triples: tuple[tuple[int, int, int], ...]
    p1: EquivariantMap
    p2: EquivariantMap
    m: EquivariantMap


def double_inertia(action: GroupAction, inert: InertiaAction | None = None) -> DoubleInertia:
    """Triples ``(x, h1, h2)`` fixing ``x`` with the projections and the product map."""
    G = action.group
    inert = inert or InertiaAction(action)
    triples = [(x, h1, h2) for x in action.points() for h1 in G.elements()
               for h2 in G.elements() if action.table[h1][x] == x and action.table[h2][x] == x]
    index = {t: i for i, t in enumerate(triples)}
    table = [[index[(action.table[g][x], G.conj(g, h1), G.conj(g, h2))] for (x, h1, h2) in triples]
             for g in G.elements()]
    act2 = GroupAction(G, table, labels=triples)
    p1 = EquivariantMap(act2, inert, [inert.index[(x, h1)] for x, h1, _ in triples])
    p2 = EquivariantMap(act2, inert, [inert.index[(x, h2)] for x, _, h2 in triples])
    m = EquivariantMap(act2, inert, [inert.index[(x, G.table[h1][h2])] for x, h1, h2 in triples])
    return DoubleInertia(act2, tuple(triples), p1, p2, m)


def inertia_map(f: EquivariantMap, source: InertiaAction | None = None,
                target: InertiaAction | None = None) -> EquivariantMap:
    """The induced map of inertia actions ``(u, h) -> (alpha(u), gamma(h))``."""
    source = source or InertiaAction(f.source)
    target = target or InertiaAction(f.target)
    alpha = [target.index[(f.alpha[u], f.gamma(h))] for u, h in source.pairs]
    return EquivariantMap(source, target, alpha, f.gamma)


@dataclass(frozen=True)
class EmbeddingCheck:
    """Result of :func:`is_open_embedding`; truthy iff the map is an open embedding."""

    ok: bool
    reason: str = ""
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def is_open_embedding(f: EquivariantMap) -> EmbeddingCheck:
    """Fully faithful and injective on points.

    For every pair ``u, u'`` of source points, ``gamma`` must restrict to a
    bijection from ``{h : h.u = u'}`` onto ``{g : g.alpha(u) = alpha(u')}``.
    """
    src, tgt = f.source, f.target
    if len(set(f.alpha)) != len(f.alpha):
        seen: dict[int, int] = {}
        for u, y in enumerate(f.alpha):
            if y in seen:
                return EmbeddingCheck(False, "alpha is not injective", (seen[y], u))
            seen[y] = u
    for u in src.points():
        for v in src.points():
            up = sorted(f.gamma(h) for h in src.transporter(u, v))
            down = tgt.transporter(f.alpha[u], f.alpha[v])
            if up != down:
                return EmbeddingCheck(False, "hom-sets differ", (u, v))
    return EmbeddingCheck(True)
