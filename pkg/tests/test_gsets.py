from __future__ import annotations

import pytest

from cases import G_SWAP, S3, Z2, Z3, point, swap_ab, swap_abc
from orbidouble.errors import InvariantError
from orbidouble.groups import conjugacy_classes, dihedral_group, trivial_group
from orbidouble.gsets import (EquivariantMap, GroupAction, InertiaAction, NaturalLoop,
                              double_inertia, fixed_points, is_open_embedding)

ACTIONS = [point(Z2), swap_ab(), swap_abc(), point(S3), GroupAction.natural(S3),
           GroupAction.natural(dihedral_group(4)), GroupAction.trivial(Z3, 2)]


def test_fixed_points():
    assert fixed_points(GroupAction.trivial(Z2, 1), G_SWAP) == [0]
    assert fixed_points(swap_ab(), G_SWAP) == []
    assert fixed_points(swap_ab(), 0) == [0, 1]


def test_action_axioms_are_checked():
    with pytest.raises(InvariantError):
        GroupAction(Z2, [[1, 0], [0, 1]])


def test_inertia_of_trivial_group_is_the_set():
    X = GroupAction.trivial(trivial_group(), 3)
    F = InertiaAction(X)
    assert F.pairs == ((0, 0), (1, 0), (2, 0))
    assert F.pi.alpha == (0, 1, 2)


def test_inertia_of_free_swap():
    F = InertiaAction(swap_ab())
    assert F.pairs == ((0, 0), (1, 0))
    assert len(F.orbits) == 1
    assert F.stabilizer_elements(0) == [0]


def test_inertia_of_s3_on_point():
    F = InertiaAction(point(S3))
    assert len(F.pairs) == 6
    assert len(F.orbits) == 3
    classes = {frozenset(c) for c in conjugacy_classes(S3)}
    assert {frozenset(F.pairs[i][1] for i in orb) for orb in F.orbits} == classes
    for i, (_, h) in enumerate(F.pairs):
        assert F.stabilizer_elements(i) == [g for g in S3.elements() if S3.conj(g, h) == h]


@pytest.mark.parametrize("X", ACTIONS, ids=repr)
def test_pair_count_is_total_fixed_points(X):
    F = InertiaAction(X)
    assert len(F.pairs) == sum(len(fixed_points(X, h)) for h in X.group.elements())
    assert list(F.pairs) == sorted(F.pairs)


def test_double_inertia_of_trivial_group():
    X = GroupAction.trivial(trivial_group(), 2)
    di = double_inertia(X)
    assert len(di.triples) == 2
    assert di.p1.alpha == di.p2.alpha == di.m.alpha == (0, 1)


def test_double_inertia_of_z2_on_point():
    di = double_inertia(point(Z2))
    F = InertiaAction(point(Z2))
    assert len(di.triples) == 4
    k = di.triples.index((0, G_SWAP, G_SWAP))
    assert F.pairs[di.m.alpha[k]] == (0, 0)


def test_double_inertia_of_free_swap():
    assert double_inertia(swap_ab()).triples == ((0, 0, 0), (1, 0, 0))


@pytest.mark.parametrize("X", ACTIONS, ids=repr)
def test_product_map_on_the_diagonal_section(X):
    di = double_inertia(X)
    e = X.group.identity
    for t, (x, h1, h2) in enumerate(di.triples):
        if h1 == e:
            assert di.m.alpha[t] == di.p2.alpha[t]


@pytest.mark.parametrize("X", ACTIONS, ids=repr)
def test_canonical_loop_is_natural(X):
    F = InertiaAction(X)
    loop = F.zeta
    assert isinstance(loop, NaturalLoop)
    G = X.group
    for h in G.elements():
        for i in F.points():
            # the square for the arrow (h, i) commutes in the target
            assert G.table[loop[F.table[h][i]]][h] == G.table[h][loop[i]]


def test_wrong_loop_is_rejected():
    F = InertiaAction(point(S3))
    with pytest.raises(InvariantError):
        NaturalLoop(F.pi, [1] * F.size)


def test_open_embedding_examples():
    X = swap_abc()
    assert is_open_embedding(EquivariantMap.identity(X))
    c = point(Z2)
    assert is_open_embedding(EquivariantMap(c, X, [2]))
    T = trivial_group()
    bad = is_open_embedding(EquivariantMap(point(T), X, [2], [0]))
    assert not bad and bad.witness is not None


def test_open_embeddings_compose():
    X = swap_abc()
    ab = swap_ab()
    inner = EquivariantMap(ab, ab, [0, 1])
    outer = EquivariantMap(ab, X, [0, 1])
    assert is_open_embedding(inner) and is_open_embedding(outer)
    assert is_open_embedding(outer.compose(inner))


def test_equivariance_of_maps_is_checked():
    with pytest.raises(InvariantError):
        EquivariantMap(swap_ab(), swap_abc(), [0, 2])


def test_inertia_action_differs_from_plain_action_with_same_table():
    X = swap_ab()
    F = InertiaAction(X)
    assert F.table == X.table
    assert F != X and X != F
