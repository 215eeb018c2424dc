from __future__ import annotations

import time

import numpy as np
import pytest

from cases import G_SWAP, S3, Z2, abc_atlas, point, sign_module, swap_ab, swap_abc
from orbidouble import linalg as la
from orbidouble.atlas import (Atlas, Chart, ChartMorphism, CocartesianSection,
                              RelativeDoubleSection, chartwise_double_counts, descend,
                              glue_double, inertia_atlas, lift_endomorphism_dim, restrict,
                              restrict_double, sections_equivalence_check, validate_atlas)
from orbidouble.double import theta, verify_half_braiding
from orbidouble.errors import IncompatibleSectionError, InvariantError
from orbidouble.groups import trivial_group
from orbidouble.gsets import EquivariantMap, GroupAction, InertiaAction
from orbidouble.modules import (ModuleMap, construct_simples, count_simples, find_isomorphism,
                                make_module, pullback, random_module, unit)


def twisted_atlas() -> Atlas:
    """The ``{a,b}`` chart and the whole base, joined by the morphism that swaps
    ``a`` and ``b`` and records the 2-morphism ``g``."""
    base = swap_abc()
    ab = swap_ab()
    charts = [Chart(ab, EquivariantMap(ab, base, [0, 1]), "ab"),
              Chart(base, EquivariantMap.identity(base), "all")]
    flip = ChartMorphism(charts, 0, 1, EquivariantMap(ab, base, [1, 0]), [G_SWAP, G_SWAP])
    plain = ChartMorphism(charts, 0, 1, EquivariantMap(ab, base, [0, 1]), [0, 0])
    return Atlas(base, charts, [flip, plain])


def test_validate_examples():
    assert validate_atlas(Atlas.single(swap_abc()))
    assert validate_atlas(abc_atlas())
    A = abc_atlas()
    dropped = Atlas(A.base, A.charts[:1])
    rep = validate_atlas(dropped)
    assert not rep and rep.failures == [("uncovered", 2)]


def test_overlap_condition_needs_a_chart_morphism():
    base = swap_abc()
    charts = [Chart(base, EquivariantMap.identity(base), "one"),
              Chart(base, EquivariantMap.identity(base), "two")]
    rep = validate_atlas(Atlas(base, charts))
    assert not rep and rep.failures[0][0] == "no overlap chart"
    assert validate_atlas(twisted_atlas())


def test_chart_must_be_open_embedding():
    with pytest.raises(InvariantError):
        Chart(point(trivial_group()), EquivariantMap(point(trivial_group()), swap_abc(), [2], [0]))


def test_descend_single_chart():
    M = random_module(swap_abc(), 2, 4, 3)
    A = Atlas.single(M.action)
    desc = descend(A, restrict(A, M))
    assert desc.module == M
    assert desc.isos[0] == ModuleMap.identity(M)


def test_descend_glues_sign_at_c():
    A = abc_atlas()
    sec = CocartesianSection(A, [unit(swap_ab(), 3), sign_module()], [])
    desc = descend(A, sec)
    assert desc.module.dims == (1, 1, 1)
    assert np.array_equal(desc.module.rho[G_SWAP][2], [[2]])
    assert all(E.is_certified_iso() for E in desc.isos)


def test_restrict_examples():
    A = Atlas.single(swap_abc())
    M = random_module(swap_abc(), 2, 8, 3)
    assert restrict(A, M).modules == [M]
    U = unit(swap_abc(), 3)
    sec = restrict(abc_atlas(), U)
    assert sec.modules == [unit(swap_ab(), 3), unit(point(Z2), 3)]


@pytest.mark.parametrize("atlas", [abc_atlas(), twisted_atlas()], ids=["abc", "twisted"])
def test_restrict_then_descend(atlas):
    for seed in range(16):
        M = random_module(atlas.base, 3, seed, 3)
        sec = restrict(atlas, M)
        sec.validate()
        assert all(t.is_iso() for t in sec.transitions)
        desc = descend(atlas, sec)
        assert find_isomorphism(desc.module, M) is not None
        # descend then restrict: the gluing maps identify the sections
        again = restrict(atlas, desc.module)
        for E, Mi, Ni in zip(desc.isos, again.modules, sec.modules):
            assert E.source == Mi and E.target == Ni and E.is_certified_iso()


def test_incompatible_section_is_refused():
    base = point(Z2)
    charts = [Chart(base, EquivariantMap.identity(base), "u"),
              Chart(base, EquivariantMap.identity(base), "v")]
    ident = EquivariantMap.identity(base)
    morphisms = [ChartMorphism(charts, 0, 1, ident, [0]),
                 ChartMorphism(charts, 0, 1, ident, [G_SWAP])]
    A = Atlas(base, charts, morphisms)
    S = sign_module()
    idS = ModuleMap.identity(S)
    with pytest.raises(IncompatibleSectionError):
        descend(A, CocartesianSection(A, [S, S], [idS, idS]))
    # the restricted section uses rho(g^-1) = -1 on the twisted morphism and glues
    good = restrict(A, S)
    assert np.array_equal(good.transitions[1].blocks[0], [[2]])
    assert descend(A, good).module == S


def test_non_invertible_transition_is_refused():
    base = point(Z2)
    charts = [Chart(base, EquivariantMap.identity(base), "u"),
              Chart(base, EquivariantMap.identity(base), "v")]
    A = Atlas(base, charts, [ChartMorphism(charts, 0, 1, EquivariantMap.identity(base), [0])])
    M = make_module(base, 3, [2], [[la.identity(2)], [la.identity(2)]])
    zero = ModuleMap(M, M, [la.zeros(2, 2)])
    with pytest.raises(IncompatibleSectionError):
        CocartesianSection(A, [M, M], [zero]).validate()


def test_glue_half_braidings():
    for atlas in (abc_atlas(), twisted_atlas()):
        inert = InertiaAction(atlas.base)
        for seed in range(6):
            D = theta(random_module(inert, 2, seed, 3))
            rel = restrict_double(atlas, D)
            rel.validate()
            glued, _ = glue_double(atlas, rel)
            assert verify_half_braiding(glued)


def test_relative_section_built_chartwise_glues():
    # chart data chosen independently on the two disjoint charts
    A = abc_atlas()
    ab_inert = InertiaAction(swap_ab())
    c_inert = InertiaAction(point(Z2))
    for seed in range(6):
        Dab = theta(random_module(ab_inert, 2, seed, 3))
        Dc = theta(random_module(c_inert, 2, seed + 1, 3))
        sec = CocartesianSection(A, [Dab.module, Dc.module], [])
        glued, _ = glue_double(A, RelativeDoubleSection(sec, [Dab, Dc]))
        assert verify_half_braiding(glued)


def test_cocartesian_lifts_are_unique():
    A = abc_atlas()
    for D in (theta(S) for S in construct_simples(InertiaAction(A.base), 3)):
        for chart in A.charts:
            lifted = pullback(chart.embed, D.module)
            want = 1 if lifted.total_dim else 0
            assert lift_endomorphism_dim(chart.embed, D) == want


def test_chartwise_counts_sum_to_inertia_count():
    A = abc_atlas()
    assert chartwise_double_counts(A) == [1, 4]
    assert count_simples(InertiaAction(A.base), 3) == 5


def test_sections_equivalence():
    assert sections_equivalence_check(Atlas.single(swap_abc()), trials=4)
    t = time.perf_counter()
    rep = sections_equivalence_check(abc_atlas())
    assert rep, rep.failures
    assert time.perf_counter() - t < 10
    assert sections_equivalence_check(twisted_atlas(), trials=8)


def test_inertia_atlas_examples():
    base = GroupAction.natural(S3)
    single = inertia_atlas(Atlas.single(base))
    assert single.base == InertiaAction(base)
    assert single.charts[0].embed.alpha == tuple(range(single.base.size))
    ia = inertia_atlas(abc_atlas())
    F = ia.base
    assert [F.pairs[i] for i in ia.charts[0].embed.alpha] == [(0, 0), (1, 0)]
    assert [F.pairs[i] for i in ia.charts[1].embed.alpha] == [(2, 0), (2, G_SWAP)]
    assert validate_atlas(ia)
    assert validate_atlas(inertia_atlas(twisted_atlas()))


def test_inertia_atlas_of_trivial_group():
    T = trivial_group()
    base = GroupAction.trivial(T, 2)
    one = point(T)
    A = Atlas(base, [Chart(one, EquivariantMap(one, base, [0])),
                     Chart(one, EquivariantMap(one, base, [1]))])
    ia = inertia_atlas(A)
    assert [c.embed.alpha for c in ia.charts] == [c.embed.alpha for c in A.charts]
    assert ia.base.pairs == ((0, 0), (1, 0))
