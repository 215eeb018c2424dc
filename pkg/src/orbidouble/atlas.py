"""Charts, atlases and gluing of chart-wise data.

A chart is an action ``H on U`` with an open embedding into the base action
``G on X``. A chart morphism ``k -> i`` is an equivariant map between local
actions together with a 2-morphism ``theta`` in the base:
``theta(w) . embed_k(w) = embed_i(map(w))``. Identity morphisms are implicit.

A cocartesian section holds one module per chart and, for every morphism
``a : k -> i``, an isomorphism ``t_a : a^* M_i -> M_k``. Descent glues such
data to a base module, and the same recipe glues chart-wise half-braidings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg as la
from .double import (HalfBraidedModule, double_hom_space, is_half_braided_iso, theta,
                     verify_half_braiding)
from .errors import IncompatibleSectionError, InvariantError, MismatchError
from .gsets import (EmbeddingCheck, EquivariantMap, GroupAction, InertiaAction,
                    TwoMorphism, inertia_map, is_open_embedding)
from .groups import conjugacy_classes, splitting_prime
from .linalg import PrimeField
from .modules import (EquivariantModule, ModuleMap, adjunction_counit, construct_simples,
                      count_simples, direct_sum, find_isomorphism, hom_dim, make_module,
                      _field, pullback, pushforward, random_combination, random_module, zero_module)


class Chart:
    """A local action with a certified open embedding into the base."""

    def __init__(self, local: GroupAction, embed: EquivariantMap, name: str | None = None):
        if embed.source != local:
            raise MismatchError("embedding does not start at the chart's action")
        cert = is_open_embedding(embed)
        if not cert:
            raise InvariantError("chart map is an open embedding", cert.witness, cert.reason)
        self.local = local
        self.embed = embed
        self.certificate: EmbeddingCheck = cert
        self.name = name

    @property
    def base(self) -> GroupAction:
        return self.embed.target

    def __repr__(self):
        return f"Chart({self.name or ''} {self.local!r})"


class ChartMorphism:
    """``source -> target`` between chart indices, with its base 2-morphism."""

    def __init__(self, charts: Sequence[Chart], source: int, target: int, map: EquivariantMap,
                 theta: Sequence[int]):
        ck, ci = charts[source], charts[target]
        if map.source != ck.local or map.target != ci.local:
            raise MismatchError("chart morphism does not connect the named charts")
        self.source = source
        self.target = target
        self.map = map
        self.theta = TwoMorphism(ck.embed, ci.embed.compose(map), theta)

    def __repr__(self):
        return f"ChartMorphism({self.source} -> {self.target})"


class Atlas:
    """Charts and morphisms over a common base action."""

    def __init__(self, base: GroupAction, charts: Sequence[Chart],
                 morphisms: Sequence[ChartMorphism] = ()):
        for c in charts:
            if c.base != base:
                raise MismatchError("chart embeds into a different base")
        self.base = base
        self.charts = list(charts)
        self.morphisms = list(morphisms)

    @classmethod
    def single(cls, base: GroupAction) -> Atlas:
        return cls(base, [Chart(base, EquivariantMap.identity(base), "whole")])


@dataclass
class AtlasReport:
    failures: list[tuple[str, object]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.passed


def _orbits_hit(chart: Chart) -> set[int]:
    base = chart.base
    return {base.orbit_index[y] for y in chart.embed.alpha}


def _arrows(atlas: Atlas, k: int, i: int) -> list[ChartMorphism | None]:
    """Morphisms ``k -> i``; ``None`` stands for the identity when ``k == i``."""
    out: list[ChartMorphism | None] = [None] if k == i else []
    out.extend(m for m in atlas.morphisms if m.source == k and m.target == i)
    return out


def validate_atlas(atlas: Atlas) -> AtlasReport:
    """Surjectivity on isomorphism classes and the overlap condition.

    Points of the base are taken up to isomorphism, i.e. as orbits; the
    witness for a failure is the smallest point of the offending orbit.
    """
    report = AtlasReport()
    base = atlas.base
    hits = [_orbits_hit(c) for c in atlas.charts]
    for o, orb in enumerate(base.orbits):
        if not any(o in h for h in hits):
            report.failures.append(("uncovered", orb[0]))
    n = len(atlas.charts)
    for i in range(n):
        for j in range(i + 1, n):
            for o in sorted(hits[i] & hits[j]):
                if not any(o in hits[k] and _arrows(atlas, k, i) and _arrows(atlas, k, j)
                           for k in range(n)):
                    report.failures.append(("no overlap chart", (i, j, base.orbits[o][0])))
    return report


# -- sections ---------------------------------------------------------------------------


@dataclass
class CocartesianSection:
    """One module per chart and ``t_a : a^* M_target -> M_source`` per morphism."""

    atlas: Atlas
    modules: list[EquivariantModule]
    transitions: list[ModuleMap]

    def validate(self) -> None:
        """Every transition is an invertible module map (so cartesian arrows are
        cocartesian), and recorded composites respect the cocycle."""
        for idx, (m, t) in enumerate(zip(self.atlas.morphisms, self.transitions)):
            if t.source.dims != pullback(m.map, self.modules[m.target]).dims or \
                    t.target.dims != self.modules[m.source].dims:
                raise IncompatibleSectionError("transition has the right shape", idx)
            if not t.is_module_map() or not t.is_iso():
                raise IncompatibleSectionError("transition is an isomorphism", idx)
        for a_idx, a in enumerate(self.atlas.morphisms):
            for b_idx, b in enumerate(self.atlas.morphisms):
                if b.target != a.source:
                    continue
                for c_idx, c in enumerate(self.atlas.morphisms):
                    if c.source != b.source or c.target != a.target:
                        continue
                    if c.map != a.map.compose(b.map) or not _theta_composes(a, b, c):
                        continue
                    p = self.modules[0].p
                    ta, tb, tc = (self.transitions[i] for i in (a_idx, b_idx, c_idx))
                    for v in self.atlas.charts[b.source].local.points():
                        lhs = la.matmul(tb.blocks[v], ta.blocks[b.map.alpha[v]], p)
                        if not np.array_equal(lhs, tc.blocks[v]):
                            raise IncompatibleSectionError("cocycle t_c = t_b b^*(t_a)",
                                                           (a_idx, b_idx, c_idx, v))


def _theta_composes(a: ChartMorphism, b: ChartMorphism, c: ChartMorphism) -> bool:
    G = a.theta.first.target.group
    return all(c.theta[w] == G.table[a.theta[b.map.alpha[w]]][b.theta[w]]
               for w in range(len(c.theta.elements)))


def _transition(m: ChartMorphism, atlas: Atlas, M: EquivariantModule, Mi: EquivariantModule,
                Mk: EquivariantModule) -> ModuleMap:
    G = atlas.base.group
    ci = atlas.charts[m.target]
    blocks = []
    for w in atlas.charts[m.source].local.points():
        y = ci.embed.alpha[m.map.alpha[w]]
        blocks.append(M.rho[G.inverse[m.theta[w]]][y])
    return ModuleMap(pullback(m.map, Mi), Mk, blocks, check=False)


def restrict(atlas: Atlas, M: EquivariantModule) -> CocartesianSection:
    """Pull ``M`` back to every chart; ``t_a(w) = rho_M(theta_a(w)^-1)``."""
    if M.action != atlas.base:
        raise MismatchError("module does not live on the atlas base")
    mods = [pullback(c.embed, M) for c in atlas.charts]
    trans = [_transition(m, atlas, M, mods[m.target], mods[m.source]) for m in atlas.morphisms]
    return CocartesianSection(atlas, mods, trans)


def _assignment(atlas: Atlas) -> list[int]:
    """For every base orbit, the first chart that covers it."""
    out = []
    for o in range(len(atlas.base.orbits)):
        for c, chart in enumerate(atlas.charts):
            if o in _orbits_hit(chart):
                out.append(c)
                break
        else:
            raise InvariantError("atlas covers every orbit", atlas.base.orbits[o][0])
    return out


def _restrict_to_orbits(M: EquivariantModule, keep: set[int]) -> EquivariantModule:
    """Zero out the fibers of ``M`` outside the local points in ``keep``."""
    act = M.action
    dims = [M.dims[u] if u in keep else 0 for u in act.points()]
    rho = [[M.rho[g][u] if u in keep else la.zeros(0, 0) for u in act.points()]
           for g in act.group.elements()]
    return make_module(act, M.field, dims, rho, check=False)


@dataclass
class Descent:
    """A glued base module with certified isomorphisms ``embed_i^* M -> M_i``."""

    module: EquivariantModule
    isos: list[ModuleMap]


def descend(atlas: Atlas, section: CocartesianSection) -> Descent:
    """Glue a cocartesian section to a module on the base.

    Each base orbit is built from the first chart covering it; the
    comparison with every other chart is transported through a span of
    chart morphisms. All comparison maps and their compatibility with every
    transition are certified, otherwise :class:`IncompatibleSectionError` is
    raised.
    """
    report = validate_atlas(atlas)
    if not report:
        raise InvariantError("atlas is valid", report.failures[0])
    section.validate()
    base = atlas.base
    field = section.modules[0].field
    p = field.p
    assign = _assignment(atlas)
    parts, counits = [], {}
    for c, chart in enumerate(atlas.charts):
        orbits = {o for o, cc in enumerate(assign) if cc == c}
        if not orbits:
            continue
        keep = {u for u in chart.local.points() if base.orbit_index[chart.embed.alpha[u]] in orbits}
        Mc = _restrict_to_orbits(section.modules[c], keep)
        parts.append(pushforward(chart.embed, Mc))
        counits[c] = (adjunction_counit(chart.embed, Mc), keep)
    M = direct_sum(*parts) if parts else zero_module(base, field)

    def counit_block(c: int, u: int) -> np.ndarray:
        # the summand of chart c sits alone in the fiber, so its counit block is the whole map
        return counits[c][0].blocks[u]

    def rho_block(g: int, y: int) -> np.ndarray:
        return M.rho[g][y]

    isos = []
    for i, chart in enumerate(atlas.charts):
        Mi = section.modules[i]
        blocks: list[np.ndarray | None] = [None] * chart.local.size
        for orb in chart.local.orbits:
            w0 = orb[0]
            o = base.orbit_index[chart.embed.alpha[w0]]
            c = assign[o]
            E0 = _span_transport(atlas, section, i, c, o, w0, counit_block, rho_block, p)
            H = chart.local.group
            for h in H.elements():
                w = chart.local.table[h][w0]
                if blocks[w] is not None:
                    continue
                g = chart.embed.gamma(h)
                y0 = chart.embed.alpha[w0]
                blocks[w] = la.mat_chain(p, Mi.rho[h][w0], E0, la.inverse(rho_block(g, y0), p))
        src = pullback(chart.embed, M)
        E = ModuleMap(src, Mi, blocks, check=False)
        if not E.is_module_map() or not E.is_iso():
            raise IncompatibleSectionError("gluing map is an isomorphism of modules", i)
        isos.append(E)
    for idx, m in enumerate(atlas.morphisms):
        t = section.transitions[idx]
        ck = atlas.charts[m.source]
        for v in ck.local.points():
            lhs = la.mat_chain(p, t.blocks[v], isos[m.target].blocks[m.map.alpha[v]],
                               rho_block(m.theta[v], ck.embed.alpha[v]))
            if not np.array_equal(lhs, isos[m.source].blocks[v]):
                raise IncompatibleSectionError("gluing maps commute with transitions", (idx, v))
    return Descent(M, isos)


def _span_transport(atlas, section, i, c, o, w, counit_block, rho_block, p) -> np.ndarray:
    """``embed_i^* M -> M_i`` at one point ``w`` over orbit ``o`` built from chart ``c``.

    Uses a chart ``k`` with morphisms ``a : k -> c`` and ``b : k -> i`` and a
    point ``v`` of ``k`` over ``o``; the result lives at ``b(v)``, which is
    moved to ``w`` by the caller's orbit extension only if it differs.
    """
    base = atlas.base
    G = base.group
    chart_i = atlas.charts[i]
    for k, ck in enumerate(atlas.charts):
        for a in _arrows(atlas, k, c):
            for b in _arrows(atlas, k, i):
                for v in ck.local.points():
                    if base.orbit_index[ck.embed.alpha[v]] != o:
                        continue
                    av = v if a is None else a.map.alpha[v]
                    bv = v if b is None else b.map.alpha[v]
                    th_a = G.identity if a is None else a.theta[v]
                    th_b = G.identity if b is None else b.theta[v]
                    Mk = section.modules[k]
                    ta = la.identity(Mk.dims[v]) if a is None else \
                        section.transitions[atlas.morphisms.index(a)].blocks[v]
                    tb = la.identity(Mk.dims[v]) if b is None else \
                        section.transitions[atlas.morphisms.index(b)].blocks[v]
                    yk = ck.embed.alpha[v]
                    yi = chart_i.embed.alpha[bv]
                    Ev = la.mat_chain(p, la.inverse(tb, p), ta, counit_block(c, av),
                                      rho_block(th_a, yk), rho_block(G.inverse[th_b], yi))
                    if bv == w:
                        return Ev
                    # move from b(v) to w inside chart i
                    H = chart_i.local.group
                    h = next(h for h in H.elements() if chart_i.local.table[h][bv] == w)
                    g = chart_i.embed.gamma(h)
                    Mi = section.modules[i]
                    return la.mat_chain(p, Mi.rho[h][bv], Ev, la.inverse(rho_block(g, yi), p))
    raise InvariantError("overlap chart exists for the pair", (i, c, base.orbits[o][0]))


# -- half-braided data on charts ----------------------------------------------------------


def pullback_half_braiding(f: EquivariantMap, D: HalfBraidedModule) -> HalfBraidedModule:
    """``phi(h', w) = phi_D(gamma(h'), alpha(w))`` on ``f^* M``; the cocartesian lift
    along an open embedding."""
    if D.action != f.target:
        raise MismatchError("half-braided module does not live on the map's target")
    M = pullback(f, D.module)
    phi = {}
    for h in f.source.group.elements():
        for w in f.source.points():
            if f.source.table[h][w] == w:
                phi[(h, w)] = D.phi[f.gamma(h)][f.alpha[w]]
    return HalfBraidedModule(M, phi, check=False)


cocartesian_lift = pullback_half_braiding


@dataclass
class RelativeDoubleSection:
    """A cocartesian section whose chart modules carry phi-families respected by
    the transitions."""

    section: CocartesianSection
    doubles: list[HalfBraidedModule]

    def validate(self) -> None:
        self.section.validate()
        atlas = self.section.atlas
        for idx, (m, t) in enumerate(zip(atlas.morphisms, self.section.transitions)):
            lifted = pullback_half_braiding(m.map, self.doubles[m.target])
            if not is_half_braided_iso(t, lifted, self.doubles[m.source]):
                raise IncompatibleSectionError("transition respects phi-families", idx)


def restrict_double(atlas: Atlas, D: HalfBraidedModule) -> RelativeDoubleSection:
    sec = restrict(atlas, D.module)
    doubles = [pullback_half_braiding(c.embed, D) for c in atlas.charts]
    return RelativeDoubleSection(sec, doubles)


def glue_double(atlas: Atlas, rel: RelativeDoubleSection) -> tuple[HalfBraidedModule, Descent]:
    """Descend the modules, then carry each chart's phi-family to the base along the
    gluing isomorphisms of the chart that owns the orbit."""
    rel.validate()
    desc = descend(atlas, rel.section)
    M, base = desc.module, atlas.base
    G, p = base.group, M.p
    assign = _assignment(atlas)
    phi = {}
    for y in base.points():
        o = base.orbit_index[y]
        c = assign[o]
        chart = atlas.charts[c]
        u = next(u for u in chart.local.points() if base.orbit_index[chart.embed.alpha[u]] == o)
        y0 = chart.embed.alpha[u]
        g = next(g for g in G.elements() if base.table[g][y0] == y)
        E = desc.isos[c].blocks[u]
        Einv = la.inverse(E, p)
        r, rinv = M.rho[g][y0], la.inverse(M.rho[g][y0], p)
        for h in chart.local.group.elements():
            if chart.local.table[h][u] != u:
                continue
            at_y0 = la.mat_chain(p, Einv, rel.doubles[c].phi[h][u], E)
            phi[(G.conj(g, chart.embed.gamma(h)), y)] = la.mat_chain(p, r, at_y0, rinv)
    D = HalfBraidedModule(M, phi, check=False)
    for i, chart in enumerate(atlas.charts):
        if not is_half_braided_iso(desc.isos[i], pullback_half_braiding(chart.embed, D),
                                   rel.doubles[i]):
            raise IncompatibleSectionError("glued phi-family restricts to the chart data", i)
    return D, desc


def lift_endomorphism_dim(f: EquivariantMap, D: HalfBraidedModule) -> int:
    """Dimension of the endomorphisms of the cocartesian lift of ``D`` along ``f``."""
    L = pullback_half_braiding(f, D)
    return len(double_hom_space(L, L))


# -- inertia atlas and counts ------------------------------------------------------------------


def inertia_atlas(atlas: Atlas) -> Atlas:
    """Charts ``(coprod_h U^h, H)`` embedded into the inertia of the base."""
    ibase = InertiaAction(atlas.base)
    locals_ = [InertiaAction(c.local) for c in atlas.charts]
    charts = [Chart(loc, inertia_map(c.embed, loc, ibase), c.name and f"I{c.name}")
              for c, loc in zip(atlas.charts, locals_)]
    morphisms = []
    for m in atlas.morphisms:
        src, tgt = locals_[m.source], locals_[m.target]
        imap = inertia_map(m.map, src, tgt)
        theta = [m.theta[w] for w, _ in src.pairs]
        morphisms.append(ChartMorphism(charts, m.source, m.target, imap, theta))
    return Atlas(ibase, charts, morphisms)


def chartwise_double_counts(atlas: Atlas) -> list[int]:
    """Per chart, the number of simple half-braided modules on the base orbits that
    chart owns (``sum`` over inertia orbits of stabilizer class counts)."""
    assign = _assignment(atlas)
    base = atlas.base
    out = []
    for c, chart in enumerate(atlas.charts):
        owned = {o for o, cc in enumerate(assign) if cc == c}
        inert = InertiaAction(chart.local)
        total = 0
        for orb in inert.orbits:
            w = inert.pairs[orb[0]][0]
            if base.orbit_index[chart.embed.alpha[w]] in owned:
                total += len(conjugacy_classes(inert.stabilizer(orb[0]).domain))
        out.append(total)
    return out


def check_descent_panel(atlas: Atlas, panel: Sequence[EquivariantModule]) -> AtlasReport:
    """Restrict then descend every panel module and certify the round trip."""
    report = AtlasReport()
    for n, M in enumerate(panel):
        try:
            desc = descend(atlas, restrict(atlas, M))
        except InvariantError as exc:
            report.failures.append(("descend", (n, exc.invariant)))
            continue
        if find_isomorphism(desc.module, M) is None or hom_dim(desc.module, M) != hom_dim(M, M):
            report.failures.append(("restrict-descend round trip", n))
    return report


def check_double_panel(atlas: Atlas, panel: Sequence[HalfBraidedModule]) -> AtlasReport:
    """Restrict half-braided modules to charts, glue them back, and certify the result."""
    report = AtlasReport()
    for n, D in enumerate(panel):
        try:
            glued, desc = glue_double(atlas, restrict_double(atlas, D))
        except InvariantError as exc:
            report.failures.append(("glue", (n, exc.invariant)))
            continue
        if not verify_half_braiding(glued, panel=[]):
            report.failures.append(("glued phi-family", n))
            continue
        basis = double_hom_space(glued, D)
        rng = np.random.default_rng(n)
        if not any(random_combination(basis, rng).is_iso() for _ in range(16)) and D.module.total_dim:
            report.failures.append(("glued module matches", n))
    return report


def sections_equivalence_check(atlas: Atlas, field=None, seed: int = 0, trials: int = 32,
                               max_dim: int = 2) -> AtlasReport:
    """Descent for modules and for half-braided modules on a seeded panel.

    The module panel is every base simple plus ``trials`` random modules; the
    double panel is every Theta-image of an inertia simple plus ``trials``
    Theta-images of random inertia modules. Also compares the chart-wise
    simple counts of the double with the inertia count of the base.
    """
    report = validate_atlas(atlas)
    if not report:
        return report
    base = atlas.base
    field = PrimeField(splitting_prime(base.group)) if field is None else _field(field)
    mods = list(construct_simples(base, field))
    mods += [random_module(base, max_dim, seed + n, field) for n in range(trials)]
    report.failures += check_descent_panel(atlas, mods).failures
    inert = InertiaAction(base)
    doubles = [theta(s) for s in construct_simples(inert, field)]
    doubles += [theta(random_module(inert, max_dim, seed + n, field)) for n in range(trials)]
    report.failures += check_double_panel(atlas, doubles).failures
    counts = chartwise_double_counts(atlas)
    if sum(counts) != count_simples(inert, field):
        report.failures.append(("chart-wise double count", (counts, count_simples(inert, field))))
    return report

