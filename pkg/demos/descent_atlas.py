"""Restrict a module to a two-chart atlas, glue it back, and do the same for a half-braided module."""

from __future__ import annotations

from orbidouble import (Atlas, Chart, GroupAction, InertiaAction, cyclic_group, descend,
                        glue_double, random_module, restrict, restrict_double, theta,
                        validate_atlas)
from orbidouble.atlas import chartwise_double_counts, sections_equivalence_check
from orbidouble.gsets import EquivariantMap
from orbidouble.modules import find_isomorphism

G = cyclic_group(2)
base = GroupAction.from_generator_images(G, {1: [1, 0, 2]}, 3)  # swap a, b; fix c
ab = GroupAction.from_generator_images(G, {1: [1, 0]}, 2)
c = GroupAction.point(G)
atlas = Atlas(base, [Chart(ab, EquivariantMap(ab, base, [0, 1]), "ab"),
                     Chart(c, EquivariantMap(c, base, [2]), "c")])
p = 3
print(f"atlas valid: {validate_atlas(atlas).passed}")

M = random_module(base, 2, 4, p)
glued = descend(atlas, restrict(atlas, M))
print(f"module dims {M.dims} glued back to {glued.module.dims}, "
      f"isomorphic: {find_isomorphism(M, glued.module) is not None}")

D = theta(random_module(InertiaAction(base), 2, 9, p))
D2, _ = glue_double(atlas, restrict_double(atlas, D))
print(f"half-braided module glued back with dims {D2.module.dims}, valid: {not D2.violations()}")

print(f"chart-wise double simples: {chartwise_double_counts(atlas)}")
print(f"seeded equivalence panel passed: {sections_equivalence_check(atlas, p, trials=4).passed}")
