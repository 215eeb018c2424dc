"""The twisted product of fixed-point quotients matches functions on inertia pairs."""

from __future__ import annotations

from orbidouble import GroupAction, compare_with_inertia, ring_B, symmetric_group
from orbidouble.rings import fixed_point_dims

G = symmetric_group(3)
X = GroupAction.natural(G)
p = 7

for h, dim, fixed in fixed_point_dims(X, p):
    print(f"h = {G.labels[h]}: dim A/<h(a) - a> = {dim}, |X^h| = {fixed}")

B = ring_B(X, p)
cmp = compare_with_inertia(B)
print(f"dim B = {B.dim}")
print(f"bijective {cmp.bijective}, unital {cmp.unital}, "
      f"multiplicative {cmp.multiplicative}, equivariant {cmp.equivariant}")
