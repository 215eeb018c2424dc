"""Inertia of S3 acting on three points, and simple counts of the three categories."""

from __future__ import annotations

from orbidouble import (GroupAction, InertiaAction, construct_simples, count_simples,
                        splitting_prime, symmetric_group, theta)

G = symmetric_group(3)
X = GroupAction.natural(G)
inert = InertiaAction(X)
p = splitting_prime(G)

print(f"|G| = {G.order}, |X| = {X.size}, prime = {p}")
print(f"inertia pairs (x, h) with h.x = x: {len(inert.pairs)}")
for orb in inert.orbits:
    x, h = inert.pairs[orb[0]]
    print(f"  orbit of ({x}, {G.labels[h]}): {len(orb)} pairs")

print(f"simples on X: {count_simples(X, p)}")
print(f"simples on the inertia: {count_simples(inert, p)}")
doubles = [theta(S) for S in construct_simples(inert, p)]
print(f"half-braided images of inertia simples: {len(doubles)}, all valid: "
      f"{all(not D.violations() for D in doubles)}")
