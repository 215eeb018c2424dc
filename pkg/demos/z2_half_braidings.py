"""Brute-force enumeration of half-braidings on small Z2-modules, compared with the inertia side."""

from __future__ import annotations

import numpy as np

from orbidouble import (GroupAction, InertiaAction, cyclic_group, enumerate_half_braidings,
                        extract, random_module, theta)
from orbidouble.double import theta_families_on
from orbidouble.modules import make_module

G = cyclic_group(2)
X = GroupAction.point(G)
inert = InertiaAction(X)
p = 3

for seed in range(4):
    M = random_module(X, 2, seed, p)
    found = enumerate_half_braidings(M)
    predicted = theta_families_on(M, inert)
    keys = sorted(D.key() for D in found)
    agree = keys == sorted(D.key() for D in predicted)
    print(f"module dims {M.dims}: {len(found)} half-braidings by search, "
          f"{len(predicted)} from inertia modules, agree: {agree}")

# each half-braiding of the sign module extracts to a single inertia pair
sign = make_module(X, p, [1], [[[[1]]], [[[p - 1]]]])
for D in enumerate_half_braidings(sign):
    Mi, _ = extract(D, inert)
    support = [inert.pairs[i] for i, d in enumerate(Mi.dims) if d]
    print(f"phi(g) = {int(np.asarray(D.phi[1][0])[0, 0])} -> support {support}")
    assert theta(Mi).module.dims == D.module.dims
