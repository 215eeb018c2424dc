"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

from __future__ import annotations

import itertools
import json
import time

import numpy as np
import pytest

from cases import G_SWAP, S3, Z2, Z3, Z4, abc_atlas, point, swap_ab, swap_abc
from orbidouble import linalg as la
from orbidouble.atlas import (chartwise_double_counts, check_descent_panel, descend, glue_double,
                              restrict, restrict_double, validate_atlas)
from orbidouble.cli import main
from orbidouble.double import (HalfBraidedModule, double_braiding, double_hom_space,
                               double_tensor, enumerate_half_braidings, extract, hexagon_defects,
                               is_half_braided_iso, is_half_braided_map, round_trip_double,
                               round_trip_inertia, tau_apply, theta, theta_families_on,
                               theta_monoidal_iso, verify_half_braiding)
from orbidouble.groups import (centralizer, conjugacy_classes, cyclic_group, direct_product,
                               splitting_prime)
from orbidouble.gsets import GroupAction, InertiaAction, double_inertia, fixed_points
from orbidouble.modules import (ModuleMap, construct_simples, count_simples, direct_sum,
                                find_isomorphism, make_module, projection_iso, random_module,
                                swap, tensor_maps)
from orbidouble.rings import compare_with_inertia, fixed_point_dims, ring_B


@pytest.fixture
def verdict(capsys):
    """Print ``criterion N: PASS|FAIL ...`` outside pytest's capture, then assert."""
    def emit(number: int, title: str, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\ncriterion {number} {'PASS' if ok else 'FAIL'}: {title}; {detail}")
        assert ok, f"criterion {number} failed: {detail}"
    return emit


def _rebased(M, rng):
    """``M`` transported along a random change of basis ``Q_x`` in every fiber."""
    p, act = M.p, M.action
    Q = [la.random_invertible(rng, d, p) for d in M.dims]
    rho = [[la.mat_chain(p, Q[act.table[g][x]], M.rho[g][x], la.inverse(Q[x], p))
            for x in act.points()] for g in act.group.elements()]
    return make_module(act, M.field, M.dims, rho), Q


# 1 -------------------------------------------------------------------------------------


def test_criterion_1_oracle_equals_theta_images(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    instances = [("Z2 on a point", point(Z2), 3), ("Z3 on a point", point(Z3), 7),
                 ("Z2 swapping two points", swap_ab(), 3)]
    checked, bad = 0, []
    for name, action, p in instances:
        base = construct_simples(action, p)
        # every isomorphism class of total dimension at most 2, plus rebased copies
        panel = [direct_sum(*c) for r in (1, 2)
                 for c in itertools.combinations_with_replacement(base, r)]
        panel = [M for M in panel if M.total_dim <= 2]
        panel += [_rebased(M, rng)[0] for M in panel if M.total_dim > 1]
        for M in panel:
            brute = {D.key() for D in enumerate_half_braidings(M)}
            images = {D.key() for D in theta_families_on(M)}
            checked += 1
            if brute != images or not brute:
                bad.append((name, M.dims))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 10
    verdict(1, "brute-force phi-families equal Theta-images (set equality, zero tolerance)", ok,
            f"{checked} modules, mismatches={bad}, {elapsed:.2f}s (bound 10s)")


# 2 -------------------------------------------------------------------------------------


ROUND_TRIP_ACTIONS = [
    (point(Z2), 3), (point(Z3), 7), (point(S3), 7), (swap_ab(), 3), (swap_abc(), 3),
    (GroupAction.natural(S3), 7),
    (GroupAction.from_generator_images(cyclic_group(4), {1: [1, 2, 3, 0]}, 4), 5),
    (GroupAction.from_generator_images(direct_product(Z2, Z2), {1: [1, 0, 2, 3], 2: [0, 1, 3, 2]},
                                       4), 3),
]


def test_criterion_2_round_trips(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    count, bad = 0, []
    for k in range(104):
        action, p = ROUND_TRIP_ACTIONS[k % len(ROUND_TRIP_ACTIONS)]
        assert action.group.order <= 6 and action.size <= 4
        inert = InertiaAction(action)
        Mi = random_module(inert, 3, 1000 + k, p)
        assert max(Mi.dims, default=0) <= 3
        if not round_trip_inertia(Mi).is_certified_iso():
            bad.append(("extract o theta", k))
        # a half-braided module in a scrambled basis, then theta o extract
        D0 = theta(Mi)
        D = _scrambled(D0, rng)
        back, c = round_trip_double(D)
        if not (c.is_certified_iso() and is_half_braided_iso(c, back, D)):
            bad.append(("theta o extract", k))
        count += 1
    elapsed = time.perf_counter() - t0
    ok = not bad and count >= 100 and elapsed < 30
    verdict(2, "extract/theta round trips are certified isomorphisms", ok,
            f"{count} random inertia modules, failures={bad}, {elapsed:.2f}s (bound 30s)")


def _scrambled(D, rng):
    """The same half-braided module written in a random basis of every fiber."""
    N, Q = _rebased(D.module, rng)
    p, act = D.p, D.action
    phi = {(h, x): la.mat_chain(p, Q[x], D.phi[h][x], la.inverse(Q[x], p))
           for h in act.group.elements() for x in act.points() if act.table[h][x] == x}
    return HalfBraidedModule(N, phi)


# 3 -------------------------------------------------------------------------------------


def _expected_counts(G):
    classes = conjugacy_classes(G)
    inertia = sum(len(conjugacy_classes(centralizer(G, c[0]).domain)) for c in classes)
    return len(classes), inertia, inertia


def test_criterion_3_simple_counts(verdict):
    rows, bad = [], []
    for G in (Z2, Z3, Z4, S3):
        p = splitting_prime(G)
        X = point(G)
        inert = InertiaAction(X)
        simples = construct_simples(inert, p)
        doubles = [theta(S) for S in simples]
        distinct = all(len(double_hom_space(a, b)) == (i == j)
                       for i, a in enumerate(doubles) for j, b in enumerate(doubles))
        # the round trip carries each simple back to itself, so Theta is a bijection on simples
        bijective = all(round_trip_inertia(S).is_certified_iso() for S in simples) and all(
            find_isomorphism(extract(D)[0], S) is not None for D, S in zip(doubles, simples))
        got = (count_simples(X, p), count_simples(inert, p), len(doubles))
        rows.append(f"{G.name}={got}")
        if got != _expected_counts(G) or not distinct or not bijective:
            bad.append(G.name)
    fixed = dict(zip(("Z2", "S3"), (rows[0], rows[3])))
    ok = not bad and fixed["Z2"].endswith("(2, 4, 4)") and fixed["S3"].endswith("(3, 8, 8)")
    verdict(3, "base/inertia/double simple counts (exact)", ok, ", ".join(rows) + f", bad={bad}")


# 4 -------------------------------------------------------------------------------------


def test_criterion_4_axioms(verdict):
    rng = np.random.default_rng(4)
    stats = {"objects": 0, "FT2 pairs": 0, "hexagon triples": 0, "naturality pairs": 0}
    bad = []
    for action, p in [(point(Z2), 3), (point(Z3), 7), (point(Z4), 5), (point(S3), 7),
                      (swap_abc(), 3)]:
        base = list(construct_simples(action, p))
        doubles = [theta(S) for S in construct_simples(InertiaAction(action), p)]
        for D in doubles:
            rep = verify_half_braiding(D, panel=base)
            stats["objects"] += 1
            stats["FT2 pairs"] += len(base) ** 2
            if not rep:
                bad.append(("axioms", rep.names()))
        for a, b, c in itertools.product(doubles, repeat=3):
            stats["hexagon triples"] += 1
            if hexagon_defects(a, b, c):
                bad.append(("hexagon", action, p))
        for A, C in itertools.product(doubles, repeat=2):
            f, g = _double_map(A, A, rng), _double_map(C, C, rng)
            stats["naturality pairs"] += 1
            if double_braiding(A, C) @ tensor_maps(f, g) != tensor_maps(g, f) @ double_braiding(A, C):
                bad.append(("naturality", action, p))
        inert = InertiaAction(action)
        for k in range(4):
            A, B, C, D = (theta(random_module(inert, 2, 40 * k + j, p)) for j in range(4))
            f, g = _double_map(A, B, rng), _double_map(C, D, rng)
            stats["naturality pairs"] += 1
            if double_braiding(B, D) @ tensor_maps(f, g) != tensor_maps(g, f) @ double_braiding(A, C):
                bad.append(("naturality", action, p))
    verdict(4, "FT1/FT2 on Theta-images, hexagons and braiding naturality (entrywise)",
            not bad, ", ".join(f"{k}={v}" for k, v in stats.items()) + f", failures={bad[:3]}")


def _double_map(D1, D2, rng):
    """A random morphism of half-braided modules ``D1 -> D2``."""
    out = ModuleMap(D1.module, D2.module,
                    [la.zeros(b, a) for a, b in zip(D1.module.dims, D2.module.dims)], check=False)
    for f in double_hom_space(D1, D2):
        out = out + f.scale(int(rng.integers(0, D1.p)))
    assert is_half_braided_map(out, D1, D2)
    return out


# 5 -------------------------------------------------------------------------------------


def test_criterion_5_semion_sign(verdict):
    details, ok = [], True
    for p in (3, 5, 7):
        inert = InertiaAction(point(Z2))
        twisted = inert.index[(0, G_SWAP)]
        S = next(S for S in construct_simples(inert, p)
                 if S.dims[twisted] and int(S.rho[G_SWAP][twisted][0, 0]) == p - 1)
        D = theta(S)
        c = double_braiding(D, D)
        scalar = int(c.blocks[0][0, 0])
        # the oracle finds every phi-family on the sign module; the one graded by g
        # is the Theta-image and braids with itself by the same scalar
        sign = D.module
        fams = enumerate_half_braidings(sign)
        graded = [E for E in fams if E.phi[G_SWAP][0].any()]
        forced = len(fams) == 2 and len(graded) == 1 and graded[0].key() == D.key()
        by_formula = int(tau_apply(graded[0], sign).blocks[0][0, 0])
        good = scalar == p - 1 and by_formula == p - 1 and forced and \
            c == swap(sign, sign).scale(-1)
        ok &= good
        details.append(f"p={p}: scalar={scalar} (-1={p - 1}), oracle families={len(fams)}")
    verdict(5, "self-braiding of (g, sign) in D(Z2) is -1 mod p", ok, "; ".join(details))


# 6 -------------------------------------------------------------------------------------


def test_criterion_6_twisted_rings(verdict):
    t0 = time.perf_counter()
    bad, n = [], 0
    for action, p in ROUND_TRIP_ACTIONS + [(GroupAction.trivial(Z3, 2), 7)]:
        for h, q, f in fixed_point_dims(action, p):
            if q != f or f != len(fixed_points(action, h)):
                bad.append((repr(action), h))
        cmp_ = compare_with_inertia(ring_B(action, p))
        if not cmp_.certified:
            bad.append((repr(action), "ring iso"))
        n += 1
    elapsed = time.perf_counter() - t0
    verdict(6, "dim A/<h(a)-a> = |X^h| and B is G-ring isomorphic to functions on inertia",
            not bad and elapsed < 5, f"{n} actions, failures={bad}, {elapsed:.2f}s (bound 5s)")


# 7 -------------------------------------------------------------------------------------


def test_criterion_7_projection_formula(verdict):
    count, bad = 0, []
    for action, p in [(point(S3), 7), (GroupAction.natural(S3), 7), (swap_abc(), 3),
                      (point(Z4), 5)]:
        inert = InertiaAction(action)
        di = double_inertia(action, inert)
        for name, f in (("pi", inert.pi), ("p1", di.p1), ("p2", di.p2), ("m", di.m)):
            for seed in range(4):
                M = random_module(f.source, 2, seed, p)
                N = random_module(f.target, 2, seed + 31, p)
                count += 1
                if not projection_iso(f, M, N, check=False).is_certified_iso():
                    bad.append((name, seed))
    verdict(7, "projection formula maps are certified isomorphisms for pi, p1, p2, m",
            not bad and count >= 50, f"{count} instances, failures={bad}")


# 8 -------------------------------------------------------------------------------------


def test_criterion_8_monoidal_transport(verdict):
    count, bad = 0, []
    for action, p in [(point(Z2), 3), (point(S3), 7)]:
        simples = construct_simples(InertiaAction(action), p)
        for a, b in itertools.product(simples, repeat=2):
            count += 1
            if not theta_monoidal_iso(a, b, check=False).is_certified_iso() or \
                    not _monoidal_ok(a, b):
                bad.append((repr(action), count))
    inert = InertiaAction(swap_abc())
    for k in range(32):
        a = random_module(inert, 2, 500 + k, 3)
        b = random_module(inert, 2, 600 + k, 3)
        count += 1
        if not _monoidal_ok(a, b):
            bad.append(("swap {a,b,c}", k))
    verdict(8, "Theta carries convolution to the tensor product of the double (certified)",
            not bad, f"{count} pairs, failures={bad}")


def _monoidal_ok(a, b) -> bool:
    from orbidouble.double import convolution

    f = theta_monoidal_iso(a, b, check=False)
    return f.is_certified_iso() and is_half_braided_iso(
        f, theta(convolution(a, b)), double_tensor(theta(a), theta(b)))


# 9 -------------------------------------------------------------------------------------


def test_criterion_9_descent(verdict):
    t0 = time.perf_counter()
    atlas = abc_atlas()
    bad = []
    if not validate_atlas(atlas):
        bad.append("atlas")
    base = atlas.base
    panel = list(construct_simples(base, 3)) + [random_module(base, 3, s, 3) for s in range(32)]
    bad += [f for f in check_descent_panel(atlas, panel).failures]
    for M in panel:
        desc = descend(atlas, restrict(atlas, M))
        if not all(E.is_certified_iso() for E in desc.isos):
            bad.append("gluing isos")
    counts = chartwise_double_counts(atlas)
    inert_count = count_simples(InertiaAction(base), 3)
    if counts != [1, 4] or sum(counts) != inert_count:
        bad.append(("counts", counts, inert_count))
    inert = InertiaAction(base)
    doubles = [theta(S) for S in construct_simples(inert, 3)]
    doubles += [theta(random_module(inert, 2, s, 3)) for s in range(32)]
    glued_ok = 0
    for D in doubles:
        glued, _ = glue_double(atlas, restrict_double(atlas, D))
        if verify_half_braiding(glued):
            glued_ok += 1
        else:
            bad.append("glued half-braiding")
    elapsed = time.perf_counter() - t0
    verdict(9, "descent on the {a,b}+{c} atlas of Z2 swapping a,b",
            not bad and elapsed < 10,
            f"{len(panel)} modules round-tripped, counts {counts[0]} + {counts[1]} = "
            f"{sum(counts)} (inertia {inert_count}), {glued_ok} glued sections verified, "
            f"failures={bad[:3]}, {elapsed:.2f}s (bound 10s)")


# 10 ------------------------------------------------------------------------------------


def test_criterion_10_determinism(verdict, tmp_path):
    doc = {"group": {"permutations": [[1, 0, 2], [1, 2, 0]], "degree": 3}, "action": "natural",
           "atlas": {"charts": [{"name": "all", "action": "natural",
                                 "embed": {"alpha": [0, 1, 2]}}]}}
    path = tmp_path / "in.json"
    path.write_text(json.dumps(doc))
    outs, codes = [], []
    for k in range(2):
        out = tmp_path / f"report{k}.json"
        codes.append(main(["verify", "--input", str(path), "--output", str(out),
                           "--seed", "5", "--trials", "4"]))
        outs.append(out.read_bytes())
    same = outs[0] == outs[1]
    verdict(10, "verify reports are byte-identical across runs", same and codes == [0, 0],
            f"{len(outs[0])} bytes, identical={same}, exit codes={codes}")
