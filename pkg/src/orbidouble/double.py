"""Half-braided modules and their comparison with inertia modules.

A half-braiding on an equivariant module ``M`` is recorded as a family of
matrices ``phi[h][x]`` acting on the fiber ``M_x``. The family must

* vanish unless ``h.x = x`` (support),
* satisfy ``rho(g, x) phi(h, x) = phi(g h g^-1, g.x) rho(g, x)`` (equivariance),
* sum to the identity over ``h`` at every point (completeness),
* consist of orthogonal idempotents at every point (orthogonality).

The braiding against another module ``N`` is
``tau_N = sum_h phi(h, x) (x) rho_N(h, x)`` at ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from . import linalg as la
from .errors import BudgetExceededError, InvariantError, MismatchError
from .gsets import DoubleInertia, GroupAction, InertiaAction, double_inertia
from .modules import (EquivariantModule, InertiaModule, ModuleMap, _offsets,
                      construct_simples, hom_dim, hom_space, intertwiner_basis,
                      pullback, pushforward, random_combination,
                      swap, tensor, tensor_maps, unit)

INVARIANTS = ("support", "equivariance", "completeness", "orthogonality")


class HalfBraidedModule:
    """An equivariant module with a phi-family.

    ``phi`` may be a mapping ``(h, x) -> matrix`` (absent entries are zero)
    or a nested sequence ``phi[h][x]``. Construction with ``check=False``
    accepts families that violate the invariants, so that
    :func:`verify_half_braiding` can report on them.
    """

    def __init__(self, module: EquivariantModule, phi, check: bool = True):
        act, p = module.action, module.p
        grid = []
        for h in act.group.elements():
            row = []
            for x in act.points():
                d = module.dims[x]
                if isinstance(phi, dict):
                    m = phi.get((h, x))
                else:
                    m = phi[h][x]
                row.append(la.zeros(d, d) if m is None else la.as_matrix(m, p, (d, d)))
                row[-1].setflags(write=False)
            grid.append(tuple(row))
        self.module = module
        self.phi = tuple(grid)
        if check:
            bad = self.violations()
            if bad:
                name, witness = bad[0]
                raise InvariantError(name, witness)

    @property
    def action(self) -> GroupAction:
        return self.module.action

    @property
    def p(self) -> int:
        return self.module.p

    def violations(self, first_only: bool = False) -> list[tuple[str, tuple]]:
        """Failed invariants with witnesses, in the order of :data:`INVARIANTS`."""
        M, act, p = self.module, self.module.action, self.module.p
        G = act.group
        out: list[tuple[str, tuple]] = []
        for h in G.elements():
            for x in act.points():
                if act.table[h][x] != x and self.phi[h][x].any():
                    out.append(("support", (h, x)))
                    break
        for g in G.generators:
            for h in G.elements():
                for x in act.points():
                    gx = act.table[g][x]
                    lhs = la.matmul(M.rho[g][x], self.phi[h][x], p)
                    rhs = la.matmul(self.phi[G.conj(g, h)][gx], M.rho[g][x], p)
                    if not np.array_equal(lhs, rhs):
                        out.append(("equivariance", (g, h, x)))
                        break
                else:
                    continue
                break
            else:
                continue
            break
        for x in act.points():
            total = sum(self.phi[h][x] for h in G.elements()) % p
            if not np.array_equal(total, la.identity(M.dims[x])):
                out.append(("completeness", (x,)))
                break
        done = False
        for x in act.points():
            for h1 in G.elements():
                for h2 in G.elements():
                    prod = la.matmul(self.phi[h1][x], self.phi[h2][x], p)
                    want = self.phi[h1][x] if h1 == h2 else 0 * prod
                    if not np.array_equal(prod, want):
                        out.append(("orthogonality", (h1, h2, x)))
                        done = True
                        break
                if done:
                    break
            if done:
                break
        return out[:1] if first_only else out

    def key(self) -> bytes:
        """Byte string identifying the phi-family (for set comparisons)."""
        return b"".join(m.tobytes() for row in self.phi for m in row)

    def __eq__(self, other):
        return (isinstance(other, HalfBraidedModule) and self.module == other.module
                and self.key() == other.key())

    __hash__ = None

    def __repr__(self):
        return f"HalfBraidedModule(dims={list(self.module.dims)}, GF({self.p}))"


def double_unit(action: GroupAction, field) -> HalfBraidedModule:
    U = unit(action, field)
    e = action.group.identity
    return HalfBraidedModule(U, {(e, x): [[1]] for x in action.points()}, check=False)


def trivial_half_braiding(M: EquivariantModule) -> HalfBraidedModule:
    """``phi(e, x) = 1``: the image of ``M`` under the inclusion into the double."""
    e = M.action.group.identity
    return HalfBraidedModule(M, {(e, x): la.identity(M.dims[x]) for x in M.action.points()},
                             check=False)


# -- braiding data --------------------------------------------------------------------


def tau_apply(D: HalfBraidedModule, N: EquivariantModule) -> ModuleMap:
    """``tau_N`` on ``M (x) N``: ``sum_h phi(h, x) (x) rho_N(h, x)`` at every point."""
    M = D.module
    if M.action != N.action or M.p != N.p:
        raise MismatchError("half-braided module and test module live over different data")
    act, p = M.action, M.p
    MN = tensor(M, N)
    blocks = []
    for x in act.points():
        acc = la.zeros(MN.dims[x], MN.dims[x])
        for h in act.group.elements():
            if act.table[h][x] == x:
                acc = acc + la.kron(D.phi[h][x], N.rho[h][x], p)
        blocks.append(acc % p)
    return ModuleMap(MN, MN, blocks, check=False)


def ft2_composite(D: HalfBraidedModule, B: EquivariantModule, C: EquivariantModule) -> ModuleMap:
    """``(A (x) s_CB) o (tau(C) (x) B) o (A (x) s_BC) o (tau(B) (x) C)``.

    The factorization identity asks this to equal ``tau(B (x) C)``. The
    symmetry indices are forced by the types: exchanging them only
    typechecks when ``B`` and ``C`` have equal fibers, and then gives the
    same matrices.
    """
    A = D.module
    idA = ModuleMap.identity(A)
    step1 = tensor_maps(tau_apply(D, B), ModuleMap.identity(C))
    step2 = tensor_maps(idA, swap(B, C))
    step3 = tensor_maps(tau_apply(D, C), ModuleMap.identity(B))
    step4 = tensor_maps(idA, swap(C, B))
    return _compose_blocks(step4, step3, step2, step1)


def theta_map(D: HalfBraidedModule, N: EquivariantModule) -> ModuleMap:
    """``theta(N) = s_{M,N} o tau(N) : M (x) N -> N (x) M``."""
    return _compose_blocks(swap(D.module, N), tau_apply(D, N))


def tensor_tau_composite(D1: HalfBraidedModule, D2: HalfBraidedModule, N: EquivariantModule
                         ) -> ModuleMap:
    """``tau`` of ``D1 (x) D2`` assembled literally from the two half-braidings:
    ``s_{N, M1 M2} o (theta_1(N) (x) M2) o (M1 (x) theta_2(N))``."""
    M1, M2 = D1.module, D2.module
    first = tensor_maps(ModuleMap.identity(M1), theta_map(D2, N))
    second = tensor_maps(theta_map(D1, N), ModuleMap.identity(M2))
    return _compose_blocks(swap(N, tensor(M1, M2)), second, first)


def _compose_blocks(*maps: ModuleMap) -> ModuleMap:
    """Composite ``maps[0] o maps[1] o ...`` without requiring equal module objects."""
    out = maps[-1]
    for f in reversed(maps[:-1]):
        out = ModuleMap(out.source, f.target,
                        [la.matmul(a, b, f.p) for a, b in zip(f.blocks, out.blocks)], check=False)
    return out


def is_half_braided_map(f: ModuleMap, D1: HalfBraidedModule, D2: HalfBraidedModule) -> bool:
    """``f`` is a module map ``M1 -> M2`` with ``f phi1(h, x) = phi2(h, x) f``."""
    if not f.is_module_map():
        return False
    act, p = D1.action, D1.p
    for h in act.group.elements():
        for x in act.points():
            if not np.array_equal(la.matmul(f.blocks[x], D1.phi[h][x], p),
                                  la.matmul(D2.phi[h][x], f.blocks[x], p)):
                return False
    return True


def is_half_braided_iso(f: ModuleMap, D1: HalfBraidedModule, D2: HalfBraidedModule) -> bool:
    return f.is_iso() and is_half_braided_map(f, D1, D2)


def double_hom_space(D1: HalfBraidedModule, D2: HalfBraidedModule) -> list[ModuleMap]:
    """Basis of module maps commuting with the phi-families."""
    M, N = D1.module, D2.module
    act = M.action

    def constraints():
        for g in act.group.generators:
            for x in act.points():
                yield x, act.table[g][x], M.rho[g][x], N.rho[g][x]
        for h in act.group.elements():
            for x in act.points():
                if act.table[h][x] == x:
                    yield x, x, D1.phi[h][x], D2.phi[h][x]

    basis = intertwiner_basis(M.dims, N.dims, constraints(), M.p)
    return [ModuleMap(M, N, blocks, check=False) for blocks in basis]


@dataclass
class VerificationReport:
    """Outcome of a verification suite; truthy iff nothing failed."""

    failures: list[tuple[str, object]] = field(default_factory=list)
    checked: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.passed

    def names(self) -> list[str]:
        return [name for name, _ in self.failures]


def verify_half_braiding(D: HalfBraidedModule, panel: Sequence[EquivariantModule] | None = None,
                         seed: int = 0, trials: int = 4) -> VerificationReport:
    """Check the four phi-invariants, then the braiding axioms on a test panel.

    The panel defaults to the simple modules of the base action (or seeded
    random modules if the field does not split the stabilizers). Braiding
    naturality is checked against ``trials`` random module maps per panel
    pair.
    """
    from .errors import NonSplittingFieldError
    from .modules import random_module

    report = VerificationReport()
    report.checked.extend(INVARIANTS)
    for name, witness in D.violations():
        report.failures.append((name, witness))
    if report.failures:
        return report
    act, M, p = D.action, D.module, D.p
    if panel is None:
        try:
            panel = list(construct_simples(act, p))
        except NonSplittingFieldError:
            panel = [random_module(act, 2, seed + k, p) for k in range(3)]
    report.checked.append("FT1")
    if not np.all([np.array_equal(b, la.identity(b.shape[0]))
                   for b in tau_apply(D, unit(act, p)).blocks]):
        report.failures.append(("FT1", None))
    report.checked.append("FT2")
    for i, B in enumerate(panel):
        for j, C in enumerate(panel):
            lhs = tau_apply(D, tensor(B, C))
            if lhs != ft2_composite(D, B, C):
                report.failures.append(("FT2", (i, j)))
    report.checked.append("tau naturality")
    rng = np.random.default_rng(seed)
    idM = ModuleMap.identity(M)
    for i, B in enumerate(panel):
        for j, C in enumerate(panel):
            basis = hom_space(B, C)
            if not basis:
                continue
            for _ in range(trials):
                f = tensor_maps(idM, random_combination(basis, rng))
                if _compose_blocks(tau_apply(D, C), f) != _compose_blocks(f, tau_apply(D, B)):
                    report.failures.append(("tau naturality", (i, j)))
                    break
    return report


# -- the comparison functor and its quasi-inverse ---------------------------------


def _inertia_of(M: EquivariantModule) -> InertiaAction:
    if not isinstance(M.action, InertiaAction):
        raise MismatchError("expected a module over an inertia action")
    return M.action


def theta(Mi: EquivariantModule) -> HalfBraidedModule:
    """Push an inertia module down to the base, remembering the summands.

    ``phi(h, x)`` is the projection of ``(pi_* M')_x = (+)_k M'_{(x, k)}`` onto
    the ``(x, h)`` summand.
    """
    inert = _inertia_of(Mi)
    M = pushforward(inert.pi, Mi)
    phi = {}
    for x in inert.base.points():
        over = inert.pairs_over(x)
        offs = _offsets(Mi.dims[i] for i in over)
        for i, off in zip(over, offs):
            proj = la.zeros(M.dims[x], M.dims[x])
            d = Mi.dims[i]
            proj[off: off + d, off: off + d] = la.identity(d)
            phi[(inert.pairs[i][1], x)] = proj
    return HalfBraidedModule(M, phi, check=False)


def extract(D: HalfBraidedModule, inert: InertiaAction | None = None
            ) -> tuple[InertiaModule, ModuleMap]:
    """Split ``M`` along the phi-family into an inertia module.

    Returns ``(M', c)`` where the fiber of ``M'`` at ``(x, h)`` is the image
    of ``phi(h, x)`` in its echelon basis, and ``c : pi_* M' -> M`` is the
    isomorphism assembling those bases. ``c`` intertwines the projections of
    ``theta(M')`` with the phi-family of ``D``.
    """
    bad = D.violations(first_only=True)
    if bad:
        raise InvariantError(*bad[0], message="refusing to split an invalid phi-family")
    M, p = D.module, D.p
    inert = inert or InertiaAction(M.action)
    if inert.base != M.action:
        raise MismatchError("inertia action does not sit over the module's action")
    G = inert.group
    bases, rows = [], []
    for x, h in inert.pairs:
        B, r = la.column_basis(D.phi[h][x], p)
        bases.append(B)
        rows.append(r)
    dims = [B.shape[1] for B in bases]
    rho = []
    for g in G.elements():
        row = []
        for i, (x, h) in enumerate(inert.pairs):
            j = inert.table[g][i]
            moved = la.matmul(M.rho[g][x], bases[i], p)
            row.append(moved[rows[j], :])
        rho.append(row)
    Mi = InertiaModule(inert, M.field, dims, rho, check=False)
    PM = pushforward(inert.pi, Mi)
    blocks = []
    for x in inert.base.points():
        parts = [bases[i] for i in inert.pairs_over(x)]
        blocks.append(np.concatenate(parts, axis=1) if parts else la.zeros(M.dims[x], 0))
    return Mi, ModuleMap(PM, M, blocks, check=False)


def inertia_iso_from_comparison(Mi: InertiaModule, c: ModuleMap, original: InertiaModule
                                ) -> ModuleMap:
    """Turn a comparison ``pi_* M' -> pi_* M''`` respecting summands into a map ``M' -> M''``."""
    inert = _inertia_of(Mi)
    blocks = []
    for x in inert.base.points():
        over = inert.pairs_over(x)
        so = _offsets(Mi.dims[i] for i in over)
        to = _offsets(original.dims[i] for i in over)
        for i, a, b in zip(over, so, to):
            blocks.append((i, c.blocks[x][b: b + original.dims[i], a: a + Mi.dims[i]]))
    blocks.sort()
    return ModuleMap(Mi, original, [blk for _, blk in blocks], check=False)


def round_trip_inertia(Mi: InertiaModule) -> ModuleMap:
    """``extract(theta(M')) -> M'``: the diagonal blocks of the comparison map."""
    D = theta(Mi)
    E, c = extract(D, _inertia_of(Mi))
    return inertia_iso_from_comparison(E, c, Mi)


def round_trip_double(D: HalfBraidedModule) -> tuple[HalfBraidedModule, ModuleMap]:
    """``theta(extract(D))`` with its comparison map to ``D``."""
    Mi, c = extract(D)
    return theta(Mi), c


# -- monoidal structure on the double ----------------------------------------------


def _check_pair(D1: HalfBraidedModule, D2: HalfBraidedModule) -> None:
    if D1.action != D2.action or D1.p != D2.p:
        raise MismatchError("half-braided modules over different actions or fields")


def double_tensor(D1: HalfBraidedModule, D2: HalfBraidedModule) -> HalfBraidedModule:
    """``phi''(h, x) = sum_{k l = h} phi1(k, x) (x) phi2(l, x)``, ``k`` from the left factor."""
    _check_pair(D1, D2)
    act, p = D1.action, D1.p
    G = act.group
    M = tensor(D1.module, D2.module)
    phi = {}
    for x in act.points():
        fixed = [h for h in G.elements() if act.table[h][x] == x]
        for k in fixed:
            for l in fixed:
                h = G.table[k][l]
                term = la.kron(D1.phi[k][x], D2.phi[l][x], p)
                phi[(h, x)] = (phi.get((h, x), 0) + term) % p
    return HalfBraidedModule(M, phi, check=False)


def double_braiding(D1: HalfBraidedModule, D2: HalfBraidedModule) -> ModuleMap:
    """``m (x) m' -> sum_h rho_2(h, x) m' (x) phi_1(h, x) m``, i.e. ``theta_1(M2)``."""
    _check_pair(D1, D2)
    return theta_map(D1, D2.module)


def hexagon_defects(D1: HalfBraidedModule, D2: HalfBraidedModule, D3: HalfBraidedModule
                    ) -> list[str]:
    """Names of the hexagon identities that fail on this triple."""
    M1, M2, M3 = D1.module, D2.module, D3.module
    i1, i2, i3 = (ModuleMap.identity(M) for M in (M1, M2, M3))
    out = []
    lhs = double_braiding(D1, double_tensor(D2, D3))
    rhs = _compose_blocks(tensor_maps(i2, double_braiding(D1, D3)),
                          tensor_maps(double_braiding(D1, D2), i3))
    if lhs != rhs:
        out.append("c(X, Y(x)Z)")
    lhs = double_braiding(double_tensor(D1, D2), D3)
    rhs = _compose_blocks(tensor_maps(double_braiding(D1, D3), i2),
                          tensor_maps(i1, double_braiding(D2, D3)))
    if lhs != rhs:
        out.append("c(X(x)Y, Z)")
    return out


# -- convolution on inertia modules ----------------------------------------------------


@lru_cache(maxsize=64)
def _double_inertia(base: GroupAction) -> DoubleInertia:
    return double_inertia(base, InertiaAction(base))


def inertia_unit(inert: InertiaAction, field) -> InertiaModule:
    """Skyscraper: ``F_p`` on the pairs ``(x, e)``, zero on twisted pairs."""
    e = inert.group.identity
    dims = [1 if h == e else 0 for _, h in inert.pairs]
    rho = [[la.identity(dims[i])[: dims[inert.table[g][i]], :] for i in range(inert.size)]
           for g in inert.group.elements()]
    return InertiaModule(inert, field, dims, rho, check=False)


def convolution(Mi: EquivariantModule, Ni: EquivariantModule) -> InertiaModule:
    """``m_*(p1^* M' (x) p2^* N')`` on the double inertia."""
    inert = _inertia_of(Mi)
    if Ni.action != inert or Ni.p != Mi.p:
        raise MismatchError("convolution factors live over different data")
    di = _double_inertia(inert.base)
    pulled = tensor(pullback(di.p1, Mi), pullback(di.p2, Ni))
    out = pushforward(di.m, pulled)
    return InertiaModule(inert, Mi.field, out.dims, out.rho, check=False)


def theta_monoidal_iso(Mi: EquivariantModule, Ni: EquivariantModule, check: bool = True
                       ) -> ModuleMap:
    """The permutation ``theta(M' * N') -> theta(M') (x) theta(N')``.

    The left fiber at ``x`` lists triples ``(x, h1, h2)`` grouped by
    ``h1 h2``; the right fiber is the Kronecker product of the two summand
    decompositions. With ``check`` the map is certified as an isomorphism
    of half-braided modules.
    """
    inert = _inertia_of(Mi)
    G = inert.group
    di = _double_inertia(inert.base)
    left = theta(convolution(Mi, Ni))
    right = double_tensor(theta(Mi), theta(Ni))
    triples_at: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for x, h1, h2 in di.triples:
        triples_at.setdefault((x, G.table[h1][h2]), []).append((h1, h2))
    blocks = []
    for x in inert.base.points():
        over = inert.pairs_over(x)
        offM = dict(zip((inert.pairs[i][1] for i in over), _offsets(Mi.dims[i] for i in over)))
        offN = dict(zip((inert.pairs[i][1] for i in over), _offsets(Ni.dims[i] for i in over)))
        DN = sum(Ni.dims[i] for i in over)
        size = left.module.dims[x]
        P = la.zeros(size, size)
        col = 0
        for i in over:
            h = inert.pairs[i][1]
            for h1, h2 in triples_at.get((x, h), []):
                dm = Mi.dims[inert.index[(x, h1)]]
                dn = Ni.dims[inert.index[(x, h2)]]
                for a in range(dm):
                    for b in range(dn):
                        P[(offM[h1] + a) * DN + offN[h2] + b, col] = 1
                        col += 1
        blocks.append(P)
    f = ModuleMap(left.module, right.module, blocks, check=False)
    if check and not is_half_braided_iso(f, left, right):
        raise InvariantError("convolution is carried to the tensor product of the double")
    return f



def convolution_braiding(Mi: EquivariantModule, Ni: EquivariantModule) -> ModuleMap:
    """The braiding ``M' * N' -> N' * M'`` transported from the double along ``theta``.

    On the summand ``M'(x, h1) (x) N'(x, h2)`` of the fiber at ``(x, h1 h2)``
    it is ``m (x) n -> rho_N'(h1) n (x) m``, landing in the summand
    ``N'(x, h1 h2 h1^-1) (x) M'(x, h1)``.
    """
    inert = _inertia_of(Mi)
    G, p = inert.group, Mi.p
    di = _double_inertia(inert.base)
    src, tgt = convolution(Mi, Ni), convolution(Ni, Mi)
    summands: dict[int, list[tuple[int, int]]] = {}
    for x, h1, h2 in di.triples:
        summands.setdefault(inert.index[(x, G.table[h1][h2])], []).append((h1, h2))

    def layout(A, B, i):
        x = inert.pairs[i][0]
        sizes = [A.dims[inert.index[(x, h1)]] * B.dims[inert.index[(x, h2)]]
                 for h1, h2 in summands.get(i, [])]
        return dict(zip(summands.get(i, []), _offsets(sizes)))

    blocks = []
    for i in range(inert.size):
        x = inert.pairs[i][0]
        offs, offt = layout(Mi, Ni, i), layout(Ni, Mi, i)
        B = la.zeros(tgt.dims[i], src.dims[i])
        for (h1, h2), o in offs.items():
            a, b = inert.index[(x, h1)], inert.index[(x, h2)]
            dm, dn = Mi.dims[a], Ni.dims[b]
            if not dm * dn:
                continue
            rho = Ni.rho[h1][b]
            t = offt[(G.conj(h1, h2), h1)]
            B[t: t + dn * dm, o: o + dm * dn] = la.matmul(
                la.kron(rho, la.identity(dm), p), la.swap_permutation(dm, dn), p)
        blocks.append(B)
    return ModuleMap(src, tgt, blocks, check=False)

# -- the brute-force oracle --------------------------------------------------------


def oracle_bits(M: EquivariantModule) -> float:
    """``(sum over fixed pairs (h, x) of d_x^2) * log2(p)``: the raw search size."""
    act = M.action
    cells = sum(M.dims[x] ** 2 for h in act.group.elements() for x in act.points()
                if act.table[h][x] == x)
    return cells * math.log2(M.p)


def enumerate_half_braidings(M: EquivariantModule, budget_bits: float = 40.0) -> list[HalfBraidedModule]:
    """Every phi-family on ``M``, by exhaustion.

    The linear constraints (support, equivariance, completeness) cut out an
    affine space whose points are enumerated one fiber matrix at a time,
    discarding partial assignments that already fail idempotence or
    orthogonality. Refuses with
    :class:`BudgetExceededError` when :func:`oracle_bits` exceeds the budget.
    """
    bits = oracle_bits(M)
    if bits > budget_bits:
        raise BudgetExceededError(f"search needs {bits:.1f} bits, budget is {budget_bits}")
    act, p = M.action, M.p
    G = act.group
    cells = [(h, x) for h in G.elements() for x in act.points() if act.table[h][x] == x]
    sizes = [M.dims[x] ** 2 for _, x in cells]
    offs = _offsets(sizes)
    where = {c: (o, s) for c, o, s in zip(cells, offs, sizes)}
    total = sum(sizes)
    rows, rhs = [], []

    def block(cell, mat_left=None, mat_right=None):
        # coefficient matrix of vec(L X R) in the unknowns of ``cell``
        d = M.dims[cell[1]]
        L = la.identity(d) if mat_left is None else mat_left
        R = la.identity(d) if mat_right is None else mat_right
        return np.kron(L, R.T)

    for g in G.generators:
        for h, x in cells:
            gx = act.table[g][x]
            r = M.rho[g][x]
            n = M.dims[gx] * M.dims[x]
            if n == 0:
                continue
            eq = la.zeros(n, total)
            o, s = where[(h, x)]
            eq[:, o: o + s] += block((h, x), mat_left=r)
            o2, s2 = where[(G.conj(g, h), gx)]
            eq[:, o2: o2 + s2] -= block((G.conj(g, h), gx), mat_right=r)
            rows.append(eq % p)
            rhs.append(la.zeros(n, 1)[:, 0])
    for x in act.points():
        d = M.dims[x]
        if d == 0:
            continue
        eq = la.zeros(d * d, total)
        for h in G.elements():
            if act.table[h][x] == x:
                o, s = where[(h, x)]
                eq[:, o: o + s] += la.identity(d * d)
        rows.append(eq % p)
        rhs.append(la.identity(d).reshape(-1))
    if total == 0:
        return [HalfBraidedModule(M, {}, check=False)]
    A = np.concatenate(rows, axis=0) if rows else la.zeros(0, total)
    b = np.concatenate(rhs) if rhs else la.zeros(0, 1)[:, 0]
    R, pivots, _ = la.rref(np.concatenate([A % p, b[:, None] % p], axis=1), p)
    if total in pivots:
        return []
    pivot_row = {c: r for r, c in enumerate(pivots)}
    free = np.array([c for c in range(total) if c not in pivot_row], dtype=np.int64)
    # In reduced echelon form a pivot unknown depends only on free unknowns to its
    # right, so cells can be filled from the last one backwards and pruned early.
    state = la.zeros(1, total)
    done: list[int] = []
    for k in reversed(range(len(cells))):
        lo, hi = offs[k], offs[k] + sizes[k]
        own = [c for c in free if lo <= c < hi]
        if own:
            n = len(own)
            idx = np.arange(p ** n, dtype=np.int64)
            digits = np.stack([(idx // p ** j) % p for j in range(n)], axis=1)
            state = np.repeat(state, p ** n, axis=0)
            state[:, own] = np.tile(digits, (state.shape[0] // p ** n, 1))
        for c in range(hi - 1, lo - 1, -1):
            if c in pivot_row:
                r = pivot_row[c]
                later = free[free > c]
                state[:, c] = (R[r, total] - state[:, later] @ R[r, later]) % p
        h, x = cells[k]
        d = M.dims[x]
        mat = state[:, lo:hi].reshape(state.shape[0], d, d)
        keep = np.all((np.einsum("nij,njk->nik", mat, mat) - mat) % p == 0, axis=(1, 2))
        for k2 in done:
            if cells[k2][1] != x:
                continue
            other = state[:, offs[k2]: offs[k2] + sizes[k2]].reshape(state.shape[0], d, d)
            keep &= np.all(np.einsum("nij,njk->nik", mat, other) % p == 0, axis=(1, 2))
            keep &= np.all(np.einsum("nij,njk->nik", other, mat) % p == 0, axis=(1, 2))
        state = state[keep]
        done.append(k)
        if not state.shape[0]:
            return []
    return [HalfBraidedModule(M, {c: state[n, o: o + s].reshape(M.dims[c[1]], M.dims[c[1]])
                                  for c, o, s in zip(cells, offs, sizes)}, check=False)
            for n in range(state.shape[0])]


def _multisets(weights: Sequence[int], bound: int) -> Iterator[tuple[int, ...]]:
    """Multiplicity vectors ``m`` with ``sum m_i w_i <= bound``, zero excluded."""
    def rec(i, left):
        if i == len(weights):
            yield ()
            return
        w = weights[i]
        top = left // w if w else 0
        for m in range(top + 1):
            for rest in rec(i + 1, left - m * w):
                yield (m,) + rest
    for vec in rec(0, bound):
        if any(vec):
            yield vec


def theta_families_on(M: EquivariantModule, inert: InertiaAction | None = None
                      ) -> list[HalfBraidedModule]:
    """All phi-families on ``M`` obtained by transporting some ``theta(M')`` along an
    isomorphism ``pi_* M' -> M``.

    ``M'`` runs over direct sums of inertia simples of small enough size and
    the isomorphisms over all invertible elements of ``Hom(pi_* M', M)``.
    """
    from .modules import direct_sum

    inert = inert or InertiaAction(M.action)
    p = M.p
    if M.total_dim == 0:
        return [HalfBraidedModule(M, {}, check=False)]
    simples = construct_simples(inert, p)
    keys: dict[bytes, HalfBraidedModule] = {}
    for mult in _multisets([S.total_dim for S in simples], M.total_dim):
        parts = [S for S, m in zip(simples, mult) for _ in range(m)]
        Mi = direct_sum(*parts)
        D = theta(Mi)
        if D.module.dims != M.dims:
            continue
        basis = hom_space(D.module, M)
        k = len(basis)
        if k == 0:
            continue
        stacked = np.stack([np.concatenate([b.reshape(-1) for b in f.blocks]) for f in basis])
        idx = np.arange(p ** k, dtype=np.int64)
        coeffs = np.stack([(idx // p ** j) % p for j in range(k)], axis=1)
        flat = coeffs @ stacked % p
        offs = _offsets(d * d for d in M.dims)
        ok = np.ones(idx.size, dtype=bool)
        for x, d in enumerate(M.dims):
            if d:
                blk = flat[:, offs[x]: offs[x] + d * d].reshape(-1, d, d)
                ok &= la.batch_det(blk, p) != 0
        good = flat[ok]
        G = M.action.group
        # conjugate every phi(h, x) by the candidate isomorphisms at once; the
        # row layout matches HalfBraidedModule.key
        cols = []
        for h in G.elements():
            for x, d in enumerate(M.dims):
                if not d:
                    continue
                if not D.phi[h][x].any():
                    cols.append(np.zeros((good.shape[0], d * d), dtype=np.int64))
                    continue
                blk = good[:, offs[x]: offs[x] + d * d].reshape(-1, d, d)
                inv = la.batch_inverse(blk, p)
                conj = np.einsum("nij,jk,nkl->nil", blk, D.phi[h][x], inv) % p
                cols.append(conj.reshape(-1, d * d))
        table = np.ascontiguousarray(np.concatenate(cols, axis=1)) if cols else \
            np.zeros((good.shape[0], 0), dtype=np.int64)
        for row in np.unique(table, axis=0):
            phi, pos = {}, 0
            for h in G.elements():
                for x, d in enumerate(M.dims):
                    if d:
                        phi[(h, x)] = row[pos: pos + d * d].reshape(d, d)
                        pos += d * d
            E = HalfBraidedModule(M, phi, check=False)
            keys.setdefault(E.key(), E)
    return list(keys.values())


# -- fusion data ------------------------------------------------------------------------


@dataclass
class FusionData:
    """Convolution multiplicities and braiding scalars for the inertia simples.

    ``multiplicity[i][j][k] = dim Hom(S_k, S_i * S_j)``. ``braiding[i][j]`` is
    the scalar by which the self-braiding (``i == j``) or the monodromy
    ``c(j, i) c(i, j)`` acts when the relevant product is simple, else ``None``.
    """

    labels: list[tuple[int, int, tuple[int, ...]]]
    multiplicity: list[list[list[int]]]
    braiding: list[list[int | None]]


def _scalar(f: ModuleMap) -> int | None:
    vals = set()
    for b in f.blocks:
        if b.size == 0:
            continue
        d = b.shape[0]
        c = int(b[0, 0])
        if not np.array_equal(b, c * la.identity(d) % f.p):
            return None
        vals.add(c)
    return vals.pop() if len(vals) == 1 else None


def fusion_data(inert: InertiaAction, field=None) -> FusionData:
    """Fusion table of the convolution product with braiding scalars."""
    from .groups import splitting_prime
    from .modules import character

    p = field if field is not None else splitting_prime(inert.group)
    p = getattr(p, "p", p)
    simples = construct_simples(inert, p)
    labels = []
    for S in simples:
        i = next(i for i, d in enumerate(S.dims) if d)
        x, h = inert.pairs[i]
        labels.append((x, h, character(S, i)))
    n = len(simples)
    mult = [[[hom_dim(S, convolution(simples[i], simples[j])) for S in simples]
             for j in range(n)] for i in range(n)]
    doubles = [theta(S) for S in simples]
    braid: list[list[int | None]] = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if sum(mult[i][j]) != 1:
                continue
            c_ij = double_braiding(doubles[i], doubles[j])
            if i == j:
                braid[i][j] = _scalar(c_ij)
            else:
                c_ji = double_braiding(doubles[j], doubles[i])
                braid[i][j] = _scalar(_compose_blocks(c_ji, c_ij))
    return FusionData(labels, mult, braid)
