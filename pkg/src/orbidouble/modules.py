"""Equivariant modules on a finite action groupoid.

An :class:`EquivariantModule` over ``G`` acting on ``X`` assigns a vector
space ``F_p^{d_x}`` to every point and an invertible matrix
``rho[g][x] : d_x -> d_{g.x}`` to every arrow, with ``rho[e][x] = 1`` and
``rho[g'][g.x] @ rho[g][x] = rho[g'g][x]``. These are the finite models of
sheaves on the quotient orbifold ``[G\\X]``.

Layout conventions are fixed so results are reproducible bit for bit:
direct sums are ordered by the source-point order, Kronecker products are
left factor major.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import linalg as la
from .errors import (InvariantError, MismatchError, NonSplittingFieldError,
                     SplittingFailedError, UnsupportedMapError)
from .groups import FiniteGroup, GroupHom, conjugacy_classes, trivial_group
from .gsets import (EquivariantMap, GroupAction, InertiaAction, NaturalLoop,
                    TwoMorphism)
from .linalg import PrimeField


def _field(field) -> PrimeField:
    if isinstance(field, PrimeField):
        return field
    return PrimeField(int(field))


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=np.int64)
    m.setflags(write=False)
    return m


class EquivariantModule:
    """Fibers ``dims[x]`` with transport matrices ``rho[g][x]``."""

    def __init__(self, action: GroupAction, field, dims: Sequence[int], rho, check: bool = True):
        self.action = action
        self.field = _field(field)
        self.dims = tuple(int(d) for d in dims)
        p = self.field.p
        self.rho = tuple(tuple(_frozen(la.as_matrix(rho[g][x], p,
                                                    (self.dims[action.table[g][x]], self.dims[x])))
                               for x in action.points())
                         for g in action.group.elements())
        if len(self.dims) != action.size:
            raise InvariantError("one fiber dimension per point", len(self.dims))
        if check:
            self.validate()

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def validate(self) -> None:
        """Check ``rho[e] = 1`` and the cocycle identity on a generating set."""
        act, G, p = self.action, self.action.group, self.p
        for x in act.points():
            if not np.array_equal(self.rho[G.identity][x], la.identity(self.dims[x])):
                raise InvariantError("rho(e, x) = identity", x)
        for g2 in G.generators:
            for g in G.elements():
                for x in act.points():
                    gx = act.table[g][x]
                    lhs = la.matmul(self.rho[g2][gx], self.rho[g][x], p)
                    if not np.array_equal(lhs, self.rho[G.table[g2][g]][x]):
                        raise InvariantError("cocycle rho(g', g.x) rho(g, x) = rho(g'g, x)",
                                             (g2, g, x))

    def __eq__(self, other):
        return (isinstance(other, EquivariantModule) and self.action == other.action
                and self.p == other.p and self.dims == other.dims
                and all(np.array_equal(a, b) for ra, rb in zip(self.rho, other.rho)
                        for a, b in zip(ra, rb)))

    __hash__ = None

    def __repr__(self):
        return f"{type(self).__name__}(dims={list(self.dims)}, GF({self.p}))"


class InertiaModule(EquivariantModule):
    """An equivariant module whose action is an :class:`InertiaAction`."""

    def __init__(self, action, field, dims, rho, check=True):
        if not isinstance(action, InertiaAction):
            raise MismatchError("an inertia module needs an InertiaAction")
        super().__init__(action, field, dims, rho, check)


def make_module(action: GroupAction, field, dims, rho, check: bool = True) -> EquivariantModule:
    """Build a module, tagging it as an :class:`InertiaModule` when the action is one."""
    cls = InertiaModule if isinstance(action, InertiaAction) else EquivariantModule
    return cls(action, field, dims, rho, check)


def as_inertia_module(module: EquivariantModule, action: InertiaAction) -> InertiaModule:
    if module.action != action:
        raise MismatchError("module does not live on this inertia action")
    return InertiaModule(action, module.field, module.dims, module.rho, check=False)


class ModuleMap:
    """A morphism of equivariant modules, one matrix per point."""

    def __init__(self, source: EquivariantModule, target: EquivariantModule, blocks,
                 check: bool = True):
        if source.action != target.action or source.p != target.p:
            raise MismatchError("module map between different actions or fields")
        p = source.p
        self.source = source
        self.target = target
        self.blocks = tuple(_frozen(la.as_matrix(blocks[x], p, (target.dims[x], source.dims[x])))
                            for x in source.action.points())
        if check:
            self.validate()

    @property
    def p(self) -> int:
        return self.source.p

    def validate(self) -> None:
        act, p = self.source.action, self.p
        for g in act.group.generators:
            for x in act.points():
                gx = act.table[g][x]
                lhs = la.matmul(self.blocks[gx], self.source.rho[g][x], p)
                rhs = la.matmul(self.target.rho[g][x], self.blocks[x], p)
                if not np.array_equal(lhs, rhs):
                    raise InvariantError("f(g.x) rho_M(g, x) = rho_N(g, x) f(x)", (g, x))

    def is_module_map(self) -> bool:
        try:
            self.validate()
        except InvariantError:
            return False
        return True

    def is_iso(self) -> bool:
        return all(la.is_invertible(b, self.p) for b in self.blocks)

    def is_certified_iso(self) -> bool:
        """Intertwines the actions and is invertible at every point."""
        return self.is_module_map() and self.is_iso()

    def inverse(self) -> ModuleMap:
        return ModuleMap(self.target, self.source, [la.inverse(b, self.p) for b in self.blocks],
                         check=False)

    def __matmul__(self, other: ModuleMap) -> ModuleMap:
        """Composition ``self o other``."""
        if other.target.dims != self.source.dims:
            raise MismatchError("maps are not composable")
        return ModuleMap(other.source, self.target,
                         [la.matmul(a, b, self.p) for a, b in zip(self.blocks, other.blocks)],
                         check=False)

    def __add__(self, other: ModuleMap) -> ModuleMap:
        return ModuleMap(self.source, self.target,
                         [(a + b) % self.p for a, b in zip(self.blocks, other.blocks)], check=False)

    def scale(self, c: int) -> ModuleMap:
        return ModuleMap(self.source, self.target, [(c * b) % self.p for b in self.blocks],
                         check=False)

    def __eq__(self, other):
        return (isinstance(other, ModuleMap) and len(self.blocks) == len(other.blocks)
                and all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks)))

    __hash__ = None

    @property
    def is_zero(self) -> bool:
        return all(not b.any() for b in self.blocks)

    @classmethod
    def identity(cls, module: EquivariantModule) -> ModuleMap:
        return cls(module, module, [la.identity(d) for d in module.dims], check=False)

    def __repr__(self):
        return f"ModuleMap({self.source!r} -> {self.target!r})"


# -- monoidal structure ----------------------------------------------------------


def _same_category(M: EquivariantModule, N: EquivariantModule) -> None:
    if M.action != N.action:
        raise MismatchError("modules live over different actions")
    if M.p != N.p:
        raise MismatchError(f"modules live over different fields GF({M.p}) and GF({N.p})")


def unit(action: GroupAction, field) -> EquivariantModule:
    """The structure sheaf: every fiber one-dimensional, every transport ``[1]``."""
    one = np.ones((1, 1), dtype=np.int64)
    return make_module(action, field, [1] * action.size,
                       [[one] * action.size for _ in action.group.elements()], check=False)


def zero_module(action: GroupAction, field) -> EquivariantModule:
    z = la.zeros(0, 0)
    return make_module(action, field, [0] * action.size,
                       [[z] * action.size for _ in action.group.elements()], check=False)


def tensor(M: EquivariantModule, N: EquivariantModule) -> EquivariantModule:
    _same_category(M, N)
    p = M.p
    dims = [a * b for a, b in zip(M.dims, N.dims)]
    rho = [[la.kron(rm, rn, p) for rm, rn in zip(M.rho[g], N.rho[g])]
           for g in M.action.group.elements()]
    return make_module(M.action, M.field, dims, rho, check=False)


def tensor_maps(f: ModuleMap, g: ModuleMap) -> ModuleMap:
    p = f.p
    return ModuleMap(tensor(f.source, g.source), tensor(f.target, g.target),
                     [la.kron(a, b, p) for a, b in zip(f.blocks, g.blocks)], check=False)


def swap(M: EquivariantModule, N: EquivariantModule) -> ModuleMap:
    """The symmetry ``M (x) N -> N (x) M``."""
    _same_category(M, N)
    return ModuleMap(tensor(M, N), tensor(N, M),
                     [la.swap_permutation(a, b) for a, b in zip(M.dims, N.dims)], check=False)


def direct_sum(*modules: EquivariantModule) -> EquivariantModule:
    first = modules[0]
    for M in modules[1:]:
        _same_category(first, M)
    p = first.p
    dims = [sum(M.dims[x] for M in modules) for x in first.action.points()]
    rho = [[la.block_diag([M.rho[g][x] for M in modules], p) for x in first.action.points()]
           for g in first.action.group.elements()]
    return make_module(first.action, first.field, dims, rho, check=False)


# -- inverse and direct image ------------------------------------------------------


def pullback(f: EquivariantMap, N: EquivariantModule) -> EquivariantModule:
    """``f^*N``: fiber at ``u`` is ``N`` at ``alpha(u)``, transport through ``gamma``."""
    if N.action != f.target:
        raise MismatchError("module does not live on the target of the map")
    src = f.source
    dims = [N.dims[y] for y in f.alpha]
    rho = [[N.rho[f.gamma(h)][f.alpha[u]] for u in src.points()] for h in src.group.elements()]
    return make_module(src, N.field, dims, rho, check=False)


class _CommaLayout:
    """Representatives of the comma categories ``y / f`` for a map with injective ``gamma``.

    At a target point ``y`` the objects are pairs ``(u, g)`` with
    ``g.y = alpha(u)``; ``H`` acts freely by ``h.(u, g) = (h.u, gamma(h) g)``.
    Representatives are chosen with ``g = e`` first, then by ``(g, u)``.
    """

    def __init__(self, f: EquivariantMap):
        if not f.gamma.is_injective:
            raise UnsupportedMapError("direct image needs an injective group homomorphism")
        src, tgt = f.source, f.target
        G, H = tgt.group, src.group
        e = G.identity
        by_image: dict[int, list[int]] = {}
        for u, y in enumerate(f.alpha):
            by_image.setdefault(y, []).append(u)
        self.reps: list[list[tuple[int, int]]] = []
        self.lookup: list[dict[tuple[int, int], tuple[int, int]]] = []
        for y in tgt.points():
            cands = [(u, g) for g in G.elements() for u in by_image.get(tgt.table[g][y], ())]
            cands.sort(key=lambda t: (t[1] != e, t[1], t[0]))
            reps: list[tuple[int, int]] = []
            look: dict[tuple[int, int], tuple[int, int]] = {}
            for u, g in cands:
                if (u, g) in look:
                    continue
                r = len(reps)
                reps.append((u, g))
                for h in H.elements():
                    look[(src.table[h][u], G.table[f.gamma(h)][g])] = (r, h)
            self.reps.append(reps)
            self.lookup.append(look)


@lru_cache(maxsize=256)
def _layout(f: EquivariantMap) -> _CommaLayout:
    return _CommaLayout(f)


def _offsets(sizes: Iterable[int]) -> list[int]:
    out, acc = [], 0
    for s in sizes:
        out.append(acc)
        acc += s
    return out


def pushforward(f: EquivariantMap, M: EquivariantModule) -> EquivariantModule:
    """``f_*M`` for maps whose group homomorphism is injective.

    The fiber at ``y`` is the direct sum of ``M_u`` over representatives
    ``(u, g)`` of the comma category at ``y``. For ``gamma`` bijective these
    are exactly the ``u`` with ``alpha(u) = y``, in increasing order; for a
    subgroup inclusion this is induction over cosets.
    """
    if M.action != f.source:
        raise MismatchError("module does not live on the source of the map")
    L = _layout(f)
    tgt, G, H = f.target, f.target.group, f.source.group
    dims = [sum(M.dims[u] for u, _ in L.reps[y]) for y in tgt.points()]
    offs = [_offsets(M.dims[u] for u, _ in L.reps[y]) for y in tgt.points()]
    rho = []
    for g2 in G.elements():
        g2inv = G.inverse[g2]
        row = []
        for y in tgt.points():
            y2 = tgt.table[g2][y]
            out = la.zeros(dims[y2], dims[y])
            for r, (u, g) in enumerate(L.reps[y]):
                # (u, g g2^-1) = h.(rep r2), so m in M_u is rho(h^-1) m at r2
                r2, h = L.lookup[y2][(u, G.table[g][g2inv])]
                u2 = L.reps[y2][r2][0]
                out[offs[y2][r2]: offs[y2][r2] + M.dims[u2], offs[y][r]: offs[y][r] + M.dims[u]] = \
                    M.rho[H.inverse[h]][u]
            row.append(out)
        rho.append(row)
    return make_module(tgt, M.field, dims, rho, check=False)


def pushforward_map(f: EquivariantMap, phi: ModuleMap) -> ModuleMap:
    """``f_*`` on morphisms: block diagonal over comma representatives."""
    L = _layout(f)
    src = pushforward(f, phi.source)
    tgt = pushforward(f, phi.target)
    blocks = [la.block_diag([phi.blocks[u] for u, _ in L.reps[y]], phi.p)
              for y in f.target.points()]
    return ModuleMap(src, tgt, blocks, check=False)


def adjunction_counit(f: EquivariantMap, M: EquivariantModule) -> ModuleMap:
    """``f^* f_* M -> M``: evaluate the family at the comma object ``(u, e)``."""
    L = _layout(f)
    G = f.target.group
    FM = pushforward(f, M)
    src = pullback(f, FM)
    blocks = []
    for u in f.source.points():
        y = f.alpha[u]
        r, h = L.lookup[y][(u, G.identity)]
        ur = L.reps[y][r][0]
        off = _offsets(M.dims[v] for v, _ in L.reps[y])[r]
        blk = la.zeros(M.dims[u], FM.dims[y])
        blk[:, off: off + M.dims[ur]] = M.rho[h][ur]
        blocks.append(blk)
    return ModuleMap(src, M, blocks, check=False)


def adjunction_unit(f: EquivariantMap, N: EquivariantModule) -> ModuleMap:
    """``N -> f_* f^* N``: ``n`` goes to the family ``rho_N(g, y) n`` at ``(u, g)``."""
    L = _layout(f)
    tgt = pushforward(f, pullback(f, N))
    blocks = []
    for y in f.target.points():
        parts = [N.rho[g][y] for _, g in L.reps[y]]
        blocks.append(np.concatenate(parts, axis=0) if parts else la.zeros(0, N.dims[y]))
    return ModuleMap(N, tgt, blocks, check=False)


def projection_iso(f: EquivariantMap, M: EquivariantModule, N: EquivariantModule,
                   check: bool = True) -> ModuleMap:
    """The canonical map ``f_*(M) (x) N -> f_*(M (x) f^*N)``.

    At ``y`` it is block diagonal with blocks ``1 (x) rho_N(g, y)`` over the
    comma representatives ``(u, g)``; for bijective ``gamma`` it is the
    identity matrix. With ``check`` the result is certified to be an
    isomorphism of modules.
    """
    if N.action != f.target:
        raise MismatchError("N must live on the target of the map")
    L = _layout(f)
    p = M.p
    src = tensor(pushforward(f, M), N)
    tgt = pushforward(f, tensor(M, pullback(f, N)))
    blocks = [la.block_diag([la.kron(la.identity(M.dims[u]), N.rho[g][y], p)
                             for u, g in L.reps[y]], p)
              for y in f.target.points()]
    out = ModuleMap(src, tgt, blocks, check=check)
    if check and not out.is_iso():
        raise InvariantError("projection formula map is invertible")
    return out


def two_morphism_pullback_iso(loop: NaturalLoop, N: EquivariantModule) -> ModuleMap:
    """Automorphism of ``f^*N`` induced by a loop: ``rho_N(loop(u), alpha(u))`` at ``u``."""
    f = loop.map
    FN = pullback(f, N)
    blocks = [N.rho[loop[u]][f.alpha[u]] for u in f.source.points()]
    return ModuleMap(FN, FN, blocks, check=False)


def two_morphism_transport(t: TwoMorphism, N: EquivariantModule) -> ModuleMap:
    """``second^*N -> first^*N`` for ``t : first => second``; at ``u`` this is
    ``rho_N(t(u)^-1, second.alpha(u))``."""
    G = t.first.target.group
    src = pullback(t.second, N)
    tgt = pullback(t.first, N)
    blocks = [N.rho[G.inverse[t[u]]][t.second.alpha[u]] for u in t.first.source.points()]
    return ModuleMap(src, tgt, blocks, check=False)


# -- hom spaces -----------------------------------------------------------------------


def intertwiner_basis(src_dims: Sequence[int], tgt_dims: Sequence[int], constraints, p: int
                      ) -> list[list[np.ndarray]]:
    """Basis of families ``f_x`` (``tgt_dims[x] x src_dims[x]``) with ``f_y A = B f_x``.

    ``constraints`` yields ``(x, y, A, B)`` with ``A : src_x -> src_y`` and
    ``B : tgt_x -> tgt_y``.
    """
    sizes = [t * s for s, t in zip(src_dims, tgt_dims)]
    offs = _offsets(sizes)
    total = sum(sizes)
    rows = []
    for x, y, A, B in constraints:
        n_eq = tgt_dims[y] * src_dims[x]
        if n_eq == 0:
            continue
        blk = la.zeros(n_eq, total)
        if sizes[y]:
            blk[:, offs[y]: offs[y] + sizes[y]] += np.kron(la.identity(tgt_dims[y]), A.T)
        if sizes[x]:
            blk[:, offs[x]: offs[x] + sizes[x]] -= np.kron(B, la.identity(src_dims[x]))
        rows.append(blk % p)
    if total == 0:
        return []
    system = np.concatenate(rows, axis=0) if rows else la.zeros(0, total)
    kernel = la.nullspace(system, p)
    out = []
    for vec in kernel:
        out.append([vec[offs[x]: offs[x] + sizes[x]].reshape(tgt_dims[x], src_dims[x])
                    for x in range(len(sizes))])
    return out


def _rho_constraints(M: EquivariantModule, N: EquivariantModule):
    act = M.action
    for g in act.group.generators:
        for x in act.points():
            yield x, act.table[g][x], M.rho[g][x], N.rho[g][x]


def hom_space(M: EquivariantModule, N: EquivariantModule) -> list[ModuleMap]:
    """A basis of ``Hom(M, N)`` from the intertwining equations."""
    _same_category(M, N)
    basis = intertwiner_basis(M.dims, N.dims, _rho_constraints(M, N), M.p)
    return [ModuleMap(M, N, blocks, check=False) for blocks in basis]


def hom_dim(M: EquivariantModule, N: EquivariantModule) -> int:
    return len(hom_space(M, N))


def random_combination(basis: Sequence[ModuleMap], rng: np.random.Generator,
                       source=None, target=None) -> ModuleMap:
    if not basis:
        return ModuleMap(source, target,
                         [la.zeros(target.dims[x], source.dims[x]) for x in source.action.points()],
                         check=False)
    p = basis[0].p
    coeffs = rng.integers(0, p, size=len(basis))
    blocks = [sum(int(c) * b.blocks[x] for c, b in zip(coeffs, basis)) % p
              for x in range(len(basis[0].blocks))]
    return ModuleMap(basis[0].source, basis[0].target, blocks, check=False)


def find_isomorphism(M: EquivariantModule, N: EquivariantModule, seed: int = 0,
                     retries: int = 64) -> ModuleMap | None:
    """A certified isomorphism ``M -> N``, or ``None`` if none was found."""
    _same_category(M, N)
    if M.dims != N.dims:
        return None
    basis = hom_space(M, N)
    if not basis:
        return None if M.total_dim else ModuleMap(M, N, [la.zeros(0, 0)] * len(M.dims), False)
    rng = np.random.default_rng(seed)
    for _ in range(retries):
        f = random_combination(basis, rng)
        if f.is_iso():
            return f
    return None


def submodule(M: EquivariantModule, spans: Sequence[np.ndarray], check: bool = True
              ) -> tuple[EquivariantModule, ModuleMap]:
    """The submodule whose fiber at ``x`` is the column space of ``spans[x]``.

    Returns the submodule with its inclusion into ``M``.
    """
    p = M.p
    act = M.action
    bases, rows = [], []
    for x in act.points():
        B, r = la.column_basis(spans[x], p)
        bases.append(B)
        rows.append(r)
    dims = [B.shape[1] for B in bases]
    rho = []
    for g in act.group.elements():
        row = []
        for x in act.points():
            gx = act.table[g][x]
            moved = la.matmul(M.rho[g][x], bases[x], p)
            coords = moved[rows[gx], :]
            if check and not np.array_equal(la.matmul(bases[gx], coords, p), moved):
                raise InvariantError("subspaces are stable under the action", (g, x))
            row.append(coords)
        rho.append(row)
    W = make_module(act, M.field, dims, rho, check=False)
    return W, ModuleMap(W, M, bases, check=False)


def regular_module(action: GroupAction, field) -> EquivariantModule:
    """Direct sum over orbits of the module induced from the trivial group at the orbit's
    smallest point; the finite form of the groupoid algebra."""
    parts = [pushforward(_point_inclusion(action, orb[0], trivial_group()),
                         unit(GroupAction.point(trivial_group()), field))
             for orb in action.orbits]
    return direct_sum(*parts) if parts else zero_module(action, field)


def _point_inclusion(action: GroupAction, x: int, sub: FiniteGroup | GroupHom) -> EquivariantMap:
    """``(K on a point) -> (G on X)`` sending the point to ``x``; ``sub`` is a subgroup
    inclusion into the stabilizer of ``x`` or the trivial group."""
    if isinstance(sub, FiniteGroup):
        gamma = GroupHom(sub, action.group, [action.group.identity])
        return EquivariantMap(GroupAction.point(sub), action, [x], gamma)
    return EquivariantMap(GroupAction.point(sub.domain), action, [x], sub)


# -- simple objects ---------------------------------------------------------------------


def _check_splits(action: GroupAction, p: int) -> None:
    for orb in action.orbits:
        stab = action.stabilizer(orb[0]).domain
        if stab.order % p == 0 or (p - 1) % stab.exponent:
            raise NonSplittingFieldError(
                f"GF({p}) is not a splitting field for the stabilizer of point {orb[0]}")


def count_simples(action: GroupAction, field=None) -> int:
    """Sum over orbits of the number of conjugacy classes of the stabilizer."""
    from .groups import splitting_prime

    p = _field(field).p if field is not None else splitting_prime(action.group)
    _check_splits(action, p)
    return sum(len(conjugacy_classes(action.stabilizer(orb[0]).domain)) for orb in action.orbits)


def is_simple(M: EquivariantModule) -> bool:
    """``End(M)`` is one-dimensional (over a splitting field: ``M`` is simple)."""
    return M.total_dim > 0 and hom_dim(M, M) == 1


def _eigenvalue(E: ModuleMap, order: Sequence[int]) -> int | None:
    p = E.p
    for lam in order:
        for b in E.blocks:
            d = b.shape[0]
            if d and la.rank((b - lam * la.identity(d)) % p, p) < d:
                return int(lam)
    return None


def split_into_simples(M: EquivariantModule, rng: np.random.Generator, retries: int = 32
                       ) -> list[EquivariantModule]:
    """Decompose a semisimple module by Fitting splittings of random endomorphisms."""
    p = M.p
    pending, out = [M], []
    while pending:
        W = pending.pop()
        if W.total_dim == 0:
            continue
        basis = hom_space(W, W)
        if len(basis) == 1:
            out.append(W)
            continue
        for _ in range(retries):
            E = random_combination(basis, rng)
            lam = _eigenvalue(E, rng.permutation(p))
            if lam is None:
                continue
            # Fitting decomposition: W = ker (E - lam)^n (+) im (E - lam)^n
            shifted = []
            for b in E.blocks:
                step = (b - lam * la.identity(b.shape[0])) % p
                acc = la.identity(b.shape[0])
                for _ in range(max(W.dims)):
                    acc = la.matmul(acc, step, p)
                shifted.append(acc)
            kernels = [la.nullspace(s, p).T for s in shifted]
            if not any(k.shape[1] for k in kernels) or not any(la.rank(s, p) for s in shifted):
                continue
            K, _ = submodule(W, kernels, check=False)
            I, _ = submodule(W, shifted, check=False)
            pending.extend([I, K])
            break
        else:
            raise SplittingFailedError(f"could not split a module of dims {W.dims}")
    return out


def character(M: EquivariantModule, x: int) -> tuple[int, ...]:
    """Traces of the stabilizer of ``x`` acting on the fiber at ``x``."""
    act = M.action
    return tuple(int(np.trace(M.rho[g][x]) % M.p) for g in act.stabilizer_elements(x))


@lru_cache(maxsize=128)
def _point_irreps(group: FiniteGroup, p: int, seed: int) -> tuple[EquivariantModule, ...]:
    point = GroupAction.point(group)
    reg = regular_module(point, p)
    pieces = split_into_simples(reg, np.random.default_rng(seed))
    distinct: list[EquivariantModule] = []
    for S in pieces:
        if not any(S.dims == T.dims and hom_dim(S, T) for T in distinct):
            distinct.append(S)
    distinct.sort(key=lambda S: (S.dims[0], character(S, 0)))
    return tuple(distinct)


def point_irreps(group: FiniteGroup, field, seed: int = 0) -> tuple[EquivariantModule, ...]:
    """Irreducible representations of ``group`` as modules over the one-point action."""
    p = _field(field).p
    _check_splits(GroupAction.point(group), p)
    return _point_irreps(group, p, seed)


@lru_cache(maxsize=128)
def _simples(action: GroupAction, p: int, seed: int) -> tuple[EquivariantModule, ...]:
    out = []
    for orb in action.orbits:
        x = orb[0]
        inc = action.stabilizer(x)
        f = _point_inclusion(action, x, inc)
        for irrep in _point_irreps(inc.domain, p, seed):
            out.append(pushforward(f, irrep))
    return tuple(out)


def construct_simples(action: GroupAction, field=None, seed: int = 0
                      ) -> tuple[EquivariantModule, ...]:
    """One representative of every simple module, induced from stabilizer irreducibles.

    Ordered by orbit, then by ``(dimension, character)`` of the stabilizer
    representation.
    """
    from .groups import splitting_prime

    p = _field(field).p if field is not None else splitting_prime(action.group)
    _check_splits(action, p)
    return _simples(action, p, seed)


def random_module(action: GroupAction, max_dim: int, seed: int, field=None) -> EquivariantModule:
    """A random module with fibers of dimension at most ``max_dim``.

    For each orbit a random stabilizer representation (sum of irreducibles in
    a random basis) is induced to the orbit, so the cocycle holds by
    construction.
    """
    from .groups import splitting_prime

    p = _field(field).p if field is not None else splitting_prime(action.group)
    field = PrimeField(p)
    rng = np.random.default_rng(seed)
    parts = []
    for orb in action.orbits:
        x = orb[0]
        inc = action.stabilizer(x)
        irreps = point_irreps(inc.domain, p)
        budget = int(rng.integers(0, max_dim + 1))
        chosen = []
        while True:
            fits = [S for S in irreps if S.dims[0] <= budget]
            if not fits:
                break
            S = fits[int(rng.integers(len(fits)))]
            chosen.append(S)
            budget -= S.dims[0]
        point = GroupAction.point(inc.domain)
        if chosen:
            V = direct_sum(*chosen)
            P = la.random_invertible(rng, V.dims[0], p)
            Pinv = la.inverse(P, p)
            V = make_module(point, field, V.dims,
                            [[la.mat_chain(p, P, V.rho[g][0], Pinv)] for g in point.group.elements()],
                            check=False)
        else:
            V = zero_module(point, field)
        parts.append(pushforward(_point_inclusion(action, x, inc), V))
    return direct_sum(*parts) if parts else zero_module(action, field)


def random_map(M: EquivariantModule, N: EquivariantModule, rng: np.random.Generator) -> ModuleMap:
    return random_combination(hom_space(M, N), rng, source=M, target=N)
