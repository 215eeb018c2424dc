"""Functions on a finite G-set and the twisted product of its fixed-point quotients.

For ``A = F_p^X`` and ``h`` in ``G``, the quotient ``A / <h(a) - a>`` is
computed from the ideal spanned by ``b (h(a) - a)`` over basis functions
``a, b``; nothing about fixed points is assumed. The product ``B`` of these
quotients over ``h`` carries the action ``g : (h-component) -> (g h g^-1)``
and is compared entrywise with functions on the inertia pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import InvariantError
from .gsets import GroupAction, InertiaAction, fixed_points
from .linalg import PrimeField


@dataclass(frozen=True)
class FunctionRing:
    """``F_p^X`` with pointwise operations and ``(g.f)(x) = f(g^-1 . x)``."""

    action: GroupAction
    field: PrimeField

    @property
    def dim(self) -> int:
        return self.action.size

    def act_matrix(self, g: int) -> np.ndarray:
        """Matrix of ``f -> g.f`` on delta functions: ``delta_x -> delta_{g.x}``."""
        n = self.dim
        P = la.zeros(n, n)
        for x in range(n):
            P[self.action.table[g][x], x] = 1
        return P

    def one(self) -> np.ndarray:
        return np.ones(self.dim, dtype=np.int64)

    def mul(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        return f * g % self.field.p


@dataclass(frozen=True)
class TwistedQuotient:
    """``A / <h(a) - a>``: dimension, ideal basis and a projection onto delta functions.

    ``points`` lists the ``x`` whose delta functions form the quotient basis;
    ``projection`` maps ``A`` onto coordinates in that basis and kills the
    ideal.
    """

    h: int
    ideal: np.ndarray
    points: tuple[int, ...]
    projection: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.points)

    def lift(self) -> np.ndarray:
        """Columns are the delta functions of the basis points, as elements of ``A``."""
        n = self.projection.shape[1]
        L = la.zeros(n, len(self.points))
        for k, x in enumerate(self.points):
            L[x, k] = 1
        return L


def ideal_generators(A: FunctionRing, h: int) -> np.ndarray:
    """Rows ``delta_b * (h.delta_a - delta_a)`` for all basis functions ``a, b``."""
    n, p = A.dim, A.field.p
    P = A.act_matrix(h)
    rows = []
    for a in range(n):
        diff = (P[:, a] - la.identity(n)[:, a]) % p
        for b in range(n):
            rows.append(la.identity(n)[b] * diff % p)
    return np.array(rows, dtype=np.int64).reshape(-1, n)


def twisted_quotient(A: FunctionRing, h: int) -> TwistedQuotient:
    """The quotient by the ideal generated by ``h(a) - a``.

    The ideal is the span of :func:`ideal_generators` (already closed under
    multiplication by ``A``). Its complement is then matched with delta
    functions on points outside the support of the ideal; the match is
    checked, not assumed.
    """
    n, p = A.dim, A.field.p
    gens = ideal_generators(A, h)
    R, pivots, rank = la.rref(gens, p) if gens.size else (gens, [], 0)
    ideal = R[:rank]
    support = {int(c) for row in ideal for c in np.flatnonzero(row)}
    points = tuple(x for x in range(n) if x not in support)
    if rank + len(points) != n:
        raise InvariantError("delta functions off the ideal complement it", (h, rank, points))
    basis = np.concatenate([ideal.T, la.identity(n)[:, list(points)]], axis=1)
    inv = la.inverse(basis, p)
    projection = inv[rank:, :]
    return TwistedQuotient(h, ideal, points, projection)


@dataclass(frozen=True)
class TwistedProductRing:
    """``B = prod_h A / <h(a) - a>`` with its twisted ``G``-action.

    Coordinates are concatenated over ``h`` in group order, each component in
    its own delta basis. ``action[g]`` is the matrix of ``g`` on ``B``.
    """

    ring: FunctionRing
    components: tuple[TwistedQuotient, ...]
    action: tuple[np.ndarray, ...]

    @property
    def offsets(self) -> list[int]:
        out, acc = [], 0
        for c in self.components:
            out.append(acc)
            acc += c.dim
        return out

    @property
    def dim(self) -> int:
        return sum(c.dim for c in self.components)

    def one(self) -> np.ndarray:
        A = self.ring
        return np.concatenate([c.projection @ A.one() % A.field.p for c in self.components])

    def mul(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Componentwise product, computed by lifting to ``A`` and projecting back."""
        p = self.ring.field.p
        out = []
        for c, off in zip(self.components, self.offsets):
            lu = c.lift() @ u[off: off + c.dim] % p
            lv = c.lift() @ v[off: off + c.dim] % p
            out.append(c.projection @ (lu * lv % p) % p)
        return np.concatenate(out) if out else la.zeros(0, 1)[:, 0]


def ring_B(action: GroupAction, field) -> TwistedProductRing:
    """Assemble ``B`` and its action ``g : A/I_h -> A/I_{g h g^-1}, [f] -> [g.f]``.

    Well-definedness (``g`` maps ``I_h`` into ``I_{g h g^-1}``) is checked
    by rank computations.
    """
    field = field if isinstance(field, PrimeField) else PrimeField(int(field))
    A = FunctionRing(action, field)
    G, p = action.group, field.p
    comps = tuple(twisted_quotient(A, h) for h in G.elements())
    offs, acc = [], 0
    for c in comps:
        offs.append(acc)
        acc += c.dim
    mats = []
    for g in G.elements():
        P = A.act_matrix(g)
        T = la.zeros(acc, acc)
        for h, c in enumerate(comps):
            k = G.conj(g, h)
            target = comps[k]
            if c.ideal.shape[0]:
                moved = la.matmul(P, c.ideal.T, p)
                if la.rank(np.concatenate([target.ideal.T, moved], axis=1), p) != target.ideal.shape[0]:
                    raise InvariantError("g maps the ideal of h into the ideal of g h g^-1", (g, h))
            blk = la.mat_chain(p, target.projection, P, c.lift())
            T[offs[k]: offs[k] + target.dim, offs[h]: offs[h] + c.dim] = blk
        mats.append(T)
    return TwistedProductRing(A, comps, tuple(mats))


@dataclass(frozen=True)
class RingComparison:
    """The map ``B -> F_p^{inertia pairs}`` and the outcome of its checks."""

    matrix: np.ndarray
    bijective: bool
    unital: bool
    multiplicative: bool
    equivariant: bool

    @property
    def certified(self) -> bool:
        return self.bijective and self.unital and self.multiplicative and self.equivariant


def compare_with_inertia(B: TwistedProductRing, inert: InertiaAction | None = None
                         ) -> RingComparison:
    """Send ``delta_x`` in the ``h``-component to ``delta_{(x, h)}`` and check that this
    is an isomorphism of rings with ``G``-action."""
    action = B.ring.action
    inert = inert or InertiaAction(action)
    p = B.ring.field.p
    n = B.dim
    psi = la.zeros(inert.size, n)
    for c, off in zip(B.components, B.offsets):
        for k, x in enumerate(c.points):
            psi[inert.index[(x, c.h)], off + k] = 1
    bijective = psi.shape[0] == psi.shape[1] and la.is_invertible(psi, p)
    F = FunctionRing(inert, B.ring.field)
    unital = bool(np.array_equal(psi @ B.one() % p, F.one()))
    multiplicative = True
    eye = la.identity(n)
    for i in range(n):
        for j in range(n):
            lhs = psi @ B.mul(eye[i], eye[j]) % p
            rhs = F.mul(psi[:, i], psi[:, j])
            if not np.array_equal(lhs, rhs):
                multiplicative = False
    equivariant = all(np.array_equal(la.matmul(psi, B.action[g], p),
                                      la.matmul(F.act_matrix(g), psi, p))
                      for g in action.group.elements())
    return RingComparison(psi, bijective, unital, multiplicative, equivariant)


def fixed_point_dims(action: GroupAction, field) -> list[tuple[int, int, int]]:
    """``(h, dim A/<h(a)-a>, |X^h|)`` for every group element."""
    A = FunctionRing(action, field if isinstance(field, PrimeField) else PrimeField(int(field)))
    return [(h, twisted_quotient(A, h).dim, len(fixed_points(action, h)))
            for h in action.group.elements()]
