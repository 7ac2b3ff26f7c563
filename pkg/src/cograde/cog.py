"""Change-of-grading functors along a group morphism ``phi: G -> H``.

``push`` (lower shriek) relabels degrees through ``phi``; ``pushstar`` is the
product version, which agrees with ``push`` on finite-dimensional objects and
comes with the comparison map ``eta``.  ``pull`` (upper star) is the right
adjoint of ``push``; it lives on pairs ``(n, g)`` with ``phi(g) = deg n`` and
therefore needs ``ker phi`` to be finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg as la
from .abgroups import FgAbGroup, GroupMorphism, is_phi_finite, kernel
from .graded import GradedAlgebra, GradedMap, GradedModule, direct_sum, shift

__all__ = [
    "InfiniteKernel",
    "RegradeContext",
    "push_algebra",
    "push",
    "push_map",
    "pushstar",
    "eta_is_iso",
    "pull",
    "pull_map",
    "adj_alpha",
    "adj_beta",
    "adj_gamma",
    "adj_delta",
    "unit_map",
    "counit_map",
    "pull_push_decomposition",
]


class InfiniteKernel(ValueError):
    def __init__(self, phi: GroupMorphism):
        L, _ = kernel(phi)
        super().__init__(
            f"ker of {phi.source} -> {phi.target} is {L}, which is infinite; "
            "pull-backs would be infinite-dimensional (use a morphism with finite kernel)"
        )


def push_algebra(phi: GroupMorphism, A: GradedAlgebra) -> GradedAlgebra:
    if A.group != phi.source:
        raise ValueError(f"algebra is graded by {A.group}, morphism starts at {phi.source}")
    degs = tuple(phi(d) for d in A.degrees)
    return GradedAlgebra(A.field, phi.target, A.labels, degs, A.unit, A.mult, name=A.name, check=False)


@dataclass(frozen=True, eq=False)
class RegradeContext:
    phi: GroupMorphism
    source: GradedAlgebra

    @cached_property
    def target(self) -> GradedAlgebra:
        return push_algebra(self.phi, self.source)

    @cached_property
    def kernel(self) -> tuple[FgAbGroup, GroupMorphism]:
        return kernel(self.phi)

    @property
    def finite_kernel(self) -> bool:
        return self.kernel[0].is_finite

    @cached_property
    def kernel_elements(self) -> tuple:
        """Elements of ``ker phi`` as elements of ``G``, in canonical order."""
        L, emb = self.kernel
        if not L.is_finite:
            raise InfiniteKernel(self.phi)
        return tuple(emb(l) for l in L.elements())

    def require_finite_kernel(self):
        if not self.finite_kernel:
            raise InfiniteKernel(self.phi)

    def lifts(self, h) -> tuple:
        """All ``g`` with ``phi(g) = h`` (requires a finite kernel)."""
        g0 = self.phi.preimage(h)
        if g0 is None:
            return ()
        G = self.phi.source
        return tuple(G.add(g0, l) for l in self.kernel_elements)

    def check_source(self, M: GradedModule):
        if M.algebra != self.source:
            raise ValueError("module is not over the source algebra of this regrading")

    def check_target(self, N: GradedModule):
        if N.algebra != self.target:
            raise ValueError("module is not over the regraded algebra")


def push(ctx: RegradeContext, M: GradedModule) -> GradedModule:
    ctx.check_source(M)
    phi = ctx.phi
    gens = None if M.free_gens is None else tuple(phi(g) for g in M.free_gens)
    return GradedModule(
        ctx.target, tuple(phi(d) for d in M.degrees), M.act, M.labels, M.name, gens, check=False
    )


def push_map(ctx: RegradeContext, f: GradedMap) -> GradedMap:
    return GradedMap(push(ctx, f.source), push(ctx, f.target), f.matrix, check=False)


def pushstar(ctx: RegradeContext, M: GradedModule) -> tuple[GradedModule, GradedMap]:
    """Product regrading and ``eta: push(M) -> pushstar(M)``.

    For finite-dimensional ``M`` every fiber meets the support finitely, so
    the product over each fiber is the direct sum and ``eta`` is the identity.
    """
    P = push(ctx, M)
    return P, P.identity()


def eta_is_iso(support, phi: GroupMorphism) -> bool:
    return is_phi_finite(support, phi)


@dataclass(frozen=True)
class _PullBasis:
    pairs: tuple  # (index in N, g)
    index: dict


def _pull_basis(ctx: RegradeContext, N: GradedModule) -> _PullBasis:
    pairs = []
    cache: dict = {}
    for i, h in enumerate(N.degrees):
        if h not in cache:
            cache[h] = ctx.lifts(h)
        pairs.extend((i, g) for g in cache[h])
    return _PullBasis(tuple(pairs), {pg: j for j, pg in enumerate(pairs)})


def pull(ctx: RegradeContext, N: GradedModule) -> GradedModule:
    """Basis ``(n, g)`` with ``phi(g) = deg n``, degree ``g``; ``a(n, g) = (a n, deg a + g)``."""
    ctx.check_target(N)
    ctx.require_finite_kernel()
    A, G = ctx.source, ctx.phi.source
    basis = _pull_basis(ctx, N)
    d = len(basis.pairs)
    act = np.zeros((A.dim, d, d), dtype=np.int64)
    for t in range(A.dim):
        dt = A.degrees[t]
        block = N.act[t]
        if not block.any():
            continue
        for col, (i, g) in enumerate(basis.pairs):
            g2 = G.add(dt, g)
            for r in np.flatnonzero(block[:, i]):
                act[t, basis.index[(int(r), g2)], col] = block[r, i]
    labels = tuple(f"{N.labels[i]}@{_fmt(g)}" for i, g in basis.pairs)
    degs = tuple(g for _, g in basis.pairs)
    name = f"pull({N.name})" if N.name else ""
    return GradedModule(A, degs, act, labels, name, check=False)


def _fmt(g) -> str:
    return "(" + ",".join(map(str, g)) + ")"


def pull_map(ctx: RegradeContext, f: GradedMap) -> GradedMap:
    S, T = pull(ctx, f.source), pull(ctx, f.target)
    bs, bt = _pull_basis(ctx, f.source), _pull_basis(ctx, f.target)
    m = np.zeros((T.dim, S.dim), dtype=np.int64)
    for col, (i, g) in enumerate(bs.pairs):
        for r in np.flatnonzero(f.matrix[:, i]):
            m[bt.index[(int(r), g)], col] = f.matrix[r, i]
    return GradedMap(S, T, m, check=False)


# ---------------------------------------------------------------------------
# adjunctions:  push -| pull -| pushstar

def adj_alpha(ctx: RegradeContext, M: GradedModule, N: GradedModule, f: np.ndarray) -> GradedMap:
    """``Hom^H(push M, N) -> Hom^G(M, pull N)``, ``m -> f(m) (x) deg m``."""
    f = _as_hom(ctx, push(ctx, M), N, f)
    P = pull(ctx, N)
    basis = _pull_basis(ctx, N)
    out = np.zeros((P.dim, M.dim), dtype=np.int64)
    for m, g in enumerate(M.degrees):
        for r in np.flatnonzero(f[:, m]):
            out[basis.index[(int(r), g)], m] = f[r, m]
    return GradedMap(M, P, out)


def adj_beta(ctx: RegradeContext, M: GradedModule, N: GradedModule, f: np.ndarray) -> GradedMap:
    """Inverse of :func:`adj_alpha`: compose with the counit ``push pull N -> N``."""
    P = pull(ctx, N)
    f = _as_hom(ctx, M, P, f)
    E = counit_matrix(ctx, N)
    return GradedMap(push(ctx, M), N, la.matmul(E, f, M.p))


def counit_matrix(ctx: RegradeContext, N: GradedModule) -> np.ndarray:
    basis = _pull_basis(ctx, N)
    E = np.zeros((N.dim, len(basis.pairs)), dtype=np.int64)
    for col, (i, _) in enumerate(basis.pairs):
        E[i, col] = 1
    return E


def counit_map(ctx: RegradeContext, N: GradedModule) -> GradedMap:
    """``push pull N -> N``, ``(n, g) -> n``."""
    return GradedMap(push(ctx, pull(ctx, N)), N, counit_matrix(ctx, N))


def unit_map(ctx: RegradeContext, M: GradedModule) -> GradedMap:
    """``M -> pull push M``, the image of the identity under :func:`adj_alpha`."""
    P = push(ctx, M)
    return adj_alpha(ctx, M, P, np.eye(M.dim, dtype=np.int64))


def adj_gamma(ctx: RegradeContext, N: GradedModule, M: GradedModule, f: np.ndarray) -> GradedMap:
    """``Hom^G(pull N, M) -> Hom^H(N, pushstar M)``, ``n -> (f(n (x) g))_g``."""
    P = pull(ctx, N)
    f = _as_hom(ctx, P, M, f)
    basis = _pull_basis(ctx, N)
    Q, _ = pushstar(ctx, M)
    phi = ctx.phi
    out = np.zeros((M.dim, N.dim), dtype=np.int64)
    for m, g in enumerate(M.degrees):
        h = phi(g)
        for n in range(N.dim):
            if N.degrees[n] == h:
                out[m, n] = f[m, basis.index[(n, g)]]
    return GradedMap(N, Q, out)


def adj_delta(ctx: RegradeContext, N: GradedModule, M: GradedModule, f: np.ndarray) -> GradedMap:
    """Inverse of :func:`adj_gamma`: ``n (x) g -> g-component of f(n)``."""
    Q, _ = pushstar(ctx, M)
    f = _as_hom(ctx, N, Q, f)
    P = pull(ctx, N)
    basis = _pull_basis(ctx, N)
    out = np.zeros((M.dim, P.dim), dtype=np.int64)
    for col, (n, g) in enumerate(basis.pairs):
        rows = [m for m, dm in enumerate(M.degrees) if dm == g]
        out[rows, col] = f[rows, n]
    return GradedMap(P, M, out)


def _as_hom(ctx, S: GradedModule, T: GradedModule, f) -> np.ndarray:
    if isinstance(f, GradedMap):
        f = f.matrix
    f = np.asarray(f, dtype=np.int64) % S.p
    # validates homogeneity and linearity
    GradedMap(S, T, f)
    return f


# ---------------------------------------------------------------------------

def pull_push_decomposition(ctx: RegradeContext, M: GradedModule) -> GradedMap:
    """Isomorphism ``pull push M -> (+)_{l in L} M[l]``.

    ``m (x) g'`` with ``m`` of degree ``g`` goes to ``m`` in the summand
    ``l = g - g'``, which is where ``m`` has degree ``g'``.
    """
    ctx.check_source(M)
    ctx.require_finite_kernel()
    G = ctx.phi.source
    PP = pull(ctx, push(ctx, M))
    ls = ctx.kernel_elements
    target = direct_sum(*(shift(M, l) for l in ls))
    pos = {l: s * M.dim for s, l in enumerate(ls)}
    basis = _pull_basis(ctx, push(ctx, M))
    m = np.zeros((target.dim, PP.dim), dtype=np.int64)
    for col, (i, g2) in enumerate(basis.pairs):
        l = G.sub(M.degrees[i], g2)
        m[pos[l] + i, col] = 1
    return GradedMap(PP, target, m)
