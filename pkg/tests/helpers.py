"""Shared builders for the test suite: random maps, short exact sequences, contexts."""

from __future__ import annotations

import numpy as np

from cograde import linalg as la
from cograde.catalog import catalog
from cograde.cog import RegradeContext
from cograde.graded import GradedModule, direct_sum, quotient, shift, submodule
from cograde.homalg import _orbit_span, hom_graded

# (morphism, source algebra) pairs whose kernel is finite and nontrivial
FINITE_KERNEL_CONFIGS = (("iota", "K6"), ("iota", "B1"), ("tau", "C1"), ("tau", "C2"))


def context(phi_name: str, algebra_name: str) -> RegradeContext:
    cat = catalog()
    return RegradeContext(cat.morphisms[phi_name], cat.algebras[algebra_name])


def modules_over(algebra_name: str) -> list:
    return list(catalog().modules[algebra_name].values())


def random_hom(S: GradedModule, T: GradedModule, rng: np.random.Generator):
    """A uniformly random element of ``Hom(S, T)``, or ``None`` if that space is zero."""
    basis = hom_graded(S, T)
    if not len(basis):
        return None
    c = rng.integers(0, S.p, len(basis))
    return np.tensordot(c, basis, axes=(0, 0)) % S.p


def random_module(algebra_name: str, rng: np.random.Generator) -> GradedModule:
    """A catalog module, or a sum of two shifted catalog modules."""
    mods = modules_over(algebra_name)
    M = mods[int(rng.integers(len(mods)))]
    if rng.random() < 0.5:
        N = mods[int(rng.integers(len(mods)))]
        G = M.group
        g = G.reduce(rng.integers(-2, 3, G.ngens)) if G.ngens else G.zero
        M = direct_sum(M, shift(N, g))
    return M


def random_homogeneous_vector(M: GradedModule, rng: np.random.Generator) -> np.ndarray:
    comps = sorted(M.components.items())
    while True:
        _, ix = comps[int(rng.integers(len(comps)))]
        v = np.zeros(M.dim, dtype=np.int64)
        v[ix] = rng.integers(0, M.p, len(ix))
        if v.any():
            return v


def random_ses(M: GradedModule, rng: np.random.Generator):
    """``0 -> K -> M -> Q -> 0`` with ``K`` generated by one or two random homogeneous vectors."""
    p = M.p
    vecs = [random_homogeneous_vector(M, rng) for _ in range(int(rng.integers(1, 3)))]
    span = la.column_space(np.column_stack([_orbit_span(M, v) for v in vecs]), p)
    # homogeneous basis of the span, component by component
    cols = []
    for _, ix in sorted(M.components.items()):
        part = np.zeros_like(span)
        part[ix] = span[ix]
        for c in la.column_space(part, p).T:
            cols.append(c)
    K = np.column_stack(cols) if cols else np.zeros((M.dim, 0), dtype=np.int64)
    sub = submodule(M, K)
    Q, proj, _ = quotient(M, K)
    return sub, Q, K, proj


def is_short_exact(f: np.ndarray, g: np.ndarray, dims: tuple, p: int) -> bool:
    """``0 -> A -f-> B -g-> C -> 0`` is exact (``dims = (dim A, dim B, dim C)``)."""
    a, b, c = dims
    if f.shape != (b, a) or g.shape != (c, b):
        return False
    if a and la.rank(f, p) != a:
        return False
    if c and la.rank(g, p) != c:
        return False
    if a and c and la.matmul(g, f, p).any():
        return False
    return a + c == b
