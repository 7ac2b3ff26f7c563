"""Finitely generated abelian grading groups.

A group ``Z^r x Z/n1 x ... x Z/nk`` has elements stored as integer tuples of
length ``r + k``, free coordinates first, torsion coordinates reduced into
``[0, n_i)``.  Morphisms are integer matrices whose columns are the images of
the source generators.  Kernels are computed through Smith normal form.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Iterable, Sequence

from .linalg import Field

__all__ = [
    "FgAbGroup",
    "GroupMorphism",
    "FiniteSupport",
    "CosetSupport",
    "DimValue",
    "smith_normal_form",
    "kernel",
    "fiber",
    "is_phi_finite",
    "pd_trivial_module",
    "trivial_module_resolution",
    "TRIVIAL",
    "Z",
]

Element = tuple


class MalformedMorphism(ValueError):
    pass


@dataclass(frozen=True)
class FgAbGroup:
    free_rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(n) for n in self.torsion))
        if self.free_rank < 0 or any(n < 2 for n in self.torsion):
            raise ValueError(f"bad group data: rank {self.free_rank}, torsion {self.torsion}")

    @classmethod
    def parse(cls, text: str) -> "FgAbGroup":
        """Parse ``Z^r x Z/n1 x ...``; ``0`` is the trivial group."""
        text = text.strip()
        if text in ("0", "1", ""):
            return cls()
        r, tors = 0, []
        for part in re.split(r"\s*x\s*", text):
            part = part.replace(" ", "")
            if m := re.fullmatch(r"Z(?:\^(\d+))?", part):
                r += int(m.group(1) or 1)
            elif m := re.fullmatch(r"Z/(\d+)", part):
                n = int(m.group(1))
                if n == 1:
                    continue
                tors.append(n)
            else:
                raise ValueError(f"cannot parse group factor {part!r}")
        return cls(r, tuple(tors))

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts.extend(f"Z/{n}" for n in self.torsion)
        return " x ".join(parts) or "0"

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self):
        if not self.is_finite:
            return None
        out = 1
        for n in self.torsion:
            out *= n
        return out

    @property
    def zero(self) -> Element:
        return (0,) * self.ngens

    def reduce(self, g: Iterable[int]) -> Element:
        g = tuple(int(x) for x in g)
        if len(g) != self.ngens:
            raise ValueError(f"element {g} has wrong length for {self}")
        r = self.free_rank
        return g[:r] + tuple(x % n for x, n in zip(g[r:], self.torsion))

    def add(self, a: Element, b: Element) -> Element:
        return self.reduce(x + y for x, y in zip(a, b))

    def neg(self, a: Element) -> Element:
        return self.reduce(-x for x in a)

    def sub(self, a: Element, b: Element) -> Element:
        return self.reduce(x - y for x, y in zip(a, b))

    def contains(self, g) -> bool:
        try:
            return self.reduce(g) == tuple(g)
        except (ValueError, TypeError):
            return False

    def elements(self) -> list[Element]:
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return [tuple(t) for t in itertools.product(*(range(n) for n in self.torsion))]

    def relation_matrix(self) -> list[list[int]]:
        """Columns generate the relations of the presentation ``Z^ngens -> G``."""
        k = self.ngens
        cols = []
        for i, n in enumerate(self.torsion):
            c = [0] * k
            c[self.free_rank + i] = n
            cols.append(c)
        return _transpose(cols, k)


TRIVIAL = FgAbGroup()
Z = FgAbGroup(1)


def _transpose(cols, nrows):
    return [[c[i] for c in cols] for i in range(nrows)]


def _matvec(m, v):
    return [sum(a * b for a, b in zip(row, v)) for row in m]


@dataclass(frozen=True)
class GroupMorphism:
    source: FgAbGroup
    target: FgAbGroup
    matrix: tuple  # rows: target coordinates, columns: source generators

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        if len(m) != self.target.ngens or any(len(row) != self.source.ngens for row in m):
            raise MalformedMorphism(
                f"matrix shape does not match {self.source} -> {self.target}"
            )
        # well-defined on torsion: n_i times the i-th torsion generator maps to 0
        r = self.source.free_rank
        for i, n in enumerate(self.source.torsion):
            col = [row[r + i] * n for row in m]
            if self.target.reduce(col) != self.target.zero or any(
                c != 0 for c in col[: self.target.free_rank]
            ):
                raise MalformedMorphism(
                    f"generator {r + i} has order {n} but its image does not"
                )

    @classmethod
    def identity(cls, g: FgAbGroup) -> "GroupMorphism":
        k = g.ngens
        return cls(g, g, tuple(tuple(int(i == j) for j in range(k)) for i in range(k)))

    @classmethod
    def to_trivial(cls, g: FgAbGroup) -> "GroupMorphism":
        return cls(g, TRIVIAL, ())

    def __call__(self, g: Element) -> Element:
        g = self.source.reduce(g)
        return self.target.reduce(_matvec(self.matrix, g))

    def compose(self, other: "GroupMorphism") -> "GroupMorphism":
        """``self o other``."""
        if other.target != self.source:
            raise ValueError("morphisms are not composable")
        cols = [self(other(e)) for e in _unit_vectors(other.source.ngens)]
        return GroupMorphism(other.source, self.target, tuple(_transpose(cols, self.target.ngens)))

    @cached_property
    def _solver(self):
        # integer system  M g + R_H y = h  solved through SNF
        big = [list(row) + list(rel) for row, rel in zip(self.matrix, self.target.relation_matrix())]
        if not big:
            return None
        return smith_normal_form(big)

    def preimage(self, h: Element):
        """One ``g`` with ``phi(g) = h``, or ``None`` if ``h`` is not in the image."""
        h = self.target.reduce(h)
        n_src = self.source.ngens
        if self.target.ngens == 0:
            return self.source.zero
        U, D, V = self._solver
        rhs = _matvec(U, h)
        ncols = len(D[0])
        y = [0] * ncols
        for i, val in enumerate(rhs):
            d = D[i][i] if i < ncols else 0
            if d == 0:
                if val != 0:
                    return None
            else:
                if val % d:
                    return None
                y[i] = val // d
        x = _matvec(V, y)
        g = self.source.reduce(x[:n_src])
        assert self(g) == h
        return g

    @property
    def is_injective(self) -> bool:
        return kernel(self)[0] == TRIVIAL

    def kernel_is_finite(self) -> bool:
        return kernel(self)[0].is_finite


def _unit_vectors(k):
    return [tuple(int(i == j) for j in range(k)) for i in range(k)]


# --------------------------------------------------------------------------
# Smith normal form

def smith_normal_form(m: Sequence[Sequence[int]]):
    """Return ``(U, D, V)`` with ``U m V = D`` diagonal, ``d1 | d2 | ...``.

    Pivot choice: smallest nonzero absolute value, ties by lowest row then
    lowest column.  All arithmetic is on python ints.
    """
    D = [list(map(int, row)) for row in m]
    rows = len(D)
    cols = len(D[0]) if rows else 0
    U = [[int(i == j) for j in range(rows)] for i in range(rows)]
    V = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        if q:
            D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
            U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        if q:
            for row in D:
                row[dst] += q * row[src]
            for row in V:
                row[dst] += q * row[src]

    for k in range(min(rows, cols)):
        while True:
            best = None
            for i in range(k, rows):
                for j in range(k, cols):
                    v = abs(D[i][j])
                    if v and (best is None or v < best[0]):
                        best = (v, i, j)
            if best is None:
                return U, D, V
            _, i, j = best
            swap_rows(k, i)
            swap_cols(k, j)
            piv = D[k][k]
            done = True
            for i in range(k + 1, rows):
                q = D[i][k] // piv
                add_row(i, k, -q)
                if D[i][k]:
                    done = False
            for j in range(k + 1, cols):
                q = D[k][j] // piv
                add_col(j, k, -q)
                if D[k][j]:
                    done = False
            if not done:
                continue
            # divisibility: fold an offending row into row k and retry
            bad = next(
                (i for i in range(k + 1, rows) for j in range(k + 1, cols) if D[i][j] % piv),
                None,
            )
            if bad is None:
                break
            add_row(k, bad, 1)
        if D[k][k] < 0:
            D[k] = [-a for a in D[k]]
            U[k] = [-a for a in U[k]]
    return U, D, V


def snf_diagonal(D) -> list[int]:
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def _integer_nullspace(m: list[list[int]], ncols: int) -> list[list[int]]:
    """Basis (as list of column vectors) of ``{x in Z^ncols : m x = 0}``."""
    if not m:
        return [list(v) for v in _unit_vectors(ncols)]
    U, D, V = smith_normal_form(m)
    r = sum(1 for d in snf_diagonal(D) if d)
    return [[V[i][j] for i in range(ncols)] for j in range(r, ncols)]


def _canonical_quotient(gens: list[list[int]], rels: list[list[int]], ngens: int):
    """Canonical form of ``Z^ngens / span(rels)``.

    ``gens[j]`` is the ambient image of the j-th standard generator.  Returns
    ``(free, torsion)``: ambient images of the free canonical generators and
    ``(order, image)`` pairs for the torsion ones, in invariant-factor order.
    """
    if rels:
        U, D, _ = smith_normal_form(_transpose(rels, ngens))
        diag = snf_diagonal(D)
    else:
        U = [[int(i == j) for j in range(ngens)] for i in range(ngens)]
        diag = []
    Uinv = _unimodular_inverse(U)
    width = len(gens[0])
    free, tors = [], []
    for i in range(ngens):
        d = abs(diag[i]) if i < len(diag) else 0
        coeffs = [Uinv[r][i] for r in range(ngens)]
        image = [sum(c * g[a] for c, g in zip(coeffs, gens)) for a in range(width)]
        if d == 0:
            free.append(image)
        elif d > 1:
            tors.append((d, image))
    return free, tors


def _unimodular_inverse(U):
    n = len(U)
    # SNF of a unimodular matrix gives U' U V' = I, so U^-1 = V' U'
    if n == 0:
        return []
    A, D, B = smith_normal_form(U)
    assert all(abs(D[i][i]) == 1 for i in range(n))
    # A U B = D (diagonal signs)  =>  U^-1 = B D A
    return [[sum(B[i][k] * D[k][k] * A[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def kernel(phi: GroupMorphism) -> tuple[FgAbGroup, GroupMorphism]:
    """``L = ker phi`` in canonical form together with its embedding into the source."""
    src, tgt = phi.source, phi.target
    a = src.ngens
    if a == 0:
        return TRIVIAL, GroupMorphism(TRIVIAL, src, tuple(() for _ in range(0)))
    # g in Z^a with M g in span(R_H):  nullspace of [M | -R_H], projected
    RH = tgt.relation_matrix()
    b = len(RH[0]) if RH and RH[0] else 0
    big = [list(row) + [-x for x in rel] for row, rel in zip(phi.matrix, RH)] if tgt.ngens else []
    null = _integer_nullspace(big, a + b)
    S = [v[:a] for v in null]  # generating set of K in Z^a
    # relations on S: x with S x in span(R_G)
    RG = src.relation_matrix()
    rg_cols = _transpose(RG, len(RG[0])) if RG and RG[0] else []
    t = len(S)
    if t == 0:
        return TRIVIAL, GroupMorphism(TRIVIAL, src, tuple(() for _ in range(a)))
    system = [[S[j][i] for j in range(t)] + [-c[i] for c in rg_cols] for i in range(a)]
    rel_null = _integer_nullspace(system, t + len(rg_cols))
    rels = [v[:t] for v in rel_null if any(v[:t])]
    free, tors = _canonical_quotient(S, rels, t)
    free = [_normalize_sign(v) for v in free]
    L = FgAbGroup(len(free), tuple(d for d, _ in tors))
    cols = [src.reduce(v) for v in free] + [_smallest_generator(src, d, img) for d, img in tors]
    emb = GroupMorphism(L, src, tuple(_transpose(cols, a)))
    return L, emb


def _smallest_generator(G: FgAbGroup, order: int, g) -> tuple:
    # the same cyclic subgroup has generators u*g with gcd(u, order) = 1
    from math import gcd

    cands = [G.reduce(u * x for x in g) for u in range(1, order) if gcd(u, order) == 1]
    return min(cands, key=lambda e: (tuple(abs(x) for x in e), e))


def _normalize_sign(v):
    for x in v:
        if x:
            return v if x > 0 else [-y for y in v]
    return v


# --------------------------------------------------------------------------
# supports and fibers

@dataclass(frozen=True)
class FiniteSupport:
    group: FgAbGroup
    elements: frozenset

    def __init__(self, group: FgAbGroup, elements: Iterable):
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "elements", frozenset(group.reduce(e) for e in elements))


@dataclass(frozen=True)
class CosetSupport:
    """The coset ``base + <generators>``."""

    group: FgAbGroup
    base: tuple
    generators: tuple

    def __init__(self, group: FgAbGroup, base, generators=()):
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "base", group.reduce(base))
        object.__setattr__(self, "generators", tuple(group.reduce(g) for g in generators))


def fiber(phi: GroupMorphism, h, window: FiniteSupport) -> set:
    if not phi.target.contains(h):
        raise ValueError(f"{h} is not an element of {phi.target}")
    if not isinstance(window, FiniteSupport):
        raise TypeError("fiber needs a finite window")
    h = tuple(h)
    return {g for g in window.elements if phi(g) == h}


def is_phi_finite(support, phi: GroupMorphism) -> bool:
    """Every fiber of ``phi`` meets the support in a finite set."""
    if isinstance(support, FiniteSupport):
        return True
    gens = support.generators
    if not gens:
        return True
    G = support.group
    # S = <gens>;  S meets a fiber in a coset of S n L, finite iff it has no free part
    free_src = FgAbGroup(len(gens))
    incl = GroupMorphism(free_src, G, tuple(_transpose([list(g) for g in gens], G.ngens)))
    _, emb = kernel(phi.compose(incl))
    r = G.free_rank
    for e in _unit_vectors(emb.source.ngens):
        img = incl(emb(e))
        if any(img[:r]):
            return False
    return True


# --------------------------------------------------------------------------
# homological constant of the kernel

@dataclass(frozen=True)
class DimValue:
    """A homological dimension: finite, beyond a cutoff, infinite, or -inf."""

    kind: str  # "finite" | "exceeds" | "infinite" | "neginf"
    value: int = 0

    @classmethod
    def finite(cls, n: int) -> "DimValue":
        return cls("finite", int(n))

    @classmethod
    def exceeds(cls, cutoff: int) -> "DimValue":
        return cls("exceeds", int(cutoff))

    @classmethod
    def infinite(cls) -> "DimValue":
        return cls("infinite")

    @classmethod
    def neginf(cls) -> "DimValue":
        return cls("neginf")

    @property
    def is_finite(self) -> bool:
        return self.kind in ("finite", "neginf")

    def __str__(self):
        return {
            "finite": str(self.value),
            "exceeds": f">{self.value}",
            "infinite": "inf",
            "neginf": "-inf",
        }[self.kind]

    def to_json(self):
        if self.kind == "finite":
            return self.value
        return {"exceeds": ">cutoff", "infinite": "inf", "neginf": "-inf"}[self.kind]

    def __eq__(self, other):
        if isinstance(other, int):
            return self.kind == "finite" and self.value == other
        if isinstance(other, DimValue):
            return (self.kind, self.value) == (other.kind, other.value)
        return NotImplemented

    def __hash__(self):
        return hash((self.kind, self.value))


def pd_trivial_module(L: FgAbGroup, k: Field) -> DimValue:
    """Projective dimension of the trivial ``k[L]``-module."""
    if any(n % k.p == 0 for n in L.torsion):
        return DimValue.infinite()
    return DimValue.finite(L.free_rank)


@dataclass
class KoszulTemplate:
    """Koszul resolution of ``k`` over ``k[Z^r]`` in symbolic form.

    ``ranks[i] = C(r, i)``; ``differentials[i]`` maps position ``i+1`` to
    ``i`` and is a dict ``(row, col) -> {element: coefficient}`` over the group
    algebra (entries ``+-(t_j - 1)``).
    """

    group: FgAbGroup
    ranks: list
    differentials: list
    truncated: bool = False


@dataclass
class FiniteGroupResolution:
    """Projective resolution of the trivial module over ``k[L]`` for finite ``L``.

    ``terms[0]`` maps onto the trivial module via ``augmentation``;
    ``differentials[i]`` maps ``terms[i+1] -> terms[i]``.  The final term is
    free unless ``last_projective`` is set, in which case ``splitting`` holds a
    pair ``(section, projection)`` exhibiting it as a summand of a free
    module.
    """

    group: FgAbGroup
    field: Field
    algebra: object
    trivial: object
    terms: list
    differentials: list
    augmentation: object
    ranks: list
    truncated: bool
    last_projective: bool = False
    splitting: tuple | None = None

    @property
    def length(self) -> int:
        return len(self.terms) - 1


def _koszul(L: FgAbGroup, depth: int) -> KoszulTemplate:
    r = L.free_rank
    subsets = [list(itertools.combinations(range(r), i)) for i in range(r + 1)]
    diffs = []
    for i in range(1, min(r, depth) + 1):
        rows = {s: n for n, s in enumerate(subsets[i - 1])}
        entries = {}
        for col, s in enumerate(subsets[i]):
            for pos, j in enumerate(s):
                face = s[:pos] + s[pos + 1 :]
                sign = -1 if pos % 2 else 1
                tj = tuple(int(t == j) for t in range(r))
                entries[(rows[face], col)] = {tj: sign, L.zero: -sign}
        diffs.append(entries)
    ranks = [comb(r, i) for i in range(min(r, depth) + 1)]
    return KoszulTemplate(L, ranks, diffs, truncated=depth < r)


def trivial_module_resolution(L: FgAbGroup, k: Field, depth: int):
    """Resolution of the trivial ``k[L]``-module.

    Torsion-free ``L`` gives the symbolic Koszul template; finite ``L`` gives a
    resolution by syzygies over the group algebra, stopping early once a
    syzygy is projective.
    """
    if L.free_rank and L.torsion:
        raise ValueError(f"mixed groups such as {L} are not supported")
    if L.free_rank:
        return _koszul(L, depth)
    from .graded import group_algebra, trivial_module
    from .homalg import greedy_generators, free_cover, find_splitting

    A = group_algebra(L, k)
    triv = trivial_module(A)
    terms, diffs, ranks = [], [], []
    current, incl = triv, None
    augmentation = None
    last_projective, splitting = False, None
    truncated = True
    for step in range(depth + 1):
        if current.dim == 0:
            truncated = False
            break
        split = find_splitting(current)
        if split is not None:
            # projective syzygy: it is the last term
            terms.append(current)
            ranks.append(None)
            if incl is None:
                augmentation = _identity(current)
            else:
                diffs.append(incl)
            last_projective = True
            splitting = split
            truncated = False
            break
        gens = greedy_generators(current)
        F, pi, omega, K = free_cover(current, gens)
        terms.append(F)
        ranks.append(len(gens))
        if incl is None:
            augmentation = pi
        else:
            diffs.append(incl @ pi % k.p)
        current, incl = omega, K
    return FiniteGroupResolution(
        L, k, A, triv, terms, diffs, augmentation, ranks, truncated, last_projective, splitting
    )


def _identity(M):
    import numpy as np

    return np.eye(M.dim, dtype=np.int64)
