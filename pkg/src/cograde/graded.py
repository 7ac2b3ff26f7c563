"""Finite-dimensional graded spaces, algebras, modules and maps.

Degrees are elements of a finitely generated abelian group written
additively.  An algebra stores structure constants ``mult[i, j, k]`` (the
coefficient of ``b_k`` in ``b_i b_j``); a module stores one action matrix per
algebra basis vector, ``act[i] @ m`` being ``b_i . m`` for a column vector
``m``.  Shifts follow ``M[g]_h = M_{h+g}``: a basis vector of degree ``d``
sits in degree ``d - g`` of ``M[g]``.

Objects are validated when constructed (pass ``check=False`` to build a
possibly invalid object, e.g. to inspect it with :func:`validate`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import linalg as la
from .abgroups import TRIVIAL, FgAbGroup
from .linalg import Field

__all__ = [
    "GradedSpace",
    "GradedAlgebra",
    "GradedModule",
    "GradedMap",
    "Violation",
    "ValidationError",
    "validate",
    "shift",
    "tensor",
    "graded_dual",
    "opposite",
    "enveloping",
    "SmashProduct",
    "smash_product",
    "regular_module",
    "free_module",
    "direct_sum",
    "submodule",
    "quotient",
    "field_algebra",
    "group_algebra",
    "trivial_module",
    "dual_regular",
    "bimodule",
    "regular_bimodule",
    "dual_bimodule",
    "make_algebra",
    "make_module",
    "homogeneous_kernel",
    "homogeneous_image",
]


class ValidationError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations[:5]))


@dataclass(frozen=True)
class Violation:
    kind: str  # unit | grading | associativity | action | linearity | degree | shape
    witness: tuple
    message: str

    def __str__(self):
        return f"{self.kind} violation at {self.witness}: {self.message}"


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


def _components(group: FgAbGroup, degrees) -> dict:
    comp: dict = {}
    for i, d in enumerate(degrees):
        comp.setdefault(d, []).append(i)
    return {d: np.asarray(ix, dtype=np.int64) for d, ix in comp.items()}


@dataclass(frozen=True, eq=False)
class GradedSpace:
    field: Field
    group: FgAbGroup
    labels: tuple
    degrees: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "degrees", tuple(self.group.reduce(d) for d in self.degrees))
        if len(self.labels) != len(self.degrees):
            raise ValueError("labels and degrees differ in length")

    @property
    def dim(self) -> int:
        return len(self.degrees)

    @property
    def support(self) -> frozenset:
        return frozenset(self.degrees)

    def dims_by_degree(self) -> dict:
        out: dict = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return out

    def __eq__(self, other):
        return (
            isinstance(other, GradedSpace)
            and (self.field, self.group, self.labels, self.degrees)
            == (other.field, other.group, other.labels, other.degrees)
        )

    def __hash__(self):
        return hash((self.field, self.group, self.labels, self.degrees))


@dataclass(frozen=True, eq=False)
class GradedAlgebra:
    field: Field
    group: FgAbGroup
    labels: tuple
    degrees: tuple
    unit: int
    mult: np.ndarray
    name: str = ""
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "degrees", tuple(self.group.reduce(d) for d in self.degrees))
        object.__setattr__(self, "mult", _freeze(np.mod(self.mult, self.field.p)))
        if self.check:
            bad = validate(self)
            if bad:
                raise ValidationError(bad)

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def dim(self) -> int:
        return len(self.degrees)

    @property
    def space(self) -> GradedSpace:
        return GradedSpace(self.field, self.group, self.labels, self.degrees)

    @cached_property
    def key(self):
        return (self.field, self.group, self.labels, self.degrees, self.unit, self.mult.tobytes())

    def __eq__(self, other):
        return self is other or (isinstance(other, GradedAlgebra) and self.key == other.key)

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"GradedAlgebra({self.name or '?'}, dim={self.dim}, {self.field}, {self.group})"

    @cached_property
    def left(self) -> np.ndarray:
        """``left[t]`` is the matrix of ``x -> b_t x``."""
        return _freeze(self.mult.transpose(0, 2, 1))

    @cached_property
    def right(self) -> np.ndarray:
        """``right[t]`` is the matrix of ``x -> x b_t``."""
        return _freeze(self.mult.transpose(1, 2, 0))

    @cached_property
    def components(self) -> dict:
        return _components(self.group, self.degrees)

    @cached_property
    def generators(self) -> tuple:
        """Basis indices generating the algebra (greedy, unit excluded)."""
        p = self.p
        n = self.dim
        chosen: list = []
        span = np.zeros((n, 0), dtype=np.int64)
        span_rank = 0

        def closure(idx):
            # subalgebra generated by the unit and the chosen basis vectors
            vecs = [np.eye(n, dtype=np.int64)[:, self.unit]]
            vecs += [np.eye(n, dtype=np.int64)[:, i] for i in idx]
            basis = la.column_space(np.column_stack(vecs), p)
            while True:
                prods = [
                    la.matmul(self.left[i], basis, p) for i in idx
                ]
                new = la.column_space(np.column_stack([basis] + prods), p)
                if new.shape[1] == basis.shape[1]:
                    return basis
                basis = new

        for i in range(n):
            if i == self.unit:
                continue
            if span_rank and la.in_span(span, np.eye(n, dtype=np.int64)[:, i], p):
                continue
            chosen.append(i)
            span = closure(chosen)
            span_rank = span.shape[1]
            if span_rank == n:
                break
        return tuple(chosen)

    def element_matrix(self, coeffs, act: np.ndarray) -> np.ndarray:
        """Matrix of the algebra element ``sum coeffs[t] b_t`` under ``act``."""
        coeffs = np.asarray(coeffs, dtype=np.int64) % self.p
        nz = np.flatnonzero(coeffs)
        out = np.zeros(act.shape[1:], dtype=np.int64)
        for t in nz:
            out = (out + coeffs[t] * act[t]) % self.p
        return out


@dataclass(frozen=True, eq=False)
class GradedModule:
    algebra: GradedAlgebra
    degrees: tuple
    act: np.ndarray
    labels: tuple = ()
    name: str = ""
    free_gens: tuple | None = None  # generator degrees when built by free_module
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        G = self.algebra.group
        degs = tuple(G.reduce(d) for d in self.degrees)
        object.__setattr__(self, "degrees", degs)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"m{i}" for i in range(len(degs))))
        object.__setattr__(self, "labels", tuple(self.labels))
        act = np.asarray(self.act, dtype=np.int64)
        if act.size == 0:
            act = np.zeros((self.algebra.dim, len(degs), len(degs)), dtype=np.int64)
        object.__setattr__(self, "act", _freeze(np.mod(act, self.algebra.p)))
        if self.check:
            bad = validate(self)
            if bad:
                raise ValidationError(bad)

    @property
    def field(self) -> Field:
        return self.algebra.field

    @property
    def group(self) -> FgAbGroup:
        return self.algebra.group

    @property
    def p(self) -> int:
        return self.algebra.p

    @property
    def dim(self) -> int:
        return len(self.degrees)

    @property
    def support(self) -> frozenset:
        return frozenset(self.degrees)

    @property
    def space(self) -> GradedSpace:
        return GradedSpace(self.field, self.group, self.labels, self.degrees)

    @cached_property
    def components(self) -> dict:
        return _components(self.group, self.degrees)

    def dims_by_degree(self) -> dict:
        return {d: len(ix) for d, ix in self.components.items()}

    @cached_property
    def key(self):
        return (self.algebra.key, self.degrees, self.act.tobytes())

    def same_as(self, other: "GradedModule") -> bool:
        """Equal data (same algebra, same basis degrees, same action)."""
        return self.key == other.key

    def __repr__(self):
        return f"GradedModule({self.name or '?'}, dim={self.dim}, over {self.algebra.name or '?'})"

    def identity(self) -> "GradedMap":
        return GradedMap(self, self, np.eye(self.dim, dtype=np.int64))

    def zero_map(self, target: "GradedModule") -> "GradedMap":
        return GradedMap(self, target, np.zeros((target.dim, self.dim), dtype=np.int64))

    def with_algebra(self, algebra: GradedAlgebra, degrees=None, **kw) -> "GradedModule":
        return GradedModule(
            algebra,
            self.degrees if degrees is None else degrees,
            self.act,
            self.labels,
            kw.get("name", self.name),
            kw.get("free_gens", self.free_gens),
            check=kw.get("check", True),
        )


@dataclass(frozen=True, eq=False)
class GradedMap:
    source: GradedModule
    target: GradedModule
    matrix: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.int64).reshape(self.target.dim, self.source.dim)
        object.__setattr__(self, "matrix", _freeze(np.mod(m, self.source.p)))
        if self.check:
            bad = validate(self)
            if bad:
                raise ValidationError(bad)

    def __matmul__(self, other: "GradedMap") -> "GradedMap":
        return GradedMap(other.source, self.target, la.matmul(self.matrix, other.matrix, self.source.p))

    def is_iso(self) -> bool:
        n = self.source.dim
        return n == self.target.dim and la.rank(self.matrix, self.source.p) == n


# ---------------------------------------------------------------------------
# validation

def validate(x) -> list[Violation]:
    """Empty list when every axiom holds, otherwise one violation per failure."""
    if isinstance(x, GradedAlgebra):
        return _validate_algebra(x)
    if isinstance(x, GradedModule):
        return _validate_module(x)
    if isinstance(x, GradedMap):
        return _validate_map(x)
    raise TypeError(f"cannot validate {type(x).__name__}")


def _validate_algebra(A: GradedAlgebra) -> list[Violation]:
    n, p, G = A.dim, A.p, A.group
    out = []
    if A.mult.shape != (n, n, n):
        return [Violation("shape", (), f"structure constants have shape {A.mult.shape}")]
    if not 0 <= A.unit < n:
        return [Violation("unit", (A.unit,), "unit index out of range")]
    u = A.unit
    if A.degrees[u] != G.zero:
        out.append(Violation("unit", (u,), f"unit has degree {A.degrees[u]}"))
    eye = np.eye(n, dtype=np.int64)
    for side, block in (("left", A.mult[u]), ("right", A.mult[:, u, :])):
        bad = np.argwhere(block != eye)
        if bad.size:
            j = int(bad[0][0])
            out.append(Violation("unit", (u, j), f"unit is not a {side} identity on {A.labels[j]}"))
    for i, j, k in np.argwhere(A.mult != 0):
        want = G.add(A.degrees[i], A.degrees[j])
        if A.degrees[k] != want:
            out.append(
                Violation(
                    "grading",
                    (A.labels[i], A.labels[j], A.labels[k]),
                    f"{A.labels[i]}*{A.labels[j]} has a {A.labels[k]} term of degree "
                    f"{A.degrees[k]}, expected {want}",
                )
            )
    flat = A.mult.reshape(n * n, n)
    lhs = la.matmul(flat, A.mult.reshape(n, n * n), p).reshape(n, n, n, n)
    # rhs[i,j,k,l] = sum_m mult[j,k,m] mult[i,m,l]
    B = A.mult.transpose(0, 2, 1).reshape(n * n, n)  # [i*n+l, m]
    rhs = la.matmul(flat, B.T, p).reshape(n, n, n, n).transpose(2, 0, 1, 3)
    bad = np.argwhere(lhs != rhs)
    if bad.size:
        i, j, k, _ = (int(t) for t in bad[0])
        out.append(
            Violation(
                "associativity",
                (A.labels[i], A.labels[j], A.labels[k]),
                "(b_i b_j) b_k != b_i (b_j b_k)",
            )
        )
    return out


def _validate_module(M: GradedModule) -> list[Violation]:
    A = M.algebra
    n, d, p, G = A.dim, M.dim, A.p, A.group
    out = []
    if M.act.shape != (n, d, d):
        return [Violation("shape", (), f"action has shape {M.act.shape}, expected {(n, d, d)}")]
    if d == 0:
        return out
    if np.any(M.act[A.unit] != np.eye(d, dtype=np.int64)):
        out.append(Violation("unit", (A.labels[A.unit],), "unit does not act as the identity"))
    for t, r, c in np.argwhere(M.act != 0):
        want = G.add(A.degrees[t], M.degrees[c])
        if M.degrees[r] != want:
            out.append(
                Violation(
                    "degree",
                    (A.labels[t], M.labels[c], M.labels[r]),
                    f"{A.labels[t]} sends degree {M.degrees[c]} to {M.degrees[r]}, expected {want}",
                )
            )
            break
    lhs = la.matmul(M.act[:, None], M.act[None, :], p)
    rhs = la.matmul(A.mult.reshape(n * n, n), M.act.reshape(n, d * d), p).reshape(n, n, d, d)
    bad = np.argwhere(np.any(lhs != rhs, axis=(2, 3)))
    if bad.size:
        i, j = (int(t) for t in bad[0])
        out.append(
            Violation("action", (A.labels[i], A.labels[j]), "act(b_i) act(b_j) != act(b_i b_j)")
        )
    return out


def _validate_map(f: GradedMap) -> list[Violation]:
    S, T = f.source, f.target
    out = []
    if S.algebra != T.algebra:
        return [Violation("shape", (), "source and target are over different algebras")]
    for r, c in np.argwhere(f.matrix != 0):
        if T.degrees[r] != S.degrees[c]:
            out.append(
                Violation(
                    "degree",
                    (S.labels[c], T.labels[r]),
                    f"maps degree {S.degrees[c]} into degree {T.degrees[r]}",
                )
            )
            break
    p = S.p
    lhs = la.matmul(f.matrix, S.act, p)
    rhs = la.matmul(T.act, f.matrix, p)
    bad = np.argwhere(np.any(lhs != rhs, axis=(1, 2)))
    if bad.size:
        t = int(bad[0][0])
        out.append(Violation("linearity", (S.algebra.labels[t],), "map does not commute with the action"))
    return out


# ---------------------------------------------------------------------------
# basic constructions

def shift(M: GradedModule, g) -> GradedModule:
    """``M[g]``: same action, every basis degree ``d`` becomes ``d - g``."""
    G = M.group
    if not G.contains(g):
        raise ValueError(f"{g} is not an element of {G}")
    g = tuple(g)
    degs = tuple(G.sub(d, g) for d in M.degrees)
    gens = None if M.free_gens is None else tuple(G.sub(d, g) for d in M.free_gens)
    name = f"{M.name}[{_fmt(g)}]" if M.name else ""
    return GradedModule(M.algebra, degs, M.act, M.labels, name, gens, check=False)


def _fmt(g) -> str:
    return "(" + ",".join(str(x) for x in g) + ")"


def tensor(V: GradedSpace, W: GradedSpace) -> GradedSpace:
    if V.field != W.field or V.group != W.group:
        raise ValueError("tensor factors must share field and grading group")
    G = V.group
    labels, degs = [], []
    for lv, dv in zip(V.labels, V.degrees):
        for lw, dw in zip(W.labels, W.degrees):
            labels.append(f"{lv}⊗{lw}")
            degs.append(G.add(dv, dw))
    return GradedSpace(V.field, G, tuple(labels), tuple(degs))


def opposite(A: GradedAlgebra) -> GradedAlgebra:
    mult = A.mult.transpose(1, 0, 2)
    if np.array_equal(mult, A.mult):
        return A
    return GradedAlgebra(A.field, A.group, A.labels, A.degrees, A.unit, mult, name=f"{A.name}^op")


def enveloping(A: GradedAlgebra) -> GradedAlgebra:
    """``A (x) A^op`` with basis ``(i, j)`` at index ``i * n + j``."""
    cached = _ENV_CACHE.get(A.key)
    if cached is not None:
        return cached
    n, p, G = A.dim, A.p, A.group
    # (a (x) b)(a' (x) b') = a a' (x) b' b
    M = np.einsum("ikx,ljy->ijklxy", A.mult, A.mult) % p
    M = M.reshape(n * n, n * n, n * n)
    labels = tuple(f"{a}⊗{b}" for a in A.labels for b in A.labels)
    degs = tuple(G.add(a, b) for a in A.degrees for b in A.degrees)
    E = GradedAlgebra(
        A.field, G, labels, degs, A.unit * n + A.unit, M, name=f"{A.name}^e", check=False
    )
    E.__dict__["base"] = A
    _ENV_CACHE[A.key] = E
    return E


_ENV_CACHE: dict = {}


def field_algebra(k: Field, group: FgAbGroup = TRIVIAL) -> GradedAlgebra:
    """The ground field as a one-dimensional algebra concentrated in degree 0."""
    return GradedAlgebra(k, group, ("1",), (group.zero,), 0, np.ones((1, 1, 1), dtype=np.int64), name=str(k))


def regular_module(A: GradedAlgebra) -> GradedModule:
    return GradedModule(A, A.degrees, A.left, A.labels, A.name, (A.group.zero,), check=False)


def free_module(A: GradedAlgebra, gen_degrees: Sequence) -> GradedModule:
    """``F = (+)_j A[-g_j]``; basis ``(j, t)`` at index ``j * dim A + t``."""
    G = A.group
    gen_degrees = tuple(G.reduce(g) for g in gen_degrees)
    k, n = len(gen_degrees), A.dim
    act = np.zeros((n, k * n, k * n), dtype=np.int64)
    for j in range(k):
        act[:, j * n : (j + 1) * n, j * n : (j + 1) * n] = A.left
    degs = tuple(G.add(dt, g) for g in gen_degrees for dt in A.degrees)
    labels = tuple(f"e{j}.{lab}" for j in range(k) for lab in A.labels)
    return GradedModule(A, degs, act, labels, f"free{k}", gen_degrees, check=False)


def direct_sum(*mods: GradedModule) -> GradedModule:
    if not mods:
        raise ValueError("direct_sum needs at least one summand")
    A = mods[0].algebra
    if any(M.algebra != A for M in mods):
        raise ValueError("summands over different algebras")
    d = sum(M.dim for M in mods)
    act = np.zeros((A.dim, d, d), dtype=np.int64)
    pos = 0
    degs, labels = [], []
    for s, M in enumerate(mods):
        act[:, pos : pos + M.dim, pos : pos + M.dim] = M.act
        degs.extend(M.degrees)
        labels.extend(f"{lab}.{s}" for lab in M.labels)
        pos += M.dim
    gens = None
    if all(M.free_gens is not None for M in mods):
        gens = tuple(g for M in mods for g in M.free_gens)
    name = " ⊕ ".join(M.name or "?" for M in mods)
    return GradedModule(A, tuple(degs), act, tuple(labels), name, gens, check=False)


def homogeneous_kernel(f: np.ndarray, src_degrees, tgt_degrees, p: int) -> tuple[np.ndarray, tuple]:
    """Kernel of a degree-preserving matrix, as homogeneous columns + their degrees."""
    src_comp: dict = {}
    for i, d in enumerate(src_degrees):
        src_comp.setdefault(d, []).append(i)
    tgt_comp: dict = {}
    for i, d in enumerate(tgt_degrees):
        tgt_comp.setdefault(d, []).append(i)
    cols, degs = [], []
    n = len(src_degrees)
    for d, ix in src_comp.items():
        rows = tgt_comp.get(d, [])
        block = f[np.ix_(rows, ix)] if rows else np.zeros((0, len(ix)), dtype=np.int64)
        kb = la.kernel_basis(block, p)
        for v in kb:
            col = np.zeros(n, dtype=np.int64)
            col[ix] = v
            cols.append(col)
            degs.append(d)
    K = np.column_stack(cols) if cols else np.zeros((n, 0), dtype=np.int64)
    return K, tuple(degs)


def homogeneous_image(f: np.ndarray, src_degrees, tgt_degrees, p: int) -> tuple[np.ndarray, tuple]:
    """Column-space basis of a degree-preserving matrix, homogeneous, with degrees."""
    src_comp: dict = {}
    for i, d in enumerate(src_degrees):
        src_comp.setdefault(d, []).append(i)
    tgt_comp: dict = {}
    for i, d in enumerate(tgt_degrees):
        tgt_comp.setdefault(d, []).append(i)
    cols, degs = [], []
    m = len(tgt_degrees)
    for d, rows in tgt_comp.items():
        ix = src_comp.get(d, [])
        if not ix:
            continue
        block = la.column_space(f[np.ix_(rows, ix)], p)
        for v in block.T:
            col = np.zeros(m, dtype=np.int64)
            col[rows] = v
            cols.append(col)
            degs.append(d)
    K = np.column_stack(cols) if cols else np.zeros((m, 0), dtype=np.int64)
    return K, tuple(degs)


def submodule(M: GradedModule, K: np.ndarray, degrees=None, name: str = "") -> GradedModule:
    """The submodule spanned by the homogeneous, independent columns of ``K``.

    The caller guarantees invariance under the action; the returned module's
    basis is the columns of ``K`` (so ``K`` is the inclusion matrix).
    """
    p = M.p
    if degrees is None:
        degrees = tuple(_column_degree(M, K[:, j]) for j in range(K.shape[1]))
    k = K.shape[1]
    if k == 0:
        return GradedModule(M.algebra, (), np.zeros((M.algebra.dim, 0, 0)), (), name, check=False)
    Linv = la.left_inverse(K, p)
    act = la.matmul(Linv, la.matmul(M.act, K, p), p)
    return GradedModule(M.algebra, tuple(degrees), act, tuple(f"k{j}" for j in range(k)), name, check=False)


def _column_degree(M: GradedModule, v: np.ndarray):
    nz = np.flatnonzero(v % M.p)
    if nz.size == 0:
        raise ValueError("zero column has no degree")
    degs = {M.degrees[i] for i in nz}
    if len(degs) != 1:
        raise ValueError("column is not homogeneous")
    return degs.pop()


def quotient(M: GradedModule, K: np.ndarray, name: str = "") -> tuple[GradedModule, np.ndarray, np.ndarray]:
    """``M / span(K)`` for an invariant homogeneous subspace.

    Returns ``(Q, proj, section)``: ``proj`` is the ``dim Q x dim M`` quotient
    map, ``section`` a homogeneous linear (not module) splitting of it.
    """
    p = M.p
    cols, degs = [], []
    for d, ix in M.components.items():
        # part of K in degree d
        sub = K[ix][:, np.any(K[ix] % p, axis=0)] if K.shape[1] else np.zeros((len(ix), 0), dtype=np.int64)
        sub = la.column_space(sub, p) if sub.shape[1] else sub
        r = sub.shape[1]
        # extend by standard vectors
        basis = sub
        for t in range(len(ix)):
            if basis.shape[1] == len(ix):
                break
            e = np.zeros(len(ix), dtype=np.int64)
            e[t] = 1
            if not la.in_span(basis, e, p):
                basis = np.column_stack([basis, e])
                col = np.zeros(M.dim, dtype=np.int64)
                col[ix] = e
                cols.append(col)
                degs.append(d)
        del r
    C = np.column_stack(cols) if cols else np.zeros((M.dim, 0), dtype=np.int64)
    full = np.column_stack([K, C]) if K.shape[1] else C
    # coordinates in [K | C]: proj = last block of inverse
    if full.shape[1] != M.dim:
        raise ValueError("columns of K are dependent or not homogeneous")
    inv = la.inverse(full, p) if M.dim else np.zeros((0, 0), dtype=np.int64)
    proj = inv[K.shape[1] :]
    act = la.matmul(proj, la.matmul(M.act, C, p), p)
    Q = GradedModule(M.algebra, tuple(degs), act, tuple(f"q{j}" for j in range(len(degs))), name, check=False)
    return Q, proj, C


# ---------------------------------------------------------------------------
# duals, opposite algebras, bimodules

def graded_dual(M: GradedModule) -> GradedModule:
    """``D(M)`` over the opposite algebra: ``D(M)_g = (M_{-g})^*``."""
    G = M.group
    Aop = opposite(M.algebra)
    degs = tuple(G.neg(d) for d in M.degrees)
    act = M.act.transpose(0, 2, 1)
    labels = tuple(f"{lab}_d" for lab in M.labels)
    name = f"D({M.name})" if M.name else ""
    return GradedModule(Aop, degs, act, labels, name, check=False)


def dual_regular(A: GradedAlgebra) -> GradedModule:
    """``D(A)`` as a left ``A``-module, ``(a.f)(x) = f(x a)``."""
    G = A.group
    degs = tuple(G.neg(d) for d in A.degrees)
    act = A.right.transpose(0, 2, 1)
    labels = tuple(f"{lab}_d" for lab in A.labels)
    return GradedModule(A, degs, act, labels, f"D({A.name})", check=False)


def bimodule(A: GradedAlgebra, degrees, left: np.ndarray, right: np.ndarray, labels=(), name="", check=True) -> GradedModule:
    """Module over ``A^e`` from left actions ``left[i]`` and right actions ``right[j]``.

    ``right[j] @ m`` is ``m . b_j``; ``(a (x) b) . m = a m b``.
    """
    E = enveloping(A)
    n = A.dim
    p = A.p
    d = len(degrees)
    left = np.asarray(left, dtype=np.int64) % p
    right = np.asarray(right, dtype=np.int64) % p
    if check:
        if np.any(la.matmul(left[:, None], right[None, :], p) != la.matmul(right[None, :], left[:, None], p)):
            raise ValidationError([Violation("action", (), "left and right actions do not commute")])
    act = la.matmul(left[:, None], right[None, :], p).reshape(n * n, d, d)
    return GradedModule(E, degrees, act, labels, name, check=check)


def regular_bimodule(A: GradedAlgebra) -> GradedModule:
    return bimodule(A, A.degrees, A.left, A.right, A.labels, A.name, check=False)


def dual_bimodule(A: GradedAlgebra) -> GradedModule:
    """``D(A)`` with ``(a f b)(x) = f(b x a)``."""
    G = A.group
    degs = tuple(G.neg(d) for d in A.degrees)
    left = A.right.transpose(0, 2, 1)
    right = A.left.transpose(0, 2, 1)
    labels = tuple(f"{lab}_d" for lab in A.labels)
    return bimodule(A, degs, left, right, labels, f"D({A.name})", check=False)


# ---------------------------------------------------------------------------
# group algebras

def group_algebra(L: FgAbGroup, k: Field, graded: bool = False) -> GradedAlgebra:
    """``k[L]`` for finite ``L``; graded by ``L`` when ``graded`` else trivially."""
    els = L.elements()
    index = {g: i for i, g in enumerate(els)}
    n = len(els)
    mult = np.zeros((n, n, n), dtype=np.int64)
    for i, a in enumerate(els):
        for j, b in enumerate(els):
            mult[i, j, index[L.add(a, b)]] = 1
    grp = L if graded else TRIVIAL
    degs = tuple(els) if graded else tuple(TRIVIAL.zero for _ in els)
    labels = tuple("g" + "".join(map(str, g)) if g else "g" for g in els)
    return GradedAlgebra(k, grp, labels, degs, index[L.zero], mult, name=f"{k}[{L}]", check=False)


def trivial_module(A: GradedAlgebra) -> GradedModule:
    """One-dimensional module in degree 0 on which every basis vector acts by 1.

    Meant for group algebras with the trivial grading.
    """
    act = np.ones((A.dim, 1, 1), dtype=np.int64)
    return GradedModule(A, (A.group.zero,), act, ("1",), "k")


# ---------------------------------------------------------------------------
# smash product

@dataclass(frozen=True, eq=False)
class SmashProduct:
    """``A # k[G]^*`` for a finite grading group ``G``.

    Standard basis ``b_t (x) p_g``; the algebra stored in ``algebra`` uses the
    same basis except that ``b_unit (x) p_0`` is replaced by the unit
    ``sum_g 1 (x) p_g``.  ``to_std`` holds the change of basis (columns: new
    basis vectors in standard coordinates) and ``from_std`` its inverse.
    """

    base: GradedAlgebra
    algebra: GradedAlgebra
    elements: tuple
    to_std: np.ndarray
    from_std: np.ndarray

    def std_index(self, t: int, g) -> int:
        return t * len(self.elements) + self.elements.index(tuple(g))

    def to_smash(self, M: GradedModule) -> GradedModule:
        """The ``Lambda``-module with ``(a (x) p_g) m = a (pi_g m)``."""
        if M.algebra != self.base:
            raise ValueError("module is not over the base algebra")
        p = M.p
        std = self._std_action(M)
        act = np.tensordot(self.to_std.T, std, axes=(1, 0)) % p
        return GradedModule(self.algebra, tuple(TRIVIAL.zero for _ in M.degrees), act, M.labels, f"{M.name}^", check=False)

    def orbit_sum(self, N: GradedModule) -> GradedModule:
        """``to_smash`` of ``(+)_g N[g]``.

        ``to_smash`` is an equivalence, so ``Hom_Lambda(M^, N^)`` only sees
        degree-preserving maps; summing the shifts of ``N`` first recovers
        ``(+)_g Hom(M, N[g])`` and likewise for Ext.
        """
        return self.to_smash(direct_sum(*(shift(N, g) for g in self.elements)))

    def _std_action(self, M: GradedModule) -> np.ndarray:
        A = self.base
        q = len(self.elements)
        std = np.zeros((A.dim * q, M.dim, M.dim), dtype=np.int64)
        for gi, g in enumerate(self.elements):
            proj = np.diag([int(d == g) for d in M.degrees]).astype(np.int64)
            for t in range(A.dim):
                std[t * q + gi] = la.matmul(M.act[t], proj, M.p)
        return std

    def std_element_action(self, X: GradedModule, t: int, g) -> np.ndarray:
        coords = self.from_std[:, self.std_index(t, g)]
        return self.algebra.element_matrix(coords, X.act)

    def from_smash(self, X: GradedModule) -> GradedModule:
        """Graded ``A``-module with ``X_g = p_g X``."""
        if X.algebra != self.algebra:
            raise ValueError("module is not over the smash product")
        p = X.p
        A = self.base
        cols, degs = [], []
        for g in self.elements:
            e = self.std_element_action(X, A.unit, g)
            basis = la.column_space(e, p)
            for v in basis.T:
                cols.append(v)
                degs.append(g)
        order = sorted(range(len(cols)), key=lambda j: int(np.flatnonzero(cols[j])[0]))
        C = np.column_stack([cols[j] for j in order]) if cols else np.zeros((X.dim, 0), dtype=np.int64)
        degs = tuple(degs[j] for j in order)
        Cinv = la.inverse(C, p) if X.dim else C
        act = np.zeros((A.dim, X.dim, X.dim), dtype=np.int64)
        for t in range(A.dim):
            total = np.zeros((X.dim, X.dim), dtype=np.int64)
            for g in self.elements:
                total = (total + self.std_element_action(X, t, g)) % p
            act[t] = la.matmul(Cinv, la.matmul(total, C, p), p)
        return GradedModule(A, degs, act, X.labels, X.name.rstrip("^"))


def smash_product(A: GradedAlgebra) -> SmashProduct:
    G = A.group
    if not G.is_finite:
        raise ValueError(f"smash product needs a finite grading group, got {G}")
    els = tuple(G.elements())
    q, n, p = len(els), A.dim, A.p
    N = n * q
    std = np.zeros((N, N, N), dtype=np.int64)
    # (a (x) p_g)(a' (x) p_h) = a a' (x) p_h  if g = deg a' + h
    for t in range(n):
        for gi, g in enumerate(els):
            for s in range(n):
                for hi, h in enumerate(els):
                    if g != G.add(A.degrees[s], h):
                        continue
                    for k in np.flatnonzero(A.mult[t, s]):
                        std[t * q + gi, s * q + hi, k * q + hi] = A.mult[t, s, k]
    zero_i = els.index(G.zero)
    P = np.eye(N, dtype=np.int64)
    unit_col = A.unit * q + zero_i
    P[:, unit_col] = 0
    for gi in range(q):
        P[A.unit * q + gi, unit_col] = 1
    Pinv = la.inverse(P, p)
    # new structure constants: c'[i,j] = Pinv (P e_i * P e_j)
    t1 = np.einsum("ai,abc->ibc", P, std) % p
    t2 = np.einsum("bj,ibc->ijc", P, t1) % p
    new = np.einsum("kc,ijc->ijk", Pinv, t2) % p
    labels = []
    for t in range(n):
        for gi, g in enumerate(els):
            idx = t * q + gi
            labels.append("1" if idx == unit_col else f"{A.labels[t]}#p{_fmt(g)}")
    Lam = GradedAlgebra(A.field, TRIVIAL, tuple(labels), tuple(TRIVIAL.zero for _ in range(N)), unit_col, new, name=f"{A.name}#", check=False)
    return SmashProduct(A, Lam, els, P, Pinv)


# ---------------------------------------------------------------------------
# table-driven constructors (shared by the catalog and the parser)

def make_algebra(k: Field, group: FgAbGroup, basis, unit: str, products: dict, name="", check=True) -> GradedAlgebra:
    """Build an algebra from ``basis = [(label, degree)]`` and a product table.

    ``products[(a, b)]`` is a ``{label: coeff}`` dict; omitted products are 0
    and products involving the unit default to the identity.
    """
    labels = [lab for lab, _ in basis]
    index = {lab: i for i, lab in enumerate(labels)}
    if len(index) != len(labels):
        raise ValueError("duplicate basis label")
    if unit not in index:
        raise KeyError(unit)
    n = len(labels)
    mult = np.zeros((n, n, n), dtype=np.int64)
    u = index[unit]
    mult[u, np.arange(n), np.arange(n)] = 1
    mult[np.arange(n), u, np.arange(n)] = 1
    for (a, b), terms in products.items():
        i, j = index[a], index[b]
        mult[i, j] = 0
        for c, coeff in terms.items():
            mult[i, j, index[c]] = coeff
    return GradedAlgebra(k, group, tuple(labels), tuple(d for _, d in basis), u, mult, name=name, check=check)


def make_module(A: GradedAlgebra, basis, actions: dict, name="", check=True) -> GradedModule:
    """Module from ``basis = [(label, degree)]`` and ``actions[(a, m)] = {label: coeff}``.

    The unit acts as the identity; every other action not listed is 0.
    Actions of non-generators are derived from the generators when they are
    omitted altogether.
    """
    labels = [lab for lab, _ in basis]
    index = {lab: i for i, lab in enumerate(labels)}
    if len(index) != len(labels):
        raise ValueError("duplicate basis label")
    alg = {lab: i for i, lab in enumerate(A.labels)}
    d = len(labels)
    act = np.zeros((A.dim, d, d), dtype=np.int64)
    act[A.unit] = np.eye(d, dtype=np.int64)
    given = set()
    for (a, m), terms in actions.items():
        t = alg[a]
        given.add(t)
        for c, coeff in terms.items():
            act[t, index[c], index[m]] = coeff % A.p
    missing = [t for t in range(A.dim) if t != A.unit and t not in given]
    if missing and given:
        act = _complete_action(A, act, sorted(given | {A.unit}), missing)
    return GradedModule(A, tuple(deg for _, deg in basis), act, tuple(labels), name, check=check)


def _complete_action(A: GradedAlgebra, act, known, missing):
    """Fill in actions of basis vectors that are products of known ones."""
    p = A.p
    act = act.copy()
    known = set(known)
    progress = True
    while missing and progress:
        progress = False
        for i in sorted(known):
            for j in sorted(known):
                prod = A.mult[i, j]
                nz = np.flatnonzero(prod)
                unknown = [t for t in nz if t not in known]
                if len(unknown) != 1:
                    continue
                t = unknown[0]
                rest = la.matmul(act[i], act[j], p)
                for s in nz:
                    if s != t:
                        rest = (rest - prod[s] * act[s]) % p
                act[t] = rest * A.field.inv(int(prod[t])) % p
                known.add(t)
                missing.remove(t)
                progress = True
    return act
