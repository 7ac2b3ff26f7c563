"""Graded Hom and Ext, projectivity, homological dimensions, S(N)-resolutions.

Everything is reduced to linear systems over GF(p).  Hom spaces out of a
module ``M`` are computed from a presentation ``F_1 -> F_0 -> M -> 0``: a
module map is a choice of images of the generators that kills the
relations.  Ext is the cohomology of ``Hom(F., N)`` for a free resolution
``F.``, where ``Hom(A[-g], N) = N_g``.  Injective dimension is the projective
dimension of the graded dual over the opposite algebra.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import linalg as la
from .abgroups import (
    DimValue,
    FiniteSupport,
    is_phi_finite,
    pd_trivial_module,
    trivial_module_resolution,
)
from .cog import InfiniteKernel, RegradeContext, pull, pull_push_decomposition, push
from .graded import (
    GradedMap,
    GradedModule,
    direct_sum,
    free_module,
    graded_dual,
    homogeneous_kernel,
    shift,
    submodule,
)

__all__ = [
    "GeneratingSet",
    "Cover",
    "Presentation",
    "Splitting",
    "FreeResolution",
    "greedy_generators",
    "basis_generators",
    "random_generators",
    "free_cover",
    "presentation",
    "hom_graded",
    "hom_graded_direct",
    "hom_enriched",
    "find_splitting",
    "is_projective",
    "syzygy",
    "resolve",
    "ext",
    "ext_enriched",
    "ext_total",
    "projdim",
    "injdim",
    "Check",
    "Report",
    "compare",
    "KGModule",
    "kh_module",
    "kg_module",
    "equivalence_image",
    "d_n_functor",
    "d_n_map",
    "SNResolution",
    "sn_resolution",
    "check_acyclicity",
    "verify_prop31",
    "verify_thm32",
    "verify_thm37",
]

DEFAULT_CUTOFF = 8


# ---------------------------------------------------------------------------
# generators, covers, presentations

@dataclass(frozen=True)
class GeneratingSet:
    vectors: np.ndarray  # dim M x k, homogeneous columns
    degrees: tuple

    def __len__(self):
        return len(self.degrees)


def _orbit_span(M: GradedModule, v: np.ndarray) -> np.ndarray:
    # columns act[t] v for every basis vector t
    return la.matmul(M.act, v, M.p).T


def _generated(M: GradedModule, vecs: list) -> int:
    if not vecs:
        return 0
    return la.rank(np.column_stack([_orbit_span(M, v) for v in vecs]), M.p)


def greedy_generators(M: GradedModule, candidates: GeneratingSet | None = None) -> GeneratingSet:
    """A small homogeneous generating set.

    Candidates (basis vectors by default) are taken largest cyclic submodule
    first, skipping those already generated; a second pass drops redundant
    choices.
    """
    p, d = M.p, M.dim
    if candidates is None:
        candidates = basis_generators(M)
    vecs = [candidates.vectors[:, j] for j in range(len(candidates))]
    degs = list(candidates.degrees)
    sizes = [la.rank(_orbit_span(M, v), p) for v in vecs]
    order = sorted(range(len(vecs)), key=lambda j: (-sizes[j], j))
    chosen: list = []
    span = np.zeros((d, 0), dtype=np.int64)
    for j in order:
        if span.shape[1] == d:
            break
        if span.shape[1] and la.in_span(span, vecs[j], p):
            continue
        chosen.append(j)
        span = la.column_space(np.column_stack([span, _orbit_span(M, vecs[j])]), p)
    for j in list(reversed(chosen)):
        rest = [vecs[i] for i in chosen if i != j]
        if _generated(M, rest) == d:
            chosen.remove(j)
    chosen.sort()
    V = np.column_stack([vecs[j] for j in chosen]) if chosen else np.zeros((d, 0), dtype=np.int64)
    return GeneratingSet(V, tuple(degs[j] for j in chosen))


def basis_generators(M: GradedModule) -> GeneratingSet:
    return GeneratingSet(np.eye(M.dim, dtype=np.int64), M.degrees)


def random_generators(M: GradedModule, rng: np.random.Generator, extra: int = 1) -> GeneratingSet:
    """Random homogeneous vectors per degree until they generate, plus ``extra`` more."""
    p = M.p
    vecs, degs = [], []
    comps = sorted(M.components.items())
    while _generated(M, vecs) < M.dim:
        d, ix = comps[int(rng.integers(len(comps)))]
        v = np.zeros(M.dim, dtype=np.int64)
        v[ix] = rng.integers(0, p, size=len(ix))
        if v.any():
            vecs.append(v)
            degs.append(d)
    for _ in range(extra if comps else 0):
        d, ix = comps[int(rng.integers(len(comps)))]
        v = np.zeros(M.dim, dtype=np.int64)
        v[ix] = rng.integers(0, p, size=len(ix))
        vecs.append(v)
        degs.append(d)
    V = np.column_stack(vecs) if vecs else np.zeros((M.dim, 0), dtype=np.int64)
    return GeneratingSet(V, tuple(degs))


class Cover(NamedTuple):
    free: GradedModule
    projection: np.ndarray  # dim M x dim F
    kernel: GradedModule
    inclusion: np.ndarray  # dim F x dim kernel


def _cover_projection(M: GradedModule, gens: GeneratingSet) -> np.ndarray:
    if not len(gens):
        return np.zeros((M.dim, 0), dtype=np.int64)
    blocks = [_orbit_span(M, gens.vectors[:, j]) for j in range(len(gens))]
    return np.concatenate(blocks, axis=1) % M.p


def free_cover(M: GradedModule, gens: GeneratingSet | str | None = None) -> Cover:
    """``0 -> Omega -> F -> M -> 0`` with ``F = (+)_j A[-g_j]``.

    ``gens`` is a generating set, ``"basis"`` (the full basis of ``M``) or
    ``None`` (a greedy generating set).
    """
    if gens is None:
        gens = greedy_generators(M)
    elif isinstance(gens, str):
        if gens != "basis":
            raise ValueError(f"unknown generator mode {gens!r}")
        gens = basis_generators(M)
    F = free_module(M.algebra, gens.degrees)
    pi = _cover_projection(M, gens)
    if la.rank(pi, M.p) != M.dim:
        raise ValueError("the given vectors do not generate the module")
    K, degs = homogeneous_kernel(pi, F.degrees, M.degrees, M.p)
    omega = submodule(F, K, degs, name=f"syz({M.name})" if M.name else "")
    return Cover(F, pi, omega, K)


_CACHE_LOCK = threading.Lock()
_COVERS: dict = {}
_PRESENTATIONS: dict = {}


def _cached(store: dict, key, build):
    hit = store.get(key)
    if hit is None:
        hit = build()
        with _CACHE_LOCK:
            hit = store.setdefault(key, hit)
    return hit


def syzygy_cover(M: GradedModule) -> Cover:
    return _cached(_COVERS, M.key, lambda: free_cover(M))


def syzygy(M: GradedModule) -> GradedModule:
    return syzygy_cover(M).kernel


@dataclass(frozen=True)
class Presentation:
    module: GradedModule
    generators: GeneratingSet
    cover: Cover
    relations: np.ndarray  # dim F x s, generate the kernel of the cover
    section: np.ndarray  # dim F x dim M, linear right inverse of the projection


def presentation(M: GradedModule) -> Presentation:
    def build():
        cov = syzygy_cover(M)
        gens = GeneratingSet(
            _generator_columns(cov), tuple(cov.free.free_gens)
        )
        rel = greedy_generators(cov.kernel)
        R = la.matmul(cov.inclusion, rel.vectors, M.p)
        sec = la.solve_many(cov.projection, np.eye(M.dim, dtype=np.int64), M.p)
        return Presentation(M, gens, cov, R, sec)

    return _cached(_PRESENTATIONS, M.key, build)


def _generator_columns(cov: Cover) -> np.ndarray:
    A = cov.free.algebra
    return cov.projection[:, A.unit :: A.dim]


def _images_to_map(T: GradedModule, gen_images: list, section: np.ndarray) -> np.ndarray:
    """Module map ``F -> T`` sending generator ``j`` to ``gen_images[j]``, composed with ``section``."""
    if not gen_images:
        return np.zeros((T.dim, section.shape[1]), dtype=np.int64)
    Phi = np.concatenate([_orbit_span(T, w) for w in gen_images], axis=1)
    return la.matmul(Phi, section, T.p)


def _relation_system(pres: Presentation, T: GradedModule, idx: list) -> np.ndarray:
    """Rows: the relations evaluated on unknown generator images ``w_j`` in ``T[idx_j]``."""
    A = T.algebra
    nA, dT, p = A.dim, T.dim, T.p
    R = pres.relations
    r, s = len(pres.generators), R.shape[1]
    ncols = sum(len(ix) for ix in idx)
    if s == 0 or ncols == 0:
        return np.zeros((0, ncols), dtype=np.int64)
    coeff = R.T.reshape(s * r, nA)
    Y = la.matmul(coeff, T.act.reshape(nA, dT * dT), p).reshape(s, r, dT, dT)
    blocks = [Y[:, j][:, :, ix] for j, ix in enumerate(idx)]  # each s x dT x |ix|
    return np.concatenate(blocks, axis=2).reshape(s * dT, ncols)


def _component_indices(T: GradedModule, degrees) -> list:
    comps = T.components
    empty = np.zeros(0, dtype=np.int64)
    return [comps.get(g, empty) for g in degrees]


def _expand(T: GradedModule, idx: list, v: np.ndarray) -> list:
    out, pos = [], 0
    for ix in idx:
        w = np.zeros(T.dim, dtype=np.int64)
        w[ix] = v[pos : pos + len(ix)]
        pos += len(ix)
        out.append(w)
    return out


def hom_graded(M: GradedModule, N: GradedModule) -> np.ndarray:
    """Basis of ``Hom^G_A(M, N)`` as an array of shape ``(k, dim N, dim M)``."""
    if M.algebra != N.algebra:
        raise ValueError("modules over different algebras")
    if M.dim == 0 or N.dim == 0:
        return np.zeros((0, N.dim, M.dim), dtype=np.int64)
    pres = presentation(M)
    idx = _component_indices(N, pres.generators.degrees)
    system = _relation_system(pres, N, idx)
    ncols = system.shape[1]
    if ncols == 0:
        return np.zeros((0, N.dim, M.dim), dtype=np.int64)
    kb = la.kernel_basis(system, N.p)
    maps = [_images_to_map(N, _expand(N, idx, v), pres.section) for v in kb]
    return np.asarray(maps, dtype=np.int64).reshape(len(maps), N.dim, M.dim)


def hom_graded_direct(M: GradedModule, N: GradedModule) -> np.ndarray:
    """Same space as :func:`hom_graded`, from the full commutation system (slow oracle)."""
    if M.algebra != N.algebra:
        raise ValueError("modules over different algebras")
    A, p = M.algebra, M.p
    allowed = [
        (r, c) for r in range(N.dim) for c in range(M.dim) if N.degrees[r] == M.degrees[c]
    ]
    if not allowed:
        return np.zeros((0, N.dim, M.dim), dtype=np.int64)
    flat = np.asarray([r * M.dim + c for r, c in allowed])
    rows = []
    for t in A.generators:
        # vec(act_N X - X act_M) in row-major order
        big = np.kron(N.act[t], np.eye(M.dim, dtype=np.int64)) - np.kron(
            np.eye(N.dim, dtype=np.int64), M.act[t].T
        )
        rows.append(big[:, flat] % p)
    system = np.concatenate(rows, axis=0) if rows else np.zeros((0, len(allowed)), dtype=np.int64)
    kb = la.kernel_basis(system, p)
    out = np.zeros((len(kb), N.dim * M.dim), dtype=np.int64)
    out[:, flat] = kb
    return out.reshape(len(kb), N.dim, M.dim)


def shift_candidates(M_degrees, N: GradedModule) -> list:
    G = N.group
    cands = {G.sub(h, g) for g in set(M_degrees) for h in N.support}
    return sorted(cands)


def hom_enriched(M: GradedModule, N: GradedModule) -> dict:
    """``{g: dim Hom(M, N[g])}`` over the finitely many ``g`` that can contribute."""
    out = {}
    for g in shift_candidates(M.degrees, N):
        k = len(hom_graded(M, shift(N, g)))
        if k:
            out[g] = k
    return out


# ---------------------------------------------------------------------------
# projectivity

@dataclass(frozen=True)
class Splitting:
    cover: Cover
    section: np.ndarray  # module map M -> F with projection @ section = id


def find_splitting(M: GradedModule) -> Splitting | None:
    """A module section of the greedy cover ``F -> M``, or ``None`` if it does not split."""
    p = M.p
    pres = presentation(M)
    F, pi = pres.cover.free, pres.cover.projection
    if M.dim == 0:
        return Splitting(pres.cover, np.zeros((F.dim, 0), dtype=np.int64))
    idx = _component_indices(F, pres.generators.degrees)
    rel = _relation_system(pres, F, idx)
    lift_rows = []
    for j, ix in enumerate(idx):
        block = np.zeros((M.dim, rel.shape[1]), dtype=np.int64)
        start = sum(len(t) for t in idx[:j])
        block[:, start : start + len(ix)] = pi[:, ix]
        lift_rows.append(block)
    system = np.concatenate([rel] + lift_rows, axis=0)
    rhs = np.concatenate(
        [np.zeros(rel.shape[0], dtype=np.int64)]
        + [pres.generators.vectors[:, j] for j in range(len(idx))]
    )
    w = la.solve(system, rhs, p)
    if w is None:
        return None
    sec = _images_to_map(F, _expand(F, idx, w), pres.section)
    assert np.array_equal(la.matmul(pi, sec, p), np.eye(M.dim, dtype=np.int64))
    return Splitting(pres.cover, sec)


def is_projective(M: GradedModule) -> bool:
    return find_splitting(M) is not None


# ---------------------------------------------------------------------------
# resolutions and Ext

@dataclass
class FreeResolution:
    """``... -> F_1 -> F_0 -> M``; ``differentials[i]`` maps ``F_{i+1} -> F_i``."""

    module: GradedModule
    terms: list
    differentials: list
    augmentation: np.ndarray
    syzygies: list  # syzygies[i] = kernel of F_i -> F_{i-1}, syzygies[0] = M
    complete: bool = False  # a zero syzygy was reached

    @property
    def length(self) -> int:
        return len(self.terms) - 1

    def gen_degrees(self, i: int) -> tuple:
        if i >= len(self.terms):
            return ()
        return self.terms[i].free_gens


def resolve(
    M: GradedModule,
    length: int,
    generators: str | Callable[[GradedModule], GeneratingSet] = "greedy",
) -> FreeResolution:
    """Free resolution ``F_0, ..., F_length`` (shorter if a syzygy vanishes)."""
    p = M.p
    terms, diffs, syz = [], [], [M]
    aug = np.zeros((M.dim, 0), dtype=np.int64)
    current, incl = M, None
    complete = False
    for i in range(length + 1):
        if current.dim == 0:
            complete = True
            break
        if generators == "greedy":
            cov = syzygy_cover(current)
        elif generators == "basis":
            cov = free_cover(current, "basis")
        else:
            cov = free_cover(current, generators(current))
        terms.append(cov.free)
        if incl is None:
            aug = cov.projection
        else:
            diffs.append(la.matmul(incl, cov.projection, p))
        current, incl = cov.kernel, cov.inclusion
        syz.append(current)
    if not complete and current.dim == 0:
        complete = True
    return FreeResolution(M, terms, diffs, aug, syz, complete)


def _coboundary_blocks(res: FreeResolution, i: int, N: GradedModule):
    """``X[k, j]``: ``N -> N`` matrix giving ``f(d e'_k)`` from ``f(e_j)`` for ``d: F_{i+1} -> F_i``."""
    if i + 1 >= len(res.terms):
        return None
    A = N.algebra
    nA, dN, p = A.dim, N.dim, N.p
    d = res.differentials[i]
    r0, r1 = len(res.terms[i].free_gens), len(res.terms[i + 1].free_gens)
    C = d[:, A.unit :: nA].T.reshape(r1 * r0, nA)
    return la.matmul(C, N.act.reshape(nA, dN * dN), p).reshape(r1, r0, dN, dN)


def _cochain_dims(res: FreeResolution, i: int, N: GradedModule, g) -> int:
    G = N.group
    comps = N.components
    return sum(len(comps.get(G.add(d, g), ())) for d in res.gen_degrees(i))


def _coboundary_rank(res: FreeResolution, i: int, N: GradedModule, g, blocks) -> int:
    """Rank of ``Hom(F_i, N[g]) -> Hom(F_{i+1}, N[g])``."""
    if i < 0 or blocks is None:
        return 0
    G = N.group
    comps = N.components
    empty = np.zeros(0, dtype=np.int64)
    cols = [comps.get(G.add(d, g), empty) for d in res.gen_degrees(i)]
    rows = [comps.get(G.add(d, g), empty) for d in res.gen_degrees(i + 1)]
    nr, nc = sum(map(len, rows)), sum(map(len, cols))
    if nr == 0 or nc == 0:
        return 0
    mat = np.concatenate(
        [np.concatenate([blocks[k, j][np.ix_(rk, cj)] for j, cj in enumerate(cols)], axis=1) for k, rk in enumerate(rows)],
        axis=0,
    )
    return la.rank(mat, N.p)


def _ext_from_resolution(res: FreeResolution, N: GradedModule, i: int, shifts) -> dict:
    below = _coboundary_blocks(res, i - 1, N) if i >= 1 else None
    above = _coboundary_blocks(res, i, N)
    out = {}
    for g in shifts:
        dim = _cochain_dims(res, i, N, g)
        if dim == 0:
            continue
        dim -= _coboundary_rank(res, i, N, g, above)
        if i >= 1:
            dim -= _coboundary_rank(res, i - 1, N, g, below)
        if dim:
            out[g] = dim
    return out


def _check_pair(M: GradedModule, N: GradedModule):
    if M.algebra != N.algebra:
        raise ValueError("modules over different algebras")


def ext(M: GradedModule, N: GradedModule, i: int, cutoff: int = DEFAULT_CUTOFF) -> int:
    """``dim Ext^i_{Gr A}(M, N)``."""
    _check_pair(M, N)
    if i < 0:
        return 0
    if i > cutoff:
        raise ValueError(f"Ext^{i} requested beyond the cutoff {cutoff}")
    res = resolve(M, i + 1)
    zero = N.group.zero
    return _ext_from_resolution(res, N, i, [zero]).get(zero, 0)


def ext_enriched(M: GradedModule, N: GradedModule, i: int, cutoff: int = DEFAULT_CUTOFF) -> dict:
    """``{g: dim Ext^i(M, N[g])}`` with zero entries omitted."""
    _check_pair(M, N)
    if i > cutoff:
        raise ValueError(f"Ext^{i} requested beyond the cutoff {cutoff}")
    if i < 0:
        return {}
    res = resolve(M, i + 1)
    return _ext_from_resolution(res, N, i, shift_candidates(res.gen_degrees(i), N))


def ext_total(M: GradedModule, N: GradedModule, i: int, cutoff: int = DEFAULT_CUTOFF) -> int:
    return sum(ext_enriched(M, N, i, cutoff).values())


def projdim(M: GradedModule, cutoff: int = DEFAULT_CUTOFF) -> DimValue:
    """Least ``n`` whose ``n``-th syzygy is projective, or ``exceeds(cutoff)``."""
    if M.dim == 0:
        return DimValue.neginf()
    current = M
    for n in range(cutoff + 1):
        if is_projective(current):
            return DimValue.finite(n)
        current = syzygy(current)
    return DimValue.exceeds(cutoff)


def injdim(M: GradedModule, cutoff: int = DEFAULT_CUTOFF) -> DimValue:
    return projdim(graded_dual(M), cutoff)


# ---------------------------------------------------------------------------
# reports

_INF = math.inf


def _interval(v: DimValue) -> tuple:
    return {
        "finite": (v.value, v.value),
        "neginf": (-_INF, -_INF),
        "infinite": (_INF, _INF),
        "exceeds": (v.value + 1, _INF),
    }[v.kind]


@dataclass(frozen=True)
class Check:
    label: str
    lhs: DimValue
    relation: str  # "=" or "<="
    rhs: DimValue
    offset: DimValue | None
    verdict: str  # pass | fail | consistent-at-cutoff

    def __str__(self):
        rhs = f"{self.rhs} + {self.offset}" if self.offset is not None else str(self.rhs)
        return f"{self.label}: {self.lhs} {self.relation} {rhs} -> {self.verdict}"

    def to_json(self):
        return {
            "label": self.label,
            "lhs": self.lhs.to_json(),
            "relation": self.relation,
            "rhs": self.rhs.to_json(),
            "offset": None if self.offset is None else self.offset.to_json(),
            "verdict": self.verdict,
        }


def compare(label: str, lhs: DimValue, relation: str, rhs: DimValue, offset: DimValue | None = None) -> Check:
    """Exact comparison where possible; values beyond the cutoff are intervals."""
    lo1, hi1 = _interval(lhs)
    lo2, hi2 = _interval(rhs)
    if offset is not None:
        a, b = _interval(offset)
        lo2, hi2 = lo2 + a, hi2 + b
    if relation == "=":
        if lo1 == hi1 and lo2 == hi2:
            verdict = "pass" if lo1 == lo2 else "fail"
        elif hi1 < lo2 or hi2 < lo1:
            verdict = "fail"
        else:
            verdict = "consistent-at-cutoff"
    elif relation == "<=":
        if hi1 <= lo2:
            verdict = "pass"
        elif lo1 > hi2:
            verdict = "fail"
        else:
            verdict = "consistent-at-cutoff"
    else:
        raise ValueError(relation)
    return Check(label, lhs, relation, rhs, offset, verdict)


_RANK = {"pass": 0, "consistent-at-cutoff": 1, "fail": 2}


@dataclass
class Report:
    name: str
    checks: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        if not self.checks:
            return "pass"
        return max((c.verdict for c in self.checks), key=_RANK.__getitem__)

    @property
    def ok(self) -> bool:
        return self.verdict != "fail"

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def flag(self, label: str, ok: bool) -> Check:
        one = DimValue.finite(1)
        return self.add(Check(label, one if ok else DimValue.finite(0), "=", one, None, "pass" if ok else "fail"))

    def lines(self) -> list:
        out = [f"{self.name}: {self.verdict}"]
        out += [f"  {c}" for c in self.checks]
        return out

    def to_json(self):
        return {
            "name": self.name,
            "verdict": self.verdict,
            "checks": [c.to_json() for c in self.checks],
            "values": {k: (v.to_json() if isinstance(v, DimValue) else v) for k, v in self.values.items()},
        }


# ---------------------------------------------------------------------------
# dimension theorems

def _dims(ctx: RegradeContext, M: GradedModule, cutoff: int, need_proj=True) -> dict:
    PM = push(ctx, M)
    out = {
        "injdim_G": injdim(M, cutoff),
        "injdim_H": injdim(PM, cutoff),
    }
    if need_proj:
        out["projdim_G"] = projdim(M, cutoff)
        out["projdim_H"] = projdim(PM, cutoff)
    return out


def verify_prop31(ctx: RegradeContext, M: GradedModule, cutoff: int = DEFAULT_CUTOFF) -> Report:
    """Projective dimension is unchanged by regrading; injective dimension can only grow."""
    v = _dims(ctx, M, cutoff)
    rep = Report("prop31", values=v)
    rep.add(compare("projdim^G M = projdim^H push M", v["projdim_G"], "=", v["projdim_H"]))
    rep.add(compare("injdim^G M <= injdim^H push M", v["injdim_G"], "<=", v["injdim_H"]))
    return rep


def verify_thm32(ctx: RegradeContext, M: GradedModule, cutoff: int = DEFAULT_CUTOFF) -> Report:
    """Injective dimension is unchanged when the support is phi-finite."""
    finite = is_phi_finite(FiniteSupport(M.group, M.support), ctx.phi)
    v = _dims(ctx, M, cutoff, need_proj=False)
    v["phi_finite"] = finite
    rep = Report("thm32", values=v)
    if finite:
        rep.add(compare("injdim^G M = injdim^H push M", v["injdim_G"], "=", v["injdim_H"]))
    return rep


def verify_thm37(ctx: RegradeContext, M: GradedModule, cutoff: int = DEFAULT_CUTOFF) -> Report:
    """``injdim^G M <= injdim^H push M <= injdim^G M + d`` with ``d = pd_{k[L]} k``."""
    L, _ = ctx.kernel
    d = pd_trivial_module(L, M.field)
    v = _dims(ctx, M, cutoff, need_proj=False)
    v["d"] = d
    v["kernel"] = str(L)
    rep = Report("thm37", values=v)
    rep.add(compare("injdim^G M <= injdim^H push M", v["injdim_G"], "<=", v["injdim_H"]))
    rep.add(compare("injdim^H push M <= injdim^G M + d", v["injdim_H"], "<=", v["injdim_G"], d))
    return rep


# ---------------------------------------------------------------------------
# H-graded k[G]-modules and the functor D_N

@dataclass(frozen=True, eq=False)
class KGModule:
    """An ``H``-graded ``k[G]``-module, ``G`` acting through ``phi``, given by components.

    ``dims(h)`` is ``dim V_h``; ``action(g, h)`` is the matrix of ``g`` from
    ``V_h`` to ``V_{phi(g) + h}``.
    """

    ctx: RegradeContext
    dims: Callable
    action: Callable
    name: str = ""


class _CosetSection:
    """``h -> g_h`` with ``phi(g_h) = h - rep(h)``, ``rep`` picking one point per coset of ``im phi``."""

    def __init__(self, ctx: RegradeContext, support):
        self.ctx = ctx
        H = ctx.phi.target
        reps: list = []
        for h in sorted(support):
            if ctx.phi.preimage(h) is not None:
                continue
            if not any(ctx.phi.preimage(H.sub(h, r)) is not None for r in reps):
                reps.append(h)
        self.reps = [H.zero] + reps
        self._cache: dict = {}

    def rep(self, h):
        H = self.ctx.phi.target
        for r in self.reps:
            if self.ctx.phi.preimage(H.sub(h, r)) is not None:
                return r
        raise ValueError(f"degree {h} lies outside the cosets of the support")

    def __call__(self, h):
        if h not in self._cache:
            H = self.ctx.phi.target
            self._cache[h] = self.ctx.phi.preimage(H.sub(h, self.rep(h)))
        return self._cache[h]


def kh_module(ctx: RegradeContext) -> KGModule:
    """``k[H]``: one basis vector per degree, ``g`` translating by ``phi(g)``."""
    one = np.ones((1, 1), dtype=np.int64)
    return KGModule(ctx, lambda h: 1, lambda g, h: one, "k[H]")


def kg_module(ctx: RegradeContext, h0) -> KGModule:
    """``k[G][h0]``: basis ``e_x`` (``x`` in ``G``) in degree ``phi(x) - h0``."""
    ctx.require_finite_kernel()
    H, G = ctx.phi.target, ctx.phi.source
    h0 = H.reduce(h0)

    def basis(h):
        return ctx.lifts(H.add(h, h0))

    def action(g, h):
        src = basis(h)
        dst = basis(H.add(ctx.phi(g), h))
        where = {x: i for i, x in enumerate(dst)}
        m = np.zeros((len(dst), len(src)), dtype=np.int64)
        for j, x in enumerate(src):
            m[where[G.add(g, x)], j] = 1
        return m

    return KGModule(ctx, lambda h: len(basis(h)), action, f"k[G][{h0}]")


def equivalence_image(ctx: RegradeContext, W: GradedModule, section: _CosetSection) -> KGModule:
    """The ``H``-graded ``k[G]``-module ``k[G] (x)_{k[L]} W``, spread over the cosets of ``section``.

    ``W`` is a module over ``k[L]`` whose basis vector ``s`` is the kernel
    element ``ctx.kernel_elements[s]``.
    """
    G = ctx.phi.source
    H = ctx.phi.target
    index = {l: s for s, l in enumerate(ctx.kernel_elements)}

    def action(g, h):
        h2 = H.add(ctx.phi(g), h)
        l = G.sub(G.add(g, section(h)), section(h2))
        return W.act[index[l]]

    return KGModule(ctx, lambda h: W.dim, action, f"E({W.name})")


@dataclass(frozen=True)
class DNModule:
    module: GradedModule
    offsets: tuple  # start of the block of basis vector i of N
    sizes: tuple


def d_n_functor(N: GradedModule, V: KGModule) -> DNModule:
    """``D_N(V) = (+)_h N_h (x) V_h``, with ``a in A_g`` acting by ``a (x) g``."""
    ctx = V.ctx
    ctx.check_target(N)
    A = ctx.source
    sizes = tuple(int(V.dims(h)) for h in N.degrees)
    offsets = tuple(int(x) for x in np.concatenate([[0], np.cumsum(sizes)])[:-1]) if sizes else ()
    dim = int(sum(sizes))
    act = np.zeros((A.dim, dim, dim), dtype=np.int64)
    p = N.p
    for t in range(A.dim):
        block = N.act[t]
        if not block.any():
            continue
        g = A.degrees[t]
        for i in range(N.dim):
            if not sizes[i]:
                continue
            rows = np.flatnonzero(block[:, i])
            if not rows.size:
                continue
            Vg = V.action(g, N.degrees[i])
            for r in rows:
                if sizes[r]:
                    act[t, offsets[r] : offsets[r] + sizes[r], offsets[i] : offsets[i] + sizes[i]] = (
                        block[r, i] * Vg
                    ) % p
    degs = tuple(N.degrees[i] for i in range(N.dim) for _ in range(sizes[i]))
    labels = tuple(f"{N.labels[i]}|{j}" for i in range(N.dim) for j in range(sizes[i]))
    M = GradedModule(ctx.target, degs, act, labels, f"D_N({V.name})", check=False)
    return DNModule(M, offsets, sizes)


def d_n_map(N: GradedModule, src: DNModule, tgt: DNModule, component: Callable) -> np.ndarray:
    """``D_N(f)`` for ``f`` given by ``component(h)``: ``V_h -> V'_h``."""
    m = np.zeros((tgt.module.dim, src.module.dim), dtype=np.int64)
    for i, h in enumerate(N.degrees):
        if src.sizes[i] and tgt.sizes[i]:
            m[tgt.offsets[i] : tgt.offsets[i] + tgt.sizes[i], src.offsets[i] : src.offsets[i] + src.sizes[i]] = component(h)
    return m


@dataclass
class Tag:
    """Membership of a term in S(N).

    ``kind == "free"``: ``iso`` maps the term isomorphically onto ``target``,
    a direct sum of modules ``push(pull(N[h]))[-h]``.  ``kind == "summand"``:
    ``inclusion`` and ``projection`` exhibit the term as a direct summand of
    such a sum (``projection @ inclusion = id``).
    """

    kind: str
    target: GradedModule
    iso: np.ndarray | None = None
    inclusion: np.ndarray | None = None
    projection: np.ndarray | None = None

    def verify(self, term: GradedModule) -> bool:
        p = term.p
        try:
            if self.kind == "free":
                GradedMap(term, self.target, self.iso)
                return GradedMap(term, self.target, self.iso).is_iso()
            GradedMap(term, self.target, self.inclusion)
            GradedMap(self.target, term, self.projection)
            return np.array_equal(
                la.matmul(self.projection, self.inclusion, p), np.eye(term.dim, dtype=np.int64)
            )
        except ValueError:
            return False


@dataclass
class SNResolution:
    target: GradedModule
    terms: list
    differentials: list  # differentials[i]: terms[i+1] -> terms[i]
    augmentation: np.ndarray  # terms[0] -> target
    tags: list
    truncated: bool
    exact: bool
    kernel_resolution: object = None

    @property
    def length(self) -> int:
        return len(self.terms) - 1


def _sn_summands(ctx: RegradeContext, N: GradedModule, section: _CosetSection) -> list:
    """One module ``push(pull(N[r]))[-r]`` per coset representative ``r`` meeting ``supp N``."""
    out = []
    for r in section.reps:
        part = push(ctx, pull(ctx, shift(N, r)))
        if part.dim:
            out.append((r, shift(part, ctx.phi.target.neg(r))))
    return out


def _free_tag(ctx, N: GradedModule, term: DNModule, rank: int, section, summands) -> Tag:
    """Explicit isomorphism ``D_N(E(k[L]^rank)) -> (+)^rank (+)_r push(pull(N[r]))[-r]``."""
    H = ctx.phi.target
    nL = len(ctx.kernel_elements)
    blocks = [S for _, S in summands] * rank
    target = direct_sum(*blocks) if blocks else GradedModule(ctx.target, (), np.zeros((ctx.target.dim, 0, 0)))
    starts, pos = [], 0
    for S in blocks:
        starts.append(pos)
        pos += S.dim
    # index of (i, t) inside push(pull(N[r]))[-r]: basis pairs ordered by i then lift
    local: dict = {}
    for c, (r, S) in enumerate(summands):
        k = 0
        for i, h in enumerate(N.degrees):
            n_lifts = len(ctx.lifts(H.sub(h, r)))
            for t in range(n_lifts):
                local[(i, t)] = (c, k)
                k += 1
    m = np.zeros((target.dim, term.module.dim), dtype=np.int64)
    nsum = len(summands)
    for i in range(N.dim):
        for j in range(rank):
            for t in range(nL):
                c, k = local[(i, t)]
                m[starts[j * nsum + c] + k, term.offsets[i] + j * nL + t] = 1
    return Tag("free", target, iso=m)


def sn_resolution(ctx: RegradeContext, N: GradedModule, depth: int = 6) -> SNResolution:
    """Resolution of ``N`` by objects of S(N): ``D_N`` of a resolution of ``k`` over ``k[L]``."""
    ctx.check_target(N)
    L, _ = ctx.kernel
    if not L.is_finite:
        raise InfiniteKernel(ctx.phi)
    p = N.p
    if N.dim == 0:
        return SNResolution(N, [], [], np.zeros((0, 0), dtype=np.int64), [], False, True)
    kres = trivial_module_resolution(L, N.field, depth)
    section = _CosetSection(ctx, N.support)
    summands = _sn_summands(ctx, N, section)
    dn_terms = [d_n_functor(N, equivalence_image(ctx, W, section)) for W in kres.terms]
    triv = d_n_functor(N, equivalence_image(ctx, kres.trivial, section))
    assert np.array_equal(triv.module.act, N.act)
    diffs = [
        d_n_map(N, dn_terms[i + 1], dn_terms[i], lambda h, d=d: d)
        for i, d in enumerate(kres.differentials)
    ]
    aug = d_n_map(N, dn_terms[0], triv, lambda h: kres.augmentation)
    tags = []
    for i, (W, T) in enumerate(zip(kres.terms, dn_terms)):
        last = i == len(kres.terms) - 1
        if last and kres.last_projective:
            split = kres.splitting
            F = split.cover.free
            FT = d_n_functor(N, equivalence_image(ctx, F, section))
            ftag = _free_tag(ctx, N, FT, len(F.free_gens), section, summands)
            inc = d_n_map(N, T, FT, lambda h: split.section)
            proj = d_n_map(N, FT, T, lambda h: split.cover.projection)
            Tinv = la.inverse(ftag.iso, p)
            tags.append(
                Tag(
                    "summand",
                    ftag.target,
                    inclusion=la.matmul(ftag.iso, inc, p),
                    projection=la.matmul(proj, Tinv, p),
                )
            )
        else:
            tags.append(_free_tag(ctx, N, T, kres.ranks[i], section, summands))
    terms = [T.module for T in dn_terms]
    exact = _check_exact(terms, diffs, aug, N, p, not kres.truncated)
    return SNResolution(N, terms, diffs, aug, tags, kres.truncated, exact, kres)


def _check_exact(terms, diffs, aug, N, p, complete: bool) -> bool:
    """Exact at ``N`` and at every inner term; also at the last term when ``complete``."""
    if la.rank(aug, p) != N.dim:
        return False
    maps = [aug] + diffs  # maps[i] leaves terms[i]
    for i, T in enumerate(terms):
        kernel_dim = T.dim - la.rank(maps[i], p)
        if i + 1 < len(maps):
            if la.matmul(maps[i], maps[i + 1], p).any():
                return False
            if kernel_dim != la.rank(maps[i + 1], p):
                return False
        elif complete and kernel_dim:
            return False
    return True


# ---------------------------------------------------------------------------

def check_acyclicity(
    ctx: RegradeContext, M: GradedModule, I: GradedModule, imax: int = 4, cutoff: int = DEFAULT_CUTOFF
) -> Report:
    """``Ext^i_H(push M, push I) = 0`` for ``1 <= i <= imax``, cross-checked through ``pull push I``."""
    ctx.check_source(M)
    ctx.check_source(I)
    ctx.require_finite_kernel()
    inj = injdim(I, cutoff)
    if inj != 0:
        raise ValueError(f"I is not graded injective (injdim {inj})")
    rep = Report("acyclicity")
    PM, PI = push(ctx, M), push(ctx, I)
    iso = pull_push_decomposition(ctx, I)
    rep.flag("pull push I = sum of shifts (isomorphism)", iso.is_iso())
    zero = DimValue.finite(0)
    for i in range(1, imax + 1):
        e_h = ext(PM, PI, i, cutoff)
        e_pull = ext(M, iso.source, i, cutoff)
        e_sum = ext(M, iso.target, i, cutoff)
        rep.values[f"ext{i}_H"] = e_h
        rep.values[f"ext{i}_G_pull"] = e_pull
        rep.values[f"ext{i}_G_sum"] = e_sum
        rep.add(compare(f"Ext^{i}_H(push M, push I)", DimValue.finite(e_h), "=", zero))
        rep.add(compare(f"Ext^{i}_G(M, sum I[l])", DimValue.finite(e_sum), "=", zero))
        rep.add(compare(f"Ext^{i}_G(M, pull push I)", DimValue.finite(e_pull), "=", DimValue.finite(e_sum)))
    return rep
