import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import context, random_module

from cograde import linalg as la
from cograde.abgroups import DimValue
from cograde.catalog import catalog
from cograde.cog import pull, push
from cograde.complexes import zero_module
from cograde.graded import direct_sum, regular_module, shift, validate
from cograde.homalg import (
    GeneratingSet,
    Report,
    _ext_from_resolution,
    check_acyclicity,
    compare,
    d_n_functor,
    ext,
    ext_enriched,
    free_cover,
    greedy_generators,
    hom_enriched,
    hom_graded,
    hom_graded_direct,
    injdim,
    is_projective,
    kg_module,
    projdim,
    random_generators,
    resolve,
)

CAT = catalog()
ALGEBRAS = ["A1", "A2", "K6", "B1", "C1", "C2"]
# full-basis covers multiply the rank by dim A at every step, so they stay shallow on the larger algebras
BASIS_DEPTH = {"A2": 2, "K6": 1}
PAIRS = [
    (a, m, n)
    for a in ALGEBRAS
    for m, n in itertools.product(CAT.modules[a], CAT.modules[a])
]


def _span_equal(B1, B2, p):
    if len(B1) != len(B2):
        return False
    if not len(B1):
        return True
    X = B1.reshape(len(B1), -1).T
    Y = B2.reshape(len(B2), -1).T
    return la.rank(np.column_stack([X, Y]), p) == la.rank(X, p) == X.shape[1]


@pytest.mark.parametrize("a,m,n", PAIRS, ids=[f"{a}:{m}->{n}" for a, m, n in PAIRS])
def test_hom_presentation_matches_direct_system(a, m, n):
    M, N = CAT.modules[a][m], CAT.modules[a][n]
    for g in sorted({N.group.sub(h, d) for d in M.support for h in N.support}):
        Ng = shift(N, g)
        assert _span_equal(hom_graded(M, Ng), hom_graded_direct(M, Ng), M.p)


def test_hom_rejects_mixed_algebras():
    with pytest.raises(ValueError):
        hom_graded(CAT.modules["A1"]["S"], CAT.modules["B1"]["S_B"])


def test_hom_enriched_a1():
    A1, S = CAT.modules["A1"]["A1"], CAT.modules["A1"]["S"]
    # A1 -> A1[g]: multiplication by 1 (g = 0) or by x (g = 1)
    assert hom_enriched(A1, A1) == {(0,): 1, (1,): 1}
    assert hom_enriched(S, A1) == {(1,): 1}
    assert hom_enriched(A1, S) == {(0,): 1}


def _check_resolution(res, p):
    M = res.module
    assert la.rank(res.augmentation, p) == M.dim
    maps = [res.augmentation] + res.differentials
    for a, b in zip(maps, maps[1:]):
        assert not la.matmul(a, b, p).any()
    for i in range(len(res.differentials)):
        kernel_dim = res.terms[i].dim - la.rank(maps[i], p)
        assert kernel_dim == la.rank(maps[i + 1], p)


@pytest.mark.parametrize("mode", ["greedy", "basis"])
@pytest.mark.parametrize("a", ALGEBRAS)
def test_resolutions_are_exact(mode, a):
    depth = BASIS_DEPTH.get(a, 4) if mode == "basis" else 4
    for M in CAT.modules[a].values():
        res = resolve(M, depth, mode)
        _check_resolution(res, M.p)
        for T in res.terms:
            assert validate(T) == []


@pytest.mark.parametrize("a,m,n", PAIRS, ids=[f"{a}:{m}->{n}" for a, m, n in PAIRS])
def test_ext_independent_of_generating_set(a, m, n):
    """Greedy and full-basis resolutions give the same Ext (Schanuel)."""
    M, N = CAT.modules[a][m], CAT.modules[a][n]
    depth = BASIS_DEPTH.get(a, 4)
    greedy, basis = resolve(M, depth, "greedy"), resolve(M, depth, "basis")
    for i in range(depth):
        shifts = sorted({N.group.sub(h, d) for d in M.support for h in N.support} | {N.group.zero})
        for g in shifts:
            e1 = _ext_from_resolution(greedy, N, i, [g]).get(g, 0)
            e2 = _ext_from_resolution(basis, N, i, [g]).get(g, 0)
            assert e1 == e2, (i, g)


def _padded_generators(X, rng):
    """A greedy generating set with one random homogeneous vector added (not minimal)."""
    g = greedy_generators(X)
    extra = random_generators(X, rng, extra=1)
    V = np.column_stack([g.vectors, extra.vectors[:, -1]])
    return GeneratingSet(V, g.degrees + (extra.degrees[-1],))


@given(st.sampled_from(ALGEBRAS), st.integers(0, 2**32 - 1))
def test_ext_with_random_generators(a, seed):
    rng = np.random.default_rng(seed)
    M = random_module(a, rng)
    N = random_module(a, rng)
    res = resolve(M, 3, lambda X: _padded_generators(X, rng))
    _check_resolution(res, M.p)
    for i in range(3):
        assert _ext_from_resolution(res, N, i, [N.group.zero]).get(N.group.zero, 0) == ext(M, N, i)


def test_ext_zero_is_hom():
    for a, m, n in PAIRS:
        M, N = CAT.modules[a][m], CAT.modules[a][n]
        assert ext(M, N, 0) == len(hom_graded(M, N))


def test_ext_pattern_for_simple_a1_module():
    S = CAT.modules["A1"]["S"]
    for i in range(6):
        assert ext_enriched(S, S, i) == {(-i,): 1}


def test_ext_of_exterior_algebra_simple():
    """Over an exterior algebra on two generators, Ext^i(k, k) has dimension i + 1."""
    k2 = CAT.modules["A2"]["k2"]
    for i in range(5):
        e = ext_enriched(k2, k2, i)
        assert sum(e.values()) == i + 1
        assert all(-sum(g) == i for g in e)


def test_ext_over_semisimple_group_algebra_vanishes():
    for M, N in itertools.product(CAT.modules["K6"].values(), repeat=2):
        assert all(ext(M, N, i) == 0 for i in (1, 2, 3))


def test_ext_beyond_cutoff_rejected():
    S = CAT.modules["A1"]["S"]
    with pytest.raises(ValueError):
        ext(S, S, 9, cutoff=8)
    assert ext(S, S, -1) == 0


@pytest.mark.parametrize(
    "a,m,pd,inj",
    [
        ("A1", "A1", 0, 0),
        ("A1", "S", None, None),
        ("A1", "D(A1)", 0, 0),
        ("A2", "A2", 0, 0),
        ("A2", "k2", None, None),
        ("K6", "K6[2]", 0, 0),
        ("B1", "S_B", None, None),
        ("C1", "kC1", None, None),
        ("C2", "C2", 0, 0),
    ],
)
def test_dimension_table(a, m, pd, inj):
    M = CAT.modules[a][m]
    expect_pd = DimValue.exceeds(8) if pd is None else DimValue.finite(pd)
    expect_inj = DimValue.exceeds(8) if inj is None else DimValue.finite(inj)
    assert projdim(M) == expect_pd
    assert injdim(M) == expect_inj


def test_projectivity_and_cover():
    A2 = CAT.algebras["A2"]
    F = direct_sum(regular_module(A2), shift(regular_module(A2), (1, 0)))
    assert is_projective(F)
    assert not is_projective(CAT.modules["A2"]["k2"])
    cov = free_cover(F)
    assert len(greedy_generators(F)) == 2 and cov.kernel.dim == 0
    with pytest.raises(ValueError):
        free_cover(F, "everything")


def test_zero_module_projdim():
    assert projdim(zero_module(CAT.algebras["A1"])) == DimValue.neginf()


@pytest.mark.parametrize(
    "lhs,rel,rhs,offset,verdict",
    [
        (DimValue.finite(1), "=", DimValue.finite(1), None, "pass"),
        (DimValue.finite(1), "=", DimValue.finite(2), None, "fail"),
        (DimValue.exceeds(8), "=", DimValue.exceeds(8), None, "consistent-at-cutoff"),
        (DimValue.exceeds(8), "=", DimValue.finite(3), None, "fail"),
        (DimValue.finite(0), "<=", DimValue.finite(0), DimValue.finite(1), "pass"),
        (DimValue.finite(2), "<=", DimValue.finite(0), DimValue.finite(1), "fail"),
        (DimValue.exceeds(8), "<=", DimValue.exceeds(8), DimValue.finite(1), "consistent-at-cutoff"),
        (DimValue.finite(3), "<=", DimValue.exceeds(8), None, "pass"),
        (DimValue.exceeds(8), "<=", DimValue.finite(0), DimValue.infinite(), "pass"),
        (DimValue.neginf(), "<=", DimValue.finite(0), None, "pass"),
    ],
)
def test_compare(lhs, rel, rhs, offset, verdict):
    assert compare("c", lhs, rel, rhs, offset).verdict == verdict


def test_report_verdict_is_worst():
    r = Report("r")
    assert r.verdict == "pass"
    r.add(compare("a", DimValue.exceeds(8), "=", DimValue.exceeds(8)))
    assert r.verdict == "consistent-at-cutoff" and r.ok
    r.flag("b", False)
    assert r.verdict == "fail" and not r.ok
    assert r.to_json()["verdict"] == "fail" and len(r.lines()) == 3


def test_acyclicity_requires_injective():
    ctx = context("iota", "B1")
    with pytest.raises(ValueError, match="injective"):
        check_acyclicity(ctx, CAT.modules["B1"]["S_B"], CAT.modules["B1"]["S_B"])


def test_d_n_of_shifted_group_algebra():
    """``D_N(k[G][h0])`` has the size of ``pull(N[h0])`` and is a valid module."""
    ctx = context("iota", "B1")
    N = push(ctx, CAT.modules["B1"]["D(B1)"])
    for h0 in [(0,), (1,)]:
        D = d_n_functor(N, kg_module(ctx, h0)).module
        assert validate(D) == []
        assert D.dim == pull(ctx, shift(N, h0)).dim
