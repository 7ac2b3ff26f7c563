import numpy as np
import pytest

from helpers import context

from cograde import linalg as la
from cograde.abgroups import GroupMorphism
from cograde.catalog import Z2, Z6, catalog
from cograde.cog import InfiniteKernel, RegradeContext, push
from cograde.graded import direct_sum, shift
from cograde.homalg import Tag, sn_resolution

CAT = catalog()


def _assert_valid(r):
    assert r.exact
    assert len(r.tags) == len(r.terms)
    for tag, term in zip(r.tags, r.terms):
        assert tag.verify(term)


@pytest.mark.parametrize("name", ["C1", "kC1", "D(C1)"])
def test_char_two_resolutions_do_not_stop(name):
    ctx = context("tau", "C1")
    N = push(ctx, CAT.modules["C1"][name])
    r = sn_resolution(ctx, N, depth=5)
    _assert_valid(r)
    assert r.truncated and r.length == 5
    assert all(t.kind == "free" for t in r.tags)


@pytest.mark.parametrize("alg", ["K6", "B1"])
def test_maschke_case_splits_immediately(alg):
    ctx = context("iota", alg)
    for M in CAT.modules[alg].values():
        r = sn_resolution(ctx, push(ctx, M), depth=4)
        _assert_valid(r)
        assert r.length == 0 and r.tags[0].kind == "summand"
        t = r.tags[0]
        assert np.array_equal(la.matmul(t.projection, t.inclusion, M.p), np.eye(M.dim, dtype=np.int64))


def test_non_surjective_morphism_uses_coset_representatives():
    """``Z/2 -> Z/6``, ``1 -> 3``, misses degree 1; a summand there needs its own coset representative."""
    ctx = RegradeContext(GroupMorphism(Z2, Z6, ((3,),)), CAT.algebras["C1"])
    N = direct_sum(push(ctx, CAT.modules["C1"]["C1"]), shift(push(ctx, CAT.modules["C1"]["kC1"]), (1,)))
    r = sn_resolution(ctx, N, depth=3)
    _assert_valid(r)
    assert r.length == 0


def test_tag_rejects_a_broken_isomorphism():
    ctx = context("tau", "C1")
    r = sn_resolution(ctx, push(ctx, CAT.modules["C1"]["kC1"]), depth=2)
    tag = r.tags[0]
    broken = Tag(tag.kind, tag.target, iso=np.zeros_like(tag.iso))
    assert tag.verify(r.terms[0]) and not broken.verify(r.terms[0])


def test_infinite_kernel_rejected():
    ctx = context("eps", "A1")
    with pytest.raises(InfiniteKernel):
        sn_resolution(ctx, push(ctx, CAT.modules["A1"]["S"]))


def test_module_over_source_rejected():
    ctx = context("tau", "C1")
    with pytest.raises(ValueError):
        sn_resolution(ctx, CAT.modules["C1"]["kC1"])
