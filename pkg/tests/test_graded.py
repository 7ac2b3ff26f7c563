import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cograde import linalg as la
from cograde.abgroups import TRIVIAL, FgAbGroup, Z
from cograde.catalog import ZZ, catalog
from cograde.graded import (
    GradedMap,
    GradedModule,
    ValidationError,
    direct_sum,
    enveloping,
    field_algebra,
    free_module,
    graded_dual,
    group_algebra,
    make_algebra,
    make_module,
    opposite,
    quotient,
    regular_module,
    shift,
    smash_product,
    submodule,
    tensor,
    trivial_module,
    validate,
)
from cograde.homalg import ext, ext_enriched, hom_graded, injdim
from cograde.linalg import Field

F7 = Field(7)
CAT = catalog()
ALL_MODULES = [(a, n, M) for a, mods in CAT.modules.items() for n, M in mods.items()]


def test_catalog_objects_validate():
    for A in CAT.algebras.values():
        if A.name != "C2u":
            assert validate(A) == []
    for _, _, M in ALL_MODULES:
        assert validate(M) == []
    for B in CAT.bimodules.values():
        assert validate(B) == []


def test_grading_violation_names_the_triple():
    with pytest.raises(ValidationError) as err:
        make_algebra(F7, Z, [("1", (0,)), ("x", (1,)), ("y", (1,))], "1", {("x", "x"): {"y": 1}})
    v = err.value.violations[0]
    assert v.kind == "grading" and v.witness == ("x", "x", "y")
    assert "degree (1,)" in v.message and "expected (2,)" in v.message


def test_associativity_violation():
    # x*x = y but x*(x*x) != (x*x)*x
    basis = [("1", ()), ("x", ()), ("y", ())]
    prods = {("x", "x"): {"y": 1}, ("x", "y"): {"x": 1}, ("y", "x"): {}, ("y", "y"): {}}
    bad = make_algebra(F7, TRIVIAL, basis, "1", prods, check=False)
    kinds = {v.kind for v in validate(bad)}
    assert "associativity" in kinds


def test_module_action_violation():
    A1 = CAT.algebras["A1"]
    M = make_module(A1, [("a", (0,)), ("b", (0,))], {("x", "a"): {"b": 1}}, check=False)
    assert any(v.kind == "degree" or v.kind == "grading" for v in validate(M))


def test_map_violations():
    A1 = regular_module(CAT.algebras["A1"])
    S = CAT.modules["A1"]["S"]
    assert validate(GradedMap(A1, A1, np.array([[0, 0], [1, 0]]), check=False))[0].kind == "degree"
    # S -> A1 sending s to 1 is homogeneous but not linear (x.s = 0, x.1 = x)
    assert validate(GradedMap(S, A1, np.array([[1], [0]]), check=False))[0].kind == "linearity"


def test_shift_convention():
    A1 = regular_module(CAT.algebras["A1"])
    assert shift(A1, (1,)).degrees == ((-1,), (0,))
    assert shift(shift(A1, (2,)), (-2,)).same_as(A1)
    # right multiplication by x is a degree-0 map A1 -> A1[1]
    x_right = np.array([[0, 0], [1, 0]])
    GradedMap(A1, shift(A1, (1,)), x_right)
    with pytest.raises(ValidationError):
        GradedMap(A1, shift(A1, (-1,)), x_right)
    with pytest.raises(ValueError):
        shift(A1, (1, 2))


def test_tensor_degrees():
    V = regular_module(CAT.algebras["A1"]).space
    T = tensor(V, V)
    assert T.dims_by_degree() == {(0,): 1, (1,): 2, (2,): 1}


@pytest.mark.parametrize("a,name,M", ALL_MODULES, ids=[f"{a}/{n}" for a, n, _ in ALL_MODULES])
def test_double_dual(a, name, M):
    DD = graded_dual(graded_dual(M))
    assert DD.degrees == M.degrees and np.array_equal(DD.act, M.act)
    assert DD.algebra == M.algebra


@pytest.mark.parametrize("name", ["A1", "A2", "B1", "C1", "K6", "C2"])
def test_dual_of_regular_is_injective(name):
    A = CAT.algebras[name]
    from cograde.graded import dual_regular

    assert injdim(dual_regular(A)) == 0


def test_opposite_and_enveloping():
    A2 = CAT.algebras["A2"]
    assert opposite(opposite(A2)) == A2
    E = enveloping(A2)
    assert E.dim == A2.dim**2 and validate(E) == []
    assert E.__dict__["base"] is A2


def test_direct_sum_submodule_quotient():
    A1 = regular_module(CAT.algebras["A1"])
    S = CAT.modules["A1"]["S"]
    M = direct_sum(A1, shift(S, (-1,)))
    assert M.dim == 3 and validate(M) == []
    # the socle x is a submodule; the quotient is S
    K = np.array([[0], [1], [0]])
    sub = submodule(M, K)
    Q, proj, section = quotient(M, K)
    assert sub.dim == 1 and Q.dim == 2
    assert validate(sub) == [] and validate(Q) == []
    GradedMap(M, Q, proj)
    assert np.array_equal(la.matmul(proj, section, 7), np.eye(2, dtype=np.int64))


def test_free_module_and_generators():
    A2 = CAT.algebras["A2"]
    F = free_module(A2, [(0, 0), (1, 1)])
    assert F.free_gens == ((0, 0), (1, 1)) and F.dim == 8
    assert F.dims_by_degree()[(1, 1)] == 2


def test_make_module_derives_products():
    A2 = CAT.algebras["A2"]
    # only x and y listed: xy must act as x composed with y
    basis = [("1", (0, 0)), ("x", (1, 0)), ("y", (0, 1)), ("xy", (1, 1))]
    acts = {("x", "1"): {"x": 1}, ("x", "y"): {"xy": 1}, ("y", "1"): {"y": 1}, ("y", "x"): {"xy": 1}}
    M = make_module(A2, basis, acts)
    assert np.array_equal(M.act, regular_module(A2).act)


def test_group_algebra_and_trivial_module():
    L = FgAbGroup(0, (2, 2))
    A = group_algebra(L, Field(3))
    assert A.dim == 4 and validate(A) == []
    k = trivial_module(A)
    assert k.dim == 1 and validate(k) == []
    Ag = group_algebra(L, Field(3), graded=True)
    assert Ag.group == L and validate(Ag) == []


def test_field_algebra():
    k = field_algebra(F7, ZZ)
    assert k.dim == 1 and validate(k) == []


# smash products

FINITE = [(a, n, M) for a, n, M in ALL_MODULES if CAT.algebras[a].group.is_finite and a != "C2u"]


@pytest.mark.parametrize("a,name,M", FINITE, ids=[f"{a}/{n}" for a, n, _ in FINITE])
def test_smash_round_trip(a, name, M):
    sp = smash_product(CAT.algebras[a])
    assert validate(sp.algebra) == []
    X = sp.to_smash(M)
    assert validate(X) == []
    back = sp.from_smash(X)
    assert back.degrees == M.degrees and np.array_equal(back.act, M.act)


@pytest.mark.parametrize("a", ["K6", "B1", "C1", "C2"])
def test_smash_hom_identity_with_orbit_sum(a):
    sp = smash_product(CAT.algebras[a])
    mods = list(CAT.modules[a].values())
    for M, N in itertools.product(mods, mods):
        total = sum(len(hom_graded(M, shift(N, g))) for g in sp.elements)
        assert len(hom_graded(sp.to_smash(M), sp.orbit_sum(N))) == total
        # plain equivalence: degree-preserving maps only
        assert len(hom_graded(sp.to_smash(M), sp.to_smash(N))) == len(hom_graded(M, N))


def test_smash_identity_without_orbit_sum_fails_on_c1():
    """Summing over shifts on one side only is not what the plain translation computes."""
    sp = smash_product(CAT.algebras["C1"])
    C1 = CAT.modules["C1"]["C1"]
    plain = len(hom_graded(sp.to_smash(C1), sp.to_smash(C1)))
    summed = sum(len(hom_graded(C1, shift(C1, g))) for g in sp.elements)
    assert (plain, summed) == (1, 2)


def test_smash_needs_finite_group():
    with pytest.raises(ValueError):
        smash_product(CAT.algebras["A1"])


@given(st.sampled_from(["K6", "B1", "C1"]), st.integers(0, 2))
def test_ext_over_smash_matches_graded(a, i):
    sp = smash_product(CAT.algebras[a])
    mods = list(CAT.modules[a].values())
    for M in mods:
        for N in mods:
            assert ext(sp.to_smash(M), sp.to_smash(N), i) == ext(M, N, i)
            assert ext(sp.to_smash(M), sp.orbit_sum(N), i) == sum(ext_enriched(M, N, i).values())


def test_module_over_wrong_algebra():
    with pytest.raises(ValueError):
        GradedMap(CAT.modules["A1"]["S"], CAT.modules["B1"]["S_B"], np.zeros((1, 1)))
    assert isinstance(CAT.modules["A1"]["S"], GradedModule)
