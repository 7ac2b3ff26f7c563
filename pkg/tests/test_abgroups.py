import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cograde.abgroups import (
    TRIVIAL,
    CosetSupport,
    DimValue,
    FgAbGroup,
    FiniteSupport,
    GroupMorphism,
    MalformedMorphism,
    Z,
    fiber,
    is_phi_finite,
    kernel,
    pd_trivial_module,
    smith_normal_form,
    snf_diagonal,
    trivial_module_resolution,
)
from cograde.linalg import Field

groups = st.tuples(st.integers(0, 2), st.lists(st.integers(2, 5), max_size=2)).map(lambda a: FgAbGroup(a[0], tuple(a[1])))


@st.composite
def morphisms(draw, source=None, target=None):
    G = source if source is not None else draw(groups)
    H = target if target is not None else draw(groups)
    rows = []
    for i in range(H.ngens):
        row = []
        for j in range(G.ngens):
            if j >= G.free_rank and i < H.free_rank:
                row.append(0)  # torsion cannot map to the free part
            elif j >= G.free_rank:
                n = G.torsion[j - G.free_rank]
                m = H.torsion[i - H.free_rank]
                # image of an order-n generator must have order dividing n
                step = m // math.gcd(n, m)
                row.append(step * draw(st.integers(0, m)))
            else:
                row.append(draw(st.integers(-3, 3)))
        rows.append(tuple(row))
    return GroupMorphism(G, H, tuple(rows))


def test_parse_and_str():
    for text, G in [("Z", Z), ("0", TRIVIAL), ("Z^2 x Z/6", FgAbGroup(2, (6,))), ("Z/2 x Z/3", FgAbGroup(0, (2, 3)))]:
        assert FgAbGroup.parse(text) == G
        assert FgAbGroup.parse(str(G)) == G
    with pytest.raises(ValueError):
        FgAbGroup.parse("Q")
    with pytest.raises(ValueError):
        FgAbGroup(0, (1,))


def test_group_arithmetic():
    G = FgAbGroup(1, (6,))
    assert G.add((1, 5), (2, 4)) == (3, 3)
    assert G.neg((1, 1)) == (-1, 5)
    assert G.contains((7, 5)) and not G.contains((0, 6)) and not G.contains((1,))
    assert FgAbGroup(0, (2, 3)).order == 6 and Z.order is None
    assert len(FgAbGroup(0, (2, 3)).elements()) == 6


def test_malformed_morphisms():
    with pytest.raises(MalformedMorphism):
        GroupMorphism(Z, Z, ((1, 2),))
    # an order-2 generator cannot go to a generator of Z/3
    with pytest.raises(MalformedMorphism):
        GroupMorphism(FgAbGroup(0, (2,)), FgAbGroup(0, (3,)), ((1,),))
    with pytest.raises(MalformedMorphism):
        GroupMorphism(FgAbGroup(0, (2,)), Z, ((1,),))


@given(st.lists(st.lists(st.integers(-20, 20), min_size=1, max_size=5), min_size=1, max_size=5).filter(lambda m: len({len(r) for r in m}) == 1))
def test_snf_properties(m):
    U, D, V = smith_normal_form(m)
    UmV = [[sum(U[i][k] * sum(m[k][l] * V[l][j] for l in range(len(V))) for k in range(len(m))) for j in range(len(V))] for i in range(len(U))]
    assert UmV == D
    diag = snf_diagonal(D)
    assert all(d >= 0 for d in diag)
    nz = [d for d in diag if d]
    assert diag[: len(nz)] == nz
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


def test_snf_known():
    _, D, _ = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert snf_diagonal(D) == [2, 6, 12]


@given(morphisms(source=FgAbGroup(0, (2, 3)), target=FgAbGroup(0, (6,))))
def test_kernel_matches_enumeration_finite(phi):
    L, emb = kernel(phi)
    brute = {g for g in phi.source.elements() if phi(g) == phi.target.zero}
    image = {emb(l) for l in L.elements()}
    assert image == brute and L.order == len(brute)


@given(morphisms(source=FgAbGroup(2), target=FgAbGroup(1, (2,))))
def test_kernel_of_free_source(phi):
    L, emb = kernel(phi)
    for e in itertools.product(range(-1, 2), repeat=L.ngens):
        assert phi(emb(L.reduce(e))) == phi.target.zero
    # every kernel element in a box is reached by a combination of the generators
    box = [g for g in itertools.product(range(-4, 5), repeat=2) if phi(g) == phi.target.zero]
    gens = [emb(e) for e in [tuple(int(i == j) for j in range(L.ngens)) for i in range(L.ngens)]]
    for g in box:
        assert _in_lattice(g, gens)


def _in_lattice(g, gens):
    from cograde.abgroups import _integer_nullspace

    if not gens:
        return all(x == 0 for x in g)
    # g in span_Z(gens) iff the system sum c_i gens_i = g has an integer solution
    cols = [list(v) for v in gens] + [list(g)]
    m = [[c[i] for c in cols] for i in range(len(g))]
    null = _integer_nullspace(m, len(cols))
    last = 0
    for v in null:
        last = math.gcd(last, v[-1])
    return last == 1


def test_kernels_of_catalog_morphisms():
    Z2, Z6, ZZ = FgAbGroup(0, (2,)), FgAbGroup(0, (6,)), FgAbGroup(2)
    assert kernel(GroupMorphism(Z6, Z2, ((1,),)))[0] == FgAbGroup(0, (3,))
    assert kernel(GroupMorphism(ZZ, Z, ((1, 1),)))[0] == Z
    assert kernel(GroupMorphism(Z, Z2, ((1,),)))[0] == Z
    assert kernel(GroupMorphism.to_trivial(ZZ))[0] == ZZ
    assert kernel(GroupMorphism.identity(Z6))[0] == TRIVIAL


@given(morphisms())
def test_preimage(phi):
    for g in itertools.islice(itertools.product(range(-2, 3), repeat=phi.source.ngens), 20):
        h = phi(phi.source.reduce(g))
        pre = phi.preimage(h)
        assert pre is not None and phi(pre) == h


def test_preimage_outside_image():
    double = GroupMorphism(Z, Z, ((2,),))
    assert double.preimage((3,)) is None
    assert double.preimage((4,)) == (2,)


def test_compose():
    psi = GroupMorphism(FgAbGroup(2), Z, ((1, 1),))
    phi2 = GroupMorphism(Z, FgAbGroup(0, (2,)), ((1,),))
    c = phi2.compose(psi)
    assert c((3, 4)) == (1,)


def test_fiber():
    phi2 = GroupMorphism(Z, FgAbGroup(0, (2,)), ((1,),))
    window = FiniteSupport(Z, [(i,) for i in range(-3, 4)])
    assert fiber(phi2, (1,), window) == {(-3,), (-1,), (1,), (3,)}
    with pytest.raises(ValueError):
        fiber(phi2, (2,), window)


@given(morphisms(source=FgAbGroup(2), target=FgAbGroup(1, (3,))), st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), max_size=2))
def test_phi_finite_matches_rank_criterion(phi, gens):
    """The fibers of ``<gens>`` are infinite iff ``phi`` followed by the free projection loses rank on it.

    The torsion coordinates only cut the kernel down to a finite-index sublattice.
    """
    S = CosetSupport(phi.source, (0, 0), gens)
    r = phi.target.free_rank
    images = [phi(g)[:r] for g in gens]
    def rank(rows, width):
        return int(np.linalg.matrix_rank(np.array(rows, dtype=float).reshape(len(rows), width))) if rows and width else 0

    assert is_phi_finite(S, phi) == (rank(images, r) == rank(gens, 2))


@pytest.mark.parametrize(
    "group,p,expected",
    [
        (TRIVIAL, 7, DimValue.finite(0)),
        (Z, 7, DimValue.finite(1)),
        (FgAbGroup(3), 2, DimValue.finite(3)),
        (FgAbGroup(0, (3,)), 7, DimValue.finite(0)),
        (FgAbGroup(0, (2,)), 2, DimValue.infinite()),
        (FgAbGroup(0, (6,)), 3, DimValue.infinite()),
        (FgAbGroup(0, (6,)), 5, DimValue.finite(0)),
    ],
)
def test_pd_trivial_module(group, p, expected):
    assert pd_trivial_module(group, Field(p)) == expected


def test_finite_group_resolution_char_p_is_periodic():
    res = trivial_module_resolution(FgAbGroup(0, (3,)), Field(3), 5)
    assert res.truncated and res.length == 5 and res.ranks == [1] * 6


def test_mixed_group_rejected():
    with pytest.raises(ValueError):
        trivial_module_resolution(FgAbGroup(1, (2,)), Field(3), 2)


def test_dimvalue():
    assert DimValue.finite(3) == 3 and DimValue.exceeds(8) != 8
    assert str(DimValue.exceeds(8)) == ">8" and str(DimValue.neginf()) == "-inf"
    assert DimValue.finite(2).to_json() == 2 and DimValue.infinite().to_json() == "inf"
