from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import random_hom, random_module

from cograde import linalg as la
from cograde.abgroups import DimValue
from cograde.catalog import catalog
from cograde.complexes import (
    Complex,
    check_dualizing,
    cohomology,
    cohomology_dims,
    complex_injdim,
    complex_projdim,
    derived_hom,
    dual_complex,
    free_resolution_of_complex,
    hom_complex,
    nat_map,
    push_complex,
    restrict,
    shift_positions,
    verify_lemma46,
    verify_lemma47,
    zero_module,
)
from cograde.graded import opposite, regular_module, shift, validate
from cograde.homalg import ext_enriched, hom_enriched, injdim, projdim

CAT = catalog()
A1 = CAT.algebras["A1"]
A1m = regular_module(A1)
X_RIGHT = np.array([[0, 0], [1, 0]])


def _x_complex():
    """``A1 --x--> A1[1]``: kernel is the socle, cokernel is the top of ``A1[1]``."""
    return Complex(A1, {0: A1m, 1: shift(A1m, (1,))}, {0: X_RIGHT})


def test_cohomology_of_multiplication_by_x():
    X = _x_complex()
    assert cohomology_dims(X, 0) == {(1,): 1}
    assert cohomology_dims(X, 1) == {(-1,): 1}
    for n in (0, 1):
        H = cohomology(X, n)
        assert validate(H) == [] and H.dims_by_degree() == cohomology_dims(X, n)
    assert X.cohomology_positions() == [0, 1]


def test_complex_validation():
    with pytest.raises(ValueError, match="shape"):
        Complex(A1, {0: A1m, 1: A1m}, {0: np.zeros((1, 2), dtype=np.int64)})
    with pytest.raises(ValueError, match="!= 0"):
        A1s = shift(A1m, (1,))
        Complex(A1, {0: A1m, 1: A1s, 2: A1s}, {0: X_RIGHT, 1: np.eye(2, dtype=np.int64)})
    with pytest.raises(ValueError):
        Complex(A1, {0: CAT.modules["B1"]["S_B"]})


def test_shift_positions():
    X = _x_complex()
    Y = shift_positions(X, 3)
    assert Y.positions == [-3, -2]
    assert cohomology_dims(Y, -3) == cohomology_dims(X, 0)
    assert np.array_equal(Y.diff(-3), (-X_RIGHT) % 7)
    assert Y.dd_is_zero()


@given(st.sampled_from(["A1", "A2", "B1", "C1"]), st.integers(0, 2**32 - 1), st.booleans())
def test_hom_complex_is_a_complex(a, seed, signed_source):
    """Signed HOM of two-term complexes built from random maps squares to zero."""
    rng = np.random.default_rng(seed)
    M, N = random_module(a, rng), random_module(a, rng)
    f = random_hom(M, N, rng)
    if f is None:
        f = np.zeros((N.dim, M.dim), dtype=np.int64)
    X = Complex(M.algebra, {0: M, 1: N}, {0: f})
    Y = Complex.single(N) if signed_source else X
    H = hom_complex(X, Y)
    assert H.complex.dd_is_zero()
    # coordinates round-trip through families of maps
    for n in H.complex.positions:
        v = rng.integers(0, M.p, H.complex.term(n).dim)
        assert np.array_equal(H.coords(n, H.maps(n, v)) % M.p, v)


def test_unsigned_hom_fails_on_stored_counterexample():
    from cograde.workspace import load

    ws = load(Path(__file__).parent / "data" / "unsigned_counterexample.cg")
    X = ws.complexes["cone_id"]
    assert hom_complex(X, X).complex.dd_is_zero()
    assert not hom_complex(X, X, signed=False).complex.dd_is_zero()


@pytest.mark.parametrize("a", ["A1", "B1", "C1"])
def test_hom_complex_of_single_modules(a):
    for M in CAT.modules[a].values():
        for N in CAT.modules[a].values():
            H = hom_complex(Complex.single(M), Complex.single(N)).complex
            assert sum(cohomology_dims(H, 0).values()) == sum(hom_enriched(M, N).values())


def test_derived_hom_computes_ext():
    S = CAT.modules["A1"]["S"]
    H = derived_hom(Complex.single(S), Complex.single(S), depth=5).complex
    for i in range(4):
        assert sum(cohomology_dims(H, i).values()) == sum(ext_enriched(S, S, i).values())


@pytest.mark.parametrize("name", ["R_A1", "R_DA1", "R_S"])
def test_free_resolution_of_complex(name):
    X = restrict(CAT.complexes[name], "left")
    res = free_resolution_of_complex(X, depth=4)
    assert res.certificate.valid, res.certificate.failures()
    for n in res.free.positions:
        assert res.free.term(n).free_gens is not None
    assert res.free.dd_is_zero()
    # the projection is a chain map
    p = X.p
    for n in res.free.positions:
        lhs = la.matmul(X.diff(n), res.projection.get(n, np.zeros((X.term(n).dim, res.free.term(n).dim), dtype=np.int64)), p)
        nxt = res.projection.get(n + 1)
        rhs = la.matmul(nxt, res.free.diff(n), p) if nxt is not None else np.zeros_like(lhs)
        assert np.array_equal(lhs, rhs)


@pytest.mark.parametrize("m", ["A1", "S", "D(A1)"])
def test_complex_dimensions_match_modules(m):
    M = CAT.modules["A1"][m]
    X = Complex.single(M)
    assert complex_projdim(X) == projdim(M)
    assert complex_injdim(X) == injdim(M)
    assert complex_projdim(shift_positions(X, 2)) == complex_projdim(X)


def test_zero_complex_dimension():
    assert complex_projdim(Complex(A1, {})) == DimValue.neginf()
    assert Complex.single(zero_module(A1)).term(0).dim == 0


def test_dual_complex_is_involutive():
    X = _x_complex()
    DD = dual_complex(dual_complex(X))
    assert DD.positions == X.positions
    assert np.array_equal(DD.diff(0), X.diff(0))
    assert cohomology_dims(dual_complex(X), -1) == {(1,): 1}


def test_restrict_sides():
    R = CAT.complexes["R_S"]
    left, right = restrict(R, "left"), restrict(R, "right")
    # A1 is commutative, so both sides live over the same algebra
    assert left.algebra == A1 and right.algebra == opposite(A1)
    assert np.array_equal(left.term(0).act, right.term(0).act)
    with pytest.raises(ValueError):
        restrict(R, "middle")
    with pytest.raises(ValueError):
        restrict(_x_complex(), "left")


def test_push_complex_keeps_bimodule_structure():
    R = CAT.complexes["R_DA2"]
    P = push_complex(CAT.morphisms["psi"], R)
    assert P.base is not None and P.base.group == CAT.morphisms["psi"].target
    assert restrict(P, "left").term(0).dim == R.term(0).dim


@pytest.mark.parametrize("name", ["R_A1", "R_DA1", "R_DA2"])
def test_dualizing_candidates(name):
    rep = check_dualizing(CAT.complexes[name], depth=4)
    assert rep.verdict != "fail", rep.lines()


def test_simple_bimodule_is_not_dualizing():
    rep = check_dualizing(CAT.complexes["R_S"], depth=4)
    assert rep.verdict == "fail"
    assert all(c.label.startswith("(3)") for c in rep.checks if c.verdict == "fail")
    assert not nat_map(CAT.complexes["R_S"], "left", 4).is_quasi_iso


@pytest.mark.parametrize("side", ["left", "right"])
def test_nat_map_of_regular_bimodule(side):
    assert nat_map(CAT.complexes["R_A1"], side, 4).is_quasi_iso


@pytest.mark.parametrize("phi,name", [("psi", "R_DA2"), ("eps2", "R_DA2"), ("eps", "R_A1")])
def test_injdim_after_regrading(phi, name):
    rep = verify_lemma46(CAT.morphisms[phi], CAT.complexes[name])
    assert rep.verdict != "fail", rep.lines()


@pytest.mark.parametrize("phi,name", [("psi", "R_DA2"), ("eps", "R_A1")])
def test_regrading_commutes_with_derived_hom(phi, name):
    rep = verify_lemma47(CAT.morphisms[phi], CAT.complexes[name], depth=3)
    assert rep.verdict == "pass", rep.lines()
