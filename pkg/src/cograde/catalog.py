"""Desk-scale algebras, modules and grading-group morphisms used by the checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .abgroups import TRIVIAL, Z, FgAbGroup, GroupMorphism
from .complexes import Complex
from .graded import (
    GradedAlgebra,
    GradedModule,
    bimodule,
    dual_bimodule,
    dual_regular,
    make_algebra,
    make_module,
    regular_bimodule,
    regular_module,
    shift,
)
from .linalg import Field

Z2 = FgAbGroup(0, (2,))
Z6 = FgAbGroup(0, (6,))
ZZ = FgAbGroup(2)


@dataclass
class Catalog:
    algebras: dict = field(default_factory=dict)
    modules: dict = field(default_factory=dict)  # algebra name -> {module name: module}
    morphisms: dict = field(default_factory=dict)
    bimodules: dict = field(default_factory=dict)
    complexes: dict = field(default_factory=dict)  # name -> bimodule complex in position 0

    def morphisms_from(self, G: FgAbGroup) -> dict:
        return {n: phi for n, phi in self.morphisms.items() if phi.source == G}

    def pairs(self):
        """``(algebra, module name, module)`` for every catalog module."""
        for a, mods in self.modules.items():
            for name, M in mods.items():
                yield self.algebras[a], name, M


def _truncated_polynomial(k, group, deg, name) -> GradedAlgebra:
    return make_algebra(k, group, [("1", group.zero), ("x", deg)], "1", {("x", "x"): {}}, name=name)


def _exterior_pair(k) -> GradedAlgebra:
    basis = [("1", (0, 0)), ("x", (1, 0)), ("y", (0, 1)), ("xy", (1, 1))]
    prods = {
        ("x", "x"): {},
        ("y", "y"): {},
        ("x", "y"): {"xy": 1},
        ("y", "x"): {"xy": 1},
        ("x", "xy"): {},
        ("xy", "x"): {},
        ("y", "xy"): {},
        ("xy", "y"): {},
        ("xy", "xy"): {},
    }
    return make_algebra(k, ZZ, basis, "1", prods, name="A2")


def _cyclic_group_algebra(k, n, name) -> GradedAlgebra:
    G = FgAbGroup(0, (n,))
    basis = [(f"g{i}", (i,)) for i in range(n)]
    prods = {(f"g{i}", f"g{j}"): {f"g{(i + j) % n}": 1} for i in range(n) for j in range(n)}
    return make_algebra(k, G, basis, "g0", prods, name=name)


def simple_top(A: GradedAlgebra, name: str) -> GradedModule:
    """One-dimensional module in degree 0 killed by every basis vector except the unit."""
    return make_module(A, [("s", A.group.zero)], {}, name=name)


@lru_cache(maxsize=None)
def catalog() -> Catalog:
    F7, F2 = Field(7), Field(2)
    cat = Catalog()

    A1 = _truncated_polynomial(F7, Z, (1,), "A1")
    A2 = _exterior_pair(F7)
    K6 = _cyclic_group_algebra(F7, 6, "K6")
    B1 = _truncated_polynomial(F7, Z6, (1,), "B1")
    C1 = _truncated_polynomial(F2, Z2, (1,), "C1")
    C2 = _cyclic_group_algebra(F2, 2, "C2")
    for A in (A1, A2, K6, B1, C1, C2):
        cat.algebras[A.name] = A

    def named(M, name):
        return GradedModule(M.algebra, M.degrees, M.act, M.labels, name, M.free_gens, check=False)

    cat.modules["A1"] = {
        "A1": regular_module(A1),
        "S": simple_top(A1, "S"),
        "D(A1)": dual_regular(A1),
    }
    cat.modules["A2"] = {
        "A2": regular_module(A2),
        "k2": simple_top(A2, "k2"),
        "D(A2)": dual_regular(A2),
    }
    cat.modules["K6"] = {
        "K6": regular_module(K6),
        "K6[2]": named(shift(regular_module(K6), (2,)), "K6[2]"),
    }
    cat.modules["B1"] = {
        "B1": regular_module(B1),
        "S_B": simple_top(B1, "S_B"),
        "D(B1)": dual_regular(B1),
    }
    cat.modules["C1"] = {
        "C1": regular_module(C1),
        "kC1": simple_top(C1, "kC1"),
        "D(C1)": dual_regular(C1),
    }
    cat.modules["C2"] = {
        "C2": regular_module(C2),
        "C2[1]": named(shift(regular_module(C2), (1,)), "C2[1]"),
    }

    # C2 with the grading forgotten, and its trivial module (not gradable over Z/2)
    C2u = GradedAlgebra(F2, TRIVIAL, C2.labels, tuple(() for _ in C2.labels), C2.unit, C2.mult, name="C2u", check=False)
    cat.algebras["C2u"] = C2u
    cat.modules["C2u"] = {"trivC2": make_module(C2u, [("n", ())], {("g1", "n"): {"n": 1}}, name="trivC2")}

    def rename(M, name):
        return GradedModule(M.algebra, M.degrees, M.act, M.labels, name, check=False)

    S = cat.modules["A1"]["S"]
    cat.bimodules.update(
        {
            "A1e": rename(regular_bimodule(A1), "A1e"),
            "DA1e": rename(dual_bimodule(A1), "DA1e"),
            "Se": bimodule(A1, S.degrees, S.act, S.act, S.labels, "Se"),
            "DA2e": rename(dual_bimodule(A2), "DA2e"),
        }
    )
    for name, B in cat.bimodules.items():
        base = B.algebra.__dict__["base"]
        cat.complexes["R_" + name[:-1]] = Complex.single(B, 0, base=base)

    cat.morphisms.update(
        {
            "id_Z": GroupMorphism.identity(Z),
            "id_ZZ": GroupMorphism.identity(ZZ),
            "id_Z6": GroupMorphism.identity(Z6),
            "id_Z2": GroupMorphism.identity(Z2),
            "phi2": GroupMorphism(Z, Z2, ((1,),)),
            "eps": GroupMorphism.to_trivial(Z),
            "psi": GroupMorphism(ZZ, Z, ((1, 1),)),
            "eps2": GroupMorphism.to_trivial(ZZ),
            "iota": GroupMorphism(Z6, Z2, ((1,),)),
            "tau": GroupMorphism.to_trivial(Z2),
        }
    )
    return cat


GROUP_NAMES = {"Z": Z, "Z2": Z2, "Z6": Z6, "ZZ": ZZ, "T": TRIVIAL}


def catalog_workspaces() -> dict:
    """The catalog split by characteristic: ``{"gf7": Workspace, "gf2": Workspace}``."""
    from .workspace import Workspace

    cat = catalog()
    out = {}
    for key, p in (("gf7", 7), ("gf2", 2)):
        ws = Workspace(field=Field(p))
        ws.groups = dict(GROUP_NAMES)
        ws.morphisms = dict(cat.morphisms)
        for name, A in cat.algebras.items():
            if A.p != p:
                continue
            ws.algebras[name] = A
            ws.modules.update(cat.modules.get(name, {}))
        for name, B in cat.bimodules.items():
            if B.p == p:
                ws.bimodules[name] = B
        for name, X in cat.complexes.items():
            if X.p == p:
                ws.complexes[name] = X
        out[key] = ws
    return out


__all__ = ["Catalog", "catalog", "catalog_workspaces", "GROUP_NAMES", "simple_top", "Z2", "Z6", "ZZ", "TRIVIAL"]
