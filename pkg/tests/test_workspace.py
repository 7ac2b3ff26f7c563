from pathlib import Path

import numpy as np
import pytest

from cograde.catalog import catalog, catalog_workspaces
from cograde.workspace import ParseError, dumps, load, parse

ROOT = Path(__file__).resolve().parents[1]
CAT = catalog()

A1_TEXT = """\
[field] char = 7
[group Z] Z
[algebra A1 over Z]
  basis = 1:(0), x:(1)
  unit = 1
  mult = { x*x=0 }
[module S over A1] basis = s:(0) ; act = { x*s=0 }
"""


@pytest.mark.parametrize("key", ["gf7", "gf2"])
def test_catalog_round_trip(key):
    ws = catalog_workspaces()[key]
    text = dumps(ws)
    back = parse(text)
    assert back == ws
    assert dumps(back) == text


@pytest.mark.parametrize("key", ["gf7", "gf2"])
def test_shipped_inputs_match_catalog(key):
    assert load(ROOT / "inputs" / f"catalog_{key}.cg") == catalog_workspaces()[key]


def test_small_input_file():
    ws = load(ROOT / "inputs" / "a1.cg")
    assert np.array_equal(ws.modules["A1"].act, CAT.modules["A1"]["A1"].act)
    assert ws.modules["S"].same_as(CAT.modules["A1"]["S"])


def test_comments_and_continuation_lines():
    ws = parse("# leading comment\n" + A1_TEXT.replace("unit = 1", "unit = 1  # the unit"))
    assert ws.algebras["A1"].labels == ("1", "x")


def test_bracketed_module_name():
    ws = parse(A1_TEXT + "[module S[1] over A1] basis = s:(-1) ; act = { }\n")
    assert ws.modules["S[1]"].degrees == ((-1,),)


def test_degree_mismatch_names_the_triple():
    bad = A1_TEXT.replace("mult = { x*x=0 }", "mult = { x*x=x }")
    with pytest.raises(ParseError) as err:
        parse(bad)
    assert err.value.line == 3
    assert "('x', 'x', 'x')" in str(err.value) and "expected (2,)" in str(err.value)


@pytest.mark.parametrize(
    "text,line,fragment",
    [
        ("[field] char = 7\n[group Z] Z\n[module M over B] basis = m:(0)\n", 3, "unresolved reference to algebra 'B'"),
        ("stray\n", 1, "before the first"),
        (A1_TEXT + "[module S over A1] basis = s:(1)\n", 8, "duplicate name 'S'"),
        (A1_TEXT + "[module T over A1] basis = t:(0,1)\n", 8, "coordinates"),
        (A1_TEXT + "[module T over A1] basis = t:(0) ; act = { y*t=t }\n", 8, "unknown label 'y'"),
        (A1_TEXT + "[module T over A1] basis = t:(0) ; colour = red\n", 8, "unknown field"),
        ("[group Z] Z\n[algebra A over Z] basis = 1:(0) ; unit = 1\n", 2, "[field] must come before"),
        (A1_TEXT + "[complex C over A1] terms = { 0: S, 1: S } ; diff = { 0: [[1, 1]] }\n", 8, "shape"),
        (A1_TEXT + "[widget W over A1]\n", 8, "unknown section kind"),
    ],
    ids=["unresolved", "stray", "duplicate", "arity", "label", "field", "order", "shape", "kind"],
)
def test_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.line == line
    assert fragment in str(err.value)


def test_namespaces_are_per_kind():
    """An algebra and a module may share a name; two modules may not."""
    ws = parse(A1_TEXT + "[module A1 over A1] basis = 1:(0), x:(1) ; act = { x*1=x }\n")
    assert "A1" in ws.algebras and "A1" in ws.modules


def test_bimodule_complex():
    text = A1_TEXT + (
        "[bimodule Se over A1] basis = s:(0) ; left = { x*s=0 } ; right = { s*x=0 }\n"
        "[complex R over A1^e] terms = { 0: Se }\n"
    )
    ws = parse(text)
    R = ws.complexes["R"]
    assert R.base == ws.algebras["A1"] and R.term(0).dim == 1
    assert dumps(parse(dumps(ws))) == dumps(ws)
