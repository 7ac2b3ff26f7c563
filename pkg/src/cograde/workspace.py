"""Line-oriented text format for fields, groups, morphisms, algebras, modules and complexes.

Each entity starts with a bracketed header; its body runs until the next
header.  Fields are separated by ``;`` or by line breaks outside brackets,
and ``#`` starts a comment::

    [field] char = 7
    [group G] Z^1
    [group H] Z/2
    [morphism phi : G -> H] matrix = [[1]]
    [algebra A over G] basis = e:(0), x:(1) ; unit = e ; mult = { x*x=0 }
    [module M over A] basis = m:(0), n:(1) ; act = { x*m=n }
    [bimodule B over A] basis = e:(0), x:(1) ; left = { x*e=x } ; right = { e*x=x }
    [complex R over A^e] terms = { 0: B } ; diff = { }

Products and actions that are not listed are 0, except that the unit acts
as the identity and actions of products of listed generators are derived.
Right-hand sides are sums of ``[coeff ]label`` terms.  Complex
differentials are integer matrices ``diff = { n: [[...]] }`` from position
``n`` to ``n + 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from dataclasses import field as _field

import numpy as np

from .abgroups import FgAbGroup, GroupMorphism
from .complexes import Complex
from .graded import (
    GradedAlgebra,
    GradedModule,
    ValidationError,
    bimodule,
    enveloping,
    make_algebra,
    make_module,
    opposite,
)
from .linalg import Field

__all__ = ["ParseError", "Workspace", "parse", "dumps", "load"]


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


@dataclass
class Workspace:
    field: Field | None = None
    groups: dict = _field(default_factory=dict)
    morphisms: dict = _field(default_factory=dict)
    algebras: dict = _field(default_factory=dict)
    modules: dict = _field(default_factory=dict)
    bimodules: dict = _field(default_factory=dict)
    complexes: dict = _field(default_factory=dict)

    def group_name(self, G: FgAbGroup) -> str:
        for name, H in self.groups.items():
            if H == G:
                return name
        raise KeyError(f"no group named for {G}")

    def algebra_name(self, A: GradedAlgebra) -> str:
        for name, B in self.algebras.items():
            if B == A:
                return name
        raise KeyError(f"no algebra named for {A!r}")

    def module(self, name: str) -> GradedModule:
        if name in self.modules:
            return self.modules[name]
        raise KeyError(f"unknown module {name!r} (known: {', '.join(sorted(self.modules)) or 'none'})")

    def morphism(self, name: str) -> GroupMorphism:
        if name in self.morphisms:
            return self.morphisms[name]
        raise KeyError(f"unknown morphism {name!r} (known: {', '.join(sorted(self.morphisms)) or 'none'})")

    def complex(self, name: str) -> Complex:
        if name in self.complexes:
            return self.complexes[name]
        raise KeyError(f"unknown complex {name!r} (known: {', '.join(sorted(self.complexes)) or 'none'})")

    def __eq__(self, other):
        if not isinstance(other, Workspace):
            return NotImplemented
        return _signature(self) == _signature(other)


def _signature(ws: Workspace):
    def mods(d):
        return {n: (M.key, M.labels) for n, M in d.items()}

    def cplx(X: Complex):
        return (
            X.algebra.key,
            tuple((n, X.terms[n].key) for n in X.positions),
            tuple((n, X.diffs[n].tobytes(), X.diffs[n].shape) for n in sorted(X.diffs)),
        )

    return (
        ws.field,
        ws.groups,
        {n: (f.source, f.target, f.matrix) for n, f in ws.morphisms.items()},
        {n: (A.key, A.name) for n, A in ws.algebras.items()},
        mods(ws.modules),
        mods(ws.bimodules),
        {n: cplx(X) for n, X in ws.complexes.items()},
    )


# ---------------------------------------------------------------------------
# parsing

_NAME = r"[A-Za-z_][A-Za-z0-9_()\[\]\-+.']*"


def _header(line: str):
    """``(header, rest)`` for a line starting with a balanced ``[...]``, else ``None``."""
    if not line.startswith("["):
        return None
    depth = 0
    for i, ch in enumerate(line):
        depth += ch == "["
        depth -= ch == "]"
        if depth == 0:
            return line[1:i].strip(), line[i + 1 :].strip()
    return None


def _split_top(text: str, sep: str) -> list:
    """Split on ``sep`` outside brackets and braces."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out if s.strip()]


def _fields(body: str, line: int, allowed: set) -> dict:
    out = {}
    for part in _split_top(body, ";"):
        if "=" not in part:
            raise ParseError(line, f"expected 'key = value', got {part!r}")
        k, v = part.split("=", 1)
        k = k.strip()
        if k not in allowed:
            raise ParseError(line, f"unknown field {k!r} (expected one of {', '.join(sorted(allowed))})")
        if k in out:
            raise ParseError(line, f"field {k!r} given twice")
        out[k] = v.strip()
    return out


def _braced(text: str, line: int) -> list:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError(line, f"expected {{ ... }}, got {text!r}")
    return _split_top(text[1:-1], ",")


def _degree(text: str, G: FgAbGroup, line: int):
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise ParseError(line, f"degree must be written (a,b,...), got {text!r}")
    inner = text[1:-1].strip()
    coords = [int(c) for c in inner.split(",")] if inner else []
    if len(coords) != G.ngens:
        raise ParseError(line, f"degree {text} has {len(coords)} coordinates, group {G} needs {G.ngens}")
    return G.reduce(coords)


def _basis(text: str, G: FgAbGroup, line: int) -> list:
    out = []
    for item in _split_top(text, ","):
        if ":" not in item:
            raise ParseError(line, f"basis entry must be label:(degree), got {item!r}")
        lab, deg = item.split(":", 1)
        lab = lab.strip()
        if not re.fullmatch(r"\w+", lab):
            raise ParseError(line, f"basis label {lab!r} must be letters, digits or _")
        out.append((lab, _degree(deg, G, line)))
    return out


def _combination(text: str, labels: set, line: int) -> dict:
    text = text.strip()
    if text == "0" and "0" not in labels:
        return {}
    out: dict = {}
    for sign, term in re.findall(r"([+-]?)\s*([^+-]+)", text):
        parts = term.split()
        if len(parts) == 1:
            coeff, lab = 1, parts[0]
        elif len(parts) == 2:
            try:
                coeff = int(parts[0])
            except ValueError:
                raise ParseError(line, f"bad coefficient in {term!r}") from None
            lab = parts[1]
        else:
            raise ParseError(line, f"cannot read term {term!r}")
        if lab not in labels:
            raise ParseError(line, f"unknown basis label {lab!r}")
        if sign == "-":
            coeff = -coeff
        out[lab] = out.get(lab, 0) + coeff
    return out


def _products(text: str, left: set, right: set, result: set, line: int) -> dict:
    out = {}
    for item in _braced(text, line):
        if "=" not in item or "*" not in item.split("=", 1)[0]:
            raise ParseError(line, f"expected a*b=..., got {item!r}")
        lhs, rhs = item.split("=", 1)
        a, b = (s.strip() for s in lhs.split("*", 1))
        if a not in left:
            raise ParseError(line, f"unknown label {a!r}")
        if b not in right:
            raise ParseError(line, f"unknown label {b!r}")
        out[(a, b)] = _combination(rhs, result, line)
    return out


def _matrix(text: str, line: int) -> np.ndarray:
    import ast

    try:
        data = ast.literal_eval(text.strip())
    except (ValueError, SyntaxError):
        raise ParseError(line, f"cannot read matrix {text!r}") from None
    return np.asarray(data, dtype=np.int64)


def _positions(text: str, line: int) -> list:
    out = []
    for item in _braced(text, line):
        if ":" not in item:
            raise ParseError(line, f"expected position: value, got {item!r}")
        n, v = item.split(":", 1)
        try:
            out.append((int(n), v.strip()))
        except ValueError:
            raise ParseError(line, f"bad position {n!r}") from None
    return out


def parse(text: str) -> Workspace:
    """Parse and validate a workspace; the first problem is reported with its line."""
    sections = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        head = _header(line.strip())
        if head:
            sections.append([lineno, *head])
        elif sections:
            # a new line ends a field unless a bracket is still open
            body = sections[-1][2]
            open_ = sum(body.count(c) for c in "([{") - sum(body.count(c) for c in ")]}")
            sections[-1][2] = body + (" " if open_ or not body else " ; ") + line.strip()
        else:
            raise ParseError(lineno, "text before the first [section]")
    ws = Workspace()
    for lineno, header, body in sections:
        try:
            _section(ws, lineno, header, body)
        except ParseError:
            raise
        except ValidationError as e:
            raise ParseError(lineno, f"validation failed: {e}") from e
        except (ValueError, KeyError) as e:
            raise ParseError(lineno, str(e)) from e
    return ws


def _declare(pool: dict, name: str, line: int):
    # each kind of entity has its own namespace
    if not re.fullmatch(_NAME, name):
        raise ParseError(line, f"bad name {name!r}")
    if name in pool:
        raise ParseError(line, f"duplicate name {name!r}")


def _lookup(d: dict, name: str, kind: str, line: int):
    if name not in d:
        raise ParseError(line, f"unresolved reference to {kind} {name!r}")
    return d[name]


def _section(ws: Workspace, line: int, header: str, body: str):
    words = header.split()
    kind = words[0] if words else ""
    if kind == "field":
        f = _fields(body, line, {"char"})
        if ws.field is not None:
            raise ParseError(line, "field declared twice")
        ws.field = Field(int(f["char"]))
        return
    if kind == "group":
        if len(words) != 2:
            raise ParseError(line, "expected [group NAME]")
        _declare(ws.groups, words[1], line)
        ws.groups[words[1]] = FgAbGroup.parse(body)
        return
    if kind == "morphism":
        m = re.fullmatch(r"morphism\s+(\S+)\s*:\s*(\S+)\s*->\s*(\S+)", header)
        if not m:
            raise ParseError(line, "expected [morphism NAME : SOURCE -> TARGET]")
        name, s, t = m.groups()
        _declare(ws.morphisms, name, line)
        G, H = _lookup(ws.groups, s, "group", line), _lookup(ws.groups, t, "group", line)
        f = _fields(body, line, {"matrix"})
        mat = _matrix(f.get("matrix", "[]"), line).reshape(H.ngens, G.ngens)
        ws.morphisms[name] = GroupMorphism(G, H, tuple(map(tuple, mat.tolist())))
        return
    if ws.field is None:
        raise ParseError(line, "[field] must come before algebras, modules and complexes")
    m = re.fullmatch(r"(\w+)\s+(\S+)\s+over\s+(\S+)", header)
    if not m:
        raise ParseError(line, f"cannot read section header [{header}]")
    kind, name, over = m.groups()
    pools = {"algebra": ws.algebras, "module": ws.modules, "bimodule": ws.bimodules, "complex": ws.complexes}
    if kind not in pools:
        raise ParseError(line, f"unknown section kind {kind!r}")
    _declare(pools[kind], name, line)
    if kind == "algebra":
        G = _lookup(ws.groups, over, "group", line)
        f = _fields(body, line, {"basis", "unit", "mult"})
        basis = _basis(f.get("basis", ""), G, line)
        labels = {lab for lab, _ in basis}
        prods = _products(f.get("mult", "{}"), labels, labels, labels, line)
        if "unit" not in f:
            raise ParseError(line, "algebra needs a unit")
        ws.algebras[name] = make_algebra(ws.field, G, basis, f["unit"], prods, name=name)
    elif kind == "module":
        A = _lookup(ws.algebras, over, "algebra", line)
        f = _fields(body, line, {"basis", "act"})
        basis = _basis(f.get("basis", ""), A.group, line)
        labels = {lab for lab, _ in basis}
        acts = _products(f.get("act", "{}"), set(A.labels), labels, labels, line)
        ws.modules[name] = make_module(A, basis, acts, name=name)
    elif kind == "bimodule":
        A = _lookup(ws.algebras, over, "algebra", line)
        f = _fields(body, line, {"basis", "left", "right"})
        basis = _basis(f.get("basis", ""), A.group, line)
        labels = {lab for lab, _ in basis}
        left = make_module(A, basis, _products(f.get("left", "{}"), set(A.labels), labels, labels, line))
        right_raw = _products(f.get("right", "{}"), labels, set(A.labels), labels, line)
        right = make_module(opposite(A), basis, {(a, m): v for (m, a), v in right_raw.items()})
        ws.bimodules[name] = bimodule(
            A, left.degrees, left.act, right.act, tuple(lab for lab, _ in basis), name
        )
    elif kind == "complex":
        bimod = over.endswith("^e")
        A = _lookup(ws.algebras, over[:-2] if bimod else over, "algebra", line)
        pool = ws.bimodules if bimod else ws.modules
        f = _fields(body, line, {"terms", "diff"})
        terms = {n: _lookup(pool, v, "bimodule" if bimod else "module", line) for n, v in _positions(f.get("terms", "{}"), line)}
        diffs = {n: _matrix(v, line) for n, v in _positions(f.get("diff", "{}"), line)}
        alg = enveloping(A) if bimod else A
        for n, d in diffs.items():
            rows = terms[n + 1].dim if n + 1 in terms else 0
            cols = terms[n].dim if n in terms else 0
            if d.size == 0:
                diffs[n] = np.zeros((rows, cols), dtype=np.int64)
            elif d.shape != (rows, cols):
                raise ParseError(line, f"differential at {n} has shape {d.shape}, expected {(rows, cols)}")
        ws.complexes[name] = Complex(alg, terms, diffs, base=A if bimod else None)
    else:
        raise ParseError(line, f"unknown section kind {kind!r}")


def load(path) -> Workspace:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# ---------------------------------------------------------------------------
# printing

def _fmt_deg(g) -> str:
    return "(" + ",".join(str(c) for c in g) + ")"


def _fmt_comb(col: np.ndarray, labels) -> str:
    terms = []
    for i in np.flatnonzero(col):
        c = int(col[i])
        terms.append(labels[i] if c == 1 else f"{c} {labels[i]}")
    return " + ".join(terms) if terms else "0"


def _fmt_basis(labels, degrees) -> str:
    return ", ".join(f"{lab}:{_fmt_deg(d)}" for lab, d in zip(labels, degrees))


def _fmt_matrix(m: np.ndarray) -> str:
    return "[" + ", ".join("[" + ", ".join(str(int(x)) for x in row) + "]" for row in m) + "]"


def _fmt_actions(act, alg_labels, skip: int, labels, flip: bool = False) -> str:
    items = []
    for t, a in enumerate(alg_labels):
        if t == skip:
            continue
        for j, m in enumerate(labels):
            col = act[t][:, j]
            if col.any():
                lhs = f"{m}*{a}" if flip else f"{a}*{m}"
                items.append(f"{lhs}={_fmt_comb(col, labels)}")
    return "{ " + ", ".join(items) + " }" if items else "{ }"


def dumps(ws: Workspace) -> str:
    """Text form with every nonzero product and action listed."""
    out = []
    if ws.field is not None:
        out.append(f"[field] char = {ws.field.p}")
    for name, G in ws.groups.items():
        out.append(f"[group {name}] {G}")
    for name, f in ws.morphisms.items():
        out.append(
            f"[morphism {name} : {ws.group_name(f.source)} -> {ws.group_name(f.target)}] "
            f"matrix = {_fmt_matrix(np.asarray(f.matrix, dtype=np.int64).reshape(f.target.ngens, f.source.ngens))}"
        )
    for name, A in ws.algebras.items():
        items = []
        for i, a in enumerate(A.labels):
            for j, b in enumerate(A.labels):
                if A.unit in (i, j):
                    continue
                col = A.mult[i, j]
                if col.any():
                    items.append(f"{a}*{b}={_fmt_comb(col, A.labels)}")
        mult = "{ " + ", ".join(items) + " }" if items else "{ }"
        out.append(
            f"[algebra {name} over {ws.group_name(A.group)}] basis = {_fmt_basis(A.labels, A.degrees)} ; "
            f"unit = {A.labels[A.unit]} ; mult = {mult}"
        )
    for name, M in ws.modules.items():
        A = M.algebra
        out.append(
            f"[module {name} over {ws.algebra_name(A)}] basis = {_fmt_basis(M.labels, M.degrees)} ; "
            f"act = {_fmt_actions(M.act, A.labels, A.unit, M.labels)}"
        )
    for name, B in ws.bimodules.items():
        A = B.algebra.__dict__["base"]
        n, u = A.dim, A.unit
        left = B.act[[i * n + u for i in range(n)]]
        right = B.act[[u * n + j for j in range(n)]]
        out.append(
            f"[bimodule {name} over {ws.algebra_name(A)}] basis = {_fmt_basis(B.labels, B.degrees)} ; "
            f"left = {_fmt_actions(left, A.labels, u, B.labels)} ; "
            f"right = {_fmt_actions(right, A.labels, u, B.labels, flip=True)}"
        )
    for name, X in ws.complexes.items():
        pool = ws.bimodules if X.base is not None else ws.modules
        over = ws.algebra_name(X.base) + "^e" if X.base is not None else ws.algebra_name(X.algebra)
        tnames = []
        for n in X.positions:
            match = [k for k, M in pool.items() if M.same_as(X.terms[n])]
            if not match:
                raise KeyError(f"term {n} of complex {name} is not a named module")
            tnames.append(f"{n}: {match[0]}")
        diffs = [f"{n}: {_fmt_matrix(X.diffs[n])}" for n in sorted(X.diffs)]
        out.append(
            f"[complex {name} over {over}] terms = {{ {', '.join(tnames)} }} ; diff = {{ {', '.join(diffs)} }}"
        )
    return "\n".join(out) + "\n"
