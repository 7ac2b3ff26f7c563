"""Command line interface: ``cograde [options] COMMAND [args]``.

Entities are looked up by name in the workspaces given with ``--input``
(the built-in catalog when omitted).  Every command prints a short human
summary; ``--json PATH`` also writes ``{command, inputs, values, verdicts,
cutoff}``.  Exit code 0 when every verdict is pass or consistent-at-cutoff,
1 when some verdict fails, 2 on errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .abgroups import DimValue, FiniteSupport, GroupMorphism, is_phi_finite, kernel
from .catalog import catalog_workspaces
from .cog import (
    InfiniteKernel,
    RegradeContext,
    adj_alpha,
    adj_beta,
    adj_delta,
    adj_gamma,
    pull,
    pull_push_decomposition,
    push,
    push_algebra,
)
from .complexes import check_dualizing, cohomology_dims, verify_thm48
from .graded import GradedModule, ValidationError
from .homalg import (
    DEFAULT_CUTOFF,
    Report,
    check_acyclicity,
    ext_enriched,
    hom_enriched,
    hom_graded,
    injdim,
    projdim,
    sn_resolution,
    verify_prop31,
    verify_thm32,
    verify_thm37,
)
from .workspace import ParseError, Workspace, load

COMMANDS = (
    "validate",
    "info",
    "regrade",
    "hom",
    "ext",
    "projdim",
    "injdim",
    "resolve-sn",
    "check-adjunction",
    "check-thm",
    "check-acyclic",
    "check-dc",
    "check-thm48",
    "report",
)


class UsageError(Exception):
    """Bad command-line input; carries a hint on how to fix it."""


@dataclass
class Result:
    command: str
    inputs: dict
    values: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    lines: list = field(default_factory=list)

    def add_report(self, key: str, rep: Report):
        self.verdicts[key] = rep.verdict
        self.values[key] = rep.to_json()
        self.lines.extend(rep.lines())

    @property
    def failed(self) -> bool:
        return any(v == "fail" for v in self.verdicts.values())

    def to_json(self, cutoff: int) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "values": _jsonable(self.values),
            "verdicts": self.verdicts,
            "cutoff": cutoff,
        }


def _fmt_degree(g) -> str:
    return "(" + ",".join(str(c) for c in g) + ")"


def _jsonable(x):
    if isinstance(x, DimValue):
        return x.to_json()
    if isinstance(x, dict):
        return {(_fmt_degree(k) if isinstance(k, tuple) else str(k)): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


# ---------------------------------------------------------------------------
# workspace lookup

class Registry:
    def __init__(self, workspaces: dict):
        self.workspaces = workspaces

    def _find(self, kind: str, name: str):
        hits = [(k, getattr(ws, kind)[name]) for k, ws in self.workspaces.items() if name in getattr(ws, kind)]
        if not hits:
            known = sorted({n for ws in self.workspaces.values() for n in getattr(ws, kind)})
            raise UsageError(f"unknown {kind[:-1]} {name!r}; known: {', '.join(known) or 'none'}")
        if len(hits) > 1 and kind in ("groups", "morphisms") and all(h[1] == hits[0][1] for h in hits):
            return hits[0]
        if len(hits) > 1:
            raise UsageError(f"{kind[:-1]} {name!r} is defined in several inputs: {', '.join(k for k, _ in hits)}")
        return hits[0]

    def module(self, name: str) -> GradedModule:
        return self._find("modules", name)[1]

    def morphism(self, name: str) -> GroupMorphism:
        return self._find("morphisms", name)[1]

    def complex(self, name: str):
        return self._find("complexes", name)[1]

    def group(self, name: str):
        return self._find("groups", name)[1]

    def workspace_of(self, kind: str, name: str) -> Workspace:
        return self.workspaces[self._find(kind, name)[0]]

    def source_algebra(self, phi: GroupMorphism, N: GradedModule):
        """The algebra ``A`` over ``phi.source`` whose regrading is the algebra of ``N``."""
        for ws in self.workspaces.values():
            for A in ws.algebras.values():
                if A.group == phi.source and A.field == N.field and push_algebra(phi, A) == N.algebra:
                    return A
        raise UsageError("no declared algebra regrades to the algebra of this module along the morphism")


def _context(phi: GroupMorphism, M: GradedModule) -> RegradeContext:
    if M.group != phi.source:
        raise UsageError(f"module is graded by {M.group} but the morphism starts at {phi.source}")
    return RegradeContext(phi, M.algebra)


# ---------------------------------------------------------------------------
# commands

def cmd_validate(reg: Registry, args, res: Result):
    for key, ws in reg.workspaces.items():
        counts = {
            "algebras": len(ws.algebras),
            "modules": len(ws.modules),
            "bimodules": len(ws.bimodules),
            "complexes": len(ws.complexes),
            "morphisms": len(ws.morphisms),
        }
        res.values[key] = counts
        res.lines.append(f"{key}: {ws.field}, " + ", ".join(f"{v} {k}" for k, v in counts.items()))
    res.verdicts["validate"] = "pass"


def cmd_info(reg: Registry, args, res: Result):
    name = args.name
    for kind in ("modules", "algebras", "morphisms", "complexes", "groups"):
        for ws in reg.workspaces.values():
            obj = getattr(ws, kind).get(name)
            if obj is None:
                continue
            info = _describe(kind, obj)
            res.values[name] = info
            res.lines.append(f"{kind[:-1]} {name}")
            res.lines.extend(f"  {k}: {v}" for k, v in info.items())
            return
    raise UsageError(f"nothing named {name!r}")


def _describe(kind: str, obj) -> dict:
    if kind == "modules":
        return {
            "algebra": obj.algebra.name,
            "field": str(obj.field),
            "group": str(obj.group),
            "dim": obj.dim,
            "dims_by_degree": {_fmt_degree(g): d for g, d in sorted(obj.dims_by_degree().items())},
        }
    if kind == "algebras":
        return {"field": str(obj.field), "group": str(obj.group), "dim": obj.dim,
                "degrees": [_fmt_degree(d) for d in obj.degrees]}
    if kind == "morphisms":
        L, _ = kernel(obj)
        return {"source": str(obj.source), "target": str(obj.target), "kernel": str(L),
                "finite_kernel": L.is_finite}
    if kind == "complexes":
        return {"positions": obj.positions,
                "cohomology": {str(n): sum(cohomology_dims(obj, n).values()) for n in obj.positions}}
    return {"group": str(obj), "finite": obj.is_finite}


def cmd_regrade(reg: Registry, args, res: Result):
    phi, M = reg.morphism(args.phi), reg.module(args.module)
    ctx = _context(phi, M)
    P = push(ctx, M)
    res.values["push_dims"] = {_fmt_degree(g): d for g, d in sorted(P.dims_by_degree().items())}
    res.values["phi_finite"] = is_phi_finite(FiniteSupport(M.group, M.support), phi)
    res.lines.append(f"push {M.name}: " + ", ".join(f"{k}:{v}" for k, v in res.values["push_dims"].items()))
    if ctx.finite_kernel:
        PP = pull(ctx, P)
        dec = pull_push_decomposition(ctx, M)
        res.values["pull_push_dim"] = PP.dim
        res.values["kernel_order"] = len(ctx.kernel_elements)
        res.verdicts["decomposition"] = "pass" if dec.is_iso() and PP.dim == len(ctx.kernel_elements) * M.dim else "fail"
        res.lines.append(f"pull push {M.name}: dim {PP.dim} = |L| * {M.dim}: {res.verdicts['decomposition']}")
    else:
        res.lines.append("kernel is infinite: pull-back not computed")


def cmd_hom(reg: Registry, args, res: Result):
    M, N = reg.module(args.source), reg.module(args.target)
    h = hom_enriched(M, N)
    res.values["hom_enriched"] = h
    res.values["hom_degree0"] = len(hom_graded(M, N))
    res.lines.append(f"Hom({M.name}, {N.name}) = {res.values['hom_degree0']}")
    res.lines.append("by shift: " + (", ".join(f"{_fmt_degree(g)}:{d}" for g, d in sorted(h.items())) or "0"))


def cmd_ext(reg: Registry, args, res: Result):
    M, N = reg.module(args.source), reg.module(args.target)
    for i in range(args.degree + 1) if args.all else [args.degree]:
        e = ext_enriched(M, N, i, args.cutoff)
        res.values[f"ext{i}"] = e
        res.lines.append(
            f"Ext^{i}({M.name}, {N.name}[g]): " + (", ".join(f"g={_fmt_degree(g)}:{d}" for g, d in sorted(e.items())) or "0")
        )


def _dimension(reg: Registry, args, res: Result, fn, label: str):
    M = reg.module(args.module)
    if args.group is not None and reg.group(args.group) != M.group:
        raise UsageError(f"{M.name} is graded by {M.group}, not {args.group}")
    target = M
    if args.phi:
        target = push(_context(reg.morphism(args.phi), M), M)
    v = fn(target, args.cutoff)
    res.values[label] = v
    res.lines.append(str(v))


def cmd_projdim(reg, args, res):
    _dimension(reg, args, res, projdim, "projdim")


def cmd_injdim(reg, args, res):
    _dimension(reg, args, res, injdim, "injdim")


def cmd_resolve_sn(reg: Registry, args, res: Result):
    phi, N = reg.morphism(args.phi), reg.module(args.module)
    if N.group == phi.source and phi.source != phi.target:
        # a module over the source algebra is resolved after regrading
        ctx = RegradeContext(phi, N.algebra)
        N = push(ctx, N)
    else:
        ctx = RegradeContext(phi, reg.source_algebra(phi, N))
    r = sn_resolution(ctx, N, args.depth)
    tags = [{"kind": t.kind, "valid": bool(t.verify(T)), "dim": T.dim} for t, T in zip(r.tags, r.terms)]
    res.values.update({"length": r.length, "truncated": r.truncated, "exact": r.exact, "tags": tags})
    ok = r.exact and all(t["valid"] for t in tags)
    res.verdicts["resolve-sn"] = "pass" if ok else "fail"
    res.lines.append(f"length {r.length}, truncated={str(r.truncated).lower()}, exact={str(r.exact).lower()}")
    for i, t in enumerate(tags):
        res.lines.append(f"  term {i}: dim {t['dim']}, {t['kind']} tag {'valid' if t['valid'] else 'INVALID'}")


def _random_map(S: GradedModule, T: GradedModule, rng) -> np.ndarray | None:
    basis = hom_graded(S, T)
    if not len(basis):
        return None
    c = rng.integers(0, S.p, len(basis))
    return np.tensordot(c, basis, axes=(0, 0)) % S.p


def cmd_check_adjunction(reg: Registry, args, res: Result):
    phi, M = reg.morphism(args.phi), reg.module(args.module)
    ctx = _context(phi, M)
    ctx.require_finite_kernel()
    rng = np.random.default_rng(args.seed)
    ws = reg.workspace_of("modules", args.module)
    partners = [N for N in ws.modules.values() if N.algebra == M.algebra]
    trials = ok = 0
    for _ in range(args.samples):
        N = push(ctx, partners[int(rng.integers(len(partners)))])
        f = _random_map(push(ctx, M), N, rng)
        if f is not None:
            trials += 1
            a = adj_alpha(ctx, M, N, f)
            ok += np.array_equal(adj_beta(ctx, M, N, a.matrix).matrix, f)
        g = _random_map(pull(ctx, N), M, rng)
        if g is not None:
            trials += 1
            c = adj_gamma(ctx, N, M, g)
            ok += np.array_equal(adj_delta(ctx, N, M, c.matrix).matrix, g)
    res.values.update({"round_trips": trials, "identities": int(ok)})
    res.verdicts["adjunction"] = "pass" if ok == trials else "fail"
    res.lines.append(f"{ok}/{trials} round trips are identities")


def cmd_check_thm(reg: Registry, args, res: Result):
    phi, M = reg.morphism(args.phi), reg.module(args.module)
    ctx = _context(phi, M)
    fn = {"31": verify_prop31, "32": verify_thm32, "37": verify_thm37}[args.theorem]
    res.add_report(f"thm{args.theorem}", fn(ctx, M, args.cutoff))


def cmd_check_acyclic(reg: Registry, args, res: Result):
    phi, M = reg.morphism(args.phi), reg.module(args.module)
    I = reg.module(args.injective)
    res.add_report("acyclicity", check_acyclicity(_context(phi, M), M, I, args.imax, args.cutoff))


def cmd_check_dc(reg: Registry, args, res: Result):
    R = reg.complex(args.complex)
    res.add_report("dualizing", check_dualizing(R, args.cutoff, args.depth))


def cmd_check_thm48(reg: Registry, args, res: Result):
    phi, R = reg.morphism(args.phi), reg.complex(args.complex)
    factors = tuple(reg.morphism(f) for f in args.factor or ())
    res.add_report("thm48", verify_thm48(phi, R, factors, args.cutoff, args.depth))


def cmd_report(reg: Registry, args, res: Result):
    """Every dimension theorem on every module and morphism, plus the complex checks."""
    for key, ws in reg.workspaces.items():
        for mname, M in ws.modules.items():
            for fname, phi in ws.morphisms.items():
                if phi.source != M.group:
                    continue
                ctx = RegradeContext(phi, M.algebra)
                for tname, fn in (("31", verify_prop31), ("32", verify_thm32), ("37", verify_thm37)):
                    rep = fn(ctx, M, args.cutoff)
                    tag = f"{key}/{mname}/{fname}/thm{tname}"
                    res.verdicts[tag] = rep.verdict
                    res.values[tag] = rep.to_json()
        for cname, R in ws.complexes.items():
            rep = check_dualizing(R, args.cutoff, args.depth)
            res.verdicts[f"{key}/{cname}/dualizing"] = rep.verdict
            res.values[f"{key}/{cname}/dualizing"] = rep.to_json()
    counts: dict = {}
    for v in res.verdicts.values():
        counts[v] = counts.get(v, 0) + 1
    res.lines.append(", ".join(f"{k}: {v}" for k, v in sorted(counts.items())))


HANDLERS = {
    "validate": cmd_validate,
    "info": cmd_info,
    "regrade": cmd_regrade,
    "hom": cmd_hom,
    "ext": cmd_ext,
    "projdim": cmd_projdim,
    "injdim": cmd_injdim,
    "resolve-sn": cmd_resolve_sn,
    "check-adjunction": cmd_check_adjunction,
    "check-thm": cmd_check_thm,
    "check-acyclic": cmd_check_acyclic,
    "check-dc": cmd_check_dc,
    "check-thm48": cmd_check_thm48,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-i", "--input", action="append", help="workspace file (repeatable; default: built-in catalog)")
    common.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF, help="resolution length cutoff")
    common.add_argument("--depth", type=int, default=6, help="depth of truncated resolutions")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized commands")
    common.add_argument("--json", metavar="PATH", help="write the machine-readable report here")

    ap = argparse.ArgumentParser(prog="cograde", description=__doc__.splitlines()[0], parents=[common])
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_):
        return sub.add_parser(name, help=help_, parents=[common])

    add("validate", "load and validate the inputs")
    add("info", "describe a named entity").add_argument("name")
    p = add("regrade", "push a module along a morphism")
    p.add_argument("--phi", required=True)
    p.add_argument("--module", required=True)
    for name in ("hom", "ext"):
        p = add(name, f"graded {name.capitalize()} between two modules, by shift")
        p.add_argument("source")
        p.add_argument("target")
        if name == "ext":
            p.add_argument("-n", "--degree", type=int, default=1)
            p.add_argument("--all", action="store_true", help="every degree up to --degree")
    for name in ("projdim", "injdim"):
        p = add(name, f"graded {name} of a module, optionally after regrading")
        p.add_argument("module")
        p.add_argument("--phi")
        p.add_argument("--group", help="assert the grading group")
    p = add("resolve-sn", "resolution of a regraded module by objects of S(N)")
    p.add_argument("--phi", required=True)
    p.add_argument("--module", required=True)
    p = add("check-adjunction", "randomized round trips through the adjunction bijections")
    p.add_argument("--phi", required=True)
    p.add_argument("--module", required=True)
    p.add_argument("--samples", type=int, default=20)
    p = add("check-thm", "dimension theorems 31, 32 or 37")
    p.add_argument("theorem", choices=("31", "32", "37"))
    p.add_argument("--phi", required=True)
    p.add_argument("--module", required=True)
    p = add("check-acyclic", "vanishing of Ext into regraded injectives")
    p.add_argument("--phi", required=True)
    p.add_argument("--module", required=True)
    p.add_argument("--injective", required=True)
    p.add_argument("--imax", type=int, default=4)
    add("check-dc", "dualizing-complex conditions").add_argument("--complex", required=True)
    p = add("check-thm48", "dualizing complexes under regrading")
    p.add_argument("--phi", required=True)
    p.add_argument("--complex", required=True)
    p.add_argument("--factor", action="append", help="factor of the morphism, in order (repeatable)")
    add("report", "run every check on the inputs and print JSON")
    return ap


def _load(paths) -> dict:
    if not paths:
        return catalog_workspaces()
    return {path: load(path) for path in paths}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        reg = Registry(_load(args.input))
        res = Result(args.command, _inputs(args))
        HANDLERS[args.command](reg, args, res)
    except (UsageError, ParseError, ValidationError, InfiniteKernel, OSError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    doc = res.to_json(args.cutoff)
    if args.command == "report":
        print(json.dumps(doc, indent=2, sort_keys=True), file=out)
    else:
        for line in res.lines:
            print(line, file=out)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 1 if res.failed else 0


def _inputs(args) -> dict:
    skip = {"command", "input", "json", "cutoff"}
    out = {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}
    out["files"] = args.input or ["<catalog>"]
    return out


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
