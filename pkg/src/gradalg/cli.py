"""Command-line front end: workspace parsing, dispatch, report emission.

A workspace is a JSON document (file argument, or ``-`` for stdin):

    {
      "algebras":  [ { algebra dict as in build_algebra } ],
      "gradings":  [ { "name", "algebra": <name>, "group": {"free_rank",
                       "invariants"}, "degrees": [[...], ...],
                       "basis_change": optional rational matrix } ],
      "homs":      [ { "name", "domain": <group>, "codomain": <group>,
                       "matrix": [[int]] } ],
      "weyl":      [ { "grading": <name>, "matrix": [[int]] } ],
      "assertions": { "weyl_complete": bool }
    }

Exit codes: 0 success, 1 input/validation error, 2 unsupported input
(irrational spectra), 3 cap exceeded, 4 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .abgroup import FgAbGroup, GroupHom, enumerate_homs, torsion_and_free
from .afine import (
    canonical_refinement,
    classify_gradings,
    enumerate_af_coarsenings,
    is_admissible,
    is_almost_fine,
    toral_rank,
)
from .algcore import StructureAlgebra, algebra_to_dict, build_algebra
from .catalog import catalog_names, get_catalog
from .errors import (
    AxiomFailure,
    CapExceeded,
    CrossRefError,
    GradAlgError,
    NonSplitError,
    ParseError,
    ValidationError,
    VerificationFailure,
)
from .exactla import IntMatrix, RatMatrix
from .grading import Grading, graded_derivations, induce, universal_abelian_group, validate_grading
from .lieroot import extract_root_system, is_non_special, root_graded_structure

Q = Fraction


# ---------------------------------------------------------------------------
# Workspace documents
# ---------------------------------------------------------------------------


@dataclass
class WorkspaceDoc:
    algebras: dict[str, StructureAlgebra]
    gradings: dict[str, Grading]
    grading_order: list[str]
    homs: dict[str, GroupHom]
    #: grading name -> automorphisms of that grading's group
    weyl: dict[str, list[GroupHom]]
    assertions: dict[str, Any]

    def pick_grading(self, name: str | None) -> tuple[str, Grading]:
        if name is not None:
            if name not in self.gradings:
                raise CrossRefError(f"no grading named {name!r}")
            return name, self.gradings[name]
        if not self.grading_order:
            raise ValidationError("workspace contains no gradings")
        first = self.grading_order[0]
        return first, self.gradings[first]


def _frac(x) -> Fraction:
    try:
        return Q(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational literal {x!r}: {exc}") from None


def _group_from_dict(d: Mapping, where: str) -> FgAbGroup:
    try:
        return FgAbGroup(int(d.get("free_rank", 0)), [int(x) for x in d.get("invariants", [])])
    except (TypeError, ValueError, GradAlgError) as exc:
        raise ParseError(f"{where}: bad group literal: {exc}") from None


def group_to_dict(g: FgAbGroup) -> dict:
    return {"free_rank": g.free_rank, "invariants": list(g.invariants)}


def _ratmatrix_from(rows, where: str) -> RatMatrix:
    try:
        return RatMatrix([[_frac(x) for x in row] for row in rows])
    except GradAlgError:
        raise
    except Exception as exc:
        raise ParseError(f"{where}: bad matrix: {exc}") from None


def _fracstr(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def matrix_to_lists(m: RatMatrix) -> list[list[str]]:
    return [[_fracstr(m[i, j]) for j in range(m.cols)] for i in range(m.rows)]


def grading_to_dict(name: str, algebra_name: str, gr: Grading) -> dict:
    d = {
        "name": name,
        "algebra": algebra_name,
        "group": group_to_dict(gr.group),
        "degrees": [list(g.coords) for g in gr.degrees],
    }
    ident = RatMatrix.identity(gr.dimension)
    if gr.basis_change != ident:
        d["basis_change"] = matrix_to_lists(gr.basis_change)
    return d


def parse_workspace(docs: Sequence[Mapping]) -> WorkspaceDoc:
    """Merge one or more parsed JSON documents into a cross-linked
    workspace; diagnostics name the offending field."""
    algebras: dict[str, StructureAlgebra] = {}
    algebra_names: dict[int, str] = {}
    gradings: dict[str, Grading] = {}
    order: list[str] = []
    homs: dict[str, GroupHom] = {}
    weyl: dict[str, list[GroupHom]] = {}
    assertions: dict[str, Any] = {}
    for doc in docs:
        if not isinstance(doc, Mapping):
            raise ParseError("workspace document must be a JSON object")
        for aspec in doc.get("algebras", []):
            try:
                alg = build_algebra(aspec)
            except GradAlgError as exc:
                raise ValidationError(f"algebra {aspec.get('name', '?')!r}: {exc}")
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"algebra {aspec.get('name', '?')!r}: {exc}")
            algebras[alg.name] = alg
            algebra_names[id(alg)] = alg.name
        for gspec in doc.get("gradings", []):
            gname = gspec.get("name", f"grading{len(gradings)}")
            ref = gspec.get("algebra")
            if isinstance(ref, str):
                if ref not in algebras:
                    raise CrossRefError(
                        f"grading {gname!r}: field 'algebra' references "
                        f"unknown algebra {ref!r}"
                    )
                alg = algebras[ref]
            elif isinstance(ref, Mapping):
                alg = build_algebra(ref)
                algebras.setdefault(alg.name, alg)
                algebra_names[id(alg)] = alg.name
            else:
                raise ParseError(f"grading {gname!r}: missing 'algebra' field")
            group = _group_from_dict(gspec.get("group", {}), f"grading {gname!r}")
            try:
                degrees = [group.element([int(x) for x in v]) for v in gspec["degrees"]]
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"grading {gname!r}: bad 'degrees': {exc}")
            bc = None
            if "basis_change" in gspec:
                bc = _ratmatrix_from(gspec["basis_change"], f"grading {gname!r}")
            try:
                gr = validate_grading(alg, group, degrees, bc)
            except GradAlgError as exc:
                raise ValidationError(f"grading {gname!r}: {exc}")
            gradings[gname] = gr
            order.append(gname)
        for hspec in doc.get("homs", []):
            hname = hspec.get("name", f"hom{len(homs)}")
            dom = _group_from_dict(hspec.get("domain", {}), f"hom {hname!r}")
            cod = _group_from_dict(hspec.get("codomain", {}), f"hom {hname!r}")
            try:
                m = IntMatrix([[int(x) for x in row] for row in hspec["matrix"]])
                homs[hname] = GroupHom(dom, cod, m)
            except GradAlgError as exc:
                raise ValidationError(f"hom {hname!r}: {exc}")
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"hom {hname!r}: bad 'matrix': {exc}")
        for wspec in doc.get("weyl", []):
            target = wspec.get("grading")
            if target not in gradings:
                raise CrossRefError(
                    f"weyl entry: field 'grading' references unknown grading {target!r}"
                )
            g = gradings[target].group
            try:
                m = IntMatrix([[int(x) for x in row] for row in wspec["matrix"]])
                hom = GroupHom(g, g, m)
            except GradAlgError as exc:
                raise ValidationError(f"weyl for {target!r}: {exc}")
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"weyl for {target!r}: bad 'matrix': {exc}")
            if not hom.is_isomorphism():
                raise ValidationError(f"weyl for {target!r}: matrix is not an automorphism")
            weyl.setdefault(target, []).append(hom)
        assertions.update(doc.get("assertions", {}))
    ws = WorkspaceDoc(algebras, gradings, order, homs, weyl, assertions)
    ws._algebra_names = algebra_names  # type: ignore[attr-defined]
    return ws


def _load_docs(paths: Sequence[str]) -> list[Mapping]:
    docs = []
    for p in paths:
        try:
            text = sys.stdin.read() if p == "-" else open(p).read()
        except OSError as exc:
            raise ParseError(f"cannot read {p}: {exc}")
        try:
            docs.append(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{p}: invalid JSON at line {exc.lineno}: {exc.msg}")
    return docs


# ---------------------------------------------------------------------------
# Report helpers
# ---------------------------------------------------------------------------


def _emit(report: dict, lines: list[str], as_json: bool) -> None:
    if as_json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _algebra_name_of(ws: WorkspaceDoc, gr: Grading) -> str:
    return getattr(ws, "_algebra_names", {}).get(id(gr.algebra), gr.algebra.name)


def _group_str(g: FgAbGroup) -> str:
    parts = ["Z"] * g.free_rank + [f"Z{d}" for d in g.invariants]
    return " x ".join(parts) if parts else "0"


def _weyl_on_uab(ws, name, gr, uab):
    gens = ws.weyl.get(name, [])
    if not gens:
        return []
    if not uab.alpha.is_isomorphism():
        raise ValidationError(
            f"weyl generators for {name!r} need the grading group to be universal"
        )
    inv = uab.alpha.inverse()
    return [inv.compose(w).compose(uab.alpha) for w in gens]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _cmd_validate(ws: WorkspaceDoc, args) -> None:
    report = {"gradings": []}
    lines = []
    for name in ws.grading_order:
        gr = ws.gradings[name]
        dims = {str(k): v for k, v in sorted(gr.component_dims().items())}
        report["gradings"].append(
            {
                "name": name,
                "algebra": _algebra_name_of(ws, gr),
                "group": group_to_dict(gr.group),
                "support_size": len(gr.support),
                "component_dims": dims,
            }
        )
        lines.append(
            f"{name}: valid grading of {_algebra_name_of(ws, gr)} by "
            f"{_group_str(gr.group)}, support {len(gr.support)}"
        )
    report["algebras"] = sorted(ws.algebras)
    _emit(report, lines, args.json)


def _cmd_ugroup(ws, args) -> None:
    name, gr = ws.pick_grading(args.grading)
    uab = universal_abelian_group(gr)
    iota = [
        {"support": list(s.coords), "class": list(uab.iota[s].coords)}
        for s in uab.support_order
    ]
    report = {
        "grading": name,
        "universal_group": group_to_dict(uab.group),
        "iota": iota,
        "alpha": [list(r) for r in uab.alpha.matrix.data],
    }
    lines = [f"U_ab({name}) = {_group_str(uab.group)}"] + [
        f"  iota{e['support']} = {e['class']}" for e in iota
    ]
    _emit(report, lines, args.json)


def _cmd_der(ws, args) -> None:
    name, gr = ws.pick_grading(args.grading)
    gd = graded_derivations(gr)
    entries = [
        {"degree": list(g.coords), "dim": s.dim}
        for g, s in sorted(gd.by_degree.items(), key=lambda kv: kv[0].coords)
    ]
    report = {
        "grading": name,
        "components": entries,
        "identity_dim": gd.identity_part.dim,
        "total_dim": gd.total_dim(),
    }
    lines = [f"graded derivations of {name}: total {gd.total_dim()}"] + [
        f"  degree {e['degree']}: dim {e['dim']}" for e in entries
    ]
    _emit(report, lines, args.json)


def _cmd_trank(ws, args) -> None:
    name, gr = ws.pick_grading(args.grading)
    td = toral_rank(gr, seed=args.seed)
    report = {
        "grading": name,
        "trank": td.trank,
        "dim_d_e": td.d_e.dim,
        "dim_cartan": td.cartan.dim,
    }
    _emit(report, [f"trank({name}) = {td.trank}  (dim D_e = {td.d_e.dim})"], args.json)


def _cmd_almost_fine(ws, args) -> None:
    name, gr = ws.pick_grading(args.grading)
    cert = is_almost_fine(gr, seed=args.seed)
    report = {
        "grading": name,
        "almost_fine": cert.almost_fine,
        "rank_uab": cert.rank_uab,
        "trank": cert.trank,
        "dim_d_e": cert.dim_d_e,
    }
    verdict = "true" if cert.almost_fine else "false"
    _emit(
        report,
        [f"almost-fine({name}) = {verdict}  (rank U = {cert.rank_uab}, trank = {cert.trank})"],
        args.json,
    )


def _cmd_refine_canonical(ws, args) -> None:
    name, gr = ws.pick_grading(args.grading)
    res = canonical_refinement(gr, seed=args.seed)
    refined_name = f"{name}*"
    gdict = grading_to_dict(refined_name, _algebra_name_of(ws, gr), res.refined)
    report = {
        "grading": name,
        "refined": gdict,
        "group": group_to_dict(res.refined.group),
        "support_size": len(res.refined.support),
        "weights": [
            {"degree": list(k.coords), "weight": list(v)}
            for k, v in sorted(res.weights.items(), key=lambda kv: kv[0].coords)
        ],
        "trank": res.toral.trank,
    }
    lines = [
        f"canonical refinement of {name}: group {_group_str(res.refined.group)}, "
        f"support {len(res.refined.support)}, trank {res.toral.trank}"
    ]
    _emit(report, lines, args.json)


def _cmd_coarsen_enum(ws, args) -> None:
    name, gr = ws.pick_grading(args.grading)
    uab = universal_abelian_group(gr)
    weyl = _weyl_on_uab(ws, name, gr, uab)
    entries = enumerate_af_coarsenings(
        gr,
        weyl_generators=weyl,
        universal_only=args.universal_only,
        cap=args.cap,
        seed=args.seed,
    )
    report = {"grading": name, "count": len(entries), "entries": []}
    lines = [f"almost-fine coarsenings of {name}: {len(entries)}"]
    for e in entries:
        gens = [list(x.coords) for x in e.subgroup.canonical_generators() if any(x.coords)]
        item = {
            "kernel_generators": gens,
            "kernel_order": e.subgroup.order() if e.subgroup.is_finite() else None,
            "quotient": group_to_dict(e.quotient.codomain),
            "certificate": e.certificate,
            "orbit": e.orbit,
            "component_dims": {str(k): v for k, v in sorted(e.grading.component_dims().items())},
        }
        report["entries"].append(item)
        lines.append(
            f"  kernel {gens or '0'} -> {_group_str(e.quotient.codomain)} "
            f"(orbit {e.orbit}, {e.certificate})"
        )
    _emit(report, lines, args.json)


def _cmd_induce(ws, args) -> None:
    name, gr = ws.pick_grading(args.grading)
    if args.hom is None or args.hom not in ws.homs:
        raise CrossRefError("induce needs --hom naming a homomorphism in the workspace")
    alpha = ws.homs[args.hom]
    if alpha.domain != gr.group:
        raise ValidationError(
            f"hom {args.hom!r} domain {_group_str(alpha.domain)} does not match "
            f"the grading group {_group_str(gr.group)}"
        )
    out = induce(gr, alpha)
    gdict = grading_to_dict(f"{name}|{args.hom}", _algebra_name_of(ws, gr), out)
    report = {"grading": gdict, "support_size": len(out.support)}
    _emit(
        report,
        [f"induced grading by {_group_str(out.group)}, support {len(out.support)}"],
        args.json,
    )


def _cmd_admissible(ws, args) -> None:
    name, gr = ws.pick_grading(args.grading)
    uab = universal_abelian_group(gr)
    names = [args.hom] if args.hom else sorted(ws.homs)
    results = []
    lines = []
    for hname in names:
        if hname not in ws.homs:
            raise CrossRefError(f"no hom named {hname!r}")
        hom = ws.homs[hname]
        if hom.domain != uab.group:
            raise ValidationError(
                f"hom {hname!r} domain does not match U_ab = {_group_str(uab.group)}"
            )
        ok = is_admissible(hom, uab)
        results.append({"hom": hname, "admissible": ok})
        lines.append(f"{hname}: {'admissible' if ok else 'not admissible'}")
    _emit({"grading": name, "results": results}, lines, args.json)


def _cmd_classify(ws, args) -> None:
    if args.target is None:
        raise ValidationError("classify needs --target with a group literal")
    try:
        target = _group_from_dict(json.loads(args.target), "--target")
    except json.JSONDecodeError as exc:
        raise ParseError(f"--target: invalid JSON: {exc.msg}")
    if not target.is_finite:
        raise ValidationError("classification target group must be finite")
    catalog = []
    for name in ws.grading_order:
        gr = ws.gradings[name]
        uab = universal_abelian_group(gr)
        catalog.append((gr, _weyl_on_uab(ws, name, gr, uab)))
    entries = classify_gradings(catalog, target, cap=args.cap)
    complete = bool(args.assert_weyl_complete or ws.assertions.get("weyl_complete"))
    report = {
        "target": group_to_dict(target),
        "orbit_completeness": "asserted" if complete else "lower bound only",
        "entries": [],
    }
    lines = [
        f"G-gradings for G = {_group_str(target)} "
        f"({'complete orbits asserted' if complete else 'orbits are generator-limited'}):"
    ]
    for e in entries:
        src = ws.grading_order[e.source]
        item = {
            "source": src,
            "alpha": [list(r) for r in e.alpha.matrix.data],
            "orbit": e.orbit,
            "orbit_size": e.orbit_size,
            "component_dims": {str(k): v for k, v in sorted(e.grading.component_dims().items())},
        }
        report["entries"].append(item)
        lines.append(
            f"  {src} orbit {e.orbit} (size {e.orbit_size}): "
            f"dims {item['component_dims']}"
        )
    _emit(report, lines, args.json)


def _cmd_rootsys(ws, args) -> None:
    name, gr = ws.pick_grading(args.grading)
    wd, rep = extract_root_system(gr, seed=args.seed)
    basis = RatMatrix.from_columns([list(a) for a in rep.simple_roots], rows=wd.cartan.dim)
    from .exactla import rational_solve

    def coords(a):
        sol = rational_solve(basis, RatMatrix.column_vector(list(a)))
        return [_fracstr(sol.particular[i, 0]) for i in range(len(rep.simple_roots))]

    report = {
        "grading": name,
        "type": rep.type_label,
        "rank": rep.rank,
        "reduced": rep.reduced,
        "flags": {
            "reflection_closure": rep.reflection_closure,
            "integral_cartan": rep.integral_cartan,
            "irreducible": rep.irreducible,
        },
        "roots": [
            {"simple_coords": coords(a), "dim": wd.spaces[a].dim} for a in rep.phi
        ],
        "zero_weight_dim": wd.zero_space().dim,
    }
    lines = [f"root system of {name}: {rep.type_label} with {len(rep.phi)} roots"]
    _emit(report, lines, args.json)


def _cmd_root_graded(ws, args) -> None:
    name, gr = ws.pick_grading(args.grading)
    if args.refined is not None:
        if args.refined not in ws.gradings:
            raise CrossRefError(f"no grading named {args.refined!r}")
        refined = ws.gradings[args.refined]
    else:
        refined = canonical_refinement(gr, seed=args.seed).refined
    res = root_graded_structure(gr, refined, seed=args.seed)
    (dg, da), (ds, db), (dw, dc) = res.dims
    report = {
        "grading": name,
        "type": res.report.type_label,
        "grading_subalgebra_dim": dg,
        "dims": {
            "g": dg, "A": da, "s": ds, "B": db, "W": dw, "C": dc,
            "D": res.pieces[3].dim,
        },
        "c_merged_into_b": res.c_merged_into_b,
        "tables": {
            k: [
                {"torsion_class": list(u), "dim": d, "g_degree": list(gd)}
                for u, d, gd in v
            ]
            for k, v in res.tables.items()
        },
    }
    lines = [
        f"{name}: {res.report.type_label}-graded with grading subalgebra of dim {dg}",
        f"  dim L = {dg}*{da} + {ds}*{db} + {dw}*{dc} + {res.pieces[3].dim}",
    ]
    _emit(report, lines, args.json)


def catalog_workspace(name: str) -> dict:
    """Workspace document for a built-in example."""
    entry = get_catalog(name)
    alg = entry.grading.algebra
    doc = {
        "algebras": [algebra_to_dict(alg)],
        "gradings": [grading_to_dict(name, alg.name, entry.grading)],
        "weyl": [
            {"grading": name, "matrix": [list(r) for r in w.matrix.data]}
            for w in entry.weyl_on_group
        ],
        "assertions": {
            "weyl_complete": entry.weyl_complete,
            "expected": {
                k: list(v) if isinstance(v, tuple) else v
                for k, v in sorted(entry.expected.items())
            },
        },
    }
    for cname, cgr in sorted(entry.companions.items()):
        doc["gradings"].append(grading_to_dict(f"{name}-{cname}", alg.name, cgr))
    return doc


def _cmd_catalog(args) -> None:
    if args.name is None:
        for n in catalog_names():
            print(n)
        return
    print(json.dumps(catalog_workspace(args.name), indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "validate": _cmd_validate,
    "ugroup": _cmd_ugroup,
    "der": _cmd_der,
    "trank": _cmd_trank,
    "almost-fine": _cmd_almost_fine,
    "refine-canonical": _cmd_refine_canonical,
    "coarsen-enum": _cmd_coarsen_enum,
    "induce": _cmd_induce,
    "admissible": _cmd_admissible,
    "classify": _cmd_classify,
    "rootsys": _cmd_rootsys,
    "root-graded": _cmd_root_graded,
}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gradalg",
        description="Gradings on finite-dimensional algebras: universal groups, "
        "toral ranks, almost-fine refinements, and root systems.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, files=True):
        if files:
            sp.add_argument("files", nargs="+", help="workspace JSON files ('-' for stdin)")
            sp.add_argument("--grading", help="grading name (default: first in the workspace)")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--seed", type=int, default=0, help="generic-element seed")
        sp.add_argument("--cap", type=int, default=10**4, help="enumeration cap")

    for name in _COMMANDS:
        sp = sub.add_parser(name)
        common(sp)
        if name == "coarsen-enum":
            sp.add_argument(
                "--universal-only",
                action="store_true",
                help="restrict kernels to subgroups generated by support differences",
            )
        if name == "classify":
            sp.add_argument("--target", help="target group literal (JSON)")
            sp.add_argument(
                "--assert-weyl-complete",
                action="store_true",
                help="record that the supplied generators give complete orbits",
            )
        if name in ("induce", "admissible"):
            sp.add_argument("--hom", help="homomorphism name from the workspace")
        if name == "root-graded":
            sp.add_argument(
                "--refined",
                help="name of the fine refinement (default: canonical refinement)",
            )
    cp = sub.add_parser("catalog", help="emit a built-in example as a workspace")
    cp.add_argument("name", nargs="?", help="entry name (omit to list)")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "catalog":
            _cmd_catalog(args)
        else:
            ws = parse_workspace(_load_docs(args.files))
            _COMMANDS[args.command](ws, args)
    except NonSplitError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return 2
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3
    except (AxiomFailure, VerificationFailure) as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return 4
    except GradAlgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
