"""Command line front end: ``dcalg <command> <input> [cutoffs]``.

The input is a path to a ``.qvr`` file or the name of a bundled example
(``atiyah``, ``pagoda3``, ``laufer``, ...).  Text reports go to stdout,
diagnostics to stderr.  Exit codes: 0 ok, 1 bad input or cutoffs, 2 an
internal invariant failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from importlib import resources
from typing import Dict, List, Optional

from .algebra import WeightOverflow, build_truncated_algebra, corner_algebra, quotient_by_idempotent_ideal
from .chain import ComplexError, end_dga, ext_table, resolve_simple
from .dsl import DslError, InputDocument, parse
from .quiver import PresentationError

COMMANDS = ("check", "algebra", "resolve", "ext", "minimal-model", "koszul-dual", "dq-cohomology",
            "marked-relations", "dca", "ginzburg", "jacobi", "massey", "double-dual-check")

ARTINIAN = ("ground", "truncated-2", "truncated-3", "truncated-4", "dual-exterior")


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# inputs

def bundled_names() -> List[str]:
    data = resources.files("dcalg") / "data"
    return sorted(p.name[:-4] for p in data.iterdir() if p.name.endswith(".qvr"))


def read_input(arg: str):
    """(text, corpus name or None) for a path or a bundled example name."""
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
        base = os.path.basename(arg)
        name = base[:-4] if base.endswith(".qvr") else base
        return text, (name if name in bundled_names() else None)
    name = arg[:-4] if arg.endswith(".qvr") else arg
    if name in bundled_names():
        return (resources.files("dcalg") / "data" / f"{name}.qvr").read_text(encoding="utf-8"), name
    raise UsageError(f"no such file or bundled example: {arg}")


def corpus_names(name: Optional[str]) -> Dict:
    if name is None:
        return {}
    table = json.loads((resources.files("dcalg") / "data" / "names.json").read_text(encoding="utf-8"))
    return table.get(name, {})


def generator_names(name: Optional[str]) -> Optional[Dict]:
    entry = corpus_names(name)
    if not entry:
        return None
    return {(d, w): nm for d, w, nm in entry["generators"]}


def need(args, *flags):
    missing = [f for f in flags if getattr(args, f.replace("-", "_")) is None]
    if missing:
        raise UsageError(f"{args.command} needs " + ", ".join("--" + m for m in missing))


def simple_vertex(args, doc: InputDocument, corpus: Optional[str]) -> str:
    if args.simple is not None:
        v = args.simple
    else:
        v = corpus_names(corpus).get("simple")
        if v is None:
            unmarked = [u for u in doc.presentation.vertices if u not in doc.presentation.marked]
            if len(unmarked) != 1:
                raise UsageError("pass --simple <vertex>")
            v = unmarked[0]
    if v not in doc.presentation.vertices:
        raise UsageError(f"unknown vertex {v}")
    return v


# ---------------------------------------------------------------------------
# formatting

def q(x) -> str:
    return str(Fraction(x))


def dims_json(dims: Dict, window) -> Dict:
    rows = [[k[0], k[1], n] for k, n in sorted(dims.items()) if n]
    return {"dims": rows, "window": window}


def dims_text(dims: Dict, label="H") -> List[str]:
    return [f"  {label}^{k[0]} weight {k[1]}: {n}" for k, n in sorted(dims.items()) if n]


def window_json(w):
    if isinstance(w, dict):
        return {k: window_json(v) for k, v in sorted(w.items())}
    if isinstance(w, tuple):
        return list(w)
    return w


def free_dga_json(F) -> Dict:
    gens = [{"name": g.name, "degree": g.degree, "weight": g.weight, "source": g.source, "target": g.target}
            for g in F.generators]
    diff = {}
    for g in F.generators:
        terms = F.d_gen(g.name)
        diff[g.name] = [[[F.generators[i].name for i in w], q(c)] for w, c in sorted(terms.items())]
    return {"generators": gens, "differential": diff, "window": window_json(F.window)}


def free_dga_text(F) -> List[str]:
    out = ["generators: " + ", ".join(f"{g.name} (deg {g.degree}, wt {g.weight})" for g in F.generators)]
    if all(not F.d_gen(g.name) for g in F.generators):
        out.append("differential: 0")
    else:
        out.append("differential:")
        for g in F.generators:
            out.append(f"  d({g.name}) = {F.poly_text(F.d_gen(g.name)) if F.d_gen(g.name) else '0'}")
    return out


def ainfty_json(M, n_max: int) -> Dict:
    basis = [{"name": M.names[l], "degree": M.degree(l), "weight": M.weight(l)} for l in M.labels]
    ops = []
    for n in range(2, n_max + 1):
        for args in M.tuples(n, skip_unit=True):
            val = M.op(args)
            if val:
                ops.append({"arity": n, "inputs": [M.names[a] for a in args],
                            "output": [[M.names[l], q(c)] for l, c in sorted(val.items(), key=lambda t: M.labels.index(t[0]))]})
    return {"basis": basis, "operations": ops,
            "window": {"arity": M.certified_arity, "weight": list(M.weight_window)}}


def ainfty_text(M, n_max: int) -> List[str]:
    out = ["basis: " + ", ".join(f"{M.names[l]} ({M.degree(l)}, {M.weight(l)})" for l in M.labels)]
    for n in range(2, n_max + 1):
        for args in M.tuples(n, skip_unit=True):
            val = M.op(args)
            if val:
                out.append(f"  m_{n}({', '.join(M.names[a] for a in args)}) = {M.named(val)}")
    return out


# ---------------------------------------------------------------------------
# commands

def cmd_check(args, doc, corpus):
    p = doc.presentation
    sp = doc.superpotential
    rep = {"vertices": list(p.vertices), "arrows": [[a.name, a.source, a.target, a.weight] for a in p.arrows],
           "relations": len(p.relations), "marked": list(p.marked),
           "superpotential": str(sp) if sp is not None and sp.terms else None}
    text = [f"vertices: {' '.join(p.vertices)}", f"arrows: {len(p.arrows)}", f"relations: {len(p.relations)}",
            f"marked: {' '.join(p.marked) or '-'}"]
    if rep["superpotential"]:
        text.append(f"superpotential: {rep['superpotential']}")
    text.append("ok")
    return rep, text


def cmd_algebra(args, doc, corpus):
    need(args, "max-weight")
    A = build_truncated_algebra(doc.presentation, args.max_weight)
    win = {"weight": [0, args.max_weight]}
    blocks = [[s, t, w, len(b)] for (s, t, w), b in A.blocks() if b]
    rep = {"dim": A.dim(), "blocks": blocks, "by_weight": sorted(A.dims_by_weight().items()), "window": win}
    text = [f"dim A (weight <= {args.max_weight}): {A.dim()}"]
    text += [f"  e{s} A e{t} weight {w}: {n}" for s, t, w, n in blocks]
    if doc.presentation.marked:
        eAe = corner_algebra(A)
        Q = quotient_by_idempotent_ideal(A)
        rep.update({"dim_eAe": eAe.dim(), "dim_quotient": Q.dim()})
        text += [f"dim eAe: {eAe.dim()}", f"dim A/AeA: {Q.dim()}"]
    return rep, text


def _resolution(args, doc, corpus):
    need(args, "max-weight", "max-hdeg")
    v = simple_vertex(args, doc, corpus)
    A = build_truncated_algebra(doc.presentation, args.max_weight)
    return v, A, resolve_simple(A, v, args.max_hdeg)


def cmd_resolve(args, doc, corpus):
    v, A, C = _resolution(args, doc, corpus)
    rep = {"simple": v, "terms": {str(k): [[u, d] for u, d in C.terms[k]] for k in sorted(C.terms)},
           "next_shifts": [[u, d] for u, d in (C.next_shifts or [])],
           "window": {"hdeg": [0, args.max_hdeg], "weight": [0, args.max_weight]}}
    return rep, [f"simple at {v}"] + C.describe()


def cmd_ext(args, doc, corpus):
    v, A, C = _resolution(args, doc, corpus)
    T = ext_table(end_dga(C))
    rep = {"simple": v, "ext": dims_json(T.dims, window_json(T.window))}
    text = [f"Ext(S{v}, S{v}):"] + dims_text(T.dims, "Ext")
    text.append(f"window: {window_json(T.window)}")
    return rep, text


def cmd_minimal_model(args, doc, corpus):
    need(args, "max-arity")
    from .ainfty import check_stasheff, transfer_minimal_model
    v, A, C = _resolution(args, doc, corpus)
    M = transfer_minimal_model(end_dga(C), args.max_arity)
    if not check_stasheff(M, args.max_arity):
        raise ComplexError("transferred operations fail the Stasheff identities")
    rep = ainfty_json(M, args.max_arity)
    rep["simple"] = v
    return rep, [f"minimal model of REnd(S{v})"] + ainfty_text(M, args.max_arity)


def cmd_koszul_dual(args, doc, corpus):
    need(args, "max-weight", "max-hdeg", "max-arity")
    from .derived_quotient import simple_koszul_dual
    v = simple_vertex(args, doc, corpus)
    A = build_truncated_algebra(doc.presentation, args.max_weight)
    r = simple_koszul_dual(A, v, args.max_hdeg, args.max_arity, generator_names(corpus))
    return _dga_report(r)


def _dga_report(r):
    F = r.dga
    if not F.check_d_squared():
        raise ComplexError("d^2 != 0 on the Koszul dual")
    rep = free_dga_json(F)
    rep["ext"] = dims_json(r.ext.dims, window_json(r.ext.window))
    text = free_dga_text(F)
    cw = F.window.get("certified_abs_weight")
    text.append(f"certified: |weight| <= {cw}" if cw is not None else "certified: all weights")
    return rep, text


def cmd_dca(args, doc, corpus):
    need(args, "max-weight", "max-hdeg", "max-arity")
    from .derived_quotient import derived_contraction_algebra
    v = simple_vertex(args, doc, corpus)
    r = derived_contraction_algebra(doc.presentation, v, args.max_weight, args.max_hdeg, args.max_arity,
                                    generator_names(corpus))
    return _dga_report(r)


def cmd_dq_cohomology(args, doc, corpus):
    need(args, "max-weight", "max-hdeg")
    from .derived_quotient import dq_cohomology
    if not doc.presentation.marked:
        raise UsageError("the input marks no vertices")
    A = build_truncated_algebra(doc.presentation, args.max_weight)
    dq = dq_cohomology(A, args.max_hdeg, args.max_weight)
    T = dq.table
    by_deg = {j: n for j, n in sorted(dq.dims_by_degree().items()) if n}
    rep = {"cohomology": dims_json(T.dims, window_json(T.window)),
           "by_degree": [[j, n] for j, n in by_deg.items()]}
    text = [f"H^{j}: {n}" for j, n in sorted(by_deg.items(), reverse=True)]
    text += dims_text(T.dims)
    text.append(f"window: {window_json(T.window)}")
    return rep, text


def cmd_marked_relations(args, doc, corpus):
    need(args, "max-weight")
    from .derived_quotient import marked_relations
    A = build_truncated_algebra(doc.presentation, args.max_weight)
    R = marked_relations(A)
    basis = [m.text() for m in R.basis]
    rep = {"relations": [m.text() for m in R.relations], "basis": basis, "rank": R.rank,
           "bound": R.bound, "window": window_json(R.window)}
    text = [f"marked relations: {len(R.relations)}", f"rank: {R.rank}", f"marking bound: {R.bound}",
            "basis: " + "; ".join(basis)]
    return rep, text


def _ginzburg_input(args, doc):
    from .ginzburg import contraction_subquiver
    if doc.superpotential is None or not doc.superpotential.terms:
        raise UsageError("the input has no superpotential")
    p, W = doc.presentation, doc.superpotential
    if args.simple is not None:
        p, W = contraction_subquiver(p, W, [args.simple])
    return p, W


def cmd_ginzburg(args, doc, corpus):
    from .ginzburg import ginzburg_dga
    p, W = _ginzburg_input(args, doc)
    G = ginzburg_dga(p, W, w_bound=args.max_weight)
    rep = free_dga_json(G)
    rep["superpotential"] = str(W)
    return rep, [f"superpotential: {W}"] + free_dga_text(G)


def cmd_jacobi(args, doc, corpus):
    need(args, "max-weight")
    from .ginzburg import jacobi_algebra
    p, W = _ginzburg_input(args, doc)
    J = jacobi_algebra(p, W, args.max_weight)
    byw = sorted(J.dims_by_weight().items())
    rep = {"dim": J.dim(), "by_weight": byw, "window": {"weight": [0, args.max_weight]}}
    return rep, [f"dim (weight <= {args.max_weight}): {J.dim()}"] + [f"  weight {w}: {n}" for w, n in byw]


def cmd_massey(args, doc, corpus):
    need(args, "fold")
    from .ainfty import massey_product
    from .chain import BlockContraction
    v, A, C = _resolution(args, doc, corpus)
    E = end_dga(C)
    T = ext_table(E)
    if args.cls is not None:
        key = tuple(int(x) for x in args.cls.split(","))
    else:
        ones = sorted((k for k, n in T.dims.items() if n and k[0] == 1), key=lambda k: k[1])
        if not ones:
            raise UsageError("Ext^1 vanishes in the window")
        key = ones[0]
    if T.dims.get(key, 0) != 1:
        raise UsageError(f"pick a class with --class; Ext block {key} has dim {T.dims.get(key, 0)}")
    K = BlockContraction(E)
    r = massey_product(E, [(key, T.reps[key][0])], args.fold, K)
    win = window_json(T.window)
    if r.empty:
        return {"class": list(key), "fold": args.fold, "defined": False, "window": win}, ["not defined"]
    rep = {"class": list(key), "fold": args.fold, "defined": True, "block": list(r.key),
           "coordinates": [[i, q(c)] for i, c in sorted((r.classes or {}).items())],
           "indeterminacy_dim": len(r.indeterminacy), "window": win}
    text = [f"<x,...,x> ({args.fold}-fold) for x in Ext block {key}",
            f"lands in block {r.key} with coordinates {rep['coordinates']}",
            f"indeterminacy dim: {len(r.indeterminacy)}"]
    return rep, text


def artinian(name: str):
    from .koszul import dual_numbers_with_exterior, ground_field, truncated_polynomial
    if name == "ground":
        return ground_field()
    if name == "dual-exterior":
        return dual_numbers_with_exterior()
    if name.startswith("truncated-"):
        return truncated_polynomial(int(name.split("-", 1)[1]))
    raise UsageError(f"unknown Artinian dga {name}; choose from {', '.join(ARTINIAN)}")


def cmd_double_dual_check(args, doc, corpus):
    from .koszul import double_dual_check
    need(args, "max-weight")
    r = double_dual_check(artinian(args.input), args.max_weight)
    rep = {"dims": sorted([k[0], k[1], n] for k, n in r.dims_a.items()),
           "dims_double_dual": sorted([k[0], k[1], n] for k, n in r.dims_double.items()),
           "agree": r.agree, "window": window_json(r.window)}
    return rep, [f"H(A): {sorted(r.dims_a.items())}", f"H(A!!): {sorted(r.dims_double.items())}",
                 "agree" if r.agree else "DISAGREE"]


HANDLERS = {
    "check": cmd_check, "algebra": cmd_algebra, "resolve": cmd_resolve, "ext": cmd_ext,
    "minimal-model": cmd_minimal_model, "koszul-dual": cmd_koszul_dual, "dq-cohomology": cmd_dq_cohomology,
    "marked-relations": cmd_marked_relations, "dca": cmd_dca, "ginzburg": cmd_ginzburg, "jacobi": cmd_jacobi,
    "massey": cmd_massey, "double-dual-check": cmd_double_dual_check,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dcalg", description="Exact computations with quivers with relations.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("input", help="a .qvr file or bundled example name (Artinian dga name for double-dual-check)")
    ap.add_argument("--max-weight", type=int)
    ap.add_argument("--max-hdeg", type=int)
    ap.add_argument("--max-arity", type=int)
    ap.add_argument("--simple", help="vertex of the simple module")
    ap.add_argument("--fold", type=int, help="r for the r-fold Massey product <x,...,x>")
    ap.add_argument("--class", dest="cls", help="Ext block 'degree,weight' for massey")
    ap.add_argument("--json", action="store_true")
    return ap


def run(command: str, text: Optional[str], args, corpus: Optional[str] = None):
    """(report dict, text lines) for one command on one document."""
    doc = parse(text) if text is not None else None
    return HANDLERS[command](args, doc, corpus)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        for f in ("max_weight", "max_hdeg", "max_arity", "fold"):
            val = getattr(args, f)
            if val is not None and val < 0:
                raise UsageError(f"--{f.replace('_', '-')} must be nonnegative")
        if args.command == "double-dual-check":
            rep, lines = run(args.command, None, args)
        else:
            text, corpus = read_input(args.input)
            rep, lines = run(args.command, text, args, corpus)
    except (DslError, PresentationError, UsageError, WeightOverflow) as exc:
        print(f"{args.input}: {_origin(exc)}: {exc}", file=sys.stderr)
        return 1
    except ArithmeticError as exc:
        print(f"{args.input}: internal error in {_origin(exc)}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"{args.input}: {_origin(exc)}: {exc}", file=sys.stderr)
        return 1
    if args.json:
        rep = {"command": args.command, "input": args.input, "result": rep}
        sys.stdout.write(json.dumps(rep, sort_keys=True, ensure_ascii=False, indent=1) + "\n")
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _origin(exc: BaseException) -> str:
    mod = type(exc).__module__
    return mod.split(".")[-1] if mod.startswith("dcalg") else type(exc).__name__
