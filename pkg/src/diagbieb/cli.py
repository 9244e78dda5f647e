"""Command line front end.

Exit status: 0 when the computation succeeds or the predicate holds, 1 when
the predicate fails, 2 on usage, parse or resource errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from importlib import resources
from typing import Callable

from . import diffuse, reduction, search
from .charmatrix import GenMatrix, MatrixError, closure, element_label, validate
from .examples import EXAMPLES, get_example
from .matrixfile import MatrixFileError, parse_matrix, serialize_matrix

SCHEMA_VERSION = "diagbieb-certificate/1"


class UsageError(Exception):
    pass


def load_schema() -> dict:
    text = resources.files("diagbieb").joinpath("schema/certificate-v1.json").read_text()
    return json.loads(text)


def load_input(spec: str) -> GenMatrix:
    if spec.startswith("example:"):
        try:
            return get_example(spec[len("example:"):])
        except KeyError as e:
            raise UsageError(e.args[0]) from None
    try:
        text = sys.stdin.read() if spec == "-" else open(spec).read()
    except OSError as e:
        raise UsageError(f"cannot read {spec}: {e.strerror}") from None
    try:
        return parse_matrix(text)
    except MatrixFileError as e:
        raise UsageError(f"{spec}: {e}") from None
    except MatrixError as e:
        raise UsageError(f"{spec}: {e}") from None


def input_hash(obj) -> str:
    blob = serialize_matrix(obj) if isinstance(obj, GenMatrix) else json.dumps(obj, sort_keys=True)
    return "sha256:" + hashlib.sha256(blob.encode()).hexdigest()


def envelope(kind: str, source, payload: dict, checks: list[tuple[str, bool]]) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "type": kind,
        "input_hash": input_hash(source),
        "payload": payload,
        "checks": [{"name": n, "pass": bool(p)} for n, p in checks],
    }


def _yn(b: bool) -> str:
    return "yes" if b else "no"


def _matrix_text(A: GenMatrix) -> str:
    return "\n".join(" ".join(map(str, r)) for r in A.rows)


# Each command returns (exit status, text, json document).
Result = tuple[int, str, dict]


def cmd_validate(args) -> Result:
    A = load_input(args.input)
    rep = validate(A)
    text = (f"torsion-free: {_yn(rep.torsion_free)}, faithful: {_yn(rep.faithful)}, "
            f"holonomy: C2^{A.k}, dim {A.n}")
    if rep.torsion_rows:
        text += "\nrows without entry 1: " + ", ".join(element_label(v) for v in rep.torsion_rows)
    if rep.unfaithful_rows:
        text += "\nrows inside {0,1}: " + ", ".join(element_label(v) for v in rep.unfaithful_rows)
    payload = {"k": A.k, "n": A.n, "torsion_free": rep.torsion_free, "faithful": rep.faithful,
               "torsion_rows": rep.torsion_rows, "unfaithful_rows": rep.unfaithful_rows}
    doc = envelope("validity", A, payload,
                   [("torsion_free", rep.torsion_free), ("faithful", rep.faithful)])
    return (0 if rep.valid else 1), text, doc


def cmd_closure(args) -> Result:
    A = load_input(args.input)
    C = closure(A)
    ordered = C.ordered()
    width = max(len(element_label(v)) for v, _ in ordered)
    text = "\n".join(f"{element_label(v):<{width}}  {' '.join(map(str, r))}" for v, r in ordered)
    payload = {"k": A.k, "n": A.n,
               "rows": [{"element": v, "label": element_label(v), "row": list(r)} for v, r in ordered]}
    return 0, text, envelope("closure", A, payload, [])


def cmd_reduce(args) -> Result:
    A = load_input(args.input)
    try:
        trace = reduction.reduce_fully(A, keep_diagonal=args.keep_diagonal)
    except reduction.ReductionError as e:
        return 1, f"cannot reduce: {e}", envelope("reduction", A, {"error": str(e)}, [("valid", False)])
    final = trace.final
    cert = reduction.minimality_certificate(final) if trace.faithful else None
    label = "minimal (certified)" if cert else "upper bound"
    lines = [f"start: dim {A.n}, holonomy C2^{A.k}"]
    for s in trace.steps:
        extra = ""
        if s.renormalized_columns:
            extra = f", holonomy renormalized on columns {[c + 1 for c in s.renormalized_columns]}"
        elif s.note == "kept":
            extra = ", holonomy drop kept unrenormalized"
        lines.append(f"delete column {s.deleted_column + 1} -> dim {s.matrix.n}{extra}")
    lines.append(f"final: dim {final.n}, holonomy C2^{final.k}, {label}")
    lines.append(_matrix_text(final))
    payload = trace.to_dict()
    payload["dimension"] = final.n
    payload["label"] = label
    payload["certificate"] = cert.to_dict() if cert else None
    checks = [("replay", trace.replay() == final), ("torsion_free", validate(final).torsion_free),
              ("col_irreducible", reduction.is_col_irreducible(final))]
    return 0, "\n".join(lines), envelope("reduction", A, payload, checks)


def cmd_certify_min(args) -> Result:
    A = load_input(args.input)
    if not validate(A).valid:
        return 1, "not a valid matrix", envelope("minimality", A, {"certificate": None}, [("valid", False)])
    cert = reduction.minimality_certificate(A)
    if cert is None:
        irr = reduction.is_col_irreducible(A)
        text = "no certificate: " + ("kernels not distinct" if irr else "a column is deletable")
        doc = envelope("minimality", A, {"certificate": None},
                       [("col_irreducible", irr), ("kernels_distinct", reduction.kernels_distinct(A))])
        return 1, text, doc
    lines = [f"minimal: dim {A.n}, holonomy C2^{A.k}"]
    for j, v in cert.row_assignment.items():
        lines.append(f"column {j + 1}: only entry 1 of row {element_label(v)}")
    lines.append("distinct kernel columns: " + " ".join("".join(c) for c in cert.phi_columns))
    doc = envelope("minimality", A, {"certificate": cert.to_dict()}, [("check", cert.check())])
    return 0, "\n".join(lines), doc


def cmd_vasquez(args) -> Result:
    rep = search.n_d_report(args.k, jobs=args.jobs, samples=args.samples)
    lines = [rep.summary()]
    ev = rep.evidence.get("upper_evidence", {})
    if "lower_certificate" in rep.evidence:
        lines.append(f"lower bound {rep.lower}: certified minimal construction")
    if "search" in ev:
        d = ev["search"]
        lines.append(f"upper bound: exhaustive search k={d['k']} n={d['n']}, "
                     f"{d['valid_found']} valid, {d['irreducible_found']} col-irreducible")
    if "counting" in ev:
        lines.append(f"upper bound: counting argument, {ev['counting']['conclusion']}")
    checks = [("lower_certificate", "lower_certificate" in rep.evidence or args.k == 1),
              ("lower_le_upper", rep.lower <= rep.upper)]
    doc = envelope("vasquez", {"k": args.k}, rep.to_dict(), checks)
    return 0, "\n".join(lines), doc


def cmd_classify(args) -> Result:
    A = load_input(args.input)
    try:
        cl = diffuse.classify(A)
    except diffuse.DiffuseError as e:
        return 1, f"cannot classify: {e}", envelope("classification", A, {"error": str(e)}, [])
    text = f"{cl.verdict} (b1 = {cl.center_rank}; {cl.reason})"
    checks = [("witness", cl.witness.ok)] if cl.witness else []
    return 0, text, envelope("classification", A, cl.to_dict(), checks)


def _witness_text(w: diffuse.DeltaPWitness) -> list[str]:
    lines = [f"{r} = 1: {_yn(ok)}" for r, ok in zip(diffuse.RELATIONS, w.relation_checks)]
    vecs = ", ".join("(" + ",".join(str(x) for x in v) + ")" for v in w.independence_vectors)
    lines.append(f"translations of x^2, y^2, (xy)^2: {vecs}; rank {w.independence_rank}")
    return lines


def cmd_witness(args) -> Result:
    A = load_input(args.input)
    try:
        w = diffuse.deltap_witness(A)
    except diffuse.DiffuseError as e:
        return 1, f"no witness: {e}", envelope("deltap_witness", A, {"error": str(e)}, [("witness", False)])
    text = "\n".join(["Delta_P witness verified"] + _witness_text(w))
    checks = [("relation_1", w.relation_checks[0]), ("relation_2", w.relation_checks[1]),
              ("independence_rank_3", w.independence_rank == 3)]
    return 0, text, envelope("deltap_witness", A, w.to_dict(), checks)


def cmd_pipeline(args) -> Result:
    A = load_input(args.input)
    try:
        tr = diffuse.nondiffuse_pipeline(A)
    except diffuse.DiffuseError as e:
        return 1, f"pipeline not applicable: {e}", envelope("pipeline", A, {"error": str(e)}, [])
    lines = [f"start: dim {A.n}, holonomy C2^{A.k}"]
    for s in tr.steps:
        if s.kind == "quotient":
            lines.append(f"quotient -> dim {s.matrix.n}, holonomy C2^{s.matrix.k}")
        else:
            gens = ", ".join(element_label(v) for v in s.data["subgroup"])
            lines.append(f"restrict to {{{gens}}} -> dim {s.matrix.n}, holonomy C2^{s.matrix.k}")
    lines.append(_matrix_text(tr.final))
    lines += _witness_text(tr.terminal)
    checks = [("terminal_witness", tr.terminal.ok),
              ("hyperplane_steps_bound", tr.hyperplane_steps <= max(A.k - 2, 0))]
    return 0, "\n".join(lines), envelope("pipeline", A, tr.to_dict(), checks)


def cmd_enumerate(args) -> Result:
    k, n = args.k, args.n
    source = {"k": k, "n": n, "all": args.all, "digest": args.digest}
    try:
        if args.digest:
            d = search.exhaustive_reducibility(k, n, jobs=args.jobs, expect_reducible=False)
            text = "\n".join(f"{key}: {val}" for key, val in d.to_dict().items()
                             if key != "first_irreducible")
            return 0, text, envelope("search_digest", source, d.to_dict(),
                                     [("no_irreducible", d.irreducible_found == 0)])
        mats = []
        for A in search.enumerate_bieberbach(k, n, up_to_equivalence=not args.all):
            mats.append(A)
            if args.limit and len(mats) >= args.limit:
                break
    except search.ResourceGuardError as e:
        raise UsageError(str(e)) from None
    text = "\n\n".join(_matrix_text(A) for A in mats) + f"\n# {len(mats)} matrices"
    payload = {"count": len(mats), "matrices": [A.tolist() for A in mats]}
    return 0, text.lstrip("\n"), envelope("enumeration", source, payload, [])


def cmd_example(args) -> Result:
    if not args.name:
        text = "\n".join(EXAMPLES)
        return 0, text, envelope("example_list", {"examples": list(EXAMPLES)},
                                 {"names": list(EXAMPLES)}, [])
    name = args.name[len("example:"):] if args.name.startswith("example:") else args.name
    try:
        A = get_example(name)
    except KeyError as e:
        raise UsageError(e.args[0]) from None
    text = f"# {name}\n" + serialize_matrix(A).rstrip("\n")
    return 0, text, envelope("example", A, {"name": name, "matrix": A.tolist()}, [])


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON certificate")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for searches")

    p = argparse.ArgumentParser(prog="diagbieb",
                                description="Bieberbach groups of diagonal type")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help: str, takes_input=True):
        sp = sub.add_parser(name, parents=[common], help=help)
        if takes_input:
            sp.add_argument("input", help="matrix file, '-' for stdin, or example:NAME")
        sp.set_defaults(fn=fn)
        return sp

    add("validate", cmd_validate, "torsion-freeness and faithfulness")
    add("closure", cmd_closure, "all rows of the holonomy group")
    sp = add("reduce", cmd_reduce, "delete columns down to a col-irreducible quotient")
    sp.add_argument("--keep-diagonal", action="store_true",
                    help="skip deletions whose holonomy drop leaves diagonal form")
    add("certify-min", cmd_certify_min, "certify that no column can be deleted")
    sp = add("vasquez", cmd_vasquez, "bounds on n_d(C2^k)", takes_input=False)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--samples", type=int, default=0,
                    help="extra random 4x11 sampling for k = 4")
    add("classify", cmd_classify, "diffuseness verdict")
    add("witness", cmd_witness, "Delta_P witness for C2^2 holonomy with b1 = 0")
    add("pipeline", cmd_pipeline, "reduce to C2^2 and produce a Delta_P witness")
    sp = add("enumerate", cmd_enumerate, "valid matrices of a given size", takes_input=False)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--all", action="store_true", help="do not reduce up to equivalence")
    sp.add_argument("--limit", type=int, default=0)
    sp.add_argument("--digest", action="store_true",
                    help="run the exhaustive reducibility search instead")
    sp = add("example", cmd_example, "print an embedded matrix", takes_input=False)
    sp.add_argument("name", nargs="?")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be positive", file=sys.stderr)
        return 2
    try:
        status, text, doc = args.fn(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
