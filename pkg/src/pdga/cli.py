"""Command line interface: ``pdga <command> <file> [options]``.

JSON results go to stdout and a short summary to stderr.  Exit codes:
0 clean, 1 verification failure, 2 obstruction, 3 malformed input or a
violated precondition.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import corpus
from .algebra import (
    AlgebraError,
    check_cdga,
    check_cyclic,
    check_morphism,
    classify,
    homology,
    pairing_from_orientation,
)
from .extension import ExtensionError, MiddleDegreeObstruction, extend_to_hodge_type
from .field import FieldError, parse_field
from .hodge import (
    HodgeError,
    PreconditionError,
    check_hodge,
    check_homotopy,
    h_orthogonalize,
    middle_degrees,
    nondeg_quotient,
    solve_twist,
    standard_homotopy,
    twist_to_hodge,
)
from .io import DocumentError, algebra_to_doc, doc_to_algebra, doc_to_map, dumps, map_to_doc
from .model import build_pd_model, dpd_rigidity
from .trees import small_subalgebra, tree_span, verify_closure

OK, FAILED, OBSTRUCTION, MALFORMED = 0, 1, 2, 3


class Outcome:
    def __init__(self, code, payload, summary):
        self.code = code
        self.payload = payload
        self.summary = summary


def _plain(x):
    """Make reports JSON-serializable (field elements become strings)."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set)):
        return [_plain(v) for v in (sorted(x) if isinstance(x, set) else x)]
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, float):
        return x if x != float("inf") else "inf"
    return str(x)


def _read_text(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_doc(path, field=None):
    text = _read_text(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError("%s: line %d col %d" % (path, exc.lineno, exc.colno), exc.msg)
    if field is not None and isinstance(doc, dict):
        doc = dict(doc, field=field)
    return doc


def load(path, field=None, need_orientation=True):
    a, o, name = doc_to_algebra(_load_doc(path, field))
    if need_orientation and o is None:
        raise DocumentError("/orientation", "this command needs an orientation")
    return a, o, name or os.path.basename(path)


def _vecs(a, data):
    return {str(d): [a.format(x) for x in vecs] for d, vecs in sorted(data.items()) if vecs}


def _hodge_payload(hd):
    return {"H": _vecs(hd.space, hd.H), "C": _vecs(hd.space, hd.C), "dims": hd.dims()}


# -- commands -----------------------------------------------------------------

def cmd_check(args):
    a, o, name = load(args.file, args.field, need_orientation=False)
    axioms = check_cdga(a)
    out = {"name": name, "checkCDGA": axioms, "dims": a.dims()}
    clean = not axioms
    if o is not None:
        cyc = check_cyclic(a, pairing_from_orientation(a, o))
        bad_or = o.annihilates_boundaries(a)
        cls = classify(a, o)
        out.update(checkCyclic=cyc, orientationClosed=not bad_or, classify=cls)
        clean = clean and not cyc and not bad_or and cls["isPDGA"]
    summary = "%s: %s" % (name, "clean" if clean else "axiom failures")
    if o is not None:
        summary += " (isPDGA=%s, isDPD=%s)" % (out["classify"]["isPDGA"], out["classify"]["isDPD"])
    return Outcome(OK if clean else FAILED, out, summary)


def cmd_homology(args):
    a, o, name = load(args.file, args.field, need_orientation=False)
    h = homology(a)
    top = a.max_degree if h.trusted == float("inf") else min(a.max_degree, h.trusted)
    out = {
        "name": name,
        "dims": h.dims(int(top)),
        "trustedDegree": h.trusted,
        "representatives": {str(d): [a.format(r) for r in h.reps[d]] for d in h.degrees() if d <= top},
    }
    return Outcome(OK, out, "%s: H dims %s" % (name, out["dims"]))


def cmd_hodge(args):
    a, o, name = load(args.file, args.field)
    p = pairing_from_orientation(a, o)
    ho = h_orthogonalize(a, p)
    n = o.degree
    degrees = middle_degrees(n) if args.middle_only else None
    tw = solve_twist(ho, degrees)
    out = {"name": name, "twist": tw.report(), "degrees": degrees}
    if not tw.feasible:
        return Outcome(OBSTRUCTION, out, "%s: twist equation infeasible%s" % (name, " in the middle degrees" if degrees else ""))
    if args.middle_only:
        return Outcome(OK, out, "%s: middle-degree twist feasible" % name)
    hd = twist_to_hodge(ho, tw)
    flags = check_hodge(hd)
    out.update(hodge=_hodge_payload(hd), flags=flags)
    return Outcome(OK if flags["hodge"] else FAILED, out, "%s: Hodge decomposition %s" % (name, "certified" if flags["hodge"] else "FAILED"))


def _hodge_or_obstruction(a, o, name):
    p = pairing_from_orientation(a, o)
    ho = h_orthogonalize(a, p)
    tw = solve_twist(ho)
    if not tw.feasible:
        return None, Outcome(OBSTRUCTION, {"name": name, "twist": tw.report()}, "%s: no Hodge decomposition" % name)
    return twist_to_hodge(ho, tw), None


def cmd_homotopy(args):
    a, o, name = load(args.file, args.field)
    hd, bad = _hodge_or_obstruction(a, o, name)
    if bad:
        return bad
    hom = standard_homotopy(hd)
    flags = check_homotopy(hd, hom)
    mats = {}
    for d in range(1, a.max_degree + 1):
        if a.dim(d) and a.dim(d - 1):
            mats[str(d)] = [[str(x) for x in row] for row in hom.h.matrix(d).rows]
    out = {"name": name, "matrices": mats, "rowsIndex": "target degree d-1 basis", "check": flags}
    ok = flags["commRel"] and flags["hSquaredZero"] and flags["vanishesOnHC"]
    return Outcome(OK if ok else FAILED, out, "%s: hD + Dh = ιπ - Id %s" % (name, "holds" if ok else "FAILS"))


def cmd_small(args):
    a, o, name = load(args.file, args.field)
    hd, bad = _hodge_or_obstruction(a, o, name)
    if bad:
        return bad
    hom = standard_homotopy(hd)
    cap = args.cap if args.cap is not None else o.degree + 2
    s = small_subalgebra(a, hd, hom.h, cap)
    closure = verify_closure(a, s.span, hd, hom.h)
    out = {
        "name": name,
        "cap": cap,
        "dims": s.dims(),
        "capHit": sorted(s.cap_hit),
        "guaranteedFinite": s.guaranteed,
        "closureFailures": closure,
    }
    ok = not closure
    if args.trees:
        dump, record = [], {}
        ts = tree_span(a, hd, hom.h, cap, record=record, dump=dump)
        same = ts.same_as(s.span) and s.span.same_as(ts)
        bound = all(deg >= l + 1 for l, deg in record.items() if l >= 2) if not hd.H.get(1) else None
        out.update(trees=dump, treeSpanEqualsClosure=same, minDegreeByLeaves=record, degreeBoundHolds=bound)
        ok = ok and same and bound is not False
    return Outcome(OK if ok else FAILED, out, "%s: small subalgebra dims %s" % (name, s.dims()))


def cmd_extend(args):
    a, o, name = load(args.file, args.field)
    r = extend_to_hodge_type(a, o, args.trunc)
    flags = check_hodge(r.hodge)
    inc = check_morphism(r.inclusion, a, o, r.algebra, r.orientation)
    ret = check_morphism(r.retraction, r.algebra, r.orientation, a, o)
    ident = r.retraction.compose(r.inclusion).images == [{i: a.field.one} for i in range(len(a))]
    ext_name = name + "-hat"
    out = {
        "name": name,
        "algebra": algebra_to_doc(r.algebra, r.orientation, ext_name),
        "hodge": _hodge_payload(r.hodge),
        "certificates": {"hodge": flags, "inclusion": inc, "retraction": ret, "retractionAfterInclusionIsId": ident},
        "inclusion": map_to_doc(r.inclusion, name, ext_name),
        "retraction": map_to_doc(r.retraction, ext_name, name),
        "flags": r.flags,
        "log": r.log,
    }
    ok = flags["hodge"] and inc["quasiIso"] and ret["quasiIso"] and inc["orientationCompatible"] and ret["orientationCompatible"] and ident
    return Outcome(OK if ok else FAILED, out, "%s: extension %s (%d -> %d basis vectors, %s)" % (name, "certified" if ok else "FAILED", len(a), len(r.algebra), r.flags["route"]))


def cmd_model(args):
    a, o, name = load(args.file, args.field)
    r = build_pd_model(a, o, args.route)
    mid_name = name + ("-S" if r.route == "small" else "-hat")
    m_name = name + "-model"
    mid, mid_or = r.intermediate["S"] if r.route == "small" else r.intermediate["Vhat"]
    names = {id(a): name, id(mid): mid_name, id(r.model): m_name}
    zig = []
    for leg in r.legs:
        zig.append(
            {
                "label": leg.label,
                "source": names[id(leg.source)],
                "target": names[id(leg.target)],
                "map": map_to_doc(leg.map, names[id(leg.source)], names[id(leg.target)]),
            }
        )
    out = {
        "name": name,
        "route": r.route,
        "model": algebra_to_doc(r.model, r.orientation, m_name),
        "intermediate": algebra_to_doc(mid, mid_or, mid_name),
        "zigzag": zig,
        "report": r.report,
    }
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        files = {
            m_name: out["model"],
            mid_name: out["intermediate"],
            name: algebra_to_doc(a, o, name),
        }
        for nm, doc in files.items():
            with open(os.path.join(args.out_dir, nm + ".json"), "w", encoding="utf-8") as fh:
                fh.write(dumps(doc))
        for z in zig:
            with open(os.path.join(args.out_dir, "%s.map.json" % z["label"]), "w", encoding="utf-8") as fh:
                fh.write(dumps(z["map"]))
    return Outcome(OK if r.ok else FAILED, out, "%s: %s route, model dims %s, %s" % (name, r.route, r.model.dims(), "verified" if r.ok else "NOT verified"))


def cmd_verify_map(args):
    a, oa, na = load(args.source, args.field, need_orientation=False)
    b, ob, nb = load(args.target, args.field, need_orientation=False)
    f = doc_to_map(_load_doc(args.map), a, b)
    rep = check_morphism(f, a, oa, b, ob)
    out = {"source": na, "target": nb, "check": rep}
    ok = rep["chainMap"] and rep["multiplicative"] and rep["unital"] and rep["quasiIso"] and rep["orientationCompatible"] is not False
    if oa is not None and ob is not None and ok and classify(a, oa)["isDPD"] and classify(b, ob)["isDPD"]:
        rig = dpd_rigidity(f, a, oa, b, ob)
        out["dpdRigidity"] = rig
        ok = ok and rig["pairingPreserved"] and rig["fullColumnRank"]
    return Outcome(OK if ok else FAILED, out, "%s -> %s: %s" % (na, nb, "PDGA quasi-isomorphism" if ok else "check failed"))


def cmd_quotient(args):
    a, o, name = load(args.file, args.field)
    q = nondeg_quotient(a, pairing_from_orientation(a, o), o)
    qn = name + "-Q"
    out = {
        "name": name,
        "quotient": algebra_to_doc(q.algebra, q.orientation, qn),
        "projection": map_to_doc(q.projection, name, qn),
        "quasiIso": q.quasi_iso,
        "perpHomology": q.perp_homology,
        "perpDims": {str(d): len(x) for d, x in sorted(q.perp.items()) if x},
    }
    return Outcome(OK if q.quasi_iso else OBSTRUCTION, out, "%s: Q(V) dims %s, quasi-iso %s" % (name, q.algebra.dims(), q.quasi_iso))


def cmd_examples(args):
    if args.action == "list":
        return Outcome(OK, {"examples": sorted(corpus.EXAMPLES)}, "%d examples" % len(corpus.EXAMPLES))
    if not args.name:
        raise DocumentError("examples", "emit needs a name")
    F = parse_field(args.field or "Q")
    kw = {"field": F}
    if args.trunc is not None:
        if args.name not in ("lambda-abc", "acyclic-wz"):
            raise DocumentError("--trunc", "example %r has no truncation parameter" % args.name)
        kw["truncation"] = args.trunc
    try:
        builder = corpus.EXAMPLES[args.name]
    except KeyError:
        raise DocumentError("examples", "unknown example %r" % args.name)
    a, o = builder(**kw)
    return Outcome(OK, algebra_to_doc(a, o, args.name), None)


COMMANDS = {
    "check": cmd_check,
    "homology": cmd_homology,
    "hodge": cmd_hodge,
    "homotopy": cmd_homotopy,
    "small": cmd_small,
    "extend": cmd_extend,
    "model": cmd_model,
    "verify-map": cmd_verify_map,
    "quotient": cmd_quotient,
    "examples": cmd_examples,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="pdga", description="Hodge decompositions and Poincaré duality models of finite CDGAs.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", help="override the document field: Q or Fp:<p>")
    common.add_argument("--trunc", type=int, help="truncation degree")
    common.add_argument("--batch", metavar="DIR", help="run on every *.json file in DIR")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("check", "homology", "homotopy", "extend", "quotient"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("file", nargs="?", default="-")
    sp = sub.add_parser("hodge", parents=[common])
    sp.add_argument("file", nargs="?", default="-")
    sp.add_argument("--middle-only", action="store_true")
    sp = sub.add_parser("small", parents=[common])
    sp.add_argument("file", nargs="?", default="-")
    sp.add_argument("--cap", type=int)
    sp.add_argument("--trees", action="store_true")
    sp = sub.add_parser("model", parents=[common])
    sp.add_argument("file", nargs="?", default="-")
    sp.add_argument("--route", choices=["auto", "small", "extend"], default="auto")
    sp.add_argument("--out-dir", help="also write the model, intermediate algebra and maps here")
    sp = sub.add_parser("verify-map", parents=[common])
    sp.add_argument("source")
    sp.add_argument("target")
    sp.add_argument("map")
    sp = sub.add_parser("examples", parents=[common])
    sp.add_argument("action", choices=["list", "emit"])
    sp.add_argument("name", nargs="?")
    return ap


def run(args):
    """Run one command, turning known failures into exit codes."""
    try:
        return COMMANDS[args.command](args)
    except MiddleDegreeObstruction as exc:
        return Outcome(OBSTRUCTION, {"error": "middle-degree-obstruction", "message": str(exc), "twist": exc.twist.report()}, str(exc))
    except (DocumentError, FieldError) as exc:
        return Outcome(MALFORMED, {"error": "malformed-input", "message": str(exc), "where": getattr(exc, "where", None)}, str(exc))
    except PreconditionError as exc:
        return Outcome(MALFORMED, {"error": "precondition", "message": str(exc)}, str(exc))
    except (AlgebraError, HodgeError, ExtensionError) as exc:
        return Outcome(FAILED, {"error": type(exc).__name__, "message": str(exc)}, str(exc))
    except OSError as exc:
        return Outcome(MALFORMED, {"error": "io", "message": str(exc)}, str(exc))


def _batch_one(argv_file):
    argv, path = argv_file
    args = build_parser().parse_args(argv)
    args.file = path
    args.batch = None
    res = run(args)
    return {"file": path, "exit": res.code, "result": _plain(res.payload), "summary": res.summary}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    if getattr(args, "batch", None):
        if not hasattr(args, "file"):
            print(json.dumps({"error": "batch", "message": "--batch needs a single-file command"}), file=sys.stdout)
            return MALFORMED
        files = sorted(os.path.join(args.batch, f) for f in os.listdir(args.batch) if f.endswith(".json"))
        jobs = [(argv, f) for f in files]
        with ProcessPoolExecutor() as pool:
            results = list(pool.map(_batch_one, jobs))
        for r in results:
            print(r["summary"], file=sys.stderr)
        sys.stdout.write(json.dumps(results, indent=2, ensure_ascii=False) + "\n")
        return max([r["exit"] for r in results] or [OK])
    res = run(args)
    payload = _plain(res.payload)
    if args.command == "examples" and args.action == "emit" and res.code == OK:
        sys.stdout.write(dumps(payload))
    else:
        sys.stdout.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    if res.summary:
        print(res.summary, file=sys.stderr)
    return res.code


if __name__ == "__main__":
    sys.exit(main())
