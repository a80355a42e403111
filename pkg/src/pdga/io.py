"""JSON documents for algebras (``cdga/1``) and maps (``cdga-map/1``).

Coefficients are written as strings (``"-3/2"``, or residues for F_p) so
that documents stay exact.  The product table lists each unordered pair
once, in basis order; the opposite order is filled in by graded
commutativity unless the document lists it explicitly.  Products with the
unit are implied.
"""

from __future__ import annotations

import json

from .algebra import CDGA, FreePresentation, GradedLinearMap, Orientation, build_truncated_free, sign
from .field import FieldError, parse_field

SCHEMA = "cdga/1"
MAP_SCHEMA = "cdga-map/1"


class DocumentError(ValueError):
    """Malformed document; ``where`` is a JSON-pointer-like location."""

    def __init__(self, where, message):
        super().__init__("%s: %s" % (where, message))
        self.where = where
        self.message = message


def field_spec(F):
    return F.name


def _coeff(c):
    return str(c)


def _reorder(a):
    """Basis indices sorted by degree, stable within a degree."""
    return sorted(range(len(a)), key=lambda i: (a.degrees[i], i))


def algebra_to_doc(a, orientation=None, name=None):
    order = _reorder(a)
    N = a.names
    degrees = {}
    for i in order:
        degrees.setdefault(str(a.degrees[i]), []).append(N[i])
    diff = []
    for i in order:
        for j in sorted(a.diff[i], key=order.index):
            diff.append([N[i], N[j], _coeff(a.diff[i][j])])
    prod = []
    pos = {i: k for k, i in enumerate(order)}
    for x in order:
        for y in order:
            if x == a.unit or y == a.unit:
                continue
            img = a.mult.get((x, y), {})
            if pos[x] > pos[y]:
                mirror = a.mult.get((y, x), {})
                s = sign(a.degrees[x] * a.degrees[y])
                if img == {k: c * s for k, c in mirror.items()}:
                    continue
                if not img:
                    # an explicit zero is needed to break the implied symmetry
                    prod.append([N[x], N[y], None, "0"])
                    continue
            for k in sorted(img, key=pos.get):
                prod.append([N[x], N[y], N[k], _coeff(img[k])])
    doc = {
        "schema": SCHEMA,
        "name": name or "",
        "field": field_spec(a.field),
        "degrees": degrees,
        "unit": N[a.unit],
        "differential": diff,
        "product": prod,
        "orientation": None,
        "truncation": a.truncation,
    }
    if orientation is not None:
        doc["orientation"] = {
            "degree": orientation.degree,
            "values": [[N[i], _coeff(orientation.values[i])] for i in sorted(orientation.values, key=pos.get) if orientation.values[i]],
        }
    p = a.presentation
    if p is not None:
        doc["presentation"] = {
            "generators": [[g, d] for g, d in p.generators],
            "differential": {g: [[m, str(c)] for m, c in terms] for g, terms in sorted(p.differential.items())},
            "truncation": p.truncation,
        }
    return doc


def _fmt(x, indent):
    pad = "  " * (indent + 1)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = ["%s%s: %s" % (pad, json.dumps(k, ensure_ascii=False), _fmt(v, indent + 1)) for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(x, list):
        if all(not isinstance(y, (list, dict)) for y in x):
            return json.dumps(x, ensure_ascii=False)
        return "[\n" + ",\n".join(pad + _fmt(y, indent + 1) for y in x) + "\n" + "  " * indent + "]"
    return json.dumps(x, ensure_ascii=False)


def dumps(doc):
    """JSON with one table row per line."""
    return _fmt(doc, 0) + "\n"


def emit(a, orientation=None, name=None):
    return dumps(algebra_to_doc(a, orientation, name))


def _need(doc, key, where, kind=None):
    if key not in doc:
        raise DocumentError("%s/%s" % (where, key), "missing")
    val = doc[key]
    if kind is not None and not isinstance(val, kind):
        raise DocumentError("%s/%s" % (where, key), "expected %s" % getattr(kind, "__name__", kind))
    return val


def _num(F, text, where):
    try:
        return F(text)
    except (FieldError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise DocumentError(where, "bad coefficient %r (%s)" % (text, exc))


def doc_to_algebra(doc):
    """Parse a ``cdga/1`` document into ``(CDGA, Orientation | None, name)``."""
    if not isinstance(doc, dict):
        raise DocumentError("", "document must be an object")
    if doc.get("schema") != SCHEMA:
        raise DocumentError("/schema", "expected %r, got %r" % (SCHEMA, doc.get("schema")))
    try:
        F = parse_field(doc.get("field", "Q"))
    except FieldError as exc:
        raise DocumentError("/field", str(exc))
    pres = doc.get("presentation")
    built = None
    if pres is not None:
        built = _from_presentation(pres, F)
    if "degrees" not in doc and built is not None:
        a = built
    else:
        a = _from_tables(doc, F)
        if built is not None:
            if a.names != built.names or a.degrees != built.degrees:
                raise DocumentError("/presentation", "basis does not match the tables")
            if a.diff != built.diff or a.mult != built.mult or a.truncation != built.truncation:
                raise DocumentError("/presentation", "structure does not match the tables")
            a = built
    orientation = None
    od = doc.get("orientation")
    if od is not None:
        if not isinstance(od, dict):
            raise DocumentError("/orientation", "expected object")
        deg = _need(od, "degree", "/orientation", int)
        vals = {}
        for k, entry in enumerate(_need(od, "values", "/orientation", list)):
            w = "/orientation/values/%d" % k
            if not isinstance(entry, list) or len(entry) != 2:
                raise DocumentError(w, "expected [name, coeff]")
            nm, c = entry
            if nm not in a.index:
                raise DocumentError(w, "unknown basis vector %r" % nm)
            i = a.index[nm]
            if a.degrees[i] != deg:
                raise DocumentError(w, "%r has degree %d, not %d" % (nm, a.degrees[i], deg))
            vals[i] = vals.get(i, F.zero) + _num(F, c, w)
        orientation = Orientation(deg, {i: c for i, c in vals.items() if c}, a)
    return a, orientation, doc.get("name") or ""


def _from_presentation(pres, F):
    w = "/presentation"
    if not isinstance(pres, dict):
        raise DocumentError(w, "expected object")
    gens = []
    for k, g in enumerate(_need(pres, "generators", w, list)):
        if not (isinstance(g, list) and len(g) == 2 and isinstance(g[0], str) and isinstance(g[1], int)):
            raise DocumentError("%s/generators/%d" % (w, k), "expected [name, degree]")
        gens.append((g[0], g[1]))
    diff = {}
    for g, terms in (pres.get("differential") or {}).items():
        if not isinstance(terms, list):
            raise DocumentError("%s/differential/%s" % (w, g), "expected list")
        diff[g] = [(t[0], t[1]) for t in terms]
    T = _need(pres, "truncation", w, int)
    try:
        return build_truncated_free(FreePresentation(gens, diff, T, F))
    except (ValueError, KeyError) as exc:
        raise DocumentError(w, str(exc))


def _from_tables(doc, F):
    degs = _need(doc, "degrees", "", dict)
    names, degrees = [], []
    for key in sorted(degs, key=lambda k: int(k) if str(k).lstrip("-").isdigit() else 10**9):
        if not str(key).isdigit():
            raise DocumentError("/degrees/%s" % key, "degree must be a non-negative integer")
        vals = degs[key]
        if not isinstance(vals, list):
            raise DocumentError("/degrees/%s" % key, "expected list of names")
        for nm in vals:
            if not isinstance(nm, str) or not nm:
                raise DocumentError("/degrees/%s" % key, "bad name %r" % (nm,))
            names.append(nm)
            degrees.append(int(key))
    if len(set(names)) != len(names):
        dup = sorted({n for n in names if names.count(n) > 1})
        raise DocumentError("/degrees", "duplicate names %s" % dup)
    index = {n: i for i, n in enumerate(names)}

    def look(nm, where):
        if nm not in index:
            raise DocumentError(where, "unknown basis vector %r" % (nm,))
        return index[nm]

    unit = look(_need(doc, "unit", ""), "/unit")
    if degrees[unit] != 0:
        raise DocumentError("/unit", "unit must have degree 0")
    diff = [{} for _ in names]
    for k, e in enumerate(doc.get("differential") or []):
        w = "/differential/%d" % k
        if not isinstance(e, list) or len(e) != 3:
            raise DocumentError(w, "expected [src, dst, coeff]")
        i, j = look(e[0], w), look(e[1], w)
        if degrees[j] != degrees[i] + 1:
            raise DocumentError(w, "differential must raise degree by one")
        diff[i][j] = diff[i].get(j, F.zero) + _num(F, e[2], w)
    T = doc.get("truncation")
    if T is not None and not isinstance(T, int):
        raise DocumentError("/truncation", "expected integer or null")
    mult = {}
    explicit = set()
    for k, e in enumerate(doc.get("product") or []):
        w = "/product/%d" % k
        if not isinstance(e, list) or len(e) != 4:
            raise DocumentError(w, "expected [a, b, dst, coeff]")
        i, j = look(e[0], w), look(e[1], w)
        explicit.add((i, j))
        slot = mult.setdefault((i, j), {})
        if e[2] is None:
            continue
        t = look(e[2], w)
        if degrees[t] != degrees[i] + degrees[j]:
            raise DocumentError(w, "product lands in the wrong degree")
        slot[t] = slot.get(t, F.zero) + _num(F, e[3], w)
    for (i, j), img in list(mult.items()):
        if (j, i) not in explicit:
            s = sign(degrees[i] * degrees[j])
            mult[(j, i)] = {t: c * s for t, c in img.items()}
    return CDGA(names, degrees, [{j: c for j, c in d.items() if c} for d in diff], mult, unit, F, T)


def parse(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError("line %d col %d" % (exc.lineno, exc.colno), exc.msg)
    return doc_to_algebra(doc)


def map_to_doc(f, source_name="", target_name=""):
    src, tgt = f.source, f.target
    images = []
    for i in _reorder(src):
        order = _reorder(tgt)
        for j in sorted(f.images[i], key=order.index):
            images.append([src.names[i], tgt.names[j], _coeff(f.images[i][j])])
    return {"schema": MAP_SCHEMA, "source": source_name, "target": target_name, "images": images}


def doc_to_map(doc, source, target):
    if not isinstance(doc, dict) or doc.get("schema") != MAP_SCHEMA:
        raise DocumentError("/schema", "expected %r" % MAP_SCHEMA)
    F = target.field
    images = [{} for _ in range(len(source))]
    for k, e in enumerate(_need(doc, "images", "", list)):
        w = "/images/%d" % k
        if not isinstance(e, list) or len(e) != 3:
            raise DocumentError(w, "expected [src, dst, coeff]")
        if e[0] not in source.index:
            raise DocumentError(w, "unknown source vector %r" % (e[0],))
        if e[1] not in target.index:
            raise DocumentError(w, "unknown target vector %r" % (e[1],))
        i, j = source.index[e[0]], target.index[e[1]]
        if source.degrees[i] != target.degrees[j]:
            raise DocumentError(w, "map must preserve degree")
        images[i][j] = images[i].get(j, F.zero) + _num(F, e[2], w)
    return GradedLinearMap(source, target, [{j: c for j, c in x.items() if c} for x in images])


def parse_map(text, source, target):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError("line %d col %d" % (exc.lineno, exc.colno), exc.msg)
    return doc_to_map(doc, source, target)
