"""JSON files for every value kind: a validating loader and a deterministic emitter.

One top-level object per file; the expected kind is declared by the caller,
not stored in the file.  The forms:

  lattice   {"kind": "powerset", "carrier": [..]}
            {"kind": "explicit", "elements": [..], "leq": [[i, j], ..]}
  invsemi   {"elements": [..], "mult": [[i, j, k], ..], "inv": [[i, j], ..]}
  groupoid  {"objects": [..], "arrows": [{"id", "dom", "cod", "inv"}, ..],
             "comp": [[g, h, gh], ..], "unit": {obj: arrow}}
  quantale  {"lattice": .., "mult_atoms": [[i, j, elem], ..],
             "invol": [elem, ..], "unit": elem}
  gset      {"groupoid": .., "points": [..], "anchor": {point: obj},
             "side": "left" | "right", "act": [[g, x, y], ..]}
  algmorph  {"source": .., "target": .., "anchor": {arrow: obj},
             "act": [[g, k, k'], ..]}
  hom       {"source": .., "target": .., "images": [[i, elem], ..]}

Tables over lattice elements use element indices (for a powerset lattice the
index is the subset bitmask); ``mult_atoms`` and hom ``images`` index the
join-irreducibles by their position in canonical order.  Groupoid ``comp``,
``unit`` and action tables refer to arrows, objects and points by label.
Labels may be any JSON scalar or nested array; arrays are read back as tuples
so loaded labels compare equal to the originals.  Keys of ``anchor``/``unit``
objects are the label itself when it is a string and its compact JSON
encoding otherwise.

Loading validates the laws of the declared kind (for quantales, including
the inverse-quantal-frame axioms) and reports failures as ValidationError
with a JSON-pointer location.  Emission sorts keys and uses canonical
element order throughout, so equal values produce identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .actions import GSet, validate_gset
from .bimodules import AlgebraicMorphism, validate_algmorph
from .errors import InvalidSpec, ParseError, SchemaError, ValidationError
from .groupoid import FiniteGroupoid, validate_groupoid
from .invsemi import FiniteInverseSemigroup, validate_inverse_semigroup
from .quantale import InvolutiveQuantale, QuantaleHom, validate_iqf, validate_quantale
from .suplattice import FiniteSupLattice, sup_hom_from_ji, validate_sup_hom


def _freeze(v):
    return tuple(_freeze(x) for x in v) if isinstance(v, list) else v


def _thaw(v):
    return [_thaw(x) for x in v] if isinstance(v, tuple) else v


def _key(label) -> str:
    if isinstance(label, str):
        return label
    return json.dumps(_thaw(label), sort_keys=True, separators=(",", ":"))


def _schema(cond: bool, msg: str, where: str):
    if not cond:
        raise SchemaError(f"{msg} (at {where or '/'})")


def _fields(v, required: set, where: str, optional: set = frozenset()):
    _schema(isinstance(v, dict), "expected an object", where)
    for name in sorted(required - v.keys()):
        _schema(False, f"missing field {name!r}", where)
    for name in sorted(v.keys() - required - optional):
        _schema(False, f"unexpected field {name!r}", where)


def _int(v, where) -> int:
    _schema(type(v) is int, "expected an integer", where)
    return v


def _row(v, width: int, where) -> list:
    _schema(isinstance(v, list) and len(v) == width,
            f"expected an array of length {width}", where)
    return v


def _labels(v, where) -> tuple:
    _schema(isinstance(v, list), "expected an array", where)
    out = tuple(_freeze(x) for x in v)
    if len(set(out)) != len(out):
        dup = next(x for i, x in enumerate(out) if x in out[:i])
        raise ValidationError(f"duplicate label {dup!r}", where)
    return out


def _index(table: dict, label, where) -> int:
    got = table.get(label)
    if got is None:
        raise ValidationError(f"unknown label {label!r}", where)
    return got


def _law_message(check) -> str:
    if check.witness is None:
        return check.law
    return f"{check.law}; witness {check.witness!r}"


# ---------------------------------------------------------------------------
# sup-lattices


def _form_lattice(lat: FiniteSupLattice) -> dict:
    if lat.is_powerset:
        return {"kind": "powerset", "carrier": [_thaw(m) for m in lat.carrier]}
    pairs = [[i, j] for i in range(lat.n) for j in range(lat.n) if lat.leq(i, j)]
    return {"kind": "explicit",
            "elements": [_thaw(lat.label(i)) for i in range(lat.n)],
            "leq": pairs}


def _decode_lattice(v, where: str) -> FiniteSupLattice:
    _schema(isinstance(v, dict), "expected an object", where)
    kind = v.get("kind")
    if kind == "powerset":
        _fields(v, {"kind", "carrier"}, where)
        return FiniteSupLattice.powerset(_labels(v["carrier"], where + "/carrier"))
    if kind == "explicit":
        _fields(v, {"kind", "elements", "leq"}, where)
        labels = _labels(v["elements"], where + "/elements")
        n = len(labels)
        lw = where + "/leq"
        _schema(isinstance(v["leq"], list), "expected an array", lw)
        pairs = []
        for t, entry in enumerate(v["leq"]):
            i, j = (_int(x, f"{lw}/{t}") for x in _row(entry, 2, f"{lw}/{t}"))
            if not (0 <= i < n and 0 <= j < n):
                raise ValidationError(f"leq pair [{i}, {j}] out of range", f"{lw}/{t}")
            pairs.append((i, j))
        lat = FiniteSupLattice.from_leq_pairs(labels, pairs)
        rep = lat.validate()
        if not rep.ok:
            raise ValidationError(_law_message(rep.first_failure()), lw)
        return lat
    _schema(False, 'field "kind" must be "powerset" or "explicit"', where + "/kind")


# ---------------------------------------------------------------------------
# inverse semigroups


def _form_invsemi(s: FiniteInverseSemigroup) -> dict:
    return {"elements": [_thaw(x) for x in s.labels],
            "mult": [[i, j, s.mult[i][j]] for i in range(s.n) for j in range(s.n)],
            "inv": [[i, s.inv[i]] for i in range(s.n)]}


def _decode_invsemi(v, where: str) -> FiniteInverseSemigroup:
    _fields(v, {"elements", "mult", "inv"}, where)
    labels = _labels(v["elements"], where + "/elements")
    n = len(labels)
    mw = where + "/mult"
    _schema(isinstance(v["mult"], list), "expected an array", mw)
    rows: list[list] = [[None] * n for _ in range(n)]
    for t, entry in enumerate(v["mult"]):
        i, j, k = (_int(x, f"{mw}/{t}") for x in _row(entry, 3, f"{mw}/{t}"))
        if not (0 <= i < n and 0 <= j < n and 0 <= k < n):
            raise ValidationError(f"mult triple [{i}, {j}, {k}] out of range", f"{mw}/{t}")
        if rows[i][j] is not None:
            raise ValidationError(f"duplicate mult triple for ({i}, {j})", f"{mw}/{t}")
        rows[i][j] = k
    for i in range(n):
        for j in range(n):
            if rows[i][j] is None:
                raise ValidationError(f'missing "mult" triple for ({i}, {j})', mw)
    iw = where + "/inv"
    _schema(isinstance(v["inv"], list), "expected an array", iw)
    inv: list = [None] * n
    for t, entry in enumerate(v["inv"]):
        i, j = (_int(x, f"{iw}/{t}") for x in _row(entry, 2, f"{iw}/{t}"))
        if not (0 <= i < n and 0 <= j < n):
            raise ValidationError(f"inv pair [{i}, {j}] out of range", f"{iw}/{t}")
        if inv[i] is not None:
            raise ValidationError(f"duplicate inv pair for {i}", f"{iw}/{t}")
        inv[i] = j
    for i in range(n):
        if inv[i] is None:
            raise ValidationError(f'missing "inv" pair for {i}', iw)
    sem = FiniteInverseSemigroup(labels, rows, inv)
    rep = validate_inverse_semigroup(sem)
    if not rep.ok:
        raise ValidationError(_law_message(rep.first_failure()), where or "/")
    return sem


# ---------------------------------------------------------------------------
# groupoids


def _form_groupoid(g: FiniteGroupoid) -> dict:
    arrows = [{"id": _thaw(g.arrows[a]),
               "dom": _thaw(g.objects[g.dom[a]]),
               "cod": _thaw(g.objects[g.cod[a]]),
               "inv": _thaw(g.arrows[g.inv[a]])}
              for a in range(g.n_arr)]
    comp = [[_thaw(g.arrows[a]), _thaw(g.arrows[b]), _thaw(g.arrows[c])]
            for (a, b), c in sorted(g.comp.items())]
    unit = {_key(g.objects[x]): _thaw(g.arrows[g.unit[x]]) for x in range(g.n_obj)}
    return {"objects": [_thaw(x) for x in g.objects],
            "arrows": arrows, "comp": comp, "unit": unit}


def _decode_groupoid(v, where: str) -> FiniteGroupoid:
    _fields(v, {"objects", "arrows", "comp"}, where, optional={"unit"})
    objects = _labels(v["objects"], where + "/objects")
    obj_index = {x: i for i, x in enumerate(objects)}
    aw = where + "/arrows"
    _schema(isinstance(v["arrows"], list), "expected an array", aw)
    ids, dom, cod, inv_ids = [], [], [], []
    for t, entry in enumerate(v["arrows"]):
        _fields(entry, {"id", "dom", "cod", "inv"}, f"{aw}/{t}")
        ids.append(_freeze(entry["id"]))
        dom.append(_index(obj_index, _freeze(entry["dom"]), f"{aw}/{t}/dom"))
        cod.append(_index(obj_index, _freeze(entry["cod"]), f"{aw}/{t}/cod"))
        inv_ids.append(_freeze(entry["inv"]))
    if len(set(ids)) != len(ids):
        dup = next(x for i, x in enumerate(ids) if x in ids[:i])
        raise ValidationError(f"duplicate arrow id {dup!r}", aw)
    arr_index = {x: i for i, x in enumerate(ids)}
    inv = [_index(arr_index, x, f"{aw}/{t}/inv") for t, x in enumerate(inv_ids)]

    cw = where + "/comp"
    _schema(isinstance(v["comp"], list), "expected an array", cw)
    comp: dict[tuple[int, int], int] = {}
    for t, entry in enumerate(v["comp"]):
        g, h, gh = (_index(arr_index, _freeze(x), f"{cw}/{t}")
                    for x in _row(entry, 3, f"{cw}/{t}"))
        if (g, h) in comp:
            raise ValidationError(
                f"duplicate comp triple for ({ids[g]!r}, {ids[h]!r})", f"{cw}/{t}")
        if cod[g] != dom[h]:
            raise ValidationError(
                f'non-composable "comp" triple ({ids[g]!r}, {ids[h]!r})', f"{cw}/{t}")
        comp[(g, h)] = gh
    for g in range(len(ids)):
        for h in range(len(ids)):
            if cod[g] == dom[h] and (g, h) not in comp:
                raise ValidationError(
                    f'missing "comp" triple for ({ids[g]!r}, {ids[h]!r})', cw)

    if "unit" in v:
        uw = where + "/unit"
        _schema(isinstance(v["unit"], dict), "expected an object", uw)
        key_index = {_key(x): i for i, x in enumerate(objects)}
        if len(key_index) != len(objects):
            raise ValidationError("object labels collide as keys", uw)
        unit: list = [None] * len(objects)
        for key, val in v["unit"].items():
            x = key_index.get(key)
            if x is None:
                raise ValidationError(f"unit for unknown object {key!r}", uw)
            unit[x] = _index(arr_index, _freeze(val), f"{uw}/{key}")
        for x, u in enumerate(unit):
            if u is None:
                raise ValidationError(f"missing unit for object {objects[x]!r}", uw)
    else:
        unit = []
        for x in range(len(objects)):
            found = [u for u in range(len(ids))
                     if dom[u] == cod[u] == x
                     and all(comp[(u, h)] == h for h in range(len(ids)) if dom[h] == x)
                     and all(comp[(g, u)] == g for g in range(len(ids)) if cod[g] == x)]
            if len(found) != 1:
                raise ValidationError(
                    f"cannot infer a unit arrow at object {objects[x]!r}", aw)
            unit.append(found[0])

    gpd = FiniteGroupoid(objects, ids, dom, cod, unit, inv, comp)
    rep = validate_groupoid(gpd)
    if not rep.ok:
        raise ValidationError(_law_message(rep.first_failure()), where or "/")
    return gpd


# ---------------------------------------------------------------------------
# quantales


def _form_quantale(q: InvolutiveQuantale) -> dict:
    jis = q.lattice.join_irreducibles()
    k = len(jis)
    return {"lattice": _form_lattice(q.lattice),
            "mult_atoms": [[i, j, q.product(jis[i], jis[j])]
                           for i in range(k) for j in range(k)],
            "invol": [q.involution(jis[i]) for i in range(k)],
            "unit": q.unit}


def _decode_quantale(v, where: str) -> InvolutiveQuantale:
    _fields(v, {"lattice", "mult_atoms", "invol", "unit"}, where)
    lat = _decode_lattice(v["lattice"], where + "/lattice")
    jis = lat.join_irreducibles()
    k = len(jis)
    mw = where + "/mult_atoms"
    _schema(isinstance(v["mult_atoms"], list), "expected an array", mw)
    ji_mult: dict[tuple[int, int], int] = {}
    for t, entry in enumerate(v["mult_atoms"]):
        i, j, elem = (_int(x, f"{mw}/{t}") for x in _row(entry, 3, f"{mw}/{t}"))
        if not (0 <= i < k and 0 <= j < k):
            raise ValidationError(f"join-irreducible index out of range in [{i}, {j}]",
                                  f"{mw}/{t}")
        if not 0 <= elem < lat.n:
            raise ValidationError(f"element {elem} out of range", f"{mw}/{t}")
        if (jis[i], jis[j]) in ji_mult:
            raise ValidationError(f"duplicate mult_atoms triple for ({i}, {j})",
                                  f"{mw}/{t}")
        ji_mult[(jis[i], jis[j])] = elem
    if len(ji_mult) != k * k:
        missing = next((i, j) for i in range(k) for j in range(k)
                       if (jis[i], jis[j]) not in ji_mult)
        raise ValidationError(f'missing "mult_atoms" triple for {missing}', mw)
    iw = where + "/invol"
    _schema(isinstance(v["invol"], list) and len(v["invol"]) == k,
            f"expected an array of length {k}", iw)
    ji_invol = {}
    for i, elem in enumerate(v["invol"]):
        _int(elem, f"{iw}/{i}")
        if not 0 <= elem < lat.n:
            raise ValidationError(f"element {elem} out of range", f"{iw}/{i}")
        ji_invol[jis[i]] = elem
    unit = _int(v["unit"], where + "/unit")
    if not 0 <= unit < lat.n:
        raise ValidationError(f"element {unit} out of range", where + "/unit")
    q = InvolutiveQuantale(lat, ji_mult, ji_invol, unit,
                           atom_labels=lat.carrier if lat.is_powerset else None)
    rep = validate_quantale(q)
    if not rep.ok:
        raise ValidationError(_law_message(rep.first_failure()), where or "/")
    rep = validate_iqf(q)
    if not rep.ok:
        raise ValidationError(_law_message(rep.first_failure()), where or "/")
    return q


# ---------------------------------------------------------------------------
# groupoid actions


def _form_gset(a: GSet) -> dict:
    gpd = a.groupoid
    anchor = {_key(a.points[x]): _thaw(gpd.objects[a.anchor[x]])
              for x in range(a.n_pts)}
    act = [[_thaw(gpd.arrows[g]), _thaw(a.points[x]), _thaw(a.points[y])]
           for (g, x), y in sorted(a.act.items())]
    return {"groupoid": _form_groupoid(gpd), "points": [_thaw(p) for p in a.points],
            "anchor": anchor, "side": a.side, "act": act}


def _decode_gset(v, where: str) -> GSet:
    _fields(v, {"groupoid", "points", "anchor", "side", "act"}, where)
    gpd = _decode_groupoid(v["groupoid"], where + "/groupoid")
    points = _labels(v["points"], where + "/points")
    side = v["side"]
    _schema(side in ("left", "right"), 'field "side" must be "left" or "right"',
            where + "/side")
    uw = where + "/anchor"
    _schema(isinstance(v["anchor"], dict), "expected an object", uw)
    key_index = {_key(p): i for i, p in enumerate(points)}
    if len(key_index) != len(points):
        raise ValidationError("point labels collide as keys", where + "/points")
    obj_index = {x: i for i, x in enumerate(gpd.objects)}
    anchor: list = [None] * len(points)
    for key, val in v["anchor"].items():
        x = key_index.get(key)
        if x is None:
            raise ValidationError(f"anchor for unknown point {key!r}", uw)
        anchor[x] = _index(obj_index, _freeze(val), f"{uw}/{key}")
    for x, o in enumerate(anchor):
        if o is None:
            raise ValidationError(f"missing anchor for point {points[x]!r}", uw)
    arr_index = {a: i for i, a in enumerate(gpd.arrows)}
    aw = where + "/act"
    _schema(isinstance(v["act"], list), "expected an array", aw)
    act: dict[tuple[int, int], int] = {}
    for t, entry in enumerate(v["act"]):
        g_raw, x_raw, y_raw = _row(entry, 3, f"{aw}/{t}")
        g = _index(arr_index, _freeze(g_raw), f"{aw}/{t}")
        x = _index(key_index, _key(_freeze(x_raw)), f"{aw}/{t}")
        y = _index(key_index, _key(_freeze(y_raw)), f"{aw}/{t}")
        if (g, x) in act:
            raise ValidationError(
                f"duplicate act triple for ({gpd.arrows[g]!r}, {points[x]!r})",
                f"{aw}/{t}")
        act[(g, x)] = y
    a = GSet(gpd, points, anchor, act, side=side)
    rep = validate_gset(a)
    if not rep.ok:
        first = rep.first_failure()
        loc = aw if "defined" in first.law else (where or "/")
        raise ValidationError(_law_message(first), loc)
    return a


# ---------------------------------------------------------------------------
# algebraic morphisms


def _form_algmorph(a: AlgebraicMorphism) -> dict:
    src, tgt = a.source, a.target
    anchor = {_key(tgt.arrows[k]): _thaw(src.objects[a.anchor[k]])
              for k in range(tgt.n_arr)}
    act = [[_thaw(src.arrows[g]), _thaw(tgt.arrows[k]), _thaw(tgt.arrows[k2])]
           for (g, k), k2 in sorted(a.act.items())]
    return {"source": _form_groupoid(src), "target": _form_groupoid(tgt),
            "anchor": anchor, "act": act}


def _decode_algmorph(v, where: str) -> AlgebraicMorphism:
    _fields(v, {"source", "target", "anchor", "act"}, where)
    src = _decode_groupoid(v["source"], where + "/source")
    tgt = _decode_groupoid(v["target"], where + "/target")
    uw = where + "/anchor"
    _schema(isinstance(v["anchor"], dict), "expected an object", uw)
    key_index = {_key(a): i for i, a in enumerate(tgt.arrows)}
    if len(key_index) != tgt.n_arr:
        raise ValidationError("arrow labels collide as keys", where + "/target")
    obj_index = {x: i for i, x in enumerate(src.objects)}
    anchor: list = [None] * tgt.n_arr
    for key, val in v["anchor"].items():
        kk = key_index.get(key)
        if kk is None:
            raise ValidationError(f"anchor for unknown arrow {key!r}", uw)
        anchor[kk] = _index(obj_index, _freeze(val), f"{uw}/{key}")
    for kk, o in enumerate(anchor):
        if o is None:
            raise ValidationError(f"missing anchor for arrow {tgt.arrows[kk]!r}", uw)
    src_index = {a: i for i, a in enumerate(src.arrows)}
    aw = where + "/act"
    _schema(isinstance(v["act"], list), "expected an array", aw)
    act: dict[tuple[int, int], int] = {}
    for t, entry in enumerate(v["act"]):
        g_raw, k_raw, k2_raw = _row(entry, 3, f"{aw}/{t}")
        g = _index(src_index, _freeze(g_raw), f"{aw}/{t}")
        kk = _index(key_index, _key(_freeze(k_raw)), f"{aw}/{t}")
        k2 = _index(key_index, _key(_freeze(k2_raw)), f"{aw}/{t}")
        if (g, kk) in act:
            raise ValidationError(
                f"duplicate act triple for ({src.arrows[g]!r}, {tgt.arrows[kk]!r})",
                f"{aw}/{t}")
        act[(g, kk)] = k2
    am = AlgebraicMorphism(src, tgt, anchor, act)
    rep = validate_algmorph(am)
    if not rep.ok:
        first = rep.first_failure()
        loc = aw if "defined" in first.law else (where or "/")
        raise ValidationError(_law_message(first), loc)
    return am


# ---------------------------------------------------------------------------
# quantale homomorphisms


def _form_hom(h: QuantaleHom) -> dict:
    jis = h.source.lattice.join_irreducibles()
    return {"source": _form_quantale(h.source), "target": _form_quantale(h.target),
            "images": [[i, h.map.images[jis[i]]] for i in range(len(jis))]}


def _decode_hom(v, where: str) -> QuantaleHom:
    _fields(v, {"source", "target", "images"}, where)
    q = _decode_quantale(v["source"], where + "/source")
    r = _decode_quantale(v["target"], where + "/target")
    jis = q.lattice.join_irreducibles()
    k = len(jis)
    iw = where + "/images"
    _schema(isinstance(v["images"], list), "expected an array", iw)
    ji_images: dict[int, int] = {}
    for t, entry in enumerate(v["images"]):
        i, elem = (_int(x, f"{iw}/{t}") for x in _row(entry, 2, f"{iw}/{t}"))
        if not 0 <= i < k:
            raise ValidationError(f"join-irreducible index {i} out of range", f"{iw}/{t}")
        if not 0 <= elem < r.lattice.n:
            raise ValidationError(f"element {elem} out of range", f"{iw}/{t}")
        if jis[i] in ji_images:
            raise ValidationError(f"duplicate image for join-irreducible {i}", f"{iw}/{t}")
        ji_images[jis[i]] = elem
    if len(ji_images) != k:
        missing = next(i for i in range(k) if jis[i] not in ji_images)
        raise ValidationError(f'missing "images" pair for join-irreducible {missing}', iw)
    hom = QuantaleHom(q, r, sup_hom_from_ji(q.lattice, r.lattice, ji_images))
    for i in range(k):
        if hom.map.images[jis[i]] != ji_images[jis[i]]:
            raise ValidationError(
                f"image of join-irreducible {i} does not agree with the "
                f"join-extension of the assignment", iw)
    rep = validate_sup_hom(hom.map)
    if not rep.ok:
        raise ValidationError(_law_message(rep.first_failure()), iw)
    return hom


# ---------------------------------------------------------------------------
# the public surface


_DECODERS = {
    "lattice": _decode_lattice,
    "invsemi": _decode_invsemi,
    "groupoid": _decode_groupoid,
    "quantale": _decode_quantale,
    "gset": _decode_gset,
    "algmorph": _decode_algmorph,
    "hom": _decode_hom,
}

KINDS = tuple(sorted(_DECODERS))

_FORMS = [
    (FiniteSupLattice, _form_lattice),
    (FiniteInverseSemigroup, _form_invsemi),
    (FiniteGroupoid, _form_groupoid),
    (InvolutiveQuantale, _form_quantale),
    (GSet, _form_gset),
    (AlgebraicMorphism, _form_algmorph),
    (QuantaleHom, _form_hom),
]


def decode_value(value, kind: str, where: str = ""):
    """Validate an already-parsed JSON value of the given kind."""
    decoder = _DECODERS.get(kind)
    if decoder is None:
        raise InvalidSpec(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    return decoder(value, where)


def load_instance(path, kind: str):
    """Read, parse and validate one JSON file of the given kind."""
    if kind not in _DECODERS:
        raise InvalidSpec(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    return decode_value(value, kind)


def form(value) -> dict:
    """The JSON-ready dict for a value of any serializable kind."""
    for cls, encoder in _FORMS:
        if isinstance(value, cls):
            return encoder(value)
    if hasattr(value, "as_dict"):
        return value.as_dict()
    if isinstance(value, dict):
        return value
    raise InvalidSpec(f"cannot serialize a {type(value).__name__}")


def _count(n: int, noun: str) -> str:
    return f"{n} {noun}{'' if n == 1 else 's'}"


def _summary(value) -> str:
    if hasattr(value, "text_summary"):
        return value.text_summary()
    if isinstance(value, FiniteSupLattice):
        if value.is_powerset:
            return (f"powerset sup-lattice on {_count(len(value.carrier), 'atom')} "
                    f"({_count(value.n, 'element')})")
        return (f"explicit sup-lattice with {_count(value.n, 'element')}, "
                f"{len(value.join_irreducibles())} join-irreducible")
    if isinstance(value, FiniteInverseSemigroup):
        idem = sum(1 for i in range(value.n) if value.mult[i][i] == i)
        return (f"inverse semigroup with {_count(value.n, 'element')}, "
                f"{_count(idem, 'idempotent')}")
    if isinstance(value, FiniteGroupoid):
        return (f"groupoid with {_count(value.n_obj, 'object')}, "
                f"{_count(value.n_arr, 'arrow')}")
    if isinstance(value, InvolutiveQuantale):
        return (f"involutive quantale on {_count(value.lattice.n, 'element')}, "
                f"unit {value.element_label(value.unit)}")
    if isinstance(value, GSet):
        return (f"{value.side} action on {_count(value.n_pts, 'point')} over a "
                f"groupoid with {_count(value.groupoid.n_obj, 'object')}")
    if isinstance(value, AlgebraicMorphism):
        return (f"algebraic morphism: {value.source.n_arr}-arrow groupoid acting "
                f"on {_count(value.target.n_arr, 'arrow')}")
    if isinstance(value, QuantaleHom):
        return (f"quantale hom on {len(value.source.lattice.join_irreducibles())} "
                f"join-irreducibles")
    return json.dumps(form(value), sort_keys=True, separators=(",", ":"))


def emit(value, fmt: str = "json") -> bytes:
    """Deterministic bytes for a value: sorted keys, canonical element order."""
    if fmt == "json":
        return (json.dumps(form(value), sort_keys=True, indent=2) + "\n").encode()
    if fmt == "text-summary":
        return (_summary(value) + "\n").encode()
    raise InvalidSpec(f'unknown format {fmt!r}; expected "json" or "text-summary"')
