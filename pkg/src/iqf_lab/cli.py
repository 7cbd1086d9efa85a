"""The iqf-lab command.

Every subcommand works on JSON files in the formats of the serialize
module and writes either text or JSON, to stdout or to ``--out``.  Exit
codes: 0 when the command succeeds and any report it produced is clean,
1 when a verification report contains failures, 2 on unreadable or
mathematically invalid input, and 3 when a size or search budget was
exceeded (a partial report is still written when one is available).

``--budget N`` clips sizes: for verify-all it shrinks the instance
grids, for the enumeration commands it caps the number of candidates
searched.  The environment variable IQF_LAB_BUDGET supplies the same
number when the flag is absent.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .actions import fibered_pairs, invariant_elements, module_of_gset, \
    tensor_over_Q
from .bimodules import (algmorph_to_hom, compose_algmorphs,
                        enumerate_algmorphs, hom_to_algmorph)
from .errors import (AnchorsIncompatible, BudgetExceeded, CarrierTooLarge,
                     InvalidSpec, IqfLabError, ParseError, SchemaError,
                     SearchBudgetExceeded)
from .groupoid import build_standard
from .quantale import (QuantaleHom, check_roundtrips, enumerate_unital_homs,
                       groupoid_of_quantale, hom_flags, quantale_of_groupoid)
from .serialize import KINDS, decode_value, emit, form
from .suplattice import enumerate_sup_homs
from .verify import Budget, verify_all

_KIND_MARKS = (
    ("lattice", ("kind",)),
    ("quantale", ("mult_atoms",)),
    ("groupoid", ("objects", "arrows")),
    ("invsemi", ("elements", "mult")),
    ("gset", ("groupoid", "points")),
    ("hom", ("images", "source")),
    ("algmorph", ("anchor", "source")),
)


def _sniff_kind(doc) -> str:
    """Guess the kind of a parsed document from its top-level keys."""
    if isinstance(doc, dict):
        for kind, marks in _KIND_MARKS:
            if all(mark in doc for mark in marks):
                return kind
    raise SchemaError("cannot tell what kind of object this file holds; "
                      "pass --kind explicitly")


def _read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def _load(path, kind: str = "auto"):
    doc = _read_json(path)
    if kind == "auto":
        kind = _sniff_kind(doc)
    return kind, decode_value(doc, kind)


def _summary_line(value) -> str:
    return emit(value, "text-summary").decode().strip()


def _deliver(args, payload, text: str) -> None:
    if args.format == "json":
        data = emit(payload, "json")
    else:
        data = text.rstrip("\n").encode() + b"\n"
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8"))


def _budget_arg(args) -> int | None:
    """The --budget value, falling back to IQF_LAB_BUDGET."""
    value = args.budget
    if value is None:
        raw = os.environ.get("IQF_LAB_BUDGET")
        if raw is None:
            return None
        try:
            value = int(raw)
        except ValueError:
            raise InvalidSpec(
                f"IQF_LAB_BUDGET must be an integer, got {raw!r}") from None
    if value < 1:
        raise InvalidSpec(f"budget must be at least 1, got {value}")
    return value


def _plural(n: int, noun: str) -> str:
    return f"{n} {noun}{'' if n == 1 else 's'}"


def _report_text(rep) -> str:
    lines = []
    for c in rep.checks:
        mark = "ok  " if c.ok else "FAIL"
        tail = "" if c.ok else f"  witness={c.witness!r}"
        lines.append(f"{mark} {c.law}{tail}")
    lines.append(rep.summary())
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_validate(args) -> int:
    kind, value = _load(args.file, args.kind)
    summary = _summary_line(value)
    _deliver(args, {"kind": kind, "valid": True, "summary": summary},
             f"valid {kind}: {summary}")
    return 0


def _cmd_build(args) -> int:
    gpd = build_standard(_read_json(args.file))
    _deliver(args, form(gpd), _summary_line(gpd))
    return 0


def _cmd_quantalize(args) -> int:
    _, gpd = _load(args.file, "groupoid")
    q = quantale_of_groupoid(gpd)
    _deliver(args, form(q), _summary_line(q))
    return 0


def _cmd_groupoidify(args) -> int:
    _, q = _load(args.file, "quantale")
    gpd = groupoid_of_quantale(q)
    _deliver(args, form(gpd), _summary_line(gpd))
    return 0


def _cmd_roundtrip(args) -> int:
    kind, value = _load(args.file, args.kind)
    if kind not in ("groupoid", "quantale"):
        raise InvalidSpec(f"roundtrip works on groupoids and quantales, "
                          f"not on a {kind}")
    rep = check_roundtrips(value)
    _deliver(args, rep.to_jsonable(), _report_text(rep))
    return 0 if rep.ok else 1


_FLAG_ORDER = ("multiplicative", "unital", "involutive", "finite_meet", "lax")


def _cmd_homs(args) -> int:
    _, q = _load(args.source, "quantale")
    _, r = _load(args.target, "quantale")
    budget = _budget_arg(args)
    kw = {} if budget is None else {"budget": budget}
    if args.lax:
        homs = [QuantaleHom(q, r, m)
                for m in enumerate_sup_homs(q.lattice, r.lattice, **kw)]
    else:
        homs = enumerate_unital_homs(q, r, **kw)
    flagged = [(h, hom_flags(h)) for h in homs]
    if args.lax:
        flagged = [(h, f) for h, f in flagged if f["lax"]]
    if args.unital:
        flagged = [(h, f) for h, f in flagged if f["unital"]]
    if args.finite_meet:
        flagged = [(h, f) for h, f in flagged if f["finite_meet"]]

    jis = q.lattice.join_irreducibles()
    lines = [f"{_plural(len(flagged), 'hom')} on "
             f"{_plural(len(jis), 'join-irreducible')}"]
    for i, (h, f) in enumerate(flagged):
        marks = ", ".join(name for name in _FLAG_ORDER if f[name])
        images = [h.map.images[j] for j in jis]
        lines.append(f"{i}: images {images} [{marks}]")
    _deliver(args, {"count": len(flagged),
                    "homs": [form(h) for h, _ in flagged],
                    "flags": [f for _, f in flagged]},
             "\n".join(lines))
    return 0


def _cmd_tensor(args) -> int:
    _, a = _load(args.first, "gset")
    _, b = _load(args.second, "gset")
    if {a.side, b.side} != {"right", "left"}:
        raise InvalidSpec(f"tensor needs one right and one left action, "
                          f"got {a.side} and {b.side}")
    xr, yl = (a, b) if a.side == "right" else (b, a)
    if xr.groupoid != yl.groupoid:
        raise AnchorsIncompatible("the two actions live over different "
                                  "groupoids")
    inv_lat, _, masks = tensor_over_Q(xr, yl)
    pairs = fibered_pairs(xr, yl)
    _deliver(args, {"fibered_pairs": len(pairs),
                    "pair_indices": [[i, j] for i, j in pairs],
                    "elements": inv_lat.n,
                    "masks": list(masks),
                    "lattice": form(inv_lat)},
             f"tensor: {_plural(inv_lat.n, 'element')} over "
             f"{_plural(len(pairs), 'fibered pair')}")
    return 0


def _cmd_orbits(args) -> int:
    _, a = _load(args.file, "gset")
    parent = list(range(a.n_pts))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for (_, x), y in a.act.items():
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry
    classes: dict[int, list[int]] = {}
    for i in range(a.n_pts):
        classes.setdefault(find(i), []).append(i)
    points = form(a)["points"]
    orbits = sorted((sorted((points[i] for i in idxs), key=str)
                     for idxs in classes.values()), key=str)
    invariants = invariant_elements(module_of_gset(a)).n
    lines = [f"{_plural(len(orbits), 'orbit')}, "
             f"{_plural(invariants, 'invariant element')}"]
    lines.extend(f"  {orbit}" for orbit in orbits)
    _deliver(args, {"orbits": orbits, "count": len(orbits),
                    "invariants": invariants},
             "\n".join(lines))
    return 0


def _cmd_algmorph_enumerate(args) -> int:
    _, gs = _load(args.source, "groupoid")
    _, gt = _load(args.target, "groupoid")
    budget = _budget_arg(args)
    kw = {} if budget is None else {"budget": budget}
    morphs = enumerate_algmorphs(gs, gt, **kw)
    lines = [_plural(len(morphs), "algebraic morphism")]
    lines.extend(f"{i}: {_summary_line(a)}" for i, a in enumerate(morphs))
    _deliver(args, {"count": len(morphs),
                    "morphisms": [form(a) for a in morphs]},
             "\n".join(lines))
    return 0


def _cmd_algmorph_compose(args) -> int:
    _, a1 = _load(args.first, "algmorph")
    _, a2 = _load(args.second, "algmorph")
    out = compose_algmorphs(a1, a2)
    _deliver(args, form(out), _summary_line(out))
    return 0


def _cmd_algmorph_tohom(args) -> int:
    _, a = _load(args.file, "algmorph")
    hom = algmorph_to_hom(a)
    _deliver(args, form(hom), _summary_line(hom))
    return 0


def _cmd_algmorph_fromhom(args) -> int:
    _, h = _load(args.file, "hom")
    out = hom_to_algmorph(h)
    _deliver(args, form(out), _summary_line(out))
    return 0


def _cmd_verify_all(args) -> int:
    n = _budget_arg(args)
    budget = Budget() if n is None else Budget.from_size(n)
    report = verify_all(budget)
    _deliver(args, report.as_dict(), report.text_summary())
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------
# the parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iqf-lab",
        description="Finite etale groupoids, inverse quantal frames, and "
                    "the maps between them.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None, metavar="N",
                        help="size bound: instance grids for verify-all, "
                             "candidate cap for enumerations "
                             "(default from IQF_LAB_BUDGET)")
    common.add_argument("--format", choices=("json", "text"), default="text",
                        help="output format (default text)")
    common.add_argument("--out", default=None, metavar="PATH",
                        help="write the output to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common],
                       help="parse and validate one JSON file")
    p.add_argument("file")
    p.add_argument("--kind", choices=("auto",) + KINDS, default="auto",
                   help="expected kind (default: guess from the keys)")
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("build", parents=[common],
                       help="build a standard groupoid from a shape "
                            "description")
    p.add_argument("file", help="JSON shape description, e.g. "
                                '{"shape": "cyclic", "order": 3}')
    p.set_defaults(fn=_cmd_build)

    p = sub.add_parser("quantalize", parents=[common],
                       help="the arrow quantale of a groupoid")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_quantalize)

    p = sub.add_parser("groupoidify", parents=[common],
                       help="rebuild the groupoid of an inverse quantal "
                            "frame")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_groupoidify)

    p = sub.add_parser("roundtrip", parents=[common],
                       help="check both reconstruction round trips")
    p.add_argument("file", help="a groupoid or a quantale")
    p.add_argument("--kind", choices=("auto", "groupoid", "quantale"),
                   default="auto")
    p.set_defaults(fn=_cmd_roundtrip)

    p = sub.add_parser("homs", parents=[common],
                       help="enumerate quantale homomorphisms")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--unital", action="store_true",
                   help="keep only unit-preserving homs")
    p.add_argument("--finite-meet", action="store_true", dest="finite_meet",
                   help="keep only homs preserving finite meets")
    p.add_argument("--lax", action="store_true",
                   help="enumerate all sup-maps and keep the lax ones")
    p.set_defaults(fn=_cmd_homs)

    p = sub.add_parser("tensor", parents=[common],
                       help="tensor a right and a left action over the "
                            "arrow quantale")
    p.add_argument("first", help="one of the two actions, either side")
    p.add_argument("second", help="the other action")
    p.set_defaults(fn=_cmd_tensor)

    p = sub.add_parser("orbits", parents=[common],
                       help="orbits and invariant elements of an action")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_orbits)

    p = sub.add_parser("algmorph", parents=[common],
                       help="work with algebraic morphisms")
    asub = p.add_subparsers(dest="action", required=True)
    pe = asub.add_parser("enumerate", parents=[common],
                         help="all algebraic morphisms between two "
                              "groupoids")
    pe.add_argument("source")
    pe.add_argument("target")
    pe.set_defaults(fn=_cmd_algmorph_enumerate)
    pc = asub.add_parser("compose", parents=[common],
                         help="compose two algebraic morphisms")
    pc.add_argument("first")
    pc.add_argument("second")
    pc.set_defaults(fn=_cmd_algmorph_compose)
    pt = asub.add_parser("tohom", parents=[common],
                         help="the unital hom of an algebraic morphism")
    pt.add_argument("file")
    pt.set_defaults(fn=_cmd_algmorph_tohom)
    pf = asub.add_parser("fromhom", parents=[common],
                         help="the algebraic morphism of a unital hom")
    pf.add_argument("file")
    pf.set_defaults(fn=_cmd_algmorph_fromhom)

    p = sub.add_parser("verify-all", parents=[common],
                       help="run the whole theorem harness")
    p.set_defaults(fn=_cmd_verify_all)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (BudgetExceeded, SearchBudgetExceeded, CarrierTooLarge) as exc:
        partial = getattr(exc, "report", None)
        if partial is not None:
            _deliver(args, partial.as_dict(), partial.text_summary())
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except IqfLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
