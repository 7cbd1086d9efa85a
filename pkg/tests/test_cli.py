"""The iqf-lab command: outputs, formats, and exit codes."""

import json

import pytest

from iqf_lab.cli import main
from iqf_lab.errors import BudgetExceeded
from iqf_lab.generators import grid_gsets
from iqf_lab.groupoid import cyclic_group, group_groupoid
from iqf_lab.quantale import InvolutiveQuantale, quantale_of_groupoid
from iqf_lab.serialize import decode_value, emit, load_instance
from iqf_lab.suplattice import FiniteSupLattice
from iqf_lab.verify import Failure, Report


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_value(tmp_path, name, value):
    path = tmp_path / name
    path.write_bytes(emit(value, "json"))
    return str(path)


def write_text(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def z3_file(tmp_path):
    return write_value(tmp_path, "z3.json",
                       group_groupoid(cyclic_group(3)))


def q3_file(tmp_path):
    return write_value(tmp_path, "q3.json",
                       quantale_of_groupoid(group_groupoid(cyclic_group(3))))


def chain_quantale_file(tmp_path):
    lat = FiniteSupLattice.chain(3)
    jis = lat.join_irreducibles()
    mult = {(a, b): min(a, b) for a in jis for b in jis}
    q = InvolutiveQuantale(lat, mult, {a: a for a in jis}, 2)
    return write_value(tmp_path, "chain.json", q)


# ---------------------------------------------------------------------------
# building, validating, converting


def test_validate_guesses_the_kind(tmp_path, capsys):
    code, out, _ = run(capsys, "validate", z3_file(tmp_path))
    assert code == 0
    assert out.startswith("valid groupoid:")


def test_validate_explicit_kind_mismatch(tmp_path, capsys):
    code, _, err = run(capsys, "validate", z3_file(tmp_path),
                       "--kind", "quantale")
    assert code == 2
    assert err.startswith("error:")


def test_validate_json_format(tmp_path, capsys):
    code, out, _ = run(capsys, "validate", q3_file(tmp_path),
                       "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "quantale" and doc["valid"] is True


def test_build_emits_a_loadable_groupoid(tmp_path, capsys):
    spec = write_text(tmp_path, "spec.json",
                      '{"shape": "cyclic", "order": 4}')
    out_path = tmp_path / "z4.json"
    code, out, _ = run(capsys, "build", spec, "--format", "json",
                       "--out", str(out_path))
    assert code == 0 and out == ""
    gpd = load_instance(out_path, "groupoid")
    assert gpd == group_groupoid(cyclic_group(4))


def test_build_unknown_shape(tmp_path, capsys):
    spec = write_text(tmp_path, "spec.json", '{"shape": "spiral"}')
    code, _, err = run(capsys, "build", spec)
    assert code == 2 and "spiral" in err


def test_quantalize_then_groupoidify_preserves_arrows(tmp_path, capsys):
    z3 = z3_file(tmp_path)
    qpath = tmp_path / "q.json"
    code, _, _ = run(capsys, "quantalize", z3, "--format", "json",
                     "--out", str(qpath))
    assert code == 0
    gpath = tmp_path / "back.json"
    code, _, _ = run(capsys, "groupoidify", str(qpath), "--format", "json",
                     "--out", str(gpath))
    assert code == 0
    # the rebuilt groupoid names objects after their unit arrows, so only
    # the arrow level is label for label the same
    back = load_instance(gpath, "groupoid")
    orig = group_groupoid(cyclic_group(3))
    assert back.arrows == orig.arrows
    assert back.comp == orig.comp
    assert back.n_obj == orig.n_obj


def test_groupoidify_rejects_a_chain(tmp_path, capsys):
    code, _, err = run(capsys, "groupoidify", chain_quantale_file(tmp_path))
    assert code == 2
    assert err.startswith("error:")


def test_roundtrip_passes_on_grid_instances(tmp_path, capsys):
    code, out, _ = run(capsys, "roundtrip", q3_file(tmp_path))
    assert code == 0
    assert "round trip from a quantale: ok" in out.splitlines()[-1]
    code, out, _ = run(capsys, "roundtrip", z3_file(tmp_path),
                       "--format", "json")
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_roundtrip_refuses_other_kinds(tmp_path, capsys):
    gset = dict(grid_gsets())["Z2.swap_plus_fixed"]
    path = write_value(tmp_path, "a.json", gset)
    code, _, err = run(capsys, "roundtrip", path)
    assert code == 2 and "gset" in err


# ---------------------------------------------------------------------------
# enumeration commands


def test_homs_counts_and_filters(tmp_path, capsys):
    q3 = q3_file(tmp_path)
    code, out, _ = run(capsys, "homs", q3, q3)
    assert code == 0
    assert out.splitlines()[0] == "3 homs on 3 join-irreducibles"
    code, out, _ = run(capsys, "homs", q3, q3, "--finite-meet")
    assert code == 0
    assert out.splitlines()[0].startswith("2 homs")
    code, out, _ = run(capsys, "homs", q3, q3, "--lax", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["count"] == 6
    assert len(doc["homs"]) == len(doc["flags"]) == 6
    assert all(f["lax"] for f in doc["flags"])


def test_homs_output_is_loadable(tmp_path, capsys):
    q3 = q3_file(tmp_path)
    code, out, _ = run(capsys, "homs", q3, q3, "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["count"] == 3
    for entry in doc["homs"]:
        decode_value(entry, "hom")


def test_homs_search_budget_exit(tmp_path, capsys):
    q3 = q3_file(tmp_path)
    code, _, err = run(capsys, "homs", q3, q3, "--budget", "2")
    assert code == 3
    assert err.startswith("error:")


def test_tensor_of_the_translations(tmp_path, capsys):
    gsets = dict(grid_gsets())
    right = write_value(tmp_path, "r.json", gsets["Z3.right"])
    left = write_value(tmp_path, "l.json", gsets["Z3.left"])
    code, out, _ = run(capsys, "tensor", right, left)
    assert code == 0
    assert out.strip() == "tensor: 8 elements over 9 fibered pairs"
    code, out, _ = run(capsys, "tensor", left, right, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["elements"] == 8 and doc["fibered_pairs"] == 9
    assert len(doc["masks"]) == 8
    decode_value(doc["lattice"], "lattice")


def test_tensor_side_and_base_mismatches(tmp_path, capsys):
    gsets = dict(grid_gsets())
    right = write_value(tmp_path, "r.json", gsets["Z3.right"])
    other = write_value(tmp_path, "o.json", gsets["Z2.swap_plus_fixed"])
    code, _, err = run(capsys, "tensor", right, right)
    assert code == 2 and "side" not in err and "right" in err
    code, _, err = run(capsys, "tensor", right, other)
    assert code == 2 and "different groupoids" in err


def test_orbits_output(tmp_path, capsys):
    path = write_value(tmp_path, "a.json",
                       dict(grid_gsets())["Z2.swap_plus_fixed"])
    code, out, _ = run(capsys, "orbits", path)
    assert code == 0
    assert out.splitlines()[0] == "2 orbits, 4 invariant elements"
    code, out, _ = run(capsys, "orbits", path, "--format", "json")
    doc = json.loads(out)
    assert doc["orbits"] == [["x", "y"], ["z"]]
    assert (doc["count"], doc["invariants"]) == (2, 4)


def test_algmorph_enumerate_compose_and_translate(tmp_path, capsys):
    z3 = z3_file(tmp_path)
    code, out, _ = run(capsys, "algmorph", "enumerate", z3, z3,
                       "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["count"] == 3 and len(doc["morphisms"]) == 3
    forms = doc["morphisms"]
    a1 = write_text(tmp_path, "a1.json", json.dumps(forms[1]))
    a2 = write_text(tmp_path, "a2.json", json.dumps(forms[2]))

    code, out, _ = run(capsys, "algmorph", "compose", a1, a2,
                       "--format", "json")
    assert code == 0
    assert json.loads(out) in forms

    hpath = tmp_path / "h.json"
    code, _, _ = run(capsys, "algmorph", "tohom", a1, "--format", "json",
                     "--out", str(hpath))
    assert code == 0
    code, out, _ = run(capsys, "algmorph", "fromhom", str(hpath),
                       "--format", "json")
    assert code == 0
    # translating back rebuilds the groupoids, which renames the one
    # object after its unit arrow; the arrow-level data must survive
    got = json.loads(out)
    decode_value(got, "algmorph")
    assert got["act"] == forms[1]["act"]
    assert got["anchor"] == {k: "g0" for k in forms[1]["anchor"]}


def test_algmorph_enumerate_budget_exit(tmp_path, capsys):
    z3 = z3_file(tmp_path)
    code, _, err = run(capsys, "algmorph", "enumerate", z3, z3,
                       "--budget", "1")
    assert code == 3 and err.startswith("error:")


# ---------------------------------------------------------------------------
# verify-all


def test_verify_all_small_budget(tmp_path, capsys):
    code, out, _ = run(capsys, "verify-all", "--budget", "1")
    assert code == 0
    assert out.splitlines()[0].startswith("verify-all: ok, 67/67")
    assert "skipped: no instances fit the size budget" in out


def test_verify_all_env_budget(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("IQF_LAB_BUDGET", "1")
    out_path = tmp_path / "rep.json"
    code, out, _ = run(capsys, "verify-all", "--format", "json",
                       "--out", str(out_path))
    assert code == 0 and out == ""
    doc = json.loads(out_path.read_text())
    assert doc["suite"] == "verify-all"
    assert doc["passes"] == doc["instances"] == 67
    assert len(doc["suites"]) == 12


def test_verify_all_env_budget_must_be_integer(capsys, monkeypatch):
    monkeypatch.setenv("IQF_LAB_BUDGET", "plenty")
    code, _, err = run(capsys, "verify-all")
    assert code == 2 and "IQF_LAB_BUDGET" in err


def test_verify_all_failure_exit(capsys, monkeypatch):
    failing = Report("verify-all", 1, [Failure("tag", {}, "w")],
                     suites=[Report("roundtrip", 1, [Failure("tag", {}, "w")])])
    monkeypatch.setattr("iqf_lab.cli.verify_all", lambda budget: failing)
    code, out, _ = run(capsys, "verify-all")
    assert code == 1
    assert "FAIL" in out


def test_verify_all_time_budget_partial_report(capsys, monkeypatch):
    partial = Report("verify-all", 2, suites=[
        Report("roundtrip", 2, note="time budget reached after 2 instances")])

    def exhausted(budget):
        exc = BudgetExceeded("wall-clock budget of 0.1s exhausted")
        exc.report = partial
        raise exc

    monkeypatch.setattr("iqf_lab.cli.verify_all", exhausted)
    code, out, err = run(capsys, "verify-all", "--format", "json")
    assert code == 3
    assert "exhausted" in err
    assert json.loads(out)["instances"] == 2


# ---------------------------------------------------------------------------
# input errors


def test_missing_and_malformed_files(tmp_path, capsys):
    code, _, err = run(capsys, "validate", str(tmp_path / "nope.json"))
    assert code == 2 and err.startswith("error: cannot read")
    bad = write_text(tmp_path, "bad.json", "not json")
    code, _, err = run(capsys, "validate", bad)
    assert code == 2 and "not valid JSON" in err


def test_unrecognizable_document(tmp_path, capsys):
    odd = write_text(tmp_path, "odd.json", '{"mystery": 1}')
    code, _, err = run(capsys, "validate", odd)
    assert code == 2 and "--kind" in err


def test_validation_error_carries_location(tmp_path, capsys):
    doc = json.loads(emit(group_groupoid(cyclic_group(3)), "json"))
    doc["comp"][0][2] = "bogus"
    path = write_text(tmp_path, "t.json", json.dumps(doc))
    code, _, err = run(capsys, "validate", path)
    assert code == 2
    assert "(at /comp/0)" in err
