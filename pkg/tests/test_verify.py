"""Theorem harness: reports, budgets, suite selection, seeded failures."""

import json

import pytest

from iqf_lab.errors import BudgetExceeded, InvalidSpec
from iqf_lab.quantale import InvolutiveQuantale
from iqf_lab.suplattice import FiniteSupLattice
from iqf_lab.verify import (
    SUITES,
    Budget,
    Failure,
    Report,
    completion_suite,
    group_suite,
    involution_suite,
    iqf_axiom_suite,
    orbit_suite,
    partial_unit_suite,
    roundtrip_suite,
    tensor_suite,
    verify_all,
)


def mutated_arrow_quantale():
    """Looks like the arrow quantale of Z2 except that g1·g1 = g1."""
    lat = FiniteSupLattice.powerset(("g0", "g1"))
    mult = {(1, 1): 1, (1, 2): 2, (2, 1): 2, (2, 2): 2}
    return InvolutiveQuantale(lat, mult, {1: 1, 2: 2}, 1,
                              atom_labels=("g0", "g1"))


# ---------------------------------------------------------------------------
# reports


def test_report_counts_and_invariant():
    f = Failure("tag", {"k": 1}, "w")
    rep = Report("s", 3, [f])
    assert (rep.passes, rep.instances, rep.ok) == (2, 3, False)
    assert rep.passes + len(rep.failures) == rep.instances
    with pytest.raises(InvalidSpec):
        Report("s", 0, [f])


def test_report_dict_shape():
    f = Failure("tag", {"a": 1}, "broken")
    leaf = Report("leaf", 2, [f], wall_time=0.1234, note="n")
    assert leaf.as_dict() == {
        "suite": "leaf", "instances": 2, "passes": 1, "wall_time": 0.123,
        "failures": [{"theorem": "tag", "instance": {"a": 1},
                      "witness": "broken"}],
        "note": "n",
    }
    root = Report("root", 2, [f], wall_time=1.0, suites=[leaf])
    rd = root.as_dict()
    assert "failures" not in rd
    assert [s["suite"] for s in rd["suites"]] == ["leaf"]
    json.dumps(rd)


def test_report_text_summary():
    f = Failure("tag", {"a": 1}, "broken")
    leaf = Report("leaf", 2, [f], wall_time=0.1234, note="n")
    root = Report("root", 2, [f], wall_time=1.0, suites=[leaf])
    lines = root.text_summary().splitlines()
    assert lines[0] == "root: FAIL, 1/2 instances passed in 1.0s"
    assert lines[1] == "  leaf: 1/2 passed (0.1s) [n]"
    assert lines[2] == "    FAIL tag: broken"
    clean = Report("ok-suite", 4, wall_time=0.02)
    assert clean.text_summary() == "ok-suite: 4/4 passed (0.0s)"


# ---------------------------------------------------------------------------
# budgets


def test_budget_bounds_and_from_size():
    with pytest.raises(InvalidSpec):
        Budget(max_arrows=0)
    b = Budget.from_size(3)
    assert (b.max_arrows, b.max_pair_arrows, b.max_atoms,
            b.max_fibered) == (3, 3, 3, 3)
    big = Budget.from_size(100)
    assert (big.max_arrows, big.max_pair_arrows, big.max_atoms,
            big.max_fibered) == (8, 6, 4, 12)
    with pytest.raises(InvalidSpec):
        Budget.from_size(0)


def test_unknown_suite_name_rejected():
    with pytest.raises(InvalidSpec):
        verify_all(Budget(suites=("orbits", "mystery")))


# ---------------------------------------------------------------------------
# the fast suites at their default sizes


def test_default_suite_sizes():
    for suite, size in ((roundtrip_suite, 66), (iqf_axiom_suite, 33),
                        (completion_suite, 21), (involution_suite, 324),
                        (group_suite, 72), (orbit_suite, 18),
                        (tensor_suite, 55), (partial_unit_suite, 18)):
        rep = suite()
        assert rep.ok, rep.text_summary()
        assert rep.instances == size
        assert rep.failures == ()


# ---------------------------------------------------------------------------
# selection and limits


def test_suite_selection_marks_skipped():
    rep = verify_all(Budget(suites=("orbits",)))
    assert rep.ok and rep.instances == 18
    assert [s.suite for s in rep.suites] == [name for name, _ in SUITES]
    by = {s.suite: s for s in rep.suites}
    assert by["orbits"].note == ""
    assert by["covering"].instances == 0
    assert by["covering"].note == "skipped: not selected by the budget"


def test_small_budget_reports_empty_suites_skipped():
    rep = verify_all(Budget.from_size(1))
    assert rep.ok
    by = {s.suite: s for s in rep.suites}
    assert by["orbits"].instances == 0
    assert by["orbits"].note == "skipped: no instances fit the size budget"
    assert rep.instances == 67


def test_time_limit_raises_with_partial_report():
    with pytest.raises(BudgetExceeded) as caught:
        verify_all(Budget(suites=("orbits",), time_limit=0.0))
    rep = caught.value.report
    by = {s.suite: s for s in rep.suites}
    assert by["orbits"].instances == 0
    assert by["orbits"].note == "time budget reached after 0 instances"


def test_verify_all_deterministic():
    runs = [verify_all(Budget(suites=("orbits", "group-case")))
            for _ in range(2)]
    seen = [[(s.suite, s.instances, s.passes, s.note) for s in rep.suites]
            for rep in runs]
    assert seen[0] == seen[1]
    assert all(rep.ok for rep in runs)


# ---------------------------------------------------------------------------
# seeded failures travel as loadable counterexamples


def test_mutated_quantale_fails_roundtrip_with_witness():
    rep = roundtrip_suite(subjects=[("mutated", mutated_arrow_quantale())])
    assert not rep.ok and rep.instances == 1
    failure, = rep.failures
    assert failure.theorem == "quantale-roundtrip"
    assert failure.witness
    json.dumps(failure.instance)


def test_mutated_quantale_fails_axioms():
    rep = iqf_axiom_suite(quantales=[("mutated", mutated_arrow_quantale())])
    assert not rep.ok and rep.instances == 1
    failure, = rep.failures
    assert failure.theorem == "iqf-axioms"
    assert "witness" in json.dumps(failure.as_dict())
