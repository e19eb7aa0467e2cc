"""The verification-suite machinery: deterministic reports, replayable
counterexamples, parallel equality, and a one-case smoke pass over every
registered suite."""

import json
import random

import pytest

from kunneth.suites import (CHECKS, SUITES, SuiteCounterexample, SuiteError,
                            VerificationReport, _build_tor_relations,
                            _case_results, replay, run_check, run_suite,
                            suite_names)


def test_suite_names_sorted_and_complete():
    names = suite_names()
    assert names == sorted(names)
    assert set(names) == {"splitting", "tor-relations", "concrete", "cosets",
                          "bockstein", "deviation", "flip", "boundary",
                          "approximation", "oracles"}


def test_every_suite_passes_one_case():
    for name in suite_names():
        report = run_suite(name, seed=1, cases=1)
        assert report.ok, (name, report.counterexamples[:1])
        assert all(failed == 0 for _, failed in report.properties.values())


def test_reports_are_deterministic():
    r1 = run_suite("cosets", seed=11, cases=3)
    r2 = run_suite("cosets", seed=11, cases=3)
    assert r1.to_payload() == r2.to_payload()


def test_parallel_run_matches_serial():
    r1 = run_suite("oracles", seed=4, cases=6)
    r2 = run_suite("oracles", seed=4, cases=6, jobs=3)
    assert r1.to_payload() == r2.to_payload()


def test_unknown_suite_lists_names():
    with pytest.raises(SuiteError, match="tor-relations"):
        run_suite("nonesuch")
    with pytest.raises(SuiteError):
        run_check({"check": "nonesuch"})


def test_needs_at_least_one_case():
    with pytest.raises(SuiteError):
        run_suite("concrete", cases=0)


def test_tor_relations_builder_covers_the_grid():
    seen = set()
    for index in range(121):
        props = _build_tor_relations(random.Random(0), index)
        payload = dict(props[0][1])
        seen.add((int(payload["m"]), int(payload["n"])))
        assert int(payload["rmax"]) == 24
    assert seen == {(m, n) for m in range(2, 13) for n in range(2, 13)}


def test_payloads_are_json_serializable():
    for name in suite_names():
        spec = SUITES[name]
        for prop, payload in spec.build(random.Random(99), 0):
            json.loads(json.dumps(payload))
            assert payload["check"] in CHECKS, prop


# ------------------------------------------------- counterexample plumbing


@pytest.fixture
def failing_check():
    def check(payload):
        if payload.get("boom"):
            raise SuiteCounterexample("planted failure",
                                      {"lhs": "1", "rhs": "0"})
    CHECKS["planted"] = check
    yield "planted"
    del CHECKS["planted"]


def test_replay_reproduces_a_failure(failing_check):
    payload = {"check": failing_check, "boom": True}
    with pytest.raises(SuiteCounterexample, match="planted failure"):
        run_check(payload)
    still_failing, message = replay(payload)
    assert still_failing and "planted" in message
    ok_again, _ = replay({"check": failing_check})
    assert not ok_again


def test_replay_of_real_payload_round_trips_through_json():
    payload = json.loads(json.dumps({"check": "concrete_moore_square"}))
    still_failing, _ = replay(payload)
    assert not still_failing


def test_case_results_collect_failure_payloads(failing_check):
    SUITES["planted-suite"] = SUITES["concrete"].__class__(
        "planted-suite",
        lambda rng, index: [("planted", {"check": failing_check,
                                         "boom": index == 1})],
        3, "test only")
    try:
        report = run_suite("planted-suite", seed=0, cases=3)
    finally:
        del SUITES["planted-suite"]
    assert not report.ok
    assert report.properties["planted"] == (2, 1)
    (err,) = report.counterexamples
    assert err["case"] == 1 and err["property"] == "planted"
    assert err["message"] == "planted failure"
    assert err["lhs"] == "1" and err["rhs"] == "0"
    # the stored payload replays to the same failure, via JSON and back
    wire = json.loads(json.dumps(report.to_payload()))
    still_failing, message = replay(wire["counterexamples"][0])
    assert still_failing and "planted" in message


def test_report_lines_and_payload_shape():
    report = VerificationReport("demo", 7, 2)
    report.record("alpha", None)
    report.record("alpha", None)
    report.record("beta", {"message": "broken", "property": "beta", "case": 1})
    assert not report.ok
    lines = report.lines()
    assert lines[0] == "suite demo: seed 7, 2 cases"
    assert any(line.startswith("  ok   alpha") for line in lines)
    assert any(line.startswith("  FAIL beta") for line in lines)
    assert lines[-1] == "result: 1 counterexamples"
    payload = report.to_payload()
    assert payload["properties"]["alpha"] == {"passed": 2, "failed": 0}
    assert payload["properties"]["beta"] == {"passed": 0, "failed": 1}


def test_case_results_keyed_by_index():
    rows = _case_results("oracles", seed=3, index=5)
    props = [p for p, _ in rows]
    assert props == ["smith_witnesses", "tor_order_formula", "cross_kernel"]
    assert all(err is None for _, err in rows)
