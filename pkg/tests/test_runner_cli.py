import csv
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from l1dilation.cli import main
from l1dilation.markov_ops import classify
from l1dilation.rota import check_hypotheses
from l1dilation.runner import (
    CheckRecord,
    InstanceFile,
    Report,
    emit_report,
    gen_instance,
    load_instance,
    run_mc,
    run_verify,
)

INSTANCE_A = InstanceFile([0.5, 0.5], [[0.5, 0.5], [0.5, 0.5]], [1.0, 0.0])
SWAP = InstanceFile([0.5, 0.5], [[0.0, 1.0], [1.0, 0.0]], [1.0, 0.0], kind="rota")


def strip_times(d):
    for c in d["checks"]:
        c.pop("wall_time")
    return d


# -- instances -------------------------------------------------------------------


def test_gen_single_cell():
    inst = gen_instance("akcoglu", 1, seed=5)
    assert inst.mu == [1.0] and inst.T == [[1.0]]


def test_gen_is_deterministic():
    for kind in ("akcoglu", "rota"):
        assert gen_instance(kind, 4, 17).dumps() == gen_instance(kind, 4, 17).dumps()
    assert gen_instance("akcoglu", 4, 17).dumps() != gen_instance("akcoglu", 4, 18).dumps()


def test_gen_flags():
    for seed in range(20):
        flags = classify(gen_instance("akcoglu", 4, seed).operator())
        assert flags.positive and flags.contraction and flags.integral_preserving
        flags = classify(gen_instance("akcoglu", 4, seed, integral_preserving=False).operator())
        assert flags.positive and flags.contraction and not flags.integral_preserving
        assert check_hypotheses(gen_instance("rota", 4, seed).operator())


def test_gen_rejects_bad_size():
    with pytest.raises(ValueError):
        gen_instance("akcoglu", 0, 1)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(min_value=1e-300, max_value=1e300), min_size=1, max_size=4), st.data())
def test_instance_text_round_trip(mu, data):
    m = len(mu)
    row = st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=m, max_size=m)
    T = data.draw(st.lists(row, min_size=m, max_size=m))
    inst = InstanceFile(mu, T)
    back = InstanceFile.from_dict(json.loads(inst.dumps()))
    assert back.mu == inst.mu and back.T == inst.T
    assert back.digest == inst.digest


@pytest.mark.parametrize(
    "d",
    [
        {"mu": [], "T": []},
        {"mu": [0.5, -0.5], "T": [[1, 0], [0, 1]]},
        {"mu": [1.0], "T": [[1, 0]]},
        {"mu": [1.0], "T": [[1]], "f": [1, 2]},
        {"mu": [1.0], "T": [[1]], "kind": "other"},
        {"mu": [1.0], "T": [[1]], "extra": 1},
        {"T": [[1]]},
        {"mu": [1.0], "T": [[float("nan")]]},
    ],
)
def test_instance_validation(d):
    with pytest.raises(ValueError):
        InstanceFile.from_dict(d)


def test_load_instance_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ValueError, match="not valid JSON"):
        load_instance(p)
    p.write_text("[1, 2]")
    with pytest.raises(ValueError, match="JSON object"):
        load_instance(p)


# -- suites ----------------------------------------------------------------------


def test_verify_instance_A():
    report = run_verify(INSTANCE_A, N=4)
    assert report.verdict
    names = [c.name for c in report.checks]
    assert names[:6] == [
        "classify",
        "make_integral_preserving",
        "build_coupling",
        "verify_main_result",
        "verify_tau_transport",
        "verify_EQE",
    ]
    assert names[6:] == ["verify_dilation"] * 5
    assert [c.params["n"] for c in report.checks[6:]] == list(range(5))


def test_verify_with_monte_carlo():
    report = run_verify(INSTANCE_A, N=2, mc_samples=20_000, seed=3)
    assert report.checks[-1].name == "compare_mc_exact"
    assert report.verdict


def test_verify_negative_entry_gate():
    inst = InstanceFile([0.5, 0.5], [[1.0, -0.1], [0.0, 1.0]])
    report = run_verify(inst)
    assert not report.verdict
    assert len(report.checks) == 1
    assert report.checks[0].name == "classify"
    assert report.checks[0].residual == pytest.approx(0.1)
    assert "skipped" in report.checks[0].message


def test_verify_extends_contractions():
    inst = InstanceFile([0.5, 0.5], [[0.5, 0.0], [0.0, 0.5]], [1.0, -2.0])
    report = run_verify(inst, N=3)
    assert report.verdict
    assert report.checks[1].params["extended"] is True


def test_verify_rejection_becomes_failed_check():
    inst = InstanceFile([0.5, 0.5], [[0.0, 0.0], [1.0, 1.0]])
    report = run_verify(inst)
    assert not report.verdict
    last = report.checks[-1]
    assert last.name == "build_coupling" and not last.passed
    assert last.message.startswith("rejected:") and "vanishes" in last.message
    assert np.isfinite(last.residual)


def test_rota_swap_chain():
    report = run_verify(SWAP, N=3)
    assert report.verdict
    assert [c.params["n"] for c in report.checks if c.name == "rota_check"] == [0, 1, 2, 3]
    assert report.checks[-1].params["limit"] == [1.0, 0.0]


def test_rota_non_reversible_gate():
    inst = InstanceFile([0.5, 0.5], [[0.0, 1.0], [0.5, 0.5]], kind="rota")
    report = run_verify(inst)
    assert not report.verdict and len(report.checks) == 1


def test_run_mc_only():
    report = run_mc(INSTANCE_A, 2, 10_000, 0)
    assert [c.name for c in report.checks] == ["build_coupling", "compare_mc_exact"]
    assert report.verdict


def test_verdict_is_and_of_checks():
    good = CheckRecord("a", {}, 0.0, 1.0, True)
    bad = CheckRecord("b", {}, 2.0, 1.0, False)
    assert Report([good]).verdict and not Report([good, bad]).verdict
    assert CheckRecord("c", {}, float("inf"), 1.0, True).passed is False


# -- reports ---------------------------------------------------------------------


def test_emit_empty_report(tmp_path):
    p = emit_report(Report(), "json", tmp_path / "r.json")
    d = json.loads(p.read_text())
    assert d["verdict"] is True and d["checks"] == []
    p = emit_report(Report(), "csv", tmp_path / "r.csv")
    assert len(p.read_text().splitlines()) == 1


def test_emit_json_round_trip(tmp_path):
    report = run_verify(INSTANCE_A, N=2)
    p = emit_report(report, "json", tmp_path / "r.json")
    back = Report.from_dict(json.loads(p.read_text()))
    assert back.to_dict() == report.to_dict()


def test_emit_csv_rows(tmp_path):
    report = run_verify(SWAP, N=2)
    p = emit_report(report, "csv", tmp_path / "r.csv")
    rows = list(csv.reader(p.open()))
    assert len(rows) == len(report.checks) + 1
    assert rows[0] == ["name", "params", "residual", "tolerance", "passed", "wall_time", "message"]
    assert [r[0] for r in rows[1:]] == [c.name for c in report.checks]


def test_emit_errors(tmp_path):
    with pytest.raises(ValueError, match="format"):
        emit_report(Report(), "xml", tmp_path / "r.xml")
    with pytest.raises(OSError, match="missing"):
        emit_report(Report(), "json", tmp_path / "missing" / "r.json")


def test_reports_are_reproducible():
    inst = gen_instance("akcoglu", 3, 7)
    a = strip_times(run_verify(inst, N=3, mc_samples=5000, seed=2).to_dict())
    b = strip_times(run_verify(inst, N=3, mc_samples=5000, seed=2).to_dict())
    assert json.dumps(a) == json.dumps(b)


# -- command line ------------------------------------------------------------------


def test_cli_gen_then_verify(tmp_path, capsys):
    inst = tmp_path / "i.json"
    assert main(["gen", "--size", "3", "--seed", "4", "--out", str(inst)]) == 0
    out = tmp_path / "r.json"
    assert main(["verify", "--instance", str(inst), "--horizon", "3", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["verdict"] is True
    assert d["input_digest"] == load_instance(inst).digest
    assert "PASS" in capsys.readouterr().err


def test_cli_rota_and_mc(tmp_path):
    assert main(["rota", "--size", "3", "--seed", "1", "--horizon", "2", "--out", str(tmp_path / "r.csv"), "--format", "csv"]) == 0
    assert main(["mc", "--size", "2", "--samples", "5000", "--horizon", "2", "--out", str(tmp_path / "m.json")]) == 0


def test_cli_stdout(capsys):
    assert main(["verify", "--size", "2", "--horizon", "1", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("name,params")


def test_cli_verification_failure(tmp_path):
    inst = tmp_path / "neg.json"
    inst.write_text(json.dumps({"mu": [0.5, 0.5], "T": [[1.0, -0.1], [0.0, 1.0]]}))
    assert main(["verify", "--instance", str(inst), "--out", str(tmp_path / "r.json")]) == 1


def test_cli_malformed_input(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"mu": [1.0], "T": [[1, 2]]}')
    assert main(["verify", "--instance", str(bad)]) == 2
    assert main(["verify", "--instance", str(tmp_path / "nope.json")]) == 2
    good = tmp_path / "a.json"
    good.write_text(INSTANCE_A.dumps())
    assert main(["rota", "--instance", str(good)]) == 2
    assert main(["verify", "--horizon", "-1"]) == 2
    assert main(["verify", "--out", str(tmp_path / "no" / "r.json")]) == 2
    with pytest.raises(SystemExit) as e:
        main(["verify", "--bogus"])
    assert e.value.code == 2


def test_cli_reports_byte_identical_except_wall_time(tmp_path):
    paths = [tmp_path / f"r{i}.json" for i in range(2)]
    for p in paths:
        assert main(["verify", "--size", "3", "--seed", "9", "--samples", "2000", "--horizon", "2", "--out", str(p)]) == 0
    a, b = (strip_times(json.loads(p.read_text())) for p in paths)
    assert json.dumps(a, indent=2) == json.dumps(b, indent=2)
