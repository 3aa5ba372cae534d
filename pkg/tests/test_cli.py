"""End-to-end command-line runs: JSON reports, exit codes, round-trips."""

import json
import random
from fractions import Fraction

import pytest

from liquidpower.cli import main
from liquidpower.core import election_to_json
from support import eight_voter_election, random_election


@pytest.fixture()
def fixture_path(tmp_path):
    path = tmp_path / "fixture.json"
    path.write_text(json.dumps(election_to_json(eight_voter_election())))
    return str(path)


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def _run_json(capsys, argv):
    code, out = _run(capsys, argv)
    return code, json.loads(out)


def test_index_both_methods_on_the_fixture(capsys, fixture_path):
    code, doc = _run_json(
        capsys,
        ["index", fixture_path, "--kind", "banzhaf", "--method", "both"],
    )
    assert code == 0
    values = doc["results"]["values"]
    assert values["8"]["exact"] == "1/2"
    assert values["6"]["exact"] == "1/16"
    assert doc["results"]["methods_agree"] is True
    assert doc["command"] == "index"
    assert len(doc["instance_digest"]) == 64
    # every reported rational round-trips exactly through its string form
    for entry in values.values():
        assert float(Fraction(entry["exact"])) == pytest.approx(entry["approx"])


def test_index_requires_a_quota(capsys, tmp_path):
    doc = election_to_json(eight_voter_election())
    del doc["quota"]
    path = tmp_path / "partial.json"
    path.write_text(json.dumps(doc))
    code, out = _run_json(capsys, ["index", str(path)])
    assert code == 1
    assert "quota" in out["error"]["message"]


def test_large_instance_dp_completes_and_exact_refuses(capsys, tmp_path):
    rng = random.Random(12_001)
    election = random_election(rng, n_min=60, n_max=60, w_max=8)
    path = tmp_path / "large.json"
    path.write_text(json.dumps(election_to_json(election)))
    code, doc = _run_json(
        capsys, ["index", str(path), "--method", "dp", "--voter", "1"]
    )
    assert code == 0
    assert "1" in doc["results"]["values"]
    code, doc = _run_json(
        capsys, ["index", str(path), "--method", "exact", "--voter", "1"]
    )
    assert code == 1
    assert doc["error"]["type"] == "InstanceTooLargeForEnumeration"


def test_bribe_witness_feeds_back_through_index(capsys, fixture_path, tmp_path):
    code, doc = _run_json(
        capsys,
        [
            "bribe",
            fixture_path,
            "--objective",
            "max-banzhaf",
            "--target",
            "7",
            "--budget",
            "1",
            "--threshold",
            "1/2",
            "--method",
            "exact",
        ],
    )
    assert code == 0
    assert doc["results"]["decision"] is True
    reported = Fraction(doc["results"]["value"]["exact"])
    witness = tmp_path / "witness.json"
    witness.write_text(json.dumps(doc["results"]["witness_instance"]))
    code, echo = _run_json(
        capsys, ["index", str(witness), "--method", "both", "--voter", "7"]
    )
    assert code == 0
    assert Fraction(echo["results"]["values"]["7"]["exact"]) == reported


def test_bribe_greedy_refuses_minimization(capsys, fixture_path):
    code, doc = _run_json(
        capsys,
        [
            "bribe",
            fixture_path,
            "--objective",
            "min-banzhaf",
            "--target",
            "8",
            "--budget",
            "1",
            "--method",
            "gamw",
        ],
    )
    assert code == 1
    assert "maximizes" in doc["error"]["message"]


def test_weightmax_no_decision_still_exits_zero(capsys, fixture_path):
    code, doc = _run_json(
        capsys,
        [
            "weightmax",
            fixture_path,
            "--target",
            "8",
            "--budget",
            "0",
            "--threshold",
            "9",
        ],
    )
    assert code == 0
    assert doc["results"]["decision"] is False
    assert "witness_instance" not in doc["results"]


def test_weightmax_witness_supports_reported_weight(capsys, fixture_path):
    code, doc = _run_json(
        capsys,
        [
            "weightmax",
            fixture_path,
            "--target",
            "8",
            "--budget",
            "1",
            "--threshold",
            "8",
            "--method",
            "xp",
        ],
    )
    assert code == 0
    assert doc["results"]["decision"] is True
    assert doc["results"]["support"] >= 8
    delegations = doc["results"]["witness_instance"]["delegations"]
    assert delegations["8"] == 8  # the target votes personally


def test_weightmax_vbamw_needs_epsilon(capsys, fixture_path):
    code, doc = _run_json(
        capsys,
        [
            "weightmax",
            fixture_path,
            "--target",
            "8",
            "--budget",
            "2",
            "--threshold",
            "6",
            "--method",
            "vbamw",
        ],
    )
    assert code == 1
    assert "epsilon" in doc["error"]["message"]


def test_maximin_reports_the_balanced_design(capsys, tmp_path):
    doc = {
        "n": 6,
        "weights": [1] * 6,
        "arcs": [[1, 3], [3, 5], [2, 4], [4, 6], [2, 3]],
        "delegations": {},
        "quota": 3,
    }
    path = tmp_path / "gadget.json"
    path.write_text(json.dumps(doc))
    code, report = _run_json(capsys, ["maximin", str(path), "--gurus", "2"])
    assert code == 0
    assert report["results"]["mu"]["exact"] == "1/8"
    assert report["results"]["witness_instance"]["delegations"]["5"] == 5
    code, report = _run_json(capsys, ["maximin", str(path), "--gurus", "1"])
    assert code == 1
    assert report["error"]["type"] == "NoFeasibleProfile"


def test_reads_instance_from_stdin(capsys, monkeypatch):
    import io

    payload = json.dumps(election_to_json(eight_voter_election()))
    monkeypatch.setattr("sys.stdin", io.StringIO(payload))
    code, doc = _run_json(capsys, ["index", "-", "--voter", "8"])
    assert code == 0
    assert doc["results"]["values"]["8"]["exact"] == "1/2"


def test_pretty_renders_a_table(capsys, fixture_path):
    code, out = _run(capsys, ["index", fixture_path, "--pretty", "--voter", "8"])
    assert code == 0
    assert "results.values.8" in out
    assert "1/2" in out
    with pytest.raises(json.JSONDecodeError):
        json.loads(out)


def test_malformed_instance_is_a_structured_error(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, doc = _run_json(capsys, ["index", str(path)])
    assert code == 1
    assert doc["error"]["type"] == "CliError"
    code, doc = _run_json(capsys, ["index", str(tmp_path / "missing.json")])
    assert code == 1
    assert doc["error"]["type"] == "FileNotFoundError"
