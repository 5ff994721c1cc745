import csv
import json

import pytest

from treecorona.cli import main
from treecorona.config import ConfigError, parse_config


def write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def test_verify_free_decay_table(tmp_path, capsys):
    cfg = write(tmp_path, {"family": "free:2", "gamma1": ["a"], "i": [2, 4, 8, 16]})
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    rows = (tmp_path / "o" / "defects.csv").read_text().splitlines()
    assert rows[0].startswith("family,gamma1,k,i,n,region_size,defect_sq_exact")
    assert [r.split(",")[6] for r in rows[1:]] == ["2/3", "2/5", "2/9", "2/17"]


def test_identity_word_reduces(tmp_path):
    cfg = parse_config({"family": "free:2", "gamma1": ["aA"]})
    assert cfg.gamma1 == [""]
    path = write(tmp_path, {"family": "line", "gamma1": ["e"], "i": [1, 3]})
    assert main(["verify", "--config", path]) == 0


@pytest.mark.parametrize(
    "data",
    [
        {"family": "free:2", "gamma1": ["ax"]},
        {"family": "line", "i": [0]},
        {"family": "torus"},
        {"family": "line", "bogus": 1},
    ],
)
def test_config_errors_exit_2(tmp_path, data):
    assert main(["verify", "--config", write(tmp_path, data)]) == 2


def test_missing_and_malformed_files(tmp_path):
    assert main(["verify", "--config", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["verify", "--config", str(bad)]) == 2
    with pytest.raises(ConfigError):
        parse_config({"gamma1": ["a"]})


def test_oracle_report(tmp_path):
    cfg = write(tmp_path, {"family": "line", "gamma1": ["t"], "i": [4, 1]})
    assert main(["oracle", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    lines = (tmp_path / "o" / "oracle.csv").read_text().splitlines()
    head = lines[0].split(",")
    first = dict(zip(head, lines[1].split(",")))
    assert first["z_count_measured"] == "4" and first["z_count_stated"] == "3"
    assert first["z_count_match"] == "false"
    second = dict(zip(head, lines[2].split(",")))
    assert second["oracle_defect_sq_exact"] == "1"


def test_oracle_infeasible_window(tmp_path):
    cfg = write(tmp_path, {"family": "free:3", "gamma1": ["a"], "i": [10], "oracle_window": "full"})
    assert main(["oracle", "--config", cfg]) == 2


def test_json_report_is_deterministic(tmp_path):
    cfg = write(tmp_path, {"family": "dihedral", "gamma1": ["t", "t^2·s"], "i": [1, 3]})
    main(["verify", "--config", cfg, "--out", str(tmp_path / "a"), "--format", "json"])
    main(["verify", "--config", cfg, "--out", str(tmp_path / "b"), "--format", "json", "--jobs", "2"])
    a = (tmp_path / "a" / "report.json").read_bytes()
    assert a == (tmp_path / "b" / "report.json").read_bytes()
    assert json.loads(a)["summary"]["status"] == "pass"


def test_defect_table_and_demo(tmp_path):
    cfg = write(tmp_path, {"family": "line", "gamma1": ["t"], "i": [1, 2, 4], "stages": 20,
                           "space": {"radius": 45}})
    assert main(["defect-table", "--config", cfg, "--out", str(tmp_path / "t")]) == 0
    with open(tmp_path / "t" / "defect_table.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["closed_form_match"] for r in rows] == ["true"] * 3
    assert main(["corona-demo", "--config", cfg, "--out", str(tmp_path / "d")]) == 0
    assert (tmp_path / "d" / "round_trip.csv").exists()


def test_selftest():
    assert main(["selftest"]) == 0


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["verify"])
    assert exc.value.code == 2
