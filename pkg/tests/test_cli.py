import csv
import io
import json
import subprocess
import sys

import pytest

from ellsurj.cli import main
from ellsurj.families import ScanReport

FAMILY = ["--curve", "[0,1];[1]", "--curve", "[1];[0,1]"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def csv_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_constants_table(capsys):
    code, out, _ = run(capsys, "constants", "--g", "0..3")
    assert code == 0
    assert out.startswith("# config: ")
    rows = csv_rows(out)
    assert [r["g"] for r in rows] == ["0", "1", "2", "3"]
    assert rows[0]["C"] == "3176523" and rows[1]["C"] == "3176523"
    assert rows[0]["c_literal"] == "15" and rows[0]["c_conservative"] == "17"
    assert rows[0]["C_tilde_n1"] == "17"
    assert rows[2]["C"] == "6353046*sqrt(2)"


def test_constants_json_surd(capsys):
    code, out, _ = run(capsys, "constants", "--g", "2", "--format", "json")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["C"]["sqrt"] == 2 and row["C"]["coeff"] == "6353046"


def test_genus_table(capsys):
    code, out, _ = run(capsys, "genus-x0", "1..20")
    assert code == 0
    genus = {int(r["N"]): int(r["genus"]) for r in csv_rows(out)}
    assert genus[13] == 0 and genus[11] == 1 and genus[20] == 1
    assert len(genus) == 20


def test_count(capsys):
    code, out, _ = run(capsys, "count", "--curve", "[1];[1]", "--p", "5", "--method", "bsgs")
    assert code == 0
    row = csv_rows(out)[0]
    assert (row["a"], row["N"]) == ("-3", "9")


def test_count_marks_bad_primes(capsys):
    code, out, _ = run(capsys, "count", "--curve", "[1];[1]", "--p-max", "40")
    rows = {int(r["p"]): r for r in csv_rows(out)}
    assert rows[31]["status"] == "bad" and rows[29]["status"] == "good"


def test_certify_pair(capsys):
    code, out, _ = run(capsys, "certify", "--curve", "[1];[1]", "--curve", "[-1];[1]", "--ell", "7", "--p-max", "100")
    assert code == 0
    cert = json.loads(out)["certificates"][0]
    assert cert["status"] == "Certified" and cert["small_ell_mode"]
    assert cert["pairs"][0]["witness"] is not None


def test_certify_same_curve_inconclusive_exit_zero(capsys):
    code, out, _ = run(capsys, "certify", "--curve", "[1];[1]", "--curve", "[1];[1]", "--ell", "11")
    assert code == 0
    assert json.loads(out)["certificates"][0]["status"] == "Inconclusive"


def test_chebotarev_ell_equals_p(capsys):
    code, _, err = run(capsys, "chebotarev", *FAMILY, "--p", "5", "--ell", "5")
    assert code == 2
    assert "'ell'" in err


def test_chebotarev_table(capsys):
    code, out, _ = run(capsys, "chebotarev", *FAMILY, "--p", "101", "--ell", "5")
    assert code == 0
    rows = csv_rows(out)
    assert len(rows) == 25


@pytest.mark.parametrize(
    "argv",
    [
        ["constants", "--g", "3..1"],
        ["genus-x0", "0"],
        ["count", "--curve", "[1];[1]"],
        ["count", "--curve", "[1];[1]", "--p", "3"],
        ["scan", *FAMILY, "--ell-range", "5..11"],
        ["certify", "--curve", "[1];[1]", "--ell", "8"],
        ["scan", "--curve", "[0,1];[1]", "--ell", "7"],
        ["constants", "--threads", "zero"],
    ],
)
def test_config_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "config error" in err


def test_computational_failure_exit_1(capsys):
    # isotrivial factor is rejected by the family model
    code, _, err = run(capsys, "chebotarev", "--curve", "[1];[1]", "--curve", "[1];[0,1]", "--p", "101", "--ell", "5")
    assert code == 1 and "computation failed" in err


def test_config_file_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# scan settings\ncurve = [0,1];[1]\ncurve = [1];[0,1]\nT = 2\nell_range = 7..13\np_max = 100\n")
    code, out, _ = run(capsys, "scan", "--config", str(cfg))
    assert code == 0
    rep = json.loads(out)
    assert rep["config"]["T"] == 2 and rep["config"]["ell_range"] == [7, 11, 13]
    code, out, _ = run(capsys, "scan", "--config", str(cfg), "--T", "1")
    assert json.loads(out)["config"]["T"] == 1


def test_config_file_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "constants", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_scan_byte_identical_across_threads(tmp_path, capsys):
    outs = []
    for threads in ("1", "2", "4", "1"):
        path = tmp_path / f"scan{len(outs)}.json"
        code, _, _ = run(capsys, "scan", *FAMILY, "--T", "2", "--ell-range", "7..13", "--p-max", "150", "--threads", threads, "-o", str(path))
        assert code == 0
        outs.append(path.read_bytes())
    assert len(set(outs)) == 1
    rep = ScanReport.from_json(outs[0].decode())
    assert json.loads(rep.to_json()) == json.loads(outs[0])


def test_json_reports_roundtrip(capsys):
    for argv in (
        ["constants", "--g", "0..4", "--format", "json"],
        ["genus-x0", "1..30", "--format", "json"],
        ["chebotarev", *FAMILY, "--p", "53", "--ell", "7", "--format", "json"],
        ["verify-group", "--ell", "7"],
    ):
        code, out, _ = run(capsys, *argv)
        assert code == 0
        parsed = json.loads(out)
        assert parsed["schema"] == 1
        assert json.dumps(parsed, indent=2, sort_keys=True) + "\n" == out


def test_verify_group_csv_log(capsys):
    code, out, _ = run(capsys, "verify-group", "--ell", "5", "--format", "csv")
    assert code == 0
    assert "# harness full_D: PASS" in out
    assert "# witness-class soundness: PASS" in out
    assert "FAIL" not in out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ellsurj", "genus-x0", "11"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.splitlines()[-1].endswith(",1")
