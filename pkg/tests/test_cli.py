import json
import subprocess
import sys

import pytest

from polyw.cli import build_parser, check_polygonal
from polyw.words import cyclic_word


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "polyw.cli", *args],
        capture_output=True,
        text=True,
    )
    return proc


def test_check_polygonal_exit_zero(tmp_path):
    out = tmp_path / "cert.json"
    proc = run_cli("check", "a (a^2)^b", "--out", str(out))
    assert proc.returncode == 0
    data = json.loads(out.read_text())
    assert data["status"] == "polygonal"
    assert data["result"]["verdict"]["polygonal"] is True


def test_check_obstruction_exit_one():
    proc = run_cli("check", "a b a b^2 a b^3")
    assert proc.returncode == 1
    data = json.loads(proc.stdout)
    assert data["status"] == "not-polygonal"
    assert data["result"]["evidence"] == "follower-obstruction"


def test_check_inconclusive_exit_two():
    proc = run_cli("check", "a^2 b^2 c^3 b^-3", "--rank", "3", "--max-edges", "20")
    assert proc.returncode == 2
    data = json.loads(proc.stdout)
    assert data["status"] == "inconclusive"


def test_check_strategy_not_applicable_exit_two():
    proc = run_cli("check", "a^2 b^2 c^3 b^-3", "--strategy", "tn")
    assert proc.returncode == 2
    assert json.loads(proc.stdout)["status"] == "not-applicable"


def test_parse_error_exit_three():
    proc = run_cli("check", "a^")
    assert proc.returncode == 3
    proc = run_cli("check", "a c", "--rank", "2")
    assert proc.returncode == 3


def test_usage_error_exit_three():
    proc = run_cli("frobnicate")
    assert proc.returncode == 3


def test_rho_member_exit_codes():
    assert run_cli("rho", "a^6 b^-3 c^5 b^4 c^-7").returncode == 0
    assert run_cli("rho", "a^2 b^2 c^3 b^-3").returncode == 1


def test_minimize_output():
    proc = run_cli("minimize", "a b a b^2 a b^3")
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    assert data["length"] == 5


def test_diskbusting_exit_codes():
    assert run_cli("diskbusting", "a (a^2)^b").returncode == 0
    assert run_cli("diskbusting", "a^2 b^2 c^3 b^-3").returncode == 1


def test_cover_and_render_roundtrip(tmp_path):
    cert_path = tmp_path / "cert.json"
    proc = run_cli(
        "check", "a^2 (a^-1)^b a a^b", "--strategy", "search",
        "--max-disks", "1", "--out", str(cert_path),
    )
    assert proc.returncode == 0
    proc = run_cli("cover", str(cert_path))
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["degree"] == 7 and report["chi_S0"] == -4
    proc = run_cli("render", str(cert_path))
    assert proc.returncode == 0 and proc.stdout.startswith("digraph")
    proc = run_cli("render", str(cert_path), "--cover")
    assert proc.returncode == 0 and "a2" in proc.stdout


def test_cover_rejects_declarative(tmp_path):
    cert_path = tmp_path / "pp.json"
    proc = run_cli("check", "abab", "--rank", "2", "--out", str(cert_path))
    assert proc.returncode == 0
    assert run_cli("cover", str(cert_path)).returncode == 3


def test_stats_csv_and_seed_env(tmp_path, monkeypatch):
    proc = run_cli("stats", "--length", "30", "--samples", "50", "--seed", "4")
    assert proc.returncode == 0
    lines = proc.stdout.strip().splitlines()
    assert lines[0].startswith("N,samples,seed")
    assert lines[1].split(",")[0] == "30"
    proc_json = run_cli(
        "stats", "--length", "30", "--samples", "50", "--seed", "4",
        "--format", "json",
    )
    data = json.loads(proc_json.stdout)
    assert data["rng"] == "numpy-philox4x64"


def test_emitted_json_roundtrips_through_library(tmp_path):
    from polyw.complexes import PolygonalityCertificate

    cert_path = tmp_path / "cert.json"
    run_cli("check", "a (a^2)^b", "--out", str(cert_path))
    data = json.loads(cert_path.read_text())
    cert = PolygonalityCertificate.from_json_dict(data["result"])
    assert cert.verify()
    assert cert.word == cyclic_word("a (a^2)^b")


def test_check_polygonal_library_pipeline():
    verdict = check_polygonal(cyclic_word("a^2 b^-3 c^2"))
    assert verdict.status == "polygonal" and verdict.exit_code == 0
    verdict = check_polygonal(cyclic_word("ab"))
    assert verdict.status == "not-polygonal" and verdict.exit_code == 1
