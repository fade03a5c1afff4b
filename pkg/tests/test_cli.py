"""Command-line interface: exit codes, artifacts, reproducibility."""

import os

import pytest

from symqoc import cli
from symqoc.config import (
    RunConfig,
    parse_run_config,
    serialize_run_config,
    thread_cap,
)


def run(argv):
    return cli.main(argv)


def test_run_config_round_trip():
    cfg = RunConfig("optimize", {"n": "4", "backend": "full"}, seed=3)
    assert parse_run_config(serialize_run_config(cfg)) == cfg


def test_thread_cap_env(monkeypatch):
    monkeypatch.delenv("SYMQOC_THREADS", raising=False)
    assert thread_cap() == 1
    monkeypatch.setenv("SYMQOC_THREADS", "4")
    assert thread_cap() == 4
    monkeypatch.setenv("SYMQOC_THREADS", "junk")
    assert thread_cap() == 1


def test_unknown_subcommand_and_flags():
    assert run(["frobnicate"]) == cli.EXIT_VALIDATION
    assert run(["optimize", "--n", "3", "--bogus"]) == cli.EXIT_VALIDATION


def test_adjoint_writes_artifacts(tmp_path):
    out = tmp_path / "adj"
    assert run(["adjoint", "--n", "4", "--group", "dn", "--out", str(out)]) == 0
    assert (out / "adjoint.csv").exists()
    assert (out / "blocks.txt").exists()
    assert (out / "resolved.cfg").exists()


def test_adjoint_size_guard():
    assert run(["adjoint", "--n", "20", "--out", "/tmp/never"]) == cli.EXIT_VALIDATION


def test_optimize_and_byte_identical_rerun(tmp_path):
    out1 = tmp_path / "a"
    rc = run([
        "optimize", "--n", "3", "--couplings", "0.2", "--backend", "first-block-d",
        "--steps", "300", "--total-time", "60", "--out", str(out1),
    ])
    assert rc == 0
    pulses1 = (out1 / "pulses.csv").read_bytes()
    trace1 = (out1 / "trace.csv").read_bytes()
    out2 = tmp_path / "b"
    rc = run(["optimize", "--config", str(out1 / "resolved.cfg"), "--out", str(out2)])
    assert rc == 0
    assert (out2 / "pulses.csv").read_bytes() == pulses1
    assert (out2 / "trace.csv").read_bytes() == trace1


def test_trotter_writes_fidelity_csv(tmp_path):
    out = tmp_path / "fid.csv"
    rc = run(["trotter", "--n", "3", "--steps", "50", "--tau", "0.05",
              "--record-every", "10", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "step,time,fidelity"
    assert len(lines) == 6
    assert float(lines[-1].split(",")[2]) > 0.996


def test_analyze_cascade_and_spectrum(tmp_path):
    opt = tmp_path / "opt"
    run(["optimize", "--n", "3", "--couplings", "0.2", "--backend", "first-block-d",
         "--steps", "200", "--total-time", "40", "--out", str(opt)])
    out = tmp_path / "ana"
    rc = run(["analyze", "--n", "3", "--couplings", "0.2",
              "--backend", "first-block-d",
              "--pulses", str(opt / "pulses.csv"), "--out", str(out)])
    assert rc == 0
    assert (out / "cascade.csv").exists()
    assert (out / "spectrum.csv").exists()


def test_bench_csv(tmp_path):
    out = tmp_path / "bench.csv"
    rc = run(["bench", "--which", "trotter", "--n-min", "3", "--n-max", "3",
              "--out", str(out)])
    assert rc == 0
    assert out.read_text().startswith("n,backend")


def test_verify_pass_and_report(capsys):
    assert run(["verify", "--n", "4", "--group", "dn"]) == 0
    captured = capsys.readouterr()
    assert "PASS" in captured.out
    assert "FAIL" not in captured.out


def test_verify_sn(capsys):
    assert run(["verify", "--n", "5", "--group", "sn"]) == 0
    out = capsys.readouterr().out
    assert "first-block dim 6" in out
