from __future__ import annotations

from ledgerfuzz import encode
from ledgerfuzz.cli import main
from ledgerfuzz.targets import get_target


def test_list_targets(capsys):
    assert main(["list-targets"]) == 0
    out = capsys.readouterr().out.split()
    assert out == ["drm", "example01", "foodtrace", "marbles", "smallbank"]


def test_unknown_target_exits_2_and_names_valid_ones(capsys):
    code = main(["fuzz", "--target", "nope", "--budget-execs", "0", "--dir", "/tmp/x"])
    captured = capsys.readouterr()
    assert code == 2
    assert "example01" in captured.err


def test_unknown_flag_exits_2():
    assert main(["fuzz", "--target", "drm", "--frobnicate"]) == 2


def test_missing_command_exits_2():
    assert main([]) == 2


def test_help_lists_flags_and_defaults(capsys):
    assert main(["fuzz", "--help"]) == 0
    text = " ".join(capsys.readouterr().out.split())
    for flag in ("--target", "--seed", "--mutators", "--budget-execs",
                 "--budget-secs", "--workers", "--dir"):
        assert flag in text
    assert "all except 1,19" in text
    assert "default: 1" in text  # workers
    assert "LEDGERFUZZ_DIR" in text


def test_top_level_help_lists_commands(capsys):
    assert main(["--help"]) == 0
    text = capsys.readouterr().out
    for command in ("fuzz", "run", "bench-mutators", "report", "list-targets"):
        assert command in text


def test_fuzz_vulnerable_target_exits_1(tmp_path, capsys):
    code = main([
        "fuzz", "--target", "drm", "--seed", "3",
        "--budget-execs", "3000", "--dir", str(tmp_path / "drm"),
    ])
    assert code == 1
    out = capsys.readouterr().out
    assert "distinct crash signatures" in out


def test_fuzz_clean_target_exits_0(tmp_path):
    code = main([
        "fuzz", "--target", "example01", "--seed", "3",
        "--budget-execs", "1000", "--dir", str(tmp_path / "ex"),
    ])
    assert code == 0


def test_fuzz_bad_mutator_list_exits_2():
    assert main(["fuzz", "--target", "drm", "--mutators", "0,99"]) == 2
    assert main(["fuzz", "--target", "drm", "--mutators", "zero"]) == 2


def test_run_replays_witness_and_dumps_state(tmp_path, capsys):
    spec = get_target("smallbank")
    witness = spec.witnesses[0]
    path = tmp_path / "witness"
    path.write_bytes(witness.data)
    code = main(["run", "--target", "smallbank", "--seed", "0", str(path)])
    captured = capsys.readouterr().out
    assert code == 1
    assert "crash: Abort" in captured
    assert "overflow" in captured
    assert "state:" in captured
    # hex(key)=hex(value) line for the wrapped balance
    assert "rich".encode().hex() in captured


def test_run_clean_input_exits_0(tmp_path, capsys):
    path = tmp_path / "input"
    path.write_bytes(encode(0, [b"10"]))
    code = main(["run", "--target", "example01", "--seed", "0", str(path)])
    captured = capsys.readouterr().out
    assert code == 0
    assert "verdict: 1" in captured


def test_run_missing_file_exits_2(tmp_path):
    assert main(["run", "--target", "drm", "--seed", "0", str(tmp_path / "absent")]) == 2


def test_report_summarizes_run_dir(tmp_path, capsys):
    assert main([
        "fuzz", "--target", "marbles", "--seed", "5",
        "--budget-execs", "4000", "--dir", str(tmp_path),
    ]) == 1
    capsys.readouterr()
    assert main(["report", "--dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "suppressions: " in out
    assert "OracleMismatch" in out


def test_report_missing_dir_exits_2(tmp_path, capsys):
    assert main(["report", "--dir", str(tmp_path / "nothing")]) == 2


def test_bench_mutators_cli_smoke(tmp_path, capsys):
    code = main([
        "bench-mutators", "--target", "example01", "--seed", "1",
        "--per-op-secs", "0.03", "--dir", str(tmp_path),
    ])
    captured = capsys.readouterr().out
    assert code == 0
    lines = [l for l in captured.splitlines() if l.strip() and "csv" not in l]
    assert lines[0].split()[:4] == ["ID", "corpus", "execs", "cover"]
    assert len(lines) == 21
    csv_path = tmp_path / "bench_report.csv"
    assert csv_path.exists()
    assert csv_path.read_text().splitlines()[0] == "id,corpus,execs,cover,time1_ms,time2_ms"


def test_dir_defaults_to_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("LEDGERFUZZ_DIR", str(tmp_path / "from-env"))
    assert main(["fuzz", "--target", "example01", "--seed", "1", "--budget-execs", "10"]) == 0
    assert (tmp_path / "from-env" / "corpus").is_dir()


def test_seed_is_drawn_and_printed_when_omitted(tmp_path, capsys):
    code = main([
        "fuzz", "--target", "example01", "--budget-execs", "10",
        "--dir", str(tmp_path),
    ])
    assert code == 0
    assert "seed: " in capsys.readouterr().out
