from pathlib import Path

import pytest

from guitestgen.cli import DEFAULT_OUT, ENV_OUT, build_parser, main, output_dir

SMALL = ["--app-preset", "desk", "--episodes", "4", "--actions-per-episode", "8"]


def tree(root: Path) -> dict[str, bytes]:
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_output_dir_precedence(monkeypatch):
    monkeypatch.delenv(ENV_OUT, raising=False)
    assert output_dir(None) == Path(DEFAULT_OUT)
    monkeypatch.setenv(ENV_OUT, "from-env")
    assert output_dir(None) == Path("from-env")
    assert output_dir("from-flag") == Path("from-flag")


def test_subcommand_required():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_run(tmp_path, capsys):
    assert main(["run", *SMALL, "--repetitions", "2", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.startswith(f"8 runs of desk, artifacts in {tmp_path}")
    assert (tmp_path / "tables" / "action_classes.csv").is_file()
    assert (tmp_path / "automata" / "SSRLS.dot").is_file()


def test_run_uses_environment_out(tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_OUT, str(tmp_path / "env"))
    assert main(["run", *SMALL, "--repetitions", "2", "--strategy", "RLS"]) == 0
    assert (tmp_path / "env" / "logs" / "RLS-seed0.tsv").is_file()


def test_explore_report_verify(tmp_path, capsys):
    assert main(["explore", *SMALL, "--strategy", "SSRLS", "--seed", "3", "--out", str(tmp_path)]) == 0
    log = tmp_path / "logs" / "SSRLS-seed3.tsv"
    assert log.is_file()
    assert (tmp_path / "reports" / "SSRLS-seed3" / "index.html").is_file()
    assert (tmp_path / "automata" / "SSRLS.dot").is_file()
    assert "4 test cases" in capsys.readouterr().out

    rendered = tmp_path / "again"
    assert main(["report", "--log", str(log), "--out", str(rendered)]) == 0
    assert tree(rendered / "reports" / "SSRLS-seed3") == tree(tmp_path / "reports" / "SSRLS-seed3")
    assert "4 test cases rendered" in capsys.readouterr().out

    assert main(["verify", "--log", str(log), "--out", str(tmp_path)]) == 0
    printed = capsys.readouterr().out
    assert printed.splitlines()[0] == "Functional area,Test objectives,Satisfied w/ SSRLS-seed3"
    for name in ("coverage.csv", "oracles-SSRLS-seed3.csv", "triage-SSRLS-seed3.txt"):
        assert (tmp_path / "tables" / name).is_file()


def test_errors_exit_with_status_one(tmp_path, capsys):
    assert main(["run", *SMALL, "--repetitions", "0", "--out", str(tmp_path)]) == 1
    assert "guitestgen:" in capsys.readouterr().err
    bad = tmp_path / "cfg.json"
    bad.write_text("{")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert "invalid JSON" in capsys.readouterr().err


def test_missing_log_is_reported(tmp_path):
    with pytest.raises(SystemExit, match="cannot read run log"):
        main(["report", "--log", str(tmp_path / "nope.tsv"), "--out", str(tmp_path)])


@pytest.mark.parametrize("argv", [
    ["run", *SMALL, "--repetitions", "2"],
    ["explore", *SMALL, "--strategy", "SSRLS_fillForms", "--seed", "5"],
])
def test_repeated_invocation_is_byte_identical(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([*argv, "--out", str(a)]) == 0
    assert main([*argv, "--out", str(b)]) == 0
    first, second = tree(a), tree(b)
    assert first and first == second
