from __future__ import annotations

import json
import os
import subprocess
import sys


from conftest import CORPUS_FILES
from viewcheck.cli import EXIT_FUEL, EXIT_IO, EXIT_OK, EXIT_STUCK, EXIT_TYPE, corpus_root, main


def cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out + out.err


def corpus(name):
    return str(corpus_root() / name)


def test_check_ok(capsys):
    code, out = cli(capsys, "check", corpus("fig2_array.vats"))
    assert code == EXIT_OK and "ok" in out


def test_check_whole_corpus_in_parallel(capsys):
    code, _ = cli(capsys, "check", "--jobs", "2", *map(corpus, CORPUS_FILES))
    assert code == EXIT_OK


def test_mutated_bound_is_rejected(tmp_path, capsys):
    bad = tmp_path / "bad.vats"
    bad.write_text((corpus_root() / "fig2_array.vats").read_text().replace("i < n}", "i <= n}"))
    code, out = cli(capsys, "check", str(bad))
    assert code == EXIT_TYPE and "bad.vats:" in out and "error" in out


def test_json_diagnostics(tmp_path, capsys):
    bad = tmp_path / "bad.vats"
    bad.write_text((corpus_root() / "fig2_array.vats").read_text().replace("i < n}", "i <= n}"))
    code, out = cli(capsys, "check", "--json", str(bad))
    assert code == EXIT_TYPE
    assert json.loads(out)


def test_missing_file(capsys):
    code, out = cli(capsys, "check", "/nonexistent/x.vats")
    assert code == EXIT_IO and "[io]" in out


def test_syntax_error(tmp_path, capsys):
    bad = tmp_path / "s.vats"
    bad.write_text("val main = (")
    assert cli(capsys, "check", str(bad))[0] == EXIT_IO


def test_run_with_store_dump(capsys):
    code, out = cli(capsys, "run", corpus("reverse_demo.vats"), "--dump-store")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "l_1"
    assert [x for x in lines if x.startswith("l_")][1:] == sorted(
        [x for x in lines if x.startswith("l_")][1:], key=lambda s: int(s[2:].split()[0]))
    assert "l_6 = null" in lines


def test_run_instrumented_with_oracle(capsys):
    code, out = cli(capsys, "run", corpus("fig2_array.vats"), "--check-every", "1")
    assert code == EXIT_OK and out.strip() == "20"


def test_run_without_main(tmp_path, capsys):
    f = tmp_path / "nomain.vats"
    f.write_text("fun id (x: Int): Int = x\n")
    code, out = cli(capsys, "run", str(f))
    assert code == EXIT_OK and "no main" in out


def test_fuel_exhaustion(tmp_path, capsys):
    f = tmp_path / "loop.vats"
    f.write_text("fun loop (x: Int): Int = loop (x)\nval main = loop (1)\n")
    code, out = cli(capsys, "run", str(f), "--fuel", "1")
    assert code == EXIT_FUEL and "fuel" in out


def test_exit_codes_are_distinct():
    assert len({EXIT_OK, EXIT_TYPE, EXIT_IO, EXIT_STUCK, EXIT_FUEL}) == 5


def test_erase(capsys):
    code, out = cli(capsys, "erase", corpus("fig2_array.vats"))
    assert code == EXIT_OK and "getPtr p" in out and "pf" not in out


def test_erase_ill_typed(tmp_path, capsys):
    bad = tmp_path / "bad.vats"
    bad.write_text((corpus_root() / "fig2_array.vats").read_text().replace("i < n}", "i <= n}"))
    assert cli(capsys, "erase", str(bad))[0] == EXIT_TYPE


def test_trace_shows_store_updates(capsys):
    code, out = cli(capsys, "trace", corpus("fig2_array.vats"))
    assert code == EXIT_OK
    assert "ST[l_1 := 10]" in out and "step 1:" in out


def test_trace_with_oracle(capsys):
    code, out = cli(capsys, "trace", corpus("fig11_refs.vats"), "--check-every", "1")
    assert code == EXIT_OK and "oracle @ step 0: ok" in out


def test_explain_constraints(capsys):
    code, out = cli(capsys, "check", "--explain-constraints", corpus("fig2_array.vats"))
    assert code == EXIT_OK and "query:" in out and "valid" in out


def test_corpus_prefix_and_env_override(tmp_path):
    (tmp_path / "only.vats").write_text("val main = 41 + 1\n")
    env = dict(os.environ, VIEWCHECK_CORPUS=str(tmp_path))
    out = subprocess.run([sys.executable, "-m", "viewcheck", "run", "corpus/only.vats"],
                         capture_output=True, text=True, env=env)
    assert out.returncode == EXIT_OK and out.stdout.strip() == "42"


def test_trace_proofs(capsys):
    code, out = cli(capsys, "check", "--trace-proofs", corpus("fig2_array.vats"))
    assert code == EXIT_OK and "vw-con" in out
