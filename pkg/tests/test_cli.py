import json

import pytest
from conftest import EXPERIMENTS

from desiredstate.cli import EXIT_DIAGNOSTICS, EXIT_INFEASIBLE, EXIT_LIMIT, EXIT_OK, build_parser, main
from desiredstate.configuration import parse_cdd, serialize_cdd

EXP7 = str(EXPERIMENTS / "exp7.deladas")
MATHS = str(EXPERIMENTS / "maths.deladas")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def infeasible(tmp_path):
    p = tmp_path / "none.deladas"
    p.write_text("host h1\nconstraintSet c ( card(getComponents(h1)) >= 5 )\n")
    return str(p)


def test_every_subcommand_is_registered():
    sub = next(a for a in build_parser()._actions if a.dest == "command")
    assert set(sub.choices) == {"check", "count", "solve", "pick", "validate", "simulate", "bench"}


# -- check -----------------------------------------------------------------


def test_check_clean_files(capsys):
    code, out, _ = run(capsys, "check", EXP7, MATHS)
    assert code == EXIT_OK and out.count(": ok") == 2


def test_check_reports_positions(capsys, tmp_path):
    bad = tmp_path / "bad.deladas"
    bad.write_text("host h1 extends Missing ()\n")
    code, out, _ = run(capsys, "check", str(bad))
    assert code == EXIT_DIAGNOSTICS
    assert f"{bad}:1:" in out and "unresolved host template 'Missing'" in out


def test_check_json_and_print(capsys, tmp_path):
    bad = tmp_path / "bad.deladas"
    bad.write_text("host h1\nhost h1\n")
    code, out, _ = run(capsys, "check", "--json", str(bad))
    assert code == EXIT_DIAGNOSTICS
    assert json.loads(out)["diagnostics"][0]["message"].startswith("duplicate host")
    code, out, _ = run(capsys, "check", "--print", EXP7)
    assert code == EXIT_OK and "maxInstancesPerHost" in out


def test_missing_file(capsys):
    code, _, err = run(capsys, "count", "/nonexistent.deladas")
    assert code == EXIT_DIAGNOSTICS and "nonexistent" in err


# -- count -----------------------------------------------------------------


def test_count_exp7(capsys):
    code, out, _ = run(capsys, "count", EXP7)
    assert code == EXIT_OK
    assert out.splitlines()[0] == "variables=80 solutions=104 exhausted=true"


def test_count_limit_and_override(capsys):
    code, out, _ = run(capsys, "count", EXP7, "--limit", "10")
    assert code == EXIT_OK and out.startswith("variables=80 solutions=10 exhausted=false")
    code, out, _ = run(capsys, "count", str(EXPERIMENTS / "exp1.deladas"), "--max-count", "2")
    assert out.startswith("variables=2 solutions=3 ")


def test_count_explain_and_dump(capsys, tmp_path):
    dump = tmp_path / "model.txt"
    code, out, _ = run(capsys, "count", MATHS, "--explain", "--dump", str(dump), "--limit", "1")
    assert code == EXIT_OK and "mathsServiceCons[3]" in out
    assert dump.read_text().startswith("vars 230 cons 246")


def test_count_infeasible_exits_2(capsys, infeasible):
    code, out, _ = run(capsys, "count", infeasible)
    assert code == EXIT_INFEASIBLE and "solutions=0 exhausted=true" in out


def test_limit_before_first_solution_exits_3(capsys):
    code, out, _ = run(capsys, "count", EXP7, "--limit", "0")
    assert code == EXIT_LIMIT and "solutions=0 exhausted=false" in out


def test_compile_error_exits_1(capsys, tmp_path):
    p = tmp_path / "neg.deladas"
    p.write_text(open(EXP7).read() + "\nconstraintSet c ( not (card(getComponents(h1)) = 1) )\n")
    code, _, err = run(capsys, "count", str(p))
    assert code == EXIT_DIAGNOSTICS and "compile error" in err


def test_bad_arguments_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["count", EXP7, "--limit", "-1"])
    assert exc.value.code == 2


# -- solve / pick / validate -----------------------------------------------


def test_solve_writes_documents(capsys, tmp_path):
    code, _, err = run(capsys, "solve", EXP7, "--limit", "3", "-o", str(tmp_path))
    assert code == EXIT_OK and "solutions=3 exhausted=false" in err
    files = sorted(tmp_path.glob("*.cdd"))
    assert [f.name for f in files] == ["exp7-0001.cdd", "exp7-0002.cdd", "exp7-0003.cdd"]
    assert len(parse_cdd(files[0].read_text())) == 0


def test_solve_to_stdout_and_infeasible(capsys, infeasible):
    code, out, _ = run(capsys, "solve", EXP7)
    assert code == EXIT_OK and out.startswith('<cdd dsd="exp7"')
    code, out, _ = run(capsys, "solve", infeasible)
    assert code == EXIT_INFEASIBLE and out == ""


def _maths_current(tmp_path, capsys):
    code, out, _ = run(capsys, "pick", MATHS, "--limit", "200")
    assert code == EXIT_OK
    path = tmp_path / "current.cdd"
    path.write_text(out)
    return path, parse_cdd(out)


def test_pick_from_empty_and_from_current(capsys, tmp_path):
    path, current = _maths_current(tmp_path, capsys)
    assert len(current) >= 5
    code, out, err = run(capsys, "pick", MATHS, "--current", str(path), "--limit", "200")
    assert code == EXIT_OK and parse_cdd(out) == current
    assert "cost=0" in err


def test_pick_first_policy(capsys):
    code, out, err = run(capsys, "pick", EXP7, "--policy", "first")
    assert code == EXIT_OK and "seen=1 index=0" in err
    assert len(parse_cdd(out)) == 0


def test_validate_compliant_and_mutated(capsys, tmp_path):
    path, current = _maths_current(tmp_path, capsys)
    code, out, _ = run(capsys, "validate", str(path), "--dsd", MATHS)
    assert code == EXIT_OK and out.startswith("compliant=true")

    from dataclasses import replace

    first = min(current.connections)
    broken = replace(current, connections=current.connections - {first})
    bad = tmp_path / "broken.cdd"
    bad.write_text(serialize_cdd(broken))
    code, out, err = run(capsys, "validate", str(bad), "--dsd", MATHS)
    assert code == EXIT_DIAGNOSTICS
    assert "violated: binding-completeness" in err
    assert f"({first.client}, {first.port}) has 0 connections" in out

    code, out, _ = run(capsys, "validate", "--json", str(bad), "--dsd", MATHS)
    assert json.loads(out)["compliant"] is False


def test_validate_malformed_and_unknown(capsys, tmp_path):
    bad = tmp_path / "x.cdd"
    bad.write_text("<cdd>")
    code, _, err = run(capsys, "validate", str(bad), "--dsd", MATHS)
    assert code == EXIT_DIAGNOSTICS and "malformed XML" in err
    bad.write_text('<cdd dsd="maths"><instance host="h42" type="MathsService" index="1"/></cdd>')
    code, _, err = run(capsys, "validate", str(bad), "--dsd", MATHS)
    assert code == EXIT_DIAGNOSTICS and "h42" in err


# -- simulate ----------------------------------------------------------------


def test_simulate_with_the_example_fault_script(capsys, tmp_path):
    log = tmp_path / "run.log"
    argv = ["simulate", MATHS, "--faults", str(EXPERIMENTS / "maths.faults"), "--cap", "300", "-o", str(log)]
    code, out, _ = run(capsys, *argv)
    assert code == EXIT_OK and out == ""
    lines = log.read_text().splitlines()
    assert any(line.endswith("probe h4 HostDown") for line in lines)
    assert lines[-1].endswith("degraded=false")
    first = log.read_text()
    run(capsys, *argv)
    assert log.read_text() == first


def test_simulate_degraded_exits_2(capsys, tmp_path):
    script = tmp_path / "f.txt"
    script.write_text("at 15 host-crash h3\nat 15 host-crash h4\nat 15 host-crash h5\n")
    code, out, _ = run(capsys, "simulate", MATHS, "--faults", str(script), "--cap", "100")
    assert code == EXIT_INFEASIBLE and "unresolvable-violation" in out


def test_simulate_bad_fault_script(capsys, tmp_path):
    script = tmp_path / "f.txt"
    script.write_text("at 5 host-crash h1\nat five host-crash h2\n")
    code, _, err = run(capsys, "simulate", MATHS, "--faults", str(script))
    assert code == EXIT_DIAGNOSTICS and "line 2" in err
    script.write_text("at 5 host-crash h77\n")
    code, _, err = run(capsys, "simulate", MATHS, "--faults", str(script), "--cap", "100")
    assert code == EXIT_DIAGNOSTICS and "h77" in err


# -- bench -------------------------------------------------------------------


def test_bench_tsv(capsys):
    code, out, _ = run(capsys, "bench", "--only", "exp1,exp7,exp11", "--time-budget", "2")
    assert code == EXIT_OK
    rows = [line.split("\t") for line in out.strip().splitlines()]
    header = rows[0]
    assert header[:4] == ["name", "variables", "solutions", "exhausted"]
    table = {r[0]: dict(zip(header, r)) for r in rows[1:]}
    assert table["exp1"]["solutions"] == "2" and table["exp1"]["published_solutions"] == "2"
    assert table["exp7"]["variables"] == "80" and table["exp7"]["solutions"] == "104"
    assert table["exp11"]["variables"] == "230" and table["exp11"]["published_solutions"] == "5634300"
