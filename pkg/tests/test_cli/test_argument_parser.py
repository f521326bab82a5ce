# SPDX-License-Identifier: LGPL-3.0-or-later
import json

import pytest

from curvedg.cli.argument_parser import COMMANDS, build_parser, parse_args_with_config
from curvedg.core.exceptions import Fatal
from fakes.fake_logger import FakeLogger


def _case(tmp_path, text, name="case.yaml"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_subcommands_and_path_overrides():
    p = build_parser()
    args = p.parse_args(["--threads", "4", "--deterministic", "solve", "--mesh", "m.msh", "--curved-mesh", "c.cdg"])
    assert args.command == "solve"
    assert args.threads == 4 and args.deterministic
    assert args.mesh_path == "m.msh" and args.curved_mesh_path == "c.cdg"

    args = p.parse_args(["bench", "--degree", "3", "--bench-threads", "1", "2"])
    assert args.bench_degree == 3 and args.bench_threads == [1, 2]

    args = p.parse_args(["export", "--vtk", "out.vtk"])
    assert args.vtk_path == "out.vtk"


def test_command_is_optional_on_the_parser():
    args = build_parser().parse_args([])
    assert args.command is None
    assert args.threads == 1 and not args.deterministic


def test_threads_must_be_positive():
    with pytest.raises(SystemExit) as ei:
        build_parser().parse_args(["--threads", "0", "bench"])
    assert ei.value.code == 2


def test_command_and_threads_from_case_file(tmp_path):
    cfg = _case(tmp_path, "command: bench\nthreads: 3\nbench:\n  degree: 2\n")
    args, conf, _ = parse_args_with_config(["--config", cfg], logger=FakeLogger())
    assert args.command == "bench"
    assert args.threads == 3
    assert conf["bench"] == {"degree": 2}


def test_cli_overrides_case_file(tmp_path):
    cfg = _case(tmp_path, "command: bench\nthreads: 3\n")
    args, _, _ = parse_args_with_config(["--config", cfg, "--threads", "2", "solve", "--mesh", "x.msh"], logger=FakeLogger())
    assert args.command == "solve"
    assert args.threads == 2


def test_cmd_alias_selects_command(tmp_path):
    cfg = _case(tmp_path, "cmd: Bench\n")
    args, _, _ = parse_args_with_config(["--config", cfg], logger=FakeLogger())
    assert args.command == "bench"


def test_misspelled_top_level_key_is_rejected(tmp_path):
    ok = _case(tmp_path, "command: bench\nriemann: llf\ncurved_mesh: c.cdg\n", "ok.yaml")
    assert parse_args_with_config(["--config", ok], logger=FakeLogger())[0].command == "bench"

    bad = _case(tmp_path, "command: bench\nthread: 3\n", "bad.yaml")
    with pytest.raises(Fatal) as ei:
        parse_args_with_config(["--config", bad], logger=FakeLogger())
    assert ei.value.code == 2


def test_missing_command_is_a_config_error():
    log = FakeLogger()
    with pytest.raises(Fatal) as ei:
        parse_args_with_config([], logger=log)
    assert ei.value.code == 2
    assert any("No command" in m for m in log.messages("error"))


def test_unknown_command_in_case_file(tmp_path):
    cfg = _case(tmp_path, "command: fly\n")
    with pytest.raises(Fatal) as ei:
        parse_args_with_config(["--config", cfg], logger=FakeLogger())
    assert ei.value.code == 2


@pytest.mark.parametrize("cmd", ["curve", "solve", "export"])
def test_mesh_required_for_mesh_commands(cmd):
    with pytest.raises(Fatal) as ei:
        parse_args_with_config([cmd], logger=FakeLogger())
    assert ei.value.code == 2


def test_curve_needs_a_box(tmp_path):
    cfg = _case(tmp_path, "mesh:\n  builtin: {n: 3}\n")
    with pytest.raises(Fatal):
        parse_args_with_config(["--config", cfg, "curve"], logger=FakeLogger())
    cfg = _case(tmp_path, "mesh:\n  builtin: {n: 3}\ncurving:\n  box_lo: [0, 0, 0]\n  box_hi: [1, 1, 1]\n", "boxed.yaml")
    args, _, _ = parse_args_with_config(["--config", cfg, "curve"], logger=FakeLogger())
    assert args.command == "curve"


def test_negative_bench_repetitions_rejected():
    with pytest.raises(Fatal):
        parse_args_with_config(["bench", "--repetitions", "-1"], logger=FakeLogger())


def test_dump_config_prints_merged_config(tmp_path, capsys):
    base = _case(tmp_path, "command: solve\nrun:\n  cfl: 0.5\n  p_schedule: [2]\n", "base.yaml")
    over = _case(tmp_path, "run:\n  cfl: 0.25\n", "over.yaml")
    with pytest.raises(SystemExit) as ei:
        parse_args_with_config(["--config", base, "--config", over, "--dump-config"], logger=FakeLogger())
    assert ei.value.code == 0
    dumped = json.loads(capsys.readouterr().out)
    assert dumped["run"] == {"cfl": 0.25, "p_schedule": [2]}
    assert dumped["command"] == "solve"


def test_dump_args(tmp_path, capsys):
    with pytest.raises(SystemExit) as ei:
        parse_args_with_config(["--dump-args", "bench"], logger=FakeLogger())
    assert ei.value.code == 0
    dumped = json.loads(capsys.readouterr().out)
    assert dumped["command"] == "bench"


def test_command_list():
    assert COMMANDS == ("curve", "solve", "export", "bench")
