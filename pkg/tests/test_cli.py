import json
import os
import subprocess
import sys

import pytest

from meshkit.cli import main
from conftest import FIXTURES


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


F = {name: FIXTURES / name for name in ("za2.q", "za3.q", "triangle_a3.q", "tube_2x4.q", "kronecker4.q")}


def test_verdict_composition_order(capsys):
    code, data = run_json(capsys, "verdict", F["za2.q"], "--path", "b0,a0")
    assert code == 0
    assert data["verdict"] == "in_rad_n_plus_1" and data["sectional"] is False
    code, data2 = run_json(capsys, "verdict", F["za2.q"], "--path", "a0,b0")
    assert data2 == data


def test_mesh_dim(capsys):
    code, data = run_json(capsys, "mesh-dim", F["za3.q"], "--from", "(0,2)", "--to", "(1,2)", "--deg", 2, "--oracle")
    assert code == 0
    assert (data["dim"], data["exact"], data["oracle_dim"]) == (1, True, 1)


def test_validate_exit_codes(capsys, tmp_path):
    assert run(capsys, "validate", F["tube_2x4.q"])[0] == 0
    code, out, _ = run(capsys, "validate", FIXTURES / "corrupted_tau.q")
    assert code == 1 and "tau-not-injective" in out
    bad = tmp_path / "bad.q"
    bad.write_text("quiver q\nvertex u\nsigma a -> b\n")
    code, _, err = run(capsys, "validate", bad)
    assert code == 2 and "line 3" in err and "unknown arrow a" in err


def test_usage_errors(capsys):
    assert run(capsys, "mesh-dim", F["za3.q"], "--from", "(0,2)")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "validate", "/nonexistent/file.q")[0] == 2
    assert run(capsys, "verdict", F["za3.q"], "--path", "a0_1_2", "--bogus")[0] == 2


def test_domain_error_exit_one(capsys):
    code, out, err = run(capsys, "verdict", F["za2.q"], "--path", "a3,b3", "--json")
    assert code == 1
    assert json.loads(out)["error"] == "OutOfWindowError"
    assert run(capsys, "mesh2", F["triangle_a3.q"], "--vertex", "(1,2)", "--cap", 3)[0] == 1


def test_generate_and_collapse(capsys, tmp_path):
    code, out, _ = run(capsys, "generate", "kronecker", "--m", 3)
    assert code == 0 and out.startswith("quiver kronecker3\n")
    path = tmp_path / "k.q"
    path.write_text(out)
    code, data = run_json(capsys, "collapse", path)
    assert "b0" not in data["quiver"] and data["multiplicity"]["a0"] == 2
    code, out, _ = run(capsys, "generate", "ztree", "--tree", "D4", "--window=-1,2")
    assert code == 0 and "vertex (-1,4) frontier" in out


def test_cover_check_lift_fiber(capsys, tmp_path):
    code, out, _ = run(capsys, "cover", F["tube_2x4.q"], "--base", "(0,1)", "--radius", 3)
    assert code == 0
    cov = tmp_path / "t.cover"
    cov.write_text(out)
    assert out == (FIXTURES / "tube_2x4_ball3.cover").read_text()
    assert run(capsys, "check-cover", cov, "--base", F["tube_2x4.q"])[0] == 0
    code, data = run_json(capsys, "lift", cov, "--base", F["tube_2x4.q"], "--path", "u0_1,d0_1", "--start", "@")
    assert code == 0 and data["end"] == "@u0_1.d0_1"
    code, data = run_json(capsys, "fiber-sum", "--cover", cov, "--x", "@", "--Y", "(0,2)", "--deg", 1)
    assert code == 0 and data["sum"] == 1


def test_compose_and_depth(capsys):
    code, data = run_json(capsys, "compose", F["za3.q"], "--path", "a0_2_3,b0_2_3", "--oracle")
    assert code == 0
    assert data["class"] == "nonzero" and data["oracle_class"] == "nonzero"
    assert data["normal_form"] == [["b0_1_2,a1_1_2", "-1"]]
    code, data = run_json(capsys, "depth", FIXTURES / "synthetic_bypass.q", "--path", "f,g",
                          "--max-extra", 2, "--cap", 3, "--oracle")
    assert code == 0
    assert data["certificate"]["total_degree"] == 3 == data["oracle_total_degree"]


def test_mesh2_and_dims_table(capsys):
    code, data = run_json(capsys, "mesh2", F["triangle_a3.q"], "--vertex", "(1,2)", "--cap", 6)
    assert code == 0 and data["cond3"] is False and data["cond4"] is False
    code, data = run_json(capsys, "dims-table", F["triangle_a3.q"], "--from", "(2,3)", "--to", "(1,1)", "--max-deg", 4)
    assert data["rows"][0]["dims"] == [0, 0, 0, 0, 0]
    code, out, _ = run(capsys, "dims-table", F["triangle_a3.q"], "--from", "(1,3)", "--max-deg", 2)
    assert code == 0 and "(1,1) |" in out


COMMANDS = [
    ["mesh-dim", F["za3.q"], "--from", "(0,2)", "--to", "(1,2)", "--deg", "2"],
    ["verdict", F["za2.q"], "--path", "b0,a0"],
    ["compose", F["tube_2x4.q"], "--path", "u0_1,u0_2,d0_2"],
    ["cover", F["kronecker4.q"], "--base", "v0", "--radius", "3", "--kind", "generic"],
    ["dims-table", F["tube_2x4.q"], "--from", "(0,1)", "--max-deg", "3"],
    ["mesh2", F["triangle_a3.q"], "--vertex", "(1,2)", "--cap", "6"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: a[0])
def test_byte_identical_across_processes(argv):
    outs = []
    for seed in ("0", "12345"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        proc = subprocess.run(
            [sys.executable, "-m", "meshkit", *map(str, argv), "--json"], capture_output=True, env=env, check=True
        )
        outs.append(proc.stdout)
    assert outs[0] == outs[1]
