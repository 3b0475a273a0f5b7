"""End-to-end command-line interface tests."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from hankelheat import Order, RadialProfile, build_grid, save_profile


def run_cli(args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "hankelheat"] + args,
                          capture_output=True, text=True, env=env)


def write_ini(path, text):
    path.write_text(text)
    return str(path)


def test_dist_ball_volume_matches_closed_form(tmp_path):
    cfg = write_ini(tmp_path / "c.ini", "[run]\nnu = 1.0\n"
                    "[dist]\nradius = 1.0\n")
    out = tmp_path / "vol.txt"
    res = run_cli(["dist", "--config", cfg, "--out", str(out)])
    assert res.returncode == 0, res.stderr
    text = out.read_text()
    vol = float(text.split("ball_volume=")[1].split()[0])
    assert vol == pytest.approx(math.pi * (math.cosh(1.0) - 1.0), abs=1e-6)


def test_dist_point_report(tmp_path):
    cfg = write_ini(tmp_path / "c.ini", "[run]\nnu = 2.0\n"
                    "[dist]\np = 0.0, 0.7\nq = 0.0, 0.0\n")
    res = run_cli(["dist", "--config", cfg])
    assert res.returncode == 0, res.stderr
    # distance from (0, u) to the identity is |u|
    d = float(res.stdout.split("distance=")[1].split()[0])
    assert d == pytest.approx(0.7, rel=1e-12)
    m = float(res.stdout.split("modular_0=")[1].split()[0])
    assert m == pytest.approx(math.exp(-2.0 * 0.7), rel=1e-12)


def test_hankel_roundtrip_and_determinism(tmp_path):
    grid = build_grid(2.0, 12.0, 300)
    prof = RadialProfile.from_function(grid, lambda x: np.exp(-x * x),
                                       decay_class="gaussian")
    src = tmp_path / "prof.csv"
    save_profile(prof, src)
    cfg = write_ini(tmp_path / "c.ini", "[run]\nnu = 2.0\n"
                    "target = halfline\n[io]\ninput = %s\n" % src)
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    res_a = run_cli(["hankel", "--config", cfg, "--out", str(out_a)])
    res_b = run_cli(["hankel", "--config", cfg, "--out", str(out_b)])
    assert res_a.returncode == 0, res_a.stderr
    assert res_b.returncode == 0
    assert "roundtrip_l2_error=" in res_a.stdout
    # identical configuration gives byte-identical output
    assert out_a.read_bytes() == out_b.read_bytes()


def test_hankel_strict_tolerance_reports_nonconvergence(tmp_path):
    grid = build_grid(2.0, 12.0, 120)
    prof = RadialProfile.from_function(grid, lambda x: 1.0 / (1.0 + x * x),
                                       decay_class="polynomial")
    src = tmp_path / "prof.csv"
    save_profile(prof, src)
    cfg = write_ini(tmp_path / "c.ini", "[run]\nnu = 2.0\n"
                    "target = halfline\n[io]\ninput = %s\n" % src)
    res = run_cli(["hankel", "--config", cfg, "--tol", "1e-14"])
    assert res.returncode == 3
    assert "non-convergent" in res.stderr


def test_heat_halfline_mass(tmp_path):
    cfg = write_ini(tmp_path / "c.ini", "[run]\nnu = 2.0\nt = 0.5\n"
                    "target = halfline\n")
    res = run_cli(["heat", "--config", cfg])
    assert res.returncode == 0, res.stderr
    mass = float(res.stdout.split("mass=")[1].split()[0])
    assert mass == pytest.approx(1.0, abs=1e-8)


def test_heat_extension_mass(tmp_path):
    cfg = write_ini(tmp_path / "c.ini", "[run]\nnu = 2.0\nt = 0.5\n"
                    "[grid]\nx_max = 3000\nn_x = 500\n"
                    "u_max = 12\nn_u = 120\nlayout = geometric\n")
    res = run_cli(["heat", "--config", cfg])
    assert res.returncode == 0, res.stderr
    mass = float(res.stdout.split("mass=")[1].split()[0])
    assert mass == pytest.approx(1.0, abs=1e-3)


def test_kernel_expmix_halfline(tmp_path):
    cfg = write_ini(tmp_path / "c.ini", "[run]\nnu = 2.0\n"
                    "target = halfline\n[multiplier]\nterms = 1.0:1.0\n")
    res = run_cli(["kernel", "--config", cfg])
    assert res.returncode == 0, res.stderr
    assert "l2_norm_predicted=" in res.stdout


def test_missing_config_is_a_usage_error(tmp_path):
    res = run_cli(["heat", "--config", str(tmp_path / "nope.ini")])
    assert res.returncode == 2
    assert "not found" in res.stderr


def test_bad_order_is_a_usage_error():
    res = run_cli(["heat", "--nu", "0.5"])
    assert res.returncode == 2


def test_bad_target_is_a_usage_error(tmp_path):
    cfg = write_ini(tmp_path / "c.ini", "[run]\ntarget = sphere\n")
    res = run_cli(["heat", "--config", cfg])
    assert res.returncode == 2


def test_unknown_command_is_a_usage_error():
    res = run_cli(["frobnicate"])
    assert res.returncode == 2


def test_invalid_thread_count_is_a_usage_error():
    res = run_cli(["dist", "--nu", "1.0"],
                  env_extra={"HANKELHEAT_THREADS": "many"})
    assert res.returncode == 2
    assert "HANKELHEAT_THREADS" in res.stderr


def test_check_fast_suite_passes_and_detects_faults(tmp_path):
    cfg = write_ini(tmp_path / "c.ini", "[suite]\nnu_list = 2.0\n"
                    "t_list = 0.5\nfast = true\n")
    out = tmp_path / "report.txt"
    res = run_cli(["check", "--config", cfg, "--out", str(out)])
    assert res.returncode == 0, res.stderr + out.read_text()
    report = out.read_text()
    assert "pass" in report
    # an injected constant fault must be caught by the same suite
    bad = run_cli(["check", "--config", cfg, "--inject-kappa-fault", "1.3"])
    assert bad.returncode == 1
