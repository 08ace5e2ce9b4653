import filecmp

import pytest

from distchaos.cli import RunConfig, main, parse_config_text
from distchaos.errors import ConfigError


def run(tmp_path, name, *args):
    out = tmp_path / name
    return main([*args, "--out", str(out)]), out


def test_config_parsing():
    cfg = parse_config_text("kappa = 0.03\n# comment\nseed = 4\nfull_csv = yes\n")
    assert cfg.kappa == 0.03 and cfg.seed == 4 and cfg.full_csv is True
    assert RunConfig().seed is None


@pytest.mark.parametrize("text", ["nonsense", "unknown = 1", "samples = many"])
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_shift_check(tmp_path):
    code, out = run(tmp_path, "s", "shift-check", "--set", "max_len=6")
    assert code == 0
    assert (out / "pi.pres").read_text().startswith("vertices=4 alphabet=5")


def test_segment_verify_deterministic(tmp_path, capsys):
    args = ["segment-verify", "--set", "samples=1500", "--set", "g_samples=30", "--set", "seed=5"]
    code_a, a = run(tmp_path, "a", *args)
    code_b, b = run(tmp_path, "b", *args)
    assert code_a == code_b == 0
    assert filecmp.cmp(a / "transversality.csv", b / "transversality.csv", shallow=False)
    assert "[FAIL]" not in capsys.readouterr().out


def test_missing_seed(tmp_path):
    assert run(tmp_path, "x", "segment-verify")[0] == 2
    assert run(tmp_path, "y", "census")[0] == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n_param = 0\nseed = 1\n")
    code, out = run(tmp_path, "p", "periodic-points", "--config", str(cfg))
    assert code == 0
    lines = (out / "fixed_points.csv").read_text().splitlines()
    assert lines[0] == "k,re,im,residual,max_center_distance" and len(lines) == 2


def test_bad_parameters(tmp_path):
    assert run(tmp_path, "k", "periodic-points", "--set", "kappa=0.5")[0] == 2
    assert main(["periodic-points", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["nope"])
    assert info.value.code == 2


def test_dc1_stats_outputs(tmp_path):
    args = ["dc1-stats", "--set", "shift=full2", "--set", "horizon=20000", "--set", "l_max=14"]
    code, out = run(tmp_path, "d", *args)
    assert code == 0
    assert (out / "profile.csv").read_text().startswith("threshold,horizon,phi_n")
    assert (out / "verdict.csv").read_text().startswith("epsilon,is_dc1,witness_t,witness_n,value")
    assert (out / "phi.svg").read_text().startswith("<svg")
    code2, out2 = run(tmp_path, "d2", *args)
    assert filecmp.cmp(out / "phi.svg", out2 / "phi.svg", shallow=False)


def test_itinerary_and_census(tmp_path):
    code, out = run(tmp_path, "i", "itinerary", "--set", "n_param=0", "--set", "seeds=0j",
                    "--set", "n_periods=3")
    assert code == 0
    assert (out / "itineraries.txt").read_text().split()[2] == "000"
    code, out = run(tmp_path, "c", "census", "--set", "n_param=0", "--set", "seed=2",
                    "--set", "grid_resolution=60", "--set", "shell_samples=100")
    assert code == 0
    assert (out / "census.svg").exists()
    assert "evidence" in (out / "census_summary.txt").read_text()


def test_build_scrambled(tmp_path):
    code, out = run(tmp_path, "b", "build-scrambled", "--set", "shift=full2",
                    "--set", "horizon=20000", "--set", "l_max=14", "--set", "n_max=3",
                    "--set", "count=3")
    assert code == 0
    meta = (out / "point_0.txt.meta").read_text()
    assert "epsilon=" in meta and "boundaries=" in meta
