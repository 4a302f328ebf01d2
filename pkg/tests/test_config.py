import pytest

from chanrecon.config import CONFIG_VERSION, RunConfig, load_config, parse_config
from chanrecon.errors import ConfigError


def problems_of(text):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    return info.value.problems


def test_defaults_valid():
    cfg = load_config(None)
    assert cfg.scenario.nt == 128
    assert cfg.scenario.ue_antennas == 8
    assert (cfg.link.num_users, cfg.link.streams_per_user) == (7, 2)
    assert cfg.methods.method1_l == (2, 4, 6, 8)
    assert cfg.config_version == CONFIG_VERSION


def test_empty_text_is_defaults():
    assert parse_config("") == RunConfig()


def test_full_example_round_trip():
    cfg = parse_config("""
[run]
master_seed = 99
output_dir = results
[scenario]
bs_n_azimuth = 4
bs_n_elevation = 4
ue_antennas = 4
[link]
num_users = 3
snr_db = 10, 40
drops = 5
[methods]
method1_l = 4, 2
[flops]
nt = 32:64:16      ; inclusive
[bound]
spectra = flat
spectrum.custom = 1, 0.5, 0.25, 0.1, 0, 0, 0, 0
trials = 200
""")
    assert cfg.master_seed == 99 and cfg.output_dir == "results"
    assert cfg.scenario.nt == 32
    assert cfg.link.snr_db == (10.0, 40.0)
    assert cfg.methods.method1_l == (4, 2)
    assert cfg.flops.nt == (32, 48, 64)
    names = [n for n, _ in cfg.bound_spectra()]
    assert names == ["flat", "custom"]


def test_l_above_m_rejected():
    probs = problems_of("[methods]\nmethod1_l = 2, 10\n")
    assert any("M >= L >= S" in p and "L=10" in p for p in probs)


def test_l_below_s_rejected():
    probs = problems_of("[link]\nstreams_per_user = 3\n[methods]\nmethod1_l = 2, 4\n")
    assert any("M >= L >= S" in p and "L=2" in p for p in probs)


def test_zf_infeasible_rejected():
    probs = problems_of("""
[scenario]
bs_n_azimuth = 4
bs_n_elevation = 2
[link]
num_users = 9
streams_per_user = 2
""")
    assert any("K*S <= Nt" in p for p in probs)


def test_all_problems_reported_together():
    probs = problems_of("""
[run]
config_version = 7
[scenario]
colour = red
[link]
num_users = 70
[methods]
method1_l = 12
[bound]
trials = 10
[extra]
""")
    text = "\n".join(probs)
    for needle in ("config_version", "unknown key 'colour'", "K*S <= Nt", "M >= L >= S",
                   "trials", "unknown section [extra]"):
        assert needle in text
    assert len(probs) >= 6


def test_scenario_errors_collected():
    probs = problems_of("[scenario]\nue_antennas = 0\nn_rays = -1\n")
    assert any("ue_antennas" in p for p in probs)
    assert any("n_rays" in p for p in probs)


def test_bad_values_and_parse_errors():
    probs = problems_of("[link]\nnum_users = seven\ndrops = 2.5\n")
    assert len(probs) == 2
    probs = problems_of("no header\n")
    assert probs[0].startswith("parse error") and "line" in probs[0]


def test_custom_spectrum_checks():
    probs = problems_of("[bound]\nspectrum.bad = 0.1, 1\nspectra = flat, nope\n")
    text = "\n".join(probs)
    assert "expected m=8" in text and "non-increasing" in text and "'nope'" in text


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.ini")
