import math

import pytest

from irslab.geometry import SPEED_OF_LIGHT
from irslab.scenario import (
    Scenario,
    ScenarioError,
    default_scenario,
    load_scenario,
    parse_scenario,
    scenario_keys,
)


class TestDefaults:
    def test_empty_text_gives_default_scenario(self):
        sc = parse_scenario("")
        assert sc["irs.n_y"] == 100
        assert sc["irs.n_z"] == 100
        assert sc["partition.k_y"] == 10
        assert sc["grid.f_c_ghz"] == 300.0
        assert sc["grid.bandwidth_ghz"] == 30.0
        assert sc["grid.subcarriers"] == 128
        assert sc["bs.x_m"] == 0.0 and sc["bs.y_m"] == 1.5 and sc["bs.z_m"] == -1.5
        assert sc["user.x_m"] == 2.0 and sc["user.y_m"] == -4.0 and sc["user.z_m"] == -2.0

    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.scn"
        p.write_text("")
        sc = load_scenario(p)
        assert sc.values == default_scenario().values

    def test_missing_spacing_defaults_to_half_wavelength(self):
        sc = parse_scenario("")
        expected = SPEED_OF_LIGHT / 300e9 / 2
        assert sc.spacing == pytest.approx(expected, rel=1e-15)
        assert sc.spacing == pytest.approx(0.49965e-3, abs=1e-8)

    def test_half_wavelength_follows_center_frequency(self):
        sc = parse_scenario("grid.f_c_ghz = 150\n")
        assert sc.spacing == pytest.approx(SPEED_OF_LIGHT / 150e9 / 2, rel=1e-15)

    def test_explicit_spacing_honored(self):
        sc = parse_scenario("irs.d_m = 0.0005\n")
        assert sc.spacing == 0.0005

    def test_comments_and_blank_lines(self):
        text = "# a comment\n\ngrid.subcarriers = 64\nrate.noise_dbm_hz = -170  # trailing comment\n"
        sc = parse_scenario(text)
        assert sc["grid.subcarriers"] == 64
        assert sc["rate.noise_dbm_hz"] == -170.0


class TestValidation:
    def test_partition_must_divide(self):
        with pytest.raises(ScenarioError, match="divisible"):
            parse_scenario("partition.k_y = 7\n")

    def test_unknown_key_reports_line(self):
        with pytest.raises(ScenarioError, match=r"<string>:2: unknown key 'irs.nx'"):
            parse_scenario("irs.n_y = 100\nirs.nx = 3\n")

    def test_duplicate_key(self):
        with pytest.raises(ScenarioError, match="duplicate"):
            parse_scenario("irs.n_y = 10\nirs.n_y = 20\n")

    def test_malformed_line(self):
        with pytest.raises(ScenarioError, match="expected 'key = value'"):
            parse_scenario("this is not a key value pair\n")

    def test_bad_number_reports_key(self):
        with pytest.raises(ScenarioError, match="grid.f_c_ghz"):
            parse_scenario("grid.f_c_ghz = threehundred\n")

    def test_too_few_subcarriers(self):
        with pytest.raises(ScenarioError, match="subcarriers"):
            parse_scenario("grid.subcarriers = 1\n")

    def test_partition_sizes_must_divide(self):
        with pytest.raises(ScenarioError, match="partition_sizes"):
            parse_scenario("sweep.partition_sizes = 1,3\n")

    def test_negative_t_req_rejected(self):
        with pytest.raises(ScenarioError, match="t_req"):
            parse_scenario("sweep.t_req_ps = 0,-1\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError, match="cannot read"):
            load_scenario(tmp_path / "nope.scn")

    def test_non_square_subsurface_rejected(self):
        with pytest.raises(ScenarioError, match="square"):
            parse_scenario("irs.n_z = 50\n")


class TestResolvedObjects:
    def test_scene_and_grid(self):
        sc = default_scenario()
        scene = sc.scene()
        assert scene.layout.n_elements == 10000
        assert scene.partition.s == 10
        grid = sc.grid()
        assert grid.f_c == 300e9
        assert grid.m_count == 128

    def test_plane_sits_at_user_height(self):
        sc = parse_scenario("user.z_m = -1.25\n")
        assert sc.plane().z == -1.25

    def test_unit_conversions(self):
        sc = parse_scenario(
            "grid.f_c_ghz = 100\nsweep.t_req_ps = 5,10\nrate.noise_dbm_hz = -170\n"
        )
        assert sc.f_c == 100e9
        assert sc.t_req_seconds == (5e-12, 10e-12)
        assert sc.noise_density == pytest.approx(10 ** ((-170 - 30) / 10))

    def test_power_list(self):
        sc = parse_scenario("rate.p_bs_dbm = 10, 20, 30\n")
        assert sc.p_bs_dbm == (10.0, 20.0, 30.0)


class TestDigest:
    def test_stable_for_identical_input(self):
        a = parse_scenario("user.y_m = -3.5\ngrid.subcarriers = 32\n")
        b = parse_scenario("user.y_m = -3.5\ngrid.subcarriers = 32\n")
        assert a.digest() == b.digest()

    def test_changes_on_mutation(self):
        a = default_scenario()
        b = parse_scenario("user.y_m = -3.9\n")
        assert a.digest() != b.digest()

    def test_explicit_default_matches_implicit(self):
        assert parse_scenario("grid.f_c_ghz = 300\n").digest() == default_scenario().digest()


def test_all_documented_keys_parse_round_trip():
    # every key accepts its own default when rendered back as text
    sc = default_scenario()
    for key in scenario_keys():
        value = sc[key]
        if isinstance(value, tuple):
            rendered = ",".join(str(v) for v in value)
        else:
            rendered = str(value)
        again = parse_scenario(f"{key} = {rendered}\n")
        assert again[key] == value


def test_scenario_is_mapping_like():
    sc = default_scenario()
    assert isinstance(sc, Scenario)
    assert sc["rate.noise_dbm_hz"] == -174.0
    assert math.isclose(sc.noise_density, 3.981071705534969e-21, rel_tol=1e-12)
