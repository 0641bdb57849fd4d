"""Configuration parsing, precedence, and validation errors."""

import pytest

from hallmhd.config import ConfigError, env_var_name, parse_config

MINIMAL = """
# minimal configuration
grid.n = 32
grid.L = 6.2831853
params.mu = 1
params.nu = 0
"""


def write_config(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text)
    return str(path)


class TestParsing:
    def test_minimal_file_fills_defaults(self, tmp_path):
        config = parse_config(write_config(tmp_path, MINIMAL), env={})
        assert config.grid_n == 32
        assert config.grid_length == pytest.approx(6.2831853)
        assert config.params.mu == 1.0
        assert config.params.gamma == pytest.approx(5.0 / 3.0)
        assert config.params.hall is True
        assert config.stepping.dt == 0.01
        assert config.stepping.scheme == "etd2"
        assert config.beta == 1e-2
        assert config.splitting_r == (4.0, 5.0)
        # auto fit window ends at half the box
        assert config.fit_window == (1.0, pytest.approx(6.2831853 / 2))

    def test_flags_override_file(self, tmp_path):
        path = write_config(tmp_path, MINIMAL + "stepping.dt = 0.01\n")
        config = parse_config(path, overrides={"stepping.dt": "0.001"}, env={})
        assert config.stepping.dt == 0.001

    def test_env_overrides_file_and_flags_override_env(self, tmp_path):
        path = write_config(tmp_path, MINIMAL + "stepping.t_end = 1\n")
        env = {env_var_name("stepping.t_end"): "2.5",
               env_var_name("stepping.dt"): "0.05"}
        config = parse_config(path, env=env)
        assert config.stepping.t_end == 2.5
        assert config.stepping.dt == 0.05
        config = parse_config(path, overrides={"stepping.t_end": "4"}, env=env)
        assert config.stepping.t_end == 4.0

    def test_env_name_mapping(self):
        assert env_var_name("grid.n") == "HALLMHD_GRID__N"
        assert env_var_name("stepping.dt") == "HALLMHD_STEPPING__DT"


class TestValidation:
    def test_mu_zero_names_physical_condition(self, tmp_path):
        path = write_config(tmp_path, MINIMAL.replace("params.mu = 1",
                                                      "params.mu = 0"))
        with pytest.raises(ConfigError) as err:
            parse_config(path, env={})
        assert err.value.key == "params.mu"
        assert "2*mu + 3*nu" in str(err.value)

    def test_unknown_key_rejected(self, tmp_path):
        path = write_config(tmp_path, MINIMAL + "grid.shape = cube\n")
        with pytest.raises(ConfigError) as err:
            parse_config(path, env={})
        assert err.value.key == "grid.shape"

    def test_unknown_override_rejected(self, tmp_path):
        path = write_config(tmp_path, MINIMAL)
        with pytest.raises(ConfigError):
            parse_config(path, overrides={"grid.shape": "cube"}, env={})

    def test_missing_required_key(self, tmp_path):
        path = write_config(tmp_path, "grid.n = 16\ngrid.L = 1.0\n")
        with pytest.raises(ConfigError) as err:
            parse_config(path, env={})
        assert "missing required key" in str(err.value)

    def test_non_power_of_two_grid(self, tmp_path):
        path = write_config(tmp_path, MINIMAL.replace("grid.n = 32",
                                                      "grid.n = 24"))
        with pytest.raises(ConfigError) as err:
            parse_config(path, env={})
        assert err.value.key == "grid.n"

    def test_bad_value_type_names_source(self, tmp_path):
        path = write_config(tmp_path, MINIMAL + "stepping.dt = fast\n")
        with pytest.raises(ConfigError) as err:
            parse_config(path, env={})
        assert err.value.key == "stepping.dt"
        assert "file" in str(err.value)

    def test_bad_scheme(self, tmp_path):
        path = write_config(tmp_path, MINIMAL + "stepping.scheme = rk4\n")
        with pytest.raises(ConfigError) as err:
            parse_config(path, env={})
        assert err.value.key == "stepping.scheme"

    def test_malformed_line(self, tmp_path):
        path = write_config(tmp_path, "grid.n 32\n")
        with pytest.raises(ConfigError):
            parse_config(path, env={})

    def test_bad_initial_kind(self, tmp_path):
        path = write_config(tmp_path, MINIMAL + "initial.kind = vortex\n")
        with pytest.raises(ConfigError) as err:
            parse_config(path, env={})
        assert err.value.key == "initial.kind"

    def test_splitting_radii(self, tmp_path):
        path = write_config(tmp_path, MINIMAL + "diagnostics.splitting_R = 4,5,8\n")
        config = parse_config(path, env={})
        assert config.splitting_r == (4.0, 5.0, 8.0)
        bad = write_config(tmp_path, MINIMAL + "diagnostics.splitting_R = -1\n")
        with pytest.raises(ConfigError):
            parse_config(bad, env={})


class TestBuilders:
    def test_grid_and_initial_roundtrip(self, tmp_path):
        config = parse_config(write_config(tmp_path, MINIMAL), env={})
        grid = config.build_grid()
        assert grid.n == 32
        state = config.make_initial(grid)
        from hallmhd.model import state_h2_norm

        assert state_h2_norm(state) == pytest.approx(0.05, rel=1e-10)

    def test_to_dict_round_trips_through_overrides(self, tmp_path):
        config = parse_config(write_config(tmp_path, MINIMAL), env={})
        text = {k: str(v) for k, v in config.to_dict().items()}
        again = parse_config(overrides=text, env={})
        assert again == config
