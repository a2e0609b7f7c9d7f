"""Unit tests for shared config."""

import pytest

from informa.shared.config import Config


class TestConfig:
    """Tests for configuration manager."""

    @pytest.fixture
    def config_file(self, tmp_path):
        """Create test pyproject.toml."""
        config_file = tmp_path / "pyproject.toml"
        config_file.write_text("""
[tool.informa]
log_level = "debug"

[tool.informa.solver]
name = "scs"
eps_abs = 1e-7
max_iters = 500
        """)
        return tmp_path

    def test_load_config(self, config_file):
        config = Config(project_root=config_file)
        data = config.load()

        assert data["log_level"] == "debug"
        assert "solver" in data

    def test_get_nested_key(self, config_file):
        """Test getting nested key with dot notation."""
        config = Config(project_root=config_file)

        assert config.get("solver.eps_abs") == pytest.approx(1e-7)
        assert config.get("solver.max_iters") == 500

    def test_get_missing_key_returns_default(self, config_file):
        config = Config(project_root=config_file)

        assert config.get("missing") is None
        assert config.get("solver.missing", "default") == "default"
        assert config.get("log_level.deeper", 3) == 3

    def test_get_solver_config(self, config_file):
        solver = Config(project_root=config_file).get_solver_config()

        assert solver["name"] == "scs"
        assert solver["max_iters"] == 500

    def test_found_from_subdirectory(self, config_file):
        nested = config_file / "runs" / "today"
        nested.mkdir(parents=True)

        assert Config(project_root=nested).get("solver.name") == "scs"

    def test_no_tool_table(self, tmp_path):
        (tmp_path / "pyproject.toml").write_text('[project]\nname = "other"\n')

        assert Config(project_root=tmp_path).load() == {}
        assert Config(project_root=tmp_path).get_solver_config() == {}

    def test_config_caching(self, config_file):
        config = Config(project_root=config_file)

        assert config.load() is config.load()
