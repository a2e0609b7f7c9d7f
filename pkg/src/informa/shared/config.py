"""Project-level configuration from pyproject.toml."""

from pathlib import Path
from typing import Any, Dict, Optional

import tomllib


class Config:
    """Reads the ``[tool.informa]`` table of the nearest pyproject.toml."""

    def __init__(self, project_root: Optional[Path] = None):
        """Initialize config manager.

        Args:
            project_root: Directory to start the pyproject.toml search from
        """
        self.project_root = project_root or Path.cwd()
        self._config: Optional[Dict[str, Any]] = None

    def _find_pyproject(self) -> Optional[Path]:
        for directory in (self.project_root, *self.project_root.parents):
            candidate = directory / "pyproject.toml"
            if candidate.exists():
                return candidate
        return None

    def load(self) -> Dict[str, Any]:
        """Load configuration from pyproject.toml.

        Returns:
            Configuration dictionary (empty when no pyproject is found)
        """
        if self._config is not None:
            return self._config

        path = self._find_pyproject()
        if path is None:
            self._config = {}
            return self._config

        with open(path, "rb") as f:
            data = tomllib.load(f)

        self._config = data.get("tool", {}).get("informa", {})
        return self._config

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value.

        Args:
            key: Configuration key (dot-notation supported, e.g. "solver.eps_abs")
            default: Default value if key not found

        Returns:
            Configuration value
        """
        value: Any = self.load()
        for k in key.split("."):
            if not isinstance(value, dict):
                return default
            value = value.get(k)
            if value is None:
                return default
        return value

    def get_solver_config(self) -> Dict[str, Any]:
        """Get the ``[tool.informa.solver]`` table."""
        return self.get("solver", {})
