"""Version and numerical-stack information for informa."""

import subprocess
from importlib import metadata
from pathlib import Path
from typing import Optional

from . import __version__

STACK = ("numpy", "scipy", "cvxpy", "clarabel")


def get_git_commit() -> Optional[str]:
    """Short commit hash of a source checkout, None for installed wheels."""
    try:
        result = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            capture_output=True,
            text=True,
            cwd=Path(__file__).parent,
            timeout=2,
        )
    except (OSError, subprocess.SubprocessError):
        return None
    return result.stdout.strip() if result.returncode == 0 else None


def stack_versions() -> dict[str, str]:
    versions = {}
    for name in STACK:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "missing"
    return versions


def installed_solvers() -> list[str]:
    """SDP-capable solvers cvxpy can see."""
    import cvxpy as cp

    return sorted(s for s in cp.installed_solvers() if s in ("CLARABEL", "SCS", "MOSEK", "CVXOPT"))


def get_version_info() -> dict:
    return {
        "version": __version__,
        "commit": get_git_commit() or "unknown",
        "stack": stack_versions(),
        "solvers": installed_solvers(),
    }
