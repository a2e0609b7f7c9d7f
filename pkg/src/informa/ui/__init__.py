"""Informa UI utilities."""

from .theme import (
    console,
    print_success,
    print_error,
    print_warning,
    print_info,
    print_dim,
    print_kv,
    print_matrix,
)
from .progress import (
    progress_tracker,
    ProgressTracker,
)

__all__ = [
    "console",
    "print_success",
    "print_error",
    "print_warning",
    "print_info",
    "print_dim",
    "print_kv",
    "print_matrix",
    "progress_tracker",
    "ProgressTracker",
]
