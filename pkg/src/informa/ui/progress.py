"""Progress display for long Monte-Carlo sweeps.

Silent in --json mode and when stdout is not a terminal, so machine
consumers only ever see the final envelope.
"""

import os
import sys
from contextlib import contextmanager
from typing import Iterator

from rich.console import Console
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
)


def _is_json_mode() -> bool:
    return (
        os.getenv("INFORMA_JSON_MODE") == "1"
        or os.getenv("NO_COLOR") is not None
        or not sys.stdout.isatty()
    )


class ProgressTracker:
    """Single progress bar over the cells of a sweep."""

    def __init__(self, console: Console | None = None, silent: bool | None = None):
        from rich.progress import TaskID

        self._silent = _is_json_mode() if silent is None else silent
        self.task_id: TaskID | None = None
        self.progress: Progress | None = None

        if self._silent:
            return

        if console is None:
            from . import console as default_console

            console = default_console

        self.progress = Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            console=console,
            transient=True,
        )

    def __enter__(self) -> "ProgressTracker":
        if self.progress is not None:
            self.progress.__enter__()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        if self.progress is not None:
            self.progress.__exit__(exc_type, exc_val, exc_tb)

    def start(self, description: str, total: int) -> None:
        """Begin a bar with ``total`` units."""
        if self.progress is not None:
            self.task_id = self.progress.add_task(f"[emphasis]{description}[/emphasis]", total=total)

    def advance(self, n: int = 1) -> None:
        """Advance the current bar by n units."""
        if self.progress is not None and self.task_id is not None:
            self.progress.update(self.task_id, advance=n)

    def describe(self, description: str) -> None:
        """Replace the description of the current bar."""
        if self.progress is not None and self.task_id is not None:
            self.progress.update(self.task_id, description=f"[emphasis]{description}[/emphasis]")


@contextmanager
def progress_tracker(
    *,
    console: Console | None = None,
    silent: bool | None = None,
) -> Iterator[ProgressTracker]:
    """Create a progress tracker.

    Example:
        >>> with progress_tracker() as tracker:
        ...     tracker.start("state sweep", total=180)
        ...     for cell in cells:
        ...         run(cell)
        ...         tracker.advance()
    """
    tracker = ProgressTracker(console=console, silent=silent)
    with tracker:
        yield tracker
