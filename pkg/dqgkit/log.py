from datetime import datetime
from typing import TYPE_CHECKING, Any

from rich.console import Console

if TYPE_CHECKING:
    from .report import Check

console = Console(highlight=False)

VERDICT_STYLES = {"pass": "green", "fail": "red", "overflow": "yellow"}


def stamp() -> str:
    return f"[white d]{datetime.now():%H:%M:%S}[/white d]"


class logger:
    """Console output of the verifiers and the CLI. Set ``disabled`` to silence it."""

    disabled = False

    @staticmethod
    def print(*args, **kwargs):
        if not logger.disabled:
            console.print(*args, **kwargs)

    @staticmethod
    def print_exception():
        console.print_exception()

    @staticmethod
    def log(content: Any) -> None:
        """Prints ``content`` behind a timestamp, indenting continuation lines."""
        if logger.disabled:
            return
        console.print(f"{stamp()} " + str(content).replace("\n", f"\n{' ' * 9}"))

    @staticmethod
    def verdict(check: "Check") -> None:
        """Prints one line for a finished check; informational checks stay quiet.

        Args:
            check (:obj:`Check`): The check, routed on its verdict.
        """
        verdict = check.verdict
        if logger.disabled or verdict not in VERDICT_STYLES:
            return
        style = VERDICT_STYLES[verdict]
        if verdict == "overflow":
            detail = f"{check.overflow} attempts overflowed the window"
        else:
            detail = f"{check.residual:.3e} {'<=' if verdict == 'pass' else '>'} {check.tol:.1e}"
        logger.log(f"[{style}]{verdict}[/{style}] {check.name} - {detail}")
