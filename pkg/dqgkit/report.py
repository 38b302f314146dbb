from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Literal

import numpy as np
from rich.table import Table

from .abc import AbstractDocument
from .exceptions import WindowOverflow
from .log import logger

REPORT_VERSION = "dqgkit-report/1"

Verdict = Literal["pass", "fail", "overflow", "info"]


@dataclass
class Check:
    """One named residual check."""

    name: str
    """The check name, e.g. ``coassociativity``."""

    residual: float
    """Largest residual over the certified samples."""

    tol: float
    """The tolerance the residual is held to."""

    samples: int = 1
    """How many certified samples were evaluated."""

    overflow: int = 0
    """How many attempts hit an uncertified window pair."""

    window: str = ""
    """Short description of the window used."""

    info: bool = False
    """Informational entries are reported but never fail."""

    note: str = ""

    @property
    def verdict(self) -> Verdict:
        if self.info:
            return "info"
        if self.samples == 0:
            return "overflow"
        if not np.isfinite(self.residual) or self.residual > self.tol:
            return "fail"
        return "pass"

    def to_json(self) -> dict[str, Any]:
        return {
            "check": self.name,
            "residual": float(self.residual) if np.isfinite(self.residual) else None,
            "tol": float(self.tol),
            "verdict": self.verdict,
            "samples": int(self.samples),
            "overflow": int(self.overflow),
            "window": self.window,
            "note": self.note,
        }


@dataclass
class Report(AbstractDocument):
    """An ordered collection of checks plus an environment header.

    The machine form is line-delimited JSON with sorted keys, so identical
    inputs and seed give byte-identical output.
    """

    title: str
    header: dict[str, Any] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        logger.verdict(check)
        return check

    def value(self, name: str, residual: float, tol: float, **kwargs) -> Check:
        """Adds a single deterministic residual."""
        return self.add(Check(name=name, residual=float(residual), tol=tol, **kwargs))

    def info(self, name: str, value: float, note: str = "") -> Check:
        return self.add(Check(name=name, residual=float(value), tol=0.0, info=True, note=note))

    def sample(
        self,
        name: str,
        tol: float,
        trial: Callable[[np.random.Generator], float],
        rng: np.random.Generator,
        samples: int,
        window: str = "",
        attempts_factor: int = 8,
    ) -> Check:
        """Runs ``trial`` until ``samples`` certified results or the attempt budget is spent.

        ``trial`` returns a residual or raises :class:`WindowOverflow` when it
        touches an uncertified pair; overflowing attempts are counted, not fatal.
        """
        worst = 0.0
        done = 0
        overflow = 0
        for _ in range(max(samples, 1) * attempts_factor):
            if done >= samples:
                break
            try:
                residual = float(trial(rng))
            except WindowOverflow:
                overflow += 1
                continue
            # max() would drop a NaN
            worst = max(worst, residual if np.isfinite(residual) else float("inf"))
            done += 1
        return self.add(
            Check(
                name=name,
                residual=worst,
                tol=tol,
                samples=done,
                overflow=overflow,
                window=window,
            )
        )

    def merge(self, other: "Report", prefix: str = "") -> "Report":
        for check in other.checks:
            if prefix:
                check.name = f"{prefix}.{check.name}"
            self.checks.append(check)
        return self

    def __getitem__(self, name: str) -> Check:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    @property
    def failed(self) -> list[Check]:
        return [c for c in self.checks if c.verdict == "fail"]

    @property
    def overflowed(self) -> list[Check]:
        return [c for c in self.checks if c.verdict == "overflow"]

    @property
    def passed(self) -> bool:
        return not self.failed

    def to_json(self) -> dict[str, Any]:
        return {
            "title": self.title,
            "header": dict(self.header),
            "checks": [c.to_json() for c in self.checks],
        }

    def to_lines(self) -> str:
        """Line-delimited machine form: one header record, then one record per check."""
        dumps = lambda obj: json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)  # noqa: E731
        lines = [dumps({"record": "header", "title": self.title, **self.header})]
        lines += [dumps({"record": "check", **c.to_json()}) for c in self.checks]
        return "\n".join(lines) + "\n"

    def to_table(self) -> Table:
        table = Table(title=self.title)
        for column in ("check", "residual", "tol", "verdict", "samples", "overflow"):
            table.add_column(column)
        style = {"pass": "green", "fail": "red", "overflow": "yellow", "info": "cyan"}
        for c in self.checks:
            table.add_row(
                c.name,
                f"{c.residual:.3e}",
                "-" if c.info else f"{c.tol:.1e}",
                f"[{style[c.verdict]}]{c.verdict}[/{style[c.verdict]}]",
                str(c.samples),
                str(c.overflow),
            )
        return table
