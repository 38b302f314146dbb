import json

import numpy as np

from dqgkit import logger
from dqgkit.exceptions import WindowOverflow
from dqgkit.report import Check, Report


def test_nan_trial_fails():
    report = Report("nan")
    check = report.sample("nan-trial", 1e-9, lambda r: float("nan"), np.random.default_rng(0), 3)
    assert check.samples == 3
    assert check.residual == float("inf")
    assert check.verdict == "fail"
    assert not report.passed


def test_nan_after_finite_residuals_still_fails():
    values = iter([1e-12, float("nan"), 1e-12])
    report = Report("mixed")
    check = report.sample("mixed", 1e-9, lambda r: next(values), np.random.default_rng(0), 3)
    assert check.verdict == "fail"


def test_overflowing_trials_are_counted():
    def trial(r):
        raise WindowOverflow(("1", "1"), "test")

    check = Report("overflow").sample("outside", 1e-9, trial, np.random.default_rng(0), 2)
    assert check.samples == 0
    assert check.overflow == 16
    assert check.verdict == "overflow"


def test_machine_lines_are_strict_json():
    report = Report("strict", header={"seed": 3})
    report.value("infinite", float("inf"), 1e-9)
    report.value("finite", 1e-13, 1e-9)
    text = report.to_lines()
    assert "Infinity" not in text and "NaN" not in text
    records = [json.loads(line) for line in text.splitlines()]
    assert records[0] == {"record": "header", "title": "strict", "seed": 3}
    assert records[1]["residual"] is None
    assert records[1]["verdict"] == "fail"
    assert records[2]["verdict"] == "pass"


def test_verdicts_are_logged(monkeypatch, capsys):
    monkeypatch.setattr(logger, "disabled", False)
    report = Report("logged")
    report.value("too-large", 1.0, 1e-9)
    report.info("dimension", 3.0)
    out = capsys.readouterr().out
    assert "fail" in out and "too-large" in out
    assert "dimension" not in out

    monkeypatch.setattr(logger, "disabled", True)
    logger.verdict(Check("quiet", 0.0, 1e-9))
    assert capsys.readouterr().out == ""
