#!/usr/bin/env python3
"""
Test the reproduction orchestrator.
"""

import os
import sys

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest

from config.settings import Config
from orchestrator import ReproductionOrchestrator


def test_orchestrator_initialization():
    orchestrator = ReproductionOrchestrator()
    assert orchestrator.workers == Config.TABLE1_WORKERS
    assert orchestrator.checks == []
    assert not orchestrator.write_outputs


def test_check_records_pass_and_fail():
    orchestrator = ReproductionOrchestrator()
    orchestrator._check("close", 1.0 + 1e-12, 1.0, 1e-9)
    orchestrator._check("far", 1.1, 1.0, 1e-9)
    orchestrator._check("nan", float("nan"), 1.0, 1e-9)
    assert [(name, ok) for name, ok, _ in orchestrator.checks] == [("close", True), ("far", False), ("nan", False)]


def test_worked_examples_step():
    orchestrator = ReproductionOrchestrator()
    orchestrator._step_examples()
    orchestrator._step_constants()
    orchestrator._step_dfr_equality()
    failed = [(name, detail) for name, ok, detail in orchestrator.checks if not ok]
    assert not failed


def test_arithmetic_error_in_a_step_fails_that_step_only():
    orchestrator = ReproductionOrchestrator()

    def overflow():
        raise OverflowError("math range error")

    def passing():
        orchestrator._check("trivial", 1.0, 1.0, 1e-9)

    for name in ("_step_examples", "_step_constants", "_step_harter", "_step_dfr_equality", "_step_series"):
        setattr(orchestrator, name, passing)
    orchestrator._step_table1 = overflow

    assert not orchestrator.run_full_pipeline()
    failed = [(name, detail) for name, ok, detail in orchestrator.checks if not ok]
    assert failed == [("Table 1", "math range error")]
    assert sum(ok for _, ok, _ in orchestrator.checks) == 5


def test_ensure_directories_creates_output_and_logs_only(tmp_path, monkeypatch):
    monkeypatch.setattr(Config, "OUTPUT_DIR", tmp_path / "output")
    monkeypatch.setattr(Config, "LOGS_DIR", tmp_path / "logs")
    Config.ensure_directories()
    assert sorted(p.name for p in tmp_path.iterdir()) == ["logs", "output"]
    assert not any((tmp_path / "output").iterdir())


@pytest.mark.slow
def test_full_reproduction(tmp_path, monkeypatch):
    monkeypatch.setattr(Config, "OUTPUT_DIR", tmp_path)
    orchestrator = ReproductionOrchestrator(write_outputs=True)
    assert orchestrator.run_full_pipeline()
    assert list(tmp_path.glob("reproduction_*.json"))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
