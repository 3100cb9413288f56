"""Shipped fixture files: exercise workflows and reduction specs."""

from pathlib import Path

_ROOT = Path(__file__).resolve().parent


def workflows_dir() -> Path:
    return _ROOT / "workflows"


def gadgets_dir() -> Path:
    return _ROOT / "gadgets"
