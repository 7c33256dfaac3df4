"""Command line entry point and the end-to-end demo."""

from collision_kit.cli.demo import demo_end_to_end
from collision_kit.cli.main import build_parser, main, run
from collision_kit.cli.models import DemoSummary, GlobalConfig, StageResult

__all__ = [
    "DemoSummary",
    "GlobalConfig",
    "StageResult",
    "build_parser",
    "demo_end_to_end",
    "main",
    "run",
]
