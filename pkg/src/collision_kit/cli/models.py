"""Data models for the command line."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SEED_ENV = "COLLISION_KIT_SEED"
SEED_BITS = 32

STATUS_PASS = "pass"
STATUS_FAIL = "fail"


def resolve_seed(seed: int | None = None) -> int:
    """``seed`` if given, else ``COLLISION_KIT_SEED``, else a freshly drawn one."""
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env:
        return int(env)
    return int(np.random.SeedSequence().entropy % (1 << SEED_BITS))


@dataclass(frozen=True)
class GlobalConfig:
    """Options shared by every subcommand."""

    seed: int = 0
    verbosity: int = 0
    output_dir: Path | None = None

    def out(self, name: str) -> Path:
        """``name`` inside the output directory, or as given when none is set."""
        return self.output_dir / name if self.output_dir else Path(name)


@dataclass(frozen=True)
class StageResult:
    stage: str
    passed: bool
    detail: str = ""

    @property
    def status(self) -> str:
        return STATUS_PASS if self.passed else STATUS_FAIL


@dataclass
class DemoSummary:
    seed: int
    stages: list[StageResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.stages) and all(s.passed for s in self.stages)

    def to_text(self) -> str:
        lines = [f"# seed={self.seed}", "# stage\tstatus\tdetail"]
        lines.extend(f"{s.stage}\t{s.status}\t{s.detail}" for s in self.stages)
        return "\n".join(lines) + "\n"
