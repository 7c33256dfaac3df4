"""Key=value sidecar for assembled pairs."""

from __future__ import annotations

import logging
from dataclasses import asdict, fields
from pathlib import Path

from collision_kit.exceptions import StealthError
from collision_kit.stealth.models import StealthManifest

logger = logging.getLogger(__name__)


def format_manifest(manifest: StealthManifest) -> str:
    return "".join(f"{key}={value}\n" for key, value in asdict(manifest).items())


def parse_manifest(text: str) -> StealthManifest:
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise StealthError(f"Manifest line {lineno} has no '=': {line!r}")
        values[key.strip()] = value.strip()

    kwargs: dict[str, object] = {}
    for f in fields(StealthManifest):
        if f.name not in values:
            raise StealthError(f"Manifest is missing {f.name}")
        raw = values[f.name]
        if f.type in ("int", int):
            try:
                kwargs[f.name] = int(raw)
            except ValueError as e:
                raise StealthError(f"Manifest field {f.name} is not an integer: {raw!r}") from e
        else:
            kwargs[f.name] = raw
    return StealthManifest(**kwargs)


def write_manifest(manifest: StealthManifest, path: Path | str) -> None:
    Path(path).write_text(format_manifest(manifest))
    logger.info(f"Wrote manifest to {path}")


def read_manifest(path: Path | str) -> StealthManifest:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise StealthError(f"Reading manifest {path} failed: {e}") from e
    return parse_manifest(text)
