"""Run manifests: what a command read, wrote, and was configured with.

The manifest is written before any output file so that an interrupted
run leaves evidence of what it was about to produce. It is the one
artifact that carries a timestamp; data outputs stay byte-stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    config: dict
    seeds: dict
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    tool_version: str = __version__
    created_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "config": self.config,
            "seeds": self.seeds,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "tool_version": self.tool_version,
            "created_at": self.created_at,
        }

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, ensure_ascii=False)
            fh.write("\n")
        return path


def manifest_path(out: str | Path) -> Path:
    """Manifest location for a given --out target (file or directory)."""
    out = Path(out)
    if out.is_dir():
        return out / "manifest.json"
    return out.with_name(out.name + ".manifest.json")


def write_manifest(
    subcommand: str,
    out: str | Path,
    inputs: list[str | Path],
    outputs: list[str | Path],
    config: dict | None = None,
    seeds: dict | None = None,
) -> Path:
    manifest = RunManifest(
        subcommand=subcommand,
        config=config or {},
        seeds=seeds or {},
        inputs=tuple(str(p) for p in inputs),
        outputs=tuple(str(p) for p in outputs),
    )
    return manifest.write(manifest_path(out))
