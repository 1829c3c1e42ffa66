"""Run manifests: enough to re-run any command and check its outputs.

Manifests record the resolved configuration plus content hashes of every
input and output, with paths stored relative to the manifest's directory so
two runs of the same pipeline under different roots produce identical
bytes.  No timestamps, for the same reason.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

from . import __version__

MANIFEST_NAME = "manifest.json"


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _file_entry(path: Path, base: Path) -> dict:
    return {
        "path": os.path.relpath(path, base).replace(os.sep, "/"),
        "sha256": sha256_file(path),
        "bytes": path.stat().st_size,
    }


def write_manifest(
    out_dir: str | Path,
    command: str,
    config: dict,
    inputs: dict[str, str | Path],
    outputs: dict[str, str | Path],
) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "command": command,
        "config": config,
        "inputs": {name: _file_entry(Path(p), out_dir) for name, p in sorted(inputs.items())},
        "outputs": {name: _file_entry(Path(p), out_dir) for name, p in sorted(outputs.items())},
        "tool": {"name": "ctxwin", "version": __version__},
    }
    path = out_dir / MANIFEST_NAME
    path.write_text(
        json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return path


def read_manifest(out_dir: str | Path) -> dict:
    return json.loads((Path(out_dir) / MANIFEST_NAME).read_text(encoding="utf-8"))
