"""Run manifests: parameter records with content-addressed digests.

Every artifact directory carries exactly one ``manifest.json`` holding
the tool version, the gold-standard version tag, the subcommand, the
full parameter map, the seed, timestamps, and digests of the emitted
files.  The manifest's own ``content_digest`` is computed over its
canonical JSON form with volatile fields (timestamps and the digest
itself) removed, so two runs with identical parameters and outputs
agree on the digest even though their timestamps differ.
"""

from __future__ import annotations

import hashlib
import json
import os
from datetime import datetime, timezone
from typing import Any, Dict

VOLATILE_KEYS = ("created_utc", "content_digest")

MANIFEST_NAME = "manifest.json"


def canonical_json(data: Dict[str, Any]) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def content_digest(data: Dict[str, Any]) -> str:
    stripped = {k: v for k, v in data.items() if k not in VOLATILE_KEYS}
    return hashlib.sha256(canonical_json(stripped).encode("utf-8")).hexdigest()


def file_digest(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def digest_tree(root: str) -> Dict[str, str]:
    """sha256 of every file under ``root`` except the manifest itself."""
    digests: Dict[str, str] = {}
    for dirpath, _dirnames, filenames in os.walk(root):
        for name in sorted(filenames):
            if name == MANIFEST_NAME:
                continue
            full = os.path.join(dirpath, name)
            digests[os.path.relpath(full, root).replace(os.sep, "/")] = file_digest(
                full
            )
    return digests


def write_manifest(directory: str, data: Dict[str, Any]) -> Dict[str, Any]:
    from kgcbench import __version__

    record = dict(data)
    record.setdefault("tool_version", __version__)
    record["created_utc"] = datetime.now(timezone.utc).isoformat()
    record["content_digest"] = content_digest(record)
    path = os.path.join(directory, MANIFEST_NAME)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(record, handle, indent=2, sort_keys=True, ensure_ascii=False)
        handle.write("\n")
    return record


def load_manifest(directory: str) -> Dict[str, Any]:
    path = os.path.join(directory, MANIFEST_NAME)
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)
