"""Run manifests: enough provenance to reproduce any output exactly.

Each CLI run writes ``manifest.json`` next to its outputs, recording the
command, resolved seed, config hash, library versions, and a sha256 per
output file. Manifests contain no timestamps, so a correct rerun yields
a byte-identical manifest as well as byte-identical outputs.
"""

from __future__ import annotations

import hashlib
import json
import os
import platform

import numpy as np


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def write_manifest(
    out_dir: str,
    command: str,
    seed,
    config_text: str,
    outputs: list,
    extra: dict = None,
) -> str:
    """Write manifest.json into out_dir and return its path.

    outputs: paths (absolute or cwd-relative) of files produced by the
    run; recorded relative to out_dir with their sha256 digests.
    """
    from . import __version__

    checksums = {}
    for path in sorted(outputs):
        rel = os.path.relpath(path, out_dir)
        checksums[rel] = sha256_file(path)
    doc = {
        "command": command,
        "seed": seed,
        "config_sha256": sha256_text(config_text),
        "versions": {
            "kilnopt": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "outputs": checksums,
    }
    if extra:
        doc["extra"] = extra
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_manifest(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
