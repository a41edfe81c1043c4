"""Run manifests: command, parameters, spec hash and output checksums."""

from __future__ import annotations

import datetime
import hashlib
import json
import os

from . import __version__


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


class RunManifest:
    """Collects run metadata; every output row carries a checksum, so two
    runs with identical inputs and seeds produce identical checksum lists."""

    def __init__(self, command, parameters, spec_hash=None):
        self.command = command
        self.parameters = dict(parameters)
        self.spec_hash = spec_hash
        self.tool_version = __version__
        self.started_at = datetime.datetime.now(datetime.timezone.utc).isoformat()
        self.outputs = []

    def add_output(self, path):
        self.outputs.append({"path": os.path.basename(str(path)),
                             "sha256": _sha256(path)})

    def write(self, path):
        doc = {
            "command": self.command,
            "parameters": self.parameters,
            "spec_sha256": self.spec_hash,
            "tool_version": self.tool_version,
            "started_at": self.started_at,
            "finished_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "outputs": sorted(self.outputs, key=lambda r: r["path"]),
        }
        with open(path, "w") as f:
            json.dump(doc, f, sort_keys=True, indent=2)
            f.write("\n")
        return doc
