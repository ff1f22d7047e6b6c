"""Append-only run persistence plus server-side model/dataset files.

Runs are content-addressed: the run id is a digest of the canonical request
(model digest, dataset digest, full config, seeds), so identical requests
are idempotent and a stored record is never rewritten. Record documents
contain only deterministic payloads; wall-clock creation times live in a
sidecar index (`index.jsonl`), keeping record bytes reproducible.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path

from .modelio import canon_dumps

STORE_ENV_VAR = "ADVLAB_RUN_STORE"
DEFAULT_STORE = "runs"


def resolve_store_dir(explicit=None):
    """CLI/server flag wins, then the environment override, then ./runs."""
    if explicit:
        return Path(explicit)
    return Path(os.environ.get(STORE_ENV_VAR, DEFAULT_STORE))


def run_id_for(request):
    """Content digest of the canonical request."""
    core = json.dumps(request, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(core).hexdigest()


class RunStore:
    def __init__(self, root):
        self.root = Path(root)
        self.runs_dir = self.root / "runs"
        self.models_dir = self.root / "models"
        self.datasets_dir = self.root / "datasets"
        for d in (self.runs_dir, self.models_dir, self.datasets_dir):
            d.mkdir(parents=True, exist_ok=True)
        self._index = self.runs_dir / "index.jsonl"

    # -- runs ---------------------------------------------------------------

    def run_path(self, run_id):
        return self.runs_dir / f"{run_id}.json"

    def save_run(self, record):
        """Persist a record; an existing record with the same id is left
        untouched (immutable once written)."""
        path = self.run_path(record["run_id"])
        if not path.exists():
            path.write_bytes(canon_dumps(record).encode())
            entry = {
                "run_id": record["run_id"],
                "kind": record["kind"],
                "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            }
            with self._index.open("a") as fh:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")
        return path

    def get_run(self, run_id):
        path = self.run_path(run_id)
        if not path.exists():
            return None
        return json.loads(path.read_text())

    def list_runs(self):
        if not self._index.exists():
            return []
        entries = []
        for line in self._index.read_text().splitlines():
            if line.strip():
                entries.append(json.loads(line))
        return entries

    # -- uploaded artifacts ------------------------------------------------

    def save_model_file(self, model_id, file_bytes):
        path = self.models_dir / f"{model_id}.json"
        if not path.exists():
            path.write_bytes(file_bytes)
        return path

    def save_dataset_file(self, dataset_id, file_bytes):
        path = self.datasets_dir / f"{dataset_id}.json"
        if not path.exists():
            path.write_bytes(file_bytes)
        return path

    def stored_model_files(self):
        return sorted(self.models_dir.glob("*.json"))

    def stored_dataset_files(self):
        return sorted(self.datasets_dir.glob("*.json"))
