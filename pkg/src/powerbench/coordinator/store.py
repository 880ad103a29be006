"""Durable coordinator state: append-only job journal + artifact tree."""

from __future__ import annotations

import json
from pathlib import Path

from .types import JobRecord


class JobStore:
    """Journal of job-record snapshots; replay keeps the latest per job."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.journal_path = self.root / "journal.jsonl"
        self.jobs: dict[int, JobRecord] = {}
        self._replay()

    def _replay(self):
        if not self.journal_path.exists():
            return
        with open(self.journal_path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = JobRecord.from_dict(json.loads(line))
                self.jobs[record.job_id] = record

    def append(self, record: JobRecord):
        self.jobs[record.job_id] = record
        with open(self.journal_path, "a") as fh:
            fh.write(json.dumps(record.to_dict()) + "\n")

    def next_job_id(self) -> int:
        return max(self.jobs, default=0) + 1

    # -- artifacts -------------------------------------------------------------

    def artifact_dir(self, job_id: int) -> Path:
        return self.root / "jobs" / str(job_id)

    def store_artifacts(self, job_id: int, files: dict[str, bytes]):
        target = self.artifact_dir(job_id)
        target.mkdir(parents=True, exist_ok=True)
        for name, payload in files.items():
            safe = Path(name).name  # no traversal
            (target / safe).write_bytes(payload)

    def load_artifacts(self, job_id: int) -> dict[str, bytes]:
        target = self.artifact_dir(job_id)
        if not target.is_dir():
            return {}
        return {p.name: p.read_bytes() for p in sorted(target.iterdir()) if p.is_file()}
