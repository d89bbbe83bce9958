"""Content-addressed on-disk persistence for processed stories.

Payloads live under ``objects/<sha256>.json`` exactly once, however many
times the same content is stored; each ``store()`` call returns a fresh
record id pointing at its payload, so repeated stores of identical content
yield distinct ids over equal payloads. Records are immutable after
creation; a lock serializes id allocation and writes, while reads need no
lock at all.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path

from .pipeline import ProcessedStory


class StoryNotFoundError(KeyError):
    """No stored story has the requested record id."""


class StoryStore:
    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self._objects = self.root / "objects"
        self._records = self.root / "records"
        self._objects.mkdir(parents=True, exist_ok=True)
        self._records.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def store(self, story: ProcessedStory, record_id: str | None = None) -> str:
        """Persist a story and return its record id.

        Without an explicit record_id, ids derive from the content hash,
        suffixed -2, -3, ... for repeated stores of the same payload.
        """
        payload = story.canonical_bytes()
        digest = hashlib.sha256(payload).hexdigest()
        with self._lock:
            obj_path = self._objects / f"{digest}.json"
            if not obj_path.exists():
                tmp = obj_path.with_suffix(".tmp")
                tmp.write_bytes(payload)
                tmp.rename(obj_path)
            if record_id is None:
                record_id = digest[:12]
                serial = 1
                while (self._records / f"{record_id}.json").exists():
                    serial += 1
                    record_id = f"{digest[:12]}-{serial}"
            record_path = self._records / f"{record_id}.json"
            if record_path.exists():
                raise ValueError(f"record id {record_id!r} already exists")
            record_path.write_text(json.dumps({"object": digest}), encoding="utf-8")
        return record_id

    def load(self, record_id: str) -> ProcessedStory:
        record_path = self._records / f"{record_id}.json"
        if not record_path.exists():
            raise StoryNotFoundError(record_id)
        digest = json.loads(record_path.read_text(encoding="utf-8"))["object"]
        payload = (self._objects / f"{digest}.json").read_text(encoding="utf-8")
        return ProcessedStory.from_jsonable(json.loads(payload))

    def load_bytes(self, record_id: str) -> bytes:
        """The exact canonical payload bytes for a record."""
        record_path = self._records / f"{record_id}.json"
        if not record_path.exists():
            raise StoryNotFoundError(record_id)
        digest = json.loads(record_path.read_text(encoding="utf-8"))["object"]
        return (self._objects / f"{digest}.json").read_bytes()

    def ids(self) -> list[str]:
        return sorted(p.stem for p in self._records.glob("*.json"))

    def __contains__(self, record_id: str) -> bool:
        return (self._records / f"{record_id}.json").exists()
