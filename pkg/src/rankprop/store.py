"""Session persistence: append-only mutation logs plus snapshots.

Each session owns two files under the store directory:

    <session_id>.log    one JSON object per line, appended per mutation
    <session_id>.json   snapshot of the latest derived state summary

The log is the source of truth: replaying it through the service
reproduces the session exactly (solves and suggestions are deterministic
given the logged inputs and seeds). The snapshot only spares readers a
replay for summary fields.
"""
import json
import re
from pathlib import Path

from .errors import ValidationError

_ID = re.compile(r"^[A-Za-z0-9_-]{1,64}$")


class SessionStore:
    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _check_id(self, session_id):
        if not _ID.match(session_id):
            raise ValidationError(f"bad session id {session_id!r}")
        return session_id

    def append(self, session_id, record):
        self._check_id(session_id)
        line = json.dumps(record, separators=(",", ":"), sort_keys=True)
        with open(self.root / f"{session_id}.log", "a", encoding="utf-8") as fh:
            fh.write(line + "\n")

    def read_log(self, session_id):
        self._check_id(session_id)
        path = self.root / f"{session_id}.log"
        if not path.exists():
            raise ValidationError(f"unknown session {session_id!r}")
        out = []
        with open(path, encoding="utf-8") as fh:
            for ln, line in enumerate(fh):
                line = line.strip()
                if not line:
                    continue
                try:
                    out.append(json.loads(line))
                except json.JSONDecodeError:
                    raise ValidationError(
                        f"corrupt log line {ln} in session {session_id!r}")
        return out

    def write_snapshot(self, session_id, obj):
        self._check_id(session_id)
        path = self.root / f"{session_id}.json"
        path.write_text(json.dumps(obj, indent=1, sort_keys=True),
                        encoding="utf-8")

    def read_snapshot(self, session_id):
        self._check_id(session_id)
        path = self.root / f"{session_id}.json"
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def session_ids(self):
        return sorted(p.stem for p in self.root.glob("*.log"))

    def exists(self, session_id):
        self._check_id(session_id)
        return (self.root / f"{session_id}.log").exists()
