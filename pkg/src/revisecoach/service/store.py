"""Single-file relational store for users, classrooms, assignments, and
submissions.

SQLite with one guarded connection: classroom-scale traffic is far below
what this can serve, and a single writer keeps draft ordering trivially
consistent. The schema is versioned; a server database can be swapped in
by reimplementing this class against the same method surface.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from datetime import datetime, timezone
from pathlib import Path

from ..errors import DomainError

SCHEMA_VERSION = 1

_SCHEMA = """
CREATE TABLE IF NOT EXISTS meta (
    key TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS users (
    id TEXT PRIMARY KEY,
    role TEXT NOT NULL CHECK (role IN ('student', 'teacher', 'admin')),
    display_name TEXT NOT NULL,
    classroom_id TEXT,
    password_hash TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS classrooms (
    id TEXT PRIMARY KEY,
    name TEXT NOT NULL,
    grade TEXT,
    teacher_id TEXT
);
CREATE TABLE IF NOT EXISTS assignments (
    id TEXT PRIMARY KEY,
    article_id TEXT NOT NULL,
    prompt_text TEXT NOT NULL,
    lexicon_ref TEXT,
    max_drafts INTEGER NOT NULL DEFAULT 3,
    classroom_id TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS submissions (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    student_id TEXT NOT NULL,
    assignment_id TEXT NOT NULL,
    draft_number INTEGER NOT NULL,
    text TEXT NOT NULL,
    submitted_at TEXT NOT NULL,
    status TEXT NOT NULL CHECK (status IN ('processing', 'complete', 'failed')),
    ef_level TEXT,
    feedback_kind TEXT,
    feedback_level TEXT,
    payload TEXT,
    error TEXT,
    UNIQUE (student_id, assignment_id, draft_number)
);
CREATE INDEX IF NOT EXISTS idx_submissions_assignment
    ON submissions (assignment_id, student_id, draft_number);
"""


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class Store:
    def __init__(self, path: str | Path):
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(str(path), check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        with self._lock, self._conn:
            self._conn.executescript(_SCHEMA)
            row = self._conn.execute(
                "SELECT value FROM meta WHERE key = 'schema_version'"
            ).fetchone()
            if row is None:
                self._conn.execute(
                    "INSERT INTO meta (key, value) VALUES ('schema_version', ?)",
                    (str(SCHEMA_VERSION),),
                )
            elif int(row["value"]) != SCHEMA_VERSION:
                raise DomainError(
                    f"store schema version {row['value']} != supported {SCHEMA_VERSION}"
                )

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    # -- users ---------------------------------------------------------

    def create_user(
        self,
        user_id: str,
        role: str,
        display_name: str,
        password_hash: str,
        classroom_id: str | None = None,
    ) -> dict:
        with self._lock, self._conn:
            try:
                self._conn.execute(
                    "INSERT INTO users (id, role, display_name, classroom_id, password_hash)"
                    " VALUES (?, ?, ?, ?, ?)",
                    (user_id, role, display_name, classroom_id, password_hash),
                )
            except sqlite3.IntegrityError as exc:
                raise DomainError(f"user {user_id!r} already exists or bad role") from exc
        return self.get_user(user_id)

    def get_user(self, user_id: str) -> dict | None:
        with self._lock:
            row = self._conn.execute("SELECT * FROM users WHERE id = ?", (user_id,)).fetchone()
        return dict(row) if row else None

    def delete_user(self, user_id: str) -> bool:
        with self._lock, self._conn:
            cursor = self._conn.execute("DELETE FROM users WHERE id = ?", (user_id,))
        return cursor.rowcount > 0

    def list_users(self) -> list[dict]:
        with self._lock:
            rows = self._conn.execute("SELECT * FROM users ORDER BY id").fetchall()
        return [dict(r) for r in rows]

    # -- classrooms ----------------------------------------------------

    def create_classroom(
        self, classroom_id: str, name: str, grade: str | None = None, teacher_id: str | None = None
    ) -> dict:
        with self._lock, self._conn:
            try:
                self._conn.execute(
                    "INSERT INTO classrooms (id, name, grade, teacher_id) VALUES (?, ?, ?, ?)",
                    (classroom_id, name, grade, teacher_id),
                )
            except sqlite3.IntegrityError as exc:
                raise DomainError(f"classroom {classroom_id!r} already exists") from exc
        return self.get_classroom(classroom_id)

    def get_classroom(self, classroom_id: str) -> dict | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM classrooms WHERE id = ?", (classroom_id,)
            ).fetchone()
        return dict(row) if row else None

    def list_classrooms(self, teacher_id: str | None = None) -> list[dict]:
        with self._lock:
            if teacher_id is None:
                rows = self._conn.execute("SELECT * FROM classrooms ORDER BY id").fetchall()
            else:
                rows = self._conn.execute(
                    "SELECT * FROM classrooms WHERE teacher_id = ? ORDER BY id", (teacher_id,)
                ).fetchall()
        return [dict(r) for r in rows]

    def classroom_students(self, classroom_id: str) -> list[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM users WHERE role = 'student' AND classroom_id = ? ORDER BY id",
                (classroom_id,),
            ).fetchall()
        return [dict(r) for r in rows]

    # -- assignments ---------------------------------------------------

    def create_assignment(
        self,
        assignment_id: str,
        article_id: str,
        prompt_text: str,
        classroom_id: str,
        max_drafts: int = 3,
        lexicon_ref: str | None = None,
    ) -> dict:
        if max_drafts < 1:
            raise DomainError("max_drafts must be at least 1")
        with self._lock, self._conn:
            try:
                self._conn.execute(
                    "INSERT INTO assignments"
                    " (id, article_id, prompt_text, lexicon_ref, max_drafts, classroom_id)"
                    " VALUES (?, ?, ?, ?, ?, ?)",
                    (assignment_id, article_id, prompt_text, lexicon_ref, max_drafts, classroom_id),
                )
            except sqlite3.IntegrityError as exc:
                raise DomainError(f"assignment {assignment_id!r} already exists") from exc
        return self.get_assignment(assignment_id)

    def get_assignment(self, assignment_id: str) -> dict | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM assignments WHERE id = ?", (assignment_id,)
            ).fetchone()
        return dict(row) if row else None

    def list_assignments(self, classroom_id: str | None = None) -> list[dict]:
        with self._lock:
            if classroom_id is None:
                rows = self._conn.execute("SELECT * FROM assignments ORDER BY id").fetchall()
            else:
                rows = self._conn.execute(
                    "SELECT * FROM assignments WHERE classroom_id = ? ORDER BY id",
                    (classroom_id,),
                ).fetchall()
        return [dict(r) for r in rows]

    # -- submissions ---------------------------------------------------

    def insert_submission(
        self, student_id: str, assignment_id: str, draft_number: int, text: str
    ) -> int:
        with self._lock, self._conn:
            try:
                cursor = self._conn.execute(
                    "INSERT INTO submissions"
                    " (student_id, assignment_id, draft_number, text, submitted_at, status)"
                    " VALUES (?, ?, ?, ?, ?, 'processing')",
                    (student_id, assignment_id, draft_number, text, _now()),
                )
            except sqlite3.IntegrityError as exc:
                raise DomainError(
                    f"draft {draft_number} already exists for this student/assignment"
                ) from exc
            return int(cursor.lastrowid)

    def delete_submission(self, submission_id: int) -> None:
        with self._lock, self._conn:
            self._conn.execute("DELETE FROM submissions WHERE id = ?", (submission_id,))

    def complete_submission(
        self,
        submission_id: int,
        ef_level: str,
        feedback_kind: str,
        feedback_level: str,
        payload: dict,
    ) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "UPDATE submissions SET status = 'complete', ef_level = ?,"
                " feedback_kind = ?, feedback_level = ?, payload = ?, error = NULL"
                " WHERE id = ? AND status = 'processing'",
                (ef_level, feedback_kind, feedback_level, json.dumps(payload), submission_id),
            )

    def fail_submission(self, submission_id: int, error: str) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "UPDATE submissions SET status = 'failed', error = ? WHERE id = ?",
                (error, submission_id),
            )

    def fail_stale_processing(self) -> int:
        """Mark submissions stuck in 'processing' (e.g. after a crash) failed."""
        with self._lock, self._conn:
            cursor = self._conn.execute(
                "UPDATE submissions SET status = 'failed',"
                " error = 'interrupted before completion'"
                " WHERE status = 'processing'"
            )
        return cursor.rowcount

    def get_submission(self, submission_id: int) -> dict | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM submissions WHERE id = ?", (submission_id,)
            ).fetchone()
        return self._inflate(row)

    def student_submissions(self, student_id: str, assignment_id: str) -> list[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM submissions WHERE student_id = ? AND assignment_id = ?"
                " ORDER BY draft_number",
                (student_id, assignment_id),
            ).fetchall()
        return [self._inflate(r) for r in rows]

    def assignment_submissions(self, assignment_id: str) -> list[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM submissions WHERE assignment_id = ?"
                " ORDER BY student_id, draft_number",
                (assignment_id,),
            ).fetchall()
        return [self._inflate(r) for r in rows]

    def classroom_submissions(self, classroom_id: str) -> list[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT s.* FROM submissions s"
                " JOIN assignments a ON a.id = s.assignment_id"
                " WHERE a.classroom_id = ?"
                " ORDER BY s.student_id, s.assignment_id, s.draft_number",
                (classroom_id,),
            ).fetchall()
        return [self._inflate(r) for r in rows]

    @staticmethod
    def _inflate(row: sqlite3.Row | None) -> dict | None:
        if row is None:
            return None
        record = dict(row)
        record["payload"] = json.loads(record["payload"]) if record["payload"] else None
        return record
