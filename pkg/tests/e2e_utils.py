"""Shared driver for the end-to-end demo workflow.

Runs the bundled two-student fixture through the REST service and
canonicalizes the responses (volatile fields like timestamps dropped) so
the result is byte-stable across runs. `python tests/e2e_utils.py --write`
refreshes the golden file.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

from revisecoach.service.app import create_app
from revisecoach.service.config import ServiceConfig

DEMO = Path(__file__).parent.parent / "src" / "revisecoach" / "data" / "demo"
GOLDEN_PATH = Path(__file__).parent / "golden" / "demo_workflow.json"


def run_demo_workflow(store_path: str) -> str:
    """Drive 2 students x 3 drafts over REST; return canonical JSON."""
    config = ServiceConfig(
        store_path=store_path,
        token_secret="golden-secret",
        admin_password="admin-pw",
        synchronous=True,
    )
    client = TestClient(create_app(config))

    def login(username, password):
        response = client.post("/auth/login", json={"username": username, "password": password})
        assert response.status_code == 200, response.text
        return {"Authorization": f"Bearer {response.json()['token']}"}

    admin = login("admin", "admin-pw")

    def post(headers, path, body):
        response = client.post(path, json=body, headers=headers)
        assert response.status_code in (200, 201), f"{path}: {response.text}"
        return response.json()

    post(admin, "/users", {"id": "t1", "password": "pw", "role": "teacher",
                           "display_name": "Teacher One"})
    post(admin, "/classrooms", {"id": "c1", "name": "Room 1", "grade": "5",
                                "teacher_id": "t1"})
    for student in ("alice", "bob"):
        post(admin, "/users", {"id": student, "password": "pw", "role": "student",
                               "display_name": student.title(), "classroom_id": "c1"})
    post(admin, "/assignments", {"id": "a1", "article_id": "mvp",
                                 "prompt_text": "Did the author convince you?",
                                 "classroom_id": "c1"})

    result = []
    for student in ("alice", "bob"):
        headers = login(student, "pw")
        for draft in (1, 2, 3):
            text = (DEMO / f"{student}_draft{draft}.txt").read_text(encoding="utf-8")
            record = post(headers, "/assignments/a1/drafts", {"text": text})
            feedback = record["feedback"]
            result.append(
                {
                    "student": student,
                    "draft": draft,
                    "status": record["status"],
                    "score": {
                        "npe": record["score"]["npe"],
                        "spc_vector": record["score"]["spc_vector"],
                        "spc": record["score"]["spc"],
                        "word_count": record["score"]["word_count"],
                    },
                    "feedback_kind": feedback["kind"],
                    "feedback_level": feedback["level"],
                    "messages": feedback["messages"],
                    "highlight_topics": feedback["highlight_topics"],
                    "trace": [[g["guard"], g["passed"]] for g in feedback["trace"]],
                    "highlight_spans": record["highlight_spans"],
                    "revisions": [
                        {
                            "action": r["action"],
                            "type_label": r["type_label"],
                            "er_label": r["er_label"],
                            "success_label": r["success_label"],
                        }
                        for r in record["revisions"] or []
                    ],
                }
            )

    teacher = login("t1", "pw")
    table = client.get("/classrooms/c1/submissions", headers=teacher).json()["submissions"]
    summary = {
        "workflow": result,
        "teacher_table": [
            [row["student_id"], row["draft_number"], row["feedback_kind"], row["feedback_level"]]
            for row in table
        ],
    }
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        output = run_demo_workflow(str(Path(tmp) / "golden.sqlite"))
    if "--write" in sys.argv:
        GOLDEN_PATH.write_text(output, encoding="utf-8")
        print(f"wrote {GOLDEN_PATH} ({len(output)} bytes)")
    else:
        print(output)
