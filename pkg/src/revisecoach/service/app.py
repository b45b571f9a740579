"""HTTP surface of the platform.

JSON in, JSON out; errors are always {code, message, detail} with a
stable code. Authentication is a bearer token from /auth/login; roles
gate every route. Students only ever see their own records, teachers
their classrooms, admins everything.
"""

from __future__ import annotations

import csv
import hashlib
import io
import uuid
import zipfile

from fastapi import Depends, FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..errors import DomainError
from ..metrics import ANNOTATION_COLUMNS
from .auth import ROLE_ADMIN, ROLE_STUDENT, ROLE_TEACHER, ROLES, TokenSigner, hash_password, verify_password
from .config import ServiceConfig
from .pipeline import AssetLoader, SubmissionPipeline
from .store import Store


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail: object = None):
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


def _unauthorized() -> ApiError:
    return ApiError(401, "auth_required", "A valid bearer token is required.")


def _forbidden() -> ApiError:
    return ApiError(403, "forbidden", "Your role does not allow this action.")


def _not_found(what: str) -> ApiError:
    return ApiError(404, "not_found", f"{what} not found.")


class LoginBody(BaseModel):
    username: str
    password: str


class DraftBody(BaseModel):
    text: str


class UserBody(BaseModel):
    id: str = Field(min_length=1)
    password: str = Field(min_length=1)
    role: str
    display_name: str = Field(min_length=1)
    classroom_id: str | None = None


class ClassroomBody(BaseModel):
    id: str | None = None
    name: str = Field(min_length=1)
    grade: str | None = None
    teacher_id: str | None = None


class AssignmentBody(BaseModel):
    id: str | None = None
    article_id: str = Field(min_length=1)
    prompt_text: str = Field(min_length=1)
    classroom_id: str = Field(min_length=1)
    max_drafts: int = 3


def _submission_view(record: dict, *, include_text: bool = True) -> dict:
    view = {
        "id": record["id"],
        "student_id": record["student_id"],
        "assignment_id": record["assignment_id"],
        "draft_number": record["draft_number"],
        "status": record["status"],
        "submitted_at": record["submitted_at"],
        "feedback_kind": record["feedback_kind"],
        "feedback_level": record["feedback_level"],
        "error": record["error"],
    }
    if include_text:
        view["text"] = record["text"]
        payload = record.get("payload") or {}
        view["score"] = payload.get("score")
        view["feedback"] = payload.get("feedback")
        view["revisions"] = payload.get("revisions")
        view["highlight_spans"] = payload.get("highlight_spans")
    return view


def _opaque_id(student_id: str, assignment_id: str) -> str:
    return hashlib.sha256(f"{assignment_id}/{student_id}".encode("utf-8")).hexdigest()[:12]


def create_app(config: ServiceConfig | None = None, store: Store | None = None) -> FastAPI:
    config = config or ServiceConfig()
    store = store or Store(config.store_path)
    recovered = store.fail_stale_processing()
    signer = TokenSigner(config.token_secret, config.token_ttl_hours * 3600.0)
    assets = AssetLoader(config.lexicon_dir, config.embeddings_path, config.classifiers)
    pipeline = SubmissionPipeline(
        store,
        assets,
        synchronous=config.synchronous,
        worker_threads=config.worker_threads,
    )

    if config.admin_user and store.get_user(config.admin_user) is None:
        store.create_user(
            config.admin_user, ROLE_ADMIN, "Administrator", hash_password(config.admin_password)
        )

    app = FastAPI(title="revisecoach", version="0.1.0")
    app.state.store = store
    app.state.recovered_submissions = recovered
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "detail": exc.detail},
        )

    @app.exception_handler(DomainError)
    async def _domain_error(_request: Request, exc: DomainError):
        return JSONResponse(
            status_code=409, content={"code": "domain_error", "message": str(exc), "detail": None}
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"code": "validation", "message": "Invalid request body.", "detail": exc.errors()},
        )

    def current_user(request: Request) -> dict:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise _unauthorized()
        payload = signer.verify(header[7:].strip())
        if payload is None:
            raise _unauthorized()
        user = store.get_user(payload["user_id"])
        if user is None:
            raise _unauthorized()
        return user

    def require_role(user: dict, *roles: str) -> None:
        if user["role"] not in roles:
            raise _forbidden()

    def _can_see_classroom(user: dict, classroom_id: str) -> bool:
        if user["role"] == ROLE_ADMIN:
            return True
        if user["role"] == ROLE_TEACHER:
            classroom = store.get_classroom(classroom_id)
            return bool(classroom and classroom["teacher_id"] == user["id"])
        return user.get("classroom_id") == classroom_id

    # -- auth ------------------------------------------------------------

    @app.post("/auth/login")
    def login(body: LoginBody):
        user = store.get_user(body.username)
        if user is None or not verify_password(body.password, user["password_hash"]):
            raise ApiError(401, "bad_credentials", "Unknown user or wrong password.")
        token = signer.issue(user["id"], user["role"])
        return {
            "token": token,
            "user_id": user["id"],
            "role": user["role"],
            "display_name": user["display_name"],
            "classroom_id": user["classroom_id"],
        }

    # -- assignments -------------------------------------------------------

    @app.get("/assignments")
    def list_assignments(user: dict = Depends(current_user)):
        if user["role"] == ROLE_ADMIN:
            rows = store.list_assignments()
        elif user["role"] == ROLE_TEACHER:
            rows = [
                a
                for c in store.list_classrooms(teacher_id=user["id"])
                for a in store.list_assignments(c["id"])
            ]
        else:
            rows = store.list_assignments(user.get("classroom_id") or "__none__")
        return {"assignments": rows}

    @app.post("/assignments", status_code=201)
    def create_assignment(body: AssignmentBody, user: dict = Depends(current_user)):
        require_role(user, ROLE_ADMIN, ROLE_TEACHER)
        classroom = store.get_classroom(body.classroom_id)
        if classroom is None:
            raise _not_found("Classroom")
        if user["role"] == ROLE_TEACHER and classroom["teacher_id"] != user["id"]:
            raise _forbidden()
        try:
            assets.assets_for(body.article_id)
        except DomainError as exc:
            raise ApiError(400, "unknown_article", str(exc))
        assignment_id = body.id or uuid.uuid4().hex[:8]
        return store.create_assignment(
            assignment_id, body.article_id, body.prompt_text, body.classroom_id, body.max_drafts
        )

    @app.get("/assignments/{assignment_id}")
    def get_assignment(assignment_id: str, user: dict = Depends(current_user)):
        assignment = store.get_assignment(assignment_id)
        if assignment is None or not _can_see_classroom(user, assignment["classroom_id"]):
            raise _not_found("Assignment")
        view = dict(assignment)
        view["article_text"] = assets.assets_for(assignment["article_id"]).config.article_text
        return view

    # -- drafts / feedback -------------------------------------------------

    def _assignment_for_student(assignment_id: str, user: dict) -> dict:
        assignment = store.get_assignment(assignment_id)
        if assignment is None:
            raise _not_found("Assignment")
        if user.get("classroom_id") != assignment["classroom_id"]:
            raise _forbidden()
        return assignment

    @app.post("/assignments/{assignment_id}/drafts", status_code=201)
    def submit_draft(assignment_id: str, body: DraftBody, user: dict = Depends(current_user)):
        require_role(user, ROLE_STUDENT)
        assignment = _assignment_for_student(assignment_id, user)
        if not body.text.strip():
            raise ApiError(
                400, "empty_draft", "Your essay is empty. Please write your draft before submitting."
            )
        try:
            record = pipeline.submit(user, assignment, body.text)
        except DomainError as exc:
            message = str(exc)
            code = "draft_limit" if "drafts" in message else "previous_processing"
            raise ApiError(409, code, message)
        return _submission_view(record)

    @app.get("/assignments/{assignment_id}/drafts")
    def list_drafts(assignment_id: str, user: dict = Depends(current_user)):
        require_role(user, ROLE_STUDENT)
        _assignment_for_student(assignment_id, user)
        records = store.student_submissions(user["id"], assignment_id)
        return {"drafts": [_submission_view(r, include_text=False) for r in records]}

    @app.get("/assignments/{assignment_id}/feedback")
    def get_feedback(assignment_id: str, user: dict = Depends(current_user)):
        require_role(user, ROLE_STUDENT)
        _assignment_for_student(assignment_id, user)
        records = [
            r
            for r in store.student_submissions(user["id"], assignment_id)
            if r["status"] == "complete"
        ]
        if not records:
            raise _not_found("Feedback")
        return _submission_view(records[-1])

    # -- teacher monitoring --------------------------------------------------

    @app.get("/classrooms/{classroom_id}/submissions")
    def classroom_submissions(
        classroom_id: str,
        user: dict = Depends(current_user),
        assignment: str | None = Query(default=None),
        draft: int | None = Query(default=None),
    ):
        require_role(user, ROLE_TEACHER, ROLE_ADMIN)
        if store.get_classroom(classroom_id) is None:
            raise _not_found("Classroom")
        if not _can_see_classroom(user, classroom_id):
            raise _forbidden()
        rows = store.classroom_submissions(classroom_id)
        if assignment is not None:
            rows = [r for r in rows if r["assignment_id"] == assignment]
        if draft is not None:
            rows = [r for r in rows if r["draft_number"] == draft]
        names = {u["id"]: u["display_name"] for u in store.classroom_students(classroom_id)}
        out = []
        for record in rows:
            view = _submission_view(record, include_text=False)
            view["display_name"] = names.get(record["student_id"], record["student_id"])
            out.append(view)
        return {"submissions": out}

    @app.get("/classrooms/{classroom_id}/students")
    def classroom_roster(classroom_id: str, user: dict = Depends(current_user)):
        require_role(user, ROLE_TEACHER, ROLE_ADMIN)
        if store.get_classroom(classroom_id) is None:
            raise _not_found("Classroom")
        if not _can_see_classroom(user, classroom_id):
            raise _forbidden()
        return {
            "students": [
                {k: v for k, v in s.items() if k != "password_hash"}
                for s in store.classroom_students(classroom_id)
            ]
        }

    # -- admin management ------------------------------------------------------

    @app.get("/users")
    def list_users(user: dict = Depends(current_user)):
        require_role(user, ROLE_ADMIN)
        return {
            "users": [
                {k: v for k, v in u.items() if k != "password_hash"} for u in store.list_users()
            ]
        }

    @app.post("/users", status_code=201)
    def create_user(body: UserBody, user: dict = Depends(current_user)):
        require_role(user, ROLE_ADMIN)
        if body.role not in ROLES:
            raise ApiError(400, "bad_role", f"Role must be one of {list(ROLES)}.")
        if body.role == ROLE_STUDENT and not body.classroom_id:
            raise ApiError(400, "missing_classroom", "Students must belong to a classroom.")
        if body.classroom_id and store.get_classroom(body.classroom_id) is None:
            raise _not_found("Classroom")
        created = store.create_user(
            body.id, body.role, body.display_name, hash_password(body.password), body.classroom_id
        )
        return {k: v for k, v in created.items() if k != "password_hash"}

    @app.delete("/users/{user_id}")
    def delete_user(user_id: str, user: dict = Depends(current_user)):
        require_role(user, ROLE_ADMIN)
        if user_id == user["id"]:
            raise ApiError(400, "self_delete", "You cannot delete your own account.")
        if not store.delete_user(user_id):
            raise _not_found("User")
        return {"deleted": user_id}

    @app.get("/classrooms")
    def list_classrooms(user: dict = Depends(current_user)):
        require_role(user, ROLE_TEACHER, ROLE_ADMIN)
        if user["role"] == ROLE_ADMIN:
            return {"classrooms": store.list_classrooms()}
        return {"classrooms": store.list_classrooms(teacher_id=user["id"])}

    @app.post("/classrooms", status_code=201)
    def create_classroom(body: ClassroomBody, user: dict = Depends(current_user)):
        require_role(user, ROLE_ADMIN)
        classroom_id = body.id or uuid.uuid4().hex[:8]
        return store.create_classroom(classroom_id, body.name, body.grade, body.teacher_id)

    # -- export -----------------------------------------------------------------

    @app.get("/export/{assignment_id}")
    def export_assignment(assignment_id: str, user: dict = Depends(current_user)):
        require_role(user, ROLE_TEACHER, ROLE_ADMIN)
        assignment = store.get_assignment(assignment_id)
        if assignment is None:
            raise _not_found("Assignment")
        if not _can_see_classroom(user, assignment["classroom_id"]):
            raise _forbidden()
        classroom = store.get_classroom(assignment["classroom_id"]) or {}
        grade = classroom.get("grade") or ""
        records = [
            r for r in store.assignment_submissions(assignment_id) if r["status"] == "complete"
        ]

        scores_buffer = io.StringIO()
        scores_writer = csv.writer(scores_buffer)
        scores_writer.writerow(
            ["essay_id", "grade", "draft_number", "word_count", "npe", "spc",
             "ef_level", "feedback_kind", "feedback_level"]
        )
        revisions_buffer = io.StringIO()
        revisions_writer = csv.writer(revisions_buffer)
        revisions_writer.writerow(ANNOTATION_COLUMNS)

        archive_buffer = io.BytesIO()
        with zipfile.ZipFile(archive_buffer, "w", zipfile.ZIP_DEFLATED) as archive:
            for record in records:
                essay_id = _opaque_id(record["student_id"], assignment_id)
                payload = record["payload"] or {}
                score = payload.get("score") or {}
                scores_writer.writerow(
                    [
                        essay_id,
                        grade,
                        record["draft_number"],
                        score.get("word_count", ""),
                        score.get("npe", ""),
                        score.get("spc", ""),
                        record["ef_level"],
                        record["feedback_kind"],
                        record["feedback_level"],
                    ]
                )
                for rev in payload.get("revisions") or []:
                    revisions_writer.writerow(
                        [
                            essay_id,
                            grade,
                            record["draft_number"] - 1,
                            record["draft_number"],
                            "" if rev["old_index"] is None else rev["old_index"],
                            "" if rev["new_index"] is None else rev["new_index"],
                            rev["action"],
                            rev["type_label"] or "",
                            rev["er_label"] or "",
                            rev["success_label"] or "",
                        ]
                    )
                archive.writestr(
                    f"drafts/{essay_id}_draft{record['draft_number']}.txt", record["text"]
                )
            archive.writestr("scores.csv", scores_buffer.getvalue())
            archive.writestr("revisions.csv", revisions_buffer.getvalue())
        return Response(
            content=archive_buffer.getvalue(),
            media_type="application/zip",
            headers={
                "Content-Disposition": f'attachment; filename="{assignment_id}_export.zip"'
            },
        )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    return app
