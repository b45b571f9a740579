// Typed client for the platform REST API. Every displayed level and
// message round-trips through here: the UI never computes feedback
// itself.

export type Role = "student" | "teacher" | "admin";

export interface LoginResponse {
  token: string;
  user_id: string;
  role: Role;
  display_name: string;
  classroom_id: string | null;
}

export interface Assignment {
  id: string;
  article_id: string;
  prompt_text: string;
  max_drafts: number;
  classroom_id: string;
}

export interface AssignmentDetail extends Assignment {
  article_text: string;
}

export interface Score {
  npe: number;
  spc: number;
  spc_vector: number[];
  word_count: number;
}

export interface GuardTraceEntry {
  guard: string;
  passed: boolean;
  operands: Record<string, unknown>;
}

export interface Feedback {
  kind: "EF" | "RF";
  level: string;
  messages: string[];
  highlight_topics: string[];
  trace: GuardTraceEntry[];
}

export interface HighlightSpan {
  topic: string;
  start: number;
  end: number;
}

export interface Revision {
  action: "add" | "delete" | "modify";
  type_label: string | null;
  er_label: string | null;
  success_label: string | null;
  old_text: string | null;
  new_text: string | null;
}

export interface SubmissionSummary {
  id: number;
  student_id: string;
  assignment_id: string;
  draft_number: number;
  status: "processing" | "complete" | "failed";
  submitted_at: string;
  feedback_kind: "EF" | "RF" | null;
  feedback_level: string | null;
  error: string | null;
  display_name?: string;
}

export interface SubmissionRecord extends SubmissionSummary {
  text: string;
  score: Score | null;
  feedback: Feedback | null;
  revisions: Revision[] | null;
  highlight_spans: HighlightSpan[] | null;
}

export interface UserRecord {
  id: string;
  role: Role;
  display_name: string;
  classroom_id: string | null;
}

export interface Classroom {
  id: string;
  name: string;
  grade: string | null;
  teacher_id: string | null;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail: unknown = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  token: string | null = null;

  constructor(private base: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) {
      headers["Authorization"] = `Bearer ${this.token}`;
    }
    let response: Response;
    try {
      response = await fetch(this.base + path, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, "network", `Could not reach the server at ${this.base}.`, err);
    }
    const text = await response.text();
    let payload: unknown = null;
    if (text) {
      try {
        payload = JSON.parse(text);
      } catch {
        payload = null;
      }
    }
    if (!response.ok) {
      const err = (payload ?? {}) as { code?: string; message?: string; detail?: unknown };
      throw new ApiError(
        response.status,
        err.code ?? "http_error",
        err.message ?? `Request failed (${response.status}).`,
        err.detail ?? null,
      );
    }
    return payload as T;
  }

  async login(username: string, password: string): Promise<LoginResponse> {
    const user = await this.request<LoginResponse>("POST", "/auth/login", {
      username,
      password,
    });
    this.token = user.token;
    return user;
  }

  assignments(): Promise<{ assignments: Assignment[] }> {
    return this.request("GET", "/assignments");
  }

  assignmentDetail(id: string): Promise<AssignmentDetail> {
    return this.request("GET", `/assignments/${encodeURIComponent(id)}`);
  }

  submitDraft(assignmentId: string, text: string): Promise<SubmissionRecord> {
    return this.request("POST", `/assignments/${encodeURIComponent(assignmentId)}/drafts`, {
      text,
    });
  }

  drafts(assignmentId: string): Promise<{ drafts: SubmissionSummary[] }> {
    return this.request("GET", `/assignments/${encodeURIComponent(assignmentId)}/drafts`);
  }

  feedback(assignmentId: string): Promise<SubmissionRecord> {
    return this.request("GET", `/assignments/${encodeURIComponent(assignmentId)}/feedback`);
  }

  classroomSubmissions(
    classroomId: string,
    filters: { assignment?: string; draft?: number } = {},
  ): Promise<{ submissions: SubmissionSummary[] }> {
    const params = new URLSearchParams();
    if (filters.assignment) {
      params.set("assignment", filters.assignment);
    }
    if (filters.draft !== undefined) {
      params.set("draft", String(filters.draft));
    }
    const query = params.toString();
    return this.request(
      "GET",
      `/classrooms/${encodeURIComponent(classroomId)}/submissions${query ? "?" + query : ""}`,
    );
  }

  classrooms(): Promise<{ classrooms: Classroom[] }> {
    return this.request("GET", "/classrooms");
  }

  classroomStudents(classroomId: string): Promise<{ students: UserRecord[] }> {
    return this.request("GET", `/classrooms/${encodeURIComponent(classroomId)}/students`);
  }

  users(): Promise<{ users: UserRecord[] }> {
    return this.request("GET", "/users");
  }

  createUser(user: {
    id: string;
    password: string;
    role: Role;
    display_name: string;
    classroom_id?: string | null;
  }): Promise<UserRecord> {
    return this.request("POST", "/users", user);
  }

  deleteUser(id: string): Promise<{ deleted: string }> {
    return this.request("DELETE", `/users/${encodeURIComponent(id)}`);
  }

  createClassroom(room: {
    id?: string;
    name: string;
    grade?: string | null;
    teacher_id?: string | null;
  }): Promise<Classroom> {
    return this.request("POST", "/classrooms", room);
  }

  createAssignment(assignment: {
    id?: string;
    article_id: string;
    prompt_text: string;
    classroom_id: string;
    max_drafts?: number;
  }): Promise<Assignment> {
    return this.request("POST", "/assignments", assignment);
  }
}
