// Teacher view: a submissions table per classroom with assignment/draft
// filters, refreshed on a fixed poll interval, plus a roster panel.

import type { ApiClient, Classroom, LoginResponse, SubmissionSummary } from "./api.js";
import { POLL_INTERVAL_MS } from "./config.js";
import { banner, clear, el } from "./dom.js";

export class TeacherView {
  private classroomSelect = el("select", { class: "classroom-select", "aria-label": "classroom" });
  private assignmentFilter = el("input", {
    class: "filter-assignment",
    placeholder: "filter by assignment id",
    "aria-label": "assignment filter",
  });
  private draftFilter = el("select", { class: "filter-draft", "aria-label": "draft filter" });
  private tableBody = el("tbody");
  private rosterList = el("ul", { class: "roster" });
  private messages = el("div", { class: "messages" });
  private classrooms: Classroom[] = [];
  private timer: ReturnType<typeof setInterval> | null = null;
  private root: HTMLElement;

  constructor(
    private api: ApiClient,
    private user: LoginResponse,
    private pollIntervalMs: number = POLL_INTERVAL_MS,
  ) {
    this.root = el("div", { class: "teacher-view" });
  }

  async mount(container: HTMLElement): Promise<HTMLElement> {
    container.append(this.root);
    this.root.append(el("h2", {}, [`Classroom monitor — ${this.user.display_name}`]));
    this.root.append(this.messages);

    this.classrooms = (await this.api.classrooms()).classrooms;
    if (!this.classrooms.length) {
      this.root.append(banner("info", "No classrooms assigned to you yet."));
      return this.root;
    }
    for (const room of this.classrooms) {
      this.classroomSelect.append(el("option", { value: room.id }, [`${room.name} (${room.id})`]));
    }
    for (const value of ["", "1", "2", "3"]) {
      this.draftFilter.append(el("option", { value }, [value === "" ? "all drafts" : `draft ${value}`]));
    }

    const table = el("table", { class: "submissions-table" }, [
      el("thead", {}, [
        el("tr", {}, [
          el("th", {}, ["Student"]),
          el("th", {}, ["Draft"]),
          el("th", {}, ["Status"]),
          el("th", {}, ["Feedback"]),
          el("th", {}, ["Submitted"]),
        ]),
      ]),
      this.tableBody,
    ]);
    this.root.append(
      el("div", { class: "filters" }, [this.classroomSelect, this.assignmentFilter, this.draftFilter]),
      table,
      el("h3", {}, ["Roster"]),
      this.rosterList,
    );

    const refresh = () => void this.refresh();
    this.classroomSelect.addEventListener("change", refresh);
    this.assignmentFilter.addEventListener("input", refresh);
    this.draftFilter.addEventListener("change", refresh);

    await this.refresh();
    this.timer = setInterval(refresh, this.pollIntervalMs);
    return this.root;
  }

  unmount(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  selectedClassroom(): string {
    return this.classroomSelect.value || this.classrooms[0]?.id || "";
  }

  async refresh(): Promise<void> {
    const classroomId = this.selectedClassroom();
    if (!classroomId) return;
    const filters: { assignment?: string; draft?: number } = {};
    if (this.assignmentFilter.value.trim()) {
      filters.assignment = this.assignmentFilter.value.trim();
    }
    if (this.draftFilter.value) {
      filters.draft = Number(this.draftFilter.value);
    }
    try {
      const [{ submissions }, { students }] = await Promise.all([
        this.api.classroomSubmissions(classroomId, filters),
        this.api.classroomStudents(classroomId),
      ]);
      this.renderTable(submissions);
      clear(this.rosterList);
      for (const student of students) {
        this.rosterList.append(el("li", {}, [`${student.display_name} (${student.id})`]));
      }
    } catch {
      clear(this.messages);
      this.messages.append(banner("error", "Could not load submissions."));
    }
  }

  renderTable(rows: SubmissionSummary[]): void {
    clear(this.tableBody);
    if (!rows.length) {
      this.tableBody.append(
        el("tr", { class: "empty-state" }, [
          el("td", { colspan: "5" }, ["No submissions yet."]),
        ]),
      );
      return;
    }
    for (const row of rows) {
      this.tableBody.append(
        el("tr", { "data-student": row.student_id, "data-draft": String(row.draft_number) }, [
          el("td", {}, [row.display_name ?? row.student_id]),
          el("td", {}, [String(row.draft_number)]),
          el("td", { class: `status status-${row.status}` }, [row.status]),
          el("td", {}, [row.feedback_level ?? "—"]),
          el("td", {}, [row.submitted_at]),
        ]),
      );
    }
  }
}
