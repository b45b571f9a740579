// Admin view: CRUD forms for users, classrooms, and assignments.

import type { ApiClient, LoginResponse, Role } from "./api.js";
import { ApiError } from "./api.js";
import { banner, clear, el } from "./dom.js";

function field(labelText: string, input: HTMLElement): HTMLElement {
  return el("label", { class: "field" }, [labelText, input]);
}

export class AdminView {
  private messages = el("div", { class: "messages" });
  private userTableBody = el("tbody");
  private root: HTMLElement;

  constructor(
    private api: ApiClient,
    private user: LoginResponse,
  ) {
    this.root = el("div", { class: "admin-view" });
  }

  async mount(container: HTMLElement): Promise<HTMLElement> {
    container.append(this.root);
    this.root.append(el("h2", {}, ["Administration"]), this.messages);
    this.root.append(this.userForm(), this.classroomForm(), this.assignmentForm());
    this.root.append(
      el("h3", {}, ["Users"]),
      el("table", { class: "users-table" }, [
        el("thead", {}, [
          el("tr", {}, [
            el("th", {}, ["Id"]),
            el("th", {}, ["Role"]),
            el("th", {}, ["Name"]),
            el("th", {}, ["Classroom"]),
            el("th", {}, [""]),
          ]),
        ]),
        this.userTableBody,
      ]),
    );
    await this.refreshUsers();
    return this.root;
  }

  private report(err: unknown): void {
    clear(this.messages);
    const message = err instanceof ApiError ? err.message : String(err);
    this.messages.append(banner("error", message));
  }

  private notify(message: string): void {
    clear(this.messages);
    this.messages.append(banner("info", message));
  }

  private userForm(): HTMLElement {
    const id = el("input", { name: "id", placeholder: "login id" });
    const password = el("input", { name: "password", type: "password", placeholder: "password" });
    const displayName = el("input", { name: "display_name", placeholder: "display name" });
    const classroom = el("input", { name: "classroom_id", placeholder: "classroom id (students)" });
    const role = el("select", { name: "role" });
    for (const value of ["student", "teacher", "admin"]) {
      role.append(el("option", { value }, [value]));
    }
    const submit = el("button", { type: "submit" }, ["Add user"]);
    const form = el("form", { class: "form-user" }, [
      el("h3", {}, ["New user"]),
      field("Id", id), field("Password", password), field("Role", role),
      field("Display name", displayName), field("Classroom", classroom), submit,
    ]);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void (async () => {
        try {
          await this.api.createUser({
            id: id.value,
            password: password.value,
            role: role.value as Role,
            display_name: displayName.value,
            classroom_id: classroom.value || null,
          });
          this.notify(`Created user ${id.value}.`);
          await this.refreshUsers();
        } catch (err) {
          this.report(err);
        }
      })();
    });
    return form;
  }

  private classroomForm(): HTMLElement {
    const id = el("input", { placeholder: "classroom id (optional)" });
    const name = el("input", { placeholder: "name" });
    const grade = el("input", { placeholder: "grade" });
    const teacher = el("input", { placeholder: "teacher id" });
    const form = el("form", { class: "form-classroom" }, [
      el("h3", {}, ["New classroom"]),
      field("Id", id), field("Name", name), field("Grade", grade), field("Teacher", teacher),
      el("button", { type: "submit" }, ["Add classroom"]),
    ]);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void (async () => {
        try {
          const created = await this.api.createClassroom({
            id: id.value || undefined,
            name: name.value,
            grade: grade.value || null,
            teacher_id: teacher.value || null,
          });
          this.notify(`Created classroom ${created.id}.`);
        } catch (err) {
          this.report(err);
        }
      })();
    });
    return form;
  }

  private assignmentForm(): HTMLElement {
    const id = el("input", { placeholder: "assignment id (optional)" });
    const article = el("input", { placeholder: "article id (e.g. mvp)" });
    const classroom = el("input", { placeholder: "classroom id" });
    const prompt = el("textarea", { placeholder: "writing prompt" });
    const form = el("form", { class: "form-assignment" }, [
      el("h3", {}, ["New assignment"]),
      field("Id", id), field("Article", article), field("Classroom", classroom),
      field("Prompt", prompt),
      el("button", { type: "submit" }, ["Add assignment"]),
    ]);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void (async () => {
        try {
          const created = await this.api.createAssignment({
            id: id.value || undefined,
            article_id: article.value,
            prompt_text: prompt.value,
            classroom_id: classroom.value,
          });
          this.notify(`Created assignment ${created.id}.`);
        } catch (err) {
          this.report(err);
        }
      })();
    });
    return form;
  }

  async refreshUsers(): Promise<void> {
    const { users } = await this.api.users();
    clear(this.userTableBody);
    for (const user of users) {
      const remove = el("button", { type: "button", class: "delete-user" }, ["delete"]);
      remove.addEventListener("click", () => {
        void (async () => {
          try {
            await this.api.deleteUser(user.id);
            this.notify(`Deleted ${user.id}.`);
            await this.refreshUsers();
          } catch (err) {
            this.report(err);
          }
        })();
      });
      this.userTableBody.append(
        el("tr", { "data-user": user.id }, [
          el("td", {}, [user.id]),
          el("td", {}, [user.role]),
          el("td", {}, [user.display_name]),
          el("td", {}, [user.classroom_id ?? "—"]),
          el("td", {}, [user.id === this.user.user_id ? "" : remove]),
        ]),
      );
    }
  }
}
