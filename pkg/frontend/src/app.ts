// Application shell: login, role routing, and view lifecycle. The login
// role determines the single visible view; hash links outside the role
// fall back to the login screen.

import { ApiClient, ApiError, type LoginResponse, type Role } from "./api.js";
import { baseUrl } from "./config.js";
import { banner, clear, el } from "./dom.js";
import { AdminView } from "./admin.js";
import { StudentView } from "./student.js";
import { TeacherView } from "./teacher.js";

export interface Session {
  api: ApiClient;
  user: LoginResponse;
}

export function routeForRole(role: Role): string {
  return `#${role}`;
}

/** The view a hash may show, or null when it needs a login redirect. */
export function resolveRoute(hash: string, session: Session | null): Role | "login" {
  const wanted = hash.replace(/^#/, "");
  if (!session) {
    return "login";
  }
  if (wanted === "" || wanted === session.user.role) {
    return session.user.role;
  }
  return "login";
}

export class App {
  private session: Session | null = null;
  private activeTeacher: TeacherView | null = null;

  constructor(
    private container: HTMLElement,
    private apiFactory: () => ApiClient = () => new ApiClient(baseUrl()),
  ) {}

  start(): void {
    window.addEventListener("hashchange", () => void this.render());
    void this.render();
  }

  async render(): Promise<void> {
    this.activeTeacher?.unmount();
    this.activeTeacher = null;
    clear(this.container);
    const route = resolveRoute(window.location.hash, this.session);
    if (route === "login") {
      this.session = null;
      this.renderLogin();
      return;
    }
    const { api, user } = this.session as Session;
    const header = el("header", { class: "topbar" }, [
      el("span", { class: "brand" }, ["revisecoach"]),
      el("span", { class: "whoami" }, [`${user.display_name} (${user.role})`]),
    ]);
    const logout = el("button", { type: "button", class: "logout" }, ["Log out"]);
    logout.addEventListener("click", () => {
      this.session = null;
      window.location.hash = "";
      void this.render();
    });
    header.append(logout);
    this.container.append(header);

    const main = el("main", { class: "main" });
    this.container.append(main);
    try {
      if (user.role === "student") {
        await new StudentView(api, user).mount(main);
      } else if (user.role === "teacher") {
        this.activeTeacher = new TeacherView(api, user);
        await this.activeTeacher.mount(main);
      } else {
        await new AdminView(api, user).mount(main);
      }
    } catch (err) {
      const message = err instanceof ApiError ? err.message : "Something went wrong.";
      main.append(banner("error", message));
    }
  }

  renderLogin(): void {
    const username = el("input", {
      name: "username",
      placeholder: "login id",
      "aria-label": "login id",
      autocomplete: "username",
    });
    const password = el("input", {
      name: "password",
      type: "password",
      placeholder: "password",
      "aria-label": "password",
      autocomplete: "current-password",
    });
    const submit = el("button", { type: "submit" }, ["Log in"]);
    const messages = el("div", { class: "messages" });
    const form = el("form", { class: "login-form" }, [
      el("h1", {}, ["revisecoach"]),
      el("p", { class: "tagline" }, ["Write, get feedback, revise."]),
      username,
      password,
      submit,
      messages,
    ]);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void (async () => {
        submit.setAttribute("disabled", "true");
        clear(messages);
        try {
          const api = this.apiFactory();
          const user = await api.login(username.value, password.value);
          this.session = { api, user };
          window.location.hash = routeForRole(user.role);
          await this.render();
        } catch (err) {
          const message =
            err instanceof ApiError ? err.message : "Login failed. Is the server running?";
          messages.append(banner("error", message));
          submit.removeAttribute("disabled");
        }
      })();
    });
    this.container.append(el("div", { class: "login-wrap" }, [form]));
  }
}

export function bootstrap(): void {
  const container = document.getElementById("app");
  if (container) {
    new App(container).start();
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  bootstrap();
}
