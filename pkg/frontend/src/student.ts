// Student view: article pane with highlights, plain-text editor, and the
// feedback panel for the latest completed draft. The editor is a plain
// textarea on purpose: scoring runs on raw text, and rich formatting
// would diverge from what the backend tokenizer sees.

import type {
  ApiClient,
  Assignment,
  AssignmentDetail,
  LoginResponse,
  SubmissionRecord,
  SubmissionSummary,
} from "./api.js";
import { ApiError } from "./api.js";
import { POLL_INTERVAL_MS } from "./config.js";
import { banner, clear, el } from "./dom.js";
import { renderHighlighted } from "./highlight.js";

function countWords(text: string): number {
  return text.split(/\s+/).filter(Boolean).length;
}

export class StudentView {
  private assignment: AssignmentDetail | null = null;
  private drafts: SubmissionSummary[] = [];
  private editor = el("textarea", {
    class: "editor",
    placeholder: "Write your essay here...",
    "aria-label": "essay editor",
  });
  private wordCount = el("span", { class: "word-count" }, ["0 words"]);
  private draftIndicator = el("span", { class: "draft-indicator" });
  private submitButton = el("button", { class: "submit", type: "button" }, ["Submit draft"]);
  private feedbackPanel = el("section", { class: "feedback-panel" });
  private articlePane = el("article", { class: "article-pane" });
  private messages = el("div", { class: "messages" });
  private root: HTMLElement;

  constructor(
    private api: ApiClient,
    private user: LoginResponse,
    private pollIntervalMs: number = POLL_INTERVAL_MS,
  ) {
    this.root = el("div", { class: "student-view" });
  }

  async mount(container: HTMLElement): Promise<HTMLElement> {
    container.append(this.root);
    this.root.append(el("h2", {}, [`Welcome, ${this.user.display_name}`]));
    this.root.append(this.messages);

    const listing = await this.api.assignments();
    if (!listing.assignments.length) {
      this.root.append(banner("info", "No assignments yet. Check back later."));
      return this.root;
    }
    this.assignment = await this.api.assignmentDetail(listing.assignments[0].id);

    const prompt = el("p", { class: "prompt" }, [this.assignment.prompt_text]);
    const left = el("div", { class: "pane pane-left" }, [
      el("h3", {}, ["Article"]),
      this.articlePane,
    ]);
    const controls = el("div", { class: "editor-controls" }, [
      this.wordCount,
      this.draftIndicator,
      this.submitButton,
    ]);
    const right = el("div", { class: "pane pane-right" }, [
      el("h3", {}, ["Your essay"]),
      prompt,
      this.editor,
      controls,
      this.feedbackPanel,
    ]);
    this.root.append(el("div", { class: "panes" }, [left, right]));

    this.articlePane.textContent = this.assignment.article_text;
    this.editor.addEventListener("input", () => this.refreshControls());
    this.submitButton.addEventListener("click", () => void this.submitAndPoll());

    await this.refreshDrafts();
    await this.showLatestFeedback();
    this.refreshControls();
    return this.root;
  }

  private async refreshDrafts(): Promise<void> {
    if (!this.assignment) return;
    this.drafts = (await this.api.drafts(this.assignment.id)).drafts;
  }

  private completedDrafts(): number {
    return this.drafts.filter((d) => d.status === "complete").length;
  }

  private processing(): boolean {
    return this.drafts.some((d) => d.status === "processing");
  }

  refreshControls(): void {
    const words = countWords(this.editor.value);
    this.wordCount.textContent = `${words} word${words === 1 ? "" : "s"}`;
    const max = this.assignment?.max_drafts ?? 3;
    const next = this.completedDrafts() + 1;
    this.draftIndicator.textContent =
      next > max ? `All ${max} drafts submitted` : `Draft ${next} of ${max}`;
    this.submitButton.disabled =
      words === 0 || this.processing() || this.completedDrafts() >= max;
  }

  /** POST the draft, poll until the record completes, render feedback. */
  async submitAndPoll(): Promise<void> {
    if (!this.assignment || this.submitButton.disabled) return;
    clear(this.messages);
    this.submitButton.disabled = true; // optimistic disable: no double submit
    try {
      let record: SubmissionRecord | SubmissionSummary = await this.api.submitDraft(
        this.assignment.id,
        this.editor.value,
      );
      while (record.status === "processing") {
        await new Promise((resolve) => setTimeout(resolve, this.pollIntervalMs));
        const refreshed = (await this.api.drafts(this.assignment.id)).drafts;
        record = refreshed[refreshed.length - 1];
      }
      if (record.status === "failed") {
        this.messages.append(
          banner("error", "Something went wrong while scoring your draft. Please submit again."),
        );
      }
      await this.refreshDrafts();
      await this.showLatestFeedback();
    } catch (err) {
      const message =
        err instanceof ApiError ? err.message : "Could not submit your draft. Please try again.";
      this.messages.append(banner("error", message));
    } finally {
      this.refreshControls();
    }
  }

  /** Render the latest complete record: essay, bullets, highlights. */
  async showLatestFeedback(): Promise<void> {
    if (!this.assignment) return;
    let record: SubmissionRecord;
    try {
      record = await this.api.feedback(this.assignment.id);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        clear(this.feedbackPanel);
        this.feedbackPanel.append(
          el("p", { class: "placeholder" }, ["Submit your first draft to receive feedback."]),
        );
        return;
      }
      throw err;
    }
    clear(this.feedbackPanel);
    const feedback = record.feedback;
    if (!feedback) return;
    const title = feedback.kind === "EF" ? "Feedback on your evidence" : "Feedback on your revision";
    this.feedbackPanel.append(
      el("h3", { class: `feedback-title feedback-${feedback.kind.toLowerCase()}` }, [title]),
    );
    const list = el("ul", { class: "feedback-bullets" });
    for (const message of feedback.messages) {
      list.append(el("li", {}, [message]));
    }
    this.feedbackPanel.append(list);
    this.feedbackPanel.dataset["level"] = feedback.level;

    if (!this.editor.value) {
      this.editor.value = record.text;
      this.refreshControls();
    }

    clear(this.articlePane);
    const spans = record.highlight_spans ?? [];
    if (spans.length && this.assignment) {
      this.articlePane.append(renderHighlighted(this.assignment.article_text, spans));
    } else if (this.assignment) {
      this.articlePane.textContent = this.assignment.article_text;
    }
  }
}

export type { Assignment };
