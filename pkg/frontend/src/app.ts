/**
 * Application shell: login, annotator queue + annotation loop, admin upload
 * and assignment. The server owns all state; a reload only keeps the token.
 */

import { ApiClient, ApiError } from "./api.js";
import { PREDEFINED_TYPES } from "./predefined.js";
import { acceptedUnchanged, renderScreen, type RenderedScreen } from "./render.js";
import { buildSubmission, validateAll } from "./results.js";
import type { SuggestionEnvelope, TaskFile, TaskSummary } from "./types.js";

const TOKEN_KEY = "annokit-token";

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class App {
  client: ApiClient;
  root: HTMLElement;
  role: string | null = null;
  userName: string | null = null;

  constructor(root: HTMLElement, client?: ApiClient) {
    this.root = root;
    this.client = client ?? new ApiClient("");
    const saved = sessionStorage.getItem(TOKEN_KEY);
    if (saved) this.client.token = saved;
  }

  async start(): Promise<void> {
    if (this.client.token) {
      try {
        await this.showTasks();
        return;
      } catch {
        this.client.token = null;
        sessionStorage.removeItem(TOKEN_KEY);
      }
    }
    this.showLogin();
  }

  private banner(message: string, kind = "error"): void {
    const existing = this.root.querySelector(".banner");
    existing?.remove();
    const node = el("div", `banner banner-${kind}`, message);
    this.root.prepend(node);
  }

  showLogin(): void {
    this.root.textContent = "";
    const form = el("form", "login-form");
    const name = document.createElement("input");
    name.placeholder = "name";
    name.className = "login-name";
    const password = document.createElement("input");
    password.type = "password";
    password.placeholder = "password";
    password.className = "login-password";
    const submit = el("button", "login-submit", "Sign in") as HTMLButtonElement;
    submit.type = "submit";
    form.append(name, password, submit);
    form.addEventListener("submit", async (event) => {
      event.preventDefault();
      try {
        const session = await this.client.login(name.value, password.value);
        sessionStorage.setItem(TOKEN_KEY, this.client.token ?? "");
        this.role = session.role;
        this.userName = session.name;
        await this.showTasks();
      } catch (error) {
        this.banner(error instanceof ApiError ? error.message : String(error));
      }
    });
    this.root.appendChild(form);
  }

  async showTasks(): Promise<void> {
    const tasks = await this.client.listTasks();
    this.root.textContent = "";
    const header = el("div", "header");
    header.appendChild(el("h1", "", "annokit"));
    this.root.appendChild(header);
    if (this.role === "administrator") {
      this.root.appendChild(this.adminPanel());
    }
    const list = el("ul", "task-list");
    for (const task of tasks) {
      const item = el("li", "task-item");
      item.appendChild(
        el("span", "task-label",
           `${task.task_id} [${task.backend}] ${task.n_done}/${task.n_instances}`),
      );
      const open = el("button", "open-task", "annotate") as HTMLButtonElement;
      open.addEventListener("click", () => void this.annotate(task));
      item.appendChild(open);
      if (this.role === "administrator") {
        const exportButton = el("button", "export-task", "export") as HTMLButtonElement;
        exportButton.addEventListener("click", () => void this.download(task.task_id));
        item.appendChild(exportButton);
      }
      list.appendChild(item);
    }
    this.root.appendChild(list);
  }

  private adminPanel(): HTMLElement {
    const panel = el("div", "admin-panel");
    panel.appendChild(el("h2", "", "Create task"));
    const fileInput = document.createElement("textarea");
    fileInput.className = "upload-json";
    fileInput.placeholder = "paste a task file (JSON)";
    const typePicker = document.createElement("select");
    typePicker.className = "type-picker";
    const custom = document.createElement("option");
    custom.value = "";
    custom.textContent = "custom (format from file)";
    typePicker.appendChild(custom);
    for (const name of Object.keys(PREDEFINED_TYPES)) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = name;
      typePicker.appendChild(option);
    }
    const assignee = document.createElement("input");
    assignee.className = "assignee-name";
    assignee.placeholder = "assign to (annotator name)";
    const create = el("button", "create-task", "validate + create") as HTMLButtonElement;
    const errors = el("div", "upload-errors");
    create.addEventListener("click", async () => {
      errors.textContent = "";
      let file: TaskFile;
      try {
        file = JSON.parse(fileInput.value) as TaskFile;
      } catch (error) {
        errors.textContent = `not valid JSON: ${error}`;
        return;
      }
      if (typePicker.value) {
        file = { data: file.data, format: PREDEFINED_TYPES[typePicker.value] };
      }
      try {
        const report = await this.client.validate(file);
        if (report.violations.length > 0) {
          for (const violation of report.violations as {
            rule: string; message: string; instance: number | null;
            component: number | null;
          }[]) {
            errors.appendChild(
              el("p", "violation",
                 `[${violation.rule}] instance ${violation.instance ?? "-"} ` +
                 `component ${violation.component ?? "-"}: ${violation.message}`),
            );
          }
          return;
        }
        const taskId = await this.client.createTask(file);
        if (assignee.value) await this.client.assign(taskId, assignee.value);
        await this.showTasks();
      } catch (error) {
        errors.textContent =
          error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
      }
    });
    panel.append(fileInput, typePicker, assignee, create, errors);
    return panel;
  }

  private async download(taskId: string): Promise<void> {
    const exported = await this.client.exportTask(taskId);
    const blob = new Blob([JSON.stringify(exported, null, 4)], {
      type: "application/json",
    });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = `${taskId}.json`;
    link.click();
  }

  async annotate(task: TaskSummary): Promise<void> {
    const detail = await this.client.taskDetail(task.task_id);
    const served = await this.client.next(task.task_id);
    this.root.textContent = "";
    if (served === null) {
      this.root.appendChild(el("div", "completion", "All instances are done."));
      const back = el("button", "back", "back to tasks") as HTMLButtonElement;
      back.addEventListener("click", () => void this.showTasks());
      this.root.appendChild(back);
      return;
    }
    const container = el("div", "screen-container");
    this.root.appendChild(container);
    const screen = renderScreen(
      document,
      container,
      detail.format ?? [],
      served.source,
      served.questions,
      served.suggestion,
    );
    const submit = el("button", "submit", "submit") as HTMLButtonElement;
    submit.addEventListener("click", async () => {
      await this.submitScreen(task, detail.format ?? [], served.instance_index,
                              screen, served.suggestion, served.source);
    });
    this.root.appendChild(submit);
  }

  async submitScreen(
    task: TaskSummary,
    format: TaskSummary["format"] & {},
    instanceIndex: number,
    screen: RenderedScreen,
    suggestion: SuggestionEnvelope | null,
    source: unknown,
  ): Promise<void> {
    const values = screen.getValues();
    const problems = validateAll(format, values, source as never);
    if (problems.length > 0) {
      this.banner(problems.join("; "));
      return;
    }
    const body = buildSubmission(instanceIndex, values, suggestion);
    body.accepted_unchanged = acceptedUnchanged(screen, suggestion);
    try {
      await this.client.submit(task.task_id, body);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        await this.annotate(task); // refresh, then explain on the new screen
        this.banner("someone else took this instance; fetching a fresh one", "warn");
        return;
      }
      throw error;
    }
    await this.annotate(task); // optimistic advance
  }
}

export function mount(selector = "#app"): App {
  const node = document.querySelector(selector);
  if (!node) throw new Error(`no mount point ${selector}`);
  const app = new App(node as HTMLElement);
  void app.start();
  return app;
}
