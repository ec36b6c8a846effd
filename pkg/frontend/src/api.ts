/** Typed client for the annotation service's REST endpoints. */

import { serializeSubmission } from "./results.js";
import type {
  ServedInstance,
  SubmissionBody,
  TaskFile,
  TaskSummary,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public details?: unknown,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  token: string | null = null;

  constructor(
    public baseUrl: string = "",
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private headers(json = true): Record<string, string> {
    const h: Record<string, string> = {};
    if (json) h["Content-Type"] = "application/json";
    if (this.token) h["Authorization"] = `Bearer ${this.token}`;
    return h;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: string,
  ): Promise<{ status: number; body: T }> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: this.headers(body !== undefined),
      body,
    });
    if (response.status === 204) {
      return { status: 204, body: null as T };
    }
    const text = await response.text();
    const parsed = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ApiError(
        response.status,
        parsed?.code ?? "error",
        parsed?.message ?? response.statusText,
        parsed?.details,
      );
    }
    return { status: response.status, body: parsed as T };
  }

  async register(
    name: string,
    password: string,
    role: "administrator" | "annotator",
    demographics: Record<string, unknown> = {},
  ) {
    return (
      await this.request<{ user_id: string }>(
        "POST",
        "/users",
        JSON.stringify({ name, password, role, demographics }),
      )
    ).body;
  }

  async login(name: string, password: string) {
    const { body } = await this.request<{ token: string; role: string; name: string }>(
      "POST",
      "/login",
      JSON.stringify({ name, password }),
    );
    this.token = body.token;
    return body;
  }

  async listTasks(): Promise<TaskSummary[]> {
    return (
      await this.request<{ tasks: TaskSummary[] }>("GET", "/tasks")
    ).body.tasks;
  }

  async taskDetail(taskId: string): Promise<TaskSummary> {
    return (await this.request<TaskSummary>("GET", `/tasks/${taskId}`)).body;
  }

  async validate(file: TaskFile): Promise<{ violations: unknown[] }> {
    return (
      await this.request<{ violations: unknown[] }>(
        "POST",
        "/validate",
        JSON.stringify(file),
      )
    ).body;
  }

  async createTask(
    file: TaskFile,
    backend = "none",
    backendConfig: Record<string, unknown> = {},
    policy = "exclusive",
  ): Promise<string> {
    const payload = {
      data: file.data,
      format: file.format,
      backend,
      backend_config: backendConfig,
      policy,
    };
    return (
      await this.request<{ task_id: string }>(
        "POST",
        "/tasks",
        JSON.stringify(payload),
      )
    ).body.task_id;
  }

  async assign(taskId: string, annotator: string) {
    return (
      await this.request(
        "POST",
        `/tasks/${taskId}/assign`,
        JSON.stringify({ annotator }),
      )
    ).body;
  }

  async next(taskId: string): Promise<ServedInstance | null> {
    const { status, body } = await this.request<ServedInstance>(
      "GET",
      `/tasks/${taskId}/next`,
    );
    return status === 204 ? null : body;
  }

  async submit(taskId: string, body: SubmissionBody) {
    return (
      await this.request<{ record_id: number; done_count: number }>(
        "POST",
        `/tasks/${taskId}/annotations`,
        serializeSubmission(body),
      )
    ).body;
  }

  async exportTask(taskId: string): Promise<TaskFile & { records?: unknown[] }> {
    return (
      await this.request<TaskFile & { records?: unknown[] }>(
        "GET",
        `/tasks/${taskId}/export`,
      )
    ).body;
  }
}
