// @vitest-environment happy-dom
/**
 * End-to-end run against a live annotation service: admin flow (upload with
 * a predefined type pick, assign "bob", export) and scripted annotation of
 * every shipped interface fixture through the rendered components, checking
 * the UI's submission bytes equal a direct client's.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, readdirSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { PREDEFINED_TYPES } from "../src/predefined.js";
import { acceptedUnchanged, renderScreen } from "../src/render.js";
import { buildSubmission, serializeSubmission } from "../src/results.js";
import type { ResultValue, TaskFile } from "../src/types.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "..", "fixtures");
const PORT = 8743;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
const sentBodies: string[] = [];

/** node fetch with request-body capture, so we can byte-compare payloads */
const capturingFetch = (url: string, init?: RequestInit) => {
  if (init?.body && init.method === "POST" && url.includes("/annotations")) {
    sentBodies.push(String(init.body));
  }
  return globalThis.fetch(url, init);
};

async function waitForHealth(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const r = await globalThis.fetch(`${BASE}/health`);
      if (r.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  const db = join(mkdtempSync(join(tmpdir(), "annokit-e2e-")), "e2e.db");
  const script = [
    "from annokit.store import AnnotationStore",
    "from annokit.service.app import create_app",
    "import uvicorn",
    `store = AnnotationStore(${JSON.stringify(db)})`,
    "app = create_app(store=store)",
    `uvicorn.run(app, host='127.0.0.1', port=${PORT}, log_level='warning')`,
  ].join("\n");
  server = spawn("python3", ["-c", script], { stdio: "inherit" });
  await waitForHealth();
}, 30000);

afterAll(() => {
  server?.kill();
});

function loadFixture(name: string): TaskFile {
  return JSON.parse(
    readFileSync(join(FIXTURES, "interfaces", name), "utf-8"),
  ) as TaskFile;
}

function scriptValues(file: TaskFile, instance: number,
                      screen: ReturnType<typeof renderScreen>): ResultValue[] {
  const source = file.data.source[instance];
  const text = typeof source === "string" ? source : "";
  const expected: ResultValue[] = [];
  screen.components.forEach((component, index) => {
    const spec = file.format[index];
    switch (spec.type) {
      case "textbox": {
        const area = component.root.querySelector("textarea")!;
        area.value = "scripted answer";
        area.dispatchEvent(new Event("input"));
        expected.push("scripted answer");
        break;
      }
      case "button": {
        const buttons = component.root.querySelectorAll("button.choice");
        (buttons[1 % buttons.length] as HTMLButtonElement).click();
        expected.push(1 % buttons.length);
        break;
      }
      case "slider": {
        const input = component.root.querySelector("input")!;
        input.value = String(spec.properties.min ?? 0);
        input.dispatchEvent(new Event("input"));
        expected.push(spec.properties.min ?? 0);
        break;
      }
      case "selection":
      case "dropdown": {
        const labels = spec.properties.contents ?? [];
        const end = Math.min(4, text.length);
        if (end > 0) {
          component.addSpan!(0, end, labels[0]);
          expected.push(
            (labels.length > 0 || spec.type === "dropdown"
              ? [[0, end, labels[0]]]
              : [[0, end]]) as ResultValue,
          );
        } else {
          expected.push([]);
        }
        break;
      }
      default:
        expected.push(null);
    }
  });
  return expected;
}

describe("live service flows", () => {
  it("admin flow: upload with type pick, assign bob, bob sees it, export", async () => {
    const admin = new ApiClient(BASE, capturingFetch);
    await admin.register("alice", "pw", "administrator");
    await admin.login("alice", "pw");
    const bobClient = new ApiClient(BASE, capturingFetch);
    await bobClient.register("bob", "pw", "annotator", { age: 29 });
    await bobClient.login("bob", "pw");

    // upload the summarization dataset but pick the predefined type
    const file = loadFixture("summarization.json");
    const picked: TaskFile = {
      data: file.data,
      format: PREDEFINED_TYPES["Text Summarization"],
    };
    const report = await admin.validate(picked);
    expect(report.violations).toEqual([]);
    const taskId = await admin.createTask(picked);
    await admin.assign(taskId, "bob");

    const bobTasks = await bobClient.listTasks();
    expect(bobTasks.map((t) => t.task_id)).toContain(taskId);

    // bob annotates both instances through the rendered screen
    for (;;) {
      const served = await bobClient.next(taskId);
      if (served === null) break;
      const container = document.createElement("div");
      const screen = renderScreen(
        document, container, picked.format, served.source,
        served.questions, served.suggestion,
      );
      scriptValues(picked, served.instance_index, screen);
      const body = buildSubmission(
        served.instance_index, screen.getValues(), served.suggestion,
      );
      body.accepted_unchanged = acceptedUnchanged(screen, served.suggestion);
      await bobClient.submit(taskId, body);
    }

    const exported = await admin.exportTask(taskId);
    expect(exported.data.done).toEqual([1, 1]);
    expect(exported.records?.length).toBe(2);
  }, 60000);

  it("UI payloads are byte-identical to direct-client submissions", async () => {
    const admin = new ApiClient(BASE, capturingFetch);
    await admin.login("alice", "pw");
    const bobClient = new ApiClient(BASE, capturingFetch);
    await bobClient.login("bob", "pw");

    for (const name of readdirSync(join(FIXTURES, "interfaces"))) {
      const file = loadFixture(name);
      const taskId = await admin.createTask(file);
      await admin.assign(taskId, "bob");

      for (;;) {
        const served = await bobClient.next(taskId);
        if (served === null) break;
        const container = document.createElement("div");
        const screen = renderScreen(
          document, container, file.format, served.source,
          served.questions, served.suggestion,
        );
        const expected = scriptValues(file, served.instance_index, screen);

        sentBodies.length = 0;
        const body = buildSubmission(
          served.instance_index, screen.getValues(), served.suggestion,
        );
        body.accepted_unchanged = acceptedUnchanged(screen, served.suggestion);
        await bobClient.submit(taskId, body);

        // a direct client constructing the same values sends the same bytes
        const direct = serializeSubmission(
          buildSubmission(served.instance_index, expected, served.suggestion),
        );
        expect(sentBodies).toEqual([direct]);
      }

      const exported = await admin.exportTask(taskId);
      expect(exported.data.done.every((flag) => flag === 1)).toBe(true);
    }
  }, 120000);
});
