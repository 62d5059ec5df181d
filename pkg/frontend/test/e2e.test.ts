// @vitest-environment node
// True cross-component check: boots the real engine (`agentforge serve`,
// mock provider) and drives it through the same client code the UI uses.

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { fetchWorkspace, getInfo, listAgents, postEvent, runAgent } from "../src/api.js";

const PORT = 7390 + Math.floor(Math.random() * 500);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;

async function waitForEngine(deadlineMs = 30_000): Promise<void> {
  const start = Date.now();
  for (;;) {
    try {
      await getInfo(BASE);
      return;
    } catch {
      if (Date.now() - start > deadlineMs) {
        throw new Error("engine did not come up in time");
      }
      await new Promise((r) => setTimeout(r, 200));
    }
  }
}

beforeAll(async () => {
  server = spawn("agentforge", ["serve", "--port", String(PORT)], {
    stdio: "ignore",
  });
  await waitForEngine();
}, 40_000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("engine contract", () => {
  it("lists the four packaged agents", async () => {
    const agents = await listAgents(BASE);
    expect(agents.map((a) => a.name)).toEqual(["Adviser", "Checker", "Rewriter", "Translator"]);
  });

  it("serves the Rewriter workspace in the shape the UI tests pin", async () => {
    const spec = await fetchWorkspace(BASE, "Rewriter");
    expect(spec.agent).toBe("Rewriter");
    expect(spec.components).toEqual([
      { kind: "toolbar", actions: [{ preset: "copy" }, { preset: "clear" }] },
      { kind: "textarea" },
      { kind: "inputarea" },
      { kind: "actions", actions: [{ preset: "send-input", bind: "btn.send" }] },
    ]);
    expect(spec.bindings).toEqual([]);
  });

  it("runs the Rewriter against the mock provider", async () => {
    const result = await runAgent(BASE, "Rewriter", "hi");
    expect(result.output).toBe("MOCK[Rewriter]: hi");
    expect(result.session_id).toBeTruthy();
  });

  it("accepts posted events and forwards them on the stream", async () => {
    const controller = new AbortController();
    const response = await fetch(`${BASE}/events/stream`, { signal: controller.signal });
    expect(response.ok).toBe(true);
    const reader = response.body!.getReader();
    const decoder = new TextDecoder();

    await postEvent(BASE, "btn.live-check", { from: "e2e" });

    let buffered = "";
    const deadline = Date.now() + 10_000;
    try {
      while (Date.now() < deadline && !buffered.includes("btn.live-check")) {
        const { value, done } = await reader.read();
        if (done) break;
        buffered += decoder.decode(value, { stream: true });
      }
    } finally {
      controller.abort();
    }
    const frame = buffered
      .split("\n")
      .find((line) => line.startsWith("data: ") && line.includes("btn.live-check"));
    expect(frame).toBeDefined();
    const message = JSON.parse(frame!.slice("data: ".length));
    expect(message.kind).toBe("event");
    expect(message.body).toEqual({ event: "btn.live-check", payload: { from: "e2e" } });
  }, 20_000);
});
