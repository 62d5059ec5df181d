// Thin client for the engine's HTTP contract. The UI has no other coupling
// to engine internals.

import type { AgentSummary, RunResponse, WorkspaceSpec } from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    public readonly status: number,
    public readonly code: string = "error",
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (error) {
    throw new ApiError(`cannot reach engine: ${String(error)}`, 0, "network");
  }
  let payload: unknown = null;
  try {
    payload = await response.json();
  } catch {
    // non-JSON error body; fall through with nulls
  }
  if (!response.ok) {
    const body = (payload ?? {}) as { code?: string; message?: string };
    throw new ApiError(body.message ?? response.statusText, response.status, body.code);
  }
  return payload as T;
}

export function listAgents(baseUrl: string): Promise<AgentSummary[]> {
  return request<AgentSummary[]>(`${baseUrl}/agents`);
}

export function fetchWorkspace(baseUrl: string, agent: string): Promise<WorkspaceSpec> {
  return request<WorkspaceSpec>(`${baseUrl}/agents/${encodeURIComponent(agent)}/workspace`);
}

export function runAgent(
  baseUrl: string,
  agent: string,
  input: string,
  sessionId?: string | null,
): Promise<RunResponse> {
  return request<RunResponse>(`${baseUrl}/agents/${encodeURIComponent(agent)}/run`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(sessionId ? { input, session_id: sessionId } : { input }),
  });
}

export function postEvent(
  baseUrl: string,
  event: string,
  payload?: unknown,
): Promise<{ published: boolean; invoked: number }> {
  return request(`${baseUrl}/events`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(payload === undefined ? { event } : { event, payload }),
  });
}

export function getInfo(baseUrl: string): Promise<{ version: string }> {
  return request(`${baseUrl}/info`);
}
