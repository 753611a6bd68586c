/** Typed client for the routelens HTTP API.
 *
 * This module is the only place in the UI that talks to the network, and
 * the UI never computes verdicts, witnesses, or diffs itself: everything
 * it displays arrives pre-computed (and, for option texts, pre-rendered)
 * from the server.
 */

export interface RouteAttrs {
  network: string;
  asPath: number[];
  communities: string[];
  localPref: number;
  med: number;
  nextHop: string;
  tag: number;
  weight: number;
}

export interface OptionVerdict {
  action: string;
  rendered: string;
}

export interface Question {
  seq: number;
  witness: RouteAttrs;
  optionExisting: OptionVerdict;
  optionNew: OptionVerdict;
}

export interface SessionResult {
  configText: string;
  diff: string;
}

export interface Session {
  sessionId: string;
  state: "pending" | "done";
  answers: { seq: number; choice: string }[];
  questionsAsked: number;
  questionBound: number;
  pendingQuestion: Question | null;
  position: number | null;
  result?: SessionResult;
}

export interface OverlapPair {
  policy: string;
  seqA: number;
  seqB: number;
  kind: string;
  trivialSubset: boolean;
  witness: Record<string, unknown>;
}

export interface OverlapReport {
  pairs: OverlapPair[];
  inconclusive: [string, number, number][];
}

export interface Workspace {
  id: string;
  diagnostics: string[];
  configText?: string;
}

export interface LoopOutcome {
  loopId: string;
  status: string;
  attempts: number;
  snippet: string | null;
  spec: Record<string, unknown> | null;
  lastFeedback: string;
  history: { snippet: string; feedback: string }[];
}

export interface PluginSpec {
  kind: string;
  fixtures?: unknown;
  url?: string;
  fault?: string;
  badAttempts?: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public detail: unknown,
  ) {
    super(message);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  const body = await resp.json().catch(() => null);
  if (!resp.ok) {
    const detail = body && (body as { detail?: unknown }).detail;
    const message =
      detail && typeof detail === "object" && "message" in detail
        ? String((detail as { message: unknown }).message)
        : `request failed (${resp.status})`;
    throw new ApiError(resp.status, message, detail);
  }
  return body as T;
}

export function createWorkspace(configText: string): Promise<Workspace> {
  return request("/workspaces", {
    method: "POST",
    body: JSON.stringify({ configText }),
  });
}

export function getWorkspace(id: string): Promise<Workspace> {
  return request(`/workspaces/${id}`);
}

export function getOverlaps(
  id: string,
  includeTrivial: boolean,
): Promise<OverlapReport> {
  return request(`/workspaces/${id}/overlaps?includeTrivial=${includeTrivial}`);
}

export function synthesize(
  id: string,
  intent: string,
  plugin: PluginSpec,
  threshold = 3,
): Promise<LoopOutcome> {
  return request(`/workspaces/${id}/synthesize`, {
    method: "POST",
    body: JSON.stringify({ intent, plugin, threshold }),
  });
}

export function confirmSpec(
  id: string,
  loopId: string,
  approved: boolean,
): Promise<{ confirmation: string }> {
  return request(`/workspaces/${id}/confirm-spec`, {
    method: "POST",
    body: JSON.stringify({ loopId, approved }),
  });
}

export function startDisambiguation(
  id: string,
  targetMap: string,
  snippet: string,
): Promise<Session> {
  return request(`/workspaces/${id}/disambiguate`, {
    method: "POST",
    body: JSON.stringify({ targetMap, snippet }),
  });
}

export function getSession(sessionId: string): Promise<Session> {
  return request(`/sessions/${sessionId}`);
}

export function answerSession(
  sessionId: string,
  choice: "existing" | "new",
): Promise<Session> {
  return request(`/sessions/${sessionId}/answer`, {
    method: "POST",
    body: JSON.stringify({ choice }),
  });
}
