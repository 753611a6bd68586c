/** A recording fetch mock that plays the role of the HTTP API.
 *
 * Every request (method, url, parsed body) and every response body is
 * recorded so tests can audit exactly what crossed the wire and prove
 * that displayed verdicts came from the server, not the client.
 */

import type { Question, Session } from "../src/api.js";

export interface RecordedCall {
  method: string;
  url: string;
  body: unknown;
}

export interface MockServer {
  calls: RecordedCall[];
  responses: unknown[];
  install(): void;
  uninstall(): void;
}

export const WALKTHROUGH_CONFIG = [
  "ip as-path access-list D0 permit _32$",
  "route-map ISP_OUT deny 10",
  " match as-path D0",
  "",
].join("\n");

export const WALKTHROUGH_SNIPPET = [
  "route-map SET_METRIC permit 10",
  " match community COM_LIST",
  " set metric 55",
  "",
].join("\n");

export const WITNESS = {
  network: "100.0.0.0/16",
  asPath: [32],
  communities: ["300:3"],
  localPref: 100,
  med: 0,
  nextHop: "0.0.0.0",
  tag: 0,
  weight: 0,
};

export const OPTION_NEW_RENDERED = [
  "ACTION: permit",
  "Network: 100.0.0.0/16",
  "Metric: 55",
].join("\n");

export const OPTION_EXISTING_RENDERED = "ACTION: deny";

export function makeQuestion(
  overrides: Partial<Question> = {},
): Question {
  return {
    seq: 10,
    witness: WITNESS,
    optionNew: { action: "permit", rendered: OPTION_NEW_RENDERED },
    optionExisting: { action: "deny", rendered: OPTION_EXISTING_RENDERED },
    ...overrides,
  };
}

export const RESULT_CONFIG_TEXT = [
  "route-map ISP_OUT permit 10",
  " match community D1",
  " set metric 55",
  "route-map ISP_OUT deny 20",
  " match as-path D0",
  "",
].join("\n");

export const RESULT_DIFF = [
  "--- before",
  "+++ after",
  "@@ -1,2 +1,5 @@",
  "+route-map ISP_OUT permit 10",
  "+ match community D1",
  "+ set metric 55",
  " route-map ISP_OUT deny 20",
  "",
].join("\n");

export function pendingSession(question: Question): Session {
  return {
    sessionId: "sess-0011aabbccdd2233",
    state: "pending",
    answers: [],
    questionsAsked: 0,
    questionBound: 2,
    pendingQuestion: question,
    position: null,
  };
}

export function doneSession(choice: string): Session {
  return {
    sessionId: "sess-0011aabbccdd2233",
    state: "done",
    answers: [{ seq: 10, choice }],
    questionsAsked: 1,
    questionBound: 2,
    pendingQuestion: null,
    position: choice === "new" ? 0 : 2,
    result: { configText: RESULT_CONFIG_TEXT, diff: RESULT_DIFF },
  };
}

export const OVERLAP_REPORT = {
  pairs: [
    {
      policy: "ISP_OUT",
      seqA: 10,
      seqB: 30,
      kind: "overlap",
      trivialSubset: false,
      witness: WITNESS,
    },
    {
      policy: "FILTER",
      seqA: 0,
      seqB: 1,
      kind: "conflicting",
      trivialSubset: true,
      witness: { srcIp: "1.1.1.1", dstIp: "2.2.2.2" },
    },
  ],
  inconclusive: [],
};

export const LOOP_OUTCOME = {
  loopId: "loop-deadbeef00112233",
  status: "verified",
  attempts: 2,
  snippet: WALKTHROUGH_SNIPPET,
  spec: {
    permit: true,
    prefix: ["100.0.0.0/16:16-23"],
    community: "/_300:3_/",
    set: { metric: 55 },
  },
  lastFeedback: "",
  history: [
    {
      snippet: "route-map SET_METRIC permit 10\n set metric 55\n",
      feedback:
        "The stanza SET_METRIC permits an input route with the following " +
        "attributes, but it should be denied: Network: 203.0.113.0/24. " +
        "Please rectify your output.",
    },
  ],
};

type Handler = (call: RecordedCall) => { status: number; body: unknown };

export function createMockServer(
  extraHandlers: [RegExp, string, Handler][] = [],
): MockServer {
  const calls: RecordedCall[] = [];
  const responses: unknown[] = [];
  let original: typeof fetch | undefined;

  const handlers: [RegExp, string, Handler][] = [
    ...extraHandlers,
    [
      /^\/workspaces$/,
      "POST",
      (call) => {
        const { configText } = call.body as { configText: string };
        if (!configText.includes("route-map")) {
          return {
            status: 422,
            body: {
              detail: {
                message: "config did not parse",
                errors: [{ line: 1, message: "unrecognized line", text: configText }],
              },
            },
          };
        }
        return { status: 201, body: { id: "ws-f00dc0ffee42", diagnostics: [] } };
      },
    ],
    [
      /^\/workspaces\/[^/]+\/overlaps\?includeTrivial=(true|false)$/,
      "GET",
      (call) => {
        const trivial = call.url.endsWith("true");
        return {
          status: 200,
          body: {
            ...OVERLAP_REPORT,
            pairs: OVERLAP_REPORT.pairs.filter(
              (p) => trivial || !p.trivialSubset,
            ),
          },
        };
      },
    ],
    [
      /^\/workspaces\/[^/]+\/synthesize$/,
      "POST",
      () => ({ status: 200, body: LOOP_OUTCOME }),
    ],
    [
      /^\/workspaces\/[^/]+\/confirm-spec$/,
      "POST",
      (call) => {
        const { approved } = call.body as { approved: boolean };
        return {
          status: 200,
          body: { confirmation: approved ? "approved" : "rejected" },
        };
      },
    ],
    [
      /^\/workspaces\/[^/]+\/disambiguate$/,
      "POST",
      () => ({ status: 201, body: pendingSession(makeQuestion()) }),
    ],
    [
      /^\/sessions\/[^/]+\/answer$/,
      "POST",
      (call) => {
        const { choice } = call.body as { choice: string };
        return { status: 200, body: doneSession(choice) };
      },
    ],
  ];

  const mockFetch = async (
    input: RequestInfo | URL,
    init?: RequestInit,
  ): Promise<Response> => {
    const url = String(input);
    const method = (init?.method ?? "GET").toUpperCase();
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    const call: RecordedCall = { method, url, body };
    calls.push(call);
    for (const [pattern, wantMethod, handler] of handlers) {
      if (wantMethod === method && pattern.test(url)) {
        const { status, body: respBody } = handler(call);
        responses.push(respBody);
        return new Response(JSON.stringify(respBody), {
          status,
          headers: { "content-type": "application/json" },
        });
      }
    }
    responses.push(null);
    return new Response(JSON.stringify({ detail: { message: "not found" } }), {
      status: 404,
      headers: { "content-type": "application/json" },
    });
  };

  return {
    calls,
    responses,
    install() {
      original = globalThis.fetch;
      globalThis.fetch = mockFetch as typeof fetch;
    },
    uninstall() {
      if (original) globalThis.fetch = original;
    },
  };
}
