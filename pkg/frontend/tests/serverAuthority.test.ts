/** Proof that the UI never computes verdicts itself: everything it shows
 * is traceable to a recorded API response, and when the mock server
 * returns deliberately absurd verdicts the UI repeats them verbatim.
 */

import { readFileSync, readdirSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { mountApp } from "../src/app.js";
import {
  createMockServer,
  makeQuestion,
  pendingSession,
  MockServer,
  WALKTHROUGH_CONFIG,
  WALKTHROUGH_SNIPPET,
} from "./mockServer.js";

const SRC_DIR = join(dirname(fileURLToPath(import.meta.url)), "..", "src");

let server: MockServer;
let root: HTMLElement;

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

function mount(s: MockServer): void {
  s.install();
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app") as HTMLElement;
  mountApp(root);
}

async function runToQuestion(): Promise<void> {
  (root.querySelector("#config-input") as HTMLTextAreaElement).value =
    WALKTHROUGH_CONFIG;
  (root.querySelector("#create-workspace") as HTMLElement).click();
  await flush();
  (root.querySelector("#map-input") as HTMLInputElement).value = "ISP_OUT";
  (root.querySelector("#snippet-input") as HTMLTextAreaElement).value =
    WALKTHROUGH_SNIPPET;
  (root.querySelector("#start-insertion") as HTMLElement).click();
  await flush();
}

afterEach(() => server?.uninstall());

describe("server authority over verdicts", () => {
  beforeEach(() => {
    server = createMockServer();
    mount(server);
  });

  it("every rendered verdict string appears in a recorded response", async () => {
    await runToQuestion();
    (root.querySelector('button.choose[data-choice="new"]') as HTMLElement).click();
    await flush();

    const wire = JSON.stringify(server.responses);
    for (const verdict of root.querySelectorAll(".verdict, .diff, .config-text")) {
      expect(wire).toContain(JSON.stringify(verdict.textContent).slice(1, -1));
    }
  });

  it("requests carry only user input, never verdicts or positions", async () => {
    await runToQuestion();
    (root.querySelector('button.choose[data-choice="new"]') as HTMLElement).click();
    await flush();

    const sentKeys = new Set(
      server.calls.flatMap((c) => (c.body ? Object.keys(c.body) : [])),
    );
    expect([...sentKeys].sort()).toEqual(["choice", "configText", "snippet", "targetMap"]);
    const answer = server.calls.find((c) => c.url.endsWith("/answer"));
    expect(answer?.body).toEqual({ choice: "new" });
  });
});

describe("verbatim display of swapped verdicts", () => {
  it("repeats absurd server-rendered options without reinterpretation", async () => {
    const absurd = makeQuestion({
      optionNew: { action: "deny", rendered: "ACTION: frobnicate the flux" },
      optionExisting: { action: "permit", rendered: "ACTION: reticulate splines" },
    });
    server = createMockServer([
      [
        /^\/workspaces\/[^/]+\/disambiguate$/,
        "POST",
        () => ({ status: 201, body: pendingSession(absurd) }),
      ],
    ]);
    mount(server);
    await runToQuestion();

    const cards = root.querySelectorAll(".option-card .verdict");
    // OPTION 1 is whatever the server sent as the new behavior — even
    // nonsense — proving the client does not evaluate anything locally
    expect(cards[0]?.textContent).toBe("ACTION: frobnicate the flux");
    expect(cards[1]?.textContent).toBe("ACTION: reticulate splines");
  });
});

describe("static guarantees", () => {
  it("only api.ts mentions fetch, and no source evaluates policies", () => {
    const sources = readdirSync(SRC_DIR).filter((f) => f.endsWith(".ts"));
    expect(sources.length).toBeGreaterThanOrEqual(3);
    for (const name of sources) {
      const text = readFileSync(join(SRC_DIR, name), "utf-8");
      if (name !== "api.ts") {
        expect(text, name).not.toMatch(/\bfetch\s*\(/);
      }
      // no local policy evaluation machinery of any kind
      expect(text, name).not.toMatch(/first[-_ ]?match|evaluate|stanzaVerdict/i);
    }
  });
});
