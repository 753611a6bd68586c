/** Single-page application wiring: workspace → analysis → synthesis →
 * interactive insertion. All state transitions happen server-side; this
 * file only sends user input and renders what comes back.
 */

import {
  ApiError,
  answerSession,
  confirmSpec,
  createWorkspace,
  getOverlaps,
  startDisambiguation,
  synthesize,
  type LoopOutcome,
  type Session,
  type Workspace,
} from "./api.js";
import {
  clear,
  el,
  renderDiagnostics,
  renderError,
  renderLoopOutcome,
  renderOverlapReport,
  renderProgress,
  renderQuestion,
  renderResult,
} from "./ui.js";

interface AppState {
  workspace: Workspace | null;
  loop: LoopOutcome | null;
  session: Session | null;
}

export function mountApp(root: HTMLElement): AppState {
  const state: AppState = { workspace: null, loop: null, session: null };

  root.appendChild(el("h1", "", "routelens"));

  // --- workspace screen ---------------------------------------------------
  const wsSection = el("section", "screen workspace-screen");
  wsSection.appendChild(el("h2", "", "1. Load a configuration"));
  const configInput = el("textarea", "config-input");
  configInput.id = "config-input";
  configInput.rows = 12;
  const loadBtn = el("button", "load", "Create workspace");
  loadBtn.id = "create-workspace";
  const wsOut = el("div", "workspace-output");
  wsSection.append(configInput, loadBtn, wsOut);

  const trivialToggle = el("input");
  trivialToggle.type = "checkbox";
  trivialToggle.id = "include-trivial";
  trivialToggle.checked = true;
  const toggleLabel = el("label", "", " include trivial subset pairs");
  toggleLabel.htmlFor = trivialToggle.id;
  const censusOut = el("div", "census-output");
  wsSection.append(trivialToggle, toggleLabel, censusOut);

  // --- synthesis screen ---------------------------------------------------
  const synthSection = el("section", "screen synthesis-screen");
  synthSection.appendChild(el("h2", "", "2. Synthesize a stanza"));
  const intentInput = el("textarea", "intent-input");
  intentInput.id = "intent-input";
  intentInput.rows = 2;
  const fixturesInput = el("textarea", "fixtures-input");
  fixturesInput.id = "fixtures-input";
  fixturesInput.rows = 4;
  fixturesInput.placeholder = "generator fixtures (JSON)";
  const synthBtn = el("button", "synthesize", "Generate and verify");
  synthBtn.id = "run-synthesis";
  const synthOut = el("div", "synthesis-output");
  synthSection.append(intentInput, fixturesInput, synthBtn, synthOut);

  // --- insertion screen ---------------------------------------------------
  const insertSection = el("section", "screen insertion-screen");
  insertSection.appendChild(el("h2", "", "3. Insert into a route-map"));
  const mapInput = el("input", "map-input");
  mapInput.id = "map-input";
  mapInput.placeholder = "target route-map name";
  const snippetInput = el("textarea", "snippet-input");
  snippetInput.id = "snippet-input";
  snippetInput.rows = 6;
  const insertBtn = el("button", "insert", "Start insertion");
  insertBtn.id = "start-insertion";
  const sessionOut = el("div", "session-output");
  insertSection.append(mapInput, snippetInput, insertBtn, sessionOut);

  root.append(wsSection, synthSection, insertSection);

  function showError(target: HTMLElement, err: unknown): void {
    clear(target);
    const message =
      err instanceof ApiError
        ? err.message
        : err instanceof Error
          ? err.message
          : String(err);
    target.appendChild(renderError(message));
  }

  async function refreshCensus(): Promise<void> {
    if (!state.workspace) return;
    const report = await getOverlaps(state.workspace.id, trivialToggle.checked);
    clear(censusOut);
    censusOut.appendChild(renderOverlapReport(report));
  }

  loadBtn.addEventListener("click", async () => {
    try {
      state.workspace = await createWorkspace(configInput.value);
      clear(wsOut);
      wsOut.appendChild(
        el("p", "workspace-id", `Workspace ${state.workspace.id}`),
      );
      wsOut.appendChild(renderDiagnostics(state.workspace.diagnostics));
      await refreshCensus();
    } catch (err) {
      showError(wsOut, err);
    }
  });

  trivialToggle.addEventListener("change", () => {
    refreshCensus().catch((err) => showError(censusOut, err));
  });

  synthBtn.addEventListener("click", async () => {
    if (!state.workspace) {
      showError(synthOut, "Create a workspace first.");
      return;
    }
    try {
      state.loop = await synthesize(state.workspace.id, intentInput.value, {
        kind: "scripted",
        fixtures: JSON.parse(fixturesInput.value || "[]"),
      });
      clear(synthOut);
      synthOut.appendChild(
        renderLoopOutcome(state.loop, async (approved) => {
          if (!state.workspace || !state.loop) return;
          try {
            const res = await confirmSpec(
              state.workspace.id,
              state.loop.loopId,
              approved,
            );
            synthOut.appendChild(
              el("p", "confirmation", `Contract ${res.confirmation}.`),
            );
            if (approved && state.loop.snippet) {
              snippetInput.value = state.loop.snippet;
            }
          } catch (err) {
            showError(synthOut, err);
          }
        }),
      );
    } catch (err) {
      showError(synthOut, err);
    }
  });

  function renderSession(session: Session): void {
    state.session = session;
    clear(sessionOut);
    sessionOut.appendChild(renderProgress(session));
    if (session.state === "done") {
      sessionOut.appendChild(renderResult(session));
      return;
    }
    if (session.pendingQuestion) {
      sessionOut.appendChild(
        renderQuestion(session.pendingQuestion, async (choice) => {
          try {
            renderSession(await answerSession(session.sessionId, choice));
          } catch (err) {
            showError(sessionOut, err);
          }
        }),
      );
    }
  }

  insertBtn.addEventListener("click", async () => {
    if (!state.workspace) {
      showError(sessionOut, "Create a workspace first.");
      return;
    }
    try {
      renderSession(
        await startDisambiguation(
          state.workspace.id,
          mapInput.value,
          snippetInput.value,
        ),
      );
    } catch (err) {
      showError(sessionOut, err);
    }
  });

  return state;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mountApp(document.getElementById("app") as HTMLElement);
}
