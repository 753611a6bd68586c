/** DOM rendering helpers. These are display-only: every verdict, witness,
 * overlap pair, and diff shown here is taken verbatim from an API payload.
 */

import type {
  OverlapReport,
  Question,
  RouteAttrs,
  Session,
  LoopOutcome,
} from "./api.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

const WITNESS_ROWS: [keyof RouteAttrs, string][] = [
  ["network", "Network"],
  ["asPath", "AS path"],
  ["communities", "Communities"],
  ["localPref", "Local preference"],
  ["med", "Metric"],
  ["nextHop", "Next hop"],
  ["tag", "Tag"],
  ["weight", "Weight"],
];

export function renderWitnessTable(witness: RouteAttrs): HTMLTableElement {
  const table = el("table", "witness-table");
  for (const [key, label] of WITNESS_ROWS) {
    const row = el("tr");
    row.appendChild(el("th", "", label));
    const value = witness[key];
    row.appendChild(
      el("td", "", Array.isArray(value) ? value.join(" ") : String(value)),
    );
    table.appendChild(row);
  }
  return table;
}

export function renderQuestion(
  question: Question,
  onChoice: (choice: "existing" | "new") => void,
): HTMLElement {
  const box = el("section", "question");
  box.appendChild(
    el("p", "question-lead", "For a route with the following attributes:"),
  );
  box.appendChild(renderWitnessTable(question.witness));
  box.appendChild(el("p", "", "which behavior do you want?"));

  const options = el("div", "options");
  // option 1 is always the new stanza's behavior, option 2 the existing one
  const cards: ["new" | "existing", string, string][] = [
    ["new", "OPTION 1", question.optionNew.rendered],
    ["existing", "OPTION 2", question.optionExisting.rendered],
  ];
  for (const [choice, title, rendered] of cards) {
    const card = el("div", `option-card option-${choice}`);
    card.appendChild(el("h3", "", title));
    card.appendChild(el("pre", "verdict", rendered));
    const btn = el("button", "choose", `Choose ${title.toLowerCase()}`);
    btn.dataset.choice = choice;
    btn.addEventListener("click", () => onChoice(choice));
    card.appendChild(btn);
    options.appendChild(card);
  }
  box.appendChild(options);
  return box;
}

export function renderProgress(session: Session): HTMLElement {
  const p = el("p", "progress");
  p.textContent = `Questions asked: ${session.questionsAsked} of at most ${session.questionBound}`;
  return p;
}

export function renderResult(session: Session): HTMLElement {
  const box = el("section", "result");
  box.appendChild(el("h3", "", "Insertion complete"));
  if (session.result) {
    const diff = el("pre", "diff", session.result.diff);
    box.appendChild(diff);
    box.appendChild(el("h4", "", "Resulting configuration"));
    box.appendChild(el("pre", "config-text", session.result.configText));
  }
  return box;
}

export function renderOverlapReport(report: OverlapReport): HTMLElement {
  const box = el("section", "overlaps");
  if (report.pairs.length === 0 && report.inconclusive.length === 0) {
    box.appendChild(el("p", "", "No overlapping or conflicting pairs."));
    return box;
  }
  const table = el("table", "overlap-table");
  const head = el("tr");
  for (const h of ["Policy", "Rule A", "Rule B", "Kind", "Trivial subset"]) {
    head.appendChild(el("th", "", h));
  }
  table.appendChild(head);
  for (const pair of report.pairs) {
    const row = el("tr", `kind-${pair.kind}`);
    row.appendChild(el("td", "", pair.policy));
    row.appendChild(el("td", "", String(pair.seqA)));
    row.appendChild(el("td", "", String(pair.seqB)));
    row.appendChild(el("td", "", pair.kind));
    row.appendChild(el("td", "", pair.trivialSubset ? "yes" : "no"));
    table.appendChild(row);
  }
  box.appendChild(table);
  for (const [policy, a, b] of report.inconclusive) {
    box.appendChild(
      el("p", "inconclusive", `Analysis undecided for ${policy} ${a}/${b}.`),
    );
  }
  return box;
}

export function renderLoopOutcome(
  outcome: LoopOutcome,
  onConfirm: (approved: boolean) => void,
): HTMLElement {
  const box = el("section", "synthesis");
  box.appendChild(
    el("p", "loop-status", `Status: ${outcome.status} (attempts: ${outcome.attempts})`),
  );
  for (const [i, entry] of outcome.history.entries()) {
    const att = el("details", "attempt");
    att.appendChild(el("summary", "", `Rejected attempt ${i + 1}`));
    att.appendChild(el("pre", "", entry.snippet));
    att.appendChild(el("p", "feedback", entry.feedback));
    box.appendChild(att);
  }
  if (outcome.status === "verified" && outcome.snippet && outcome.spec) {
    box.appendChild(el("h4", "", "Behavior contract"));
    box.appendChild(el("pre", "spec", JSON.stringify(outcome.spec, null, 2)));
    box.appendChild(el("h4", "", "Verified snippet"));
    box.appendChild(el("pre", "snippet", outcome.snippet));
    const approve = el("button", "approve", "Approve contract");
    approve.addEventListener("click", () => onConfirm(true));
    const reject = el("button", "reject", "Reject contract");
    reject.addEventListener("click", () => onConfirm(false));
    box.appendChild(approve);
    box.appendChild(reject);
  } else if (outcome.status !== "verified") {
    box.appendChild(el("p", "feedback", outcome.lastFeedback));
  }
  return box;
}

export function renderDiagnostics(diagnostics: string[]): HTMLElement {
  const box = el("section", "diagnostics");
  if (diagnostics.length === 0) {
    box.appendChild(el("p", "ok", "Configuration parsed cleanly."));
  }
  for (const d of diagnostics) {
    box.appendChild(el("p", "diagnostic", d));
  }
  return box;
}

export function renderError(message: string): HTMLElement {
  return el("p", "error", message);
}
