import { ApiClient, ApiError } from "./api";
import { buildContexts, contextTitle, pairCount } from "./contexts";
import { formatJudgment, parseJudgmentText, positionToValue, valueToPosition, POSITION_RANGE } from "./scale";
import { ElicitationSession, JudgmentError } from "./session";
import { clearSession, loadSession, saveSession } from "./storage";
import type { ContextSpec } from "./types";

const params = new URLSearchParams(window.location.search);
const client = new ApiClient(params.get("api") ?? "http://127.0.0.1:8321");

const app = document.getElementById("app")!;

let session: ElicitationSession | null = null;
let contexts: ContextSpec[] = [];
let activeKey: string | null = null;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function boot(): void {
  app.replaceChildren(el("p", "status", "Loading signal taxonomy..."));
  client
    .taxonomy()
    .then((taxonomy) => {
      contexts = buildContexts(taxonomy);
      renderStart();
    })
    .catch((err) => {
      app.replaceChildren(
        el("p", "error", `Cannot reach the scoring service: ${err.message}`),
        button("Retry", boot),
      );
    });
}

function button(label: string, onClick: () => void, className = "btn"): HTMLButtonElement {
  const b = el("button", className, label);
  b.addEventListener("click", onClick);
  return b;
}

function renderStart(): void {
  const container = el("div", "start");
  container.append(el("h1", undefined, "Signal importance questionnaire"));
  container.append(el("p", undefined,
    "Compare telemetry signals pairwise, per component and per quantity. " +
    "Progress is saved in this browser; nothing is sent until you export."));
  const form = el("div", "start-form");
  const input = el("input");
  input.placeholder = "Expert id (e.g. operator-07)";
  const start = button("Start or resume", () => {
    const expertId = input.value.trim();
    if (!expertId) {
      input.classList.add("invalid");
      return;
    }
    const saved = loadSession(window.localStorage, expertId);
    session = saved
      ? ElicitationSession.restore(saved, contexts)
      : new ElicitationSession(expertId, contexts);
    activeKey = contexts[0]?.key ?? null;
    renderSession();
  });
  form.append(input, start);
  container.append(form);
  app.replaceChildren(container);
}

function renderSession(): void {
  if (!session) return;
  const wrap = el("div", "layout");
  wrap.append(renderNav(), renderActiveContext(), renderExport());
  app.replaceChildren(wrap);
}

function renderNav(): HTMLElement {
  const nav = el("nav", "contexts");
  nav.append(el("h2", undefined, `Expert: ${session!.expertId}`));
  for (const ctx of contexts) {
    const row = el("div", "context-link" + (ctx.key === activeKey ? " active" : ""));
    const done = session!.isComplete(ctx.key);
    const evaluation = session!.evaluation(ctx.key);
    row.append(el("span", "mark", done ? "✓" : "•"));
    row.append(el("span", "label", contextTitle(ctx)));
    if (evaluation) {
      const badge = el("span",
        "cr-badge " + (evaluation.acceptable ? "ok" : "warn"),
        `CR ${evaluation.cr.toFixed(2)}`);
      row.append(badge);
    } else if (done) {
      row.append(el("span", "cr-badge pending", "CR ..."));
    }
    row.addEventListener("click", () => {
      activeKey = ctx.key;
      renderSession();
      refreshEvaluation(ctx);
    });
    nav.append(row);
  }
  return nav;
}

function renderActiveContext(): HTMLElement {
  const panel = el("section", "panel");
  if (!activeKey) return panel;
  const ctx = session!.context(activeKey);
  panel.append(el("h2", undefined, contextTitle(ctx)));
  panel.append(el("p", "hint",
    `${session!.judgments(ctx.key).length} of ${pairCount(ctx)} comparisons entered. ` +
    "Slide toward the more important signal, or type a value (1-9 or a ratio like 1/3)."));

  for (let row = 0; row < ctx.items.length; row++) {
    for (let col = row + 1; col < ctx.items.length; col++) {
      panel.append(renderPair(ctx, row, col));
    }
  }

  const evaluation = session!.evaluation(ctx.key);
  if (evaluation && !evaluation.acceptable) {
    const triad = session!.worstTriad(ctx.key);
    const msg = triad
      ? `Consistency ratio ${evaluation.cr.toFixed(2)} exceeds 0.10. ` +
        `The judgments between ${triad[0]}, ${triad[1]} and ${triad[2]} disagree the most; consider revising them.`
      : `Consistency ratio ${evaluation.cr.toFixed(2)} exceeds 0.10.`;
    panel.append(el("p", "warning", msg));
  }
  if (evaluation) {
    const weights = el("p", "weights",
      "Provisional weights: " + evaluation.items
        .map((item, i) => `${item} ${evaluation.weights[i]!.toFixed(1)}`)
        .join(", "));
    panel.append(weights);
  }
  return panel;
}

function renderPair(ctx: ContextSpec, row: number, col: number): HTMLElement {
  const wrap = el("div", "pair");
  const current = session!.judgment(ctx.key, row, col);

  const header = el("div", "pair-items");
  header.append(el("span", "item left", ctx.items[row]!));
  header.append(el("span", "vs", "vs"));
  header.append(el("span", "item right", ctx.items[col]!));
  wrap.append(header);

  const controls = el("div", "pair-controls");
  const slider = el("input");
  slider.type = "range";
  slider.min = String(-POSITION_RANGE);
  slider.max = String(POSITION_RANGE);
  slider.step = "1";
  slider.value = String(current === undefined ? 0 : valueToPosition(current));

  const entry = el("input", "entry");
  entry.type = "text";
  entry.value = current === undefined ? "" : formatJudgment(current);
  entry.placeholder = "value";

  const errorSlot = el("span", "field-error", "");

  const commit = (value: number) => {
    try {
      session!.enterJudgment(ctx.key, row, col, value);
    } catch (e) {
      errorSlot.textContent = e instanceof JudgmentError ? e.message : String(e);
      return;
    }
    errorSlot.textContent = "";
    saveSession(window.localStorage, session!.snapshot());
    renderSession();
    refreshEvaluation(ctx);
  };

  slider.addEventListener("change", () => {
    commit(positionToValue(Number(slider.value)));
  });
  entry.addEventListener("change", () => {
    const parsed = parseJudgmentText(entry.value);
    if (parsed === null) {
      errorSlot.textContent = "enter 1-9, a decimal, or a ratio like 1/3";
      return; // no state change on invalid input
    }
    commit(parsed);
  });

  controls.append(slider, entry, errorSlot);
  wrap.append(controls);
  return wrap;
}

function refreshEvaluation(ctx: ContextSpec): void {
  if (!session!.isComplete(ctx.key) || session!.evaluation(ctx.key)) return;
  const judgments = session!.judgments(ctx.key);
  client
    .evaluateMatrix([...ctx.items], judgments)
    .then((response) => {
      // judgments may have changed while the request was in flight
      const still = session!.judgments(ctx.key);
      if (JSON.stringify(still) === JSON.stringify(judgments)) {
        session!.applyEvaluation(ctx.key, response);
        renderSession();
      }
    })
    .catch(() => {
      // badge stays pending; the next edit or click retries
    });
}

function renderExport(): HTMLElement {
  const panel = el("section", "export");
  panel.append(el("h2", undefined, "Export"));
  const gaps = session!.incompleteContexts();
  if (gaps.length > 0) {
    panel.append(el("p", "hint", "Complete every context to enable export:"));
    const list = el("ul", "gaps");
    for (const ctx of gaps) {
      list.append(el("li", undefined,
        `${contextTitle(ctx)} (${session!.judgments(ctx.key).length}/${pairCount(ctx)})`));
    }
    panel.append(list);
    return panel;
  }
  const status = el("p", "status", "");
  panel.append(
    button("Export questionnaire", () => {
      status.className = "status";
      status.textContent = "Submitting...";
      client
        .submitQuestionnaire(session!.toQuestionnaire())
        .then((accepted) => {
          status.textContent =
            `Stored as ${accepted.id}. You may revise and export again; ` +
            "identical answers keep the same id.";
        })
        .catch((err) => {
          status.className = "error";
          status.textContent = err instanceof ApiError
            ? `Server rejected the questionnaire: ${err.message}`
            : `Could not reach the server (${err.message}). Your answers are saved locally; try again.`;
        });
    }),
    status,
    button("Discard saved session", () => {
      clearSession(window.localStorage, session!.expertId);
      session = null;
      renderStart();
    }, "btn secondary"),
  );
  return panel;
}

boot();
