/** DOM wiring for the teaching UI. All model numbers rendered here come
 * straight from service payloads; the only client-side computation is the
 * lexicon heatmap (documented sigmoid over a 2-feature slice). */

import { ApiClient } from "./api.js";
import {
  FEATURE_NAMES,
  heatmap,
  weightBars,
} from "./lexicon.js";
import type { Action } from "./phase.js";
import { distributionBars, drawScene } from "./render.js";
import { SessionController } from "./session.js";
import type { LexiconWordView } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const client = new ApiClient("");
const controller = new SessionController(client);

const arenaCanvas = $<HTMLCanvasElement>("arena");
const heatCanvas = $<HTMLCanvasElement>("heatmap");
let selectedWord: LexiconWordView | null = null;
let autoRun = false;

const BUTTON_ACTIONS: Array<[string, Action]> = [
  ["btn-new", "newSession"],
  ["btn-utter", "utter"],
  ["btn-step", "step"],
  ["btn-yes", "feedback"],
  ["btn-no", "feedback"],
];

function renderSession(): void {
  for (const [id, action] of BUTTON_ACTIONS) {
    $<HTMLButtonElement>(id).disabled = !controller.can(action);
  }
  $<HTMLButtonElement>("btn-auto").disabled = controller.state === null;
  $("notice").textContent = controller.notice ?? "";
  $("retry-banner").style.display = controller.retryBanner ? "block" : "none";

  const state = controller.state;
  if (state === null) return;
  $("phase").textContent = `${state.phase} · episode ${state.episode_count}`;
  $("utterance-echo").textContent = state.utterance
    ? `"${state.utterance.text}" → [${state.utterance.tokens.join(", ")}]`
    : "";

  const ctx = arenaCanvas.getContext("2d");
  if (ctx) drawScene(ctx, state, arenaCanvas.width, arenaCanvas.height);

  const bars = distributionBars(state);
  $("bars").innerHTML = bars
    .map(
      (bar) => `
      <div class="bar-row${bar.committed ? " committed" : ""}">
        <span class="bar-label">obj ${bar.objectId}</span>
        <div class="bar-track"><div class="bar-fill" style="width:${(bar.normalized * 100).toFixed(1)}%"></div></div>
        <span class="bar-value">${bar.normalized.toFixed(3)} (raw ${bar.raw.toFixed(3)})</span>
      </div>`,
    )
    .join("");
  $("ledger").textContent = state.ledger_tail
    .map((event) => JSON.stringify(event))
    .join("\n");
}

async function refreshLexicon(): Promise<void> {
  try {
    const index = await client.lexiconIndex();
    $("word-list").innerHTML = index.words
      .map(
        (w) =>
          `<button class="word" data-word="${w.token}">${w.token} <small>+${w.pos_count}/−${w.neg_count}</small></button>`,
      )
      .join("");
    for (const el of Array.from(document.querySelectorAll<HTMLButtonElement>(".word"))) {
      el.addEventListener("click", () => void selectWord(el.dataset["word"] ?? ""));
    }
    if (selectedWord) await selectWord(selectedWord.token);
  } catch {
    $("lexicon-notice").textContent = "lexicon unavailable";
  }
}

async function selectWord(token: string): Promise<void> {
  if (!token) return;
  try {
    selectedWord = await client.lexiconWord(token);
    $("lexicon-notice").textContent = "";
  } catch {
    selectedWord = null;
    $("lexicon-notice").textContent = `no data for "${token}"`;
    $("weight-bars").innerHTML = "";
    return;
  }
  renderWord();
}

function renderWord(): void {
  const word = selectedWord;
  if (!word) return;
  $("word-title").textContent = `${word.token} (+${word.pos_count}/−${word.neg_count}, bias ${word.bias.toFixed(4)})`;
  const bars = weightBars(word);
  const maxAbs = Math.max(1e-9, ...bars.map((b) => Math.abs(b.value)));
  $("weight-bars").innerHTML = bars
    .map((bar) => {
      const pct = (Math.abs(bar.value) / maxAbs) * 50;
      const side = bar.value >= 0 ? "pos" : "neg";
      return `
      <div class="bar-row">
        <span class="bar-label">${bar.name}</span>
        <div class="bar-track weight ${side}">
          <div class="bar-fill" style="width:${pct.toFixed(1)}%"></div>
        </div>
        <span class="bar-value" data-weight="${bar.value}">${bar.value.toFixed(4)}</span>
      </div>`;
    })
    .join("");
  renderHeatmap();
}

function renderHeatmap(): void {
  const word = selectedWord;
  const ctx = heatCanvas.getContext("2d");
  if (!word || !ctx) return;
  const fi = Number($<HTMLSelectElement>("axis-i").value);
  const fj = Number($<HTMLSelectElement>("axis-j").value);
  if (fi === fj) {
    $("lexicon-notice").textContent = "pick two different features";
    return;
  }
  const map = heatmap(word, fi, fj);
  const n = map.values.length;
  const cw = heatCanvas.width / n;
  const ch = heatCanvas.height / n;
  for (let row = 0; row < n; row++) {
    for (let col = 0; col < n; col++) {
      const v = map.values[row][col];
      // low response → blue, high → red
      const r = Math.round(255 * v);
      const b = Math.round(255 * (1 - v));
      ctx.fillStyle = `rgb(${r}, 60, ${b})`;
      // rows index featureI (x axis), columns featureJ (y axis, up)
      ctx.fillRect(row * cw, heatCanvas.height - (col + 1) * ch, cw, ch);
    }
  }
  $("heat-caption").textContent =
    `${FEATURE_NAMES[fi]} (→) × ${FEATURE_NAMES[fj]} (↑), others at baseline`;
}

function wire(): void {
  for (const selectId of ["axis-i", "axis-j"]) {
    const sel = $<HTMLSelectElement>(selectId);
    sel.innerHTML = FEATURE_NAMES.map((name, i) => `<option value="${i}">${name}</option>`).join("");
    // slice changes re-render from cached weights, no service round-trip
    sel.addEventListener("change", renderHeatmap);
  }
  $<HTMLSelectElement>("axis-i").value = "0"; // size
  $<HTMLSelectElement>("axis-j").value = "3"; // intensity

  $("btn-new").addEventListener("click", () => {
    void (async () => {
      const seed = Number($<HTMLInputElement>("seed").value) || 0;
      const frame = $<HTMLSelectElement>("frame").value as "speaker" | "agent";
      await controller.newSession(seed, frame);
      renderSession();
    })();
  });
  $("btn-utter").addEventListener("click", () => {
    void (async () => {
      await controller.utter($<HTMLInputElement>("utterance").value);
      renderSession();
      if (autoRun) {
        await controller.stepToCommit();
        renderSession();
      }
    })();
  });
  $("btn-step").addEventListener("click", () => {
    void controller.step().then(renderSession);
  });
  const sendFeedback = (sign: 1 | -1) =>
    void (async () => {
      await controller.feedback(sign);
      renderSession();
      await refreshLexicon();
    })();
  $("btn-yes").addEventListener("click", () => sendFeedback(1));
  $("btn-no").addEventListener("click", () => sendFeedback(-1));
  $<HTMLButtonElement>("btn-auto").addEventListener("click", (ev) => {
    autoRun = !autoRun;
    (ev.currentTarget as HTMLButtonElement).textContent = `auto-run: ${autoRun ? "on" : "off"}`;
  });

  renderSession();
  void refreshLexicon();
}

wire();
