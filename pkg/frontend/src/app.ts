// Two-pane questionnaire shell. Left pane carries the dialog; the right
// pane is the recommendation view and stays empty until a terminal state.
// All prompts and diagnostic strings are rendered via textContent from
// server responses, never interpolated into markup.

import type { SessionResult } from "./api.js";
import type { FlowController } from "./state.js";

const DISCLAIMER =
  "This tool is a teaching aid, not medical advice; consult a clinician.";

const NO_MATCH_MESSAGE =
  "No condition in the knowledge base matched the reported symptoms.";

interface Refs {
  question: HTMLParagraphElement;
  yesBtn: HTMLButtonElement;
  noBtn: HTMLButtonElement;
  restartBtn: HTMLButtonElement;
  statusLine: HTMLParagraphElement;
  transcript: HTMLOListElement;
  recommendation: HTMLDivElement;
}

export function mount(root: HTMLElement, controller: FlowController): void {
  root.innerHTML = `
    <header class="banner" id="disclaimer"></header>
    <main class="panes">
      <section class="pane" id="interactive-pane" aria-live="polite">
        <h2>Screening questions</h2>
        <p id="question" hidden></p>
        <div class="controls">
          <button id="yes-btn" type="button" hidden>Yes</button>
          <button id="no-btn" type="button" hidden>No</button>
          <button id="restart-btn" type="button" hidden></button>
        </div>
        <p id="status-line" hidden></p>
        <ol id="transcript"></ol>
      </section>
      <section class="pane" id="recommendation-pane">
        <h2>Recommendation</h2>
        <div id="recommendation"></div>
      </section>
    </main>
  `;

  const byId = <T extends HTMLElement>(id: string): T =>
    root.querySelector<T>(`#${id}`) as T;

  const refs: Refs = {
    question: byId("question"),
    yesBtn: byId("yes-btn"),
    noBtn: byId("no-btn"),
    restartBtn: byId("restart-btn"),
    statusLine: byId("status-line"),
    transcript: byId("transcript"),
    recommendation: byId("recommendation"),
  };

  byId("disclaimer").textContent = DISCLAIMER;

  refs.yesBtn.addEventListener("click", () => void controller.answer("yes"));
  refs.noBtn.addEventListener("click", () => void controller.answer("no"));
  refs.restartBtn.addEventListener("click", () => void controller.restart());

  controller.subscribe(() => render(refs, controller));
  render(refs, controller);
}

function render(refs: Refs, controller: FlowController): void {
  const { phase, busy } = controller;

  const asking = phase.kind === "asking";
  refs.question.hidden = !asking;
  refs.question.textContent = asking ? phase.prompt : "";
  refs.yesBtn.hidden = !asking;
  refs.noBtn.hidden = !asking;
  refs.yesBtn.disabled = busy;
  refs.noBtn.disabled = busy;

  const terminal = phase.kind === "result" || phase.kind === "error";
  refs.restartBtn.hidden = !terminal;
  refs.restartBtn.disabled = busy;
  refs.restartBtn.textContent = phase.kind === "error" ? "Try again" : "Start over";

  if (phase.kind === "error") {
    refs.statusLine.hidden = false;
    refs.statusLine.className = "error";
    refs.statusLine.textContent = `Something went wrong: ${phase.message}`;
  } else if (phase.kind === "idle" && busy) {
    refs.statusLine.hidden = false;
    refs.statusLine.className = "info";
    refs.statusLine.textContent = "Contacting the screening service…";
  } else {
    refs.statusLine.hidden = true;
    refs.statusLine.textContent = "";
  }

  renderTranscript(refs.transcript, controller);
  renderRecommendation(refs.recommendation, phase.kind === "result" ? phase.result : null);
}

function renderTranscript(list: HTMLOListElement, controller: FlowController): void {
  list.replaceChildren();
  for (const row of controller.transcript) {
    const item = document.createElement("li");
    const prompt = document.createElement("span");
    prompt.className = "q";
    prompt.textContent = row.prompt;
    const answer = document.createElement("span");
    answer.className = "a";
    answer.textContent = row.answer;
    item.append(prompt, answer);
    list.appendChild(item);
  }
}

function renderRecommendation(pane: HTMLDivElement, result: SessionResult | null): void {
  pane.replaceChildren();
  if (result === null) return;

  if (result.diagnoses.length === 0) {
    const message = document.createElement("p");
    message.className = "no-match";
    message.textContent = NO_MATCH_MESSAGE;
    pane.appendChild(message);
    return;
  }

  for (const diagnosis of result.diagnoses) {
    const card = document.createElement("article");
    card.className = "diagnosis";
    const heading = document.createElement("h3");
    heading.textContent = diagnosis.diagnosis;
    card.appendChild(heading);
    if (diagnosis.tests) {
      const tests = document.createElement("p");
      tests.textContent = `Tests: ${diagnosis.tests}`;
      card.appendChild(tests);
    }
    if (diagnosis.treatments) {
      const treatments = document.createElement("p");
      treatments.textContent = `Treatment: ${diagnosis.treatments}`;
      card.appendChild(treatments);
    }
    pane.appendChild(card);
  }
}
