import type { ApiClient } from "./api.js";
import { caseCard, choiceBar } from "./views/cases.js";
import { renderGroupView } from "./views/group.js";
import { renderSimilarityView } from "./views/similarity.js";
import { svgElement } from "./charts.js";
import type {
  Criterion,
  DatasetBody,
  GroupFairnessQuestionBody,
  PairwiseQuestionBody,
  Role,
  SessionExport,
  StagePromptBody,
} from "./types.js";

export const STAGE1_PAIRS = 14;
export const STAGE1_QUESTIONS = 15;

const ROLES: Role[] = ["social_worker", "parent", "other"];

export interface WizardDeps {
  api: ApiClient;
  datasetId: string;
  dataset: DatasetBody;
  /** Resume an existing session instead of offering the start form. */
  sessionId?: string;
  onStageChange?: (stage: number | null) => void;
}

interface WizardState {
  sessionId: string | null;
  stage: number;
  closed: boolean;
  pairsAnswered: number;
  questionsAnswered: number;
}

/** Static explanatory sketch shown beside each group-fairness question. */
function criterionIllustration(criterion: Criterion): SVGSVGElement {
  const svg = svgElement("svg", {
    class: "gf-illustration",
    "data-criterion": criterion,
    viewBox: "0 0 120 60",
    width: "120",
    height: "60",
    role: "img",
  });
  const bar = (x: number, height: number, cls: string) =>
    svgElement("rect", {
      x: String(x),
      y: String(50 - height),
      width: "16",
      height: String(height),
      class: cls,
    });
  if (criterion === "unawareness") {
    svg.appendChild(bar(22, 30, "ill-bar"));
    svg.appendChild(bar(52, 30, "ill-bar"));
    svg.appendChild(bar(82, 30, "ill-bar ill-excluded"));
    svg.appendChild(
      svgElement("line", { x1: "78", y1: "16", x2: "102", y2: "54", class: "ill-cross" }),
    );
    svg.appendChild(
      svgElement("line", { x1: "102", y1: "16", x2: "78", y2: "54", class: "ill-cross" }),
    );
  } else if (criterion === "statistical_parity") {
    svg.appendChild(bar(22, 34, "ill-bar ill-group-a"));
    svg.appendChild(bar(42, 34, "ill-bar ill-group-b"));
    svg.appendChild(bar(72, 20, "ill-bar ill-group-a"));
    svg.appendChild(bar(92, 34, "ill-bar ill-group-b ill-gap"));
  } else {
    svg.appendChild(bar(18, 18, "ill-bar ill-group-a"));
    svg.appendChild(bar(38, 18, "ill-bar ill-group-b"));
    svg.appendChild(bar(70, 14, "ill-bar ill-group-a"));
    svg.appendChild(bar(90, 32, "ill-bar ill-group-b ill-gap"));
  }
  svg.appendChild(
    svgElement("line", { x1: "8", y1: "50", x2: "112", y2: "50", class: "ill-axis" }),
  );
  return svg;
}

function countStage1Answers(log: SessionExport): { pairs: number; questions: number } {
  let pairs = 0;
  let questions = 0;
  for (const event of log.session.transcript) {
    if (event.kind !== "response") {
      continue;
    }
    const questionId = String(event.payload.question_id ?? "");
    if (questionId.startsWith("s1-pair-")) {
      pairs += 1;
    } else if (questionId.startsWith("s1-gf-")) {
      questions += 1;
    }
  }
  return { pairs, questions };
}

/**
 * The staged elicitation wizard.  The server owns every state transition:
 * the wizard renders what `next` serves, posts answers and exploration
 * events, and can rebuild itself from the session id alone after a reload.
 */
export class Wizard {
  private readonly deps: WizardDeps;
  private readonly root: HTMLElement;
  private state: WizardState = {
    sessionId: null,
    stage: 0,
    closed: false,
    pairsAnswered: 0,
    questionsAnswered: 0,
  };

  constructor(root: HTMLElement, deps: WizardDeps) {
    this.root = root;
    this.deps = deps;
  }

  async mount(): Promise<void> {
    if (this.deps.sessionId) {
      await this.resume(this.deps.sessionId);
    } else {
      this.renderStartForm();
    }
  }

  /** Rebuild stage and progress from the server transcript (source of truth). */
  async resume(sessionId: string): Promise<void> {
    const log = await this.deps.api.exportSession(sessionId);
    const counts = countStage1Answers(log);
    this.state = {
      sessionId,
      stage: log.session.stage,
      closed: log.session.closed_at !== null,
      pairsAnswered: counts.pairs,
      questionsAnswered: counts.questions,
    };
    this.deps.onStageChange?.(this.state.closed ? null : this.state.stage);
    await this.renderStage();
  }

  private renderStartForm(): void {
    this.root.innerHTML = "";
    const form = document.createElement("div");
    form.className = "wizard-start";

    const heading = document.createElement("h2");
    heading.textContent = "Start an elicitation session";
    form.appendChild(heading);

    const roleSelect = document.createElement("select");
    roleSelect.className = "role-select";
    for (const role of ROLES) {
      const option = document.createElement("option");
      option.value = role;
      option.textContent = role.replace(/_/g, " ");
      roleSelect.appendChild(option);
    }
    const roleLabel = document.createElement("label");
    roleLabel.textContent = "Your role ";
    roleLabel.appendChild(roleSelect);
    form.appendChild(roleLabel);

    const sessionInput = document.createElement("input");
    sessionInput.type = "text";
    sessionInput.className = "session-id-input";
    sessionInput.placeholder = "session id (optional)";
    form.appendChild(sessionInput);

    const seedInput = document.createElement("input");
    seedInput.type = "number";
    seedInput.className = "seed-input";
    seedInput.value = "1";
    form.appendChild(seedInput);

    const start = document.createElement("button");
    start.className = "start-btn";
    start.textContent = "Begin";
    start.addEventListener("click", () => {
      void (async () => {
        const created = await this.deps.api.createSession({
          dataset: this.deps.datasetId,
          seed: Number(seedInput.value),
          role: roleSelect.value as Role,
          ...(sessionInput.value !== "" ? { sessionId: sessionInput.value } : {}),
        });
        this.state = {
          sessionId: created.id,
          stage: created.stage,
          closed: false,
          pairsAnswered: 0,
          questionsAnswered: 0,
        };
        this.deps.onStageChange?.(this.state.stage);
        await this.renderStage();
      })();
    });
    form.appendChild(start);
    this.root.appendChild(form);
  }

  private header(): HTMLElement {
    const header = document.createElement("div");
    header.className = "wizard-header";
    const progress = document.createElement("span");
    progress.className = "progress";
    if (this.state.closed) {
      progress.textContent = "Session complete";
    } else if (this.state.stage === 1) {
      progress.textContent =
        `Stage 1 · Pairs ${this.state.pairsAnswered}/${STAGE1_PAIRS} · ` +
        `Questions ${this.state.questionsAnswered}/${STAGE1_QUESTIONS}`;
    } else {
      progress.textContent = `Stage ${this.state.stage} of 4`;
    }
    header.appendChild(progress);
    return header;
  }

  private async advance(): Promise<void> {
    if (!this.state.sessionId) {
      return;
    }
    const result = await this.deps.api.advance(this.state.sessionId);
    this.state.stage = result.stage;
    this.state.closed = result.closed;
    this.deps.onStageChange?.(this.state.closed ? null : this.state.stage);
    await this.renderStage();
  }

  private advanceButton(text: string): HTMLButtonElement {
    const button = document.createElement("button");
    button.className = "advance-btn";
    button.textContent = text;
    button.addEventListener("click", () => {
      void this.advance();
    });
    return button;
  }

  private async renderStage(): Promise<void> {
    this.root.innerHTML = "";
    this.root.appendChild(this.header());
    const body = document.createElement("div");
    body.className = "wizard-body";
    this.root.appendChild(body);

    if (this.state.closed) {
      await this.renderClosed(body);
      return;
    }
    if (this.state.stage <= 2) {
      await this.renderQuestionFlow(body);
    } else if (this.state.stage === 3) {
      await this.renderSimilarityStage(body);
    } else {
      await this.renderGroupStage(body);
    }
  }

  private async renderQuestionFlow(body: HTMLElement): Promise<void> {
    if (!this.state.sessionId) {
      return;
    }
    const sessionId = this.state.sessionId;
    const question = await this.deps.api.nextQuestion(sessionId);

    if (this.state.stage === 2) {
      const note = document.createElement("p");
      note.className = "stage-note";
      note.textContent =
        "The algorithm's predictions are now shown. Answer as many fresh pairs as you like.";
      body.appendChild(note);
      body.appendChild(this.advanceButton("Move on to the similarity view"));
    }

    if (question.type === "stage_prompt") {
      this.renderPrompt(body, question);
      return;
    }
    if (question.type === "pairwise") {
      this.renderPairwise(body, question);
    } else {
      this.renderGroupFairness(body, question);
    }
  }

  private renderPrompt(body: HTMLElement, prompt: StagePromptBody): void {
    const message = document.createElement("p");
    message.className = "stage-prompt";
    message.textContent = prompt.message;
    body.appendChild(message);
    if (this.state.stage !== 2) {
      body.appendChild(this.advanceButton("Continue to the next stage"));
    }
  }

  private renderPairwise(body: HTMLElement, question: PairwiseQuestionBody): void {
    const sessionId = this.state.sessionId;
    if (!sessionId) {
      return;
    }
    const prompt = document.createElement("p");
    prompt.className = "pair-prompt";
    prompt.dataset.questionId = question.id;
    prompt.textContent =
      "Which case should the screening algorithm treat as the higher risk?";
    body.appendChild(prompt);

    const pair = document.createElement("div");
    pair.className = "case-pair";
    const features = this.deps.dataset.schema.features;
    pair.appendChild(
      caseCard(features, question.case_a, {
        showPrediction: question.show_predictions,
        other: question.case_b,
      }),
    );
    pair.appendChild(
      caseCard(features, question.case_b, {
        showPrediction: question.show_predictions,
        other: question.case_a,
      }),
    );
    body.appendChild(pair);

    body.appendChild(
      choiceBar(question.choices, {
        onAnswer: (choice, rationale) => {
          void (async () => {
            await this.deps.api.respond(sessionId, question.id, choice, rationale);
            if (question.id.startsWith("s1-pair-")) {
              this.state.pairsAnswered += 1;
            }
            await this.renderStage();
          })();
        },
      }),
    );
  }

  private renderGroupFairness(body: HTMLElement, question: GroupFairnessQuestionBody): void {
    const sessionId = this.state.sessionId;
    if (!sessionId) {
      return;
    }
    body.appendChild(criterionIllustration(question.criterion));
    const text = document.createElement("p");
    text.className = "gf-text";
    text.dataset.questionId = question.id;
    text.dataset.criterion = question.criterion;
    text.textContent = question.text;
    body.appendChild(text);

    const buttons = document.createElement("div");
    buttons.className = "gf-buttons";
    for (const choice of question.choices) {
      const button = document.createElement("button");
      button.className = "gf-btn";
      button.dataset.choice = choice;
      button.textContent = choice === "no_opinion" ? "No opinion" : choice;
      button.addEventListener("click", () => {
        void (async () => {
          await this.deps.api.respond(sessionId, question.id, choice);
          this.state.questionsAnswered += 1;
          await this.renderStage();
        })();
      });
      buttons.appendChild(button);
    }
    body.appendChild(buttons);
  }

  private async renderSimilarityStage(body: HTMLElement): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) {
      return;
    }
    const prompt = document.createElement("p");
    prompt.className = "stage-prompt";
    prompt.textContent =
      "Explore how the metric groups cases: adjust weights, and flag any pair that " +
      "received different predictions but should be treated alike.";
    body.appendChild(prompt);
    body.appendChild(this.advanceButton("Move on to the group view"));

    const holder = document.createElement("div");
    body.appendChild(holder);
    await renderSimilarityView(holder, {
      api: this.deps.api,
      datasetId: this.deps.datasetId,
      dataset: this.deps.dataset,
      onWeightChange: (weights, reference) => {
        void this.deps.api.recordEvent(sessionId, {
          kind: "weight_change",
          weights,
          reference,
        });
      },
      onFlag: (caseA, caseB, note) => {
        void this.deps.api.recordEvent(sessionId, {
          kind: "similarity_flag",
          case_a: caseA,
          case_b: caseB,
          ...(note !== "" ? { note } : {}),
        });
      },
    });
  }

  private async renderGroupStage(body: HTMLElement): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) {
      return;
    }
    const prompt = document.createElement("p");
    prompt.className = "stage-prompt";
    prompt.textContent =
      "Compare the algorithm across subgroups; each chart you request is recorded.";
    body.appendChild(prompt);
    body.appendChild(this.advanceButton("Finish the session"));

    const holder = document.createElement("div");
    body.appendChild(holder);
    await renderGroupView(holder, {
      api: this.deps.api,
      datasetId: this.deps.datasetId,
      schema: this.deps.dataset.schema,
      onQuery: (attributes, metric) => {
        void this.deps.api.recordEvent(sessionId, {
          kind: "group_query",
          attributes,
          metric,
        });
      },
    });
  }

  private async renderClosed(body: HTMLElement): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) {
      return;
    }
    const log = await this.deps.api.exportSession(sessionId);
    const note = document.createElement("p");
    note.className = "closed-note";
    note.textContent = `Session ${sessionId} is complete. Thank you!`;
    body.appendChild(note);

    const json = JSON.stringify(log, null, 2);
    const download = document.createElement("a");
    download.className = "download-link";
    download.textContent = "Download session log";
    download.download = `${sessionId}.json`;
    download.href = `data:application/json;charset=utf-8,${encodeURIComponent(json)}`;
    body.appendChild(download);

    const pre = document.createElement("pre");
    pre.className = "export-pre";
    pre.textContent = json;
    body.appendChild(pre);
  }
}
