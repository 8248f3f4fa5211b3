import type { ApiClient } from "../api.js";
import type { FeatureDef, QuestionCase } from "../types.js";

export const CHOICE_LABELS: Record<string, string> = {
  prioritize_a: "Prioritize case A",
  prioritize_b: "Prioritize case B",
  equal: "Equally risky",
  not_comfortable: "Not comfortable comparing",
  no_opinion: "No opinion",
};

export interface CaseCardOptions {
  /** Stage rule: prediction banners stay hidden until the protocol reveals them. */
  showPrediction: boolean;
  /** When present, rows whose values differ from this case are highlighted. */
  other?: QuestionCase;
}

export function caseCard(
  features: FeatureDef[],
  subject: QuestionCase,
  options: CaseCardOptions,
): HTMLElement {
  const card = document.createElement("article");
  card.className = "case-card";
  card.dataset.caseId = subject.id;

  const heading = document.createElement("h3");
  heading.textContent = subject.id;
  card.appendChild(heading);

  if (options.showPrediction && subject.prediction !== null) {
    const banner = document.createElement("div");
    banner.className = `prediction-banner pred-${subject.prediction}`;
    banner.textContent =
      subject.prediction === "high" ? "Predicted: HIGH RISK" : "Predicted: LOW RISK";
    card.appendChild(banner);
  }

  const table = document.createElement("table");
  table.className = "feature-table";
  for (const feature of features) {
    const row = document.createElement("tr");
    row.className = "feature-row";
    row.dataset.feature = feature.name;
    if (options.other && options.other.values[feature.name] !== subject.values[feature.name]) {
      row.classList.add("differs");
    }
    const label = document.createElement("th");
    label.textContent = feature.name.replace(/_/g, " ");
    label.title = feature.description;
    row.appendChild(label);
    const value = document.createElement("td");
    value.textContent = subject.values[feature.name] ?? "";
    row.appendChild(value);
    table.appendChild(row);
  }
  card.appendChild(table);
  return card;
}

export interface ChoiceBarOptions {
  /** Absent handler renders the buttons disabled (browse-only mode). */
  onAnswer?: (choice: string, rationale: string) => void;
}

export function choiceBar(choices: string[], options: ChoiceBarOptions): HTMLElement {
  const bar = document.createElement("div");
  bar.className = "choice-bar";

  const rationale = document.createElement("textarea");
  rationale.className = "rationale";
  rationale.placeholder = "Why? (optional)";
  rationale.rows = 2;

  const buttons = document.createElement("div");
  buttons.className = "choice-buttons";
  for (const choice of choices) {
    const button = document.createElement("button");
    button.className = "choice-btn";
    button.dataset.choice = choice;
    button.textContent = CHOICE_LABELS[choice] ?? choice;
    if (options.onAnswer) {
      button.addEventListener("click", () => {
        options.onAnswer?.(choice, rationale.value);
        rationale.value = "";
      });
    } else {
      button.disabled = true;
    }
    buttons.appendChild(button);
  }
  bar.appendChild(buttons);
  bar.appendChild(rationale);
  return bar;
}

export interface CaseViewDeps {
  api: ApiClient;
  datasetId: string;
}

/**
 * Standalone case-by-case browser: pick any two cases, see their feature
 * rows with differences highlighted, predictions shown.  Judgments are only
 * recorded inside a session, so the response buttons stay disabled here.
 */
export async function renderCaseView(root: HTMLElement, deps: CaseViewDeps): Promise<void> {
  const dataset = await deps.api.getDataset(deps.datasetId);
  const features = dataset.schema.features;
  const cases = dataset.cases;

  root.innerHTML = "";
  const view = document.createElement("section");
  view.className = "case-view";

  const controls = document.createElement("div");
  controls.className = "case-controls";
  const selects: HTMLSelectElement[] = [];
  for (const side of ["A", "B"] as const) {
    const label = document.createElement("label");
    label.textContent = `Case ${side} `;
    const select = document.createElement("select");
    select.className = `case-select case-select-${side.toLowerCase()}`;
    for (const entry of cases) {
      const option = document.createElement("option");
      option.value = entry.id;
      option.textContent = entry.id;
      select.appendChild(option);
    }
    label.appendChild(select);
    controls.appendChild(label);
    selects.push(select);
  }
  const [selectA, selectB] = selects as [HTMLSelectElement, HTMLSelectElement];
  if (cases.length > 1) {
    selectB.selectedIndex = 1;
  }
  view.appendChild(controls);

  const pair = document.createElement("div");
  pair.className = "case-pair";
  view.appendChild(pair);

  const hint = document.createElement("p");
  hint.className = "case-hint";
  hint.textContent = "Start a session to record pairwise judgments.";
  view.appendChild(hint);
  view.appendChild(choiceBar(Object.keys(CHOICE_LABELS), {}));

  const byId = new Map(cases.map((entry) => [entry.id, entry]));
  const redraw = () => {
    const a = byId.get(selectA.value);
    const b = byId.get(selectB.value);
    pair.innerHTML = "";
    if (!a || !b) {
      return;
    }
    pair.appendChild(caseCard(features, a, { showPrediction: true, other: b }));
    pair.appendChild(caseCard(features, b, { showPrediction: true, other: a }));
  };
  selectA.addEventListener("change", redraw);
  selectB.addEventListener("change", redraw);
  redraw();

  root.appendChild(view);
}
