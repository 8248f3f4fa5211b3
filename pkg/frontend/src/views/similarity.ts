import type { ApiClient } from "../api.js";
import { stripPlot } from "../charts.js";
import { caseCard } from "./cases.js";
import type { DatasetBody, QuestionCase } from "../types.js";

export interface SimilarityViewDeps {
  api: ApiClient;
  datasetId: string;
  dataset: DatasetBody;
  /** Stage 3: record a weight_change event after each committed slider move. */
  onWeightChange?: (weights: number[], reference: string) => void;
  /** Stage 3: record a similarity_flag event for the opened pair. */
  onFlag?: (caseA: string, caseB: string, note: string) => void;
}

/**
 * Similarity view: the reference case pinned at the far left of a
 * one-dimensional scatter, every other case placed by server-reported
 * distance and colored by prediction.  Per-feature weight sliders re-query
 * the ranking (one request per committed change) and the dots re-render in
 * the order the server returned.  Clicking a dot opens the case next to the
 * reference for side-by-side comparison and, inside a stage-3 session,
 * flagging.
 */
export async function renderSimilarityView(
  root: HTMLElement,
  deps: SimilarityViewDeps,
): Promise<void> {
  const features = deps.dataset.schema.features;
  const byId = new Map<string, QuestionCase>(deps.dataset.cases.map((entry) => [entry.id, entry]));

  root.innerHTML = "";
  const view = document.createElement("section");
  view.className = "similarity-view";

  const controls = document.createElement("div");
  controls.className = "similarity-controls";

  const referenceLabel = document.createElement("label");
  referenceLabel.textContent = "Reference case ";
  const referenceSelect = document.createElement("select");
  referenceSelect.className = "reference-select";
  for (const entry of deps.dataset.cases) {
    const option = document.createElement("option");
    option.value = entry.id;
    option.textContent = entry.id;
    referenceSelect.appendChild(option);
  }
  referenceLabel.appendChild(referenceSelect);
  controls.appendChild(referenceLabel);

  const sliders = document.createElement("div");
  sliders.className = "weight-sliders";
  for (const feature of features) {
    const label = document.createElement("label");
    label.className = "weight-slider";
    const caption = document.createElement("span");
    caption.textContent = feature.name.replace(/_/g, " ");
    caption.title = feature.description;
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = "5";
    slider.step = "0.5";
    slider.value = "1";
    slider.dataset.feature = feature.name;
    label.appendChild(caption);
    label.appendChild(slider);
    sliders.appendChild(label);
  }
  controls.appendChild(sliders);
  view.appendChild(controls);

  const plotHolder = document.createElement("div");
  plotHolder.className = "plot-holder";
  view.appendChild(plotHolder);

  const legend = document.createElement("p");
  legend.className = "plot-legend";
  legend.textContent = "◆ reference · ● colored by predicted risk · equal distances stack";
  view.appendChild(legend);

  const detail = document.createElement("div");
  detail.className = "similarity-detail";
  view.appendChild(detail);

  root.appendChild(view);

  const currentWeights = (): number[] =>
    Array.from(sliders.querySelectorAll<HTMLInputElement>("input[type=range]")).map((input) =>
      Number(input.value),
    );

  const openDetail = (id: string) => {
    const reference = byId.get(referenceSelect.value);
    const other = byId.get(id);
    detail.innerHTML = "";
    if (!reference || !other) {
      return;
    }
    const pair = document.createElement("div");
    pair.className = "case-pair";
    pair.appendChild(caseCard(features, reference, { showPrediction: true, other }));
    pair.appendChild(caseCard(features, other, { showPrediction: true, other: reference }));
    detail.appendChild(pair);
    if (deps.onFlag) {
      const note = document.createElement("input");
      note.type = "text";
      note.className = "flag-note";
      note.placeholder = "Why should these match?";
      const flag = document.createElement("button");
      flag.className = "flag-btn";
      flag.textContent = "Flag: should be treated alike";
      flag.addEventListener("click", () => {
        deps.onFlag?.(reference.id, other.id, note.value);
        flag.textContent = "Flagged";
        flag.disabled = true;
      });
      detail.appendChild(note);
      detail.appendChild(flag);
    }
  };

  const refresh = async (): Promise<void> => {
    const weights = currentWeights();
    const reference = referenceSelect.value;
    const body = await deps.api.similarity(deps.datasetId, reference, weights);
    plotHolder.innerHTML = "";
    plotHolder.appendChild(stripPlot(body.reference, body.entries, { onDotClick: openDetail }));
  };

  referenceSelect.addEventListener("change", () => {
    detail.innerHTML = "";
    void refresh();
  });
  sliders.addEventListener("change", () => {
    const weights = currentWeights();
    deps.onWeightChange?.(weights, referenceSelect.value);
    void refresh();
  });

  await refresh();
}
