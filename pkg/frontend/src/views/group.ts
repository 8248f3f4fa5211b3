import type { ApiClient } from "../api.js";
import { barChart, formatRate } from "../charts.js";
import type { MetricsBody, SchemaBody } from "../types.js";

export const METRIC_LABELS: Record<string, string> = {
  positive_rate: "High-risk rate",
  fpr: "False positive rate",
  fnr: "False negative rate",
  accuracy: "Accuracy",
};

export interface GroupViewDeps {
  api: ApiClient;
  datasetId: string;
  schema: SchemaBody;
  /** Called after each successful query, e.g. to record a stage-4 group_query event. */
  onQuery?: (attributes: string[], metric: string) => void;
}

function option(value: string, text: string): HTMLOptionElement {
  const node = document.createElement("option");
  node.value = value;
  node.textContent = text;
  return node;
}

/**
 * Group view: subgroup bar chart for a selected metric over one or two
 * sensitive attributes, the server's textual summary rendered verbatim, and
 * the parity/odds verdict badge with an epsilon control.  Every number shown
 * is taken from the response body.
 */
export function renderGroupView(root: HTMLElement, deps: GroupViewDeps): Promise<void> {
  root.innerHTML = "";
  const view = document.createElement("section");
  view.className = "group-view";

  const controls = document.createElement("div");
  controls.className = "group-controls";

  const metricSelect = document.createElement("select");
  metricSelect.className = "metric-select";
  for (const [name, label] of Object.entries(METRIC_LABELS)) {
    metricSelect.appendChild(option(name, label));
  }

  const attributeSelect = document.createElement("select");
  attributeSelect.className = "attribute-select";
  const attribute2Select = document.createElement("select");
  attribute2Select.className = "attribute2-select";
  attribute2Select.appendChild(option("", "(none)"));
  for (const name of deps.schema.sensitive_attributes) {
    attributeSelect.appendChild(option(name, name.replace(/_/g, " ")));
    attribute2Select.appendChild(option(name, name.replace(/_/g, " ")));
  }

  const epsilonInput = document.createElement("input");
  epsilonInput.type = "number";
  epsilonInput.className = "epsilon-input";
  epsilonInput.min = "0";
  epsilonInput.max = "1";
  epsilonInput.step = "0.01";
  epsilonInput.value = "0.05";

  const labelled = (text: string, control: HTMLElement): HTMLLabelElement => {
    const label = document.createElement("label");
    label.textContent = `${text} `;
    label.appendChild(control);
    return label;
  };
  controls.appendChild(labelled("Metric", metricSelect));
  controls.appendChild(labelled("Attribute", attributeSelect));
  controls.appendChild(labelled("Crossed with", attribute2Select));
  controls.appendChild(labelled("Tolerance ε", epsilonInput));
  view.appendChild(controls);

  const badge = document.createElement("span");
  badge.className = "badge";
  view.appendChild(badge);

  const chartHolder = document.createElement("div");
  chartHolder.className = "chart-holder";
  view.appendChild(chartHolder);

  const description = document.createElement("p");
  description.className = "view-description";
  view.appendChild(description);

  root.appendChild(view);

  const apply = (body: MetricsBody) => {
    chartHolder.innerHTML = "";
    chartHolder.appendChild(barChart(body.view.rows));
    description.textContent = body.view.description;
    if (body.fairness === null) {
      badge.className = "badge badge-none";
      badge.textContent = "no verdict for this selection";
    } else {
      badge.className = `badge verdict-${body.fairness.verdict}`;
      badge.textContent =
        `${body.fairness.verdict.toUpperCase()} — ${body.fairness.criterion}, ` +
        `max gap ${formatRate(body.fairness.max_gap)}, ε ${body.fairness.epsilon}`;
    }
  };

  const refresh = async (): Promise<void> => {
    const attributes = [attributeSelect.value];
    if (attribute2Select.value !== "") {
      attributes.push(attribute2Select.value);
    }
    const query = {
      attribute: attributeSelect.value,
      ...(attribute2Select.value !== "" ? { attribute2: attribute2Select.value } : {}),
      metric: metricSelect.value,
      epsilon: Number(epsilonInput.value),
    };
    const body = await deps.api.metrics(deps.datasetId, query);
    apply(body);
    deps.onQuery?.(attributes, metricSelect.value);
  };

  for (const control of [metricSelect, attributeSelect, attribute2Select, epsilonInput]) {
    control.addEventListener("change", () => {
      void refresh();
    });
  }
  return refresh();
}
