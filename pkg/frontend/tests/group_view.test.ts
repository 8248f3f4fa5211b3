import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderGroupView } from "../src/views/group.js";
import { loadCapturedBodies, loadDatasets } from "./fixtures.js";
import { mockApi } from "./mock_api.js";

const datasets = loadDatasets();
const bodies = loadCapturedBodies();

function setup(datasetId: string) {
  const mock = mockApi();
  const api = new ApiClient("", mock.fetchFn);
  const root = document.createElement("div");
  document.body.appendChild(root);
  const schema = datasets[datasetId]!.schema;
  return { mock, api, root, schema };
}

function changeValue(el: HTMLSelectElement | HTMLInputElement, value: string): void {
  el.value = value;
  el.dispatchEvent(new Event("change"));
}

async function settle(): Promise<void> {
  // let the refresh promise chain (fetch -> json -> DOM) flush
  for (let i = 0; i < 10; i += 1) {
    await Promise.resolve();
  }
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("group view", () => {
  it("renders the high-risk-rate gap fixture as a golden snapshot", async () => {
    const { api, root, schema } = setup("parity_gap_dataset");
    await renderGroupView(root, { api, datasetId: "parity_gap_dataset", schema });
    expect(root.innerHTML).toMatchSnapshot();
  });

  it("draws one bar per populated subgroup with server-reported values", async () => {
    const { api, root, schema } = setup("parity_gap_dataset");
    await renderGroupView(root, { api, datasetId: "parity_gap_dataset", schema });

    const bars = Array.from(root.querySelectorAll(".bar"));
    expect(bars.map((bar) => bar.getAttribute("data-value"))).toEqual(["0.75", "0.5"]);
    const labels = Array.from(root.querySelectorAll(".bar-value"), (el) => el.textContent);
    expect(labels).toEqual(["0.750", "–", "–", "0.500"]);
    const counts = Array.from(root.querySelectorAll(".bar-count"), (el) => el.textContent);
    expect(counts).toEqual(["n=4", "n=0", "n=0", "n=4"]);
  });

  it("shows the violation badge and the server's description verbatim", async () => {
    const { api, root, schema } = setup("parity_gap_dataset");
    await renderGroupView(root, { api, datasetId: "parity_gap_dataset", schema });

    const badge = root.querySelector(".badge")!;
    expect(badge.className).toBe("badge verdict-violated");
    expect(badge.textContent).toBe("VIOLATED — statistical_parity, max gap 0.250, ε 0.05");

    const body = bodies[
      "GET /datasets/parity_gap_dataset/metrics?attribute=victim_age&metric=positive_rate&epsilon=0.05"
    ] as { view: { description: string } };
    expect(root.querySelector(".view-description")!.textContent).toBe(body.view.description);
  });

  it("re-queries when epsilon changes and flips the verdict", async () => {
    const { mock, api, root, schema } = setup("parity_gap_dataset");
    await renderGroupView(root, { api, datasetId: "parity_gap_dataset", schema });

    changeValue(root.querySelector<HTMLInputElement>(".epsilon-input")!, "0.5");
    await settle();

    expect(mock.calls.map((c) => c.url)).toEqual([
      "/datasets/parity_gap_dataset/metrics?attribute=victim_age&metric=positive_rate&epsilon=0.05",
      "/datasets/parity_gap_dataset/metrics?attribute=victim_age&metric=positive_rate&epsilon=0.5",
    ]);
    const badge = root.querySelector(".badge")!;
    expect(badge.className).toBe("badge verdict-satisfied");
    expect(badge.textContent).toBe("SATISFIED — statistical_parity, max gap 0.250, ε 0.5");
  });

  it("handles an attribute where only one subgroup is populated", async () => {
    const { api, root, schema } = setup("parity_gap_dataset");
    await renderGroupView(root, { api, datasetId: "parity_gap_dataset", schema });

    changeValue(root.querySelector<HTMLSelectElement>(".attribute-select")!, "victim_gender");
    await settle();

    expect(root.querySelectorAll(".bar")).toHaveLength(1);
    expect(root.querySelector(".bar")!.getAttribute("data-value")).toBe("0.625");
    const badge = root.querySelector(".badge")!;
    expect(badge.className).toBe("badge verdict-satisfied");
    expect(badge.textContent).toContain("max gap 0.000");
  });

  it("renders error-rate metrics for the error-gap fixture", async () => {
    const { api, root, schema } = setup("odds_gap_dataset");
    await renderGroupView(root, { api, datasetId: "odds_gap_dataset", schema });

    changeValue(root.querySelector<HTMLSelectElement>(".metric-select")!, "fpr");
    await settle();
    expect(root.querySelector(".badge")!.textContent).toContain("equalized_odds");
    expect(root.innerHTML).toMatchSnapshot();

    changeValue(root.querySelector<HTMLSelectElement>(".metric-select")!, "fnr");
    await settle();
    expect(root.querySelector(".badge")!.className).toBe("badge verdict-violated");
  });

  it("reports no verdict for a crossed two-attribute view", async () => {
    const { api, root, schema } = setup("odds_gap_dataset");
    await renderGroupView(root, { api, datasetId: "odds_gap_dataset", schema });

    changeValue(root.querySelector<HTMLSelectElement>(".attribute2-select")!, "victim_gender");
    await settle();

    const badge = root.querySelector(".badge")!;
    expect(badge.className).toBe("badge badge-none");
    expect(badge.textContent).toBe("no verdict for this selection");
    // 4 age bands x 3 gender values
    expect(root.querySelectorAll(".bar-group")).toHaveLength(12);
    expect(
      root.querySelector(".bar-group")!.getAttribute("data-subgroup"),
    ).toBe("infant × female");
  });

  it("keeps the satisfied badge for the balanced control fixtures", async () => {
    const parity = setup("parity_balanced_dataset");
    await renderGroupView(parity.root, {
      api: parity.api,
      datasetId: "parity_balanced_dataset",
      schema: parity.schema,
    });
    expect(parity.root.querySelector(".badge")!.className).toBe("badge verdict-satisfied");

    const odds = setup("odds_balanced_dataset");
    await renderGroupView(odds.root, {
      api: odds.api,
      datasetId: "odds_balanced_dataset",
      schema: odds.schema,
    });
    changeValue(odds.root.querySelector<HTMLSelectElement>(".metric-select")!, "fpr");
    await settle();
    expect(odds.root.querySelector(".badge")!.className).toBe("badge verdict-satisfied");
  });

  it("notifies the session recorder once per executed query", async () => {
    const { root, api, schema } = setup("parity_gap_dataset");
    const queries: Array<[string[], string]> = [];
    await renderGroupView(root, {
      api,
      datasetId: "parity_gap_dataset",
      schema,
      onQuery: (attributes, metric) => queries.push([attributes, metric]),
    });
    changeValue(root.querySelector<HTMLInputElement>(".epsilon-input")!, "0.5");
    await settle();
    expect(queries).toEqual([
      [["victim_age"], "positive_rate"],
      [["victim_age"], "positive_rate"],
    ]);
  });
});
