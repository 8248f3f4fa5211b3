import { ApiClient } from "./api.js";
import { availableViews, type ViewName } from "./state.js";
import { renderCaseView } from "./views/cases.js";
import { renderGroupView } from "./views/group.js";
import { renderSimilarityView } from "./views/similarity.js";
import { Wizard } from "./wizard.js";
import type { DatasetBody } from "./types.js";

const VIEW_LABELS: Record<ViewName, string> = {
  group: "Group comparison",
  case_by_case: "Case by case",
  similarity: "Similarity",
  session: "Session",
};

declare global {
  // eslint-disable-next-line no-var
  var FAIRLICIT_API_BASE: string | undefined;
}

export async function boot(root: HTMLElement): Promise<void> {
  const api = new ApiClient(globalThis.FAIRLICIT_API_BASE ?? "");
  const datasets = await api.listDatasets();
  const first = datasets[0];
  if (!first) {
    root.textContent = "No datasets available — import one through the API first.";
    return;
  }

  let datasetId = first.id;
  let dataset: DatasetBody = await api.getDataset(datasetId);
  let activeView: ViewName = "group";
  let wizardStage: number | null = null;

  const nav = document.createElement("nav");
  nav.className = "top-nav";
  const datasetSelect = document.createElement("select");
  datasetSelect.className = "dataset-select";
  for (const entry of datasets) {
    const option = document.createElement("option");
    option.value = entry.id;
    option.textContent = `${entry.id} (${entry.n_cases} cases)`;
    datasetSelect.appendChild(option);
  }
  nav.appendChild(datasetSelect);

  const tabs = document.createElement("div");
  tabs.className = "view-tabs";
  nav.appendChild(tabs);
  root.appendChild(nav);

  const viewHolder = document.createElement("main");
  viewHolder.className = "view-holder";
  root.appendChild(viewHolder);

  const wizardHolder = document.createElement("div");
  const wizardDeps = {
    api,
    datasetId,
    dataset,
    onStageChange: (stage: number | null) => {
      wizardStage = stage;
      renderTabs();
    },
  };
  const wizard = new Wizard(wizardHolder, wizardDeps);
  let wizardMounted = false;

  async function show(view: ViewName): Promise<void> {
    activeView = view;
    renderTabs();
    viewHolder.innerHTML = "";
    if (view === "session") {
      viewHolder.appendChild(wizardHolder);
      if (!wizardMounted) {
        wizardMounted = true;
        await wizard.mount();
      }
      return;
    }
    const pane = document.createElement("div");
    viewHolder.appendChild(pane);
    if (view === "group") {
      await renderGroupView(pane, { api, datasetId, schema: dataset.schema });
    } else if (view === "similarity") {
      await renderSimilarityView(pane, { api, datasetId, dataset });
    } else {
      await renderCaseView(pane, { api, datasetId });
    }
  }

  function renderTabs(): void {
    tabs.innerHTML = "";
    const views = availableViews(wizardStage);
    for (const view of views) {
      const button = document.createElement("button");
      button.className = "view-tab";
      button.dataset.view = view;
      if (view === activeView) {
        button.classList.add("active");
      }
      button.textContent = VIEW_LABELS[view];
      button.addEventListener("click", () => {
        void show(view);
      });
      tabs.appendChild(button);
    }
    if (!views.includes(activeView)) {
      void show(views[0] ?? "session");
    }
  }

  datasetSelect.addEventListener("change", () => {
    void (async () => {
      datasetId = datasetSelect.value;
      dataset = await api.getDataset(datasetId);
      if (!wizardMounted) {
        wizardDeps.datasetId = datasetId;
        wizardDeps.dataset = dataset;
      }
      await show(activeView);
    })();
  });

  await show("group");
}

const rootElement = typeof document !== "undefined" ? document.getElementById("app") : null;
if (rootElement) {
  void boot(rootElement);
}
