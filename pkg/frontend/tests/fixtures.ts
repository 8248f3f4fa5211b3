import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { DatasetBody } from "../src/types.js";

const HERE = dirname(fileURLToPath(import.meta.url));
export const REPO_ROOT = join(HERE, "..", "..");
const BUNDLED = join(REPO_ROOT, "src", "fairlicit", "fixtures");

/** Captured service bodies, keyed by "METHOD url" exactly as the client builds urls. */
export function loadCapturedBodies(): Record<string, unknown> {
  return JSON.parse(readFileSync(join(HERE, "fixtures", "bodies.json"), "utf8")) as Record<
    string,
    unknown
  >;
}

/** The dataset documents the capture run served, straight from the bundled files. */
export function loadDatasets(): Record<string, DatasetBody> {
  const byId: Record<string, DatasetBody> = {};
  const files: Record<string, string> = {
    default: "default_dataset.json",
    odds_balanced_dataset: "odds_balanced_dataset.json",
    odds_gap_dataset: "odds_gap_dataset.json",
    parity_balanced_dataset: "parity_balanced_dataset.json",
    parity_gap_dataset: "parity_gap_dataset.json",
  };
  for (const [id, file] of Object.entries(files)) {
    byId[id] = JSON.parse(readFileSync(join(BUNDLED, file), "utf8")) as DatasetBody;
  }
  return byId;
}
