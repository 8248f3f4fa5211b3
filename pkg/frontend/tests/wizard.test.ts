import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { createServer, type AddressInfo } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Wizard, STAGE1_PAIRS, STAGE1_QUESTIONS } from "../src/wizard.js";
import { REPO_ROOT, loadDatasets } from "./fixtures.js";
import type { DatasetBody, SessionExport, TranscriptEvent } from "../src/types.js";

const execFileAsync = promisify(execFile);

const PAIR_CYCLE = ["equal", "prioritize_a", "prioritize_b", "not_comfortable", "no_opinion"];
const GF_CYCLE = ["yes", "no", "no_opinion"];

let service: ChildProcess;
let serviceErr = "";
let baseUrl = "";
let storeDir = "";
let logsDir = "";
let api: ApiClient;
let datasetId = "";
let dataset: DatasetBody;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.on("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const port = (probe.address() as AddressInfo).port;
      probe.close(() => resolve(port));
    });
  });
}

async function waitFor<T>(
  probe: () => T | null | undefined | false,
  what: string,
  timeoutMs = 20_000,
): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const value = probe();
    if (value) {
      return value;
    }
    if (Date.now() > deadline) {
      throw new Error(`timed out waiting for ${what}\nservice stderr:\n${serviceErr}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}

async function waitForAsync<T>(
  probe: () => Promise<T | null | undefined | false>,
  what: string,
  timeoutMs = 20_000,
): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const value = await probe().catch(() => null);
    if (value) {
      return value;
    }
    if (Date.now() > deadline) {
      throw new Error(`timed out waiting for ${what}\nservice stderr:\n${serviceErr}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 50));
  }
}

function explorations(log: SessionExport, kind: string): TranscriptEvent[] {
  return log.session.transcript.filter(
    (event) => event.kind === "exploration" && event.payload.kind === kind,
  );
}

beforeAll(async () => {
  storeDir = mkdtempSync(join(tmpdir(), "fairlicit-store-"));
  logsDir = mkdtempSync(join(tmpdir(), "fairlicit-logs-"));
  const port = await freePort();
  baseUrl = `http://127.0.0.1:${port}`;
  service = spawn(
    "python3",
    ["-m", "fairlicit.service", "--store-dir", storeDir, "--port", String(port)],
    { cwd: REPO_ROOT, stdio: ["ignore", "ignore", "pipe"] },
  );
  service.stderr?.on("data", (chunk: Buffer) => {
    serviceErr += chunk.toString();
  });
  await waitForAsync(async () => {
    const response = await fetch(`${baseUrl}/datasets`);
    return response.ok;
  }, "service readiness");

  const document = loadDatasets()["default"]!;
  const created = await fetch(`${baseUrl}/datasets`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(document),
  });
  expect(created.status).toBe(201);
  datasetId = ((await created.json()) as { id: string }).id;

  api = new ApiClient(baseUrl);
  dataset = await api.getDataset(datasetId);
}, 120_000);

afterAll(() => {
  service?.kill();
  for (const dir of [storeDir, logsDir]) {
    if (dir) {
      rmSync(dir, { recursive: true, force: true });
    }
  }
});

function mountedWizard(sessionId?: string): {
  root: HTMLElement;
  wizard: Wizard;
  stages: Array<number | null>;
} {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const stages: Array<number | null> = [];
  const wizard = new Wizard(root, {
    api,
    datasetId,
    dataset,
    ...(sessionId !== undefined ? { sessionId } : {}),
    onStageChange: (stage) => stages.push(stage),
  });
  return { root, wizard, stages };
}

function progressText(root: HTMLElement): string {
  return root.querySelector(".progress")?.textContent ?? "";
}

function currentQuestionId(root: HTMLElement): string | null {
  const holder = root.querySelector(".pair-prompt, .gf-text");
  return holder?.getAttribute("data-question-id") ?? null;
}

async function startSession(root: HTMLElement, sessionId: string, seed: number): Promise<void> {
  root.querySelector<HTMLSelectElement>(".role-select")!.value = "social_worker";
  root.querySelector<HTMLInputElement>(".session-id-input")!.value = sessionId;
  root.querySelector<HTMLInputElement>(".seed-input")!.value = String(seed);
  root.querySelector<HTMLButtonElement>(".start-btn")!.click();
  await waitFor(() => root.querySelector(".progress"), "session to start");
}

async function answerCurrent(root: HTMLElement, selector: string): Promise<void> {
  const before = currentQuestionId(root);
  root.querySelector<HTMLButtonElement>(selector)!.click();
  await waitFor(
    () => currentQuestionId(root) !== before || root.querySelector(".stage-prompt") !== null,
    `render after answering ${before ?? "?"}`,
  );
}

describe("elicitation wizard against the real service", () => {
  it("runs a full scripted session whose exported log aggregates with the scripted counts", async () => {
    const sessionId = "ui-e2e-full";
    const { root, wizard, stages } = mountedWizard();
    await wizard.mount();
    await startSession(root, sessionId, 11);

    // ---- stage 1: scripted choices over all fixture pairs and belief questions
    const scriptedPairs = new Map<string, { choice: string; caseA: string; caseB: string }>();
    const gfYes: Record<string, number> = {};
    let pairCount = 0;
    let gfCount = 0;

    for (let guard = 0; guard < 40; guard += 1) {
      if (root.querySelector(".stage-prompt")) {
        break;
      }
      const questionId = await waitFor(() => currentQuestionId(root), "a stage-1 question");
      if (questionId.startsWith("s1-pair-")) {
        expect(root.querySelector(".prediction-banner")).toBeNull();
        const cards = Array.from(root.querySelectorAll(".case-card"), (card) =>
          card.getAttribute("data-case-id"),
        );
        const choice = PAIR_CYCLE[pairCount % PAIR_CYCLE.length]!;
        scriptedPairs.set(questionId, { choice, caseA: cards[0]!, caseB: cards[1]! });
        if (pairCount === 0) {
          root.querySelector<HTMLTextAreaElement>(".rationale")!.value =
            "the injury difference matters";
        }
        await answerCurrent(root, `.choice-btn[data-choice=${choice}]`);
        pairCount += 1;
        if (pairCount === 1) {
          await waitFor(
            () => progressText(root).includes("Pairs 1/14"),
            "progress after first pair",
          );
        }
      } else {
        const criterion = root.querySelector(".gf-text")!.getAttribute("data-criterion")!;
        const answer = GF_CYCLE[gfCount % GF_CYCLE.length]!;
        if (answer === "yes") {
          gfYes[criterion] = (gfYes[criterion] ?? 0) + 1;
        }
        await answerCurrent(root, `.gf-btn[data-choice=${answer}]`);
        gfCount += 1;
      }
    }

    expect(pairCount).toBe(STAGE1_PAIRS);
    expect(gfCount).toBe(STAGE1_QUESTIONS);
    expect(progressText(root)).toBe("Stage 1 · Pairs 14/14 · Questions 15/15");

    // ---- stage 2: predictions revealed on fresh pairs
    root.querySelector<HTMLButtonElement>(".advance-btn")!.click();
    await waitFor(() => progressText(root) === "Stage 2 of 4", "stage 2");

    for (const choice of ["prioritize_b", "equal", "prioritize_a"]) {
      const questionId = await waitFor(() => currentQuestionId(root), "a stage-2 pair");
      expect(questionId.startsWith("s2-rand-")).toBe(true);
      expect(root.querySelectorAll(".prediction-banner")).toHaveLength(2);
      await answerCurrent(root, `.choice-btn[data-choice=${choice}]`);
    }

    // ---- stage 3: weight exploration and a flagged look-alike pair
    await waitFor(() => currentQuestionId(root), "a pending stage-2 pair");
    root.querySelector<HTMLButtonElement>(".advance-btn")!.click();
    await waitFor(() => progressText(root) === "Stage 3 of 4", "stage 3");
    await waitFor(() => root.querySelector(".dot"), "similarity plot");

    const slider = root.querySelector<HTMLInputElement>("input[data-feature=victim_age]")!;
    slider.value = "3";
    slider.dispatchEvent(new Event("change", { bubbles: true }));
    await waitForAsync(async () => {
      const log = await api.exportSession(sessionId);
      return explorations(log, "weight_change").length === 1;
    }, "weight_change event");

    root.querySelector(".dot")!.dispatchEvent(new Event("click"));
    await waitFor(() => root.querySelector(".flag-btn"), "flag control");
    root.querySelector<HTMLInputElement>(".flag-note")!.value = "identical injuries";
    root.querySelector<HTMLButtonElement>(".flag-btn")!.click();
    const flagged = await waitForAsync(async () => {
      const log = await api.exportSession(sessionId);
      const events = explorations(log, "similarity_flag");
      return events.length === 1 ? events : false;
    }, "similarity_flag event");
    expect(flagged[0]!.payload.note).toBe("identical injuries");

    // ---- stage 4: every chart request is recorded
    root.querySelector<HTMLButtonElement>(".advance-btn")!.click();
    await waitFor(() => progressText(root) === "Stage 4 of 4", "stage 4");
    await waitFor(() => root.querySelector(".bar"), "group chart");
    await waitForAsync(async () => {
      const log = await api.exportSession(sessionId);
      return explorations(log, "group_query").length === 1;
    }, "initial group_query event");

    const metricSelect = root.querySelector<HTMLSelectElement>(".metric-select")!;
    metricSelect.value = "fpr";
    metricSelect.dispatchEvent(new Event("change"));
    const groupQueries = await waitForAsync(async () => {
      const log = await api.exportSession(sessionId);
      const events = explorations(log, "group_query");
      return events.length === 2 ? events : false;
    }, "second group_query event");
    expect(groupQueries[1]!.payload.metric).toBe("fpr");

    // ---- finish: closed session renders and offers the export
    root.querySelector<HTMLButtonElement>(".advance-btn")!.click();
    await waitFor(() => root.querySelector(".export-pre"), "exported log view");
    expect(progressText(root)).toBe("Session complete");
    expect(root.querySelector<HTMLAnchorElement>(".download-link")!.href).toMatch(
      /^data:application\/json/,
    );
    expect(stages).toEqual([1, 2, 3, 4, null]);

    // ---- the exported log is a valid aggregate input with the scripted counts
    const log = await api.exportSession(sessionId);
    expect(log.session.closed_at).not.toBeNull();
    expect(log.session.transcript.filter((e) => e.kind === "response")).toHaveLength(32);
    expect(log.session.transcript.filter((e) => e.kind === "stage_advanced")).toHaveLength(4);

    writeFileSync(join(logsDir, `${sessionId}.json`), JSON.stringify(log));
    const { stdout } = await execFileAsync(
      "python3",
      ["-m", "fairlicit.cli", "aggregate", "--sessions", logsDir, "--json"],
      { cwd: REPO_ROOT },
    );
    const summary = JSON.parse(stdout) as {
      participants: string[];
      pairs: Array<{
        question_id: string;
        case_a: string;
        case_b: string;
        responses: number;
        counts: Record<string, number>;
      }>;
      criterion_support: Record<
        string,
        { yes_count: number; support: number; attributes: number; participants: number }
      >;
      consistency: { per_participant: Record<string, Record<string, number>> };
    };

    expect(summary.participants).toEqual([sessionId]);
    expect(summary.pairs).toHaveLength(STAGE1_PAIRS);
    for (const pair of summary.pairs) {
      const scripted = scriptedPairs.get(pair.question_id)!;
      expect(scripted).toBeDefined();
      expect(pair.case_a).toBe(scripted.caseA);
      expect(pair.case_b).toBe(scripted.caseB);
      expect(pair.responses).toBe(1);
      expect(pair.counts[scripted.choice]).toBe(1);
      const total = Object.values(pair.counts).reduce((a, b) => a + b, 0);
      expect(total).toBe(1);
    }

    expect(Object.keys(summary.criterion_support).sort()).toEqual([
      "equalized_odds",
      "statistical_parity",
      "unawareness",
    ]);
    let recordedYes = 0;
    for (const [criterion, support] of Object.entries(summary.criterion_support)) {
      const expectedYes = gfYes[criterion] ?? 0;
      expect(support.yes_count).toBe(expectedYes);
      expect(support.support).toBeCloseTo(expectedYes / 5, 12);
      expect(support.attributes).toBe(5);
      expect(support.participants).toBe(1);
      recordedYes += expectedYes;
    }
    expect(recordedYes).toBe(5); // yes/no/no_opinion cycle over 15 questions

    const consistency = summary.consistency.per_participant[sessionId]!;
    expect(Object.keys(consistency).sort()).toEqual([
      "equalized_odds",
      "statistical_parity",
      "unawareness",
    ]);
    for (const rate of Object.values(consistency)) {
      expect(rate).toBeGreaterThanOrEqual(0);
      expect(rate).toBeLessThanOrEqual(1);
    }
  });

  it("resumes an interrupted session from the server transcript alone", async () => {
    const sessionId = "ui-e2e-resume";
    const first = mountedWizard();
    await first.wizard.mount();
    await startSession(first.root, sessionId, 3);

    for (let i = 0; i < 2; i += 1) {
      await waitFor(() => currentQuestionId(first.root), "a question");
      await answerCurrent(first.root, ".choice-btn[data-choice=equal]");
    }
    const pending = await waitFor(() => currentQuestionId(first.root), "pending question");
    first.root.remove();

    // a fresh mount (new tab, reload) must land on the same question and counts
    const second = mountedWizard(sessionId);
    await second.wizard.mount();
    await waitFor(() => currentQuestionId(second.root), "resumed question");
    expect(progressText(second.root)).toBe("Stage 1 · Pairs 2/14 · Questions 0/15");
    expect(currentQuestionId(second.root)).toBe(pending);
    expect(second.stages).toEqual([1]);

    const served = await api.nextQuestion(sessionId);
    expect(served.type).toBe("pairwise");
    expect(served.type === "stage_prompt" ? null : served.id).toBe(pending);
  });
});
