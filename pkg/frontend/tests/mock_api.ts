import { loadCapturedBodies, loadDatasets } from "./fixtures.js";

export interface RecordedCall {
  method: string;
  url: string;
}

export interface MockApi {
  fetchFn: (input: string, init?: RequestInit) => Promise<Response>;
  calls: RecordedCall[];
  /** Calls whose url contains the given path fragment. */
  callsTo(fragment: string): RecordedCall[];
}

function jsonResponse(body: unknown, status: number): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
  } as unknown as Response;
}

/**
 * A fetch replacement that serves bodies captured from the real service.
 * Unknown urls fail loudly so a drifting client cannot silently pass.
 */
export function mockApi(): MockApi {
  const bodies = loadCapturedBodies();
  const datasets = loadDatasets();
  const calls: RecordedCall[] = [];

  const fetchFn = async (input: string, init?: RequestInit): Promise<Response> => {
    const method = (init?.method ?? "GET").toUpperCase();
    calls.push({ method, url: input });
    if (method === "GET" && input === "/datasets") {
      const entries = Object.entries(datasets).map(([id, d]) => ({
        id,
        n_cases: d.cases.length,
        provenance: d.provenance,
        threshold: d.threshold,
      }));
      return jsonResponse({ datasets: entries }, 200);
    }
    const datasetMatch = /^\/datasets\/([^/?]+)$/.exec(input);
    const dataset = datasetMatch ? datasets[datasetMatch[1] ?? ""] : undefined;
    if (method === "GET" && dataset) {
      return jsonResponse(dataset, 200);
    }
    const key = `${method} ${input}`;
    if (key in bodies) {
      return jsonResponse(bodies[key], 200);
    }
    return jsonResponse({ error: "NoCapturedBody", detail: key }, 404);
  };

  return {
    fetchFn,
    calls,
    callsTo: (fragment: string) => calls.filter((c) => c.url.includes(fragment)),
  };
}
