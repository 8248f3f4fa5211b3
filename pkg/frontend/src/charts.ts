import type { GroupViewRow, RankedEntry } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export function svgElement<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [name, value] of Object.entries(attrs)) {
    node.setAttribute(name, value);
  }
  return node;
}

/** Display form of a server-provided rate; never computed client-side. */
export function formatRate(value: number | null): string {
  return value === null ? "–" : value.toFixed(3);
}

const BAR_WIDTH = 56;
const BAR_GAP = 18;
const BAR_MAX_HEIGHT = 120;
const BAR_BASELINE = 140;

/**
 * Bar chart over subgroup rows.  Rates are in [0, 1], so bar heights scale
 * against 1.0; unpopulated subgroups render as a dash instead of a bar.
 */
export function barChart(rows: GroupViewRow[]): SVGSVGElement {
  const width = BAR_GAP + rows.length * (BAR_WIDTH + BAR_GAP);
  const svg = svgElement("svg", {
    class: "bar-chart",
    viewBox: `0 0 ${width} 180`,
    width: String(width),
    height: "180",
    role: "img",
  });
  svg.appendChild(
    svgElement("line", {
      class: "axis",
      x1: "0",
      y1: String(BAR_BASELINE),
      x2: String(width),
      y2: String(BAR_BASELINE),
    }),
  );
  rows.forEach((row, index) => {
    const x = BAR_GAP + index * (BAR_WIDTH + BAR_GAP);
    const label = row.subgroup.join(" × ");
    const group = svgElement("g", { class: "bar-group", "data-subgroup": label });
    if (row.value !== null) {
      const height = Math.round(row.value * BAR_MAX_HEIGHT);
      group.appendChild(
        svgElement("rect", {
          class: "bar",
          x: String(x),
          y: String(BAR_BASELINE - height),
          width: String(BAR_WIDTH),
          height: String(height),
          "data-value": String(row.value),
        }),
      );
    }
    const value = svgElement("text", {
      class: "bar-value",
      x: String(x + BAR_WIDTH / 2),
      y: String(BAR_BASELINE - Math.round((row.value ?? 0) * BAR_MAX_HEIGHT) - 6),
      "text-anchor": "middle",
    });
    value.textContent = formatRate(row.value);
    group.appendChild(value);
    const name = svgElement("text", {
      class: "bar-label",
      x: String(x + BAR_WIDTH / 2),
      y: String(BAR_BASELINE + 16),
      "text-anchor": "middle",
    });
    name.textContent = label;
    group.appendChild(name);
    const count = svgElement("text", {
      class: "bar-count",
      x: String(x + BAR_WIDTH / 2),
      y: String(BAR_BASELINE + 32),
      "text-anchor": "middle",
    });
    count.textContent = `n=${row.n}`;
    group.appendChild(count);
    svg.appendChild(group);
  });
  return svg;
}

const STRIP_WIDTH = 560;
const STRIP_LEFT = 48;
const STRIP_RIGHT = 16;
const STRIP_BASELINE = 120;
const DOT_RADIUS = 5;
const STACK_STEP = 12;
const REFERENCE_X = 14;

export interface StripPlotHandlers {
  onDotClick?: (id: string) => void;
}

/**
 * One-dimensional scatter of ranked cases: x from the server-reported
 * distance, equal distances stacked vertically, dots colored by prediction.
 * The DOM keeps the dots in the server's ranking order; the reference case
 * is pinned as a marker at the far left.
 */
export function stripPlot(
  reference: string,
  entries: RankedEntry[],
  handlers: StripPlotHandlers = {},
): SVGSVGElement {
  const svg = svgElement("svg", {
    class: "strip-plot",
    viewBox: `0 0 ${STRIP_WIDTH} 150`,
    width: String(STRIP_WIDTH),
    height: "150",
    role: "img",
  });
  svg.appendChild(
    svgElement("line", {
      class: "axis",
      x1: String(STRIP_LEFT),
      y1: String(STRIP_BASELINE),
      x2: String(STRIP_WIDTH - STRIP_RIGHT),
      y2: String(STRIP_BASELINE),
    }),
  );

  const marker = svgElement("rect", {
    class: "reference-marker",
    x: String(REFERENCE_X - 6),
    y: String(STRIP_BASELINE - 6),
    width: "12",
    height: "12",
    transform: `rotate(45 ${REFERENCE_X} ${STRIP_BASELINE})`,
  });
  const markerTitle = svgElement("title", {});
  markerTitle.textContent = `reference ${reference}`;
  marker.appendChild(markerTitle);
  svg.appendChild(marker);

  const distances = entries.map((entry) => Number.parseFloat(entry.distance));
  const maxDistance = distances.reduce((acc, d) => Math.max(acc, d), 0);
  const plotWidth = STRIP_WIDTH - STRIP_LEFT - STRIP_RIGHT;
  const stackCount = new Map<string, number>();

  entries.forEach((entry, index) => {
    const d = distances[index] ?? 0;
    const x = maxDistance === 0 ? STRIP_LEFT : STRIP_LEFT + (d / maxDistance) * plotWidth;
    const level = stackCount.get(entry.distance) ?? 0;
    stackCount.set(entry.distance, level + 1);
    const dot = svgElement("circle", {
      class: `dot pred-${entry.prediction}`,
      cx: String(Math.round(x * 10) / 10),
      cy: String(STRIP_BASELINE - DOT_RADIUS - 1 - level * STACK_STEP),
      r: String(DOT_RADIUS),
      "data-id": entry.id,
      "data-distance": entry.distance,
    });
    const title = svgElement("title", {});
    title.textContent = `${entry.id} — distance ${entry.distance} — predicted ${entry.prediction}`;
    dot.appendChild(title);
    if (handlers.onDotClick) {
      dot.addEventListener("click", () => handlers.onDotClick?.(entry.id));
    }
    svg.appendChild(dot);
  });
  return svg;
}
