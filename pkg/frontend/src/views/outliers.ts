/** Linear anomaly-score track: each point sits at x = score * width, so
 * horizontal position is meaningful; coincident scores are jittered
 * vertically only. Hover reveals the entity id and score. */

import { el, svgEl } from "../dom.js";
import type { OutlierScore } from "../types.js";

const HEIGHT = 120;
const RADIUS = 6;
const JITTER_STEP = 9;

export function jitterOffsets(count: number): number[] {
  // 0, -1, +1, -2, +2, ... times the step; keeps the first point centered
  const offsets: number[] = [];
  for (let i = 0; i < count; i++) {
    const magnitude = Math.ceil(i / 2) * JITTER_STEP;
    offsets.push(i % 2 === 1 ? -magnitude : magnitude);
  }
  return offsets;
}

export function renderOutliers(
  scores: OutlierScore[],
  width = 1000,
  title = "Outliers by anomaly score",
): HTMLElement {
  const panel = el("div", { class: "panel outlier-view" });
  panel.append(el("h2", {}, title));

  const svg = svgEl("svg", {
    class: "outlier-svg",
    viewBox: `0 0 ${width} ${HEIGHT}`,
    width: String(width),
    height: String(HEIGHT),
    role: "img",
  });
  const mid = HEIGHT / 2;
  svg.append(
    svgEl("line", {
      x1: "0",
      y1: String(mid),
      x2: String(width),
      y2: String(mid),
      stroke: "#d9e0e8",
      "stroke-width": "2",
    }),
  );
  for (const tick of [0, 0.25, 0.5, 0.75, 1]) {
    svg.append(
      svgEl("text", {
        x: String(tick * width),
        y: String(HEIGHT - 6),
        "text-anchor": tick === 0 ? "start" : tick === 1 ? "end" : "middle",
        "font-size": "11",
        fill: "#66788c",
      }, tick.toFixed(2)),
    );
  }

  const byScore = new Map<number, OutlierScore[]>();
  for (const entry of scores) {
    const group = byScore.get(entry.score) ?? [];
    group.push(entry);
    byScore.set(entry.score, group);
  }
  for (const [score, group] of byScore) {
    const offsets = jitterOffsets(group.length);
    group.forEach((entry, i) => {
      const circle = svgEl("circle", {
        cx: String(score * width),
        cy: String(mid + offsets[i]!),
        r: String(RADIUS),
        fill: "#dc2626",
        "fill-opacity": "0.75",
        "data-entity": entry.entity_id,
        "data-score": String(entry.score),
      });
      circle.append(
        svgEl("title", {}, `${entry.entity_id} — score ${entry.score.toFixed(3)}`),
      );
      svg.append(circle);
    });
  }
  panel.append(svg);

  if (scores.length === 0) {
    panel.append(el("p", { class: "notice" }, "no outliers in this result"));
  } else {
    panel.append(
      el("p", { class: "hint" }, `${scores.length} point(s); right means more anomalous`),
    );
  }
  return panel;
}
