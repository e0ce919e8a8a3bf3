/** Bubble chart over the condensed cluster tree: x = stability, y = point
 * count (also encoded by radius), click a bubble to descend into its
 * sub-clusters, breadcrumb to walk back up. A side panel lists each
 * visible cluster's discriminating attributes and metadata. */

import { el, svgEl } from "../dom.js";
import { formatScore, formatStability, humanizeField, splitCountAttribute } from "../format.js";
import { TreeIndex, childrenOf } from "../state.js";
import type { ClusteringReport, TreeNodeDoc } from "../types.js";

const WIDTH = 640;
const HEIGHT = 360;
const PAD = 40;
const R_MIN = 8;
const R_MAX = 34;

export interface ClusterViewHandlers {
  onDescend(nodeId: number): void;
  onAscendTo(depth: number): void;
}

export function bubbleRadius(size: number, maxSize: number): number {
  if (maxSize <= 0) return R_MIN;
  return R_MIN + (size / maxSize) * (R_MAX - R_MIN);
}

function breadcrumb(path: number[], handlers: ClusterViewHandlers): HTMLElement {
  const bar = el("nav", { class: "breadcrumb", "aria-label": "cluster path" });
  path.forEach((nodeId, i) => {
    if (i > 0) bar.append(el("span", { class: "sep" }, "›"));
    const label = i === 0 ? "root" : `cluster ${nodeId}`;
    if (i === path.length - 1) {
      bar.append(el("span", { class: "current", "data-node": String(nodeId) }, label));
    } else {
      bar.append(
        el(
          "button",
          { type: "button", "data-node": String(nodeId), onclick: () => handlers.onAscendTo(i + 1) },
          label,
        ),
      );
    }
  });
  return bar;
}

function annotationPanel(
  visible: TreeNodeDoc[],
  report: ClusteringReport,
): HTMLElement {
  const panel = el("aside", { class: "annotation-panel" });
  panel.append(el("h2", {}, "Cluster details"));
  for (const node of visible) {
    panel.append(el("h3", {}, `cluster ${node.node_id}`));
    panel.append(
      el(
        "p",
        { class: "meta" },
        `${node.size} points, stability ${formatStability(node.stability)}`,
      ),
    );
    const entries = report.annotations[String(node.node_id)] ?? [];
    if (entries.length === 0) {
      panel.append(el("p", { class: "meta" }, "no annotation for this node"));
      continue;
    }
    const list = el("ul", {});
    for (const entry of entries) {
      const parts = splitCountAttribute(entry.attribute);
      const shown = parts
        ? `${humanizeField(parts.field)} ${parts.value}`
        : entry.attribute;
      list.append(el("li", {}, `${shown} (${formatScore(entry.score)})`));
    }
    panel.append(list);
  }
  return panel;
}

export function renderClusters(
  report: ClusteringReport,
  path: number[],
  index: TreeIndex,
  handlers: ClusterViewHandlers,
): HTMLElement {
  const panel = el("div", { class: "panel cluster-view" });
  panel.append(el("h2", {}, "Clusters (stability vs size)"));
  panel.append(breadcrumb(path, handlers));

  const visible = childrenOf(index, path);
  const layout = el("div", { class: "cluster-layout" });
  const chartBox = el("div", {});
  const notice = el("p", { class: "notice", "data-role": "drill-notice", hidden: "" });

  if (visible.length === 0) {
    chartBox.append(el("p", { class: "notice" }, "no sub-clusters"));
  } else {
    const maxStability = Math.max(...visible.map((n) => n.stability), 1e-12);
    const maxSize = Math.max(...visible.map((n) => n.size));
    const xScale = (value: number) => PAD + (value / (maxStability * 1.05)) * (WIDTH - 2 * PAD);
    const yScale = (value: number) => HEIGHT - PAD - (value / (maxSize * 1.2)) * (HEIGHT - 2 * PAD);

    const svg = svgEl("svg", {
      class: "bubble-svg",
      viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
      width: String(WIDTH),
      height: String(HEIGHT),
      role: "img",
    });
    svg.append(
      svgEl("line", { x1: String(PAD), y1: String(HEIGHT - PAD), x2: String(WIDTH - PAD), y2: String(HEIGHT - PAD), stroke: "#d9e0e8" }),
      svgEl("line", { x1: String(PAD), y1: String(PAD), x2: String(PAD), y2: String(HEIGHT - PAD), stroke: "#d9e0e8" }),
      svgEl("text", { x: String(WIDTH / 2), y: String(HEIGHT - 8), "text-anchor": "middle", "font-size": "11", fill: "#66788c" }, "stability"),
      svgEl("text", { x: "12", y: String(HEIGHT / 2), "font-size": "11", fill: "#66788c", transform: `rotate(-90 12 ${HEIGHT / 2})`, "text-anchor": "middle" }, "points"),
    );

    for (const node of visible) {
      const hasChildren = (index.children.get(node.node_id) ?? []).length > 0;
      const circle = svgEl("circle", {
        cx: String(xScale(node.stability)),
        cy: String(yScale(node.size)),
        r: String(bubbleRadius(node.size, maxSize)),
        fill: hasChildren ? "#2563eb" : "#60a5fa",
        "fill-opacity": "0.65",
        stroke: "#1e40af",
        "data-node": String(node.node_id),
        "data-size": String(node.size),
        "data-stability": String(node.stability),
        "data-has-children": hasChildren ? "true" : "false",
        onclick: () => {
          if (hasChildren) {
            handlers.onDescend(node.node_id);
          } else {
            notice.textContent = `cluster ${node.node_id} has no sub-clusters`;
            notice.removeAttribute("hidden");
          }
        },
      });
      circle.append(
        svgEl(
          "title",
          {},
          `cluster ${node.node_id}: ${node.size} points, stability ${formatStability(node.stability)}`,
        ),
      );
      svg.append(circle);
    }
    chartBox.append(svg);
  }
  chartBox.append(notice);
  layout.append(chartBox, annotationPanel(visible, report));
  panel.append(layout);
  return panel;
}
