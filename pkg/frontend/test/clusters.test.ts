import { describe, expect, it } from "vitest";

import { ascendTo, descend, indexTree, rootPath } from "../src/state.js";
import { bubbleRadius, renderClusters } from "../src/views/clusters.js";
import type { ClusteringReport } from "../src/types.js";
import { click, clusteringReport } from "./helpers.js";

function noopHandlers() {
  return { onDescend: () => {}, onAscendTo: () => {} };
}

function renderedNodeIds(view: HTMLElement): string[] {
  return [...view.querySelectorAll("circle")].map((c) => c.getAttribute("data-node")!).sort();
}

/** Three-level synthetic tree for drill-down: root 0 -> {1, 2}, 1 -> {3, 4}. */
function deepReport(): ClusteringReport {
  const node = (node_id: number, parent_id: number | null, size: number) => ({
    node_id,
    parent_id,
    lambda_birth: 0,
    lambda_death: 1,
    size,
    stability: size * 1.5,
  });
  return {
    params: { min_cluster_size: 2, k: 2 },
    tree: { nodes: [node(0, null, 40), node(1, 0, 25), node(2, 0, 15), node(3, 1, 12), node(4, 1, 13)] },
    clusters: [],
    outliers: [],
    annotations: { "1": [{ attribute: "x", score: 1.0 }] },
    dropped_attributes: [],
  };
}

describe("cluster bubbles", () => {
  it("renders the root's children as bubbles with count on both y and radius", () => {
    const report = clusteringReport();
    const index = indexTree(report);
    const view = renderClusters(report, rootPath(index), index, noopHandlers());
    const circles = [...view.querySelectorAll("circle")];
    expect(circles.length).toBe(2);
    // the two port-role blobs have equal sizes: same y, same radius
    const [a, b] = circles;
    expect(a!.getAttribute("cy")).toBe(b!.getAttribute("cy"));
    expect(a!.getAttribute("r")).toBe(b!.getAttribute("r"));
  });

  it("scales radius monotonically with point count", () => {
    expect(bubbleRadius(10, 40)).toBeLessThan(bubbleRadius(40, 40));
    expect(bubbleRadius(40, 40)).toBeGreaterThan(bubbleRadius(39, 40));
  });

  it("lists each visible cluster's annotations in the side panel", () => {
    const report = clusteringReport();
    const index = indexTree(report);
    const view = renderClusters(report, rootPath(index), index, noopHandlers());
    const panel = view.querySelector(".annotation-panel")!;
    expect(panel.textContent).toMatch(/in_port_(80|443)_pct/);
    expect(panel.textContent).toContain("points, stability");
  });

  it("clicking a bubble with children descends one level", () => {
    const report = deepReport();
    const index = indexTree(report);
    let path = rootPath(index);
    const view = renderClusters(report, path, index, {
      onDescend: (nodeId) => (path = descend(index, path, nodeId)),
      onAscendTo: (depth) => (path = ascendTo(path, depth)),
    });
    const target = view.querySelector('circle[data-node="1"]')!;
    expect(target.getAttribute("data-has-children")).toBe("true");
    click(target);
    expect(path).toEqual([0, 1]);
    const deeper = renderClusters(report, path, index, noopHandlers());
    expect(renderedNodeIds(deeper)).toEqual(["3", "4"]);
  });

  it("clicking a leaf is a no-op with a notice", () => {
    const report = deepReport();
    const index = indexTree(report);
    let path = rootPath(index);
    const view = renderClusters(report, path, index, {
      onDescend: (nodeId) => (path = descend(index, path, nodeId)),
      onAscendTo: () => {},
    });
    const leaf = view.querySelector('circle[data-node="2"]')!;
    expect(leaf.getAttribute("data-has-children")).toBe("false");
    click(leaf);
    expect(path).toEqual([0]);
    const notice = view.querySelector('[data-role="drill-notice"]')!;
    expect(notice.hasAttribute("hidden")).toBe(false);
    expect(notice.textContent).toContain("no sub-clusters");
  });

  it("breadcrumb from depth 2 restores the root view exactly", () => {
    const report = deepReport();
    const index = indexTree(report);
    const initialPath = rootPath(index);
    const initialView = renderClusters(report, initialPath, index, noopHandlers());

    let path = descend(index, initialPath, 1);
    expect(path).toEqual([0, 1]);
    const deepView = renderClusters(report, path, index, {
      onDescend: () => {},
      onAscendTo: (depth) => (path = ascendTo(path, depth)),
    });
    const rootCrumb = deepView.querySelector('nav.breadcrumb button[data-node="0"]')!;
    click(rootCrumb);
    expect(path).toEqual(initialPath);

    const restored = renderClusters(report, path, index, noopHandlers());
    expect(renderedNodeIds(restored)).toEqual(renderedNodeIds(initialView));
    expect(restored.querySelector("nav.breadcrumb")!.textContent).toBe(
      initialView.querySelector("nav.breadcrumb")!.textContent,
    );
  });

  it("renders a notice when the current node has no children", () => {
    const report = deepReport();
    const index = indexTree(report);
    const view = renderClusters(report, [0, 2], index, noopHandlers());
    expect(view.textContent).toContain("no sub-clusters");
  });
});
