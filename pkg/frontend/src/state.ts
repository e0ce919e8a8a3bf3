/** View state and the pure navigation logic behind cluster drill-down.
 *
 * The cluster path always names ancestors root -> node within the loaded
 * result document; descend/ascend are pure so view round trips can be
 * checked structurally.
 */

import type { ClusteringReport, ConfigDoc, TreeNodeDoc } from "./types.js";

export type PageName = "configure" | "jobs" | "result";

export interface ResultFocus {
  jobId: string;
  clusterPath: number[];
}

export interface ViewState {
  page: PageName;
  configureDraft: Partial<ConfigDoc>;
  resultFocus: ResultFocus | null;
}

export function initialState(): ViewState {
  return { page: "configure", configureDraft: {}, resultFocus: null };
}

// ---------------------------------------------------------------------------
// condensed-tree navigation

export interface TreeIndex {
  byId: Map<number, TreeNodeDoc>;
  children: Map<number, number[]>;
  rootId: number;
}

export function indexTree(report: ClusteringReport): TreeIndex {
  const byId = new Map<number, TreeNodeDoc>();
  const children = new Map<number, number[]>();
  let rootId: number | null = null;
  for (const node of report.tree.nodes) {
    byId.set(node.node_id, node);
    if (!children.has(node.node_id)) children.set(node.node_id, []);
    if (node.parent_id === null) {
      rootId = node.node_id;
    } else {
      const siblings = children.get(node.parent_id) ?? [];
      siblings.push(node.node_id);
      children.set(node.parent_id, siblings);
    }
  }
  if (rootId === null) throw new Error("clustering document has no root node");
  for (const list of children.values()) list.sort((a, b) => a - b);
  return { byId, children, rootId };
}

export function rootPath(index: TreeIndex): number[] {
  return [index.rootId];
}

export function isValidPath(index: TreeIndex, path: number[]): boolean {
  if (path.length === 0 || path[0] !== index.rootId) return false;
  for (let i = 1; i < path.length; i++) {
    const parent = path[i - 1]!;
    const node = path[i]!;
    if (!(index.children.get(parent) ?? []).includes(node)) return false;
  }
  return true;
}

export function childrenOf(index: TreeIndex, path: number[]): TreeNodeDoc[] {
  const current = path[path.length - 1];
  if (current === undefined) return [];
  return (index.children.get(current) ?? []).map((id) => index.byId.get(id)!);
}

/** Descend into a child of the current node; no-op for non-children and
 * for leaves (clicking a leaf must not change the view). */
export function descend(index: TreeIndex, path: number[], nodeId: number): number[] {
  const current = path[path.length - 1];
  if (current === undefined) return path;
  if (!(index.children.get(current) ?? []).includes(nodeId)) return path;
  return [...path, nodeId];
}

/** Ascend to a prefix of the path (breadcrumb click). */
export function ascendTo(path: number[], depth: number): number[] {
  if (depth < 1 || depth > path.length) return path;
  return path.slice(0, depth);
}
