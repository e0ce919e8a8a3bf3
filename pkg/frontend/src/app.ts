/** Application shell: tab navigation, jobs polling, result dispatch.
 * All analytics shown anywhere come straight from fetched result
 * documents; the UI computes nothing itself. */

import { ApiClient } from "./api.js";
import { clear, el } from "./dom.js";
import {
  PageName,
  TreeIndex,
  ViewState,
  ascendTo,
  descend,
  indexTree,
  initialState,
  isValidPath,
  rootPath,
} from "./state.js";
import type {
  AnomalyReport,
  ClusteringReport,
  DiscriminantReport,
  ResultEnvelope,
} from "./types.js";
import { ConfigureView } from "./views/configure.js";
import { renderClusters } from "./views/clusters.js";
import { renderDiscriminant } from "./views/discriminant.js";
import { needsPolling, renderJobs } from "./views/jobs.js";
import { renderOutliers } from "./views/outliers.js";

export class App {
  state: ViewState = initialState();
  private content: HTMLElement = el("main", {});
  private tabs = new Map<PageName, HTMLButtonElement>();
  private pollTimer: ReturnType<typeof setTimeout> | null = null;
  private loadedResult: ResultEnvelope | null = null;
  private treeIndex: TreeIndex | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly pollIntervalMs = 2000,
  ) {}

  start(): void {
    const nav = el("nav", { class: "tabs" });
    for (const page of ["configure", "jobs", "result"] as PageName[]) {
      const button = el(
        "button",
        { type: "button", "data-tab": page, onclick: () => void this.navigate(page) },
        page,
      );
      this.tabs.set(page, button);
      nav.append(button);
    }
    this.root.append(
      el("header", { class: "topbar" }, el("h1", {}, "cyberbench"), nav),
      this.content,
    );
    void this.navigate("configure");
  }

  async navigate(page: PageName): Promise<void> {
    this.state = { ...this.state, page };
    this.stopPolling();
    for (const [name, button] of this.tabs) {
      button.classList.toggle("active", name === page);
    }
    clear(this.content);
    if (page === "configure") {
      const view = new ConfigureView(this.api, {
        onSubmitted: () => void this.navigate("jobs"),
      });
      this.content.append(view.root);
    } else if (page === "jobs") {
      await this.renderJobsPage();
    } else {
      await this.renderResultPage();
    }
  }

  private stopPolling(): void {
    if (this.pollTimer !== null) {
      clearTimeout(this.pollTimer);
      this.pollTimer = null;
    }
  }

  private async renderJobsPage(): Promise<void> {
    let jobs;
    try {
      jobs = (await this.api.listJobs()).jobs;
    } catch (error) {
      clear(this.content);
      this.content.append(el("div", { class: "error-box" }, String(error)));
      return;
    }
    clear(this.content);
    this.content.append(
      renderJobs(jobs, { onOpenResult: (jobId) => void this.openResult(jobId) }),
    );
    if (needsPolling(jobs) && this.state.page === "jobs") {
      this.pollTimer = setTimeout(() => void this.renderJobsPage(), this.pollIntervalMs);
    }
  }

  async openResult(jobId: string): Promise<void> {
    this.state = { ...this.state, resultFocus: { jobId, clusterPath: [] } };
    this.loadedResult = null;
    this.treeIndex = null;
    await this.navigate("result");
  }

  private async renderResultPage(): Promise<void> {
    const focus = this.state.resultFocus;
    clear(this.content);
    if (!focus) {
      this.content.append(
        el("div", { class: "panel" }, el("p", { class: "notice" }, "open a result from the jobs page")),
      );
      return;
    }
    if (!this.loadedResult || this.loadedResult.job_id !== focus.jobId) {
      try {
        this.loadedResult = await this.api.jobResult(focus.jobId);
      } catch (error) {
        this.content.append(el("div", { class: "error-box" }, String(error)));
        return;
      }
      this.treeIndex = null;
    }
    const envelope = this.loadedResult;
    if (envelope.status === "failed") {
      this.content.append(
        el("div", { class: "error-box" }, `job failed: ${envelope.error_message ?? "unknown error"}`),
      );
      return;
    }
    if (envelope.status !== "succeeded" || !envelope.result) {
      this.content.append(
        el("div", { class: "panel" }, el("p", { class: "notice" }, `job is ${envelope.status}…`)),
      );
      this.pollTimer = setTimeout(() => {
        this.loadedResult = null;
        void this.renderResultPage();
      }, this.pollIntervalMs);
      return;
    }

    const result = envelope.result;
    if (result.kind === "discriminant") {
      this.content.append(renderDiscriminant(result.report as DiscriminantReport));
    } else if (result.kind === "anomaly") {
      this.content.append(
        renderOutliers((result.report as AnomalyReport).scores, 1000, "Test points by anomaly score"),
      );
    } else {
      const report = result.report as ClusteringReport;
      if (!this.treeIndex) this.treeIndex = indexTree(report);
      let path = focus.clusterPath;
      if (!isValidPath(this.treeIndex, path)) {
        path = rootPath(this.treeIndex);
        this.state = { ...this.state, resultFocus: { ...focus, clusterPath: path } };
      }
      this.content.append(renderOutliers(report.outliers, 1000));
      this.content.append(
        renderClusters(report, path, this.treeIndex, {
          onDescend: (nodeId) => this.moveFocus(descend(this.treeIndex!, path, nodeId)),
          onAscendTo: (depth) => this.moveFocus(ascendTo(path, depth)),
        }),
      );
    }
  }

  private moveFocus(path: number[]): void {
    const focus = this.state.resultFocus;
    if (!focus) return;
    this.state = { ...this.state, resultFocus: { ...focus, clusterPath: path } };
    void this.renderResultPage();
  }
}
