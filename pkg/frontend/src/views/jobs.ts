/** Jobs page: newest first, status badges, links into results. */

import { el } from "../dom.js";
import type { JobSummary } from "../types.js";

export function needsPolling(jobs: JobSummary[]): boolean {
  return jobs.some((job) => job.status === "pending" || job.status === "running");
}

export interface JobsViewHandlers {
  onOpenResult(jobId: string): void;
}

export function renderJobs(jobs: JobSummary[], handlers: JobsViewHandlers): HTMLElement {
  const panel = el("div", { class: "panel jobs-view" });
  panel.append(el("h2", {}, "Jobs"));
  if (jobs.length === 0) {
    panel.append(el("p", { class: "notice" }, "no jobs yet — configure one first"));
    return panel;
  }
  const table = el("table", { class: "jobs" });
  table.append(
    el(
      "thead",
      {},
      el(
        "tr",
        {},
        el("th", {}, "job"),
        el("th", {}, "operation"),
        el("th", {}, "status"),
        el("th", {}, "created"),
        el("th", {}, ""),
      ),
    ),
  );
  const body = el("tbody", {});
  for (const job of jobs) {
    const actions = el("td", {});
    if (job.status === "succeeded") {
      actions.append(
        el(
          "button",
          { class: "ghost", type: "button", onclick: () => handlers.onOpenResult(job.job_id) },
          "view result",
        ),
      );
    } else if (job.status === "failed") {
      actions.append(el("span", { class: "hint" }, job.error_message ?? "failed"));
    }
    body.append(
      el(
        "tr",
        { "data-job": job.job_id, "data-status": job.status },
        el("td", { title: job.job_id }, job.job_id.slice(0, 8)),
        el("td", {}, job.operation),
        el("td", {}, el("span", { class: `status-badge status-${job.status}` }, job.status)),
        el("td", {}, job.created_at),
        actions,
      ),
    );
  }
  table.append(body);
  panel.append(table);
  return panel;
}
