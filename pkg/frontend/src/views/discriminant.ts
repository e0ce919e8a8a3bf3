/** Ranked horizontal bars of attribute discrimination scores. */

import { el } from "../dom.js";
import { formatScore, humanizeField, splitCountAttribute } from "../format.js";
import type { DiscriminantReport } from "../types.js";

export function renderDiscriminant(report: DiscriminantReport, limit = 25): HTMLElement {
  const panel = el("div", { class: "panel discriminant-view" });
  panel.append(el("h2", {}, "Discriminating attributes"));

  if (report.attributes.length === 0) {
    panel.append(el("p", { class: "notice" }, "no discriminating attributes"));
    return panel;
  }

  const rows = [...report.attributes]
    .sort((a, b) => b.score - a.score || a.attribute.localeCompare(b.attribute))
    .slice(0, limit);
  for (const entry of rows) {
    const parts = splitCountAttribute(entry.attribute);
    const label = parts
      ? el(
          "span",
          { class: "bar-label", title: entry.attribute },
          humanizeField(parts.field),
          " ",
          el("span", { class: "qualifier" }, parts.value),
        )
      : el("span", { class: "bar-label", title: entry.attribute }, entry.attribute);
    panel.append(
      el(
        "div",
        { class: "bar-row", "data-attribute": entry.attribute, "data-score": String(entry.score) },
        label,
        el(
          "div",
          { class: "bar-track" },
          el("div", { class: "bar-fill", style: `width: ${entry.score * 100}%` }),
        ),
        el("span", { class: "bar-value" }, formatScore(entry.score)),
      ),
    );
  }
  panel.append(
    el("p", { class: "hint" }, `separation ${report.separation.toFixed(3)}`),
  );
  return panel;
}
