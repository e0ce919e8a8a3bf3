import { describe, expect, it } from "vitest";

import { jitterOffsets, renderOutliers } from "../src/views/outliers.js";
import { anomalyReport } from "./helpers.js";

const WIDTH = 1000;

describe("outlier track", () => {
  it("places every point at x linear in its score, within 1px at 1000px", () => {
    const scores = anomalyReport().scores;
    const view = renderOutliers(scores, WIDTH);
    const circles = [...view.querySelectorAll("circle")];
    expect(circles.length).toBe(scores.length);
    for (const circle of circles) {
      const score = Number(circle.getAttribute("data-score"));
      const cx = Number(circle.getAttribute("cx"));
      expect(Math.abs(cx - score * WIDTH)).toBeLessThanOrEqual(1);
    }
  });

  it("jitters equal scores vertically, never horizontally", () => {
    const twin = [
      { entity_id: "a", score: 0.4, p_value: 0.6, density_rank: 1 },
      { entity_id: "b", score: 0.4, p_value: 0.6, density_rank: 1 },
    ];
    const view = renderOutliers(twin, WIDTH);
    const [first, second] = [...view.querySelectorAll("circle")];
    expect(first!.getAttribute("cx")).toBe(second!.getAttribute("cx"));
    expect(first!.getAttribute("cy")).not.toBe(second!.getAttribute("cy"));
  });

  it("keeps the first point of a pile centered and spreads the rest", () => {
    expect(jitterOffsets(5)).toEqual([0, -9, 9, -18, 18]);
  });

  it("reveals entity id and score on hover", () => {
    const scores = anomalyReport().scores;
    const view = renderOutliers(scores, WIDTH);
    const title = view.querySelector("circle title")!;
    expect(title.textContent).toContain(scores[0]!.entity_id);
    expect(title.textContent).toContain("score");
  });

  it("renders an empty track with a caption when there are no outliers", () => {
    const view = renderOutliers([], WIDTH);
    expect(view.querySelectorAll("circle").length).toBe(0);
    expect(view.textContent).toContain("no outliers");
  });

  it("a 0.9 score sits at 90% of the track width", () => {
    const view = renderOutliers(
      [{ entity_id: "x", score: 0.9, p_value: 0.1, density_rank: 2 }],
      WIDTH,
    );
    const circle = view.querySelector("circle")!;
    expect(Number(circle.getAttribute("cx"))).toBeCloseTo(900, 6);
  });
});
