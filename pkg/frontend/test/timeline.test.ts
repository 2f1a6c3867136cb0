import { describe, expect, it } from "vitest";

import { renderTimeline } from "../src/timeline.js";
import { appendToTimeline, emptyTimeline, type TimelineModel } from "../src/types.js";
import { loadRecordedSession } from "./fixture.js";

function series(points: Array<[number, number, number, number]>): TimelineModel {
  return {
    policies: {
      N: points.map(([clockS, lowM, medianM, highM]) => ({ clockS, lowM, medianM, highM })),
    },
  };
}

describe("timeline rendering", () => {
  it("renders the full recorded stream into per-policy bands", () => {
    const recorded = loadRecordedSession();
    let model = emptyTimeline();
    for (const msg of recorded.messages) {
      model = appendToTimeline(model, msg);
    }
    const svg = renderTimeline(model);
    for (const policy of ["N", "SE", "NW"]) {
      expect(svg).toContain(`band-${policy}`);
    }
  });

  it("constant estimates draw a flat band", () => {
    const model = series([
      [0, 5000, 6000, 7000],
      [1, 5000, 6000, 7000],
      [2, 5000, 6000, 7000],
    ]);
    const svg = renderTimeline(model);
    const median = svg.match(/<polyline class="median median-N" points="([^"]+)"/);
    expect(median).not.toBeNull();
    const ys = median![1]!.split(" ").map((pair) => pair.split(",")[1]);
    expect(new Set(ys).size).toBe(1);
  });

  it("a single sample degenerates to a point", () => {
    const svg = renderTimeline(series([[3, 1000, 2000, 3000]]));
    expect(svg).toContain("<circle");
    expect(svg).not.toContain("<polygon");
  });

  it("a stream gap splits the band instead of interpolating", () => {
    const svg = renderTimeline(
      series([
        [0, 1000, 2000, 3000],
        [0.5, 1000, 2000, 3000],
        [10, 1000, 2000, 3000],
        [10.5, 1000, 2000, 3000],
      ]),
    );
    expect(svg.match(/<polygon class="band band-N"/g)).toHaveLength(2);
  });

  it("renders a placeholder with no samples", () => {
    expect(renderTimeline(emptyTimeline())).toContain("no samples yet");
  });
});
