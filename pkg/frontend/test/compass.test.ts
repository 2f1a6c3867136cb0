import { describe, expect, it } from "vitest";

import { POLICY_ORDER, policyIndex, segmentHeadingDeg } from "../src/compass.js";

describe("segment to compass mapping", () => {
  it("has exactly eight policies, N first, clockwise", () => {
    expect(POLICY_ORDER).toEqual(["N", "NE", "E", "SE", "S", "SW", "W", "NW"]);
  });

  it("maps every segment index to index x 45 degrees", () => {
    for (let index = 0; index < 8; index++) {
      expect(segmentHeadingDeg(index)).toBe(index * 45);
    }
  });

  it("policyIndex inverts the order", () => {
    POLICY_ORDER.forEach((name, index) => {
      expect(policyIndex(name)).toBe(index);
      expect(segmentHeadingDeg(policyIndex(name))).toBe(index * 45);
    });
  });

  it("rejects unknown names and out-of-range indices", () => {
    expect(() => policyIndex("NNE")).toThrow();
    expect(() => segmentHeadingDeg(8)).toThrow();
    expect(() => segmentHeadingDeg(-1)).toThrow();
  });

  it("clicking due south commands 180", () => {
    expect(segmentHeadingDeg(policyIndex("S"))).toBe(180);
  });
});
