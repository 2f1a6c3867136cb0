import { describe, expect, it } from "vitest";

import { POLICY_ORDER } from "../src/compass.js";
import {
  appendToTimeline,
  buildRingViewModel,
  emptyTimeline,
  type StreamMessage,
} from "../src/types.js";
import { loadRecordedSession } from "./fixture.js";

const recorded = loadRecordedSession();

describe("ring view model from a recorded 3-threat session", () => {
  it("the recording is a 3-threat session", () => {
    expect(recorded.scenario_threats).toBe(3);
    const last = recorded.messages[recorded.messages.length - 1]!;
    expect(last.threats.length).toBe(3);
  });

  it("mirrors every service ring field-for-field", () => {
    let checked = 0;
    for (const msg of recorded.messages) {
      if (!msg.ring) {
        continue;
      }
      const view = buildRingViewModel(msg.ring, msg.uav.heading_deg);
      expect(view.segments.map((s) => s.policy)).toEqual([...POLICY_ORDER]);
      msg.ring.entries.forEach((entry, i) => {
        const segment = view.segments[i]!;
        expect(segment.policy).toBe(entry.policy);
        expect(segment.mdMeters).toBe(entry.md_m);
        expect(segment.category).toBe(entry.category);
        expect(segment.band).toEqual(entry.band);
        expect(segment.extrapolated).toBe(entry.extrapolated);
        expect(segment.safest).toBe(entry.policy === msg.ring!.safest);
      });
      expect(view.safest).toBe(msg.ring.safest);
      expect(view.segments.filter((s) => s.safest)).toHaveLength(1);
      checked += 1;
    }
    expect(checked).toBeGreaterThan(10);
  });

  it("never recomputes categories from thresholds", () => {
    // categories are copied, so even a contradictory payload passes through
    const msg = recorded.messages.find((m) => m.ring)!;
    const twisted = JSON.parse(JSON.stringify(msg.ring));
    twisted.entries[0].category = "green";
    twisted.entries[0].md_m = 0;
    const view = buildRingViewModel(twisted, 0);
    expect(view.segments[0]!.category).toBe("green");
  });
});

describe("timeline model from the recorded stream", () => {
  it("accumulates strictly increasing clocks with ordered bands", () => {
    let model = emptyTimeline();
    for (const msg of recorded.messages) {
      model = appendToTimeline(model, msg);
    }
    for (const policy of POLICY_ORDER) {
      const series = model.policies[policy];
      expect(series).toBeDefined();
      expect(series!.length).toBeGreaterThan(10);
      for (let i = 1; i < series!.length; i++) {
        expect(series![i]!.clockS).toBeGreaterThan(series![i - 1]!.clockS);
      }
      for (const point of series!) {
        expect(point.lowM).toBeLessThanOrEqual(point.medianM);
        expect(point.medianM).toBeLessThanOrEqual(point.highM);
      }
    }
  });

  it("skips messages without a ring", () => {
    const noRing: StreamMessage = {
      ...recorded.messages[0]!,
      ring: null,
    };
    const model = appendToTimeline(emptyTimeline(), noRing);
    expect(Object.keys(model.policies)).toHaveLength(0);
  });
});
