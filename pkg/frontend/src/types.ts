/**
 * Service payload types and the view models derived from them.
 *
 * The console performs zero risk computation: every number on screen is
 * copied from a service message. View-model builders only rearrange
 * fields; categories, bands and the safest-policy choice arrive
 * ready-made from the service.
 */

export type Category = "red" | "orange" | "green";

export interface RingBandPayload {
  low_m: number;
  median_m: number;
  high_m: number;
}

export interface RingEntryPayload {
  policy: string;
  md_m: number;
  category: Category;
  extrapolated: boolean;
  band: RingBandPayload | null;
}

export interface RingPayload {
  format_version: number;
  thresholds: { red_below_m: number; orange_below_m: number };
  entries: RingEntryPayload[];
  safest: string;
}

export interface UavPayload {
  x_m: number;
  y_m: number;
  z_m: number;
  heading_deg: number;
  pitch_deg: number;
  roll_deg: number;
  speed_mps: number;
}

export interface ThreatPayload {
  launch_time_s: number;
  position_m: [number, number, number];
  speed_mps: number;
  active: boolean;
}

export interface StreamMessage {
  clock_s: number;
  uav: UavPayload;
  ring: RingPayload | null;
  outcome: string;
  engaged_policy: string | null;
  commanded_heading_deg: number | null;
  threats: ThreatPayload[];
}

export interface ServiceError {
  code: string;
  message: string;
}

/** One 45-degree wedge of the operator display. */
export interface RingSegment {
  policy: string;
  mdMeters: number;
  category: Category;
  band: RingBandPayload | null;
  extrapolated: boolean;
  safest: boolean;
}

export interface RingViewModel {
  segments: RingSegment[]; // compass order N..NW, always 8
  safest: string;
  headingDeg: number; // aircraft icon orientation
}

/** Per-policy miss-distance band history over the session clock. */
export interface TimelinePoint {
  clockS: number;
  lowM: number;
  medianM: number;
  highM: number;
}

export interface TimelineModel {
  policies: Record<string, TimelinePoint[]>;
}

export function buildRingViewModel(
  ring: RingPayload,
  headingDeg: number,
): RingViewModel {
  return {
    segments: ring.entries.map((entry) => ({
      policy: entry.policy,
      mdMeters: entry.md_m,
      category: entry.category,
      band: entry.band,
      extrapolated: entry.extrapolated,
      safest: entry.policy === ring.safest,
    })),
    safest: ring.safest,
    headingDeg,
  };
}

export function emptyTimeline(): TimelineModel {
  return { policies: {} };
}

/**
 * Append one stream message to the timeline. Messages without a ring are
 * skipped; out-of-order clocks are rejected so the series stays strictly
 * increasing. Entries without bands use the point estimate for all three
 * band values (a degenerate band).
 */
export function appendToTimeline(model: TimelineModel, msg: StreamMessage): TimelineModel {
  if (msg.ring === null) {
    return model;
  }
  const policies = { ...model.policies };
  for (const entry of msg.ring.entries) {
    const series = policies[entry.policy] ? [...policies[entry.policy]!] : [];
    const last = series[series.length - 1];
    if (last !== undefined && msg.clock_s <= last.clockS) {
      continue;
    }
    const band = entry.band ?? {
      low_m: entry.md_m,
      median_m: entry.md_m,
      high_m: entry.md_m,
    };
    series.push({
      clockS: msg.clock_s,
      lowM: band.low_m,
      medianM: band.median_m,
      highM: band.high_m,
    });
    policies[entry.policy] = series;
  }
  return { policies };
}
