/**
 * Miss-distance band chart over the session clock, one band per policy,
 * rendered as an SVG string.
 *
 * Gaps in the stream stay visible: a break larger than GAP_S between
 * consecutive points splits the band instead of interpolating across it.
 */

import { POLICY_ORDER } from "./compass.js";
import type { TimelineModel, TimelinePoint } from "./types.js";

export const GAP_S = 1.6; // stream runs at 2 Hz; anything over ~3 periods is a gap

const WIDTH = 640;
const HEIGHT = 300;
const MARGIN = 36;

const POLICY_COLORS: Record<string, string> = {
  N: "#1f77b4",
  NE: "#ff7f0e",
  E: "#2ca02c",
  SE: "#d62728",
  S: "#9467bd",
  SW: "#8c564b",
  W: "#e377c2",
  NW: "#7f7f7f",
};

function splitOnGaps(points: TimelinePoint[]): TimelinePoint[][] {
  const runs: TimelinePoint[][] = [];
  let current: TimelinePoint[] = [];
  for (const point of points) {
    const last = current[current.length - 1];
    if (last !== undefined && point.clockS - last.clockS > GAP_S) {
      runs.push(current);
      current = [];
    }
    current.push(point);
  }
  if (current.length > 0) {
    runs.push(current);
  }
  return runs;
}

export function renderTimeline(model: TimelineModel): string {
  const all = Object.values(model.policies).flat();
  if (all.length === 0) {
    return `<svg class="timeline" viewBox="0 0 ${WIDTH} ${HEIGHT}"><text x="${WIDTH / 2}" y="${
      HEIGHT / 2
    }" text-anchor="middle" class="placeholder">no samples yet</text></svg>`;
  }
  const t0 = Math.min(...all.map((p) => p.clockS));
  const t1 = Math.max(...all.map((p) => p.clockS));
  const m1 = Math.max(...all.map((p) => p.highM), 1);
  const sx = (t: number) =>
    MARGIN + ((t - t0) / Math.max(t1 - t0, 1e-9)) * (WIDTH - 2 * MARGIN);
  const sy = (m: number) => HEIGHT - MARGIN - (m / m1) * (HEIGHT - 2 * MARGIN);

  const parts: string[] = [
    `<svg class="timeline" viewBox="0 0 ${WIDTH} ${HEIGHT}" xmlns="http://www.w3.org/2000/svg">`,
    `<line x1="${MARGIN}" y1="${HEIGHT - MARGIN}" x2="${WIDTH - MARGIN}" y2="${
      HEIGHT - MARGIN
    }" stroke="#888"/>`,
    `<line x1="${MARGIN}" y1="${MARGIN}" x2="${MARGIN}" y2="${HEIGHT - MARGIN}" stroke="#888"/>`,
  ];
  for (const policy of POLICY_ORDER) {
    const series = model.policies[policy];
    if (!series || series.length === 0) {
      continue;
    }
    const color = POLICY_COLORS[policy] ?? "#000";
    for (const run of splitOnGaps(series)) {
      if (run.length === 1) {
        const p = run[0]!;
        parts.push(
          `<circle class="band band-${policy}" cx="${sx(p.clockS).toFixed(1)}" cy="${sy(
            p.medianM,
          ).toFixed(1)}" r="2.5" fill="${color}"/>`,
        );
        continue;
      }
      const upper = run.map((p) => `${sx(p.clockS).toFixed(1)},${sy(p.highM).toFixed(1)}`);
      const lower = [...run]
        .reverse()
        .map((p) => `${sx(p.clockS).toFixed(1)},${sy(p.lowM).toFixed(1)}`);
      parts.push(
        `<polygon class="band band-${policy}" points="${upper.join(" ")} ${lower.join(
          " ",
        )}" fill="${color}" opacity="0.25"/>`,
      );
      const median = run.map((p) => `${sx(p.clockS).toFixed(1)},${sy(p.medianM).toFixed(1)}`);
      parts.push(
        `<polyline class="median median-${policy}" points="${median.join(
          " ",
        )}" fill="none" stroke="${color}" stroke-width="1.5"/>`,
      );
    }
  }
  parts.push(`</svg>`);
  return parts.join("");
}
