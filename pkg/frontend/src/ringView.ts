/**
 * Radial risk display: eight 45-degree arc segments around an aircraft
 * icon, rendered as an SVG string so it is testable without a DOM.
 *
 * Segment colors come verbatim from the view model's categories; the
 * safest segment gets a highlight outline and extrapolated segments are
 * hatched. Before any launch there is no ring and an explicit placeholder
 * is rendered instead.
 */

import { policyIndex } from "./compass.js";
import type { Category, RingViewModel } from "./types.js";

const FILL: Record<Category, string> = {
  red: "#c62828",
  orange: "#ef8c00",
  green: "#2e8b2e",
};

const SIZE = 320;
const CENTER = SIZE / 2;
const OUTER = 140;
const INNER = 86;

function polar(radius: number, bearingDeg: number): [number, number] {
  // compass bearing: 0 = up (North), clockwise positive
  const rad = ((bearingDeg - 90) * Math.PI) / 180;
  return [CENTER + radius * Math.cos(rad), CENTER + radius * Math.sin(rad)];
}

function wedgePath(bearingDeg: number): string {
  const a0 = bearingDeg - 22.5;
  const a1 = bearingDeg + 22.5;
  const [x0o, y0o] = polar(OUTER, a0);
  const [x1o, y1o] = polar(OUTER, a1);
  const [x0i, y0i] = polar(INNER, a0);
  const [x1i, y1i] = polar(INNER, a1);
  return (
    `M ${x0i.toFixed(2)} ${y0i.toFixed(2)} ` +
    `L ${x0o.toFixed(2)} ${y0o.toFixed(2)} ` +
    `A ${OUTER} ${OUTER} 0 0 1 ${x1o.toFixed(2)} ${y1o.toFixed(2)} ` +
    `L ${x1i.toFixed(2)} ${y1i.toFixed(2)} ` +
    `A ${INNER} ${INNER} 0 0 0 ${x0i.toFixed(2)} ${y0i.toFixed(2)} Z`
  );
}

function formatMd(meters: number): string {
  return meters >= 1000 ? `${(meters / 1000).toFixed(1)} km` : `${Math.round(meters)} m`;
}

export function renderRingPlaceholder(): string {
  return (
    `<svg class="ring" viewBox="0 0 ${SIZE} ${SIZE}" xmlns="http://www.w3.org/2000/svg">` +
    `<circle cx="${CENTER}" cy="${CENTER}" r="${OUTER}" fill="none" stroke="#555" stroke-dasharray="6 6"/>` +
    `<text x="${CENTER}" y="${CENTER}" text-anchor="middle" class="placeholder">no ring - no launch observed</text>` +
    `</svg>`
  );
}

export function renderRing(view: RingViewModel): string {
  const parts: string[] = [];
  parts.push(
    `<svg class="ring" viewBox="0 0 ${SIZE} ${SIZE}" xmlns="http://www.w3.org/2000/svg">`,
  );
  parts.push(
    `<defs><pattern id="hatch" width="6" height="6" patternTransform="rotate(45)" patternUnits="userSpaceOnUse">` +
      `<rect width="6" height="6" fill="none"/><line x1="0" y1="0" x2="0" y2="6" stroke="#222" stroke-width="2"/>` +
      `</pattern></defs>`,
  );
  for (const segment of view.segments) {
    const bearing = policyIndex(segment.policy) * 45;
    const path = wedgePath(bearing);
    const stroke = segment.safest ? "#ffffff" : "#1b1b1b";
    const strokeWidth = segment.safest ? 4 : 1;
    parts.push(
      `<path class="segment segment-${segment.policy}" data-policy="${segment.policy}" ` +
        `data-category="${segment.category}" data-safest="${segment.safest}" ` +
        `data-extrapolated="${segment.extrapolated}" d="${path}" ` +
        `fill="${FILL[segment.category]}" stroke="${stroke}" stroke-width="${strokeWidth}"/>`,
    );
    if (segment.extrapolated) {
      parts.push(`<path d="${path}" fill="url(#hatch)" opacity="0.45" pointer-events="none"/>`);
    }
    const [lx, ly] = polar((OUTER + INNER) / 2, bearing);
    parts.push(
      `<text x="${lx.toFixed(1)}" y="${ly.toFixed(1)}" text-anchor="middle" class="md-label">` +
        `${segment.policy} ${formatMd(segment.mdMeters)}</text>`,
    );
  }
  // aircraft icon in the center, rotated to the current heading
  parts.push(
    `<g class="aircraft" transform="rotate(${view.headingDeg.toFixed(1)} ${CENTER} ${CENTER})">` +
      `<polygon points="${CENTER},${CENTER - 26} ${CENTER - 14},${CENTER + 18} ${CENTER},${CENTER + 8} ${CENTER + 14},${CENTER + 18}" ` +
      `fill="#e8e8e8" stroke="#111"/></g>`,
  );
  parts.push(`</svg>`);
  return parts.join("");
}
