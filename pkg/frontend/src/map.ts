/**
 * Threat map: UAV position plus launch markers with launch-time
 * annotations. Launch positions and times are all the operator knows;
 * live missile positions are never drawn (the service never sends them).
 */

import type { StreamMessage } from "./types.js";

const SIZE = 320;

export function renderMap(msg: StreamMessage): string {
  const points = [
    [msg.uav.x_m, msg.uav.y_m],
    ...msg.threats.map((t) => [t.position_m[0], t.position_m[1]]),
  ];
  const xs = points.map((p) => p[0]!);
  const ys = points.map((p) => p[1]!);
  const span = Math.max(
    Math.max(...xs) - Math.min(...xs),
    Math.max(...ys) - Math.min(...ys),
    1000,
  );
  const cx = (Math.max(...xs) + Math.min(...xs)) / 2;
  const cy = (Math.max(...ys) + Math.min(...ys)) / 2;
  const scale = (SIZE * 0.8) / span;
  // map north up: screen x = east offset, screen y = -north offset
  const px = (north: number, east: number): [number, number] => [
    SIZE / 2 + (east - cy) * scale,
    SIZE / 2 - (north - cx) * scale,
  ];

  const parts = [
    `<svg class="map" viewBox="0 0 ${SIZE} ${SIZE}" xmlns="http://www.w3.org/2000/svg">`,
  ];
  const [ux, uy] = px(msg.uav.x_m, msg.uav.y_m);
  parts.push(
    `<g transform="rotate(${msg.uav.heading_deg.toFixed(1)} ${ux.toFixed(1)} ${uy.toFixed(1)})">` +
      `<polygon class="uav" points="${ux},${uy - 9} ${ux - 6},${uy + 7} ${ux + 6},${uy + 7}" fill="#4ea3ff"/></g>`,
  );
  msg.threats.forEach((threat, i) => {
    const [tx, ty] = px(threat.position_m[0], threat.position_m[1]);
    parts.push(
      `<g class="launch" data-index="${i}">` +
        `<circle cx="${tx.toFixed(1)}" cy="${ty.toFixed(1)}" r="5" fill="${threat.active ? "#d33" : "#777"}"/>` +
        `<text x="${(tx + 8).toFixed(1)}" y="${(ty + 4).toFixed(1)}" class="annotation">t=${threat.launch_time_s.toFixed(0)}s</text>` +
        `</g>`,
    );
  });
  parts.push(`</svg>`);
  return parts.join("");
}
