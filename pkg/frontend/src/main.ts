/**
 * Browser wiring: connect to the service, render the ring / map /
 * timeline on every stream message, and forward operator commands.
 *
 * Everything on screen is a re-rendering of service payloads; the only
 * client-side state is the latest message, the accumulated timeline, and
 * the last acknowledged command.
 */

import { ServiceClient, applyStreamMessage, initialState } from "./client.js";
import { segmentHeadingDeg, policyIndex } from "./compass.js";
import { renderMap } from "./map.js";
import { renderRing, renderRingPlaceholder } from "./ringView.js";
import { renderTimeline } from "./timeline.js";
import {
  appendToTimeline,
  buildRingViewModel,
  emptyTimeline,
  type StreamMessage,
} from "./types.js";

const httpPost = async (path: string, body: unknown) => {
  const response = await fetch(path, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  return { status: response.status, body: await response.json().catch(() => null) };
};

let state = initialState();
let timeline = emptyTimeline();
const client = new ServiceClient(httpPost);

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id}`);
  }
  return node;
}

function renderAll(): void {
  const msg = state.latest;
  if (!msg) {
    return;
  }
  el("ring").innerHTML = msg.ring
    ? renderRing(buildRingViewModel(msg.ring, msg.uav.heading_deg))
    : renderRingPlaceholder();
  el("map").innerHTML = renderMap(msg);
  el("timeline").innerHTML = renderTimeline(timeline);
  el("clock").textContent = `t = ${msg.clock_s.toFixed(1)} s`;
  el("outcome").textContent = msg.outcome;
  el("outcome").className = `outcome outcome-${msg.outcome}`;
  const actual = msg.uav.heading_deg.toFixed(0);
  const commanded =
    state.commandedHeadingDeg !== null ? state.commandedHeadingDeg.toFixed(0) : "-";
  el("heading").textContent = `heading ${actual}° (commanded ${commanded}°)`;
  el("engaged").textContent = state.engagedPolicy
    ? `engaged policy: ${state.engagedPolicy}`
    : "steering by heading";
  el("error-banner").textContent = state.lastError
    ? `${state.lastError.code}: ${state.lastError.message}`
    : "";

  for (const segment of Array.from(document.querySelectorAll<SVGPathElement>(".segment"))) {
    segment.addEventListener("click", () => {
      const policy = segment.dataset.policy!;
      void commandHeading(segmentHeadingDeg(policyIndex(policy)));
    });
  }
}

async function commandHeading(deg: number): Promise<void> {
  state = await client.sendHeading(state, deg);
  renderAll();
}

function connectStream(): void {
  const ws = new WebSocket(`ws://${location.host}/api/v1/stream`);
  ws.onmessage = (event) => {
    const msg = JSON.parse(event.data) as StreamMessage;
    if (!("clock_s" in msg)) {
      return; // a no-session notice, not a snapshot
    }
    state = applyStreamMessage(state, msg);
    timeline = appendToTimeline(timeline, msg);
    renderAll();
  };
  ws.onclose = () => setTimeout(connectStream, 1000);
}

export function start(): void {
  el("engage-safest").addEventListener("click", () => {
    void client.engageSafest(state).then((next) => {
      state = next;
      renderAll();
    });
  });
  el("heading-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const input = el("heading-input") as HTMLInputElement;
    const deg = Number(input.value);
    if (Number.isFinite(deg)) {
      void commandHeading(((deg % 360) + 360) % 360);
    }
  });
  connectStream();
}

if (typeof document !== "undefined" && document.getElementById("ring")) {
  start();
}
