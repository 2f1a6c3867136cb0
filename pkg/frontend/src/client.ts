/**
 * Service client: command posting plus the 2 Hz stream, with the
 * transports injected so everything is testable without a browser.
 *
 * Commands are fire-and-acknowledge: the commanded value is shown
 * optimistically and rolled back if the service rejects it; service error
 * codes and messages are surfaced verbatim.
 */

import type { ServiceError, StreamMessage } from "./types.js";

export interface HttpResponse {
  status: number;
  body: any;
}

export type HttpPost = (path: string, body: unknown) => Promise<HttpResponse>;

export interface ConsoleState {
  latest: StreamMessage | null;
  commandedHeadingDeg: number | null;
  engagedPolicy: string | null;
  lastError: ServiceError | null;
}

export function initialState(): ConsoleState {
  return { latest: null, commandedHeadingDeg: null, engagedPolicy: null, lastError: null };
}

export function applyStreamMessage(state: ConsoleState, msg: StreamMessage): ConsoleState {
  return {
    ...state,
    latest: msg,
    // the service's acknowledged values win over optimistic ones
    commandedHeadingDeg: msg.commanded_heading_deg,
    engagedPolicy: msg.engaged_policy,
  };
}

function extractError(response: HttpResponse): ServiceError | null {
  if (response.status < 400) {
    return null;
  }
  const err = response.body?.error;
  return err ? { code: err.code, message: err.message } : {
    code: "http_" + response.status,
    message: "request failed",
  };
}

export class ServiceClient {
  private post: HttpPost;
  readonly base: string;

  constructor(post: HttpPost, base = "/api/v1") {
    this.post = post;
    this.base = base;
  }

  async sendHeading(state: ConsoleState, headingDeg: number): Promise<ConsoleState> {
    const before = state.commandedHeadingDeg;
    const optimistic: ConsoleState = {
      ...state,
      commandedHeadingDeg: headingDeg,
      engagedPolicy: null,
      lastError: null,
    };
    const response = await this.post(`${this.base}/session/command`, {
      heading_deg: headingDeg,
    });
    const error = extractError(response);
    if (error) {
      return { ...optimistic, commandedHeadingDeg: before, lastError: error };
    }
    return optimistic;
  }

  async engagePolicy(state: ConsoleState, policy: string): Promise<ConsoleState> {
    const before = state.engagedPolicy;
    const optimistic: ConsoleState = { ...state, engagedPolicy: policy, lastError: null };
    const response = await this.post(`${this.base}/session/command`, {
      engage_policy: policy,
    });
    const error = extractError(response);
    if (error) {
      return { ...optimistic, engagedPolicy: before, lastError: error };
    }
    return optimistic;
  }

  /** Engage whatever the service currently reports as safest. */
  async engageSafest(state: ConsoleState): Promise<ConsoleState> {
    const safest = state.latest?.ring?.safest;
    if (!safest) {
      return {
        ...state,
        lastError: { code: "no_ring", message: "no ring to take the safest policy from" },
      };
    }
    return this.engagePolicy(state, safest);
  }
}
