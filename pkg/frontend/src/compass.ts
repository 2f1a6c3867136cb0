/** The fixed compass order of the eight evasive policies, clockwise from North. */

export const POLICY_ORDER = ["N", "NE", "E", "SE", "S", "SW", "W", "NW"] as const;

export type PolicyName = (typeof POLICY_ORDER)[number];

/** Absolute heading commanded by clicking a segment: index x 45 degrees. */
export function segmentHeadingDeg(index: number): number {
  if (!Number.isInteger(index) || index < 0 || index > 7) {
    throw new Error(`segment index ${index} outside 0..7`);
  }
  return index * 45;
}

export function policyIndex(name: string): number {
  const idx = POLICY_ORDER.indexOf(name as PolicyName);
  if (idx < 0) {
    throw new Error(`unknown policy ${name}`);
  }
  return idx;
}
