import type { Placement } from './types.js';

/** Pure pointer math for the optimistic local placement shown during a drag.
 * No clamping happens here: the server's clamp is authoritative and the
 * display snaps to it when the release PATCH is acknowledged. */

export function movedPlacement(start: Placement, dx: number, dy: number): Placement {
  return {
    anchor_x: Math.round(start.anchor_x + dx),
    anchor_y: Math.round(start.anchor_y + dy),
    scale: start.scale,
  };
}

export function scaledPlacement(p: Placement, factor: number): Placement {
  return { ...p, scale: Math.max(1e-3, p.scale * factor) };
}

export function samePlacement(a: Placement | null, b: Placement | null): boolean {
  if (a === null || b === null) return a === b;
  return a.anchor_x === b.anchor_x && a.anchor_y === b.anchor_y && a.scale === b.scale;
}
