// View state and the pure rank-strip editing operations. Groups are
// ordered worst to best (matching the server's ascending criterion);
// each group is a tie class. All editors return a fresh groups array,
// or null when the edit would change nothing.

import { OrderingRow, Suggestion } from "./api.js";

export type ViewMode = "raster-grid" | "continuous-scale" | "2d-scatter";

export interface Viewport {
  x: number;
  y: number;
  z: number;
}

export interface ViewState {
  session: string;
  dims: 1 | 2;
  groups: string[][];
  groupsY: string[][];
  ordering: OrderingRow[];
  suggestions: Suggestion[];
  subsample: number;
  mode: ViewMode;
  viewport: Viewport;
  pending: boolean;
  notice: string;
  placements: Map<string, { x: number; y: number }>;
}

export function freshState(session: string, dims: 1 | 2): ViewState {
  return {
    session, dims,
    groups: [], groupsY: [],
    ordering: [], suggestions: [],
    subsample: 0,
    mode: "raster-grid",
    viewport: { x: 0, y: 0, z: 1 },
    pending: false,
    notice: "",
    placements: new Map(),
  };
}

// A drop target: before group `at`, or into it (tie). `at` may equal
// groups.length meaning after the last group.
export interface DropSpot {
  at: number;
  into: boolean;
}

export function rankedIds(groups: string[][]): Set<string> {
  const s = new Set<string>();
  for (const g of groups) for (const id of g) s.add(id);
  return s;
}

export function groupsEqual(a: string[][], b: string[][]): boolean {
  if (a.length !== b.length) return false;
  for (let i = 0; i < a.length; i++) {
    if (a[i].length !== b[i].length) return false;
    for (let j = 0; j < a[i].length; j++) {
      if (a[i][j] !== b[i][j]) return false;
    }
  }
  return true;
}

function locate(groups: string[][], id: string): [number, number] | null {
  for (let gi = 0; gi < groups.length; gi++) {
    const wi = groups[gi].indexOf(id);
    if (wi >= 0) return [gi, wi];
  }
  return null;
}

function withoutItem(groups: string[][], id: string): string[][] {
  const out: string[][] = [];
  for (const g of groups) {
    const kept = g.filter((x) => x !== id);
    if (kept.length) out.push(kept);
  }
  return out;
}

// Place `id` at `spot`, removing it from wherever it was. Spot indices
// refer to the groups as currently displayed (before removal).
export function applyDrop(
  groups: string[][], id: string, spot: DropSpot,
): string[][] | null {
  const loc = locate(groups, id);
  let { at, into } = spot;
  if (at < 0) at = 0;
  if (at > groups.length) at = groups.length;
  if (loc && into && at === loc[0]) return null;   // already in that group
  const rest = withoutItem(groups, id);
  if (loc && groups[loc[0]].length === 1) {
    // removing the item deleted its singleton group; spots past it shift
    if (at > loc[0]) at -= 1;
    else if (at === loc[0] && into) {
      // "into" its own old slot now points at the next group over
      if (at >= rest.length) { at = rest.length; into = false; }
    }
  }
  const out = rest.map((g) => g.slice());
  if (into && at < out.length) {
    out[at].push(id);
  } else {
    out.splice(Math.min(at, out.length), 0, [id]);
  }
  return groupsEqual(out, groups) ? null : out;
}

// Keyboard moves. dir is -1 toward worse (earlier), +1 toward better.
// Plain move: step out of a shared group, otherwise swap past the
// neighbor. Merge: join the adjacent group as a tie.
export function moveItem(
  groups: string[][], id: string, dir: -1 | 1, merge = false,
): string[][] | null {
  const loc = locate(groups, id);
  if (!loc) return null;
  const [gi] = loc;
  const alone = groups[gi].length === 1;
  if (merge) {
    const target = gi + dir;
    if (target < 0 || target >= groups.length) return null;
    return applyDrop(groups, id, { at: target, into: true });
  }
  if (!alone) {
    // split out of the tie: own group on the chosen side
    return applyDrop(groups, id, { at: dir < 0 ? gi : gi + 1, into: false });
  }
  const target = gi + dir;
  if (target < 0 || target > groups.length - 1) return null;
  // hop over the neighbor group
  return applyDrop(groups, id, { at: dir < 0 ? target : target + 1, into: false });
}

// Groups payload for the server; 2D sessions send both strips.
export function rankingBody(state: ViewState) {
  if (state.dims === 2) {
    return { groups: state.groups, groups_y: state.groupsY };
  }
  return { groups: state.groups };
}

export function placementsBody(state: ViewState) {
  const placements = [...state.placements.entries()].map(([id, p]) => ({
    id, x: p.x, y: p.y,
  }));
  return { placements };
}

// Strip contents must mirror the server ranking: every ranked item's
// server rank order must agree with its strip position order.
export function stripAgreesWithServer(
  groups: string[][], ordering: OrderingRow[], dim = 0,
): boolean {
  const rank = new Map<string, number>();
  for (const row of ordering) rank.set(row.id, row.rank[dim]);
  let prev = -Infinity;
  for (const g of groups) {
    const rs = g.map((id) => rank.get(id)).filter((r): r is number => r !== undefined);
    if (rs.length !== g.length) return false;
    const lo = Math.min(...rs);
    if (lo < prev) return false;
    prev = Math.max(...rs);
  }
  return true;
}
