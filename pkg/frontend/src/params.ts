/** Bounded edits over the configuration string.
 *
 * The client never re-implements the configuration language: it treats the
 * fragment as an ordered key=value list, rewrites only the parts its
 * controls own (tracks, from, to) and leaves everything else untouched.
 * Canonicalization is delegated to the service's /canonical endpoint, the
 * single source of truth for the language.
 */

import { formatTimecode } from "./timecode.js";

export type Param = [key: string, rawValue: string];

export function parseParams(fragment: string): Param[] {
  if (fragment === "") return [];
  return fragment.split("&").map((part) => {
    const eq = part.indexOf("=");
    return eq < 0 ? [part, ""] : [part.slice(0, eq), part.slice(eq + 1)];
  });
}

export function buildFragment(params: Param[]): string {
  return params.map(([k, v]) => `${k}=${v}`).join("&");
}

export function getParam(params: Param[], key: string): string | null {
  const hit = params.find(([k]) => k === key);
  return hit ? hit[1] : null;
}

export function setParam(params: Param[], key: string, value: string): Param[] {
  const next: Param[] = [];
  let replaced = false;
  for (const [k, v] of params) {
    if (k === key) {
      if (!replaced) next.push([key, value]);
      replaced = true;
    } else {
      next.push([k, v]);
    }
  }
  if (!replaced) next.push([key, value]);
  return next;
}

export function removeParam(params: Param[], key: string): Param[] {
  return params.filter(([k]) => k !== key);
}

/** The displayed track list: an explicit tracks value, or all package types. */
export function currentTracks(params: Param[], packageOrder: string[]): string[] {
  const raw = getParam(params, "tracks");
  if (raw === null || raw === "*" || raw === "%2A") return packageOrder.slice();
  return raw.split(",").filter((t) => t.length > 0);
}

export class LastTrackError extends Error {
  constructor() {
    super("the last visible track cannot be removed");
  }
}

/**
 * Toggle one track. Removing is rejected when it would empty the view;
 * re-adding inserts the track before the first displayed track that follows
 * it in package declaration order (so toggling off and on restores the
 * canonical position).
 */
export function toggleTrack(current: string[], packageOrder: string[], typeId: string): string[] {
  if (current.includes(typeId)) {
    if (current.length === 1) throw new LastTrackError();
    return current.filter((t) => t !== typeId);
  }
  const rank = new Map(packageOrder.map((t, i) => [t, i]));
  const own = rank.get(typeId);
  if (own === undefined) return current;
  const index = current.findIndex((t) => (rank.get(t) ?? Infinity) > own);
  const next = current.slice();
  next.splice(index < 0 ? next.length : index, 0, typeId);
  return next;
}

export function reorderTrack(current: string[], typeId: string, newIndex: number): string[] {
  const from = current.indexOf(typeId);
  if (from < 0) return current;
  const next = current.slice();
  next.splice(from, 1);
  next.splice(Math.max(0, Math.min(newIndex, next.length)), 0, typeId);
  return next;
}

/** Write an explicit track list into the fragment (replacing any wildcard). */
export function withTracks(params: Param[], tracks: string[]): Param[] {
  return setParam(params, "tracks", tracks.join(","));
}

/** Write the window; the all-media window folds back to the default keys. */
export function withWindow(
  params: Param[],
  fromMs: number,
  toMs: number,
  duration: number,
): Param[] {
  let next = params;
  if (fromMs <= 0 && toMs >= duration) {
    next = removeParam(next, "from");
    return removeParam(next, "to");
  }
  next = fromMs > 0
    ? setParam(next, "from", formatTimecode(fromMs))
    : removeParam(next, "from");
  return setParam(next, "to", formatTimecode(toMs));
}
