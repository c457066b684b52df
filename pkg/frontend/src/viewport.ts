/** Pure time-window math for pan and zoom gestures.
 *
 * The UI does no layout geometry of its own; these helpers only translate
 * between viewport pixels and media time (the inverse of the service's
 * time-to-x mapping) and move the [from, to) window under the constraints:
 * the window stays inside [0, duration] and never shrinks below 1 second.
 */

import { clamp } from "./timecode.js";

export const MIN_WINDOW_MS = 1000;
export const ZOOM_STEP_FACTOR = 1.25;

export interface TimeWindow {
  from: number;
  to: number;
}

/** Viewport pixel offset -> media time, un-clamped. */
export function pxToTime(x: number, window: TimeWindow, widthPx: number): number {
  return window.from + (x / widthPx) * (window.to - window.from);
}

/** Media time -> fractional viewport pixel offset, clamped to the viewport. */
export function timeToPx(t: number, window: TimeWindow, widthPx: number): number {
  const x = ((t - window.from) / (window.to - window.from)) * widthPx;
  return clamp(x, 0, widthPx);
}

function clampWindow(from: number, to: number, duration: number): TimeWindow {
  let span = to - from;
  span = clamp(span, MIN_WINDOW_MS, duration);
  if (from < 0) from = 0;
  if (from + span > duration) from = duration - span;
  if (from < 0) {
    from = 0;
    span = duration;
  }
  return { from: Math.round(from), to: Math.round(from + span) };
}

/** Shift the window by a pixel drag; positive deltaPx drags content left. */
export function panWindow(
  window: TimeWindow,
  deltaPx: number,
  widthPx: number,
  duration: number,
): TimeWindow {
  const deltaMs = (deltaPx / widthPx) * (window.to - window.from);
  return clampWindow(window.from + deltaMs, window.to + deltaMs, duration);
}

/**
 * Scale the window around the time under the cursor: `steps` wheel notches,
 * positive zooming in by 1.25 per step. The anchor keeps its pixel position
 * (up to clamping at the media edges).
 */
export function zoomWindow(
  window: TimeWindow,
  anchorPx: number,
  steps: number,
  widthPx: number,
  duration: number,
): TimeWindow {
  const anchorTime = pxToTime(anchorPx, window, widthPx);
  const factor = Math.pow(ZOOM_STEP_FACTOR, -steps);
  const span = (window.to - window.from) * factor;
  const ratio = anchorPx / widthPx;
  const from = anchorTime - span * ratio;
  return clampWindow(from, from + span, duration);
}
