/** Build the timeline SVG from layout JSON.
 *
 * Geometry comes verbatim from the service; this module only mirrors it
 * into DOM nodes, adds the playhead/selection chrome and tags boxes with
 * data attributes for hit testing.
 */

import type { LayoutJson, LayoutTrack } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof SVGElementTagNameMap>(
  name: K,
  attrs: Record<string, string>,
  text?: string,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, name);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function laneHeight(track: LayoutTrack): number {
  return Math.floor((track.heightPx - 4) / track.lanesUsed);
}

function renderTrack(svg: SVGSVGElement, track: LayoutTrack, gutter: number): void {
  const group = el("g", { "data-track-id": track.typeId });
  group.appendChild(el("text", {
    class: "gutter-label",
    x: "4",
    y: String(track.yTop + 16),
  }, track.typeId));
  const lane = laneHeight(track);
  if (track.mode === "boxes") {
    for (const box of track.boxes) {
      const y = track.yTop + 2 + box.lane * lane;
      const attrs: Record<string, string> = {
        "data-annotation-id": box.annotationId,
        x: String(gutter + box.x),
        y: String(y),
        width: String(box.w),
        height: String(Math.max(1, lane - 2)),
      };
      if (typeof box.color === "string") {
        attrs.fill = box.color;
      } else {
        const gid = `ui-g-${box.annotationId}`;
        const grad = el("linearGradient", { id: gid });
        grad.appendChild(el("stop", { offset: "0", "stop-color": box.color.start }));
        grad.appendChild(el("stop", { offset: "1", "stop-color": box.color.end }));
        svg.querySelector("defs")!.appendChild(grad);
        attrs.fill = `url(#${gid})`;
      }
      group.appendChild(el("rect", attrs));
      if (box.label !== null && box.label !== undefined) {
        group.appendChild(el("text", {
          class: "box-label",
          x: String(gutter + box.x + 3),
          y: String(y + Math.floor(lane / 2) + 4),
        }, box.label));
      }
    }
  } else {
    for (const bin of track.bins) {
      group.appendChild(el("rect", {
        "data-bin-count": String(bin.count),
        x: String(gutter + bin.x),
        y: String(track.yTop + 2),
        width: String(bin.w),
        height: String(track.heightPx - 4),
        fill: bin.color,
      }));
    }
  }
  svg.appendChild(group);
}

export function renderTimeline(layout: LayoutJson, selectedId: string | null): SVGSVGElement {
  const width = layout.gutterPx + layout.viewport.widthPx;
  const svg = el("svg", {
    xmlns: SVG_NS,
    width: String(width),
    height: String(layout.totalHeightPx),
    "font-family": "sans-serif",
    "font-size": "12",
  }) as unknown as SVGSVGElement;
  svg.appendChild(el("defs", {}));
  svg.appendChild(el("rect", {
    class: "background", x: "0", y: "0",
    width: String(width), height: String(layout.totalHeightPx),
  }));
  const axis = el("g", { class: "axis" });
  for (const tick of layout.ticks) {
    const x = String(layout.gutterPx + tick.x);
    axis.appendChild(el("line", { x1: x, x2: x, y1: "16", y2: "20" }));
    axis.appendChild(el("text", { x, y: "14", "text-anchor": "middle" }, tick.label));
  }
  svg.appendChild(axis);
  for (const track of layout.tracks) renderTrack(svg, track, layout.gutterPx);

  if (selectedId !== null) {
    const hit = svg.querySelector(`rect[data-annotation-id="${selectedId}"]`);
    if (hit) {
      svg.appendChild(el("rect", {
        class: "selection-outline",
        x: hit.getAttribute("x")!,
        y: hit.getAttribute("y")!,
        width: hit.getAttribute("width")!,
        height: hit.getAttribute("height")!,
      }));
    }
  }

  svg.appendChild(el("line", {
    class: "playhead", x1: "-10", x2: "-10",
    y1: "0", y2: String(layout.totalHeightPx), visibility: "hidden",
  }));
  return svg;
}

/** Classify a click target inside the timeline SVG. */
export function hitTest(target: Element): { kind: "annotation"; id: string }
  | { kind: "bin"; count: number }
  | { kind: "background" } {
  const annotationId = target.getAttribute?.("data-annotation-id");
  if (annotationId) return { kind: "annotation", id: annotationId };
  const binCount = target.getAttribute?.("data-bin-count");
  if (binCount) return { kind: "bin", count: Number(binCount) };
  return { kind: "background" };
}
