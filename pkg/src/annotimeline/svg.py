"""Byte-stable SVG serialization of timeline layouts.

Element order, attribute order (alphabetical) and number formatting are all
fixed, so rendering the same layout always yields identical bytes. Only a
small SVG 1.1 subset is emitted: svg, defs, linearGradient, stop, g, rect,
line and text, with no external resources.
"""

from __future__ import annotations

from .colors import Gradient, Solid, format_color
from .layout import LaidBox, TimelineLayout, TrackLayout, TrackMode

BACKGROUND = "#ffffff"
AXIS_LINE = "#888888"
AXIS_TEXT = "#333333"
GUTTER_TEXT = "#000000"
FONT_SIZE_PX = 12


def format_number(v: float) -> str:
    """Fixed-point, at most 2 decimals, trailing zeros trimmed, -0 -> 0."""
    if isinstance(v, int):
        return str(v)
    text = f"{v:.2f}"
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return "0" if text == "-0" else text


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _esc_attr(text: str) -> str:
    return _esc(text).replace('"', "&quot;")


def _tag(name: str, attrs: dict[str, str], text: str | None = None, close: bool = True) -> str:
    body = "".join(f' {k}="{_esc_attr(v)}"' for k, v in sorted(attrs.items()))
    if text is not None:
        return f"<{name}{body}>{_esc(text)}</{name}>"
    return f"<{name}{body}/>" if close else f"<{name}{body}>"


def _luminance(color) -> float:
    return (0.2126 * color.r + 0.7152 * color.g + 0.0722 * color.b) / 255.0


def gradient_id(annotation_id: str) -> str:
    return f"g-{annotation_id}"


def _box_sort_key(box: LaidBox) -> tuple[int, int, str]:
    return (box.lane, box.x, box.annotation_id)


def _render_defs(layout: TimelineLayout, out: list[str]) -> None:
    gradients = []
    for track in layout.tracks:
        for box in track.boxes:
            if isinstance(box.color, Gradient):
                gradients.append((gradient_id(box.annotation_id), box.color))
    if not gradients:
        return
    gradients.sort(key=lambda item: item[0])
    out.append("<defs>")
    for gid, grad in gradients:
        out.append(_tag("linearGradient", {"id": gid}, close=False))
        out.append(_tag("stop", {"offset": "0", "stop-color": format_color(grad.start)}))
        out.append(_tag("stop", {"offset": "1", "stop-color": format_color(grad.end)}))
        out.append("</linearGradient>")
    out.append("</defs>")


def _render_axis(layout: TimelineLayout, out: list[str]) -> None:
    gutter = layout.gutter_px
    out.append(_tag("g", {"data-role": "axis"}, close=False))
    for tick in layout.ticks:
        x = format_number(gutter + tick.x)
        out.append(_tag("line", {
            "stroke": AXIS_LINE, "x1": x, "x2": x,
            "y1": format_number(16), "y2": format_number(20),
        }))
        out.append(_tag("text", {
            "fill": AXIS_TEXT, "text-anchor": "middle", "x": x, "y": format_number(14),
        }, text=tick.label))
    out.append("</g>")


def _render_track(track: TrackLayout, gutter: int, out: list[str]) -> None:
    out.append(_tag("g", {"data-track-id": track.type_id}, close=False))
    out.append(_tag("text", {
        "fill": GUTTER_TEXT,
        "x": format_number(4),
        "y": format_number(track.y_top + 16),
    }, text=track.type_id))
    lane_h = (track.height_px - 4) // track.lanes_used
    if track.mode is TrackMode.BOXES:
        for box in sorted(track.boxes, key=_box_sort_key):
            y = track.y_top + 2 + box.lane * lane_h
            color = box.color
            if isinstance(color, Solid):
                fill = format_color(color.color)
            else:
                fill = f"url(#{gradient_id(box.annotation_id)})"
            out.append(_tag("rect", {
                "data-annotation-id": box.annotation_id,
                "fill": fill,
                "height": format_number(max(1, lane_h - 2)),
                "width": format_number(box.w),
                "x": format_number(gutter + box.x),
                "y": format_number(y),
            }))
            if box.label is not None:
                start = color.color if isinstance(color, Solid) else color.start
                text_fill = "#ffffff" if _luminance(start) < 0.5 else "#000000"
                out.append(_tag("text", {
                    "fill": text_fill,
                    "x": format_number(gutter + box.x + 3),
                    "y": format_number(y + lane_h // 2 + 4),
                }, text=box.label))
    else:
        for b in track.bins:
            out.append(_tag("rect", {
                "fill": format_color(b.color),
                "height": format_number(track.height_px - 4),
                "width": format_number(b.w),
                "x": format_number(gutter + b.x),
                "y": format_number(track.y_top + 2),
            }))
    out.append("</g>")


def render_svg(layout: TimelineLayout) -> bytes:
    """Serialize a layout to UTF-8 SVG bytes; same layout, same bytes."""
    width = layout.gutter_px + layout.viewport.width_px
    height = layout.total_height_px
    out: list[str] = ['<?xml version="1.0" encoding="UTF-8"?>']
    out.append(_tag("svg", {
        "font-family": "sans-serif",
        "font-size": format_number(FONT_SIZE_PX),
        "height": format_number(height),
        "width": format_number(width),
        "xmlns": "http://www.w3.org/2000/svg",
    }, close=False))
    _render_defs(layout, out)
    out.append(_tag("rect", {
        "fill": BACKGROUND,
        "height": format_number(height),
        "width": format_number(width),
        "x": "0",
        "y": "0",
    }))
    _render_axis(layout, out)
    for track in layout.tracks:
        _render_track(track, layout.gutter_px, out)
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")
