"""Deterministic timeline geometry: lane packing, binning, ticks, track layout.

All geometry is computed in integer pixels with round-half-up division so
that identical inputs produce bit-identical layouts on every platform.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .colors import ColorResult, Rgb, Solid, eval_color, format_color, start_color
from .config import LabelMode, ResolvedConfig, TrackHeight
from .model import Annotation, AnnotationPackage, effective_end_ms, format_timecode, query_window, value_text

LANE_HEIGHTS_PX = {
    TrackHeight.COMPACT: 12,
    TrackHeight.NORMAL: 24,
    TrackHeight.LARGE: 48,
}

AXIS_HEIGHT_PX = 20
TRACK_GAP_PX = 8
TRACK_PADDING_PX = 4
GUTTER_PX = 140
BIN_WIDTH_PX = 4
MIN_LABEL_BOX_PX = 40
MIN_TICK_SPACING_PX = 60
MIN_VIEWPORT_WIDTH_PX = 100

# Tick step ladder: 1s, 5s, 10s, 30s, 1min, 5min, 10min, 30min, 1h.
TICK_STEPS_MS = (1_000, 5_000, 10_000, 30_000, 60_000, 300_000, 600_000, 1_800_000, 3_600_000)


class WidthError(ValueError):
    def __init__(self, width_px: int):
        super().__init__(f"viewport width {width_px}px is below the {MIN_VIEWPORT_WIDTH_PX}px minimum")
        self.width_px = width_px


class UnsortedInputError(ValueError):
    pass


class TrackMode(Enum):
    BOXES = "boxes"
    BINNED = "binned"


@dataclass(frozen=True)
class Viewport:
    from_ms: int
    to_ms: int
    width_px: int


@dataclass(frozen=True)
class LaidBox:
    annotation_id: str
    lane: int
    x: int
    w: int
    color: ColorResult
    label: str | None = None


@dataclass(frozen=True)
class Bin:
    index: int
    x: int
    w: int
    count: int
    color: Rgb


@dataclass(frozen=True)
class TrackLayout:
    type_id: str
    mode: TrackMode
    lanes_used: int
    boxes: tuple[LaidBox, ...]
    bins: tuple[Bin, ...]
    y_top: int
    height_px: int


@dataclass(frozen=True)
class Tick:
    t_ms: int
    x: int
    label: str


@dataclass(frozen=True)
class TimelineLayout:
    viewport: Viewport
    tracks: tuple[TrackLayout, ...]
    ticks: tuple[Tick, ...]
    total_height_px: int
    gutter_px: int


def _div_round_half_up(num: int, den: int) -> int:
    """round_half_up(num / den) in exact integer arithmetic; den > 0."""
    return (2 * num + den) // (2 * den)


def time_to_x(t_ms: int, vp: Viewport) -> int:
    """Map a time to a viewport x coordinate, clamped to [0, width]."""
    span = vp.to_ms - vp.from_ms
    x = _div_round_half_up((t_ms - vp.from_ms) * vp.width_px, span)
    return 0 if x < 0 else vp.width_px if x > vp.width_px else x


def assign_lanes(annotations: list[Annotation]) -> list[int]:
    """Greedy first-fit lane packing over (begin, end, id)-sorted annotations.

    Each annotation takes the lowest-indexed lane whose last occupant ended
    (half-open, zero-duration widened to 1 ms) at or before its begin. For
    interval input sorted by begin this uses the minimum number of lanes.
    """
    for prev, cur in zip(annotations, annotations[1:]):
        if prev.sort_key() > cur.sort_key():
            raise UnsortedInputError(f"annotations out of order at id {cur.id!r}")
    lanes: list[int] = []
    active: list[tuple[int, int]] = []  # (effective end, lane), min-heap
    free: list[int] = []  # released lane indices, min-heap
    next_lane = 0
    for a in annotations:
        while active and active[0][0] <= a.begin_ms:
            heapq.heappush(free, heapq.heappop(active)[1])
        if free:
            lane = heapq.heappop(free)
        else:
            lane = next_lane
            next_lane += 1
        heapq.heappush(active, (effective_end_ms(a), lane))
        lanes.append(lane)
    return lanes


def _box_span(a: Annotation, vp: Viewport) -> tuple[int, int]:
    """Clipped pixel span of an annotation: x in [0, width), w >= 1."""
    x = time_to_x(a.begin_ms, vp)
    w = time_to_x(a.end_ms, vp) - x
    if w < 1:
        w = 1
    if x + w > vp.width_px:
        x = vp.width_px - w
    return x, w


def bin_track(
    annotations: list[Annotation],
    vp: Viewport,
    color_of: Callable[[Annotation], ColorResult],
) -> list[Bin]:
    """Aggregate visible annotations into fixed 4 px density bins.

    An annotation counts in every bin its clipped pixel span intersects. A
    bin takes the most frequent solid color among its annotations (gradients
    contribute their start color), ties broken by lowest (r, g, b). Empty
    bins are omitted.
    """
    n_bins = -(-vp.width_px // BIN_WIDTH_PX)
    counts = [0] * n_bins
    palette: list[dict[Rgb, int] | None] = [None] * n_bins
    for a in annotations:
        x, w = _box_span(a, vp)
        rgb = start_color(color_of(a))
        for b in range(x // BIN_WIDTH_PX, (x + w - 1) // BIN_WIDTH_PX + 1):
            counts[b] += 1
            bucket = palette[b]
            if bucket is None:
                bucket = {}
                palette[b] = bucket
            bucket[rgb] = bucket.get(rgb, 0) + 1
    bins = []
    for i in range(n_bins):
        if counts[i] == 0:
            continue
        bucket = palette[i]
        color = min(bucket.items(), key=lambda kv: (-kv[1], kv[0].as_tuple()))[0]
        x = i * BIN_WIDTH_PX
        bins.append(Bin(index=i, x=x, w=min(BIN_WIDTH_PX, vp.width_px - x), count=counts[i], color=color))
    return bins


def choose_ticks(vp: Viewport) -> list[Tick]:
    """Axis ticks at the smallest ladder step spaced at least 60 px apart."""
    span = vp.to_ms - vp.from_ms
    step = None
    for candidate in TICK_STEPS_MS:
        if candidate * vp.width_px >= MIN_TICK_SPACING_PX * span:
            step = candidate
            break
    if step is None:
        step = TICK_STEPS_MS[-1]
        while step * vp.width_px < MIN_TICK_SPACING_PX * span:
            step *= 2
    ticks = []
    t = -(-vp.from_ms // step) * step
    while t <= vp.to_ms:
        ticks.append(Tick(t_ms=t, x=time_to_x(t, vp), label=format_timecode(t)))
        t += step
    return ticks


def layout_timeline(pkg: AnnotationPackage, rc: ResolvedConfig, width_px: int) -> TimelineLayout:
    """Compute the full timeline layout for a package under a resolved config.

    Tracks switch to the binned level of detail when their visible annotation
    count exceeds the configured threshold; otherwise every annotation is a
    lane-packed box.
    """
    if width_px < MIN_VIEWPORT_WIDTH_PX:
        raise WidthError(width_px)
    vp = Viewport(from_ms=rc.from_ms, to_ms=rc.to_ms, width_px=width_px)
    lane_h = LANE_HEIGHTS_PX[rc.height]

    tracks: list[TrackLayout] = []
    y = AXIS_HEIGHT_PX
    for tid in rc.tracks:
        atype = pkg.types_by_id[tid]
        spec = rc.color_rules[tid]
        visible = query_window(pkg, tid, rc.from_ms, rc.to_ms)

        def color_of(a: Annotation, _spec=spec, _atype=atype) -> ColorResult:
            return eval_color(_spec, a.value, _atype)

        if len(visible) > rc.bin_threshold:
            bins = tuple(bin_track(visible, vp, color_of))
            track = TrackLayout(
                type_id=tid, mode=TrackMode.BINNED, lanes_used=1,
                boxes=(), bins=bins, y_top=y, height_px=lane_h + TRACK_PADDING_PX)
        else:
            lane_of = assign_lanes(visible)
            boxes = []
            for a, lane in zip(visible, lane_of):
                x, w = _box_span(a, vp)
                label = None
                if rc.label_mode is LabelMode.INLINE and w >= MIN_LABEL_BOX_PX:
                    label = value_text(a.value)
                boxes.append(LaidBox(annotation_id=a.id, lane=lane, x=x, w=w,
                                     color=color_of(a), label=label))
            lanes_used = max(lane_of) + 1 if lane_of else 1
            track = TrackLayout(
                type_id=tid, mode=TrackMode.BOXES, lanes_used=lanes_used,
                boxes=tuple(boxes), bins=(), y_top=y,
                height_px=lanes_used * lane_h + TRACK_PADDING_PX)
        tracks.append(track)
        y += track.height_px + TRACK_GAP_PX

    total = AXIS_HEIGHT_PX + sum(t.height_px for t in tracks)
    if tracks:
        total += TRACK_GAP_PX * (len(tracks) - 1)
    return TimelineLayout(
        viewport=vp,
        tracks=tuple(tracks),
        ticks=tuple(choose_ticks(vp)),
        total_height_px=total,
        gutter_px=GUTTER_PX,
    )


def _color_json(result: ColorResult):
    if isinstance(result, Solid):
        return format_color(result.color)
    return {"start": format_color(result.start), "end": format_color(result.end)}


def layout_to_json(layout: TimelineLayout) -> dict:
    """Layout as JSON-ready data; the wire contract of the service and UI."""
    return {
        "viewport": {
            "from": layout.viewport.from_ms,
            "to": layout.viewport.to_ms,
            "widthPx": layout.viewport.width_px,
        },
        "tracks": [
            {
                "typeId": t.type_id,
                "mode": t.mode.value,
                "lanesUsed": t.lanes_used,
                "boxes": [
                    {
                        "annotationId": b.annotation_id,
                        "lane": b.lane,
                        "x": b.x,
                        "w": b.w,
                        "color": _color_json(b.color),
                        "label": b.label,
                    }
                    for b in t.boxes
                ],
                "bins": [
                    {"index": b.index, "x": b.x, "w": b.w, "count": b.count,
                     "color": format_color(b.color)}
                    for b in t.bins
                ],
                "yTop": t.y_top,
                "heightPx": t.height_px,
            }
            for t in layout.tracks
        ],
        "ticks": [{"t": k.t_ms, "x": k.x, "label": k.label} for k in layout.ticks],
        "totalHeightPx": layout.total_height_px,
        "gutterPx": layout.gutter_px,
    }
