"""Shared test utilities: package builders, brute-force oracles, generators."""

from __future__ import annotations

import random

from annotimeline.colors import ColorMap, ColorScale, FixedColor, HashColor, Rgb
from annotimeline.config import LabelMode, TimelineConfig, TrackHeight
from annotimeline.model import (
    Annotation,
    AnnotationPackage,
    AnnotationType,
    MediaInfo,
    NominalValue,
    NumericValue,
    TextValue,
    TransitionValue,
    ValueKind,
)


def make_package(intervals, duration=1_000_000, kind=ValueKind.TEXT, type_id="t"):
    """Package with one track of TEXT annotations from (begin, end) pairs."""
    annotations = tuple(
        Annotation(id=f"a{i:03d}", type_id=type_id, begin_ms=b, end_ms=e,
                   value=TextValue(f"v{i}"))
        for i, (b, e) in enumerate(intervals)
    )
    return AnnotationPackage(
        media=MediaInfo(id="m", uri="", duration_ms=duration),
        types=(AnnotationType(id=type_id, label="T", value_kind=kind),),
        annotations=annotations,
    )


def interval_annotations(intervals, type_id="t"):
    return [
        Annotation(id=f"a{i:03d}", type_id=type_id, begin_ms=b, end_ms=e,
                   value=TextValue(f"v{i}"))
        for i, (b, e) in enumerate(intervals)
    ]


# --- Brute-force oracles ----------------------------------------------------


def effective_end(b, e):
    return e if e > b else b + 1


def overlap_scan(annotations, from_ms, to_ms):
    """Linear-scan window query oracle (half-open, zero-duration widened)."""
    hits = [a for a in annotations
            if a.begin_ms < to_ms and effective_end(a.begin_ms, a.end_ms) > from_ms]
    return sorted(hits, key=lambda a: (a.begin_ms, a.end_ms, a.id))


def intervals_overlap(a, b):
    ab, ae = a
    bb, be = b
    return ab < effective_end(bb, be) and bb < effective_end(ab, ae)


def min_interval_coloring(intervals):
    """Exhaustive minimum coloring of the interval overlap graph (n <= ~10)."""
    n = len(intervals)
    if n == 0:
        return 0
    conflicts = [[intervals_overlap(intervals[i], intervals[j]) for j in range(n)] for i in range(n)]

    def colorable(k):
        colors = [-1] * n

        def place(i, used_max):
            if i == n:
                return True
            # canonical order: a fresh color must be exactly used_max + 1
            for c in range(min(used_max + 1, k - 1) + 1):
                if all(colors[j] != c for j in range(i) if conflicts[i][j]):
                    colors[i] = c
                    if place(i + 1, max(used_max, c)):
                        return True
                    colors[i] = -1
            return False

        return place(0, -1)

    for k in range(1, n + 1):
        if colorable(k):
            return k
    return n


def max_overlap_depth(intervals):
    """Maximum number of simultaneously active intervals (sweep oracle)."""
    events = []
    for b, e in intervals:
        events.append((b, 1))
        events.append((effective_end(b, e), -1))
    events.sort(key=lambda ev: (ev[0], ev[1]))  # ends before begins at ties
    depth = best = 0
    for _, delta in events:
        depth += delta
        best = max(best, depth)
    return best


# --- Config generation -------------------------------------------------------

_TOKENS = ["shot", "mood", "tempo", "motion", "colour", "speech", "gesture", "frame"]
_NAMED = ["black", "white", "red", "green", "blue", "yellow", "gray"]


def random_rgb(rng: random.Random) -> Rgb:
    return Rgb(rng.randrange(256), rng.randrange(256), rng.randrange(256))


def random_spec(rng: random.Random):
    kind = rng.randrange(4)
    if kind == 0:
        return FixedColor(random_rgb(rng))
    if kind == 1:
        tokens = rng.sample(_TOKENS, rng.randrange(1, 4))
        entries = tuple((t, random_rgb(rng)) for t in tokens)
        wildcard = random_rgb(rng) if rng.random() < 0.5 else None
        return ColorMap(entries, wildcard)
    if kind == 2:
        domain = None
        if rng.random() < 0.5:
            lo = round(rng.uniform(-100, 100), 3)
            domain = (lo, lo + round(rng.uniform(0.001, 50), 3))
        return ColorScale(random_rgb(rng), random_rgb(rng), domain)
    return HashColor()


def random_config(rng: random.Random) -> TimelineConfig:
    """A valid TimelineConfig drawn uniformly-ish over the whole surface."""
    tracks = None
    if rng.random() < 0.7:
        tracks = tuple(rng.sample(_TOKENS, rng.randrange(1, 5)))
    from_ms = None
    to_ms = None
    if rng.random() < 0.5:
        from_ms = rng.randrange(0, 3_600_000)
    if rng.random() < 0.5:
        base = from_ms if from_ms is not None else 0
        to_ms = base + rng.randrange(1, 3_600_000)
    rule_pool = list(tracks) if tracks else _TOKENS
    rules = {}
    for tid in rule_pool:
        if rng.random() < 0.4:
            rules[tid] = random_spec(rng)
    return TimelineConfig(
        tracks=tracks,
        from_ms=from_ms,
        to_ms=to_ms,
        color_rules=rules,
        height=rng.choice(list(TrackHeight)),
        bin_threshold=rng.choice([2000, 2000, 1, 50, 999999]),
        label_mode=rng.choice(list(LabelMode)),
    )


_BREAKERS = [
    lambda rng, s: "zoom=1" + ("&" + s if s else ""),            # unknown key
    lambda rng, s: (s + "&" if s else "") + "tracks=a&tracks=b",  # duplicate key
    lambda rng, s: (s + "&" if s else "") + "from=1:2",           # bad timecode
    lambda rng, s: (s + "&" if s else "") + "from=00:61:00",      # minutes range
    lambda rng, s: (s + "&" if s else "") + "color=x:scale(#000000)",  # arity
    lambda rng, s: (s + "&" if s else "") + "color=x:grad(#000)",  # unknown spec
    lambda rng, s: (s + "&" if s else "") + "color=x:map()",       # empty map
    lambda rng, s: (s + "&" if s else "") + "height=tall",
    lambda rng, s: (s + "&" if s else "") + "bin=0",
    lambda rng, s: (s + "&" if s else "") + "label=%2",            # bad escape
    lambda rng, s: (s + "&" if s else "") + "tracks=a,",           # dangling comma
    lambda rng, s: s + "&",                                        # empty param
]


def mutate_config_text(rng: random.Random, s: str) -> str:
    """Random edit likely to invalidate a config string."""
    if rng.random() < 0.5 or not s:
        return _BREAKERS[rng.randrange(len(_BREAKERS))](rng, s)
    i = rng.randrange(len(s))
    ch = rng.choice("!?%^{}|\\\"'<>@ ")
    op = rng.random()
    if op < 0.4:
        return s[:i] + ch + s[i:]
    if op < 0.8:
        return s[:i] + ch + s[i + 1:]
    return s[:i] + s[i + 1:]
