"""Color specifications and their evaluation against annotation values.

Evaluation is total: content that no rule covers falls back to gray rather
than failing, so a timeline always renders. All channel rounding is
round-half-up to keep rendered output byte-stable across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    AnnotationType,
    AnnotationValue,
    NominalValue,
    NumericValue,
    TextValue,
    TransitionValue,
    value_text,
)

FNV_OFFSET_BASIS = 2166136261
FNV_PRIME = 16777619

HASH_SATURATION = 0.60
HASH_LIGHTNESS = 0.50

NAMED_COLORS = {
    "black": "#000000",
    "white": "#ffffff",
    "red": "#ff0000",
    "green": "#008000",
    "blue": "#0000ff",
    "yellow": "#ffff00",
    "gray": "#808080",
}


class ColorError(ValueError):
    def __init__(self, text: str):
        super().__init__(f"invalid color: {text!r}")
        self.text = text


class DomainError(ValueError):
    pass


class RangeError(ValueError):
    pass


@dataclass(frozen=True)
class Rgb:
    r: int
    g: int
    b: int

    def __post_init__(self):
        for channel in (self.r, self.g, self.b):
            if not isinstance(channel, int) or not 0 <= channel <= 255:
                raise ValueError(f"channel out of range: {channel!r}")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.r, self.g, self.b)


GRAY = Rgb(128, 128, 128)


@dataclass(frozen=True)
class FixedColor:
    color: Rgb


@dataclass(frozen=True)
class ColorMap:
    entries: tuple[tuple[str, Rgb], ...]
    wildcard: Rgb | None = None

    def __post_init__(self):
        normalized = tuple(sorted(dict(self.entries).items()))
        if not normalized:
            raise ValueError("color map needs at least one entry")
        object.__setattr__(self, "entries", normalized)

    def lookup(self, token: str) -> Rgb | None:
        return dict(self.entries).get(token)


@dataclass(frozen=True)
class ColorScale:
    low: Rgb
    high: Rgb
    domain: tuple[float, float] | None = None

    def __post_init__(self):
        if self.domain is not None:
            lo, hi = self.domain
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
                raise ValueError(f"scale domain needs finite min < max, got {self.domain}")


@dataclass(frozen=True)
class HashColor:
    pass


ColorSpec = FixedColor | ColorMap | ColorScale | HashColor


@dataclass(frozen=True)
class Solid:
    color: Rgb


@dataclass(frozen=True)
class Gradient:
    start: Rgb
    end: Rgb


ColorResult = Solid | Gradient


def round_half_up(x: float) -> int:
    """0.5 always rounds away from zero toward +inf (127.5 -> 128)."""
    return math.floor(x + 0.5)


def parse_color(text: str) -> Rgb:
    """Accepts #rgb (digit doubling), #rrggbb (any case) and 7 lowercase names."""
    if text in NAMED_COLORS:
        text = NAMED_COLORS[text]
    if not text.startswith("#"):
        raise ColorError(text)
    digits = text[1:]
    if len(digits) == 3:
        digits = "".join(c * 2 for c in digits)
    if len(digits) != 6 or any(c not in "0123456789abcdefABCDEF" for c in digits):
        raise ColorError(text)
    return Rgb(int(digits[0:2], 16), int(digits[2:4], 16), int(digits[4:6], 16))


def format_color(color: Rgb) -> str:
    return f"#{color.r:02x}{color.g:02x}{color.b:02x}"


def scale_color(low: Rgb, high: Rgb, v: float, min_v: float, max_v: float) -> Rgb:
    """Per-channel sRGB interpolation; v is clamped to [min, max]."""
    if min_v >= max_v:
        raise DomainError(f"scale domain needs min < max, got [{min_v}, {max_v}]")
    t = (v - min_v) / (max_v - min_v)
    t = 0.0 if t < 0.0 else 1.0 if t > 1.0 else t
    return Rgb(
        round_half_up(low.r + t * (high.r - low.r)),
        round_half_up(low.g + t * (high.g - low.g)),
        round_half_up(low.b + t * (high.b - low.b)),
    )


def hash_hue(text: str) -> int:
    """FNV-1a 32-bit over UTF-8 bytes, reduced mod 360 degrees."""
    h = FNV_OFFSET_BASIS
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * FNV_PRIME) & 0xFFFFFFFF
    return h % 360


def hsl_to_rgb(h: float, s: float, l: float) -> Rgb:
    """Standard chroma-form HSL conversion; h in degrees (taken mod 360)."""
    if not 0.0 <= s <= 1.0:
        raise RangeError(f"saturation out of [0, 1]: {s}")
    if not 0.0 <= l <= 1.0:
        raise RangeError(f"lightness out of [0, 1]: {l}")
    h = h % 360.0
    c = (1.0 - abs(2.0 * l - 1.0)) * s
    hp = h / 60.0
    x = c * (1.0 - abs(hp % 2.0 - 1.0))
    sextant = int(hp) % 6
    r1, g1, b1 = (
        (c, x, 0.0), (x, c, 0.0), (0.0, c, x),
        (0.0, x, c), (x, 0.0, c), (c, 0.0, x),
    )[sextant]
    m = l - c / 2.0
    return Rgb(
        round_half_up((r1 + m) * 255.0),
        round_half_up((g1 + m) * 255.0),
        round_half_up((b1 + m) * 255.0),
    )


def _hash_rgb(key: str) -> Rgb:
    return hsl_to_rgb(float(hash_hue(key)), HASH_SATURATION, HASH_LIGHTNESS)


def _solid_for(spec: ColorSpec, value: AnnotationValue, atype: AnnotationType) -> Rgb:
    if isinstance(spec, FixedColor):
        return spec.color
    if isinstance(spec, ColorMap):
        if isinstance(value, (NominalValue, TextValue)):
            token = value.token if isinstance(value, NominalValue) else value.text
            found = spec.lookup(token)
            if found is not None:
                return found
            return spec.wildcard if spec.wildcard is not None else GRAY
        return GRAY
    if isinstance(spec, ColorScale):
        if isinstance(value, NumericValue):
            domain = spec.domain or atype.numeric_domain or (0.0, 1.0)
            return scale_color(spec.low, spec.high, value.number, domain[0], domain[1])
        return GRAY
    return _hash_rgb(value_text(value))


def eval_color(spec: ColorSpec, value: AnnotationValue, atype: AnnotationType) -> ColorResult:
    """Total evaluation of a color spec against one annotation value.

    Transition values evaluate each endpoint token as if it were nominal and
    yield a gradient; equal endpoint colors collapse to a solid.
    """
    if isinstance(value, TransitionValue):
        start = _solid_for(spec, NominalValue(value.from_token), atype)
        end = _solid_for(spec, NominalValue(value.to_token), atype)
        return Solid(start) if start == end else Gradient(start, end)
    return Solid(_solid_for(spec, value, atype))


def start_color(result: ColorResult) -> Rgb:
    """The representative solid color: gradients contribute their start."""
    return result.color if isinstance(result, Solid) else result.start
