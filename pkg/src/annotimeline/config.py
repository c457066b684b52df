"""The URL-encodable timeline configuration language.

A configuration is a query-style string: `key=value` pairs joined by `&`,
with the keys tracks, from, to, color, height, bin and label. Values may be
percent-encoded; parse errors report a character offset into the raw input.
Serialization is canonical: fixed key order, defaults omitted, normalized
colors and sorted map entries, and a fixed percent-encoding table, so that
two configurations are equal exactly when their canonical strings are equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .colors import ColorMap, ColorScale, ColorSpec, FixedColor, HashColor, NAMED_COLORS, Rgb, format_color
from .model import AnnotationPackage, format_timecode

DEFAULT_BIN_THRESHOLD = 2000

_KEYS = ("tracks", "from", "to", "color", "height", "bin", "label")

_TOKEN_CHARS = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_-")
_HEX_CHARS = frozenset("0123456789abcdefABCDEF")
_LOWER_CHARS = frozenset("abcdefghijklmnopqrstuvwxyz")
_DIGIT_CHARS = frozenset("0123456789")

# Canonical output keeps these literal; every other character outside the
# RFC 3986 unreserved set is percent-encoded (uppercase hex).
_UNRESERVED = frozenset(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_.~-"
)
_SAFE_EVERYWHERE = _UNRESERVED | frozenset("()*")


class TrackHeight(Enum):
    COMPACT = "compact"
    NORMAL = "normal"
    LARGE = "large"


class LabelMode(Enum):
    NONE = "none"
    INLINE = "inline"


class ParseError(ValueError):
    """A config string is rejected; position is an offset into the raw input."""

    def __init__(self, position: int, expected: str, found: str):
        super().__init__(f"at offset {position}: expected {expected}, found {found}")
        self.position = position
        self.expected = expected
        self.found = found


class DuplicateKeyError(ParseError):
    def __init__(self, key: str, position: int):
        super().__init__(position, f"at most one {key!r} parameter", f"repeated key {key!r}")
        self.key = key


class UnknownKeyError(ParseError):
    def __init__(self, key: str, position: int):
        super().__init__(position, "one of " + ", ".join(_KEYS), f"unknown key {key!r}")
        self.key = key


class UnknownTrackError(Exception):
    def __init__(self, type_id: str):
        super().__init__(f"track {type_id!r} is not declared in the package")
        self.type_id = type_id


class EmptyViewportError(Exception):
    def __init__(self, from_ms: int, to_ms: int):
        super().__init__(f"empty viewport: [{from_ms}, {to_ms})")
        self.from_ms = from_ms
        self.to_ms = to_ms


class EmptyTrackListError(Exception):
    def __init__(self):
        super().__init__("package declares no annotation types to display")


@dataclass(frozen=True)
class TimelineConfig:
    """Parsed form of a config string; tracks=None means the wildcard '*'."""

    tracks: tuple[str, ...] | None = None
    from_ms: int | None = None
    to_ms: int | None = None
    color_rules: dict[str, ColorSpec] = field(default_factory=dict)
    height: TrackHeight = TrackHeight.NORMAL
    bin_threshold: int = DEFAULT_BIN_THRESHOLD
    label_mode: LabelMode = LabelMode.INLINE

    def normalized(self) -> TimelineConfig:
        """Fold values that mean the same as an absent key (from=0)."""
        if self.from_ms == 0:
            return TimelineConfig(
                tracks=self.tracks,
                from_ms=None,
                to_ms=self.to_ms,
                color_rules=dict(self.color_rules),
                height=self.height,
                bin_threshold=self.bin_threshold,
                label_mode=self.label_mode,
            )
        return self


@dataclass(frozen=True)
class ResolvedConfig:
    """A config bound to a package: concrete tracks, window and per-track specs."""

    tracks: tuple[str, ...]
    from_ms: int
    to_ms: int
    color_rules: dict[str, ColorSpec]
    height: TrackHeight
    bin_threshold: int
    label_mode: LabelMode
    warnings: tuple[str, ...] = ()


# --- Decoding --------------------------------------------------------------


def _decode_value(raw: str, base: int) -> tuple[str, list[int]]:
    """Percent-decode one parameter value.

    Returns the decoded text plus a map from decoded character index to the
    raw-string offset of its first source character (with an end sentinel),
    so grammar errors can point into the original input.
    """
    buf = bytearray()
    byte_offsets: list[int] = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == "%":
            if i + 2 >= len(raw) or raw[i + 1] not in _HEX_CHARS or raw[i + 2] not in _HEX_CHARS:
                raise ParseError(base + i, "two hex digits after '%'", _describe(raw[i + 1:i + 3]))
            buf.append(int(raw[i + 1:i + 3], 16))
            byte_offsets.append(i)
            i += 3
        else:
            encoded = ch.encode("utf-8")
            buf.extend(encoded)
            byte_offsets.extend([i] * len(encoded))
            i += 1
    try:
        text = buf.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(base + byte_offsets[e.start], "valid UTF-8 after percent-decoding",
                         "invalid byte sequence") from None
    positions: list[int] = []
    byte_index = 0
    for ch in text:
        positions.append(base + byte_offsets[byte_index])
        byte_index += len(ch.encode("utf-8"))
    positions.append(base + len(raw))
    return text, positions


def _describe(found: str) -> str:
    return repr(found) if found else "end of input"


class _Cursor:
    """Character cursor over a decoded value with raw-input positions."""

    def __init__(self, text: str, positions: list[int]):
        self.text = text
        self.positions = positions
        self.i = 0

    def at_end(self) -> bool:
        return self.i >= len(self.text)

    def peek(self) -> str:
        return self.text[self.i] if self.i < len(self.text) else ""

    def advance(self) -> str:
        ch = self.text[self.i]
        self.i += 1
        return ch

    def pos(self, index: int | None = None) -> int:
        return self.positions[self.i if index is None else index]

    def error(self, expected: str, index: int | None = None) -> ParseError:
        i = self.i if index is None else index
        found = self.text[i] if i < len(self.text) else ""
        return ParseError(self.positions[i], expected, _describe(found))

    def expect(self, ch: str, expected: str | None = None) -> None:
        if self.peek() != ch:
            raise self.error(expected or repr(ch))
        self.advance()

    def expect_end(self) -> None:
        if not self.at_end():
            raise self.error("end of value")

    def take_while(self, charset: frozenset[str]) -> str:
        start = self.i
        while self.i < len(self.text) and self.text[self.i] in charset:
            self.i += 1
        return self.text[start:self.i]

    def take_token(self, expected: str = "identifier") -> str:
        token = self.take_while(_TOKEN_CHARS)
        if not token:
            raise self.error(expected)
        return token


# --- Value grammars ---------------------------------------------------------


def _parse_tracks_value(cur: _Cursor) -> tuple[str, ...] | None:
    if cur.peek() == "*":
        cur.advance()
        cur.expect_end()
        return None
    tracks = [cur.take_token("track id or '*'")]
    while cur.peek() == ",":
        cur.advance()
        tracks.append(cur.take_token("track id"))
    cur.expect_end()
    return tuple(tracks)


def _parse_timecode_value(cur: _Cursor) -> int:
    start = cur.i
    digits = cur.take_while(_DIGIT_CHARS)
    if not digits:
        raise cur.error("timecode digit")
    if cur.at_end():
        return int(digits)
    if cur.peek() != ":":
        raise cur.error("':' or end of timecode")
    if len(digits) < 2:
        raise cur.error("two-digit hours", start)
    hours = int(digits)
    cur.advance()
    minutes = _parse_clock_pair(cur, "minutes")
    cur.expect(":", "':' before seconds")
    seconds = _parse_clock_pair(cur, "seconds")
    millis = 0
    if cur.peek() == ".":
        cur.advance()
        frac_start = cur.i
        frac = cur.take_while(_DIGIT_CHARS)
        if len(frac) != 3:
            raise cur.error("exactly three millisecond digits", frac_start)
        millis = int(frac)
    cur.expect_end()
    return ((hours * 60 + minutes) * 60 + seconds) * 1000 + millis


def _parse_clock_pair(cur: _Cursor, what: str) -> int:
    if cur.peek() not in frozenset("012345"):
        raise cur.error(f"{what} in 00-59")
    first = cur.advance()
    if cur.peek() not in _DIGIT_CHARS:
        raise cur.error(f"second {what} digit")
    return int(first + cur.advance())


def _parse_color_literal(cur: _Cursor) -> Rgb:
    if cur.peek() == "#":
        cur.advance()
        start = cur.i
        digits = cur.take_while(_HEX_CHARS)
        if len(digits) not in (3, 6):
            raise cur.error("3 or 6 hex digits", start)
        if len(digits) == 3:
            digits = "".join(c * 2 for c in digits)
        return Rgb(int(digits[0:2], 16), int(digits[2:4], 16), int(digits[4:6], 16))
    start = cur.i
    name = cur.take_while(_LOWER_CHARS)
    if name not in NAMED_COLORS:
        raise cur.error("'#' color or color name", start)
    hexval = NAMED_COLORS[name]
    return Rgb(int(hexval[1:3], 16), int(hexval[3:5], 16), int(hexval[5:7], 16))


def _parse_real(cur: _Cursor) -> float:
    start = cur.i
    if cur.peek() == "-":
        cur.advance()
    digits = cur.take_while(_DIGIT_CHARS)
    if not digits:
        raise cur.error("number")
    if cur.peek() == ".":
        cur.advance()
        if not cur.take_while(_DIGIT_CHARS):
            raise cur.error("fraction digits")
    return float(cur.text[start:cur.i])


def _parse_color_spec(cur: _Cursor) -> ColorSpec:
    start = cur.i
    name = cur.take_while(_LOWER_CHARS)
    if name == "hash":
        return HashColor()
    if name == "fixed":
        cur.expect("(", "'(' after fixed")
        color = _parse_color_literal(cur)
        cur.expect(")", "')' after fixed color")
        return FixedColor(color)
    if name == "map":
        cur.expect("(", "'(' after map")
        entries: dict[str, Rgb] = {}
        wildcard: Rgb | None = None
        while True:
            key_start = cur.i
            if cur.peek() == "*":
                cur.advance()
                key = None
            else:
                key = cur.take_token("map key or '*'")
            cur.expect("=", "'=' after map key")
            color = _parse_color_literal(cur)
            if key is None:
                if wildcard is not None:
                    raise cur.error("at most one wildcard entry", key_start)
                wildcard = color
            else:
                if key in entries:
                    raise cur.error("distinct map key", key_start)
                entries[key] = color
            if cur.peek() != ",":
                break
            cur.advance()
        cur.expect(")", "')' after map entries")
        if not entries:
            raise cur.error("at least one non-wildcard map entry", start)
        return ColorMap(tuple(entries.items()), wildcard)
    if name == "scale":
        cur.expect("(", "'(' after scale")
        low = _parse_color_literal(cur)
        cur.expect(",", "','")
        high = _parse_color_literal(cur)
        domain = None
        if cur.peek() == ",":
            cur.advance()
            min_start = cur.i
            min_v = _parse_real(cur)
            cur.expect(",", "',' before domain max")
            max_v = _parse_real(cur)
            if min_v >= max_v:
                raise cur.error("domain with min < max", min_start)
            domain = (min_v, max_v)
        cur.expect(")", "')' after scale arguments")
        return ColorScale(low, high, domain)
    raise cur.error("color spec (fixed, map, scale or hash)", start)


def _parse_color_rules(cur: _Cursor) -> dict[str, ColorSpec]:
    rules: dict[str, ColorSpec] = {}
    while True:
        rule_start = cur.i
        type_id = cur.take_token("track id")
        if type_id in rules:
            raise cur.error("at most one rule per track", rule_start)
        cur.expect(":", "':' after track id")
        rules[type_id] = _parse_color_spec(cur)
        if cur.peek() != ";":
            break
        cur.advance()
    cur.expect_end()
    return rules


def _parse_choice(cur: _Cursor, options: dict[str, object], what: str):
    start = cur.i
    word = cur.take_while(_LOWER_CHARS)
    if word not in options:
        raise cur.error(what, start)
    cur.expect_end()
    return options[word]


def _parse_bin_value(cur: _Cursor) -> int:
    start = cur.i
    digits = cur.take_while(_DIGIT_CHARS)
    if not digits:
        raise cur.error("positive integer")
    cur.expect_end()
    value = int(digits)
    if value < 1:
        raise cur.error("positive integer", start)
    return value


# --- parse / serialize / resolve -------------------------------------------


def parse_config(raw: str) -> TimelineConfig:
    """Parse a raw (possibly percent-encoded) config string.

    The empty string yields the all-defaults configuration. Unknown and
    duplicate keys are rejected so that a shared string has one meaning.
    """
    if raw == "":
        return TimelineConfig()

    values: dict[str, object] = {}
    positions: dict[str, int] = {}
    offset = 0
    for segment in raw.split("&"):
        seg_start = offset
        offset += len(segment) + 1
        eq = segment.find("=")
        if eq < 0:
            raise ParseError(seg_start + len(segment), "'=' after parameter key",
                             _describe(""))
        key = segment[:eq]
        if key not in _KEYS:
            raise UnknownKeyError(key, seg_start)
        if key in values:
            raise DuplicateKeyError(key, seg_start)
        decoded, posmap = _decode_value(segment[eq + 1:], seg_start + eq + 1)
        cur = _Cursor(decoded, posmap)
        if key == "tracks":
            values[key] = _parse_tracks_value(cur)
        elif key in ("from", "to"):
            values[key] = _parse_timecode_value(cur)
        elif key == "color":
            values[key] = _parse_color_rules(cur)
        elif key == "height":
            values[key] = _parse_choice(
                cur, {h.value: h for h in TrackHeight}, "track height (compact, normal or large)")
        elif key == "bin":
            values[key] = _parse_bin_value(cur)
        else:
            values[key] = _parse_choice(
                cur, {m.value: m for m in LabelMode}, "label mode (none or inline)")
        positions[key] = seg_start + eq + 1

    from_ms = values.get("from")
    to_ms = values.get("to")
    if from_ms is not None and to_ms is not None and from_ms >= to_ms:
        raise ParseError(positions["to"], "a window end after its start",
                         f"to={format_timecode(to_ms)} <= from={format_timecode(from_ms)}")

    return TimelineConfig(
        tracks=values.get("tracks"),
        from_ms=from_ms,
        to_ms=to_ms,
        color_rules=values.get("color", {}),
        height=values.get("height", TrackHeight.NORMAL),
        bin_threshold=values.get("bin", DEFAULT_BIN_THRESHOLD),
        label_mode=values.get("label", LabelMode.INLINE),
    )


def _encode_value(text: str, extra_safe: str = "") -> str:
    safe = _SAFE_EVERYWHERE | frozenset(extra_safe)
    out = []
    for ch in text:
        if ch in safe:
            out.append(ch)
        else:
            out.extend(f"%{byte:02X}" for byte in ch.encode("utf-8"))
    return "".join(out)


def _spec_text(spec: ColorSpec) -> str:
    if isinstance(spec, FixedColor):
        return f"fixed({format_color(spec.color)})"
    if isinstance(spec, ColorMap):
        entries = [f"{token}={format_color(color)}" for token, color in spec.entries]
        if spec.wildcard is not None:
            entries.append(f"*={format_color(spec.wildcard)}")
        return f"map({','.join(entries)})"
    if isinstance(spec, ColorScale):
        args = f"{format_color(spec.low)},{format_color(spec.high)}"
        if spec.domain is not None:
            args += f",{_format_real(spec.domain[0])},{_format_real(spec.domain[1])}"
        return f"scale({args})"
    return "hash"


def _format_real(v: float) -> str:
    """Shortest decimal that re-parses to the same float; never exponent form."""
    text = repr(float(v))
    if "e" in text:
        text = f"{v:.340f}"  # exact expansion; doubles are finite decimals
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return "0" if text == "-0" else text


def _rule_order(config: TimelineConfig) -> list[str]:
    if config.tracks is None:
        return sorted(config.color_rules)
    listed = [tid for tid in config.tracks if tid in config.color_rules]
    rest = sorted(tid for tid in config.color_rules if tid not in config.tracks)
    return listed + rest


def serialize_config(config: TimelineConfig) -> str:
    """Canonical text form; parse(serialize(c)) is a fixed point of serialize."""
    parts: list[str] = []
    if config.tracks is not None:
        parts.append("tracks=" + _encode_value(",".join(config.tracks), extra_safe=","))
    if config.from_ms is not None and config.from_ms != 0:
        parts.append("from=" + _encode_value(format_timecode(config.from_ms), extra_safe=":"))
    if config.to_ms is not None:
        parts.append("to=" + _encode_value(format_timecode(config.to_ms), extra_safe=":"))
    if config.color_rules:
        rules = ";".join(
            f"{tid}:{_spec_text(config.color_rules[tid])}" for tid in _rule_order(config))
        parts.append("color=" + _encode_value(rules))
    if config.height is not TrackHeight.NORMAL:
        parts.append("height=" + config.height.value)
    if config.bin_threshold != DEFAULT_BIN_THRESHOLD:
        parts.append(f"bin={config.bin_threshold}")
    if config.label_mode is not LabelMode.INLINE:
        parts.append("label=" + config.label_mode.value)
    return "&".join(parts)


def resolve_config(config: TimelineConfig, pkg: AnnotationPackage) -> ResolvedConfig:
    """Bind a config to a package: expand the wildcard, fill and clamp the
    window, drop rules for undisplayed tracks and default the rest to hash."""
    warnings: list[str] = []

    if config.tracks is None:
        tracks = [t.id for t in pkg.types]
    else:
        tracks = []
        for tid in config.tracks:
            if tid not in pkg.types_by_id:
                raise UnknownTrackError(tid)
            if tid in tracks:
                warnings.append(f"duplicate track {tid!r} ignored")
            else:
                tracks.append(tid)
    if not tracks:
        raise EmptyTrackListError()

    duration = pkg.media.duration_ms
    from_ms = config.from_ms if config.from_ms is not None else 0
    to_ms = config.to_ms if config.to_ms is not None else duration
    from_ms = max(0, min(from_ms, duration))
    to_ms = max(0, min(to_ms, duration))
    if from_ms >= to_ms:
        raise EmptyViewportError(from_ms, to_ms)

    for tid in config.color_rules:
        if tid not in tracks:
            warnings.append(f"color rule for undisplayed track {tid!r} dropped")
    rules = {tid: config.color_rules.get(tid, HashColor()) for tid in tracks}

    return ResolvedConfig(
        tracks=tuple(tracks),
        from_ms=from_ms,
        to_ms=to_ms,
        color_rules=rules,
        height=config.height,
        bin_threshold=config.bin_threshold,
        label_mode=config.label_mode,
        warnings=tuple(warnings),
    )
