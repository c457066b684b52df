"""Timeline layouts and deterministic SVG renderings for video annotation data."""

from .colors import (
    ColorMap,
    ColorScale,
    ColorSpec,
    FixedColor,
    Gradient,
    HashColor,
    Rgb,
    Solid,
    eval_color,
    format_color,
    hash_hue,
    hsl_to_rgb,
    parse_color,
    scale_color,
)
from .config import (
    LabelMode,
    ParseError,
    ResolvedConfig,
    TimelineConfig,
    TrackHeight,
    parse_config,
    resolve_config,
    serialize_config,
)
from .layout import (
    Bin,
    LaidBox,
    TimelineLayout,
    Tick,
    TrackLayout,
    TrackMode,
    Viewport,
    assign_lanes,
    bin_track,
    choose_ticks,
    layout_timeline,
    layout_to_json,
    time_to_x,
)
from .model import (
    Annotation,
    AnnotationPackage,
    AnnotationType,
    AnnotationValue,
    MediaInfo,
    NominalValue,
    NumericValue,
    TextValue,
    TransitionValue,
    ValidationReport,
    ValueKind,
    format_timecode,
    parse_package,
    parse_timecode,
    query_window,
    validate_package,
)
from .service import PackageStore, create_app
from .svg import format_number, render_svg

__all__ = [name for name in dir() if not name.startswith("_")]
