import json
import random

import pytest
from hypothesis import given, strategies as st

from annotimeline.fixtures import random_package
from annotimeline.model import (
    Annotation,
    AnnotationPackage,
    AnnotationType,
    MediaInfo,
    NumericValue,
    PackageSyntaxError,
    SchemaError,
    TextValue,
    TimecodeError,
    UnknownTypeError,
    ValidationError,
    ValueKind,
    format_timecode,
    package_from_json,
    package_to_json,
    parse_package,
    parse_timecode,
    query_window,
    validate_package,
)

from helpers import make_package, overlap_scan


def minimal_doc(**overrides):
    doc = {
        "media": {"id": "m1", "uri": "", "duration": 60000},
        "types": [{"id": "shot", "label": "Shot", "valueKind": "text"}],
        "annotations": [],
    }
    doc.update(overrides)
    return doc


def to_bytes(doc):
    return json.dumps(doc).encode("utf-8")


# --- timecodes ---------------------------------------------------------------


def test_parse_timecode_accepts_both_forms():
    assert parse_timecode("00:01:00") == 60000
    assert parse_timecode("01:00:00.250") == 3600250
    assert parse_timecode("90000") == 90000
    assert parse_timecode("0") == 0
    assert parse_timecode("100:00:00") == 100 * 3600 * 1000


@pytest.mark.parametrize("bad", [
    "00:61:00", "1:2", "-5", "", "00:00:60", "01:00:00.25", "01:00:00.2500",
    "1:00:00", "00:01", "00:01:00,5", " 60000", "60000 ", "0x10",
])
def test_parse_timecode_rejects(bad):
    with pytest.raises(TimecodeError):
        parse_timecode(bad)


def test_format_timecode_examples():
    assert format_timecode(60000) == "00:01:00"
    assert format_timecode(3600250) == "01:00:00.250"
    assert format_timecode(0) == "00:00:00"
    assert format_timecode(100 * 3600 * 1000) == "100:00:00"
    assert format_timecode(61) == "00:00:00.061"


@given(st.integers(min_value=0, max_value=500 * 3600 * 1000))
def test_timecode_round_trip(t):
    assert parse_timecode(format_timecode(t)) == t


# --- parse_package ------------------------------------------------------------


def test_parse_minimal_package():
    pkg = parse_package(to_bytes(minimal_doc()))
    assert pkg.media.duration_ms == 60000
    assert [t.id for t in pkg.types] == ["shot"]
    assert pkg.annotations == ()


def test_parse_rejects_inverted_interval():
    doc = minimal_doc(annotations=[
        {"id": "a1", "type": "shot", "begin": 5000, "end": 3000, "value": "x"},
    ])
    with pytest.raises(ValidationError) as err:
        parse_package(to_bytes(doc))
    assert err.value.code == "begin_after_end"
    assert "annotations[0]" in err.value.path


def test_parse_round_trip_via_generator():
    pkg = random_package(random.Random(42), max_annotations=100)
    again = parse_package(to_bytes(package_to_json(pkg)))
    assert again == pkg


def test_parse_reports_json_syntax_position():
    with pytest.raises(PackageSyntaxError) as err:
        parse_package(b'{"media": ')
    assert err.value.position >= 0


def test_parse_rejects_non_utf8():
    with pytest.raises(PackageSyntaxError):
        parse_package(b'\xff\xfe{}')


@pytest.mark.parametrize("mangle", [
    lambda d: d.update(extra=1),
    lambda d: d["media"].update(codec="h264"),
    lambda d: d["media"].pop("duration"),
    lambda d: d["media"].update(duration="60000"),
    lambda d: d["media"].update(duration=60000.5),
    lambda d: d["types"][0].pop("label"),
    lambda d: d["types"][0].update(valueKind="interval"),
    lambda d: d["types"][0].update(numericDomain=[1]),
    lambda d: d["annotations"].append({"id": "a", "type": "shot", "begin": 0, "end": 1}),
    lambda d: d["annotations"].append(
        {"id": "a", "type": "shot", "begin": 0, "end": 1, "value": None}),
    lambda d: d["annotations"].append(
        {"id": "a", "type": "shot", "begin": 0, "end": 1, "value": "x", "note": "hm"}),
])
def test_parse_rejects_schema_violations(mangle):
    doc = minimal_doc()
    mangle(doc)
    with pytest.raises(SchemaError):
        parse_package(to_bytes(doc))


def test_annotations_retain_file_order():
    doc = minimal_doc(annotations=[
        {"id": "b", "type": "shot", "begin": 100, "end": 200, "value": "2"},
        {"id": "a", "type": "shot", "begin": 0, "end": 50, "value": "1"},
    ])
    pkg = parse_package(to_bytes(doc))
    assert [a.id for a in pkg.annotations] == ["b", "a"]


# --- validate_package ----------------------------------------------------------


def test_valid_package_reports_no_errors():
    report = validate_package(parse_package(to_bytes(minimal_doc())))
    assert report.errors == ()
    assert report.is_valid


def build_invalid(annotations=(), types=None, duration=60000):
    """Bypass parse_package so invariant violations reach validate_package."""
    return AnnotationPackage(
        media=MediaInfo(id="m", uri="", duration_ms=duration),
        types=types if types is not None else (
            AnnotationType(id="shot", label="S", value_kind=ValueKind.TEXT),),
        annotations=tuple(annotations),
    )


def test_validate_end_exceeds_duration():
    pkg = build_invalid([Annotation("a1", "shot", 0, 70000, TextValue("x"))])
    report = validate_package(pkg)
    assert [e.code for e in report.errors] == ["end_exceeds_duration"]


def test_validate_zero_duration_is_warning_only():
    pkg = build_invalid([Annotation("a1", "shot", 500, 500, TextValue("x"))])
    report = validate_package(pkg)
    assert report.errors == ()
    assert [w.code for w in report.warnings] == ["zero_duration"]


def test_validate_end_at_media_end_is_warning():
    pkg = build_invalid([Annotation("a1", "shot", 0, 60000, TextValue("x"))])
    report = validate_package(pkg)
    assert report.errors == ()
    assert [w.code for w in report.warnings] == ["end_at_duration"]


def test_validate_collects_every_violation():
    pkg = build_invalid([
        Annotation("a1", "shot", 5000, 3000, TextValue("x")),
        Annotation("a1", "ghost", -5, 70000, TextValue("x")),
        Annotation("ok!", "shot", 0, 10, NumericValue(1.0)),
    ])
    codes = {e.code for e in validate_package(pkg).errors}
    assert codes == {
        "begin_after_end", "duplicate_annotation_id", "unknown_type",
        "negative_timecode", "end_exceeds_duration", "invalid_token",
        "value_kind_mismatch",
    }


def test_validate_vocabulary_rules():
    nominal_missing = AnnotationType(id="n", label="N", value_kind=ValueKind.NOMINAL)
    text_with_vocab = AnnotationType(
        id="t", label="T", value_kind=ValueKind.TEXT, vocabulary=("a",))
    dup_vocab = AnnotationType(
        id="d", label="D", value_kind=ValueKind.NOMINAL, vocabulary=("a", "a"))
    bad_domain = AnnotationType(
        id="x", label="X", value_kind=ValueKind.NUMERIC, numeric_domain=(2.0, 2.0))
    misplaced_domain = AnnotationType(
        id="y", label="Y", value_kind=ValueKind.TEXT, numeric_domain=(0.0, 1.0))
    pkg = build_invalid(
        types=(nominal_missing, text_with_vocab, dup_vocab, bad_domain, misplaced_domain))
    codes = {e.code for e in validate_package(pkg).errors}
    assert codes == {
        "vocabulary_required", "vocabulary_not_allowed", "vocabulary_duplicate",
        "invalid_numeric_domain", "numeric_domain_not_allowed",
    }


def test_validate_nominal_token_membership():
    ntype = AnnotationType(id="n", label="N", value_kind=ValueKind.NOMINAL, vocabulary=("in",))
    from annotimeline.model import NominalValue
    pkg = build_invalid(
        [Annotation("a1", "n", 0, 10, NominalValue("out"))], types=(ntype,))
    assert [e.code for e in validate_package(pkg).errors] == ["token_not_in_vocabulary"]


def test_validate_nonfinite_numeric():
    ntype = AnnotationType(id="v", label="V", value_kind=ValueKind.NUMERIC)
    pkg = build_invalid(
        [Annotation("a1", "v", 0, 10, NumericValue(float("inf")))], types=(ntype,))
    assert [e.code for e in validate_package(pkg).errors] == ["nonfinite_numeric"]


# --- query_window ---------------------------------------------------------------


def test_window_half_open_adjacency():
    pkg = make_package([(0, 10), (10, 20)])
    hits = query_window(pkg, "t", 10, 20)
    assert [a.begin_ms for a in hits] == [10]


def test_window_full_duration_returns_sorted_track():
    pkg = make_package([(50, 60), (0, 10), (0, 5), (20, 30)], duration=100)
    hits = query_window(pkg, "t", 0, 100)
    assert [(a.begin_ms, a.end_ms) for a in hits] == [(0, 5), (0, 10), (20, 30), (50, 60)]


def test_window_zero_duration_widening():
    pkg = make_package([(5, 5)], duration=100)
    assert len(query_window(pkg, "t", 5, 6)) == 1
    assert len(query_window(pkg, "t", 4, 6)) == 1
    assert query_window(pkg, "t", 0, 5) == []
    assert query_window(pkg, "t", 6, 10) == []


def test_window_unknown_type():
    pkg = make_package([])
    with pytest.raises(UnknownTypeError):
        query_window(pkg, "ghost", 0, 10)


def test_window_requires_nonempty_window():
    pkg = make_package([])
    with pytest.raises(ValueError):
        query_window(pkg, "t", 10, 10)


def test_window_matches_linear_scan_oracle():
    rng = random.Random(7)
    duration = 100_000
    intervals = []
    for _ in range(50):
        b = rng.randrange(0, duration)
        e = min(duration, b + rng.randrange(0, duration // 5))
        intervals.append((b, e))
    pkg = make_package(intervals, duration=duration)
    lo, hi = duration // 4, duration * 3 // 4
    assert query_window(pkg, "t", lo, hi) == overlap_scan(pkg.annotations, lo, hi)


def test_window_partition_union_covers_track():
    rng = random.Random(13)
    for _ in range(20):
        pkg = random_package(rng, max_annotations=60)
        duration = pkg.media.duration_ms
        cuts = sorted({duration // 4, duration // 2, duration * 3 // 4} - {0, duration})
        bounds = [0, *cuts, duration]
        for tid in [t.id for t in pkg.types]:
            seen = set()
            for lo, hi in zip(bounds, bounds[1:]):
                seen.update(a.id for a in query_window(pkg, tid, lo, hi))
            assert seen == {a.id for a in pkg.annotations_of(tid)}


def test_disjoint_windows_share_only_boundary_spanners():
    pkg = make_package([(0, 10), (8, 20), (20, 30)], duration=100)
    left = {a.id for a in query_window(pkg, "t", 0, 15)}
    right = {a.id for a in query_window(pkg, "t", 15, 30)}
    spanners = left & right
    assert spanners == {"a001"}  # only the interval crossing t=15


def test_package_from_json_matches_parse():
    doc = minimal_doc()
    assert package_from_json(json.loads(json.dumps(doc))) == parse_package(to_bytes(doc))
