"""Annotation packages: domain types, JSON ingestion, validation, window queries.

A package bundles one media reference with typed annotation tracks. Packages
are immutable after construction; every operation here is a pure read, so
packages can be shared freely across threads.

Times are integer milliseconds from media start throughout.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

MS_PER_SECOND = 1000
MS_PER_MINUTE = 60 * MS_PER_SECOND
MS_PER_HOUR = 60 * MS_PER_MINUTE

# URL-safe identifier: appears in config strings, service paths and SVG ids.
TOKEN_RE = re.compile(r"^[A-Za-z0-9_-]+$")

_TIMECODE_RE = re.compile(r"^(\d{2,}):([0-5]\d):([0-5]\d)(?:\.(\d{3}))?$")
_MILLIS_RE = re.compile(r"^\d+$")


class PackageError(Exception):
    """Base class for package ingestion failures."""


class PackageSyntaxError(PackageError):
    """Input is not well-formed UTF-8 JSON."""

    def __init__(self, position: int, message: str):
        super().__init__(f"invalid package JSON at offset {position}: {message}")
        self.position = position


class SchemaError(PackageError):
    """JSON is well-formed but does not match the package schema."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class ValidationError(PackageError):
    """A structural invariant of the package is violated."""

    def __init__(self, code: str, path: str, message: str):
        super().__init__(f"{path}: {message} [{code}]")
        self.code = code
        self.path = path


class UnknownTypeError(PackageError):
    def __init__(self, type_id: str):
        super().__init__(f"unknown annotation type: {type_id!r}")
        self.type_id = type_id


class TimecodeError(ValueError):
    def __init__(self, text: str, reason: str):
        super().__init__(f"invalid timecode {text!r}: {reason}")
        self.text = text
        self.reason = reason


class ValueKind(Enum):
    TEXT = "text"
    NOMINAL = "nominal"
    NUMERIC = "numeric"
    TRANSITION = "transition"


@dataclass(frozen=True)
class TextValue:
    text: str


@dataclass(frozen=True)
class NominalValue:
    token: str


@dataclass(frozen=True)
class NumericValue:
    number: float


@dataclass(frozen=True)
class TransitionValue:
    from_token: str
    to_token: str


AnnotationValue = TextValue | NominalValue | NumericValue | TransitionValue

_KIND_FOR_VALUE = {
    TextValue: ValueKind.TEXT,
    NominalValue: ValueKind.NOMINAL,
    NumericValue: ValueKind.NUMERIC,
    TransitionValue: ValueKind.TRANSITION,
}


def value_text(value: AnnotationValue) -> str:
    """Human-readable text of an annotation value, used for labels and hashing."""
    if isinstance(value, TextValue):
        return value.text
    if isinstance(value, NominalValue):
        return value.token
    if isinstance(value, NumericValue):
        return format(value.number, "g")
    return f"{value.from_token}→{value.to_token}"


@dataclass(frozen=True)
class MediaInfo:
    id: str
    uri: str
    duration_ms: int


@dataclass(frozen=True)
class AnnotationType:
    id: str
    label: str
    value_kind: ValueKind
    vocabulary: tuple[str, ...] | None = None
    numeric_domain: tuple[float, float] | None = None


@dataclass(frozen=True)
class Annotation:
    id: str
    type_id: str
    begin_ms: int
    end_ms: int
    value: AnnotationValue

    def sort_key(self) -> tuple[int, int, str]:
        return (self.begin_ms, self.end_ms, self.id)


@dataclass(frozen=True)
class AnnotationPackage:
    media: MediaInfo
    types: tuple[AnnotationType, ...]
    annotations: tuple[Annotation, ...]

    @cached_property
    def types_by_id(self) -> dict[str, AnnotationType]:
        return {t.id: t for t in self.types}

    @cached_property
    def annotations_by_id(self) -> dict[str, Annotation]:
        return {a.id: a for a in self.annotations}

    @cached_property
    def _track_index(self) -> dict[str, list[Annotation]]:
        by_type: dict[str, list[Annotation]] = {t.id: [] for t in self.types}
        for a in self.annotations:
            if a.type_id in by_type:
                by_type[a.type_id].append(a)
        for anns in by_type.values():
            anns.sort(key=Annotation.sort_key)
        return by_type

    def annotations_of(self, type_id: str) -> list[Annotation]:
        """All annotations of one type, sorted by (begin, end, id)."""
        if type_id not in self.types_by_id:
            raise UnknownTypeError(type_id)
        return list(self._track_index[type_id])


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[ValidationIssue, ...]
    warnings: tuple[ValidationIssue, ...]

    @property
    def is_valid(self) -> bool:
        return not self.errors


def parse_timecode(text: str) -> int:
    """Parse a timecode: plain milliseconds or HH:MM:SS with optional .mmm."""
    if _MILLIS_RE.match(text):
        return int(text)
    m = _TIMECODE_RE.match(text)
    if not m:
        raise TimecodeError(text, "expected milliseconds or HH:MM:SS[.mmm]")
    hours, minutes, seconds = int(m.group(1)), int(m.group(2)), int(m.group(3))
    millis = int(m.group(4)) if m.group(4) else 0
    return hours * MS_PER_HOUR + minutes * MS_PER_MINUTE + seconds * MS_PER_SECOND + millis


def format_timecode(ms: int) -> str:
    """Canonical timecode: HH:MM:SS, with .mmm only when milliseconds are nonzero."""
    if ms < 0:
        raise ValueError(f"negative timecode: {ms}")
    hours, rest = divmod(ms, MS_PER_HOUR)
    minutes, rest = divmod(rest, MS_PER_MINUTE)
    seconds, millis = divmod(rest, MS_PER_SECOND)
    base = f"{hours:02d}:{minutes:02d}:{seconds:02d}"
    return base if millis == 0 else f"{base}.{millis:03d}"


def effective_end_ms(a: Annotation) -> int:
    """End used for overlap tests: zero-duration annotations are widened to 1 ms."""
    return a.end_ms if a.end_ms > a.begin_ms else a.begin_ms + 1


def query_window(pkg: AnnotationPackage, type_id: str, from_ms: int, to_ms: int) -> list[Annotation]:
    """Annotations of one type overlapping the half-open window [from, to).

    An annotation [b, e) overlaps iff b < to and e > from; zero-duration
    annotations count as 1 ms long. Results are sorted by (begin, end, id).
    """
    if from_ms >= to_ms:
        raise ValueError(f"empty window: [{from_ms}, {to_ms})")
    track = pkg.annotations_of(type_id)
    return [a for a in track if a.begin_ms < to_ms and effective_end_ms(a) > from_ms]


# --- JSON ingestion -------------------------------------------------------

_TOP_KEYS = {"media", "types", "annotations"}
_MEDIA_KEYS = {"id", "uri", "duration"}
_TYPE_KEYS = {"id", "label", "valueKind", "vocabulary", "numericDomain"}
_ANNOTATION_KEYS = {"id", "type", "begin", "end", "value"}
_TRANSITION_KEYS = {"from", "to"}


def _check_keys(obj: dict, allowed: set[str], path: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        name = sorted(unknown)[0]
        raise SchemaError(f"{path}.{name}" if path else name, "unknown key")


def _get(obj: dict, key: str, path: str):
    if key not in obj:
        raise SchemaError(f"{path}.{key}" if path else key, "missing key")
    return obj[key]


def _as_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(path, "expected a string")
    return value


def _as_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, "expected an integer")
    return value


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, "expected a number")
    return float(value)


def _as_dict(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(path, "expected an object")
    return value


def _as_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(path, "expected an array")
    return value


def _type_from_json(obj, path: str) -> AnnotationType:
    obj = _as_dict(obj, path)
    _check_keys(obj, _TYPE_KEYS, path)
    kind_name = _as_str(_get(obj, "valueKind", path), f"{path}.valueKind")
    try:
        kind = ValueKind(kind_name)
    except ValueError:
        raise SchemaError(f"{path}.valueKind", f"unknown value kind {kind_name!r}") from None
    vocabulary = None
    if "vocabulary" in obj:
        entries = _as_list(obj["vocabulary"], f"{path}.vocabulary")
        vocabulary = tuple(_as_str(e, f"{path}.vocabulary[{i}]") for i, e in enumerate(entries))
    domain = None
    if "numericDomain" in obj:
        pair = _as_list(obj["numericDomain"], f"{path}.numericDomain")
        if len(pair) != 2:
            raise SchemaError(f"{path}.numericDomain", "expected [min, max]")
        domain = (
            _as_number(pair[0], f"{path}.numericDomain[0]"),
            _as_number(pair[1], f"{path}.numericDomain[1]"),
        )
    return AnnotationType(
        id=_as_str(_get(obj, "id", path), f"{path}.id"),
        label=_as_str(_get(obj, "label", path), f"{path}.label"),
        value_kind=kind,
        vocabulary=vocabulary,
        numeric_domain=domain,
    )


def _value_from_json(raw, kind: ValueKind | None, path: str) -> AnnotationValue:
    if isinstance(raw, dict):
        _check_keys(raw, _TRANSITION_KEYS, path)
        value: AnnotationValue = TransitionValue(
            from_token=_as_str(_get(raw, "from", path), f"{path}.from"),
            to_token=_as_str(_get(raw, "to", path), f"{path}.to"),
        )
    elif isinstance(raw, str):
        value = NominalValue(raw) if kind is ValueKind.NOMINAL else TextValue(raw)
    elif isinstance(raw, bool) or raw is None:
        raise SchemaError(path, "expected a string, number or {from, to} object")
    elif isinstance(raw, (int, float)):
        value = NumericValue(float(raw))
    else:
        raise SchemaError(path, "expected a string, number or {from, to} object")
    return value


def _annotation_from_json(obj, types_by_id: dict[str, AnnotationType], path: str) -> Annotation:
    obj = _as_dict(obj, path)
    _check_keys(obj, _ANNOTATION_KEYS, path)
    type_id = _as_str(_get(obj, "type", path), f"{path}.type")
    atype = types_by_id.get(type_id)
    kind = atype.value_kind if atype else None
    return Annotation(
        id=_as_str(_get(obj, "id", path), f"{path}.id"),
        type_id=type_id,
        begin_ms=_as_int(_get(obj, "begin", path), f"{path}.begin"),
        end_ms=_as_int(_get(obj, "end", path), f"{path}.end"),
        value=_value_from_json(_get(obj, "value", path), kind, f"{path}.value"),
    )


def package_from_json(doc) -> AnnotationPackage:
    """Build a package from decoded JSON; shape errors raise SchemaError.

    The result is not yet validated: run validate_package for invariants.
    """
    doc = _as_dict(doc, "")
    _check_keys(doc, _TOP_KEYS, "")
    media_obj = _as_dict(_get(doc, "media", ""), "media")
    _check_keys(media_obj, _MEDIA_KEYS, "media")
    media = MediaInfo(
        id=_as_str(_get(media_obj, "id", "media"), "media.id"),
        uri=_as_str(_get(media_obj, "uri", "media"), "media.uri"),
        duration_ms=_as_int(_get(media_obj, "duration", "media"), "media.duration"),
    )
    types = tuple(
        _type_from_json(t, f"types[{i}]")
        for i, t in enumerate(_as_list(_get(doc, "types", ""), "types"))
    )
    types_by_id = {t.id: t for t in types}
    annotations = tuple(
        _annotation_from_json(a, types_by_id, f"annotations[{i}]")
        for i, a in enumerate(_as_list(_get(doc, "annotations", ""), "annotations"))
    )
    return AnnotationPackage(media=media, types=types, annotations=annotations)


def package_to_json(pkg: AnnotationPackage) -> dict:
    """Inverse of package_from_json; parse(serialize(pkg)) round-trips."""
    types = []
    for t in pkg.types:
        decl: dict = {"id": t.id, "label": t.label, "valueKind": t.value_kind.value}
        if t.vocabulary is not None:
            decl["vocabulary"] = list(t.vocabulary)
        if t.numeric_domain is not None:
            decl["numericDomain"] = list(t.numeric_domain)
        types.append(decl)
    annotations = []
    for a in pkg.annotations:
        if isinstance(a.value, TextValue):
            value: object = a.value.text
        elif isinstance(a.value, NominalValue):
            value = a.value.token
        elif isinstance(a.value, NumericValue):
            number = a.value.number
            value = int(number) if number.is_integer() else number
        else:
            value = {"from": a.value.from_token, "to": a.value.to_token}
        annotations.append({
            "id": a.id, "type": a.type_id, "begin": a.begin_ms, "end": a.end_ms, "value": value,
        })
    return {
        "media": {"id": pkg.media.id, "uri": pkg.media.uri, "duration": pkg.media.duration_ms},
        "types": types,
        "annotations": annotations,
    }


def parse_package(data: bytes) -> AnnotationPackage:
    """Parse and fully validate a package file; raises on the first error."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise PackageSyntaxError(e.start, "not valid UTF-8") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise PackageSyntaxError(e.pos, e.msg) from None
    pkg = package_from_json(doc)
    report = validate_package(pkg)
    if report.errors:
        first = report.errors[0]
        raise ValidationError(first.code, first.path, first.message)
    return pkg


# --- Validation -----------------------------------------------------------


def _check_token(value: str, path: str, errors: list[ValidationIssue]) -> None:
    if not TOKEN_RE.match(value):
        errors.append(ValidationIssue("invalid_token", path, f"{value!r} is not a valid token"))


def _validate_type(atype: AnnotationType, path: str, errors: list[ValidationIssue]) -> None:
    _check_token(atype.id, f"{path}.id", errors)
    needs_vocab = atype.value_kind in (ValueKind.NOMINAL, ValueKind.TRANSITION)
    if needs_vocab and atype.vocabulary is None:
        errors.append(ValidationIssue(
            "vocabulary_required", f"{path}.vocabulary",
            f"{atype.value_kind.value} types need a vocabulary"))
    if not needs_vocab and atype.vocabulary is not None:
        errors.append(ValidationIssue(
            "vocabulary_not_allowed", f"{path}.vocabulary",
            f"{atype.value_kind.value} types take no vocabulary"))
    if atype.vocabulary is not None:
        if not atype.vocabulary:
            errors.append(ValidationIssue("vocabulary_empty", f"{path}.vocabulary", "vocabulary is empty"))
        seen = set()
        for j, token in enumerate(atype.vocabulary):
            _check_token(token, f"{path}.vocabulary[{j}]", errors)
            if token in seen:
                errors.append(ValidationIssue(
                    "vocabulary_duplicate", f"{path}.vocabulary[{j}]", f"duplicate entry {token!r}"))
            seen.add(token)
    if atype.numeric_domain is not None:
        if atype.value_kind is not ValueKind.NUMERIC:
            errors.append(ValidationIssue(
                "numeric_domain_not_allowed", f"{path}.numericDomain",
                f"{atype.value_kind.value} types take no numeric domain"))
        else:
            lo, hi = atype.numeric_domain
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
                errors.append(ValidationIssue(
                    "invalid_numeric_domain", f"{path}.numericDomain", "expected finite min < max"))


def _validate_value(a: Annotation, atype: AnnotationType, path: str, errors: list[ValidationIssue]) -> None:
    if _KIND_FOR_VALUE[type(a.value)] is not atype.value_kind:
        errors.append(ValidationIssue(
            "value_kind_mismatch", f"{path}.value",
            f"type {atype.id!r} holds {atype.value_kind.value} values"))
        return
    vocab = atype.vocabulary or ()
    if isinstance(a.value, NominalValue):
        if a.value.token not in vocab:
            errors.append(ValidationIssue(
                "token_not_in_vocabulary", f"{path}.value", f"{a.value.token!r} not in vocabulary"))
    elif isinstance(a.value, TransitionValue):
        for token in (a.value.from_token, a.value.to_token):
            if token not in vocab:
                errors.append(ValidationIssue(
                    "token_not_in_vocabulary", f"{path}.value", f"{token!r} not in vocabulary"))
    elif isinstance(a.value, NumericValue):
        if not math.isfinite(a.value.number):
            errors.append(ValidationIssue("nonfinite_numeric", f"{path}.value", "value must be finite"))


def validate_package(pkg: AnnotationPackage) -> ValidationReport:
    """Check every invariant; all violations are reported, not only the first."""
    errors: list[ValidationIssue] = []
    warnings: list[ValidationIssue] = []
    duration = pkg.media.duration_ms

    _check_token(pkg.media.id, "media.id", errors)
    if duration <= 0:
        errors.append(ValidationIssue("invalid_duration", "media.duration", "duration must be positive"))

    seen_types: set[str] = set()
    for i, atype in enumerate(pkg.types):
        path = f"types[{i}]"
        _validate_type(atype, path, errors)
        if atype.id in seen_types:
            errors.append(ValidationIssue("duplicate_type_id", f"{path}.id", f"duplicate type {atype.id!r}"))
        seen_types.add(atype.id)

    seen_ids: set[str] = set()
    for i, a in enumerate(pkg.annotations):
        path = f"annotations[{i}]"
        _check_token(a.id, f"{path}.id", errors)
        if a.id in seen_ids:
            errors.append(ValidationIssue("duplicate_annotation_id", f"{path}.id", f"duplicate id {a.id!r}"))
        seen_ids.add(a.id)
        if a.begin_ms < 0:
            errors.append(ValidationIssue("negative_timecode", f"{path}.begin", "begin must be >= 0"))
        if a.begin_ms > a.end_ms:
            errors.append(ValidationIssue("begin_after_end", path, "begin is after end"))
        elif duration > 0 and a.end_ms > duration:
            errors.append(ValidationIssue("end_exceeds_duration", f"{path}.end", "end is past media duration"))
        atype = pkg.types_by_id.get(a.type_id)
        if atype is None:
            errors.append(ValidationIssue("unknown_type", f"{path}.type", f"undeclared type {a.type_id!r}"))
        else:
            _validate_value(a, atype, path, errors)
        if a.begin_ms == a.end_ms:
            warnings.append(ValidationIssue("zero_duration", path, "zero-duration annotation"))
        if a.end_ms == duration:
            warnings.append(ValidationIssue("end_at_duration", f"{path}.end", "annotation ends at media end"))

    return ValidationReport(errors=tuple(errors), warnings=tuple(warnings))
