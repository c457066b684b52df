"""HTTP service: package registration plus timeline layout/SVG retrieval.

Packages are immutable and content-addressed (the id is a hash of the
uploaded bytes), so a shared URL always names one exact dataset and one
exact configuration. Registration is atomic-publish: a package becomes
visible to readers only after full validation.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse

from . import config as dsl
from .layout import WidthError, layout_timeline, layout_to_json
from .model import (
    Annotation,
    AnnotationPackage,
    PackageError,
    PackageSyntaxError,
    SchemaError,
    ValidationError,
    format_timecode,
    parse_package,
    value_text,
)
from .svg import render_svg

DEFAULT_PORT = 8710
DEFAULT_MAX_PACKAGE_BYTES = 64 * 1024 * 1024
DEFAULT_WIDTH_PX = 1200
MIN_WIDTH_PX = 100
MAX_WIDTH_PX = 20000


class PackageTooLargeError(Exception):
    def __init__(self, size: int, limit: int):
        super().__init__(f"package of {size} bytes exceeds the {limit} byte limit")


@dataclass(frozen=True)
class StoredPackage:
    id: str
    package: AnnotationPackage
    data: bytes


def package_id(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class PackageStore:
    """Content-addressed registry of validated packages.

    Reads are lock-free dictionary lookups; writes validate first and then
    publish the finished entry under a lock, so concurrent readers never
    observe a partially registered package.
    """

    def __init__(self, data_dir: Path | None = None,
                 max_package_bytes: int = DEFAULT_MAX_PACKAGE_BYTES):
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self.max_package_bytes = max_package_bytes
        self._entries: dict[str, StoredPackage] = {}
        self._lock = threading.Lock()
        if self.data_dir is not None:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            self._load_existing()

    def _load_existing(self) -> None:
        for path in sorted(self.data_dir.glob("*.json")):
            data = path.read_bytes()
            try:
                pkg = parse_package(data)
            except PackageError:
                continue  # foreign or corrupt file; leave it alone
            pid = package_id(data)
            self._entries[pid] = StoredPackage(pid, pkg, data)

    def put(self, data: bytes) -> StoredPackage:
        if len(data) > self.max_package_bytes:
            raise PackageTooLargeError(len(data), self.max_package_bytes)
        pkg = parse_package(data)
        pid = package_id(data)
        with self._lock:
            existing = self._entries.get(pid)
            if existing is not None:
                return existing
            entry = StoredPackage(pid, pkg, data)
            if self.data_dir is not None:
                tmp = self.data_dir / f".{pid}.tmp"
                tmp.write_bytes(data)
                tmp.replace(self.data_dir / f"{pid}.json")
            self._entries[pid] = entry
            return entry

    def get(self, pid: str) -> StoredPackage | None:
        return self._entries.get(pid)

    def ids(self) -> list[str]:
        return sorted(self._entries)


def summary_json(entry: StoredPackage) -> dict:
    pkg = entry.package
    per_type = {t.id: 0 for t in pkg.types}
    for a in pkg.annotations:
        per_type[a.type_id] += 1
    types = []
    for t in pkg.types:
        item: dict = {"id": t.id, "label": t.label, "valueKind": t.value_kind.value,
                      "annotationCount": per_type[t.id]}
        if t.vocabulary is not None:
            item["vocabulary"] = list(t.vocabulary)
        if t.numeric_domain is not None:
            item["numericDomain"] = list(t.numeric_domain)
        types.append(item)
    return {
        "id": entry.id,
        "media": {"id": pkg.media.id, "uri": pkg.media.uri, "duration": pkg.media.duration_ms},
        "types": types,
        "annotationCount": len(pkg.annotations),
    }


def annotation_json(pkg: AnnotationPackage, a: Annotation) -> dict:
    atype = pkg.types_by_id[a.type_id]
    value: dict = {"kind": atype.value_kind.value, "text": value_text(a.value)}
    if atype.value_kind.value == "numeric":
        value["number"] = a.value.number
    elif atype.value_kind.value == "nominal":
        value["token"] = a.value.token
    elif atype.value_kind.value == "transition":
        value["from"] = a.value.from_token
        value["to"] = a.value.to_token
    return {
        "id": a.id,
        "typeId": a.type_id,
        "typeLabel": atype.label,
        "begin": a.begin_ms,
        "end": a.end_ms,
        "beginTimecode": format_timecode(a.begin_ms),
        "endTimecode": format_timecode(a.end_ms),
        "value": value,
    }


def _error_response(status: int, code: str, message: str, position: int | None = None) -> JSONResponse:
    body: dict = {"code": code, "message": message}
    if position is not None:
        body["position"] = position
    return JSONResponse(status_code=status, content=body)


def _dsl_error(e: Exception) -> JSONResponse:
    if isinstance(e, dsl.DuplicateKeyError):
        return _error_response(400, "duplicate_key", str(e), e.position)
    if isinstance(e, dsl.UnknownKeyError):
        return _error_response(400, "unknown_key", str(e), e.position)
    if isinstance(e, dsl.ParseError):
        return _error_response(400, "parse_error", str(e), e.position)
    if isinstance(e, dsl.UnknownTrackError):
        return _error_response(400, "unknown_track", str(e))
    if isinstance(e, dsl.EmptyViewportError):
        return _error_response(400, "empty_viewport", str(e))
    if isinstance(e, dsl.EmptyTrackListError):
        return _error_response(400, "empty_track_list", str(e))
    raise e


class InvalidWidthError(Exception):
    def __init__(self, text: str):
        super().__init__(
            f"width must be an integer in [{MIN_WIDTH_PX}, {MAX_WIDTH_PX}], got {text!r}")


def split_width_param(raw_query: str) -> tuple[str, int]:
    """Pull the width parameter out of a query, leaving the DSL untouched."""
    if raw_query == "":
        return "", DEFAULT_WIDTH_PX
    kept = []
    width: int | None = None
    for part in raw_query.split("&"):
        if part.startswith("width="):
            text = part[len("width="):]
            if width is not None:
                raise InvalidWidthError(text)
            try:
                width = int(text)
            except ValueError:
                raise InvalidWidthError(text) from None
            if not MIN_WIDTH_PX <= width <= MAX_WIDTH_PX:
                raise InvalidWidthError(text)
        else:
            kept.append(part)
    return "&".join(kept), width if width is not None else DEFAULT_WIDTH_PX


def create_app(store: PackageStore, ui_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="annotimeline", docs_url=None, redoc_url=None)
    app.state.store = store

    def _raw_query(request: Request) -> str:
        return request.scope.get("query_string", b"").decode("utf-8")

    @app.post("/packages")
    async def upload_package(request: Request):
        data = await request.body()
        try:
            entry = store.put(data)
        except PackageTooLargeError as e:
            return _error_response(413, "package_too_large", str(e))
        except PackageSyntaxError as e:
            return _error_response(400, "syntax_error", str(e), e.position)
        except SchemaError as e:
            return _error_response(400, "schema_error", str(e))
        except ValidationError as e:
            return _error_response(400, "validation_error", str(e))
        return JSONResponse(summary_json(entry))

    @app.get("/packages/{pid}")
    def get_summary(pid: str):
        entry = store.get(pid)
        if entry is None:
            return _error_response(404, "unknown_package", f"no package with id {pid!r}")
        return JSONResponse(summary_json(entry))

    def _layout_or_error(pid: str, raw_query: str):
        entry = store.get(pid)
        if entry is None:
            return _error_response(404, "unknown_package", f"no package with id {pid!r}")
        try:
            query, width = split_width_param(raw_query)
            cfg = dsl.parse_config(query)
            rc = dsl.resolve_config(cfg, entry.package)
            return layout_timeline(entry.package, rc, width)
        except (InvalidWidthError, WidthError) as e:
            return _error_response(400, "invalid_width", str(e))
        except (dsl.ParseError, dsl.UnknownTrackError, dsl.EmptyViewportError,
                dsl.EmptyTrackListError) as e:
            return _dsl_error(e)

    @app.get("/packages/{pid}/timeline.svg")
    def get_timeline_svg(pid: str, request: Request):
        layout = _layout_or_error(pid, _raw_query(request))
        if isinstance(layout, JSONResponse):
            return layout
        return Response(content=render_svg(layout), media_type="image/svg+xml")

    @app.get("/packages/{pid}/timeline.json")
    def get_timeline_json(pid: str, request: Request):
        layout = _layout_or_error(pid, _raw_query(request))
        if isinstance(layout, JSONResponse):
            return layout
        return JSONResponse(layout_to_json(layout))

    @app.get("/packages/{pid}/annotations/{ann_id}")
    def get_annotation(pid: str, ann_id: str):
        entry = store.get(pid)
        if entry is None:
            return _error_response(404, "unknown_package", f"no package with id {pid!r}")
        a = entry.package.annotations_by_id.get(ann_id)
        if a is None:
            return _error_response(404, "unknown_annotation", f"no annotation with id {ann_id!r}")
        return JSONResponse(annotation_json(entry.package, a))

    @app.get("/canonical")
    def canonicalize(request: Request):
        try:
            cfg = dsl.parse_config(_raw_query(request))
        except dsl.ParseError as e:
            return _dsl_error(e)
        return PlainTextResponse(dsl.serialize_config(cfg))

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def run_server(port: int = DEFAULT_PORT, data_dir: Path | None = None,
               max_package_bytes: int = DEFAULT_MAX_PACKAGE_BYTES,
               host: str = "127.0.0.1", ui_dir: Path | None = None) -> None:
    import uvicorn

    store = PackageStore(data_dir=data_dir, max_package_bytes=max_package_bytes)
    uvicorn.run(create_app(store, ui_dir=ui_dir), host=host, port=port)
