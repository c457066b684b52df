"""Seeded fixture generators shared by the test suite and the snapshot files.

Everything here is deterministic for a fixed seed, so the bundled fixture
package and the checked-in SVG snapshots can be regenerated bit-identically:

    python -m annotimeline.fixtures tests/fixtures
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

from .config import parse_config, resolve_config
from .layout import layout_timeline
from .model import AnnotationPackage, parse_package
from .svg import render_svg

FIXTURE_SEED = 714025
FIXTURE_DURATION_MS = 600_000

SNAPSHOT_WIDTH_PX = 1000
SNAPSHOT_CONFIGS = (
    ("defaults", ""),
    ("window", "tracks=shots,intensity&from=00:02:00&to=00:02:30"),
    ("styled", "color=mood:map(dark=%23222266,bright=%23eedd66,*=gray);intensity:scale(black,red)&height=large"),
    ("compact", "height=compact&label=none"),
    ("binned", "bin=50"),
)

MOOD_VOCABULARY = ["dark", "dim", "bright", "vivid"]


def _shot_annotations(rng: random.Random, count: int, duration_ms: int) -> list[dict]:
    lengths = [rng.randrange(1000, 6000) for _ in range(count)]
    total = sum(lengths)
    boundaries = [0]
    acc = 0
    for length in lengths:
        acc += length
        boundaries.append(round(acc * duration_ms / total))
    return [
        {
            "id": f"sh-{i:03d}",
            "type": "shots",
            "begin": boundaries[i],
            "end": boundaries[i + 1],
            "value": f"Shot {i + 1}",
        }
        for i in range(count)
    ]


def _mood_annotations(rng: random.Random, count: int, duration_ms: int) -> list[dict]:
    out = []
    for i in range(count):
        begin = rng.randrange(0, duration_ms - 30000)
        end = min(duration_ms, begin + rng.randrange(2000, 30000))
        out.append({
            "id": f"mo-{i:03d}",
            "type": "mood",
            "begin": begin,
            "end": end,
            "value": {"from": rng.choice(MOOD_VOCABULARY), "to": rng.choice(MOOD_VOCABULARY)},
        })
    return out


def _intensity_annotations(rng: random.Random, count: int, duration_ms: int) -> list[dict]:
    out = []
    for i in range(count):
        begin = rng.randrange(0, duration_ms - 15000)
        end = min(duration_ms, begin + rng.randrange(1000, 15000))
        out.append({
            "id": f"in-{i:03d}",
            "type": "intensity",
            "begin": begin,
            "end": end,
            "value": round(rng.random(), 3),
        })
    return out


def fixture_package_doc(seed: int = FIXTURE_SEED) -> dict:
    """The bundled fixture: 3 types, 500 annotations, 10 minutes of media."""
    rng = random.Random(seed)
    duration = FIXTURE_DURATION_MS
    annotations = (
        _shot_annotations(rng, 200, duration)
        + _mood_annotations(rng, 100, duration)
        + _intensity_annotations(rng, 200, duration)
    )
    return {
        "media": {"id": "sample-film", "uri": "media/sample-film.mp4", "duration": duration},
        "types": [
            {"id": "shots", "label": "Shot segmentation", "valueKind": "text"},
            {"id": "mood", "label": "Mood development", "valueKind": "transition",
             "vocabulary": MOOD_VOCABULARY},
            {"id": "intensity", "label": "Expressive intensity", "valueKind": "numeric",
             "numericDomain": [0, 1]},
        ],
        "annotations": annotations,
    }


def fixture_package_bytes(seed: int = FIXTURE_SEED) -> bytes:
    return (json.dumps(fixture_package_doc(seed), indent=2) + "\n").encode("utf-8")


def fixture_package(seed: int = FIXTURE_SEED) -> AnnotationPackage:
    return parse_package(fixture_package_bytes(seed))


def synthetic_package(seed: int, n_tracks: int, per_track: int, segment_ms: int = 1000) -> AnnotationPackage:
    """Large benchmark package: per-track chains of short abutting segments."""
    rng = random.Random(seed)
    duration = per_track * segment_ms
    kinds = ["text", "nominal", "numeric", "transition"]
    vocab = ["a", "b", "c", "d", "e"]
    types = []
    annotations = []
    for t in range(n_tracks):
        kind = kinds[t % len(kinds)]
        tid = f"track{t:02d}"
        decl: dict = {"id": tid, "label": f"Track {t}", "valueKind": kind}
        if kind in ("nominal", "transition"):
            decl["vocabulary"] = vocab
        if kind == "numeric":
            decl["numericDomain"] = [0, 1]
        types.append(decl)
        t_cursor = 0
        for i in range(per_track):
            length = rng.randrange(segment_ms // 2, segment_ms + segment_ms // 2)
            begin = t_cursor
            end = min(duration, begin + length)
            if begin >= duration:
                begin = duration - 1
                end = duration
            t_cursor = end
            if kind == "text":
                value: object = f"seg {i}"
            elif kind == "nominal":
                value = rng.choice(vocab)
            elif kind == "numeric":
                value = round(rng.random(), 3)
            else:
                value = {"from": rng.choice(vocab), "to": rng.choice(vocab)}
            annotations.append({
                "id": f"{tid}-{i:05d}",
                "type": tid,
                "begin": begin,
                "end": end,
                "value": value,
            })
    doc = {
        "media": {"id": "bench", "uri": "", "duration": duration},
        "types": types,
        "annotations": annotations,
    }
    return parse_package(json.dumps(doc).encode("utf-8"))


def random_package(rng: random.Random, max_annotations: int = 200) -> AnnotationPackage:
    """Small random package for oracle comparisons; includes point events."""
    duration = rng.randrange(10_000, 120_000)
    vocab = ["v1", "v2", "v3"]
    types = [
        {"id": "alpha", "label": "Alpha", "valueKind": "text"},
        {"id": "beta", "label": "Beta", "valueKind": "nominal", "vocabulary": vocab},
        {"id": "gamma", "label": "Gamma", "valueKind": "numeric"},
    ]
    annotations = []
    for i in range(rng.randrange(0, max_annotations + 1)):
        type_id = rng.choice(["alpha", "beta", "gamma"])
        begin = rng.randrange(0, duration)
        if rng.random() < 0.1:
            end = begin  # point event
        else:
            end = min(duration, begin + rng.randrange(1, duration // 4))
        if type_id == "alpha":
            value: object = f"text {i}"
        elif type_id == "beta":
            value = rng.choice(vocab)
        else:
            value = round(rng.uniform(-5, 5), 3)
        annotations.append({
            "id": f"a{i:04d}",
            "type": type_id,
            "begin": begin,
            "end": end,
            "value": value,
        })
    doc = {
        "media": {"id": "rand", "uri": "", "duration": duration},
        "types": types,
        "annotations": annotations,
    }
    return parse_package(json.dumps(doc).encode("utf-8"))


def render_snapshot(pkg: AnnotationPackage, dsl: str, width_px: int = SNAPSHOT_WIDTH_PX) -> bytes:
    rc = resolve_config(parse_config(dsl), pkg)
    return render_svg(layout_timeline(pkg, rc, width_px))


def regenerate(out_dir: Path) -> list[Path]:
    """Write the bundled package and its SVG snapshots under out_dir."""
    out_dir.mkdir(parents=True, exist_ok=True)
    snapshot_dir = out_dir / "snapshots"
    snapshot_dir.mkdir(exist_ok=True)
    written = []
    package_path = out_dir / "package.json"
    package_path.write_bytes(fixture_package_bytes())
    written.append(package_path)
    pkg = fixture_package()
    for name, dsl in SNAPSHOT_CONFIGS:
        path = snapshot_dir / f"{name}.svg"
        path.write_bytes(render_snapshot(pkg, dsl))
        written.append(path)
    return written


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("tests/fixtures")
    for p in regenerate(target):
        print(p)
