"""File formats and stores.

Schema files embed the content hash of their canonical payload and loaders
verify it, so a record is never interpreted against a silently edited
vocabulary. Record stores are line-delimited JSON for append-safety and
inspectability; export replays every record through resolve() and refuses
rows whose stored node no longer matches.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from pathlib import Path

from .engine import AnnotationRecord
from .errors import (
    CorruptFileError,
    InconsistentRecordError,
    UnknownSchemaStampError,
    VersionMismatchError,
)
from .labels import canonical_label
from .model import Schema, schema_from_payload
from .resolve import resolve

SCHEMA_FORMAT = "vistax-schema/1"
RECORD_SUFFIX = ".vrec"


# --- schema files ---

def save_schema(schema: Schema, path: str | Path) -> None:
    payload = {
        "format": SCHEMA_FORMAT,
        "frozen": schema.frozen,
        "stamp": schema.version_stamp,
        "schema": schema.canonical_payload(),
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=False,
                                     ensure_ascii=True) + "\n", encoding="utf-8")


def load_schema(path: str | Path) -> Schema:
    raw = Path(path).read_text(encoding="utf-8")
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CorruptFileError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(payload, dict) or payload.get("format") != SCHEMA_FORMAT:
        raise VersionMismatchError(
            f"{path}: expected format {SCHEMA_FORMAT!r}, "
            f"found {payload.get('format')!r}")
    try:
        schema = schema_from_payload(payload["schema"], frozen=payload["frozen"])
    except Exception as exc:
        raise CorruptFileError(f"{path}: malformed schema payload ({exc})") from exc
    if schema.version_stamp != payload.get("stamp"):
        raise CorruptFileError(
            f"{path}: content hash mismatch (stored {payload.get('stamp')!r})")
    return schema


# --- record store ---

class RecordStore:
    """Append-only line-delimited record store pinned to known schema stamps."""

    def __init__(self, path: str | Path, known_stamps: set[str] | None = None):
        self.path = Path(path)
        self.known_stamps = set(known_stamps or ())

    def register_stamp(self, stamp: str) -> None:
        self.known_stamps.add(stamp)

    def append(self, records: list[AnnotationRecord]) -> int:
        for record in records:
            if self.known_stamps and record.schema_stamp not in self.known_stamps:
                raise UnknownSchemaStampError(
                    f"record {record.record_id!r} pinned to unknown stamp "
                    f"{record.schema_stamp[:12]}...", locus=record.record_id)
        with self.path.open("a", encoding="utf-8") as handle:
            for record in records:
                handle.write(json.dumps(record.as_dict(), sort_keys=True,
                                        ensure_ascii=True) + "\n")
        return len(records)

    def load(self, annotator: str | None = None, schema_stamp: str | None = None,
             image: str | None = None, schema: Schema | None = None) -> list[AnnotationRecord]:
        """Insertion-ordered load with optional filters; passing a schema
        additionally replays every record against it."""
        if not self.path.exists():
            return []
        records = []
        with self.path.open("r", encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = AnnotationRecord.from_dict(json.loads(line))
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise CorruptFileError(
                        f"{self.path}:{line_no}: bad record line ({exc})") from exc
                if annotator is not None and record.annotator_id != annotator:
                    continue
                if schema_stamp is not None and record.schema_stamp != schema_stamp:
                    continue
                if image is not None and record.image != image:
                    continue
                records.append(record)
        if schema is not None:
            bad = verify_records(records, schema)
            if bad:
                raise InconsistentRecordError(
                    f"{len(bad)} records fail replay against the schema",
                    inconsistencies=bad)
        return records


# --- replay integrity and export ---

def verify_records(records: list[AnnotationRecord], schema: Schema) -> list[dict]:
    """Replay each record's assertions; report every disagreement between the
    stored (node, label, concept id) and what the pinned schema derives."""
    problems = []
    stamp = schema.version_stamp
    for record in records:
        problem = None
        if record.schema_stamp != stamp:
            problem = f"record stamp {record.schema_stamp[:12]} != schema stamp"
        else:
            try:
                replayed = resolve(schema, record.assertions)
            except Exception as exc:
                problem = f"assertions no longer resolve: {exc}"
            else:
                node = schema.nodes.get(record.node_id)
                if replayed.terminal != record.node_id:
                    problem = (f"stored node {record.node_id!r}, "
                               f"replay gives {replayed.terminal!r}")
                elif node is None:
                    problem = f"stored node {record.node_id!r} not in schema"
                elif record.concept_id != node.concept_id:
                    problem = (f"stored concept id {record.concept_id}, "
                               f"schema has {node.concept_id}")
                elif record.label != canonical_label(schema, record.node_id):
                    problem = f"stored label {record.label!r} not the schema binding"
        if problem is not None:
            problems.append({"record_id": record.record_id, "problem": problem})
    return problems


CSV_HEADER = ["image", "x", "y", "width", "height", "concept_id", "label",
              "node_path", "status", "annotator_id", "schema_stamp"]


def build_manifest(records: list[AnnotationRecord], schema: Schema,
                   fmt: str = "csv") -> str:
    """Deterministic export manifest; raises on the first integrity sweep
    if any record fails replay."""
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"unknown export format {fmt!r}")
    bad = verify_records(records, schema)
    if bad:
        raise InconsistentRecordError(
            f"{len(bad)} of {len(records)} records fail replay",
            inconsistencies=bad)
    ordered = sorted(records, key=lambda r: (r.image, r.bbox.x, r.bbox.y,
                                             r.bbox.width, r.bbox.height,
                                             r.annotator_id, r.record_id))
    rows = []
    for r in ordered:
        path = "/".join(resolve(schema, r.assertions).path)
        rows.append({
            "image": r.image, "x": r.bbox.x, "y": r.bbox.y,
            "width": r.bbox.width, "height": r.bbox.height,
            "concept_id": r.concept_id, "label": r.label, "node_path": path,
            "status": r.status, "annotator_id": r.annotator_id,
            "schema_stamp": r.schema_stamp,
        })
    if fmt == "jsonl":
        return "".join(json.dumps(row, sort_keys=True, ensure_ascii=True) + "\n"
                       for row in rows)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def export_dataset(records: list[AnnotationRecord], schema: Schema,
                   path: str | Path, fmt: str = "csv") -> Path:
    manifest = build_manifest(records, schema, fmt=fmt)
    out = Path(path)
    out.write_text(manifest, encoding="utf-8")
    return out


# --- audit log ---

class AuditLog:
    """Append-only audit sink usable directly as a Session's audit argument."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def append(self, event: dict) -> None:
        with self.path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(event, sort_keys=True, ensure_ascii=True) + "\n")

    def load(self) -> list[dict]:
        if not self.path.exists():
            return []
        events = []
        with self.path.open("r", encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line:
                    events.append(json.loads(line))
        return events


# --- image index ---

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".gif", ".bmp", ".webp"}


@dataclass(frozen=True)
class ImageInfo:
    image_id: str
    path: str
    width: int
    height: int
    checksum: str

    def as_dict(self) -> dict:
        return {"image_id": self.image_id, "path": self.path,
                "width": self.width, "height": self.height,
                "checksum": self.checksum}


def build_image_index(directory: str | Path) -> dict[str, ImageInfo]:
    from PIL import Image

    root = Path(directory)
    index: dict[str, ImageInfo] = {}
    if not root.is_dir():
        return index
    for path in sorted(root.iterdir()):
        if path.suffix.lower() not in IMAGE_SUFFIXES or not path.is_file():
            continue
        data = path.read_bytes()
        with Image.open(io.BytesIO(data)) as img:
            width, height = img.size
        index[path.name] = ImageInfo(
            image_id=path.name, path=str(path), width=width, height=height,
            checksum=hashlib.sha256(data).hexdigest())
    return index


# --- experiment config files (flat key=value) ---

def parse_config_file(path: str | Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{line_no}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values
