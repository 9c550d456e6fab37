"""Scholarly metadata records: parsing, normalization, deduplication, storage.

The corpus file format is UTF-8 JSON Lines, one record per line:

    {"uid": str, "title": str, "abstract": str?, "authors": [{"name": str,
     "institution": str?}], "venue": str?, "year": int, "doi": str?,
     "keywords": [str]?, "references": [str]?}

Records failing validation are rejected with a per-category tally; duplicate
uids keep the first record seen. After ingest the store is immutable and can
be shared freely across threads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Protocol, Sequence, runtime_checkable

YEAR_MIN = 1800
YEAR_MAX = 2100

_WS_RE = re.compile(r"\s+")
_ALNUM_RE = re.compile(r"[a-z0-9]")


class CorpusError(ValueError):
    """Base class for record-level ingest failures.

    ``category`` is the ingest-stats bucket the failure counts toward.
    """

    category = "invalid"


class MalformedJsonError(CorpusError):
    category = "malformed_json"


class MissingFieldError(CorpusError):
    category = "missing_field"


class YearOutOfRangeError(CorpusError):
    category = "year_out_of_range"


@dataclass(frozen=True)
class AuthorRef:
    """One author as given in a record plus the canonical lookup form."""

    raw_name: str
    canonical_name: str
    institution: Optional[str] = None


@dataclass(frozen=True)
class MetadataRecord:
    """One publication's curated metadata.

    ``references`` holds cited uids, already stripped of self-citations and
    duplicates. ``keywords`` are lowercase and duplicate-free.
    """

    uid: str
    title: str
    authors: tuple[AuthorRef, ...]
    year: int
    abstract: str = ""
    venue: str = ""
    doi: Optional[str] = None
    keywords: tuple[str, ...] = ()
    references: tuple[str, ...] = ()
    source: str = "local"


@dataclass
class IngestStats:
    """Per-ingest accounting. accepted + rejected + deduplicated == lines seen."""

    accepted: int = 0
    rejected: int = 0
    deduplicated: int = 0
    rejected_by_category: dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return self.accepted + self.rejected + self.deduplicated


@dataclass(frozen=True)
class CorpusStore:
    """Immutable uid -> record map produced by :func:`ingest_corpus`."""

    records: Mapping[str, MetadataRecord]
    stats: IngestStats

    def __len__(self) -> int:
        return len(self.records)

    def uids(self) -> list[str]:
        return sorted(self.records)


def normalize_name(raw: str) -> str:
    """Collapse an author name to the canonical "family, g." form.

    "Given Family" and "Family, Given" inputs map to the same output; given
    names are reduced to initials; everything is lowercased and
    single-spaced. A single-token name stays as the bare family name.
    """
    cleaned = _WS_RE.sub(" ", raw).strip()
    if not cleaned:
        raise CorpusError("author name is empty")
    if "," in cleaned:
        family, _, given = cleaned.partition(",")
    else:
        parts = cleaned.rsplit(" ", 1)
        if len(parts) == 1:
            family, given = parts[0], ""
        else:
            given, family = parts
    family = _WS_RE.sub(" ", family).strip(" ,.").lower()
    initials = []
    for tok in given.split():
        m = _ALNUM_RE.search(tok.lower())
        if m:
            initials.append(m.group(0) + ".")
    if not family:
        raise CorpusError(f"cannot derive family name from {raw!r}")
    if not initials:
        return family
    return f"{family}, {' '.join(initials)}"


def _require(obj: dict, key: str, line_no: Optional[int] = None):
    if key not in obj or obj[key] is None:
        raise MissingFieldError(f"missing required field {key!r}")
    return obj[key]


def parse_record(line: str) -> MetadataRecord:
    """Parse one JSONL line into a validated record.

    Missing optional fields default (empty abstract, no keywords); keywords
    are lowercased with first-occurrence dedup; self-citations and duplicate
    references are dropped. Raises a :class:`CorpusError` subclass whose
    ``category`` feeds the ingest tallies.
    """
    try:
        obj = json.loads(line)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedJsonError(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedJsonError("record line is not a JSON object")

    uid = _require(obj, "uid")
    if not isinstance(uid, str) or not uid.strip():
        raise MissingFieldError("uid must be a non-empty string")
    uid = uid.strip()

    title = _require(obj, "title")
    if not isinstance(title, str) or not title.strip():
        raise MissingFieldError("title must be a non-empty string")

    year = _require(obj, "year")
    if isinstance(year, bool) or not isinstance(year, int):
        raise MissingFieldError("year must be an integer")
    if not YEAR_MIN <= year <= YEAR_MAX:
        raise YearOutOfRangeError(f"year {year} outside [{YEAR_MIN}, {YEAR_MAX}]")

    authors = []
    for entry in obj.get("authors") or []:
        if not isinstance(entry, dict):
            continue
        name = str(entry.get("name") or "").strip()
        if not name:
            continue
        institution = entry.get("institution")
        authors.append(
            AuthorRef(
                raw_name=name,
                canonical_name=normalize_name(name),
                institution=str(institution).strip() if institution else None,
            )
        )

    keywords: list[str] = []
    seen_kw = set()
    for kw in obj.get("keywords") or []:
        norm = _WS_RE.sub(" ", str(kw)).strip().lower()
        if norm and norm not in seen_kw:
            seen_kw.add(norm)
            keywords.append(norm)

    references: list[str] = []
    seen_ref = set()
    for ref in obj.get("references") or []:
        ref = str(ref).strip()
        if ref and ref != uid and ref not in seen_ref:
            seen_ref.add(ref)
            references.append(ref)

    return MetadataRecord(
        uid=uid,
        title=title.strip(),
        abstract=str(obj.get("abstract") or "").strip(),
        authors=tuple(authors),
        venue=str(obj.get("venue") or "").strip(),
        year=year,
        doi=str(obj["doi"]).strip() if obj.get("doi") else None,
        keywords=tuple(keywords),
        references=tuple(references),
        source=str(obj.get("source") or "local"),
    )


def serialize_record(record: MetadataRecord) -> str:
    """Render a record back to its JSONL form (inverse of parse_record)."""
    obj = {
        "uid": record.uid,
        "title": record.title,
        "abstract": record.abstract,
        "authors": [
            {"name": a.raw_name, **({"institution": a.institution} if a.institution else {})}
            for a in record.authors
        ],
        "venue": record.venue,
        "year": record.year,
        "keywords": list(record.keywords),
        "references": list(record.references),
    }
    if record.doi:
        obj["doi"] = record.doi
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def ingest_corpus(lines: Iterable[str]) -> CorpusStore:
    """Build an immutable store from JSONL lines.

    Per-line failures are tallied, never fatal; duplicate uids keep the
    first record and count as deduplicated. Blank lines are skipped without
    affecting the tallies.
    """
    records: dict[str, MetadataRecord] = {}
    stats = IngestStats()
    for line in lines:
        if not line.strip():
            continue
        try:
            rec = parse_record(line)
        except CorpusError as exc:
            stats.rejected += 1
            stats.rejected_by_category[exc.category] = (
                stats.rejected_by_category.get(exc.category, 0) + 1
            )
            continue
        if rec.uid in records:
            stats.deduplicated += 1
            continue
        records[rec.uid] = rec
        stats.accepted += 1
    return CorpusStore(records=MappingProxyType(records), stats=stats)


def store_from_records(records: Sequence[MetadataRecord]) -> CorpusStore:
    """Wrap already-parsed records (first uid wins) in an immutable store."""
    out: dict[str, MetadataRecord] = {}
    stats = IngestStats()
    for rec in records:
        if rec.uid in out:
            stats.deduplicated += 1
            continue
        out[rec.uid] = rec
        stats.accepted += 1
    return CorpusStore(records=MappingProxyType(out), stats=stats)


def get_record(store: CorpusStore, uid: str) -> Optional[MetadataRecord]:
    """Exact-match (case-sensitive) lookup; absence is a None, not an error."""
    return store.records.get(uid)


def load_corpus(path) -> CorpusStore:
    with open(path, encoding="utf-8") as fh:
        return ingest_corpus(fh)


@runtime_checkable
class ScholarlyDatabaseClient(Protocol):
    """Retrieval backend contract: a parsed query in, matching records out.

    The local evaluator over a CorpusStore is the reference implementation
    (litnav.querylang.LocalCorpusClient); a live vendor API would be a remote
    implementation of the same contract.
    """

    def search(self, query) -> list[MetadataRecord]: ...

    def name(self) -> str: ...
