"""Core domain types plus parsing/serialization for timelines, annotations and pair files.

A *timeline* is a chronologically ordered list of headlines about one evolving
topic.  Annotators assign each headline a group number; merged groupings are
represented as :class:`Partition`.  The binary dataset rows are
:class:`LabeledPair`, serialized in the published JSON pair-file schema.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from datetime import date as Date, datetime
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping, Sequence

from .errors import ParseError, SchemaError

SPLITS = ("train", "dev", "test")

# Cut spellings used by the published pair files, mapped to internal splits.
_CUT_TO_SPLIT = {
    "training": "train",
    "validation": "dev",
    "testing": "test",
    "train": "train",
    "dev": "dev",
    "test": "test",
}
_SPLIT_TO_CUT = {"train": "training", "dev": "validation", "test": "testing"}

# Field order of one entry in the pair-file schema.
HLGD_FIELDS = (
    "headline_a",
    "headline_b",
    "day_a",
    "day_b",
    "source_a",
    "source_b",
    "authors_a",
    "authors_b",
    "url_a",
    "url_b",
    "cut",
    "timeline",
    "label",
)


def _parse_date(raw: str) -> Date:
    return datetime.strptime(raw, "%Y-%m-%d").date()


@dataclass(frozen=True)
class Headline:
    """One time-stamped headline record inside a timeline."""

    id: str
    text: str
    publish_date: Date
    source: str = ""
    url: str | None = None
    content: str | None = None
    authors: str | None = None
    timeline_id: str = ""

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("headline text must be nonempty")
        if not isinstance(self.publish_date, Date):
            raise ValueError("publish_date must be a calendar date")


def day_difference(a: Headline, b: Headline) -> int:
    """Absolute difference of the publication dates in whole calendar days."""
    return abs((a.publish_date - b.publish_date).days)


@dataclass(frozen=True)
class Timeline:
    """Chronologically sorted headlines about one topic, tagged with a corpus split."""

    timeline_id: str
    name: str
    headlines: tuple[Headline, ...]
    split: str = "train"

    def __post_init__(self) -> None:
        if self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}, got {self.split!r}")
        ids = [h.id for h in self.headlines]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate headline ids in timeline: {dupes}")
        keys = [(h.publish_date, h.id) for h in self.headlines]
        if keys != sorted(keys):
            raise ValueError("headlines must be sorted by (publish_date, id)")

    def __len__(self) -> int:
        return len(self.headlines)

    def __iter__(self) -> Iterator[Headline]:
        return iter(self.headlines)

    def headline_ids(self) -> tuple[str, ...]:
        return tuple(h.id for h in self.headlines)

    def by_id(self) -> dict[str, Headline]:
        return {h.id: h for h in self.headlines}


@dataclass(frozen=True)
class AnnotationSet:
    """One annotator's headline-id -> group-number assignment for one timeline."""

    annotator_id: str
    timeline_id: str
    assignment: Mapping[str, int]

    def to_partition(self) -> Partition:
        return Partition(self.timeline_id, dict(self.assignment))


@dataclass(frozen=True)
class Partition:
    """A total grouping of a timeline's headlines; group ids are nominal labels."""

    timeline_id: str
    groups: Mapping[str, int]

    def as_sets(self) -> frozenset[frozenset[str]]:
        """The partition as a set of groups, erasing group-id labels."""
        buckets: dict[int, set[str]] = {}
        for hid, gid in self.groups.items():
            buckets.setdefault(gid, set()).add(hid)
        return frozenset(frozenset(members) for members in buckets.values())

    def relabeling_equal(self, other: Partition) -> bool:
        """True iff both partitions induce the same groups, ignoring labels."""
        if set(self.groups) != set(other.groups):
            return False
        return self.as_sets() == other.as_sets()

    def same_group(self, id_a: str, id_b: str) -> bool:
        return self.groups[id_a] == self.groups[id_b]

    def group_sizes(self) -> list[int]:
        sizes: dict[int, int] = {}
        for gid in self.groups.values():
            sizes[gid] = sizes.get(gid, 0) + 1
        return sorted(sizes.values(), reverse=True)


@dataclass(frozen=True)
class LabeledPair:
    """Two headline records, their day difference, and a binary same-group label."""

    headline_a: Headline
    headline_b: Headline
    day_diff: int
    label: int
    cut: str
    timeline_id: str

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")
        if self.cut not in SPLITS:
            raise ValueError(f"cut must be one of {SPLITS}, got {self.cut!r}")
        expected = day_difference(self.headline_a, self.headline_b)
        if self.day_diff != expected:
            raise ValueError(f"day_diff {self.day_diff} != date difference {expected}")

    @classmethod
    def from_headlines(cls, a: Headline, b: Headline, label: int, cut: str) -> LabeledPair:
        return cls(a, b, day_difference(a, b), label, cut, a.timeline_id or b.timeline_id)


# ---------------------------------------------------------------------------
# Timeline parsing (line-delimited JSON)
# ---------------------------------------------------------------------------


def _iter_lines(source: str | Path | IO[str] | Iterable[str]) -> tuple[Iterator[str], str]:
    """Yield lines from a path, open stream, or iterable; also return a display name."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        return iter(path.read_text(encoding="utf-8").splitlines()), path.stem
    if hasattr(source, "read"):
        return iter(source.read().splitlines()), getattr(source, "name", "<stream>")
    return iter(source), "<stream>"


def parse_timeline(
    source: str | Path | IO[str] | Iterable[str],
    *,
    timeline_id: str | None = None,
    name: str | None = None,
    split: str = "train",
) -> Timeline:
    """Parse a line-delimited JSON timeline into a chronologically sorted Timeline.

    Each record needs ``text`` and ``date`` (YYYY-MM-DD); ``id``, ``source``,
    ``url``, ``content`` and ``authors`` are optional.  Records without an
    explicit id get a deterministic hash of text+date (suffixed on collision,
    in file order, so repeated parses agree).
    """
    lines, fallback_id = _iter_lines(source)
    records: list[tuple[int, dict]] = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(record, dict):
            raise ParseError(f"line {lineno}: expected a JSON object")
        records.append((lineno, record))
    if not records:
        raise ParseError("empty timeline file: no records")

    tid = timeline_id
    if tid is None:
        from_records = {r.get("timeline") or r.get("timeline_id") for _, r in records}
        from_records.discard(None)
        tid = from_records.pop() if len(from_records) == 1 else fallback_id

    headlines: list[Headline] = []
    seen_ids: dict[str, int] = {}
    for lineno, record in records:
        text = record.get("text")
        if not isinstance(text, str) or not text.strip():
            raise ParseError(f"line {lineno}: missing or empty 'text'")
        raw_date = record.get("date")
        if not isinstance(raw_date, str):
            raise ParseError(f"line {lineno}: missing 'date'")
        try:
            publish_date = _parse_date(raw_date)
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad date {raw_date!r}: {exc}") from exc
        hid = record.get("id")
        if hid is None:
            hid = headline_id(text, publish_date)
            if hid in seen_ids:
                seen_ids[hid] += 1
                hid = f"{hid}-{seen_ids[hid]}"
            else:
                seen_ids[hid] = 1
        headlines.append(
            Headline(
                id=str(hid),
                text=text.strip(),
                publish_date=publish_date,
                source=record.get("source", "") or "",
                url=record.get("url"),
                content=record.get("content"),
                authors=record.get("authors"),
                timeline_id=tid,
            )
        )

    headlines.sort(key=lambda h: (h.publish_date, h.id))
    return Timeline(tid, name or tid, tuple(headlines), split)


def headline_id(text: str, publish_date: Date) -> str:
    """Deterministic content-derived headline id (hash of text + date)."""
    digest = hashlib.sha1(f"{text.strip()}\n{publish_date.isoformat()}".encode("utf-8"))
    return digest.hexdigest()[:12]


def write_timeline(timeline: Timeline, dest: str | Path | IO[str]) -> None:
    """Write a timeline back out as line-delimited JSON."""
    buf = io.StringIO()
    for h in timeline.headlines:
        record = {"id": h.id, "text": h.text, "date": h.publish_date.isoformat()}
        if h.source:
            record["source"] = h.source
        for key, value in (("url", h.url), ("content", h.content), ("authors", h.authors)):
            if value is not None:
                record[key] = value
        record["timeline"] = timeline.timeline_id
        buf.write(json.dumps(record, ensure_ascii=False) + "\n")
    _write_text(dest, buf.getvalue())


# ---------------------------------------------------------------------------
# Annotation CSV parsing  (headline_id,group_number)
# ---------------------------------------------------------------------------


def parse_annotation_set(
    source: str | Path | IO[str] | Iterable[str],
    timeline: Timeline,
    *,
    annotator_id: str | None = None,
) -> AnnotationSet:
    """Parse one annotator's CSV of ``headline_id,group_number`` rows.

    The annotator id comes from the argument, a leading ``# annotator: X``
    comment, or the filename stem, in that order.  The assignment must cover
    every headline of the timeline exactly once.
    """
    lines, fallback_name = _iter_lines(source)
    rows = list(lines)
    header_annotator = None
    body: list[tuple[int, str]] = []
    for lineno, line in enumerate(rows, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            comment = stripped.lstrip("#").strip()
            if comment.lower().startswith("annotator:"):
                header_annotator = comment.split(":", 1)[1].strip()
            continue
        body.append((lineno, line))

    if body and body[0][1].strip().lower().replace(" ", "") == "headline_id,group_number":
        body = body[1:]

    assignment: dict[str, int] = {}
    known = set(timeline.headline_ids())
    for lineno, line in body:
        cells = next(csv.reader([line]))
        if len(cells) != 2:
            raise ParseError(f"line {lineno}: expected 'headline_id,group_number'")
        hid, raw_group = cells[0].strip(), cells[1].strip()
        if hid not in known:
            raise ParseError(f"line {lineno}: unknown headline id {hid!r}")
        if hid in assignment:
            raise ParseError(f"line {lineno}: duplicate assignment for {hid!r}")
        try:
            assignment[hid] = int(raw_group)
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad group number {raw_group!r}") from exc

    uncovered = sorted(known - set(assignment))
    if uncovered:
        raise ParseError(f"annotation does not cover headline ids: {uncovered}")

    who = annotator_id or header_annotator or fallback_name
    if not who or who == "<stream>":
        raise ParseError("annotator id not provided (argument, '# annotator:' header, or filename)")
    return AnnotationSet(who, timeline.timeline_id, assignment)


def write_annotation_csv(annotation: AnnotationSet, dest: str | Path | IO[str] | None = None) -> str:
    """Serialize an annotation set as CSV with an annotator header comment."""
    buf = io.StringIO()
    buf.write(f"# annotator: {annotation.annotator_id}\n")
    buf.write("headline_id,group_number\n")
    for hid, group in annotation.assignment.items():
        buf.write(f"{hid},{group}\n")
    text = buf.getvalue()
    if dest is not None:
        _write_text(dest, text)
    return text


def read_partition_csv(
    source: str | Path | IO[str] | Iterable[str], *, timeline_id: str = ""
) -> Partition:
    """Read a ``headline_id,group_id`` CSV into a Partition."""
    lines, _ = _iter_lines(source)
    groups: dict[str, int] = {}
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.lower().replace(" ", "") in ("headline_id,group_id", "headline_id,group_number"):
            continue
        cells = next(csv.reader([line]))
        if len(cells) != 2:
            raise ParseError(f"line {lineno}: expected 'headline_id,group_id'")
        if cells[0] in groups:
            raise ParseError(f"line {lineno}: duplicate headline id {cells[0]!r}")
        try:
            groups[cells[0].strip()] = int(cells[1])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad group id {cells[1]!r}") from exc
    if not groups:
        raise ParseError("empty partition file")
    return Partition(timeline_id, groups)


def write_partition_csv(partition: Partition, dest: str | Path | IO[str] | None = None) -> str:
    """Serialize a partition as ``headline_id,group_id`` CSV, sorted by headline id."""
    buf = io.StringIO()
    buf.write("headline_id,group_id\n")
    for hid in sorted(partition.groups):
        buf.write(f"{hid},{partition.groups[hid]}\n")
    text = buf.getvalue()
    if dest is not None:
        _write_text(dest, text)
    return text


# ---------------------------------------------------------------------------
# Pair-file I/O (published JSON schema)
# ---------------------------------------------------------------------------


def read_hlgd(source: str | Path | IO[str]) -> list[LabeledPair]:
    """Read a pair file (JSON array of entries in the published schema)."""
    if isinstance(source, (str, Path)):
        raw = Path(source).read_text(encoding="utf-8")
    else:
        raw = source.read()
    try:
        entries = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"pair file is not valid JSON: {exc}") from exc
    if not isinstance(entries, list):
        raise SchemaError("pair file must be a JSON array of entries")

    pairs: list[LabeledPair] = []
    for index, entry in enumerate(entries):
        pairs.append(_pair_from_entry(entry, index))
    return pairs


def _pair_from_entry(entry: dict, index: int) -> LabeledPair:
    if not isinstance(entry, dict):
        raise SchemaError(f"entry {index}: expected a JSON object")
    for required in ("headline_a", "headline_b", "day_a", "day_b", "label", "cut", "timeline"):
        if required not in entry:
            raise SchemaError(f"entry {index}: missing required field {required!r}")

    raw_label = entry["label"]
    if isinstance(raw_label, bool) or raw_label not in (0, 1, "0", "1"):
        raise SchemaError(f"entry {index}: label must be 0 or 1, got {raw_label!r}")
    label = int(raw_label)

    raw_cut = entry["cut"]
    if raw_cut not in _CUT_TO_SPLIT:
        raise SchemaError(f"entry {index}: unknown cut value {raw_cut!r}")
    cut = _CUT_TO_SPLIT[raw_cut]

    timeline_id = str(entry["timeline"])
    sides = []
    for suffix in ("a", "b"):
        raw_day = entry[f"day_{suffix}"]
        try:
            publish_date = _parse_date(str(raw_day))
        except ValueError as exc:
            raise SchemaError(f"entry {index}: bad day_{suffix} {raw_day!r}") from exc
        text = entry[f"headline_{suffix}"]
        if not isinstance(text, str) or not text.strip():
            raise SchemaError(f"entry {index}: empty headline_{suffix}")
        sides.append(
            Headline(
                id=headline_id(text, publish_date),
                text=text,
                publish_date=publish_date,
                source=entry.get(f"source_{suffix}", "") or "",
                url=entry.get(f"url_{suffix}") or None,
                content=entry.get(f"content_{suffix}") or None,
                authors=entry.get(f"authors_{suffix}", ""),
                timeline_id=timeline_id,
            )
        )
    a, b = sides
    return LabeledPair(a, b, day_difference(a, b), label, cut, timeline_id)


def write_hlgd(pairs: Sequence[LabeledPair], dest: str | Path | IO[str] | None = None) -> str:
    """Serialize pairs in the published schema; output is byte-stable across runs."""
    entries = []
    for pair in pairs:
        a, b = pair.headline_a, pair.headline_b
        entry = {
            "headline_a": a.text,
            "headline_b": b.text,
            "day_a": a.publish_date.isoformat(),
            "day_b": b.publish_date.isoformat(),
            "source_a": a.source,
            "source_b": b.source,
            "authors_a": a.authors or "",
            "authors_b": b.authors or "",
            "url_a": a.url or "",
            "url_b": b.url or "",
            "cut": _SPLIT_TO_CUT[pair.cut],
            "timeline": pair.timeline_id,
            "label": pair.label,
        }
        entries.append(entry)
    text = json.dumps(entries, ensure_ascii=False, indent=2) + "\n"
    if dest is not None:
        _write_text(dest, text)
    return text


def _write_text(dest: str | Path | IO[str], text: str) -> None:
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(text, encoding="utf-8")
    else:
        dest.write(text)
