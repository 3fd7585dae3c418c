"""Study file formats, validation, and per-referent agreement reports.

Three artifacts move through an elicitation study pipeline:

* a descriptor taxonomy (``taxonomy.json``) fixing the vector dimensions,
* a study dataset (``study.json``) holding referents, participants,
  proposals, binary annotations, and optional equivalence groupings,
* an agreement report (CSV, JSON, or a display-only markdown table) with
  one row per referent and a mean/std summary per column.

Parsing is total: malformed input raises :class:`ValidationError` carrying
a location path, never a partially built value.  Parsed values are frozen
and safe to share.  ``parse(write(x)) == x`` holds for every format that
supports both directions.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

from .metrics import (
    DEFAULT_SIMILARITY,
    DescriptionVector,
    EquivalenceGrouping,
    SimilarityKind,
    agreement_rate,
    percent_agreeing,
    soft_agreement_rate,
)

__all__ = [
    "ValidationError",
    "Descriptor",
    "DescriptorTaxonomy",
    "Referent",
    "Proposal",
    "StudyDataset",
    "ReportRow",
    "ColumnSummary",
    "AgreementReport",
    "CATEGORIES",
    "HANDS",
    "REPORT_COLUMNS",
    "parse_taxonomy",
    "write_taxonomy",
    "load_taxonomy",
    "save_taxonomy",
    "bundled_taxonomy",
    "parse_dataset",
    "write_dataset",
    "load_dataset",
    "save_dataset",
    "build_report",
    "write_report",
    "parse_report",
    "load_report",
    "save_report",
]

CATEGORIES = frozenset({"movement", "orientation", "hand_state", "other"})
HANDS = frozenset({"dominant", "non_dominant", "both", "none"})
REPORT_COLUMNS = ("ar", "eta_ar", "sar", "eta_sar")

_MEAN_LABEL = "__mean__"
_STD_LABEL = "__std__"
_BUNDLED_TAXONOMY = "gesture_descriptors.json"


class ValidationError(ValueError):
    """Input rejected by a parser or writer, with a location path."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class Descriptor:
    """One taxonomy entry: a named binary feature of a proposal."""

    id: str
    label: str
    category: str
    hand: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValidationError("descriptor id must be a non-empty string")
        if not self.label:
            raise ValidationError("descriptor label must be a non-empty string")
        if self.category not in CATEGORIES:
            raise ValidationError(
                f"unknown category {self.category!r}; expected one of "
                f"{sorted(CATEGORIES)}"
            )
        if self.hand not in HANDS:
            raise ValidationError(
                f"unknown hand {self.hand!r}; expected one of {sorted(HANDS)}"
            )


@dataclass(frozen=True)
class DescriptorTaxonomy:
    """Ordered descriptor catalog; the order defines vector indices."""

    version: str
    descriptors: tuple[Descriptor, ...]
    notes: str | None = None

    def __post_init__(self) -> None:
        if not self.version:
            raise ValidationError("taxonomy version must be a non-empty string")
        if not self.descriptors:
            raise ValidationError("taxonomy must list at least one descriptor")
        seen: set[str] = set()
        for descriptor in self.descriptors:
            if descriptor.id in seen:
                raise ValidationError(f"duplicate descriptor id {descriptor.id!r}")
            seen.add(descriptor.id)

    @property
    def dims(self) -> int:
        return len(self.descriptors)

    @property
    def descriptor_ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.descriptors)

    def vector_for(self, present_ids: Iterable[str]) -> DescriptionVector:
        """Binary vector with ones at the given descriptor ids.

        Unknown ids are collected and reported together.
        """
        wanted = set(present_ids)
        known = set(self.descriptor_ids)
        offenders = sorted(wanted - known)
        if offenders:
            raise ValidationError(
                f"unknown descriptor ids: {', '.join(offenders)}"
            )
        return DescriptionVector(
            tuple(1 if d.id in wanted else 0 for d in self.descriptors)
        )

    def ids_for(self, vector: DescriptionVector) -> tuple[str, ...]:
        """Descriptor ids marked present in the vector, in taxonomy order."""
        if vector.dims != self.dims:
            raise ValidationError(
                f"vector has {vector.dims} dimensions, taxonomy has {self.dims}"
            )
        return tuple(d.id for d, bit in zip(self.descriptors, vector) if bit)


@dataclass(frozen=True)
class Referent:
    """A command or concept that participants proposed gestures for."""

    id: str
    label: str


@dataclass(frozen=True)
class Proposal:
    """One participant's proposal for one referent."""

    id: str
    referent_id: str
    participant_id: str
    media_ref: str | None = None


@dataclass(frozen=True, eq=True)
class StudyDataset:
    """A validated study: proposals plus annotations and groupings.

    ``annotations`` maps proposal id to its description vector (not every
    proposal need be annotated).  ``groupings`` maps referent id to an
    explicit partition of that referent's proposal ids.
    """

    taxonomy_version: str
    referents: tuple[Referent, ...]
    participants: tuple[str, ...]
    proposals: tuple[Proposal, ...]
    annotations: dict[str, DescriptionVector] = field(default_factory=dict)
    groupings: dict[str, tuple[tuple[str, ...], ...]] = field(default_factory=dict)

    def proposals_for(self, referent_id: str) -> tuple[Proposal, ...]:
        return tuple(p for p in self.proposals if p.referent_id == referent_id)

    def equivalence_grouping(self, referent_id: str) -> EquivalenceGrouping | None:
        """The partition for a referent as group sizes, if one was given."""
        partition = self.groupings.get(referent_id)
        if partition is None:
            return None
        sizes = tuple(len(group) for group in partition)
        return EquivalenceGrouping(group_sizes=sizes, n_total=sum(sizes))


@dataclass(frozen=True)
class ReportRow:
    """Agreement figures for one referent; absent values stay ``None``."""

    referent: str
    ar: float | None = None
    eta_ar: float | None = None
    sar: float | None = None
    eta_sar: float | None = None

    def __post_init__(self) -> None:
        for name in ("ar", "sar"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {value}")
        for name in ("eta_ar", "eta_sar"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 100.0:
                raise ValidationError(f"{name} must lie in [0, 100], got {value}")


@dataclass(frozen=True)
class ColumnSummary:
    """Mean and spread of one report column over its computed values."""

    mean: float
    std: float | None


@dataclass(frozen=True, eq=True)
class AgreementReport:
    rows: tuple[ReportRow, ...]
    summary: dict[str, ColumnSummary] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# parse helpers


def _parse_json(text: str, what: str) -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"not valid JSON: {exc.msg}",
            location=f"{what}:line {exc.lineno} column {exc.colno}",
        ) from None


def _expect_object(value: object, loc: str) -> dict:
    if not isinstance(value, dict):
        raise ValidationError(f"expected an object, got {type(value).__name__}", loc)
    return value


def _expect_list(value: object, loc: str) -> list:
    if not isinstance(value, list):
        raise ValidationError(f"expected a list, got {type(value).__name__}", loc)
    return value


def _expect_str(value: object, loc: str) -> str:
    if not isinstance(value, str):
        raise ValidationError(f"expected a string, got {type(value).__name__}", loc)
    return value


def _expect_bit(value: object, loc: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value not in (0, 1):
        raise ValidationError(f"expected 0 or 1, got {value!r}", loc)
    return value


def _reject_unknown_keys(obj: dict, allowed: Iterable[str], loc: str) -> None:
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ValidationError(f"unknown keys: {', '.join(unknown)}", loc)


def _require_key(obj: dict, key: str, loc: str) -> object:
    if key not in obj:
        raise ValidationError(f"missing required key {key!r}", loc)
    return obj[key]


def _atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write via a sibling temp file and rename; no partial file survives."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


# ---------------------------------------------------------------------------
# taxonomy format


def parse_taxonomy(text: str) -> DescriptorTaxonomy:
    """Parse and validate a taxonomy JSON document."""
    doc = _expect_object(_parse_json(text, "taxonomy"), "taxonomy")
    _reject_unknown_keys(doc, ("version", "descriptors", "notes"), "taxonomy")
    version = _expect_str(_require_key(doc, "version", "taxonomy"), "taxonomy.version")
    notes = doc.get("notes")
    if notes is not None:
        notes = _expect_str(notes, "taxonomy.notes")
    raw_list = _expect_list(
        _require_key(doc, "descriptors", "taxonomy"), "taxonomy.descriptors"
    )
    descriptors = []
    for i, raw in enumerate(raw_list):
        loc = f"taxonomy.descriptors[{i}]"
        entry = _expect_object(raw, loc)
        _reject_unknown_keys(entry, ("id", "label", "category", "hand"), loc)
        fields = {
            key: _expect_str(_require_key(entry, key, loc), f"{loc}.{key}")
            for key in ("id", "label", "category", "hand")
        }
        try:
            descriptors.append(Descriptor(**fields))
        except ValidationError as exc:
            raise ValidationError(str(exc), loc) from None
    try:
        return DescriptorTaxonomy(
            version=version, descriptors=tuple(descriptors), notes=notes
        )
    except ValidationError as exc:
        raise ValidationError(str(exc), "taxonomy") from None


def write_taxonomy(taxonomy: DescriptorTaxonomy) -> str:
    doc: dict = {"version": taxonomy.version}
    if taxonomy.notes is not None:
        doc["notes"] = taxonomy.notes
    doc["descriptors"] = [
        {"id": d.id, "label": d.label, "category": d.category, "hand": d.hand}
        for d in taxonomy.descriptors
    ]
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_taxonomy(path: str | os.PathLike) -> DescriptorTaxonomy:
    with open(path, encoding="utf-8") as handle:
        return parse_taxonomy(handle.read())


def save_taxonomy(taxonomy: DescriptorTaxonomy, path: str | os.PathLike) -> None:
    _atomic_write_text(path, write_taxonomy(taxonomy))


def bundled_taxonomy() -> DescriptorTaxonomy:
    """The gesture descriptor catalog shipped with the package."""
    text = (
        resources.files(__package__)
        .joinpath("data")
        .joinpath(_BUNDLED_TAXONOMY)
        .read_text(encoding="utf-8")
    )
    return parse_taxonomy(text)


# ---------------------------------------------------------------------------
# dataset format


def parse_dataset(text: str, taxonomy: DescriptorTaxonomy) -> StudyDataset:
    """Parse and cross-validate a study JSON document against a taxonomy."""
    doc = _expect_object(_parse_json(text, "study"), "study")
    allowed = (
        "taxonomy_version",
        "referents",
        "participants",
        "proposals",
        "annotations",
        "groupings",
    )
    _reject_unknown_keys(doc, allowed, "study")

    version = _expect_str(
        _require_key(doc, "taxonomy_version", "study"), "study.taxonomy_version"
    )
    if version != taxonomy.version:
        raise ValidationError(
            f"dataset was annotated against taxonomy {version!r}, "
            f"but the supplied taxonomy is {taxonomy.version!r}",
            "study.taxonomy_version",
        )

    referents = []
    referent_ids: set[str] = set()
    for i, raw in enumerate(_expect_list(_require_key(doc, "referents", "study"), "study.referents")):
        loc = f"study.referents[{i}]"
        entry = _expect_object(raw, loc)
        _reject_unknown_keys(entry, ("id", "label"), loc)
        rid = _expect_str(_require_key(entry, "id", loc), f"{loc}.id")
        label = _expect_str(_require_key(entry, "label", loc), f"{loc}.label")
        if rid in referent_ids:
            raise ValidationError(f"duplicate referent id {rid!r}", loc)
        referent_ids.add(rid)
        referents.append(Referent(id=rid, label=label))

    participants = []
    for i, raw in enumerate(
        _expect_list(_require_key(doc, "participants", "study"), "study.participants")
    ):
        loc = f"study.participants[{i}]"
        pid = _expect_str(raw, loc)
        if pid in participants:
            raise ValidationError(f"duplicate participant id {pid!r}", loc)
        participants.append(pid)

    proposals = []
    proposal_ids: set[str] = set()
    per_referent: dict[str, list[str]] = {r.id: [] for r in referents}
    for i, raw in enumerate(
        _expect_list(_require_key(doc, "proposals", "study"), "study.proposals")
    ):
        loc = f"study.proposals[{i}]"
        entry = _expect_object(raw, loc)
        _reject_unknown_keys(
            entry, ("id", "referent_id", "participant_id", "media_ref"), loc
        )
        pid = _expect_str(_require_key(entry, "id", loc), f"{loc}.id")
        rid = _expect_str(_require_key(entry, "referent_id", loc), f"{loc}.referent_id")
        owner = _expect_str(
            _require_key(entry, "participant_id", loc), f"{loc}.participant_id"
        )
        media_ref = entry.get("media_ref")
        if media_ref is not None:
            media_ref = _expect_str(media_ref, f"{loc}.media_ref")
        if pid in proposal_ids:
            raise ValidationError(f"duplicate proposal id {pid!r}", loc)
        if rid not in referent_ids:
            raise ValidationError(f"unknown referent id {rid!r}", f"{loc}.referent_id")
        if owner not in participants:
            raise ValidationError(
                f"unknown participant id {owner!r}", f"{loc}.participant_id"
            )
        proposal_ids.add(pid)
        per_referent[rid].append(pid)
        proposals.append(
            Proposal(id=pid, referent_id=rid, participant_id=owner, media_ref=media_ref)
        )

    # each referent must field the same number of proposals, otherwise the
    # per-referent rates are not comparable
    counts = {rid: len(pids) for rid, pids in per_referent.items()}
    if len(set(counts.values())) > 1:
        details = ", ".join(f"{rid!r} has {n}" for rid, n in sorted(counts.items()))
        raise ValidationError(
            f"every referent must have the same number of proposals ({details})",
            "study.proposals",
        )

    annotations: dict[str, DescriptionVector] = {}
    raw_annotations = doc.get("annotations", {})
    for pid, raw_bits in _expect_object(raw_annotations, "study.annotations").items():
        loc = f"study.annotations[{pid!r}]"
        if pid not in proposal_ids:
            raise ValidationError(f"unknown proposal id {pid!r}", loc)
        bits = _expect_list(raw_bits, loc)
        if len(bits) != taxonomy.dims:
            raise ValidationError(
                f"vector has {len(bits)} entries, taxonomy has {taxonomy.dims}", loc
            )
        annotations[pid] = DescriptionVector(
            tuple(_expect_bit(b, f"{loc}[{j}]") for j, b in enumerate(bits))
        )

    groupings: dict[str, tuple[tuple[str, ...], ...]] = {}
    raw_groupings = doc.get("groupings", {})
    for rid, raw_partition in _expect_object(raw_groupings, "study.groupings").items():
        loc = f"study.groupings[{rid!r}]"
        if rid not in referent_ids:
            raise ValidationError(f"unknown referent id {rid!r}", loc)
        partition = []
        seen: set[str] = set()
        for gi, raw_group in enumerate(_expect_list(raw_partition, loc)):
            gloc = f"{loc}[{gi}]"
            group = _expect_list(raw_group, gloc)
            if not group:
                raise ValidationError("groups must be non-empty", gloc)
            members = []
            for mi, raw_member in enumerate(group):
                member = _expect_str(raw_member, f"{gloc}[{mi}]")
                if member in seen:
                    raise ValidationError(
                        f"proposal {member!r} appears twice in the partition", gloc
                    )
                seen.add(member)
                members.append(member)
            partition.append(tuple(members))
        expected = set(per_referent[rid])
        if seen != expected:
            missing = sorted(expected - seen)
            foreign = sorted(seen - expected)
            problems = []
            if missing:
                problems.append(f"missing proposals: {', '.join(missing)}")
            if foreign:
                problems.append(f"not this referent's proposals: {', '.join(foreign)}")
            raise ValidationError(
                f"partition must cover the referent's proposals exactly "
                f"({'; '.join(problems)})",
                loc,
            )
        groupings[rid] = tuple(partition)

    return StudyDataset(
        taxonomy_version=version,
        referents=tuple(referents),
        participants=tuple(participants),
        proposals=tuple(proposals),
        annotations=annotations,
        groupings=groupings,
    )


def write_dataset(dataset: StudyDataset) -> str:
    proposals = []
    for p in dataset.proposals:
        entry: dict = {
            "id": p.id,
            "referent_id": p.referent_id,
            "participant_id": p.participant_id,
        }
        if p.media_ref is not None:
            entry["media_ref"] = p.media_ref
        proposals.append(entry)
    doc = {
        "taxonomy_version": dataset.taxonomy_version,
        "referents": [{"id": r.id, "label": r.label} for r in dataset.referents],
        "participants": list(dataset.participants),
        "proposals": proposals,
        "annotations": {
            pid: list(vector.bits) for pid, vector in dataset.annotations.items()
        },
        "groupings": {
            rid: [list(group) for group in partition]
            for rid, partition in dataset.groupings.items()
        },
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_dataset(path: str | os.PathLike, taxonomy: DescriptorTaxonomy) -> StudyDataset:
    with open(path, encoding="utf-8") as handle:
        return parse_dataset(handle.read(), taxonomy)


def save_dataset(dataset: StudyDataset, path: str | os.PathLike) -> None:
    _atomic_write_text(path, write_dataset(dataset))


# ---------------------------------------------------------------------------
# report generation


def _column_summary(values: Sequence[float], sample_std: bool) -> ColumnSummary | None:
    if not values:
        return None
    n = len(values)
    mean = math.fsum(values) / n
    ddof = 1 if sample_std else 0
    if n - ddof <= 0:
        std = 0.0 if not sample_std else None
    else:
        std = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (n - ddof))
    return ColumnSummary(mean=mean, std=std)


def build_report(
    dataset: StudyDataset,
    similarity: SimilarityKind = DEFAULT_SIMILARITY,
    *,
    mode: str = "both",
    sample_std: bool = True,
) -> AgreementReport:
    """Per-referent agreement rates with a mean/std summary per column.

    ``mode`` selects which rates to compute: ``"hard"`` (groupings only),
    ``"soft"`` (annotations only), or ``"both"``.  A referent yielding no
    computable rate under the mode is skipped with a warning instead of
    producing an empty row; a referent whose soft rate was requested but
    has fewer than 2 annotated proposals is flagged too.  Proposals without
    annotations are excluded from the soft rate (never imputed as all-zero
    vectors), with a warning naming them.  Summary columns cover exactly
    the rows in the report; ``sample_std`` picks the n-1 denominator over
    the population one.
    """
    if mode not in ("hard", "soft", "both"):
        raise ValueError(f"mode must be 'hard', 'soft' or 'both', got {mode!r}")
    rows = []
    warnings: list[str] = []
    for referent in dataset.referents:
        ar = sar = None
        annotated: list[str] = []
        if mode in ("hard", "both"):
            grouping = dataset.equivalence_grouping(referent.id)
            if grouping is not None:
                ar = agreement_rate(grouping).value
        if mode in ("soft", "both"):
            proposals = dataset.proposals_for(referent.id)
            annotated = [p.id for p in proposals if p.id in dataset.annotations]
            skipped = [p.id for p in proposals if p.id not in dataset.annotations]
            if len(annotated) >= 2:
                if skipped:
                    warnings.append(
                        f"referent {referent.id!r}: proposals without annotations "
                        f"excluded from the soft rate: {', '.join(skipped)}"
                    )
                vectors = [dataset.annotations[pid] for pid in annotated]
                sar = soft_agreement_rate(vectors, similarity).value
        if ar is None and sar is None:
            warnings.append(
                f"referent {referent.id!r}: nothing to compute in mode {mode!r}; skipped"
            )
            continue
        if mode in ("soft", "both") and sar is None:
            reason = (
                "fewer than 2 annotated proposals"
                if annotated
                else "no annotated proposals"
            )
            warnings.append(
                f"referent {referent.id!r}: {reason}; soft rate not computed"
            )
        rows.append(
            ReportRow(
                referent=referent.label,
                ar=ar,
                eta_ar=None if ar is None else percent_agreeing(ar),
                sar=sar,
                eta_sar=None if sar is None else percent_agreeing(sar),
            )
        )

    summary: dict[str, ColumnSummary] = {}
    for column in REPORT_COLUMNS:
        values = [getattr(row, column) for row in rows]
        computed = _column_summary([v for v in values if v is not None], sample_std)
        if computed is not None:
            summary[column] = computed
    return AgreementReport(
        rows=tuple(rows), summary=summary, warnings=tuple(warnings)
    )


# ---------------------------------------------------------------------------
# report formats


def _cell(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def _parse_cell(text: str, loc: str) -> float | None:
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        raise ValidationError(f"expected a number or empty cell, got {text!r}", loc) from None


def _report_csv(report: AgreementReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(("referent",) + REPORT_COLUMNS)
    for row in report.rows:
        if row.referent in (_MEAN_LABEL, _STD_LABEL):
            raise ValidationError(
                f"referent label {row.referent!r} collides with a summary row label"
            )
        writer.writerow(
            [row.referent] + [_cell(getattr(row, col)) for col in REPORT_COLUMNS]
        )
    if report.summary:
        means = [
            _cell(report.summary[col].mean) if col in report.summary else ""
            for col in REPORT_COLUMNS
        ]
        stds = [
            _cell(report.summary[col].std) if col in report.summary else ""
            for col in REPORT_COLUMNS
        ]
        writer.writerow([_MEAN_LABEL] + means)
        writer.writerow([_STD_LABEL] + stds)
    return buffer.getvalue()


def _report_json(report: AgreementReport) -> str:
    doc = {
        "rows": [
            {"referent": row.referent}
            | {col: getattr(row, col) for col in REPORT_COLUMNS}
            for row in report.rows
        ],
        "summary": {
            col: {"mean": s.mean, "std": s.std}
            for col, s in report.summary.items()
        },
        "warnings": list(report.warnings),
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _report_markdown(report: AgreementReport, decimals: int = 2) -> str:
    def shown(value: float | None) -> str:
        return "n/a" if value is None else f"{value:.{decimals}f}"

    lines = [
        "| referent | ar | eta_ar | sar | eta_sar |",
        "| --- | --- | --- | --- | --- |",
    ]
    for row in report.rows:
        cells = [row.referent] + [shown(getattr(row, col)) for col in REPORT_COLUMNS]
        lines.append("| " + " | ".join(cells) + " |")
    if report.summary:
        means = [
            shown(report.summary[col].mean) if col in report.summary else "n/a"
            for col in REPORT_COLUMNS
        ]
        stds = [
            shown(report.summary[col].std) if col in report.summary else "n/a"
            for col in REPORT_COLUMNS
        ]
        lines.append("| mean | " + " | ".join(means) + " |")
        lines.append("| std | " + " | ".join(stds) + " |")
    return "\n".join(lines) + "\n"


def write_report(report: AgreementReport, format: str = "csv") -> str:
    """Render a report; csv and json round-trip, markdown is display-only."""
    if format == "csv":
        return _report_csv(report)
    if format == "json":
        return _report_json(report)
    if format == "markdown":
        return _report_markdown(report)
    raise ValueError(f"format must be 'csv', 'json' or 'markdown', got {format!r}")


def _parse_report_csv(text: str) -> AgreementReport:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError("empty document", "report") from None
    if tuple(header) != ("referent",) + REPORT_COLUMNS:
        raise ValidationError(
            f"unexpected header {header!r}", "report:line 1"
        )
    rows = []
    summary_cells: dict[str, list[float | None]] = {}
    for i, record in enumerate(reader, start=2):
        loc = f"report:line {i}"
        if len(record) != 1 + len(REPORT_COLUMNS):
            raise ValidationError(
                f"expected {1 + len(REPORT_COLUMNS)} cells, got {len(record)}", loc
            )
        label, *cells = record
        values = [
            _parse_cell(cell, f"{loc} column {col}")
            for cell, col in zip(cells, REPORT_COLUMNS)
        ]
        if label in (_MEAN_LABEL, _STD_LABEL):
            if label in summary_cells:
                raise ValidationError(f"duplicate {label} row", loc)
            summary_cells[label] = values
            continue
        if summary_cells:
            raise ValidationError("data rows must come before summary rows", loc)
        try:
            rows.append(ReportRow(label, *values))
        except ValidationError as exc:
            raise ValidationError(str(exc), loc) from None

    summary: dict[str, ColumnSummary] = {}
    if _STD_LABEL in summary_cells and _MEAN_LABEL not in summary_cells:
        raise ValidationError(f"{_STD_LABEL} row without {_MEAN_LABEL} row", "report")
    if _MEAN_LABEL in summary_cells:
        means = summary_cells[_MEAN_LABEL]
        stds = summary_cells.get(_STD_LABEL, [None] * len(REPORT_COLUMNS))
        for col, mean, std in zip(REPORT_COLUMNS, means, stds):
            if mean is None:
                if std is not None:
                    raise ValidationError(
                        f"column {col} has a std but no mean", "report"
                    )
                continue
            summary[col] = ColumnSummary(mean=mean, std=std)
    return AgreementReport(rows=tuple(rows), summary=summary, warnings=())


def _parse_report_json(text: str) -> AgreementReport:
    doc = _expect_object(_parse_json(text, "report"), "report")
    _reject_unknown_keys(doc, ("rows", "summary", "warnings"), "report")
    rows = []
    for i, raw in enumerate(_expect_list(_require_key(doc, "rows", "report"), "report.rows")):
        loc = f"report.rows[{i}]"
        entry = _expect_object(raw, loc)
        _reject_unknown_keys(entry, ("referent",) + REPORT_COLUMNS, loc)
        label = _expect_str(_require_key(entry, "referent", loc), f"{loc}.referent")
        values = {}
        for col in REPORT_COLUMNS:
            value = entry.get(col)
            if value is not None and not isinstance(value, (int, float)):
                raise ValidationError(
                    f"expected a number or null, got {value!r}", f"{loc}.{col}"
                )
            values[col] = None if value is None else float(value)
        try:
            rows.append(ReportRow(label, **values))
        except ValidationError as exc:
            raise ValidationError(str(exc), loc) from None

    summary: dict[str, ColumnSummary] = {}
    for col, raw in _expect_object(doc.get("summary", {}), "report.summary").items():
        loc = f"report.summary[{col!r}]"
        if col not in REPORT_COLUMNS:
            raise ValidationError(f"unknown column {col!r}", loc)
        entry = _expect_object(raw, loc)
        _reject_unknown_keys(entry, ("mean", "std"), loc)
        mean = _require_key(entry, "mean", loc)
        if not isinstance(mean, (int, float)) or isinstance(mean, bool):
            raise ValidationError(f"expected a number, got {mean!r}", f"{loc}.mean")
        std = entry.get("std")
        if std is not None and (not isinstance(std, (int, float)) or isinstance(std, bool)):
            raise ValidationError(f"expected a number or null, got {std!r}", f"{loc}.std")
        summary[col] = ColumnSummary(
            mean=float(mean), std=None if std is None else float(std)
        )

    warnings = []
    for i, raw in enumerate(_expect_list(doc.get("warnings", []), "report.warnings")):
        warnings.append(_expect_str(raw, f"report.warnings[{i}]"))
    return AgreementReport(rows=tuple(rows), summary=summary, warnings=tuple(warnings))


def parse_report(text: str, format: str = "csv") -> AgreementReport:
    """Parse a report written by :func:`write_report` (csv or json).

    CSV carries no warnings section, so warnings do not survive a CSV
    round trip; JSON keeps them.
    """
    if format == "csv":
        return _parse_report_csv(text)
    if format == "json":
        return _parse_report_json(text)
    raise ValueError(f"format must be 'csv' or 'json', got {format!r}")


_REPORT_SUFFIXES = {".csv": "csv", ".json": "json", ".md": "markdown"}


def _format_from_path(path: str | os.PathLike, format: str | None) -> str:
    if format is not None:
        return format
    suffix = os.path.splitext(os.fspath(path))[1].lower()
    if suffix in _REPORT_SUFFIXES:
        return _REPORT_SUFFIXES[suffix]
    raise ValueError(
        f"cannot infer report format from {path!r}; pass format explicitly"
    )


def load_report(path: str | os.PathLike, format: str | None = None) -> AgreementReport:
    with open(path, encoding="utf-8") as handle:
        return parse_report(handle.read(), _format_from_path(path, format))


def save_report(
    report: AgreementReport, path: str | os.PathLike, format: str | None = None
) -> None:
    _atomic_write_text(path, write_report(report, _format_from_path(path, format)))
