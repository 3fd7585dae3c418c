"""Annotation-capture HTTP service.

Serves the descriptor taxonomy and proposal list, accepts annotation
submissions from the browser UI, and exposes a live agreement report.

Persistence is an append-only JSON-lines journal (``annotations.jsonl``)
next to the study file: every accepted submission is flushed and fsynced
before the request returns, so an acknowledged annotation survives a
crash.  The journal is periodically compacted into ``study.json`` (and
always on shutdown); committed journal entries are never dropped, only an
incomplete final line left by a crash mid-write is trimmed at startup.

Aggregation for the report: one stored vector per (proposal, annotator)
pair, last write wins.  The live report uses either a single annotator's
vectors (``?annotator=``) or a per-descriptor majority vote across
annotators (the default; ties mean the descriptor is absent).  Proposals
nobody has annotated through the service keep whatever annotation the
study file shipped with.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Iterable

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .metrics import DescriptionVector, SimilarityKind
from .studyio import (
    DescriptorTaxonomy,
    StudyDataset,
    ValidationError,
    _atomic_write_text,
    build_report,
    load_dataset,
    load_taxonomy,
    parse_dataset,
    write_dataset,
    write_report,
    write_taxonomy,
)

__all__ = [
    "AnnotationSubmission",
    "AnnotationStore",
    "UnknownProposalError",
    "UnknownDescriptorsError",
    "create_app",
    "TAXONOMY_FILENAME",
    "STUDY_FILENAME",
    "JOURNAL_FILENAME",
]

logger = logging.getLogger(__name__)

TAXONOMY_FILENAME = "taxonomy.json"
STUDY_FILENAME = "study.json"
JOURNAL_FILENAME = "annotations.jsonl"

_JSON_MEDIA_TYPE = "application/json; charset=utf-8"


class UnknownProposalError(LookupError):
    pass


class UnknownDescriptorsError(ValueError):
    def __init__(self, offenders: Iterable[str]):
        self.offenders = sorted(offenders)
        super().__init__(f"unknown descriptor ids: {', '.join(self.offenders)}")


@dataclass(frozen=True)
class AnnotationSubmission:
    """One annotator's judgment for one proposal, as stored in the journal."""

    proposal_id: str
    annotator_id: str
    descriptor_ids: tuple[str, ...]
    submitted_at: str


def _parse_journal_entry(doc: object, loc: str) -> AnnotationSubmission:
    if not isinstance(doc, dict):
        raise ValidationError("expected an object", loc)
    unknown = sorted(
        set(doc) - {"proposal_id", "annotator_id", "descriptor_ids", "submitted_at"}
    )
    if unknown:
        raise ValidationError(f"unknown keys: {', '.join(unknown)}", loc)
    for key in ("proposal_id", "annotator_id", "submitted_at"):
        if not isinstance(doc.get(key), str) or not doc[key]:
            raise ValidationError(f"missing or invalid {key!r}", loc)
    ids = doc.get("descriptor_ids")
    if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
        raise ValidationError("descriptor_ids must be a list of strings", loc)
    return AnnotationSubmission(
        proposal_id=doc["proposal_id"],
        annotator_id=doc["annotator_id"],
        descriptor_ids=tuple(sorted(set(ids))),
        submitted_at=doc["submitted_at"],
    )


class AnnotationStore:
    """Journal-backed annotation state for one study.

    ``data_dir`` must contain ``taxonomy.json`` and ``study.json``; the
    journal is created on demand.  All mutating operations are serialized
    through one lock, so the store is safe to share across request
    threads.
    """

    def __init__(self, data_dir: str | os.PathLike, *, compact_every: int = 50):
        if compact_every < 1:
            raise ValueError(f"compact_every must be >= 1, got {compact_every}")
        self.data_dir = os.fspath(data_dir)
        self.compact_every = compact_every
        self.taxonomy: DescriptorTaxonomy = load_taxonomy(
            os.path.join(self.data_dir, TAXONOMY_FILENAME)
        )
        self.dataset: StudyDataset = load_dataset(
            os.path.join(self.data_dir, STUDY_FILENAME), self.taxonomy
        )
        self._proposal_ids = {p.id for p in self.dataset.proposals}
        self._journal_path = os.path.join(self.data_dir, JOURNAL_FILENAME)
        self.submissions: dict[tuple[str, str], AnnotationSubmission] = {}
        self.startup_warnings: tuple[str, ...] = ()
        self._replay_journal()
        self._lock = threading.Lock()
        self._journal = open(self._journal_path, "a", encoding="utf-8")
        self._since_compact = 0

    # -- startup ------------------------------------------------------------

    def _replay_journal(self) -> None:
        if not os.path.exists(self._journal_path):
            return
        with open(self._journal_path, "rb") as handle:
            raw = handle.read()
        lines = raw.split(b"\n")
        consumed = 0
        warnings = []
        for i, line in enumerate(lines):
            if line == b"":
                if i != len(lines) - 1:
                    raise ValidationError(
                        "blank line in journal", f"{JOURNAL_FILENAME}:line {i + 1}"
                    )
                break
            loc = f"{JOURNAL_FILENAME}:line {i + 1}"
            try:
                doc = json.loads(line)
            except json.JSONDecodeError:
                if i == len(lines) - 1:
                    # incomplete final line from a crash mid-write: trim it,
                    # committed entries stay untouched
                    warnings.append(
                        f"{loc}: incomplete final journal line dropped "
                        f"({len(line)} bytes)"
                    )
                    os.truncate(self._journal_path, consumed)
                    break
                raise ValidationError("not valid JSON", loc) from None
            submission = _parse_journal_entry(doc, loc)
            self._validate_submission(submission, loc)
            self.submissions[
                (submission.proposal_id, submission.annotator_id)
            ] = submission
            consumed += len(line) + 1
        for message in warnings:
            logger.warning(message)
        self.startup_warnings = tuple(warnings)

    def _validate_submission(self, submission: AnnotationSubmission, loc: str) -> None:
        if submission.proposal_id not in self._proposal_ids:
            raise ValidationError(
                f"unknown proposal id {submission.proposal_id!r}", loc
            )
        known = set(self.taxonomy.descriptor_ids)
        offenders = sorted(set(submission.descriptor_ids) - known)
        if offenders:
            raise ValidationError(
                f"unknown descriptor ids: {', '.join(offenders)}", loc
            )

    # -- writes -------------------------------------------------------------

    def submit(
        self, proposal_id: str, annotator_id: str, descriptor_ids: Iterable[str]
    ) -> AnnotationSubmission:
        """Validate, persist durably, then apply one annotation.

        The journal line is flushed and fsynced before the submission
        becomes visible, so a caller that saw this return can rely on the
        annotation surviving a crash.  Resubmission by the same annotator
        for the same proposal overwrites their earlier judgment.
        """
        if proposal_id not in self._proposal_ids:
            raise UnknownProposalError(f"unknown proposal id {proposal_id!r}")
        canonical = tuple(sorted(set(descriptor_ids)))
        known = set(self.taxonomy.descriptor_ids)
        offenders = sorted(set(canonical) - known)
        if offenders:
            raise UnknownDescriptorsError(offenders)
        submission = AnnotationSubmission(
            proposal_id=proposal_id,
            annotator_id=annotator_id,
            descriptor_ids=canonical,
            submitted_at=datetime.now(timezone.utc).isoformat(timespec="milliseconds"),
        )
        line = json.dumps(
            {
                "proposal_id": submission.proposal_id,
                "annotator_id": submission.annotator_id,
                "descriptor_ids": list(submission.descriptor_ids),
                "submitted_at": submission.submitted_at,
            },
            ensure_ascii=False,
        )
        with self._lock:
            if self._journal.closed:
                raise RuntimeError("store is closed")
            self._journal.write(line + "\n")
            self._journal.flush()
            os.fsync(self._journal.fileno())
            self.submissions[(proposal_id, annotator_id)] = submission
            self._since_compact += 1
            if self._since_compact >= self.compact_every:
                self._compact_locked()
        return submission

    def compact(self) -> None:
        """Fold the journal into ``study.json`` (atomic, validated)."""
        with self._lock:
            self._compact_locked()

    def _compact_locked(self) -> None:
        dataset = self.export_dataset()
        text = write_dataset(dataset)
        # never persist a study file that would not load back
        parse_dataset(text, self.taxonomy)
        _atomic_write_text(os.path.join(self.data_dir, STUDY_FILENAME), text)
        self._since_compact = 0

    def close(self) -> None:
        """Compact and release the journal handle; idempotent."""
        with self._lock:
            if self._journal.closed:
                return
            self._compact_locked()
            self._journal.close()

    # -- reads --------------------------------------------------------------

    def annotated_proposals(self, annotator_id: str | None = None) -> set[str]:
        """Proposal ids considered annotated, for one annotator or overall."""
        if annotator_id is not None:
            return {
                pid for (pid, aid) in self.submissions if aid == annotator_id
            }
        submitted = {pid for (pid, _) in self.submissions}
        return submitted | set(self.dataset.annotations)

    def aggregated_annotations(
        self, annotator: str | None = None
    ) -> dict[str, DescriptionVector]:
        """Annotation vectors per proposal under the chosen aggregation."""
        by_proposal: dict[str, dict[str, tuple[str, ...]]] = {}
        for (pid, aid), submission in self.submissions.items():
            by_proposal.setdefault(pid, {})[aid] = submission.descriptor_ids
        if annotator is not None:
            return {
                pid: self.taxonomy.vector_for(per_annotator[annotator])
                for pid, per_annotator in by_proposal.items()
                if annotator in per_annotator
            }
        result = dict(self.dataset.annotations)
        for pid, per_annotator in by_proposal.items():
            voters = len(per_annotator)
            votes = [0] * self.taxonomy.dims
            for ids in per_annotator.values():
                for i, bit in enumerate(self.taxonomy.vector_for(ids)):
                    votes[i] += bit
            result[pid] = DescriptionVector(
                tuple(1 if 2 * v > voters else 0 for v in votes)
            )
        return result

    def export_dataset(self, annotator: str | None = None) -> StudyDataset:
        return replace(self.dataset, annotations=self.aggregated_annotations(annotator))


# ---------------------------------------------------------------------------
# HTTP layer


def _error(status: int, message: str, **extra) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": message, **extra})


def create_app(store: AnnotationStore, ui_dir: str | os.PathLike | None = None) -> FastAPI:
    """Wire an :class:`AnnotationStore` into the HTTP API.

    When ``ui_dir`` is given, its contents are served at ``/`` (the built
    browser UI bundle); the API lives under ``/api`` either way.  The
    store is compacted and closed when the application shuts down.
    """
    from contextlib import asynccontextmanager

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        store.close()

    app = FastAPI(title="annotation service", lifespan=lifespan)
    referent_labels = {r.id: r.label for r in store.dataset.referents}

    @app.get("/api/taxonomy")
    def get_taxonomy() -> Response:
        return Response(write_taxonomy(store.taxonomy), media_type=_JSON_MEDIA_TYPE)

    @app.get("/api/proposals")
    def list_proposals(
        referent_id: str | None = None, annotator_id: str | None = None
    ) -> Response:
        if referent_id is not None and referent_id not in referent_labels:
            return _error(404, f"unknown referent id {referent_id!r}")
        done = store.annotated_proposals(annotator_id)
        entries = [
            {
                "id": p.id,
                "referent_id": p.referent_id,
                "referent_label": referent_labels[p.referent_id],
                "participant_id": p.participant_id,
                "media_ref": p.media_ref,
                "annotated": p.id in done,
            }
            for p in store.dataset.proposals
            if referent_id is None or p.referent_id == referent_id
        ]
        return Response(
            json.dumps({"proposals": entries}, ensure_ascii=False),
            media_type=_JSON_MEDIA_TYPE,
        )

    @app.put("/api/proposals/{proposal_id}/annotation")
    async def put_annotation(proposal_id: str, request: Request) -> Response:
        try:
            doc = json.loads(await request.body())
        except json.JSONDecodeError:
            return _error(400, "request body is not valid JSON")
        if not isinstance(doc, dict):
            return _error(400, "request body must be a JSON object")
        annotator_id = doc.get("annotator_id")
        if not isinstance(annotator_id, str) or not annotator_id:
            return _error(400, "annotator_id must be a non-empty string")
        descriptor_ids = doc.get("descriptor_ids")
        if not isinstance(descriptor_ids, list) or not all(
            isinstance(i, str) for i in descriptor_ids
        ):
            return _error(400, "descriptor_ids must be a list of strings")
        unknown = sorted(set(doc) - {"annotator_id", "descriptor_ids"})
        if unknown:
            return _error(400, f"unknown keys: {', '.join(unknown)}")
        try:
            submission = store.submit(proposal_id, annotator_id, descriptor_ids)
        except UnknownProposalError as exc:
            return _error(404, str(exc))
        except UnknownDescriptorsError as exc:
            return _error(422, str(exc), offenders=exc.offenders)
        vector = store.taxonomy.vector_for(submission.descriptor_ids)
        return Response(
            json.dumps(
                {
                    "proposal_id": submission.proposal_id,
                    "annotator_id": submission.annotator_id,
                    "descriptor_ids": list(submission.descriptor_ids),
                    "vector": list(vector.bits),
                    "submitted_at": submission.submitted_at,
                },
                ensure_ascii=False,
            ),
            media_type=_JSON_MEDIA_TYPE,
        )

    @app.get("/api/report")
    def get_report(
        similarity: str = "jaccard",
        annotator: str | None = None,
        aggregate: str | None = None,
    ) -> Response:
        kinds = {kind.value: kind for kind in SimilarityKind}
        if similarity not in kinds:
            return _error(
                400, f"unknown similarity {similarity!r}; expected one of {sorted(kinds)}"
            )
        if aggregate is not None and aggregate != "majority":
            return _error(400, f"unknown aggregate mode {aggregate!r}")
        if annotator is not None and aggregate is not None:
            return _error(400, "annotator and aggregate are mutually exclusive")
        report = build_report(store.export_dataset(annotator), kinds[similarity])
        return Response(write_report(report, "json"), media_type=_JSON_MEDIA_TYPE)

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=os.fspath(ui_dir), html=True), name="ui")

    return app
