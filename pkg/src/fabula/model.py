"""Shared domain types for narrative documents and their annotations.

Everything here is an immutable value object: documents, tokens, spans,
events, temporal labels, mention clusters, and event chains. All offsets
are character offsets into the decoded text (never encoded bytes), so the
CLI, the service, and any external annotator agree on positions regardless
of how the text was stored on disk.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional


class RelationValue(str, Enum):
    """Pairwise temporal relation between two events."""

    BEFORE = "BEFORE"
    AFTER = "AFTER"
    SIMULTANEOUS = "SIMULTANEOUS"
    VAGUE = "VAGUE"


class GenderLabel(str, Enum):
    """Gender category for a character; GROUP covers plural and collective
    clusters referred to by they/them."""

    FEMALE = "FEMALE"
    MALE = "MALE"
    GROUP = "GROUP"
    UNKNOWN = "UNKNOWN"


class MentionKind(str, Enum):
    NAME = "NAME"
    PRONOUN = "PRONOUN"
    NOMINAL = "NOMINAL"


class ImportanceTier(str, Enum):
    PRIMARY = "PRIMARY"
    SECONDARY = "SECONDARY"
    TERTIARY = "TERTIARY"


class SpanBoundsError(ValueError):
    """A span does not fit inside the document it was resolved against."""


@dataclass(frozen=True, order=True)
class Span:
    """Half-open character interval [start, end) into a document's text."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end <= self.start:
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end


@dataclass(frozen=True)
class Token:
    span: Span
    surface: str
    sentence_index: int


@dataclass(frozen=True)
class Document:
    """A story text plus its deterministic tokenization.

    Tokens are sorted by start offset and non-overlapping; each token lies
    inside exactly one sentence span. ``validate_document`` checks these
    invariants and reports violations as data rather than raising.
    """

    id: str
    text: str
    tokens: tuple[Token, ...]
    sentences: tuple[Span, ...]


@dataclass(frozen=True)
class Argument:
    """An event argument: its text span and, once coreference has run, the
    id of the character it resolves to (None when unresolved)."""

    span: Span
    character_id: Optional[int] = None


@dataclass(frozen=True)
class EventRecord:
    """A verb-trigger event. Ids are dense 0..n-1 in textual order, so id
    comparison doubles as document-order comparison."""

    event_id: int
    trigger: Span
    lemma: str
    subject: Optional[Argument]
    object: Optional[Argument]
    sentence_index: int
    salience: Optional[float] = None


@dataclass(frozen=True)
class TemporalLabel:
    """Directed pairwise relation between two events (by event id)."""

    left: int
    right: int
    relation: RelationValue
    confidence: Optional[float] = None

    def __post_init__(self) -> None:
        if self.left == self.right:
            raise ValueError(f"temporal label relates event {self.left} to itself")
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class Mention:
    """One textual mention of a character, tagged with its coreference
    cluster id."""

    span: Span
    kind: MentionKind
    cluster: int


@dataclass(frozen=True)
class CharacterEntity:
    """A clustered story character: canonical name, mention counts split by
    kind, gender from pronoun tallies, and an importance tier from the
    character's share of all mentions. ``cluster`` links back to the
    mention cluster the entity was built from; ``first_offset`` is where
    the character first appears (used for tie-breaks and display order)."""

    character_id: int
    cluster: int
    name: str
    name_mentions: int
    pronoun_mentions: int
    gender: GenderLabel
    importance: ImportanceTier
    first_offset: int

    def __post_init__(self) -> None:
        if self.name_mentions > 0 and not self.name:
            raise ValueError("character with name mentions must have a canonical name")
        if self.name_mentions < 0 or self.pronoun_mentions < 0:
            raise ValueError("mention counts must be non-negative")

    @property
    def total_mentions(self) -> int:
        return self.name_mentions + self.pronoun_mentions


@dataclass(frozen=True)
class EventChain:
    """A totally ordered sequence of event ids plus the filter that
    produced it ("all", "salient", "gender:<G>", or "character:<id>")."""

    event_ids: tuple[int, ...]
    filter: str = "all"

    def __post_init__(self) -> None:
        if len(set(self.event_ids)) != len(self.event_ids):
            raise ValueError("event chain contains duplicate event ids")


@dataclass(frozen=True)
class Violation:
    """One broken invariant found by a validator; kind names the offending
    type, index locates the record, rule says what was violated."""

    kind: str
    index: Optional[int]
    rule: str


def resolve_span(doc: Document, span: Span) -> str:
    """Return exactly the characters doc.text[span.start:span.end].

    Raises SpanBoundsError when the span does not fit inside the text.
    """
    if span.end > len(doc.text):
        raise SpanBoundsError(
            f"span [{span.start}, {span.end}) out of range for document "
            f"{doc.id!r} of length {len(doc.text)}"
        )
    return doc.text[span.start : span.end]


def validate_document(doc: Document) -> list[Violation]:
    """Check every document invariant; an empty report means the document
    is well-formed. Violations are returned, never raised."""
    report: list[Violation] = []
    n = len(doc.text)

    for i, sent in enumerate(doc.sentences):
        if sent.end > n:
            report.append(Violation("Sentence", i, f"span [{sent.start}, {sent.end}) exceeds text length {n}"))
        if i and sent.start < doc.sentences[i - 1].end:
            report.append(Violation("Sentence", i, "overlaps previous sentence"))

    prev: Optional[Token] = None
    for i, tok in enumerate(doc.tokens):
        if tok.span.end > n:
            report.append(Violation("Token", i, f"span [{tok.span.start}, {tok.span.end}) exceeds text length {n}"))
            prev = tok
            continue
        if doc.text[tok.span.start : tok.span.end] != tok.surface:
            report.append(Violation("Token", i, f"surface {tok.surface!r} does not match its span"))
        if prev is not None and tok.span.start < prev.span.end:
            report.append(Violation("Token", i, "overlaps or precedes previous token"))
        homes = [j for j, s in enumerate(doc.sentences) if s.contains(tok.span)]
        if len(homes) != 1:
            report.append(Violation("Token", i, "does not lie within exactly one sentence span"))
        elif homes[0] != tok.sentence_index:
            report.append(Violation("Token", i, f"sentence_index {tok.sentence_index} but lies in sentence {homes[0]}"))
        prev = tok

    occupied = {t.sentence_index for t in doc.tokens}
    for i in range(len(doc.sentences)):
        if i not in occupied:
            report.append(Violation("Sentence", i, "contains no token"))

    return report


def validate_events(doc: Document, events: tuple[EventRecord, ...] | list[EventRecord]) -> list[Violation]:
    """Check the EventRecord invariants against their document: dense ids in
    textual order and triggers inside their claimed sentence."""
    report: list[Violation] = []
    for i, ev in enumerate(events):
        if ev.event_id != i:
            report.append(Violation("EventRecord", i, f"event_id {ev.event_id} is not dense/ordered"))
        if i and events[i - 1].trigger.start >= ev.trigger.start:
            report.append(Violation("EventRecord", i, "trigger does not follow previous event in textual order"))
        if ev.trigger.end > len(doc.text):
            report.append(Violation("EventRecord", i, "trigger span out of document range"))
            continue
        if not (0 <= ev.sentence_index < len(doc.sentences)):
            report.append(Violation("EventRecord", i, f"sentence_index {ev.sentence_index} out of range"))
        elif not doc.sentences[ev.sentence_index].contains(ev.trigger):
            report.append(Violation("EventRecord", i, "trigger lies outside its sentence span"))
        if ev.salience is not None and ev.salience < 0:
            report.append(Violation("EventRecord", i, f"negative salience {ev.salience}"))
    return report
