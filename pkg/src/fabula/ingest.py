"""Text segmentation and the annotation-bundle interchange format.

The bundle format is the contract through which external annotators (SRL
models, neural coreference, temporal relation models) feed the pipeline:
UTF-8 JSON carrying frames, mentions, and temporal labels as character
spans against the paired document. Spans rather than token indices keep
the exchange independent of anyone's tokenizer.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

from ._data import packaged_lines
from .model import (
    Document,
    EventRecord,
    Mention,
    MentionKind,
    RelationValue,
    Span,
    TemporalLabel,
    Token,
)

SCHEMA_VERSION = 1

# characters stripped from chunk edges during tokenization
_PUNCT = set(".,;:!?\"'()[]{}<>«»“”‘’`…—–-*/\\")

_TERMINATORS = set(".!?")
_CLOSERS = set("\"'”’)]»")


class EmptyDocumentError(ValueError):
    """Raised when asked to segment input that is empty after trimming."""


class BundleParseError(ValueError):
    """Bundle payload violates the schema; message carries the field path."""


class BundleValidationError(ValueError):
    """Bundle is well-formed but inconsistent with its document."""


class FabulaWarning(UserWarning):
    """Non-fatal data issue noticed while ingesting annotations."""


def _warn(message: str, on_warning: Optional[Callable[[str], None]]) -> None:
    if on_warning is not None:
        on_warning(message)
    else:
        warnings.warn(message, FabulaWarning, stacklevel=3)


def segment_text(
    raw: str,
    doc_id: str = "doc",
    abbreviations: Optional[frozenset[str]] = None,
) -> Document:
    """Deterministically tokenize and sentence-split raw story text.

    Tokens are whitespace chunks with leading/trailing punctuation detached
    into single-character tokens. Sentences end at . ! ? followed (after
    any closing quotes/brackets) by whitespace and an uppercase letter or
    an opening quote; a terminator is ignored when the word before it is on
    the abbreviation stop-list. Identical input always yields an identical
    Document.
    """
    if not raw.strip():
        raise EmptyDocumentError("cannot segment empty text")
    if abbreviations is None:
        abbreviations = packaged_lines("abbreviations.txt")

    splits = _sentence_splits(raw, abbreviations)
    pieces: list[tuple[int, int]] = []
    for start, end in _whitespace_chunks(raw):
        pieces.extend(_detach_punctuation(raw, start, end))

    tokens: list[Token] = []
    sentence_spans: list[Span] = []
    boundary = iter(splits + [len(raw)])
    current_end = next(boundary)
    bucket: list[tuple[int, int]] = []

    def flush() -> None:
        if bucket:
            sentence_spans.append(Span(bucket[0][0], bucket[-1][1]))
            idx = len(sentence_spans) - 1
            for s, e in bucket:
                tokens.append(Token(Span(s, e), raw[s:e], idx))
            bucket.clear()

    for s, e in pieces:
        while s >= current_end:
            flush()
            current_end = next(boundary)
        bucket.append((s, e))
    flush()

    return Document(id=doc_id, text=raw, tokens=tuple(tokens), sentences=tuple(sentence_spans))


def _whitespace_chunks(text: str):
    start = None
    for i, ch in enumerate(text):
        if ch.isspace():
            if start is not None:
                yield start, i
                start = None
        elif start is None:
            start = i
    if start is not None:
        yield start, len(text)


def _detach_punctuation(text: str, start: int, end: int) -> list[tuple[int, int]]:
    head: list[tuple[int, int]] = []
    tail: list[tuple[int, int]] = []
    while start < end and text[start] in _PUNCT:
        head.append((start, start + 1))
        start += 1
    while end > start and text[end - 1] in _PUNCT:
        tail.append((end - 1, end))
        end -= 1
    core = [(start, end)] if start < end else []
    return head + core + list(reversed(tail))


def _sentence_splits(text: str, abbreviations: frozenset[str]) -> list[int]:
    """Offsets at which a new sentence begins (always after whitespace)."""
    splits: list[int] = []
    n = len(text)
    for i, ch in enumerate(text):
        if ch not in _TERMINATORS:
            continue
        j = i + 1
        while j < n and (text[j] in _CLOSERS or text[j] in _TERMINATORS):
            j += 1
        if j >= n or not text[j].isspace():
            continue
        k = j
        while k < n and text[k].isspace():
            k += 1
        if k >= n:
            continue
        nxt = text[k]
        if not (nxt.isupper() or nxt in "\"'“‘«"):
            continue
        if ch == "." and _word_before(text, i).lower() in abbreviations:
            continue
        splits.append(k)
    return splits


def _word_before(text: str, i: int) -> str:
    j = i
    while j > 0 and text[j - 1].isalpha():
        j -= 1
    return text[j:i]


@dataclass(frozen=True)
class Frame:
    """One predicate-argument frame from an external annotator."""

    trigger: Span
    subject: Optional[Span]
    object: Optional[Span]


@dataclass(frozen=True)
class AnnotationBundle:
    schema_version: int
    frames: tuple[Frame, ...]
    mentions: tuple[Mention, ...]
    temporal_labels: tuple[TemporalLabel, ...]
    provenance: str


@dataclass(frozen=True)
class MergeResult:
    """Events with dense textual-order ids, the mention clusters carried
    through unchanged, and temporal labels remapped to the new event ids."""

    events: tuple[EventRecord, ...]
    mentions: tuple[Mention, ...]
    labels: tuple[TemporalLabel, ...]


_KNOWN_TOP = {"schema_version", "frames", "mentions", "temporal_labels", "provenance"}
_KNOWN_FRAME = {"trigger", "subject", "object"}
_KNOWN_MENTION = {"span", "kind", "cluster"}
_KNOWN_LABEL = {"left", "right", "relation", "confidence", "gold"}


def _span_from(value: object, path: str) -> Span:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)
    ):
        raise BundleParseError(f"{path}: expected [start, end] integer pair, got {value!r}")
    start, end = value
    if start < 0 or end <= start:
        raise BundleParseError(f"{path}: invalid span [{start}, {end})")
    return Span(start, end)


def parse_annotation_bundle(
    payload: str | bytes | dict,
    doc: Document,
    on_warning: Optional[Callable[[str], None]] = None,
) -> AnnotationBundle:
    """Parse and validate a serialized annotation bundle against its document.

    Schema violations raise BundleParseError with the offending field path;
    structurally valid bundles whose spans or references do not fit the
    document raise BundleValidationError listing every offending record.
    Unknown fields are ignored with a warning for forward compatibility.
    """
    if isinstance(payload, (str, bytes)):
        try:
            data = json.loads(payload)
        except json.JSONDecodeError as exc:
            raise BundleParseError(f"payload is not valid JSON: {exc}") from exc
    else:
        data = payload
    if not isinstance(data, dict):
        raise BundleParseError("top level: expected a JSON object")

    for key in sorted(set(data) - _KNOWN_TOP):
        _warn(f"ignoring unknown bundle field {key!r}", on_warning)

    version = data.get("schema_version")
    if not isinstance(version, int) or isinstance(version, bool):
        raise BundleParseError("schema_version: expected an integer")
    if version > SCHEMA_VERSION:
        _warn(f"bundle schema_version {version} is newer than supported {SCHEMA_VERSION}", on_warning)

    provenance = data.get("provenance", "")
    if not isinstance(provenance, str):
        raise BundleParseError("provenance: expected a string")

    frames: list[Frame] = []
    raw_frames = data.get("frames", [])
    if not isinstance(raw_frames, list):
        raise BundleParseError("frames: expected an array")
    for i, rec in enumerate(raw_frames):
        if not isinstance(rec, dict):
            raise BundleParseError(f"frames[{i}]: expected an object")
        for key in sorted(set(rec) - _KNOWN_FRAME):
            _warn(f"ignoring unknown field frames[{i}].{key}", on_warning)
        if "trigger" not in rec:
            raise BundleParseError(f"frames[{i}].trigger: missing")
        trigger = _span_from(rec["trigger"], f"frames[{i}].trigger")
        subject = None if rec.get("subject") is None else _span_from(rec["subject"], f"frames[{i}].subject")
        obj = None if rec.get("object") is None else _span_from(rec["object"], f"frames[{i}].object")
        frames.append(Frame(trigger, subject, obj))

    mentions: list[Mention] = []
    raw_mentions = data.get("mentions", [])
    if not isinstance(raw_mentions, list):
        raise BundleParseError("mentions: expected an array")
    for i, rec in enumerate(raw_mentions):
        if not isinstance(rec, dict):
            raise BundleParseError(f"mentions[{i}]: expected an object")
        for key in sorted(set(rec) - _KNOWN_MENTION):
            _warn(f"ignoring unknown field mentions[{i}].{key}", on_warning)
        if "span" not in rec:
            raise BundleParseError(f"mentions[{i}].span: missing")
        span = _span_from(rec["span"], f"mentions[{i}].span")
        kind = rec.get("kind")
        if kind not in (k.value for k in MentionKind):
            raise BundleParseError(f"mentions[{i}].kind: expected NAME|PRONOUN|NOMINAL, got {kind!r}")
        cluster = rec.get("cluster")
        if not isinstance(cluster, int) or isinstance(cluster, bool) or cluster < 0:
            raise BundleParseError(f"mentions[{i}].cluster: expected a non-negative integer")
        mentions.append(Mention(span, MentionKind(kind), cluster))

    labels: list[TemporalLabel] = []
    raw_labels = data.get("temporal_labels", [])
    if not isinstance(raw_labels, list):
        raise BundleParseError("temporal_labels: expected an array")
    for i, rec in enumerate(raw_labels):
        if not isinstance(rec, dict):
            raise BundleParseError(f"temporal_labels[{i}]: expected an object")
        for key in sorted(set(rec) - _KNOWN_LABEL):
            _warn(f"ignoring unknown field temporal_labels[{i}].{key}", on_warning)
        left, right = rec.get("left"), rec.get("right")
        for name, value in (("left", left), ("right", right)):
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise BundleParseError(f"temporal_labels[{i}].{name}: expected a non-negative integer")
        relation = rec.get("relation")
        if relation not in (r.value for r in RelationValue):
            raise BundleParseError(
                f"temporal_labels[{i}].relation: expected BEFORE|AFTER|SIMULTANEOUS|VAGUE, got {relation!r}"
            )
        confidence = rec.get("confidence")
        if confidence is not None and not isinstance(confidence, (int, float)):
            raise BundleParseError(f"temporal_labels[{i}].confidence: expected a number or null")
        if isinstance(confidence, bool):
            raise BundleParseError(f"temporal_labels[{i}].confidence: expected a number or null")
        if confidence is not None and not 0.0 <= float(confidence) <= 1.0:
            raise BundleParseError(f"temporal_labels[{i}].confidence: {confidence} outside [0, 1]")
        if left == right:
            raise BundleParseError(f"temporal_labels[{i}]: left and right are both {left}")
        labels.append(TemporalLabel(left, right, RelationValue(relation), None if confidence is None else float(confidence)))

    bundle = AnnotationBundle(version, tuple(frames), tuple(mentions), tuple(labels), provenance)
    problems = _validate_bundle(bundle, doc)
    if problems:
        raise BundleValidationError("bundle inconsistent with document: " + "; ".join(problems))
    return bundle


def _validate_bundle(bundle: AnnotationBundle, doc: Document) -> list[str]:
    problems: list[str] = []
    n = len(doc.text)

    def check_span(span: Optional[Span], where: str) -> None:
        if span is not None and span.end > n:
            problems.append(f"{where}: span [{span.start}, {span.end}) out of range (text length {n})")

    for i, frame in enumerate(bundle.frames):
        check_span(frame.trigger, f"frames[{i}].trigger")
        check_span(frame.subject, f"frames[{i}].subject")
        check_span(frame.object, f"frames[{i}].object")
    for i, mention in enumerate(bundle.mentions):
        check_span(mention.span, f"mentions[{i}].span")

    clusters = sorted({m.cluster for m in bundle.mentions})
    if clusters and clusters != list(range(len(clusters))):
        problems.append(f"mentions: cluster ids {clusters} are not dense 0..{len(clusters) - 1}")

    seen_pairs: set[frozenset[int]] = set()
    for i, label in enumerate(bundle.temporal_labels):
        for side, value in (("left", label.left), ("right", label.right)):
            if value >= len(bundle.frames):
                problems.append(
                    f"temporal_labels[{i}].{side}: frame ordinal {value} out of range "
                    f"({len(bundle.frames)} frames)"
                )
        pair = frozenset((label.left, label.right))
        if pair in seen_pairs:
            problems.append(f"temporal_labels[{i}]: duplicate pair ({label.left}, {label.right})")
        seen_pairs.add(pair)

    return problems


def serialize_bundle(bundle: AnnotationBundle) -> dict:
    """Inverse of parse_annotation_bundle; parse(serialize(b)) == b."""
    return {
        "schema_version": bundle.schema_version,
        "frames": [
            {
                "trigger": [f.trigger.start, f.trigger.end],
                "subject": None if f.subject is None else [f.subject.start, f.subject.end],
                "object": None if f.object is None else [f.object.start, f.object.end],
            }
            for f in bundle.frames
        ],
        "mentions": [
            {"span": [m.span.start, m.span.end], "kind": m.kind.value, "cluster": m.cluster}
            for m in bundle.mentions
        ],
        "temporal_labels": [
            {"left": lb.left, "right": lb.right, "relation": lb.relation.value, "confidence": lb.confidence}
            for lb in bundle.temporal_labels
        ],
        "provenance": bundle.provenance,
    }


def merge_annotations(
    doc: Document,
    bundle: AnnotationBundle,
    on_warning: Optional[Callable[[str], None]] = None,
) -> MergeResult:
    """Turn bundle frames into EventRecords with dense textual-order ids.

    Frames arriving out of order are sorted by trigger offset; exact
    duplicate trigger spans are dropped with a warning (first occurrence
    wins). Temporal label ordinals are remapped from frame positions to the
    new event ids; labels whose frames collapsed into one duplicate are
    dropped with a warning.
    """
    from .salience import stem  # stems the trigger surface into the lemma slot

    kept: list[tuple[int, Frame]] = []
    seen_triggers: dict[Span, int] = {}
    for i, frame in enumerate(bundle.frames):
        if frame.trigger in seen_triggers:
            _warn(
                f"duplicate trigger span [{frame.trigger.start}, {frame.trigger.end}) "
                f"at frames[{i}]; keeping frames[{seen_triggers[frame.trigger]}]",
                on_warning,
            )
            continue
        seen_triggers[frame.trigger] = i
        kept.append((i, frame))

    kept.sort(key=lambda item: (item[1].trigger.start, item[1].trigger.end))
    frame_to_event: dict[int, int] = {}
    events: list[EventRecord] = []
    for new_id, (old_index, frame) in enumerate(kept):
        frame_to_event[old_index] = new_id
        surface = doc.text[frame.trigger.start : frame.trigger.end]
        events.append(
            EventRecord(
                event_id=new_id,
                trigger=frame.trigger,
                lemma=stem(surface),
                subject=None if frame.subject is None else _argument(frame.subject),
                object=None if frame.object is None else _argument(frame.object),
                sentence_index=_sentence_of(doc, frame.trigger),
            )
        )
    # duplicates map onto the event that won
    for old_index, frame in enumerate(bundle.frames):
        if old_index not in frame_to_event:
            frame_to_event[old_index] = frame_to_event[seen_triggers[frame.trigger]]

    labels: list[TemporalLabel] = []
    seen_pairs: set[frozenset[int]] = set()
    for i, label in enumerate(bundle.temporal_labels):
        left, right = frame_to_event[label.left], frame_to_event[label.right]
        if left == right:
            _warn(f"temporal_labels[{i}] collapsed onto a single event after dedup; dropped", on_warning)
            continue
        pair = frozenset((left, right))
        if pair in seen_pairs:
            _warn(f"temporal_labels[{i}] duplicates pair ({left}, {right}) after dedup; dropped", on_warning)
            continue
        seen_pairs.add(pair)
        labels.append(TemporalLabel(left, right, label.relation, label.confidence))

    return MergeResult(tuple(events), bundle.mentions, tuple(labels))


def _argument(span: Span):
    from .model import Argument

    return Argument(span=span, character_id=None)


def _sentence_of(doc: Document, span: Span) -> int:
    for i, sent in enumerate(doc.sentences):
        if sent.start <= span.start < sent.end:
            return i
    # trigger outside any sentence (e.g. in trailing whitespace region):
    # attach to the nearest preceding sentence
    for i in range(len(doc.sentences) - 1, -1, -1):
        if doc.sentences[i].start <= span.start:
            return i
    return 0
