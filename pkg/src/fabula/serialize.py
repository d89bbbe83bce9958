"""JSON conversion for every domain type, plus canonical encoding.

``canonical_json`` is the single serialization used for hashing, storage,
and byte-for-byte determinism checks: sorted keys, compact separators,
UTF-8 text. ``from_jsonable(to_jsonable(x))`` reconstructs an equal value
for every type here.
"""

from __future__ import annotations

import json
from typing import Any, Optional

from .model import (
    Argument,
    CharacterEntity,
    Document,
    EventChain,
    EventRecord,
    GenderLabel,
    ImportanceTier,
    Mention,
    MentionKind,
    RelationValue,
    Span,
    TemporalLabel,
    Token,
)
from .stats import ContingencyTable, ImportanceRow, PolarizedReport, PolarizedRow
from .temporal import Edge


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def span_to_json(span: Span) -> list[int]:
    return [span.start, span.end]


def span_from_json(data: list[int]) -> Span:
    return Span(data[0], data[1])


def _opt_span_to_json(span: Optional[Span]) -> Optional[list[int]]:
    return None if span is None else span_to_json(span)


def document_to_json(doc: Document) -> dict:
    return {
        "id": doc.id,
        "text": doc.text,
        "tokens": [
            {"span": span_to_json(t.span), "surface": t.surface, "sentence_index": t.sentence_index}
            for t in doc.tokens
        ],
        "sentences": [span_to_json(s) for s in doc.sentences],
    }


def document_from_json(data: dict) -> Document:
    return Document(
        id=data["id"],
        text=data["text"],
        tokens=tuple(
            Token(span_from_json(t["span"]), t["surface"], t["sentence_index"])
            for t in data["tokens"]
        ),
        sentences=tuple(span_from_json(s) for s in data["sentences"]),
    )


def argument_to_json(arg: Optional[Argument]) -> Optional[dict]:
    if arg is None:
        return None
    return {"span": span_to_json(arg.span), "character_id": arg.character_id}


def argument_from_json(data: Optional[dict]) -> Optional[Argument]:
    if data is None:
        return None
    return Argument(span=span_from_json(data["span"]), character_id=data["character_id"])


def event_to_json(ev: EventRecord) -> dict:
    return {
        "event_id": ev.event_id,
        "trigger": span_to_json(ev.trigger),
        "lemma": ev.lemma,
        "subject": argument_to_json(ev.subject),
        "object": argument_to_json(ev.object),
        "sentence_index": ev.sentence_index,
        "salience": ev.salience,
    }


def event_from_json(data: dict) -> EventRecord:
    return EventRecord(
        event_id=data["event_id"],
        trigger=span_from_json(data["trigger"]),
        lemma=data["lemma"],
        subject=argument_from_json(data["subject"]),
        object=argument_from_json(data["object"]),
        sentence_index=data["sentence_index"],
        salience=data["salience"],
    )


def mention_to_json(m: Mention) -> dict:
    return {"span": span_to_json(m.span), "kind": m.kind.value, "cluster": m.cluster}


def mention_from_json(data: dict) -> Mention:
    return Mention(span_from_json(data["span"]), MentionKind(data["kind"]), data["cluster"])


def label_to_json(lb: TemporalLabel) -> dict:
    return {
        "left": lb.left,
        "right": lb.right,
        "relation": lb.relation.value,
        "confidence": lb.confidence,
    }


def label_from_json(data: dict) -> TemporalLabel:
    return TemporalLabel(
        left=data["left"],
        right=data["right"],
        relation=RelationValue(data["relation"]),
        confidence=data["confidence"],
    )


def character_to_json(ch: CharacterEntity) -> dict:
    return {
        "character_id": ch.character_id,
        "cluster": ch.cluster,
        "name": ch.name,
        "name_mentions": ch.name_mentions,
        "pronoun_mentions": ch.pronoun_mentions,
        "gender": ch.gender.value,
        "importance": ch.importance.value,
        "first_offset": ch.first_offset,
    }


def character_from_json(data: dict) -> CharacterEntity:
    return CharacterEntity(
        character_id=data["character_id"],
        cluster=data["cluster"],
        name=data["name"],
        name_mentions=data["name_mentions"],
        pronoun_mentions=data["pronoun_mentions"],
        gender=GenderLabel(data["gender"]),
        importance=ImportanceTier(data["importance"]),
        first_offset=data["first_offset"],
    )


def chain_to_json(chain: EventChain) -> dict:
    return {"event_ids": list(chain.event_ids), "filter": chain.filter}


def chain_from_json(data: dict) -> EventChain:
    return EventChain(event_ids=tuple(data["event_ids"]), filter=data["filter"])


def edge_to_json(edge: Edge) -> dict:
    return {
        "source": edge.source,
        "target": edge.target,
        "confidence": edge.confidence,
        "label_index": edge.label_index,
    }


def edge_from_json(data: dict) -> Edge:
    return Edge(
        source=data["source"],
        target=data["target"],
        confidence=data["confidence"],
        label_index=data["label_index"],
    )


def contingency_to_json(t: ContingencyTable) -> dict:
    return {"lemma": t.lemma, "a": t.a, "b": t.b, "c": t.c, "d": t.d, "corrected": t.corrected}


def contingency_from_json(data: dict) -> ContingencyTable:
    return ContingencyTable(
        lemma=data["lemma"], a=data["a"], b=data["b"], c=data["c"], d=data["d"],
        corrected=data["corrected"],
    )


def polarized_report_to_json(report: PolarizedReport) -> dict:
    return {
        "min_total": report.min_total,
        "rows": [
            {
                "lemma": r.lemma,
                "table": contingency_to_json(r.table),
                "odds_ratio": r.odds_ratio,
                "log_odds": r.log_odds,
            }
            for r in report.rows
        ],
        "excluded": {
            "group_subject_events": report.excluded_group_events,
            "unknown_subject_events": report.excluded_unknown_events,
            "unresolved_subject_events": report.excluded_unresolved_events,
        },
    }


def polarized_report_from_json(data: dict) -> PolarizedReport:
    return PolarizedReport(
        rows=tuple(
            PolarizedRow(
                lemma=r["lemma"],
                table=contingency_from_json(r["table"]),
                odds_ratio=r["odds_ratio"],
                log_odds=r["log_odds"],
            )
            for r in data["rows"]
        ),
        min_total=data["min_total"],
        excluded_group_events=data["excluded"]["group_subject_events"],
        excluded_unknown_events=data["excluded"]["unknown_subject_events"],
        excluded_unresolved_events=data["excluded"]["unresolved_subject_events"],
    )


def importance_row_to_json(row: ImportanceRow) -> dict:
    return {
        "character_id": row.character_id,
        "name": row.name,
        "name_mentions": row.name_mentions,
        "pronoun_mentions": row.pronoun_mentions,
        "total": row.total,
        "tier": row.tier.value,
        "share": row.share,
    }


def importance_row_from_json(data: dict) -> ImportanceRow:
    return ImportanceRow(
        character_id=data["character_id"],
        name=data["name"],
        name_mentions=data["name_mentions"],
        pronoun_mentions=data["pronoun_mentions"],
        total=data["total"],
        tier=ImportanceTier(data["tier"]),
        share=data["share"],
    )
