"""Character entities: mention counting, gender inference, importance tiers.

A character is a mention cluster containing at least one name; clusters of
bare pronouns are discarded. Gender comes exclusively from the pronouns
observed in the cluster (a strict majority of he- vs she-family pronouns;
they-only clusters are GROUP; anything ambiguous stays UNKNOWN rather than
guessing). Importance tiers derive from each character's share of all
mentions; the thresholds are configuration, and raw counts are always
reported so users can re-tier.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .heuristics import PronounLexicon
from .model import (
    Argument,
    CharacterEntity,
    Document,
    EventRecord,
    GenderLabel,
    ImportanceTier,
    Mention,
    MentionKind,
)


@dataclass(frozen=True)
class ImportanceThresholds:
    """Mention-share cutoffs between tiers: PRIMARY at or above
    primary_share, SECONDARY at or above secondary_share."""

    primary_share: float = 0.10
    secondary_share: float = 0.02

    def __post_init__(self) -> None:
        if not 0.0 <= self.secondary_share <= self.primary_share <= 1.0:
            raise ValueError(
                f"need 0 <= secondary {self.secondary_share} <= primary {self.primary_share} <= 1"
            )

    def to_jsonable(self) -> dict:
        return {"primary_share": self.primary_share, "secondary_share": self.secondary_share}

    @classmethod
    def from_jsonable(cls, data: dict) -> "ImportanceThresholds":
        return cls(**data)


def infer_gender(male: int = 0, female: int = 0, they: int = 0) -> GenderLabel:
    """Gender from pronoun-family tallies: strict majority wins between
    MALE and FEMALE; clusters seen only with they-pronouns are GROUP; no
    pronouns at all, or an exact tie, is UNKNOWN."""
    if male > female:
        return GenderLabel.MALE
    if female > male:
        return GenderLabel.FEMALE
    if male == 0 and female == 0 and they > 0:
        return GenderLabel.GROUP
    return GenderLabel.UNKNOWN


def pronoun_tallies(
    doc: Document,
    mentions: Sequence[Mention],
    pronouns: Optional[PronounLexicon] = None,
) -> dict[int, dict[str, int]]:
    """Per-cluster counts of male/female/they pronoun families."""
    pronouns = pronouns or PronounLexicon.packaged()
    tallies: dict[int, dict[str, int]] = {}
    for m in mentions:
        bucket = tallies.setdefault(m.cluster, {"male": 0, "female": 0, "they": 0})
        if m.kind != MentionKind.PRONOUN:
            continue
        family = pronouns.family(doc.text[m.span.start : m.span.end])
        if family in bucket:
            bucket[family] += 1
    return tallies


def build_characters(
    doc: Document,
    mentions: Sequence[Mention],
    pronouns: Optional[PronounLexicon] = None,
) -> tuple[CharacterEntity, ...]:
    """One entity per cluster that contains at least one NAME mention.

    The canonical name is the most frequent name surface in the cluster,
    ties broken toward the longest (so "Anna Maria" beats "Anna"), then
    alphabetically. Entities are numbered densely in order of their first
    mention; importance starts at TERTIARY until assign_importance runs.
    """
    by_cluster: dict[int, list[Mention]] = {}
    for m in mentions:
        by_cluster.setdefault(m.cluster, []).append(m)

    tallies = pronoun_tallies(doc, mentions, pronouns)
    entities: list[CharacterEntity] = []
    first_offsets = {
        cluster: min(m.span.start for m in ms) for cluster, ms in by_cluster.items()
    }
    for cluster in sorted(by_cluster, key=lambda c: first_offsets[c]):
        ms = by_cluster[cluster]
        name_surfaces: dict[str, int] = {}
        name_count = pronoun_count = 0
        for m in ms:
            if m.kind == MentionKind.NAME:
                name_count += 1
                surface = doc.text[m.span.start : m.span.end]
                name_surfaces[surface] = name_surfaces.get(surface, 0) + 1
            elif m.kind == MentionKind.PRONOUN:
                pronoun_count += 1
        if name_count == 0:
            continue
        canonical = min(
            name_surfaces.items(), key=lambda kv: (-kv[1], -len(kv[0]), kv[0])
        )[0]
        t = tallies[cluster]
        entities.append(
            CharacterEntity(
                character_id=len(entities),
                cluster=cluster,
                name=canonical,
                name_mentions=name_count,
                pronoun_mentions=pronoun_count,
                gender=infer_gender(male=t["male"], female=t["female"], they=t["they"]),
                importance=ImportanceTier.TERTIARY,
                first_offset=first_offsets[cluster],
            )
        )
    return tuple(entities)


def assign_importance(
    entities: Sequence[CharacterEntity],
    thresholds: ImportanceThresholds = ImportanceThresholds(),
) -> tuple[CharacterEntity, ...]:
    """Tier each entity by its share of all retained-cluster mentions."""
    total = sum(e.total_mentions for e in entities)
    if total == 0:
        return tuple(entities)
    tiered = []
    for e in entities:
        share = (e.name_mentions + e.pronoun_mentions) / total
        if share >= thresholds.primary_share:
            tier = ImportanceTier.PRIMARY
        elif share >= thresholds.secondary_share:
            tier = ImportanceTier.SECONDARY
        else:
            tier = ImportanceTier.TERTIARY
        tiered.append(replace(e, importance=tier))
    return tuple(tiered)


def top_characters(entities: Sequence[CharacterEntity], k: int) -> tuple[CharacterEntity, ...]:
    """The k most-mentioned characters, earliest-appearing first on ties."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    ranked = sorted(
        entities,
        key=lambda e: (-e.total_mentions, e.first_offset, e.character_id),
    )
    return tuple(ranked[:k])


def attach_characters(
    events: Iterable[EventRecord],
    mentions: Sequence[Mention],
    entities: Sequence[CharacterEntity],
) -> tuple[EventRecord, ...]:
    """Resolve event argument spans to character ids via the mention they
    overlap. The mention with the largest overlap wins (earliest on ties);
    arguments over dropped clusters or over no mention stay unresolved."""
    cluster_to_char = {e.cluster: e.character_id for e in entities}

    def resolve(arg: Optional[Argument]) -> Optional[Argument]:
        if arg is None:
            return None
        best = None
        best_key = None
        for m in mentions:
            if not m.span.overlaps(arg.span):
                continue
            overlap = min(m.span.end, arg.span.end) - max(m.span.start, arg.span.start)
            key = (-overlap, m.span.start)
            if best_key is None or key < best_key:
                best, best_key = m, key
        if best is None:
            return arg
        return replace(arg, character_id=cluster_to_char.get(best.cluster))

    return tuple(
        replace(ev, subject=resolve(ev.subject), object=resolve(ev.object))
        for ev in events
    )
