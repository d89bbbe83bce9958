"""Deterministic, model-free baseline annotators.

These make the pipeline runnable end-to-end without any external model
output: a lexicon-driven event extractor standing in for a semantic role
labeler, a nearest-antecedent pronoun resolver standing in for neural
coreference, and the sequential / random pairwise temporal labelers used
as reference points for evaluation.

All lexicons are packaged tab-separated text files and can be overridden
from the CLI. Auxiliaries and copulas are deliberately absent from the
verb lexicon: an event here is an action verb, so "The sky was blue."
yields nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from ._data import packaged_pairs, parse_tsv_pairs, read_data_file
from .model import (
    Argument,
    Document,
    EventRecord,
    Mention,
    MentionKind,
    RelationValue,
    Span,
    TemporalLabel,
    Token,
)

# Capitalized tokens that never start a name mention. Mostly function
# words and honorifics; content-word sentence openers are handled by the
# case-corroboration rule in find_mentions instead.
NAME_STOPLIST = frozenset(
    """
    i a an the and but or nor for yet so if then when while where why how
    what who whom whose which that this these those there here not no yes
    oh ah o you we us our ours your yours my mine me am is are was were be
    been being have has had do does did will would shall should may might
    must can could once soon now today tomorrow yesterday mr mrs ms dr
    prof sir madam st mt
    """.split()
)

_PRONOUN_FAMILY = {"he": "male", "she": "female", "they": "they", "it": "it"}


@dataclass(frozen=True)
class VerbLexicon:
    """Case-insensitive map from an inflected verb surface form to its
    base lemma."""

    forms: Mapping[str, str]

    def __post_init__(self) -> None:
        for surface, lemma in self.forms.items():
            if not lemma:
                raise ValueError(f"verb lexicon maps {surface!r} to an empty lemma")

    def lookup(self, surface: str) -> Optional[str]:
        return self.forms.get(surface.lower())

    @classmethod
    def from_tsv(cls, content: str) -> "VerbLexicon":
        return cls(parse_tsv_pairs(content))

    @classmethod
    def packaged(cls, override: Optional[str] = None) -> "VerbLexicon":
        if override is not None:
            return cls.from_tsv(read_data_file("verbs.tsv", override))
        return cls(packaged_pairs("verbs.tsv"))


@dataclass(frozen=True)
class PronounLexicon:
    """Map from pronoun surface to its canonical lemma (he/she/they/it),
    which in turn determines the gender family the pronoun is compatible
    with: he -> MALE, she -> FEMALE, they -> anything, it -> nobody."""

    forms: Mapping[str, str]

    def lookup(self, surface: str) -> Optional[str]:
        return self.forms.get(surface.lower())

    def family(self, surface: str) -> Optional[str]:
        lemma = self.lookup(surface)
        return None if lemma is None else _PRONOUN_FAMILY.get(lemma)

    @classmethod
    def from_tsv(cls, content: str) -> "PronounLexicon":
        return cls(parse_tsv_pairs(content))

    @classmethod
    def packaged(cls, override: Optional[str] = None) -> "PronounLexicon":
        if override is not None:
            return cls.from_tsv(read_data_file("pronouns.tsv", override))
        return cls(packaged_pairs("pronouns.tsv"))


@dataclass(frozen=True)
class NameGenderHints:
    """First-name -> 'f'/'m' hints used only to veto obviously mismatched
    pronoun-antecedent links; character gender itself always comes from
    pronoun tallies."""

    names: Mapping[str, str]

    def hint(self, first_token: str) -> Optional[str]:
        return self.names.get(first_token.lower())

    @classmethod
    def packaged(cls, override: Optional[str] = None) -> "NameGenderHints":
        if override is not None:
            return cls(parse_tsv_pairs(read_data_file("names.tsv", override)))
        return cls(packaged_pairs("names.tsv"))


@dataclass(frozen=True)
class Sighting:
    """A located name or pronoun occurrence, before clustering."""

    span: Span
    kind: MentionKind


def _strip_possessive(surface: str) -> str:
    for suffix in ("'s", "’s"):
        if surface.endswith(suffix):
            return surface[: -len(suffix)]
    return surface


def find_mentions(
    doc: Document,
    pronouns: Optional[PronounLexicon] = None,
    hints: Optional[NameGenderHints] = None,
) -> list[Sighting]:
    """Locate name and pronoun occurrences.

    A token is a pronoun when the pronoun lexicon knows it. It is a name
    candidate when it starts uppercase, contains a lowercase letter, and
    is not stoplisted; a candidate that opens its sentence additionally
    needs outside evidence of namehood, either recurring capitalized
    mid-sentence somewhere in the document or appearing in the first-name
    lexicon, otherwise it is treated as ordinary sentence-initial
    capitalization. Consecutive name tokens merge into one mention
    ("Anna Maria"), and a trailing possessive 's is excluded from the
    mention span.
    """
    pronouns = pronouns or PronounLexicon.packaged()
    hints = hints or NameGenderHints.packaged()

    first_alpha: dict[int, int] = {}
    for i, tok in enumerate(doc.tokens):
        if tok.sentence_index not in first_alpha and any(c.isalpha() for c in tok.surface):
            first_alpha[tok.sentence_index] = i

    def is_candidate(surface: str) -> bool:
        return (
            surface[:1].isupper()
            and any(c.islower() for c in surface)
            and _strip_possessive(surface).lower() not in NAME_STOPLIST
            and pronouns.lookup(surface) is None
        )

    corroborated: set[str] = set()
    for i, tok in enumerate(doc.tokens):
        if is_candidate(tok.surface) and first_alpha.get(tok.sentence_index) != i:
            corroborated.add(_strip_possessive(tok.surface).lower())

    sightings: list[Sighting] = []
    run: list[tuple[int, Token]] = []

    def flush_run() -> None:
        if not run:
            return
        first = run[0][1]
        last = run[-1][1]
        end = last.span.end
        if last.surface != _strip_possessive(last.surface):
            end -= len(last.surface) - len(_strip_possessive(last.surface))
        sightings.append(Sighting(Span(first.span.start, end), MentionKind.NAME))
        run.clear()

    prev_index = None
    for i, tok in enumerate(doc.tokens):
        if pronouns.lookup(tok.surface) is not None:
            flush_run()
            sightings.append(Sighting(tok.span, MentionKind.PRONOUN))
            prev_index = None
            continue
        base = _strip_possessive(tok.surface).lower()
        is_name = is_candidate(tok.surface) and (
            first_alpha.get(tok.sentence_index) != i
            or base in corroborated
            or hints.hint(base) is not None
        )
        if is_name:
            if run and prev_index == i - 1 and run[-1][1].sentence_index == tok.sentence_index:
                run.append((i, tok))
            else:
                flush_run()
                run.append((i, tok))
            prev_index = i
        else:
            flush_run()
            prev_index = None
    flush_run()

    sightings.sort(key=lambda s: s.span.start)
    return sightings


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def resolve_pronouns_heuristic(
    doc: Document,
    sightings: Sequence[Sighting],
    pronouns: Optional[PronounLexicon] = None,
    hints: Optional[NameGenderHints] = None,
) -> tuple[Mention, ...]:
    """Cluster name and pronoun sightings into coreference chains.

    Names cluster together when their surfaces match or one is a token
    prefix of the other ("Anna" with "Anna Maria"). Each he/she pronoun
    then joins the cluster of the nearest preceding name whose gender does
    not conflict, where conflict means an opposing first-name hint or an
    opposing strict majority among pronouns already in the cluster.
    They-pronouns are compatible with every cluster; it-pronouns and
    pronouns with no viable antecedent become singleton clusters.
    Cluster ids are dense, in order of first mention.
    """
    pronouns = pronouns or PronounLexicon.packaged()
    hints = hints or NameGenderHints.packaged()

    names = [s for s in sightings if s.kind == MentionKind.NAME]
    uf = _UnionFind(len(names))
    tokenized = [
        tuple(_strip_possessive(doc.text[s.span.start : s.span.end]).lower().split())
        for s in names
    ]
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            a, b = tokenized[i], tokenized[j]
            shorter, longer = (a, b) if len(a) <= len(b) else (b, a)
            if longer[: len(shorter)] == shorter:
                uf.union(i, j)

    group_of: dict[int, list[int]] = {}
    for i in range(len(names)):
        group_of.setdefault(uf.find(i), []).append(i)

    # one provisional cluster per name group, keyed by earliest mention
    clusters: list[dict] = []
    name_cluster: dict[int, int] = {}
    for root in sorted(group_of, key=lambda r: names[group_of[r][0]].span.start):
        members = group_of[root]
        hint = None
        for i in members:
            hint = hints.hint(tokenized[i][0]) if tokenized[i] else None
            if hint is not None:
                break
        cid = len(clusters)
        clusters.append({"hint": hint, "male": 0, "female": 0})
        for i in members:
            name_cluster[i] = cid

    assignments: list[tuple[Sighting, int]] = [(s, name_cluster[i]) for i, s in enumerate(names)]

    ordered_names = sorted(enumerate(names), key=lambda item: item[1].span.start)
    for s in sightings:
        if s.kind != MentionKind.PRONOUN:
            continue
        family = pronouns.family(doc.text[s.span.start : s.span.end])
        target: Optional[int] = None
        if family in ("male", "female", "they"):
            for i, name in reversed(ordered_names):
                if name.span.start >= s.span.start:
                    continue
                cluster = clusters[name_cluster[i]]
                if family == "male" and (cluster["hint"] == "f" or cluster["female"] > cluster["male"]):
                    continue
                if family == "female" and (cluster["hint"] == "m" or cluster["male"] > cluster["female"]):
                    continue
                target = name_cluster[i]
                break
        if target is None:
            target = len(clusters)
            clusters.append({"hint": None, "male": 0, "female": 0})
        if family in ("male", "female"):
            clusters[target][family] += 1
        assignments.append((s, target))

    assignments.sort(key=lambda item: item[0].span.start)
    dense: dict[int, int] = {}
    mentions: list[Mention] = []
    for s, cid in assignments:
        if cid not in dense:
            dense[cid] = len(dense)
        mentions.append(Mention(span=s.span, kind=s.kind, cluster=dense[cid]))
    return tuple(mentions)


def extract_events_heuristic(
    doc: Document,
    lexicon: Optional[VerbLexicon] = None,
    pronouns: Optional[PronounLexicon] = None,
    hints: Optional[NameGenderHints] = None,
) -> tuple[EventRecord, ...]:
    """One event per token found in the verb lexicon.

    The subject is the nearest name or pronoun occurrence preceding the
    trigger in the same sentence, the object the nearest following one;
    name occurrences contribute their full mention span. Tokens that are
    themselves name or pronoun occurrences never trigger events.
    """
    lexicon = lexicon or VerbLexicon.packaged()
    pronouns = pronouns or PronounLexicon.packaged()
    sightings = find_mentions(doc, pronouns, hints)

    by_sentence: dict[int, list[Span]] = {}
    claimed: set[int] = set()
    for s in sightings:
        sent = _sentence_index_at(doc, s.span.start)
        by_sentence.setdefault(sent, []).append(s.span)
        claimed.add(s.span.start)

    events: list[EventRecord] = []
    for tok in doc.tokens:
        if any(span.start <= tok.span.start < span.end for span in by_sentence.get(tok.sentence_index, ())):
            continue
        lemma = lexicon.lookup(tok.surface)
        if lemma is None:
            continue
        anchors = by_sentence.get(tok.sentence_index, [])
        subject = max(
            (a for a in anchors if a.start < tok.span.start),
            key=lambda a: a.start,
            default=None,
        )
        obj = min(
            (a for a in anchors if a.start >= tok.span.end),
            key=lambda a: a.start,
            default=None,
        )
        events.append(
            EventRecord(
                event_id=len(events),
                trigger=tok.span,
                lemma=lemma,
                subject=None if subject is None else Argument(span=subject),
                object=None if obj is None else Argument(span=obj),
                sentence_index=tok.sentence_index,
            )
        )
    return tuple(events)


def _sentence_index_at(doc: Document, offset: int) -> int:
    for i, sent in enumerate(doc.sentences):
        if sent.start <= offset < sent.end:
            return i
    return 0


def label_pairs_sequential(events: Sequence[EventRecord]) -> tuple[TemporalLabel, ...]:
    """Label every adjacent pair (i, i+1) BEFORE: events earlier in the
    text are assumed temporally earlier."""
    ids = [ev.event_id for ev in events]
    return tuple(
        TemporalLabel(left=a, right=b, relation=RelationValue.BEFORE)
        for a, b in zip(ids, ids[1:])
    )


def label_pairs_random(events: Sequence[EventRecord], seed: int) -> tuple[TemporalLabel, ...]:
    """Label each adjacent pair BEFORE or AFTER uniformly at random.

    The generator is pinned to PCG64 so a given seed reproduces the exact
    same labels on every platform.
    """
    ids = [ev.event_id for ev in events]
    if len(ids) < 2:
        return ()
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.integers(0, 2, size=len(ids) - 1)
    return tuple(
        TemporalLabel(
            left=a,
            right=b,
            relation=RelationValue.BEFORE if d == 0 else RelationValue.AFTER,
        )
        for (a, b), d in zip(zip(ids, ids[1:]), draws)
    )
