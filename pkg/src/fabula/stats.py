"""Story-level bias and importance statistics.

For every verb lemma, events are cross-classified against two character
groups (typically male vs female subjects) in a 2x2 contingency table, and
the association is summarized by the odds ratio. The Haldane-Anscombe
correction (add 0.5 to every cell) is applied only when some cell is zero,
so clean tables keep their exact ratios while degenerate ones stay finite.
Polarized-event rankings order lemmas by |ln OR|; importance tables
summarize characters by mention counts.

Group and unknown-gender subjects are excluded from the two-group tables
and reported separately: pretending a binary comparison covers them would
hide exactly the information the statistics exist to show.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .model import CharacterEntity, EventRecord, GenderLabel, ImportanceTier


class UndefinedGroupError(ValueError):
    """A contingency group contains no events, so no odds ratio exists."""


@dataclass(frozen=True)
class ContingencyTable:
    """2x2 event-by-group table for one lemma: a/b are group-A events with
    and without the lemma, c/d the same for group B. When corrected is
    True every cell already includes the +0.5 adjustment."""

    lemma: str
    a: float
    b: float
    c: float
    d: float
    corrected: bool = False

    def __post_init__(self) -> None:
        if min(self.a, self.b, self.c, self.d) < 0:
            raise ValueError("contingency cells must be non-negative")

    def swapped(self) -> "ContingencyTable":
        """The same table with the two groups exchanged."""
        return ContingencyTable(self.lemma, self.c, self.d, self.a, self.b, self.corrected)


def build_contingency(
    events: Iterable[EventRecord],
    group_a: Callable[[EventRecord], bool],
    group_b: Callable[[EventRecord], bool],
    lemma: str,
) -> ContingencyTable:
    """Count events into the 2x2 table; events matching neither predicate
    are excluded. Predicates are expected to be disjoint."""
    a = b = c = d = 0
    for ev in events:
        hit = ev.lemma == lemma
        if group_a(ev):
            if hit:
                a += 1
            else:
                b += 1
        elif group_b(ev):
            if hit:
                c += 1
            else:
                d += 1
    return ContingencyTable(lemma=lemma, a=a, b=b, c=c, d=d)


def apply_correction(table: ContingencyTable) -> ContingencyTable:
    """Haldane-Anscombe: add 0.5 to all four cells."""
    return ContingencyTable(
        table.lemma, table.a + 0.5, table.b + 0.5, table.c + 0.5, table.d + 0.5, corrected=True
    )


def odds_ratio(table: ContingencyTable) -> float:
    """(a/b) / (c/d), correcting the table first if any cell is zero.

    Always finite and positive; raises UndefinedGroupError when a whole
    group is empty.
    """
    if table.a + table.b == 0 or table.c + table.d == 0:
        raise UndefinedGroupError(
            f"group totals ({table.a + table.b}, {table.c + table.d}) must both be positive"
        )
    t = table
    if not t.corrected and min(t.a, t.b, t.c, t.d) == 0:
        t = apply_correction(t)
    return (t.a / t.b) / (t.c / t.d)


@dataclass(frozen=True)
class PolarizedRow:
    """One lemma's male-vs-female association: the table actually used
    (corrected when a zero cell forced it), its odds ratio, and ln OR
    (> 0 leans male, < 0 leans female under the default grouping)."""

    lemma: str
    table: ContingencyTable
    odds_ratio: float
    log_odds: float


@dataclass(frozen=True)
class PolarizedReport:
    rows: tuple[PolarizedRow, ...]
    min_total: int
    excluded_group_events: int
    excluded_unknown_events: int
    excluded_unresolved_events: int

    @property
    def male_polarized(self) -> tuple[PolarizedRow, ...]:
        return tuple(r for r in self.rows if r.log_odds > 0)

    @property
    def female_polarized(self) -> tuple[PolarizedRow, ...]:
        return tuple(r for r in self.rows if r.log_odds < 0)


def polarized_events(
    events: Sequence[EventRecord],
    characters: Sequence[CharacterEntity],
    min_total: int = 5,
    include_objects: bool = False,
) -> PolarizedReport:
    """Rank lemmas by gender polarization, most polarized first.

    An event belongs to a gender group through its subject's character
    (optionally also its object's). Lemmas occurring fewer than min_total
    times across the two groups are dropped: one-off events produce
    meaningless extreme ratios. Rows sort by |ln OR| descending, then
    total count descending, then lemma.
    """
    gender_of = {ch.character_id: ch.gender for ch in characters}

    def event_genders(ev: EventRecord) -> list[GenderLabel]:
        out = []
        args = [ev.subject] + ([ev.object] if include_objects else [])
        for arg in args:
            if arg is not None and arg.character_id is not None:
                label = gender_of.get(arg.character_id)
                if label is not None:
                    out.append(label)
        return out

    male_events: list[EventRecord] = []
    female_events: list[EventRecord] = []
    excluded_group = excluded_unknown = excluded_unresolved = 0
    for ev in events:
        genders = event_genders(ev)
        if GenderLabel.MALE in genders:
            male_events.append(ev)
        elif GenderLabel.FEMALE in genders:
            female_events.append(ev)
        elif GenderLabel.GROUP in genders:
            excluded_group += 1
        elif GenderLabel.UNKNOWN in genders:
            excluded_unknown += 1
        else:
            excluded_unresolved += 1

    counts: dict[str, tuple[int, int]] = {}
    for ev in male_events:
        m, f = counts.get(ev.lemma, (0, 0))
        counts[ev.lemma] = (m + 1, f)
    for ev in female_events:
        m, f = counts.get(ev.lemma, (0, 0))
        counts[ev.lemma] = (m, f + 1)

    rows: list[PolarizedRow] = []
    n_male, n_female = len(male_events), len(female_events)
    if n_male > 0 and n_female > 0:
        for lemma, (m, f) in counts.items():
            if m + f < min_total:
                continue
            table = ContingencyTable(lemma=lemma, a=m, b=n_male - m, c=f, d=n_female - f)
            if min(table.a, table.b, table.c, table.d) == 0:
                table = apply_correction(table)
            ratio = odds_ratio(table)
            rows.append(PolarizedRow(lemma, table, ratio, math.log(ratio)))

    rows.sort(key=lambda r: (-abs(r.log_odds), -(r.table.a + r.table.c), r.lemma))
    return PolarizedReport(
        rows=tuple(rows),
        min_total=min_total,
        excluded_group_events=excluded_group,
        excluded_unknown_events=excluded_unknown,
        excluded_unresolved_events=excluded_unresolved,
    )


@dataclass(frozen=True)
class ImportanceRow:
    character_id: int
    name: str
    name_mentions: int
    pronoun_mentions: int
    total: int
    tier: ImportanceTier
    share: float


def importance_table(entities: Sequence[CharacterEntity]) -> tuple[ImportanceRow, ...]:
    """Per-character mention summary, sorted by total mentions descending
    (earliest first appearance on ties)."""
    total_all = sum(e.total_mentions for e in entities)
    ranked = sorted(entities, key=lambda e: (-e.total_mentions, e.first_offset, e.character_id))
    return tuple(
        ImportanceRow(
            character_id=e.character_id,
            name=e.name,
            name_mentions=e.name_mentions,
            pronoun_mentions=e.pronoun_mentions,
            total=e.total_mentions,
            tier=e.importance,
            share=e.total_mentions / total_all if total_all else 0.0,
        )
        for e in ranked
    )
