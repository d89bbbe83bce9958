"""Event salience scoring via weighted tf-idf over stemmed trigger words.

An idf dictionary is trained once over a reference corpus of narratives;
each event is then scored by how distinctive its (stemmed) trigger and
argument head words are. High idf filters out generic events ("go",
"say"), while the tf factor rewards words that matter locally in the
analyzed story. The shipped ``idf_fairytale.json`` was trained with
``train_idf`` on the bundled mini-corpus under ``data/corpus/``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional

from .model import Document, EventRecord, Span

_VOWELS = frozenset("aeiou")


def _is_consonant(word: str, i: int) -> bool:
    c = word[i]
    if c in _VOWELS:
        return False
    if c == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem_part: str) -> int:
    # m in the [C](VC)^m[V] form of the stem
    m = 0
    prev_vowel = False
    for i in range(len(stem_part)):
        if _is_consonant(stem_part, i):
            if prev_vowel:
                m += 1
            prev_vowel = False
        else:
            prev_vowel = True
    return m


def _has_vowel(stem_part: str) -> bool:
    return any(not _is_consonant(stem_part, i) for i in range(len(stem_part)))


def _ends_double_consonant(word: str) -> bool:
    return len(word) >= 2 and word[-1] == word[-2] and _is_consonant(word, len(word) - 1)


def _ends_cvc(word: str) -> bool:
    # *o condition: ...consonant-vowel-consonant, final consonant not w/x/y
    if len(word) < 3:
        return False
    return (
        _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
        and word[-1] not in "wxy"
    )


_STEP2 = (
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
)
_STEP3 = (
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
)
_STEP4 = (
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
)
_STEP2_ORDERED = tuple(sorted(_STEP2, key=lambda p: -len(p[0])))
_STEP3_ORDERED = tuple(sorted(_STEP3, key=lambda p: -len(p[0])))
_STEP4_ORDERED = tuple(sorted(_STEP4, key=len, reverse=True))


def stem(word: str) -> str:
    """Porter-stem a word (input is lowercased first).

    This is the original published algorithm; as in the reference
    implementations, words of one or two letters are returned unchanged.
    """
    word = word.lower()
    if len(word) <= 2:
        return word

    # step 1a: plurals
    if word.endswith("sses"):
        word = word[:-2]
    elif word.endswith("ies"):
        word = word[:-2]
    elif word.endswith("ss"):
        pass
    elif word.endswith("s"):
        word = word[:-1]

    # step 1b: -eed / -ed / -ing
    cleanup = False
    if word.endswith("eed"):
        if _measure(word[:-3]) > 0:
            word = word[:-1]
    elif word.endswith("ed"):
        if _has_vowel(word[:-2]):
            word = word[:-2]
            cleanup = True
    elif word.endswith("ing"):
        if _has_vowel(word[:-3]):
            word = word[:-3]
            cleanup = True
    if cleanup:
        if word.endswith(("at", "bl", "iz")):
            word += "e"
        elif _ends_double_consonant(word) and word[-1] not in "lsz":
            word = word[:-1]
        elif _measure(word) == 1 and _ends_cvc(word):
            word += "e"

    # step 1c: terminal y
    if word.endswith("y") and _has_vowel(word[:-1]):
        word = word[:-1] + "i"

    # steps 2-4: suffix rewrites; within each step the longest matching
    # suffix is selected before its condition is tested
    for suffix, repl in _STEP2_ORDERED:
        if word.endswith(suffix):
            if _measure(word[: -len(suffix)]) > 0:
                word = word[: -len(suffix)] + repl
            break
    for suffix, repl in _STEP3_ORDERED:
        if word.endswith(suffix):
            if _measure(word[: -len(suffix)]) > 0:
                word = word[: -len(suffix)] + repl
            break
    for suffix in _STEP4_ORDERED:
        if word.endswith(suffix):
            stem_part = word[: -len(suffix)]
            if _measure(stem_part) > 1 and (suffix != "ion" or stem_part[-1:] in ("s", "t")):
                word = stem_part
            break

    # step 5a: terminal e
    if word.endswith("e"):
        stem_part = word[:-1]
        m = _measure(stem_part)
        if m > 1 or (m == 1 and not _ends_cvc(stem_part)):
            word = stem_part
    # step 5b: -ll
    if _measure(word) > 1 and _ends_double_consonant(word) and word.endswith("l"):
        word = word[:-1]

    return word


def doc_stems(doc: Document) -> list[str]:
    """Stems of the document's word tokens. Tokens without an alphabetic
    character (detached punctuation, bare numbers) are skipped."""
    return [
        stem(tok.surface)
        for tok in doc.tokens
        if any(ch.isalpha() for ch in tok.surface)
    ]


@dataclass(frozen=True)
class IdfEntry:
    df: int
    idf: float


@dataclass(frozen=True)
class IdfDictionary:
    """Smoothed inverse-document-frequency table over word stems.

    idf(stem) = ln((N + 1) / (df + 1)) + 1 where N is the corpus size;
    stems never seen in the corpus fall back to df = 0.
    """

    doc_count: int
    entries: Mapping[str, IdfEntry]

    def idf(self, stem_value: str) -> float:
        entry = self.entries.get(stem_value)
        df = entry.df if entry is not None else 0
        return math.log((self.doc_count + 1) / (df + 1)) + 1.0

    def to_jsonable(self) -> dict:
        return {
            "doc_count": self.doc_count,
            "entries": {
                s: {"df": e.df, "idf": e.idf} for s, e in sorted(self.entries.items())
            },
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "IdfDictionary":
        return cls(
            doc_count=data["doc_count"],
            entries={
                s: IdfEntry(df=rec["df"], idf=rec["idf"])
                for s, rec in data["entries"].items()
            },
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_jsonable(), indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: str | Path) -> "IdfDictionary":
        return cls.from_jsonable(json.loads(Path(path).read_text(encoding="utf-8")))


def train_idf(corpus: Iterable[Document]) -> IdfDictionary:
    """Count, per stem, how many corpus documents contain it, and derive
    the smoothed idf. Deterministic for a given corpus."""
    docs = list(corpus)
    if not docs:
        raise ValueError("cannot train an idf dictionary on an empty corpus")
    df: dict[str, int] = {}
    for doc in docs:
        for s in set(doc_stems(doc)):
            df[s] = df.get(s, 0) + 1
    n = len(docs)
    entries = {
        s: IdfEntry(df=count, idf=math.log((n + 1) / (count + 1)) + 1.0)
        for s, count in df.items()
    }
    return IdfDictionary(doc_count=n, entries=entries)


def bundled_idf() -> IdfDictionary:
    from ._data import read_data_file

    return IdfDictionary.from_jsonable(json.loads(read_data_file("idf_fairytale.json")))


@dataclass(frozen=True)
class SalienceConfig:
    """Weights and selection rule for salient-event filtering.

    The trigger outweighs arguments by default (the trigger defines the
    event; arguments only sharpen it). Selection keeps either the top
    fraction of events per document or everything above an absolute
    score threshold.
    """

    trigger_weight: float = 1.0
    argument_weight: float = 0.5
    mode: str = "fraction"  # "fraction" | "threshold"
    fraction: float = 0.25
    threshold: Optional[float] = None

    def __post_init__(self) -> None:
        if self.trigger_weight < 0 or self.argument_weight < 0:
            raise ValueError("salience weights must be non-negative")
        if self.mode not in ("fraction", "threshold"):
            raise ValueError(f"unknown selection mode {self.mode!r}")
        if self.mode == "fraction" and not 0.0 < self.fraction <= 1.0:
            raise ValueError(f"fraction {self.fraction} outside (0, 1]")
        if self.mode == "threshold" and self.threshold is None:
            raise ValueError("threshold mode requires a threshold value")

    def to_jsonable(self) -> dict:
        return {
            "trigger_weight": self.trigger_weight,
            "argument_weight": self.argument_weight,
            "mode": self.mode,
            "fraction": self.fraction,
            "threshold": self.threshold,
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "SalienceConfig":
        return cls(**data)


def _term_frequencies(doc: Document) -> dict[str, int]:
    counts: dict[str, int] = {}
    for s in doc_stems(doc):
        counts[s] = counts.get(s, 0) + 1
    return counts


def _argument_head(doc: Document, span: Span) -> Optional[str]:
    """Head word of an argument span: its last word token (English noun
    phrases are head-final)."""
    head = None
    for tok in doc.tokens:
        if tok.span.start >= span.end:
            break
        if tok.span.overlaps(span) and any(ch.isalpha() for ch in tok.surface):
            head = tok.surface
    return head


def salience_score(
    event: EventRecord,
    doc: Document,
    idf: IdfDictionary,
    cfg: SalienceConfig = SalienceConfig(),
    _tf: Optional[dict[str, int]] = None,
) -> float:
    """Weighted tf-idf of the event's stemmed trigger plus its argument
    head words; tf is the raw count of the stem among the document's
    stemmed word tokens."""
    tf = _term_frequencies(doc) if _tf is None else _tf
    trigger_stem = stem(doc.text[event.trigger.start : event.trigger.end])
    score = cfg.trigger_weight * tf.get(trigger_stem, 0) * idf.idf(trigger_stem)
    for arg in (event.subject, event.object):
        if arg is None:
            continue
        head = _argument_head(doc, arg.span)
        if head is None:
            continue
        head_stem = stem(head)
        score += cfg.argument_weight * tf.get(head_stem, 0) * idf.idf(head_stem)
    return score


def score_events(
    events: Iterable[EventRecord],
    doc: Document,
    idf: IdfDictionary,
    cfg: SalienceConfig = SalienceConfig(),
) -> tuple[EventRecord, ...]:
    """Return the events with their salience field filled in."""
    from dataclasses import replace

    tf = _term_frequencies(doc)
    return tuple(
        replace(ev, salience=salience_score(ev, doc, idf, cfg, _tf=tf))
        for ev in events
    )


def filter_salient(
    events: Iterable[EventRecord],
    cfg: SalienceConfig = SalienceConfig(),
) -> tuple[EventRecord, ...]:
    """Keep the salient subset of scored events, preserving textual order.

    Fraction mode retains the ceil(fraction * n) highest scores with ties
    broken toward earlier events; threshold mode keeps scores >= threshold.
    """
    ranked = list(events)
    if any(ev.salience is None for ev in ranked):
        raise ValueError("events must be scored before salience filtering")
    if not ranked:
        return ()
    if cfg.mode == "threshold":
        assert cfg.threshold is not None
        keep = {ev.event_id for ev in ranked if ev.salience >= cfg.threshold}
    else:
        k = math.ceil(cfg.fraction * len(ranked))
        by_score = sorted(ranked, key=lambda ev: (-ev.salience, ev.event_id))
        keep = {ev.event_id for ev in by_score[:k]}
    return tuple(ev for ev in ranked if ev.event_id in keep)
