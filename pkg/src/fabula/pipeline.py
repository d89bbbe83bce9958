"""End-to-end story processing.

The pipeline runs six stages in order: segment, annotate, characters,
salience, temporal, stats. Each stage reads and extends an explicit
PipelineState, and states serialize to JSON, so the stages can also be run
one at a time over persisted intermediates with a result identical to a
one-shot run. Processing is deterministic for a given (text, bundle,
config) triple, including the story id.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import serialize
from .characters import (
    ImportanceThresholds,
    assign_importance,
    attach_characters,
    build_characters,
    top_characters,
)
from .heuristics import (
    NameGenderHints,
    PronounLexicon,
    VerbLexicon,
    extract_events_heuristic,
    find_mentions,
    label_pairs_random,
    label_pairs_sequential,
    resolve_pronouns_heuristic,
)
from .ingest import merge_annotations, parse_annotation_bundle, segment_text
from .model import (
    CharacterEntity,
    Document,
    EventChain,
    EventRecord,
    GenderLabel,
    Mention,
    TemporalLabel,
)
from .salience import (
    IdfDictionary,
    SalienceConfig,
    bundled_idf,
    filter_salient,
    score_events,
)
from .stats import PolarizedReport, ImportanceRow, importance_table, polarized_events
from .temporal import (
    Edge,
    build_precedence_graph,
    chain_for_filter,
    collapse_labels,
    rank_events,
)
from ._data import packaged_lines, read_data_file

ANNOTATOR_MODES = ("heuristic", "bundle")
TEMPORAL_SOURCES = ("sequential", "random", "bundle")


class ConfigError(ValueError):
    """The pipeline configuration is inconsistent with its inputs."""


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage: str, cause: BaseException) -> None:
        super().__init__(f"stage {stage!r}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    """Everything that can vary between runs, so that provenance plus
    input text fully determine the output."""

    annotator: str = "heuristic"
    temporal_source: str = "sequential"
    random_seed: int = 0
    salience: SalienceConfig = field(default_factory=SalienceConfig)
    importance: ImportanceThresholds = field(default_factory=ImportanceThresholds)
    min_pair_total: int = 5
    top_characters: int = 5
    label_salient_only: bool = False
    include_objects_in_stats: bool = False
    idf_path: Optional[str] = None
    verb_lexicon_path: Optional[str] = None
    pronoun_lexicon_path: Optional[str] = None
    name_hints_path: Optional[str] = None
    abbreviations_path: Optional[str] = None

    def __post_init__(self) -> None:
        if self.annotator not in ANNOTATOR_MODES:
            raise ConfigError(f"annotator must be one of {ANNOTATOR_MODES}, got {self.annotator!r}")
        if self.temporal_source not in TEMPORAL_SOURCES:
            raise ConfigError(
                f"temporal_source must be one of {TEMPORAL_SOURCES}, got {self.temporal_source!r}"
            )
        if self.min_pair_total < 1:
            raise ConfigError("min_pair_total must be at least 1")
        if self.top_characters < 1:
            raise ConfigError("top_characters must be at least 1")

    def to_jsonable(self) -> dict:
        return {
            "annotator": self.annotator,
            "temporal_source": self.temporal_source,
            "random_seed": self.random_seed,
            "salience": self.salience.to_jsonable(),
            "importance": self.importance.to_jsonable(),
            "min_pair_total": self.min_pair_total,
            "top_characters": self.top_characters,
            "label_salient_only": self.label_salient_only,
            "include_objects_in_stats": self.include_objects_in_stats,
            "idf_path": self.idf_path,
            "verb_lexicon_path": self.verb_lexicon_path,
            "pronoun_lexicon_path": self.pronoun_lexicon_path,
            "name_hints_path": self.name_hints_path,
            "abbreviations_path": self.abbreviations_path,
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "PipelineConfig":
        data = dict(data)
        if "salience" in data:
            data["salience"] = SalienceConfig.from_jsonable(data["salience"])
        if "importance" in data:
            data["importance"] = ImportanceThresholds.from_jsonable(data["importance"])
        return cls(**data)


@dataclass(frozen=True)
class StoryChains:
    all: EventChain
    salient: EventChain
    gender: dict[str, EventChain]
    characters: tuple[tuple[int, EventChain], ...]  # (character_id, chain) in top-k order


@dataclass(frozen=True)
class StoryStats:
    polarized: PolarizedReport
    importance: tuple[ImportanceRow, ...]


@dataclass(frozen=True)
class Provenance:
    config: PipelineConfig
    deleted_edges: tuple[Edge, ...]
    warnings: tuple[str, ...]


@dataclass(frozen=True)
class ProcessedStory:
    story_id: str
    document: Document
    events: tuple[EventRecord, ...]
    characters: tuple[CharacterEntity, ...]
    chains: StoryChains
    stats: StoryStats
    provenance: Provenance

    def chain(self, filter_spec: str) -> EventChain:
        """Look up or derive the chain for any supported filter."""
        if filter_spec == "all":
            return self.chains.all
        if filter_spec == "salient":
            return self.chains.salient
        if filter_spec.startswith("gender:"):
            value = filter_spec.split(":", 1)[1]
            if value in self.chains.gender:
                return self.chains.gender[value]
        for cid, chain in self.chains.characters:
            if filter_spec == f"character:{cid}":
                return chain
        return chain_for_filter(
            self.chains.all,
            self.events,
            filter_spec,
            characters=self.characters,
            salient_ids=frozenset(self.chains.salient.event_ids),
        )

    def to_jsonable(self) -> dict:
        return {
            "story_id": self.story_id,
            "document": serialize.document_to_json(self.document),
            "events": [serialize.event_to_json(e) for e in self.events],
            "characters": [serialize.character_to_json(c) for c in self.characters],
            "chains": {
                "all": serialize.chain_to_json(self.chains.all),
                "salient": serialize.chain_to_json(self.chains.salient),
                "gender": {
                    g: serialize.chain_to_json(ch) for g, ch in self.chains.gender.items()
                },
                "characters": [
                    {"character_id": cid, "chain": serialize.chain_to_json(ch)}
                    for cid, ch in self.chains.characters
                ],
            },
            "stats": {
                "polarized": serialize.polarized_report_to_json(self.stats.polarized),
                "importance": [serialize.importance_row_to_json(r) for r in self.stats.importance],
            },
            "provenance": {
                "config": self.provenance.config.to_jsonable(),
                "deleted_edges": [serialize.edge_to_json(e) for e in self.provenance.deleted_edges],
                "warnings": list(self.provenance.warnings),
            },
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "ProcessedStory":
        chains = data["chains"]
        return cls(
            story_id=data["story_id"],
            document=serialize.document_from_json(data["document"]),
            events=tuple(serialize.event_from_json(e) for e in data["events"]),
            characters=tuple(serialize.character_from_json(c) for c in data["characters"]),
            chains=StoryChains(
                all=serialize.chain_from_json(chains["all"]),
                salient=serialize.chain_from_json(chains["salient"]),
                gender={g: serialize.chain_from_json(ch) for g, ch in chains["gender"].items()},
                characters=tuple(
                    (rec["character_id"], serialize.chain_from_json(rec["chain"]))
                    for rec in chains["characters"]
                ),
            ),
            stats=StoryStats(
                polarized=serialize.polarized_report_from_json(data["stats"]["polarized"]),
                importance=tuple(
                    serialize.importance_row_from_json(r) for r in data["stats"]["importance"]
                ),
            ),
            provenance=Provenance(
                config=PipelineConfig.from_jsonable(data["provenance"]["config"]),
                deleted_edges=tuple(
                    serialize.edge_from_json(e) for e in data["provenance"]["deleted_edges"]
                ),
                warnings=tuple(data["provenance"]["warnings"]),
            ),
        )

    def canonical_bytes(self) -> bytes:
        return serialize.canonical_json(self.to_jsonable()).encode("utf-8")


def story_id_for(text: str, bundle: Optional[dict], config: PipelineConfig) -> str:
    digest = hashlib.sha256(
        serialize.canonical_json(
            {"text": text, "bundle": bundle, "config": config.to_jsonable()}
        ).encode("utf-8")
    ).hexdigest()
    return f"story-{digest[:12]}"


@dataclass
class PipelineState:
    """Mutable working state passed between stages; fully serializable so
    stages can run over persisted intermediates."""

    text: str
    bundle: Optional[dict]
    config: PipelineConfig
    completed: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    doc: Optional[Document] = None
    events: tuple[EventRecord, ...] = ()
    mentions: tuple[Mention, ...] = ()
    bundle_labels: tuple[TemporalLabel, ...] = ()
    characters: tuple[CharacterEntity, ...] = ()
    salient_ids: tuple[int, ...] = ()
    global_chain: Optional[EventChain] = None
    deleted_edges: tuple[Edge, ...] = ()
    salient_chain: Optional[EventChain] = None
    gender_chains: dict[str, EventChain] = field(default_factory=dict)
    character_chains: tuple[tuple[int, EventChain], ...] = ()
    polarized: Optional[PolarizedReport] = None
    importance: tuple[ImportanceRow, ...] = ()

    def to_jsonable(self) -> dict:
        return {
            "text": self.text,
            "bundle": self.bundle,
            "config": self.config.to_jsonable(),
            "completed": list(self.completed),
            "warnings": list(self.warnings),
            "doc": None if self.doc is None else serialize.document_to_json(self.doc),
            "events": [serialize.event_to_json(e) for e in self.events],
            "mentions": [serialize.mention_to_json(m) for m in self.mentions],
            "bundle_labels": [serialize.label_to_json(lb) for lb in self.bundle_labels],
            "characters": [serialize.character_to_json(c) for c in self.characters],
            "salient_ids": list(self.salient_ids),
            "global_chain": None
            if self.global_chain is None
            else serialize.chain_to_json(self.global_chain),
            "deleted_edges": [serialize.edge_to_json(e) for e in self.deleted_edges],
            "salient_chain": None
            if self.salient_chain is None
            else serialize.chain_to_json(self.salient_chain),
            "gender_chains": {
                g: serialize.chain_to_json(ch) for g, ch in self.gender_chains.items()
            },
            "character_chains": [
                {"character_id": cid, "chain": serialize.chain_to_json(ch)}
                for cid, ch in self.character_chains
            ],
            "polarized": None
            if self.polarized is None
            else serialize.polarized_report_to_json(self.polarized),
            "importance": [serialize.importance_row_to_json(r) for r in self.importance],
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "PipelineState":
        return cls(
            text=data["text"],
            bundle=data["bundle"],
            config=PipelineConfig.from_jsonable(data["config"]),
            completed=list(data["completed"]),
            warnings=list(data["warnings"]),
            doc=None if data["doc"] is None else serialize.document_from_json(data["doc"]),
            events=tuple(serialize.event_from_json(e) for e in data["events"]),
            mentions=tuple(serialize.mention_from_json(m) for m in data["mentions"]),
            bundle_labels=tuple(serialize.label_from_json(lb) for lb in data["bundle_labels"]),
            characters=tuple(serialize.character_from_json(c) for c in data["characters"]),
            salient_ids=tuple(data["salient_ids"]),
            global_chain=None
            if data["global_chain"] is None
            else serialize.chain_from_json(data["global_chain"]),
            deleted_edges=tuple(serialize.edge_from_json(e) for e in data["deleted_edges"]),
            salient_chain=None
            if data["salient_chain"] is None
            else serialize.chain_from_json(data["salient_chain"]),
            gender_chains={
                g: serialize.chain_from_json(ch) for g, ch in data["gender_chains"].items()
            },
            character_chains=tuple(
                (rec["character_id"], serialize.chain_from_json(rec["chain"]))
                for rec in data["character_chains"]
            ),
            polarized=None
            if data["polarized"] is None
            else serialize.polarized_report_from_json(data["polarized"]),
            importance=tuple(
                serialize.importance_row_from_json(r) for r in data["importance"]
            ),
        )


def _stage_segment(state: PipelineState) -> None:
    if state.config.abbreviations_path is not None:
        abbreviations = frozenset(
            line.strip().lower()
            for line in read_data_file("abbreviations.txt", state.config.abbreviations_path).splitlines()
            if line.strip()
        )
    else:
        abbreviations = packaged_lines("abbreviations.txt")
    state.doc = segment_text(state.text, doc_id="story", abbreviations=abbreviations)


def _stage_annotate(state: PipelineState) -> None:
    assert state.doc is not None
    cfg = state.config
    collect = state.warnings.append
    if cfg.annotator == "bundle":
        bundle = parse_annotation_bundle(state.bundle, state.doc, on_warning=collect)
        merged = merge_annotations(state.doc, bundle, on_warning=collect)
        state.events = merged.events
        state.mentions = merged.mentions
        state.bundle_labels = merged.labels
    else:
        pronouns = PronounLexicon.packaged(cfg.pronoun_lexicon_path)
        verbs = VerbLexicon.packaged(cfg.verb_lexicon_path)
        hints = NameGenderHints.packaged(cfg.name_hints_path)
        sightings = find_mentions(state.doc, pronouns, hints)
        state.mentions = resolve_pronouns_heuristic(state.doc, sightings, pronouns, hints)
        state.events = extract_events_heuristic(state.doc, verbs, pronouns, hints)
        state.bundle_labels = ()


def _stage_characters(state: PipelineState) -> None:
    assert state.doc is not None
    pronouns = PronounLexicon.packaged(state.config.pronoun_lexicon_path)
    entities = build_characters(state.doc, state.mentions, pronouns)
    state.characters = assign_importance(entities, state.config.importance)
    state.events = attach_characters(state.events, state.mentions, state.characters)


def _stage_salience(state: PipelineState) -> None:
    assert state.doc is not None
    cfg = state.config
    idf = bundled_idf() if cfg.idf_path is None else IdfDictionary.load(cfg.idf_path)
    state.events = score_events(state.events, state.doc, idf, cfg.salience)
    state.salient_ids = tuple(
        ev.event_id for ev in filter_salient(state.events, cfg.salience)
    )


def _stage_temporal(state: PipelineState) -> None:
    cfg = state.config
    if cfg.temporal_source == "bundle":
        labels = state.bundle_labels
    else:
        subset = (
            [ev for ev in state.events if ev.event_id in set(state.salient_ids)]
            if cfg.label_salient_only
            else list(state.events)
        )
        if cfg.temporal_source == "sequential":
            labels = label_pairs_sequential(subset)
        else:
            labels = label_pairs_random(subset, cfg.random_seed)

    graph = build_precedence_graph(state.events, collapse_labels(labels))
    chain, deleted = rank_events(graph)
    state.global_chain = chain
    state.deleted_edges = deleted

    salient = frozenset(state.salient_ids)
    state.salient_chain = chain_for_filter(
        chain, state.events, "salient", state.characters, salient
    )
    state.gender_chains = {
        g.value: chain_for_filter(
            chain, state.events, f"gender:{g.value}", state.characters, salient
        )
        for g in GenderLabel
    }
    tops = (
        top_characters(state.characters, cfg.top_characters) if state.characters else ()
    )
    state.character_chains = tuple(
        (
            c.character_id,
            chain_for_filter(
                chain, state.events, f"character:{c.character_id}", state.characters, salient
            ),
        )
        for c in tops
    )


def _stage_stats(state: PipelineState) -> None:
    cfg = state.config
    state.polarized = polarized_events(
        state.events,
        state.characters,
        min_total=cfg.min_pair_total,
        include_objects=cfg.include_objects_in_stats,
    )
    state.importance = importance_table(state.characters)


PIPELINE_STAGES: tuple[tuple[str, Callable[[PipelineState], None]], ...] = (
    ("segment", _stage_segment),
    ("annotate", _stage_annotate),
    ("characters", _stage_characters),
    ("salience", _stage_salience),
    ("temporal", _stage_temporal),
    ("stats", _stage_stats),
)

STAGE_NAMES = tuple(name for name, _ in PIPELINE_STAGES)


def initial_state(
    text: str,
    bundle: Optional[str | bytes | dict] = None,
    config: Optional[PipelineConfig] = None,
) -> PipelineState:
    config = config or PipelineConfig()
    needs_bundle = config.annotator == "bundle" or config.temporal_source == "bundle"
    if needs_bundle and bundle is None:
        raise ConfigError(
            f"annotator={config.annotator!r} / temporal_source={config.temporal_source!r} "
            "requires an annotation bundle"
        )
    if config.temporal_source == "bundle" and config.annotator != "bundle":
        raise ConfigError(
            "temporal_source 'bundle' requires annotator 'bundle' (label ordinals "
            "reference bundle frames)"
        )
    if isinstance(bundle, (str, bytes)):
        try:
            bundle = json.loads(bundle)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bundle payload is not valid JSON: {exc}") from exc
    return PipelineState(text=text, bundle=bundle, config=config)


def run_stage(name: str, state: PipelineState) -> PipelineState:
    """Run one named stage over a state, enforcing stage order."""
    names = [n for n, _ in PIPELINE_STAGES]
    if name not in names:
        raise ValueError(f"unknown stage {name!r}; stages are {names}")
    expected = names[len(state.completed)] if len(state.completed) < len(names) else None
    if name != expected:
        raise ValueError(
            f"stage {name!r} cannot run now; completed={state.completed}, expected {expected!r}"
        )
    fn = dict(PIPELINE_STAGES)[name]
    try:
        fn(state)
    except Exception as exc:
        raise StageError(name, exc) from exc
    state.completed.append(name)
    return state


def assemble(state: PipelineState) -> ProcessedStory:
    if list(state.completed) != list(STAGE_NAMES):
        raise ValueError(f"pipeline incomplete: ran {state.completed}")
    assert state.doc is not None
    assert state.global_chain is not None
    assert state.salient_chain is not None
    assert state.polarized is not None
    return ProcessedStory(
        story_id=story_id_for(state.text, state.bundle, state.config),
        document=state.doc,
        events=state.events,
        characters=state.characters,
        chains=StoryChains(
            all=state.global_chain,
            salient=state.salient_chain,
            gender=dict(state.gender_chains),
            characters=state.character_chains,
        ),
        stats=StoryStats(polarized=state.polarized, importance=state.importance),
        provenance=Provenance(
            config=state.config,
            deleted_edges=state.deleted_edges,
            warnings=tuple(state.warnings),
        ),
    )


def process_story(
    text: str,
    bundle: Optional[str | bytes | dict] = None,
    config: Optional[PipelineConfig] = None,
) -> ProcessedStory:
    """Run the whole pipeline over one story."""
    state = initial_state(text, bundle, config)
    for name, _ in PIPELINE_STAGES:
        state = run_stage(name, state)
    return assemble(state)
