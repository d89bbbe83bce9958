"""Pydantic models for every request and response the service exchanges.

These are the published wire schemas: the reader UI and any other client
can validate payloads against them, and the test suite validates pipeline
output the same way. Spans travel as [start, end] pairs, matching the
annotation-bundle interchange format.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

SpanPair = tuple[int, int]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TokenModel(StrictModel):
    span: SpanPair
    surface: str
    sentence_index: int


class DocumentModel(StrictModel):
    id: str
    text: str
    tokens: list[TokenModel]
    sentences: list[SpanPair]


class ArgumentModel(StrictModel):
    span: SpanPair
    character_id: Optional[int]


class EventModel(StrictModel):
    event_id: int
    trigger: SpanPair
    lemma: str
    subject: Optional[ArgumentModel]
    object: Optional[ArgumentModel]
    sentence_index: int
    salience: Optional[float]


class CharacterModel(StrictModel):
    character_id: int
    cluster: int
    name: str
    name_mentions: int = Field(ge=0)
    pronoun_mentions: int = Field(ge=0)
    gender: Literal["FEMALE", "MALE", "GROUP", "UNKNOWN"]
    importance: Literal["PRIMARY", "SECONDARY", "TERTIARY"]
    first_offset: int


class ChainModel(StrictModel):
    event_ids: list[int]
    filter: str


class CharacterChainModel(StrictModel):
    character_id: int
    chain: ChainModel


class ChainsModel(StrictModel):
    all: ChainModel
    salient: ChainModel
    gender: dict[str, ChainModel]
    characters: list[CharacterChainModel]


class ContingencyModel(StrictModel):
    lemma: str
    a: float
    b: float
    c: float
    d: float
    corrected: bool


class PolarizedRowModel(StrictModel):
    lemma: str
    table: ContingencyModel
    odds_ratio: float
    log_odds: float


class ExcludedModel(StrictModel):
    group_subject_events: int
    unknown_subject_events: int
    unresolved_subject_events: int


class PolarizedReportModel(StrictModel):
    min_total: int
    rows: list[PolarizedRowModel]
    excluded: ExcludedModel


class ImportanceRowModel(StrictModel):
    character_id: int
    name: str
    name_mentions: int
    pronoun_mentions: int
    total: int
    tier: Literal["PRIMARY", "SECONDARY", "TERTIARY"]
    share: float


class StatsModel(StrictModel):
    polarized: PolarizedReportModel
    importance: list[ImportanceRowModel]


class SalienceConfigModel(StrictModel):
    trigger_weight: float = 1.0
    argument_weight: float = 0.5
    mode: Literal["fraction", "threshold"] = "fraction"
    fraction: float = 0.25
    threshold: Optional[float] = None


class ImportanceThresholdsModel(StrictModel):
    primary_share: float = 0.10
    secondary_share: float = 0.02


class PipelineConfigModel(StrictModel):
    annotator: Literal["heuristic", "bundle"] = "heuristic"
    temporal_source: Literal["sequential", "random", "bundle"] = "sequential"
    random_seed: int = 0
    salience: SalienceConfigModel = Field(default_factory=SalienceConfigModel)
    importance: ImportanceThresholdsModel = Field(default_factory=ImportanceThresholdsModel)
    min_pair_total: int = 5
    top_characters: int = 5
    label_salient_only: bool = False
    include_objects_in_stats: bool = False
    idf_path: Optional[str] = None
    verb_lexicon_path: Optional[str] = None
    pronoun_lexicon_path: Optional[str] = None
    name_hints_path: Optional[str] = None
    abbreviations_path: Optional[str] = None


class DeletedEdgeModel(StrictModel):
    source: int
    target: int
    confidence: Optional[float]
    label_index: Optional[int]


class ProvenanceModel(StrictModel):
    config: PipelineConfigModel
    deleted_edges: list[DeletedEdgeModel]
    warnings: list[str]


class ProcessedStoryModel(StrictModel):
    """The full processed-story payload returned by GET /stories/{id}."""

    story_id: str
    document: DocumentModel
    events: list[EventModel]
    characters: list[CharacterModel]
    chains: ChainsModel
    stats: StatsModel
    provenance: ProvenanceModel


class SubmitStoryRequest(StrictModel):
    """POST /stories body: the raw story text, an optional annotation
    bundle (kept as a raw object so the ingest parser can report precise
    field paths), and an optional pipeline configuration."""

    text: str = Field(min_length=1)
    bundle: Optional[dict] = None
    config: Optional[PipelineConfigModel] = None


class SubmitStoryResponse(StrictModel):
    id: str
    status: Literal["pending", "done", "failed"]


class StatusResponse(StrictModel):
    id: str
    status: Literal["pending", "done", "failed"]
    error: Optional[str] = None
    stage: Optional[str] = None


class StoryListResponse(StrictModel):
    ids: list[str]


class ChainResponse(StrictModel):
    id: str
    filter: str
    event_ids: list[int]


class ErrorBody(StrictModel):
    error: str
    stage: Optional[str] = None
    detail: Optional[str] = None
