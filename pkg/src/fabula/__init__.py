"""Fabula: narrative event-chain extraction and analytics.

Turns story text into temporally ordered event chains with character,
gender, salience, and bias statistics. External neural annotations enter
through a JSON bundle format; deterministic heuristic annotators make the
pipeline runnable with no models at all.
"""

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
    resolve_span,
    validate_document,
)
from .pipeline import PipelineConfig, ProcessedStory, process_story

__version__ = "0.1.0"

__all__ = [
    "Argument",
    "CharacterEntity",
    "Document",
    "EventChain",
    "EventRecord",
    "GenderLabel",
    "ImportanceTier",
    "Mention",
    "MentionKind",
    "PipelineConfig",
    "ProcessedStory",
    "RelationValue",
    "Span",
    "TemporalLabel",
    "Token",
    "__version__",
    "process_story",
    "resolve_span",
    "validate_document",
]
