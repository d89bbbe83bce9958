"""Loaders for the data files shipped inside the package."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional


def _read_packaged(name: str) -> str:
    return (resources.files("fabula") / "data" / name).read_text(encoding="utf-8")


def read_data_file(name: str, override: Optional[str | Path] = None) -> str:
    """Read a packaged data file, or the override path when given."""
    if override is not None:
        return Path(override).read_text(encoding="utf-8")
    return _read_packaged(name)


def parse_tsv_pairs(content: str) -> dict[str, str]:
    """Parse `surface<TAB>value` lines; blank lines and #-comments ignored."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(content.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ValueError(f"malformed lexicon line {lineno}: {line!r}")
        out[parts[0].lower()] = parts[1]
    return out


@lru_cache(maxsize=None)
def packaged_pairs(name: str) -> dict[str, str]:
    return parse_tsv_pairs(_read_packaged(name))


@lru_cache(maxsize=None)
def packaged_lines(name: str) -> frozenset[str]:
    return frozenset(
        line.strip().lower()
        for line in _read_packaged(name).splitlines()
        if line.strip() and not line.startswith("#")
    )


def sample_story_text() -> str:
    return _read_packaged("sample_story.txt")


def corpus_texts() -> dict[str, str]:
    """The bundled mini-corpus used to train the shipped idf dictionary."""
    root = resources.files("fabula") / "data" / "corpus"
    return {
        entry.name: entry.read_text(encoding="utf-8")
        for entry in sorted(root.iterdir(), key=lambda e: e.name)
        if entry.name.endswith(".txt")
    }
