"""Command-line interface: a thin layer over the core package.

Subcommands mirror the pipeline's natural operations: process a story file,
train an idf dictionary over a corpus directory, evaluate temporal
predictions or judgment sheets, serve the HTTP API, and export stored
stories.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .evaluation import (
    EVAL_LABELS,
    judgment_precision,
    load_judgment_sheets,
    load_label_file,
    micro_macro_f1,
    pair_labeled_set,
    per_label_prf,
)
from .ingest import segment_text
from .pipeline import PipelineConfig, process_story
from .salience import train_idf
from .store import StoryNotFoundError, StoryStore


@click.group()
def main() -> None:
    """Narrative event-chain extraction and analytics."""


def _load_config(path: str | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    return PipelineConfig.from_jsonable(json.loads(Path(path).read_text(encoding="utf-8")))


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--bundle", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Annotation bundle JSON to ingest instead of the heuristic annotators.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Pipeline configuration JSON.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the full processed story JSON here.")
@click.option("--verb-lexicon", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--pronoun-lexicon", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--abbreviations", type=click.Path(exists=True, dir_okay=False), default=None)
def process(file: str, bundle: str | None, config_path: str | None, out: str | None,
            verb_lexicon: str | None, pronoun_lexicon: str | None,
            abbreviations: str | None) -> None:
    """Run the full pipeline over a story text file."""
    from dataclasses import replace

    cfg = _load_config(config_path)
    if verb_lexicon:
        cfg = replace(cfg, verb_lexicon_path=verb_lexicon)
    if pronoun_lexicon:
        cfg = replace(cfg, pronoun_lexicon_path=pronoun_lexicon)
    if abbreviations:
        cfg = replace(cfg, abbreviations_path=abbreviations)
    if bundle is not None and cfg.annotator != "bundle":
        cfg = replace(cfg, annotator="bundle", temporal_source="bundle")

    text = Path(file).read_text(encoding="utf-8")
    payload = Path(bundle).read_text(encoding="utf-8") if bundle else None
    story = process_story(text, payload, cfg)

    if out is not None:
        Path(out).write_bytes(story.canonical_bytes())
        click.echo(f"wrote {out}")
    click.echo(f"story {story.story_id}: {len(story.events)} events, "
               f"{len(story.characters)} characters, "
               f"{len(story.chains.salient.event_ids)} salient")
    for warning in story.provenance.warnings:
        click.echo(f"warning: {warning}", err=True)


@main.command("train-idf")
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def train_idf_command(directory: str, out: str) -> None:
    """Train an idf dictionary over every *.txt file in a directory."""
    paths = sorted(Path(directory).glob("*.txt"))
    if not paths:
        raise click.ClickException(f"no .txt files in {directory}")
    corpus = [
        segment_text(p.read_text(encoding="utf-8"), doc_id=p.stem) for p in paths
    ]
    dictionary = train_idf(corpus)
    dictionary.save(out)
    click.echo(f"trained on {dictionary.doc_count} documents, "
               f"{len(dictionary.entries)} stems -> {out}")


@main.group()
def eval() -> None:
    """Evaluation harness."""


@eval.command()
@click.option("--gold", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--pred", required=True, type=click.Path(exists=True, dir_okay=False))
def temporal(gold: str, pred: str) -> None:
    """Score predicted temporal labels against gold labels.

    Both files carry a temporal_labels array; pairs whose gold label is
    outside {BEFORE, AFTER} are excluded from scoring.
    """
    pairs = pair_labeled_set(load_label_file(gold), load_label_file(pred))
    from .evaluation import filter_scored

    scored = filter_scored(pairs)
    micro, macro = micro_macro_f1(pairs)
    click.echo(f"scored pairs: {len(scored)} of {len(pairs)} "
               f"({len(pairs) - len(scored)} gold-excluded)")
    for label in EVAL_LABELS:
        p, r, f1 = per_label_prf(scored, label)
        click.echo(f"{label.value:6s} precision {p:.3f}  recall {r:.3f}  f1 {f1:.3f}")
    click.echo(f"micro-F1 {micro:.3f}  macro-F1 {macro:.3f}")


@eval.command()
@click.argument("csv_file", type=click.Path(exists=True, dir_okay=False))
def judgments(csv_file: str) -> None:
    """Score human judgment sheets (CSV: dimension,item_id,correct)."""
    sheets = load_judgment_sheets(Path(csv_file).read_text(encoding="utf-8"))
    if not sheets:
        raise click.ClickException("no judgment rows found")
    for sheet in sheets:
        precision, count = judgment_precision(sheet)
        click.echo(f"{sheet.dimension:18s} precision {precision:.3f}  samples {count}")


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--store-dir", default="fabula_store", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--static-dir", default=None, type=click.Path(file_okay=False),
              help="Directory of built UI assets to serve at /ui.")
def serve(port: int, host: str, store_dir: str, static_dir: str | None) -> None:
    """Run the HTTP API server."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(store_dir, static_dir=static_dir), host=host, port=port)


@main.command()
@click.argument("story_id")
@click.option("--format", "fmt", default="json", show_default=True)
@click.option("--store-dir", default="fabula_store", show_default=True,
              type=click.Path(exists=True, file_okay=False))
def export(story_id: str, fmt: str, store_dir: str) -> None:
    """Print a stored story in the requested format."""
    if fmt != "json":
        raise click.ClickException(f"unsupported format {fmt!r} (only json)")
    store = StoryStore(store_dir)
    try:
        payload = store.load_bytes(story_id)
    except StoryNotFoundError:
        raise click.ClickException(f"no story with id {story_id!r}") from None
    sys.stdout.write(payload.decode("utf-8"))
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
