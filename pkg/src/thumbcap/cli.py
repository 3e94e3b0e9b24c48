"""Command-line entry point.

Subcommands are thin orchestrations of the library modules. Exit codes:
0 success, 1 operational error (endpoint down, bad data, missing files),
2 usage error (click's own convention for bad flags/arguments).
"""
from __future__ import annotations

import functools
import json
import logging
import sys
from pathlib import Path

import click
import numpy as np

from . import featstore, humeval, retrieval, splits, training
from .audiofeat import featurize_audio
from .config import AppConfig, load_config
from .errors import (
    InsufficientData,
    MissingFeatures,
    ThumbcapError,
)
from .lvlm import (
    ClientConfig,
    GenerationRequest,
    LVLMClient,
    MockClient,
    caption_request,
    generate_caption_record,
    thumbnail_url,
)
from .model import ModelParams
from .parsing import parse_sections, to_caption_record
from .records import (
    caption_length_stats,
    load_records,
    write_records,
)
from .retrieval import GenreMetrics, RetrievalReport, macro_average
from .service import ServiceState, create_app, load_caption_sets
from .textfeat import featurize_text
from .wavio import decode_wav

log = logging.getLogger(__name__)


def operational(fn):
    """Map library errors to exit code 1 with a one-line message."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ThumbcapError, OSError, json.JSONDecodeError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON config file; env vars override it.")
@click.option("--verbose", is_flag=True, help="Enable debug logging.")
@click.pass_context
def cli(ctx, config_path, verbose):
    """Cross-modal music caption and retrieval workbench."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        ctx.obj = load_config(config_path)
    except (ThumbcapError, OSError, json.JSONDecodeError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


def _make_client(cfg: AppConfig, mock_dir, endpoint):
    if mock_dir:
        return MockClient(mock_dir)
    ep = cfg.endpoint
    base_url = endpoint or ep.base_url
    return LVLMClient(ClientConfig(
        base_url=base_url, timeout=ep.timeout, max_attempts=ep.max_attempts,
        backoff_base=ep.backoff_base, concurrency=ep.concurrency,
    ))


@cli.command()
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Manifest JSONL with youtube_id, genre, optional image_url.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--mock", "mock_dir", type=click.Path(exists=True, file_okay=False),
              default=None, help="Serve canned generations from this directory.")
@click.option("--endpoint", default=None, help="Endpoint base URL override.")
@click.option("--strict/--lenient", "strict", default=False,
              help="Strict mode exits 1 if any item fails; lenient skips with a warning.")
@click.pass_obj
@operational
def caption(cfg: AppConfig, input_path, out_path, mock_dir, endpoint, strict):
    """Generate caption records for every manifest row."""
    client = _make_client(cfg, mock_dir, endpoint)
    rows = []
    with open(input_path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    records, failures = [], 0
    for row in rows:
        youtube_id = str(row["youtube_id"])
        genre = str(row["genre"])
        try:
            if row.get("image_url"):
                req = GenerationRequest(
                    prompt=caption_request(youtube_id).prompt,
                    model_id=cfg.endpoint.model_id,
                    image_url=str(row["image_url"]),
                )
                parsed = parse_sections(client.generate(req))
                from .lvlm import watch_url
                rec = to_caption_record(parsed, youtube_id=youtube_id,
                                        url=watch_url(youtube_id), genre=genre)
            else:
                rec = generate_caption_record(client, youtube_id, genre)
            records.append(rec)
        except (ThumbcapError, ValueError, KeyError) as exc:
            failures += 1
            click.echo(f"warning: {youtube_id}: {exc}", err=True)
    n = write_records(out_path, records)
    click.echo(f"wrote {n} records to {out_path} ({failures} failed)")
    if failures and strict:
        sys.exit(1)


@cli.command()
@click.option("--dataset", "dataset_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--audio-dir", required=True, type=click.Path(exists=True, file_okay=False),
              help="Directory holding {youtube_id}.wav files.")
@click.option("--out-text", required=True, type=click.Path(dir_okay=False))
@click.option("--out-audio", required=True, type=click.Path(dir_okay=False))
@click.option("--allow-missing", is_flag=True,
              help="Skip records without a WAV instead of failing.")
@click.pass_obj
@operational
def featurize(cfg: AppConfig, dataset_path, audio_dir, out_text, out_audio,
              allow_missing):
    """Hash captions and extract audio features into aligned stores."""
    records = load_records(dataset_path, "caption")
    audio_dir = Path(audio_dir)
    ids, text_rows, audio_rows = [], [], []
    for rec in records:
        wav = audio_dir / f"{rec.youtube_id}.wav"
        if not wav.is_file():
            if allow_missing:
                click.echo(f"warning: no audio for {rec.youtube_id}, skipped", err=True)
                continue
            raise MissingFeatures(rec.youtube_id)
        pcm, _ = decode_wav(wav, target_rate=cfg.audio_featurizer.sample_rate)
        audio_rows.append(featurize_audio(pcm, cfg.audio_featurizer))
        text_rows.append(featurize_text(rec.caption, cfg.text_featurizer))
        ids.append(rec.youtube_id)
    if not ids:
        raise InsufficientData("no records could be featurized")
    featstore.write_features(out_text, ids, np.vstack(text_rows))
    featstore.write_features(out_audio, ids, np.vstack(audio_rows))
    click.echo(f"featurized {len(ids)} records -> {out_text}, {out_audio}")


def _aligned_features(text_path, audio_path):
    text_ids, text_mat = featstore.read_features(text_path)
    audio_by_id = featstore.features_by_id(audio_path)
    ids = [i for i in text_ids if i in audio_by_id]
    if len(ids) < 2:
        raise InsufficientData(
            f"only {len(ids)} ids common to {text_path} and {audio_path}")
    pos = {yid: k for k, yid in enumerate(text_ids)}
    text = text_mat[[pos[i] for i in ids]]
    audio = np.vstack([audio_by_id[i] for i in ids])
    return ids, text, audio


@cli.command()
@click.option("--text", "text_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--audio", "audio_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--loss-csv", default=None, type=click.Path(dir_okay=False),
              help="Loss history CSV (default: checkpoint path + .loss.csv).")
@click.option("--epochs", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--embed-dim", type=int, default=None)
@click.option("--hidden-dim", type=int, default=None)
@click.option("--learning-rate", type=float, default=None)
@click.option("--optimizer", type=click.Choice(["adam", "sgd"]), default=None)
@click.option("--seed", type=int, default=None)
@click.pass_obj
@operational
def train(cfg: AppConfig, text_path, audio_path, out_path, loss_csv, **overrides):
    """Fit the dual encoder on aligned feature stores."""
    tc = cfg.train
    for key, value in overrides.items():
        if value is not None:
            setattr(tc, key, value)
    ids, text, audio = _aligned_features(text_path, audio_path)
    click.echo(f"training on {len(ids)} aligned pairs "
               f"(text dim {text.shape[1]}, audio dim {audio.shape[1]})")
    result = training.train(
        text, audio, tc,
        on_epoch=lambda e, l: click.echo(f"epoch {e}: loss {l:.4f}", err=True),
    )
    training.save_checkpoint(out_path, result.params)
    loss_csv = loss_csv or f"{out_path}.loss.csv"
    training.write_loss_history(loss_csv, result.loss_history)
    click.echo(f"final loss {result.final_loss:.4f}; wrote {out_path} and {loss_csv}")


def _load_eval_inputs(cfg, checkpoint, text_path, audio_path, dataset_path):
    params = training.load_checkpoint(checkpoint)
    ids, text, audio = _aligned_features(text_path, audio_path)
    genre_by_id = {r.youtube_id: r.genre
                   for r in load_records(dataset_path, "caption")}
    missing = [i for i in ids if i not in genre_by_id]
    if missing:
        raise MissingFeatures(missing[0])
    genres = [genre_by_id[i] for i in ids]
    index = retrieval.build_index(params, ids, audio, genres=genres)
    return params, index, ids, text, genres


def _fixture_rows(path):
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    rows = payload["rows"] if isinstance(payload, dict) else payload
    return [
        GenreMetrics(genre=r["genre"], n=int(r["n"]), recall_at_1=float(r["r1"]),
                     recall_at_5=float(r["r5"]), recall_at_10=float(r["r10"]),
                     med_rank=float(r["medr"]))
        for r in rows
    ]


@cli.command("eval")
@click.option("--fixtures", "fixtures_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Macro-average published per-genre rows instead of running a model.")
@click.option("--checkpoint", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--text", "text_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--audio", "audio_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--dataset", "dataset_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--per-genre-pool", is_flag=True,
              help="Rank each query only against items of its own genre.")
@click.option("--json-out", default=None, type=click.Path(dir_okay=False))
@click.pass_obj
@operational
def eval_cmd(cfg: AppConfig, fixtures_path, checkpoint, text_path, audio_path,
             dataset_path, per_genre_pool, json_out):
    """Per-genre retrieval metrics with a macro-average row."""
    if fixtures_path:
        per = _fixture_rows(fixtures_path)
        report = RetrievalReport(per_genre=per, macro=macro_average(per),
                                 pooling="published")
    else:
        needed = {"--checkpoint": checkpoint, "--text": text_path,
                  "--audio": audio_path, "--dataset": dataset_path}
        missing = [k for k, v in needed.items() if not v]
        if missing:
            raise click.UsageError(f"need {' '.join(missing)} (or --fixtures)")
        params, index, ids, text, genres = _load_eval_inputs(
            cfg, checkpoint, text_path, audio_path, dataset_path)
        report = retrieval.evaluate(params, index, ids, text, genres,
                                    per_genre_pool=per_genre_pool)
    click.echo(report.render())
    if json_out:
        with open(json_out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
        click.echo(f"wrote {json_out}")


@cli.command()
@click.option("--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--audio", "audio_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--dataset", "dataset_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--query", required=True)
@click.option("-k", type=int, default=9, show_default=True)
@click.option("--genre", default=None, help="Restrict candidates to one genre.")
@click.pass_obj
@operational
def search(cfg: AppConfig, checkpoint, audio_path, dataset_path, query, k, genre):
    """Rank clips for a free-text query."""
    params = training.load_checkpoint(checkpoint)
    audio_ids, audio = featstore.read_features(audio_path)
    recs = {r.youtube_id: r for r in load_records(dataset_path, "caption")}
    genres = [recs[i].genre if i in recs else "" for i in audio_ids]
    index = retrieval.build_index(params, audio_ids, audio, genres=genres)
    feats = featurize_text(query, cfg.text_featurizer)
    hits = retrieval.search(params, index, feats, k=k, genre_filter=genre)
    if not hits:
        click.echo("no results")
        return
    for rank, hit in enumerate(hits, start=1):
        rec = recs.get(hit.youtube_id)
        caption = (rec.caption[:60] + "...") if rec and len(rec.caption) > 63 else \
            (rec.caption if rec else "")
        click.echo(f"{rank:2d}. {hit.youtube_id}  {hit.score:+.4f}  "
                   f"{hit.genre or '?':>14s}  {caption}")


@cli.command()
@click.option("--dataset", "dataset_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--checkpoint", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--audio", "audio_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--static-dir", default=None, type=click.Path(file_okay=False))
@click.option("--humeval-items", default=None, type=click.Path(exists=True, dir_okay=False),
              help="JSONL of per-item caption sets for blinded sessions.")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.pass_obj
@operational
def serve(cfg: AppConfig, dataset_path, checkpoint, audio_path, static_dir,
          humeval_items, host, port):
    """Run the HTTP service (search, ratings, humeval sessions, UI assets)."""
    import uvicorn

    state = build_service_state(cfg, dataset_path=dataset_path, checkpoint=checkpoint,
                                audio_path=audio_path, static_dir=static_dir,
                                humeval_items=humeval_items)
    app = create_app(state)
    uvicorn.run(app, host=host or cfg.serve.host, port=port or cfg.serve.port)


def build_service_state(cfg: AppConfig, dataset_path=None, checkpoint=None,
                        audio_path=None, static_dir=None, humeval_items=None) -> ServiceState:
    """Assemble service state from config with optional path overrides.

    Search stays disabled (503) when checkpoint or features are absent; the
    rest of the API still works.
    """
    state = ServiceState(
        text_config=cfg.text_featurizer,
        query_log=cfg.log_path("queries.jsonl"),
        ratings_log=cfg.log_path("ratings.jsonl"),
        humeval_log=cfg.log_path("humeval_ratings.jsonl"),
        humeval_seed=cfg.serve.humeval_seed,
        static_dir=Path(static_dir or cfg.serve.static_dir)
        if (static_dir or cfg.serve.static_dir) else None,
    )
    dataset_path = dataset_path or (cfg.dataset if Path(cfg.dataset).is_file() else None)
    if dataset_path:
        state.records = {r.youtube_id: r
                         for r in load_records(dataset_path, "caption")}
    checkpoint = checkpoint or (cfg.checkpoint if Path(cfg.checkpoint).is_file() else None)
    audio_path = audio_path or (cfg.audio_features
                                if Path(cfg.audio_features).is_file() else None)
    if checkpoint and audio_path:
        params = training.load_checkpoint(checkpoint)
        ids, audio = featstore.read_features(audio_path)
        genres = [state.records[i].genre if i in state.records else None for i in ids]
        if any(g is None for g in genres):
            genres = None
        state.params = params
        state.index = retrieval.build_index(params, ids, audio, genres=genres)
    else:
        log.warning("search disabled: checkpoint or audio features missing")
    humeval_items = humeval_items or cfg.serve.humeval_items
    if humeval_items:
        state.caption_sets = load_caption_sets(humeval_items)
    return state


@cli.command("humeval-report")
@click.option("--ratings", "ratings_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Rating log JSONL (service output).")
@click.option("--fixtures", "fixtures_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Alias for --ratings, reading a shipped fixture log.")
@click.option("--json-out", default=None, type=click.Path(dir_okay=False))
@click.pass_obj
@operational
def humeval_report(cfg: AppConfig, ratings_path, fixtures_path, json_out):
    """Aggregate a rating log into per-method totals and the All 2s count."""
    path = ratings_path or fixtures_path
    if not path:
        raise click.UsageError("need --ratings or --fixtures")
    ratings = humeval.load_ratings(path)
    reports = humeval.aggregate_all(ratings)
    click.echo(humeval.render_reports(reports))
    if json_out:
        with open(json_out, "w", encoding="utf-8") as fh:
            json.dump([r.to_dict() for r in reports], fh, indent=2)
        click.echo(f"wrote {json_out}")


@cli.command()
@click.option("--dataset", "dataset_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
@operational
def stats(cfg: AppConfig, dataset_path):
    """Caption length statistics and genre counts."""
    records = load_records(dataset_path, "caption")
    s = caption_length_stats(records)
    click.echo(f"records: {s['count']}")
    click.echo(f"caption length: mean {s['mean']:.1f}, min {s['min']}, max {s['max']}")
    for genre, count in sorted(splits.genre_counts(records).items()):
        click.echo(f"{genre:>15s}  {count}")


@cli.command()
@click.option("--dataset", "dataset_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--eval", "eval_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Evaluation records JSONL (captions + three scores).")
@click.option("--validation-count", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--all-2s-only/--all-evaluated", default=True,
              help="Keep only items with perfect scores in the test split.")
@click.option("--out-prefix", required=True)
@click.pass_obj
@operational
def split(cfg: AppConfig, dataset_path, eval_path, validation_count, seed,
          all_2s_only, out_prefix):
    """Carve train/validation/test splits and write them as JSONL."""
    records = load_records(dataset_path, "caption")
    eval_records = load_records(eval_path, "evaluation")
    result = splits.make_split(records, eval_records, validation_count,
                               seed if seed is not None else cfg.seed,
                               all_2s_only=all_2s_only)
    for name in ("train", "validation", "test"):
        part = getattr(result, name)
        path = f"{out_prefix}.{name}.jsonl"
        write_records(path, part)
        click.echo(f"{name}: {len(part)} -> {path}")


def main():
    cli(obj=None)


if __name__ == "__main__":
    main()
