"""Command-line entry points for every pipeline stage."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import consistency, corpus, evaluation, merging, pairs as pair_builder, scoring
from .errors import GrouplineError


def _load_annotations(timeline: corpus.Timeline, paths: tuple[str, ...]) -> list[corpus.AnnotationSet]:
    return [corpus.parse_annotation_set(path, timeline) for path in paths]


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@click.group()
@click.version_option(package_name="groupline")
def cli() -> None:
    """Headline-grouping dataset construction, scoring, and auditing."""


@cli.command()
@click.option("--timeline", "timeline_path", required=True, type=click.Path(exists=True))
@click.option("--annotations", multiple=True, required=True, type=click.Path(exists=True))
@click.option("--majority", type=int, default=None, help="Votes needed for an edge (default: strict majority).")
@click.option("--resolution", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Groups CSV (default: stdout).")
def merge(timeline_path, annotations, majority, resolution, seed, out) -> None:
    """Merge annotation CSVs into global groups."""
    timeline = corpus.parse_timeline(timeline_path)
    sets = _load_annotations(timeline, annotations)
    if majority is None:
        partition = merging.merge_annotations(sets, resolution=resolution, seed=seed)
    else:
        graph = merging.build_cogroup_graph(sets, majority=majority)
        partition = merging.louvain_partition(graph, resolution=resolution, seed=seed)
    _write_or_print(corpus.write_partition_csv(partition), out)


@cli.command()
@click.option("--timeline", "timeline_path", required=True, type=click.Path(exists=True))
@click.option("--annotations", multiple=True, required=True, type=click.Path(exists=True))
@click.option("--resolution", type=float, default=1.0, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Agreement JSON (default: stdout).")
def iaa(timeline_path, annotations, resolution, out) -> None:
    """Leave-one-out inter-annotator agreement (AMI)."""
    timeline = corpus.parse_timeline(timeline_path)
    sets = _load_annotations(timeline, annotations)
    report = merging.leave_one_out_agreement(sets, resolution=resolution)
    _write_or_print(report.to_json(), out)


@cli.command(name="pairs")
@click.option("--timeline", "timeline_path", required=True, type=click.Path(exists=True))
@click.option("--groups", "groups_path", required=True, type=click.Path(exists=True))
@click.option("--window", type=int, default=4, show_default=True)
@click.option("--cut", type=click.Choice(corpus.SPLITS), default=None,
              help="Override the timeline's split tag.")
@click.option("--out", type=click.Path(), default=None, help="Pair JSON (default: stdout).")
@click.option("--stats", "stats_out", type=click.Path(), default=None, help="Also write corpus stats JSON.")
def make_pairs(timeline_path, groups_path, window, cut, out, stats_out) -> None:
    """Generate the labeled pair dataset from a timeline and its groups."""
    timeline = corpus.parse_timeline(timeline_path, split=cut or "train")
    partition = corpus.read_partition_csv(groups_path, timeline_id=timeline.timeline_id)
    cfg = pair_builder.PairBuildConfig(window_days=window)
    labeled = pair_builder.generate_labeled_pairs(timeline, partition, cfg)
    _write_or_print(corpus.write_hlgd(labeled), out)
    if stats_out:
        Path(stats_out).write_text(pair_builder.corpus_stats(labeled).to_json(), encoding="utf-8")


@cli.command(name="fit-time")
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True))
@click.option("--cut", type=click.Choice(corpus.SPLITS), default="train", show_default=True,
              help="Which cut to fit on.")
@click.option("--learning-rate", type=float, default=0.1, show_default=True)
@click.option("--iterations", type=int, default=5000, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Model JSON (default: stdout).")
def fit_time(pairs_path, cut, learning_rate, iterations, out) -> None:
    """Fit the day-difference logistic baseline."""
    labeled = [p for p in corpus.read_hlgd(pairs_path) if p.cut == cut]
    if not labeled:
        raise click.ClickException(f"no pairs in cut {cut!r}")
    model = scoring.fit_time_logistic(labeled, learning_rate=learning_rate, iterations=iterations)
    _write_or_print(model.to_json(), out)


@cli.command(name="train-lm")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True),
              help="Timeline JSONL with article content.")
@click.option("--alpha", type=float, default=0.9, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Model JSON (default: stdout).")
def train_lm(corpus_path, alpha, out) -> None:
    """Train the desk-scale conditional headline model."""
    timeline = corpus.parse_timeline(corpus_path)
    rows = [(h.content or "", h.text) for h in timeline.headlines]
    model = scoring.train_ngram_backend(rows, alpha=alpha)
    _write_or_print(model.to_json(), out)


def _build_scorer(name, model_path, lm_path, decay, lm_cmd=None) -> scoring.PairScorer:
    if name == "levenshtein":
        base: scoring.PairScorer = scoring.LevenshteinScorer()
    elif name == "time":
        if not model_path:
            raise click.ClickException("--scorer time requires --model")
        payload = json.loads(Path(model_path).read_text(encoding="utf-8"))
        base = scoring.TimeOnlyScorer(scoring.TimeLogistic.from_dict(payload))
    elif name in ("swap", "swap+time"):
        if lm_cmd:
            import shlex

            backend: scoring.ConditionalLM = scoring.SubprocessLM(shlex.split(lm_cmd))
        elif lm_path:
            payload = json.loads(Path(lm_path).read_text(encoding="utf-8"))
            backend = scoring.NgramLM.from_dict(payload)
        else:
            raise click.ClickException(f"--scorer {name} requires --lm or --lm-cmd")
        base = scoring.SwapScorer(backend)
    else:
        raise click.ClickException(f"unknown scorer {name!r}")
    if name == "swap+time" or (decay is not None and name != "time"):
        base = scoring.time_decay(base, decay if decay is not None else 0.0)
    return base


def _enrich_content(labeled, content_paths):
    """Attach article content to pair headlines by (text, date) lookup."""
    if not content_paths:
        return labeled
    lookup: dict[tuple[str, str], str] = {}
    for path in content_paths:
        timeline = corpus.parse_timeline(path)
        for h in timeline.headlines:
            if h.content is not None:
                lookup[(h.text, h.publish_date.isoformat())] = h.content
    enriched = []
    for pair in labeled:
        sides = []
        for h in (pair.headline_a, pair.headline_b):
            content = lookup.get((h.text, h.publish_date.isoformat()))
            if content is not None and h.content is None:
                h = corpus.Headline(
                    id=h.id, text=h.text, publish_date=h.publish_date, source=h.source,
                    url=h.url, content=content, authors=h.authors, timeline_id=h.timeline_id,
                )
            sides.append(h)
        enriched.append(
            corpus.LabeledPair(sides[0], sides[1], pair.day_diff, pair.label, pair.cut, pair.timeline_id)
        )
    return enriched


@cli.command(name="eval")
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True))
@click.option("--scorer", "scorer_name", required=True,
              type=click.Choice(["levenshtein", "time", "swap", "swap+time"]))
@click.option("--model", "model_path", type=click.Path(exists=True), default=None)
@click.option("--lm", "lm_path", type=click.Path(exists=True), default=None)
@click.option("--lm-cmd", type=str, default=None,
              help="External conditional-LM backend command (line-delimited JSON stdio).")
@click.option("--content-from", "content_paths", multiple=True, type=click.Path(exists=True),
              help="Timeline JSONL files used to attach article content to pairs.")
@click.option("--lambda", "decay", type=float, default=None, help="Time-decay constant.")
@click.option("--threshold", type=float, default=None,
              help="Decision threshold (default: tuned on the train cut).")
@click.option("--preset", type=str, default=None, help="Load lambda/threshold from a shipped preset.")
@click.option("--tier", type=int, default=None, help="Reject scorers above this challenge tier.")
@click.option("--symmetrized", is_flag=True, help="Wrap the scorer to average both orders.")
@click.option("--out", type=click.Path(), default=None, help="Report JSON (default: stdout).")
@click.option("--table", is_flag=True, help="Print the aligned text table to stderr.")
def eval_cmd(pairs_path, scorer_name, model_path, lm_path, lm_cmd, content_paths, decay,
             threshold, preset, tier, symmetrized, out, table) -> None:
    """Evaluate a scorer on a pair file."""
    if preset:
        operating_point = scoring.load_preset(preset)
        if decay is None:
            decay = operating_point.get("lambda")
        if threshold is None:
            threshold = operating_point.get("threshold")
    labeled = _enrich_content(corpus.read_hlgd(pairs_path), content_paths)
    scorer = _build_scorer(scorer_name, model_path, lm_path, decay, lm_cmd)
    if symmetrized:
        scorer = scoring.symmetrize(scorer)
    if tier is not None and scorer.tier > tier:
        raise click.ClickException(f"scorer {scorer.identity!r} is tier {scorer.tier}, above --tier {tier}")
    if threshold is None:
        train = [p for p in labeled if p.cut == "train"]
        if not train:
            raise click.ClickException("no train pairs to tune a threshold on; pass --threshold")
        threshold = scoring.tune_threshold(
            [scorer.score_pair(p) for p in train], [p.label for p in train]
        )
    report = evaluation.evaluate_scorer(scorer, labeled, threshold)
    _write_or_print(report.to_json(), out)
    if table:
        click.echo(report.to_table(), err=True, nl=False)


@cli.command()
@click.option("--scorer", "scorer_name", required=True,
              type=click.Choice(["levenshtein", "time", "swap", "swap+time"]))
@click.option("--mode", type=click.Choice(["commutative", "transitive"]), required=True)
@click.option("--pairs", "pairs_path", type=click.Path(exists=True), default=None,
              help="Pair file (commutative mode).")
@click.option("--timeline", "timeline_path", type=click.Path(exists=True), default=None,
              help="Timeline JSONL (transitive mode).")
@click.option("--model", "model_path", type=click.Path(exists=True), default=None)
@click.option("--lm", "lm_path", type=click.Path(exists=True), default=None)
@click.option("--lm-cmd", type=str, default=None)
@click.option("--content-from", "content_paths", multiple=True, type=click.Path(exists=True))
@click.option("--lambda", "decay", type=float, default=None)
@click.option("--threshold", type=float, required=True)
@click.option("--window", type=int, default=4, show_default=True)
@click.option("--symmetrized", is_flag=True)
@click.option("--dump-110", type=click.Path(), default=None, help="CSV of inconsistent triangles.")
@click.option("--out", type=click.Path(), default=None, help="Report JSON (default: stdout).")
def audit(scorer_name, mode, pairs_path, timeline_path, model_path, lm_path, lm_cmd,
          content_paths, decay, threshold, window, symmetrized, dump_110, out) -> None:
    """Run a consistency audit over a scorer."""
    scorer = _build_scorer(scorer_name, model_path, lm_path, decay, lm_cmd)
    if symmetrized:
        scorer = scoring.symmetrize(scorer)
    if mode == "commutative":
        if not pairs_path:
            raise click.ClickException("commutative mode requires --pairs")
        labeled = _enrich_content(corpus.read_hlgd(pairs_path), content_paths)
        report = consistency.commutative_audit(scorer, labeled, threshold)
    else:
        if not timeline_path:
            raise click.ClickException("transitive mode requires --timeline")
        timeline = corpus.parse_timeline(timeline_path)
        report = consistency.transitive_audit(
            scorer, timeline, threshold, window_days=window, dump_110=dump_110
        )
    _write_or_print(report.to_json(), out)


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--data-dir", type=click.Path(), default=None,
              help="Persistence root (default: $GROUPLINE_DATA_DIR or ./groupline_data).")
def serve(host, port, data_dir) -> None:
    """Start the annotation session service."""
    from .service import run_service

    run_service(host, port, data_dir)


def main() -> None:
    try:
        cli(standalone_mode=True)
    except (GrouplineError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
