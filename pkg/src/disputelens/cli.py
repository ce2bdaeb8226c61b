"""Command-line entry points for batch pipelines.

Exit codes group by error family: 0 success, 2 usage, 3 corpus/config,
4 provider, 5 summary generation, 6 retrieval, 7 evaluation. ``--json``
switches stdout to machine-readable JSON.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from . import __version__
from .config import build_embedder, build_provider, load_config, with_overrides
from .errors import DisputeLensError
from .gateway import MockChatProvider, load_script
from .judge import (
    ALL_KINDS,
    MetricReport,
    correlate_with_human,
    evaluate_run,
    judge_summary,
    metric_kind_from_name,
)
from .models import PromptStrategy
from .pipeline import Summarizer
from .retrieval import Bm25Params, HybridRetriever, build_index, build_semantic_index
from .sectors import all_sectors, sector_from_code, taxonomy_json
from .store import (
    atomic_write_text,
    corpus_content_hash,
    load_bm25_index,
    load_case_files,
    load_human_scores,
    load_judgments,
    load_semantic_index,
    load_summaries_jsonl,
    load_summary,
    save_bm25_index,
    save_semantic_index,
    save_summary,
    summary_to_dict,
)

logger = logging.getLogger(__name__)


def _emit(payload: dict, as_json: bool, human_lines: list[str]) -> None:
    if as_json:
        click.echo(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True))
    else:
        for line in human_lines:
            click.echo(line)


def _fail(exc: DisputeLensError, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps({"error": {"code": exc.code, "message": str(exc)}}))
    else:
        click.echo(f"error[{exc.code}]: {exc}", err=True)
    sys.exit(exc.exit_code)


def _strategy(value: str) -> PromptStrategy:
    for s in PromptStrategy:
        if s.value == value:
            return s
    raise click.BadParameter(f"unknown strategy {value!r}")


@click.group()
@click.version_option(__version__)
@click.option("--verbose", is_flag=True, help="Log request/response detail.")
def main(verbose: bool):
    """Material summaries, precedent search, and evaluation for consumer disputes."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING)


@main.command()
@click.option("--judgments", "judgments_path", type=click.Path(), default=None)
@click.option("--cases", "cases_path", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
def ingest(judgments_path, cases_path, as_json):
    """Validate corpus files, reporting every bad line with its location."""
    if not judgments_path and not cases_path:
        raise click.UsageError("provide --judgments and/or --cases")
    payload: dict = {"files": {}}
    lines: list[str] = []
    dirty = False
    try:
        if judgments_path:
            errors: list = []
            records = load_judgments(judgments_path, collect_errors=errors)
            payload["files"]["judgments"] = {
                "path": str(judgments_path),
                "loaded": len(records),
                "errors": [str(e) for e in errors],
            }
            lines.append(f"judgments: {len(records)} loaded, {len(errors)} bad lines")
            lines.extend(f"  {e}" for e in errors)
            dirty = dirty or bool(errors)
        if cases_path:
            errors = []
            records = load_case_files(cases_path, collect_errors=errors)
            payload["files"]["cases"] = {
                "path": str(cases_path),
                "loaded": len(records),
                "errors": [str(e) for e in errors],
            }
            lines.append(f"cases: {len(records)} loaded, {len(errors)} bad lines")
            lines.extend(f"  {e}" for e in errors)
            dirty = dirty or bool(errors)
    except FileNotFoundError as exc:
        _fail_io(exc, as_json)
    payload["ok"] = not dirty
    _emit(payload, as_json, lines)
    if dirty:
        sys.exit(3)


def _fail_io(exc: OSError, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps({"error": {"code": "io_error", "message": str(exc)}}))
    else:
        click.echo(f"error[io_error]: {exc}", err=True)
    sys.exit(3)


@main.command()
@click.option("--judgments", "judgments_path", type=click.Path(), required=True)
@click.option("--out", "out_dir", type=click.Path(), default="index")
@click.option("--k1", type=float, default=1.2, show_default=True)
@click.option("--b", type=float, default=0.75, show_default=True)
@click.option("--dim", type=int, default=64, show_default=True, help="Hash embedder dimension.")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
def index(judgments_path, out_dir, k1, b, dim, config_path, as_json):
    """Build and persist the BM25 and embedding indexes."""
    try:
        config = load_config(config_path, embed_dim=dim)
        judgments = load_judgments(judgments_path)
        if not judgments:
            raise click.UsageError(f"no judgment records in {judgments_path}")
        content_hash = corpus_content_hash(judgments)
        bm25 = build_index(judgments, Bm25Params(k1, b))
        embedder = build_embedder(config)
        semantic = build_semantic_index(judgments, embedder)
        out = Path(out_dir)
        save_bm25_index(out / "bm25.idx", bm25, content_hash)
        save_semantic_index(out / "embeddings.bin", semantic, content_hash)
    except FileNotFoundError as exc:
        _fail_io(exc, as_json)
    except DisputeLensError as exc:
        _fail(exc, as_json)
    payload = {
        "bm25": str(Path(out_dir) / "bm25.idx"),
        "embeddings": str(Path(out_dir) / "embeddings.bin"),
        "docs": len(judgments),
        "corpus_sha256": content_hash,
    }
    _emit(
        payload,
        as_json,
        [f"indexed {len(judgments)} judgments -> {out_dir} (corpus {content_hash[:12]}...)"],
    )


@main.command()
@click.option("--case", "case_path", type=click.Path(), required=True, help="Case file JSON.")
@click.option(
    "--strategy",
    type=click.Choice([s.value for s in PromptStrategy]),
    default=PromptStrategy.PARTWISE_COT.value,
    show_default=True,
)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--provider", "provider_kind", type=click.Choice(["mock", "http"]), default=None)
@click.option("--script", "script_path", type=click.Path(), default=None, help="Mock script JSON.")
@click.option("--retries", type=int, default=2, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def summarize(case_path, strategy, out_path, config_path, provider_kind, script_path, retries, as_json):
    """Generate the six-part material summary for one case file."""
    try:
        config = load_config(config_path, provider=provider_kind, llm_script_path=script_path)
        case = _load_case_json(case_path)
        provider = build_provider(config)
        summarizer = Summarizer(
            provider,
            _strategy(strategy),
            model_name=config.llm_model,
            part_retries=retries,
        )
        summary, provenance = summarizer.summarize_with_provenance(case)
        out = Path(out_path) if out_path else Path("out") / f"summary-{case.id}.json"
        save_summary(out, summary, case_id=case.id)
        sidecar = out.with_suffix(".provenance.json")
        atomic_write_text(
            sidecar, json.dumps(provenance.to_dict(), ensure_ascii=False, indent=2) + "\n"
        )
    except FileNotFoundError as exc:
        _fail_io(exc, as_json)
    except DisputeLensError as exc:
        _fail(exc, as_json)
    payload = {
        "case_id": case.id,
        "summary_path": str(out),
        "provenance_path": str(sidecar),
        "summary": summary_to_dict(summary),
    }
    _emit(payload, as_json, [str(out)])


def _load_case_json(path):
    from .models import CaseFile
    from .errors import ParseError

    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"case file {path} is not valid JSON: {exc.msg}") from exc
    try:
        return CaseFile(
            id=str(data["id"]),
            complaint_text=str(data["complaint_text"]),
            written_statement_text=str(data.get("written_statement_text", "")),
            metadata={str(k): str(v) for k, v in data.get("metadata", {}).items()},
        )
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad case record in {path}: {exc!r}") from None


@main.command()
@click.option("--summary", "summary_path", type=click.Path(), required=True)
@click.option("--judgments", "judgments_path", type=click.Path(), required=True)
@click.option("--index", "index_dir", type=click.Path(), default=None, help="Load persisted indexes.")
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--weight", type=float, default=0.5, show_default=True, help="Lexical weight.")
@click.option("--sector", "sector_code", type=int, default=None, help="Override the filter sector.")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
def similar(summary_path, judgments_path, index_dir, k, weight, sector_code, config_path, as_json):
    """Rank the most similar precedent judgments for a summary."""
    try:
        config = load_config(config_path)
        summary = load_summary(summary_path)
        judgments = load_judgments(judgments_path)
        embedder = build_embedder(config)
        retriever = HybridRetriever(lexical_weight=weight, top_k=k, embedder=embedder)
        if index_dir:
            content_hash = corpus_content_hash(judgments)
            retriever.bm25_index_ = load_bm25_index(Path(index_dir) / "bm25.idx", content_hash)
            retriever.semantic_index_ = load_semantic_index(
                Path(index_dir) / "embeddings.bin", content_hash, embedder.cache_key()
            )
        else:
            retriever.fit(judgments)
        sector = sector_from_code(sector_code) if sector_code is not None else summary.sector
        from .retrieval import predict_similar

        results = predict_similar(summary, retriever, sector_override=sector)
    except FileNotFoundError as exc:
        _fail_io(exc, as_json)
    except DisputeLensError as exc:
        _fail(exc, as_json)
    titles = {j.id: j.title for j in judgments}
    payload = {
        "sector": {"name": sector.name, "code": sector.code},
        "k": k,
        "weight": weight,
        "results": [
            {
                "rank": r.rank,
                "judgment_id": r.judgment_id,
                "title": titles.get(r.judgment_id, ""),
                "lexical_score": r.lexical_score,
                "semantic_score": r.semantic_score,
                "fused_score": r.fused_score,
            }
            for r in results
        ],
    }
    lines = [f"{'rank':>4}  {'fused':>8}  {'lexical':>8}  {'semantic':>8}  judgment"]
    for r in results:
        lines.append(
            f"{r.rank:>4}  {r.fused_score:>8.4f}  {r.lexical_score:>8.4f}  "
            f"{r.semantic_score:>8.4f}  {r.judgment_id}  {titles.get(r.judgment_id, '')}"
        )
    if not results:
        lines.append(f"no precedents found in sector {sector.name} ({sector.code})")
    _emit(payload, as_json, lines)


@main.command()
@click.option("--generated", "generated_path", type=click.Path(), required=True, help="Summaries JSONL.")
@click.option("--reference", "reference_path", type=click.Path(), required=True, help="Gold summaries JSONL.")
@click.option("--kinds", default=None, help="Comma-separated metric kinds; default all 8.")
@click.option("--judge", "judge_kind", type=click.Choice(["none", "mock", "http"]), default="none", show_default=True)
@click.option("--script", "script_path", type=click.Path(), default=None, help="Mock judge script JSON.")
@click.option("--out", "out_path", type=click.Path(), default="out/report.json", show_default=True)
@click.option("--csv", "csv_path", type=click.Path(), default=None)
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
def evaluate(generated_path, reference_path, kinds, judge_kind, script_path, out_path, csv_path, config_path, as_json):
    """Score generated summaries against references; write the report."""
    try:
        config = load_config(config_path)
        generated = dict(load_summaries_jsonl(generated_path))
        reference = dict(load_summaries_jsonl(reference_path))
        shared = sorted(set(generated) & set(reference))
        if not shared:
            raise click.UsageError("no case ids shared between generated and reference files")
        kind_list = (
            ALL_KINDS
            if not kinds
            else tuple(_metric_kind(k.strip()) for k in kinds.split(","))
        )
        judge_provider = None
        if judge_kind == "mock":
            if not script_path:
                raise click.UsageError("--judge mock needs --script")
            judge_provider = MockChatProvider(load_script(script_path))
        elif judge_kind == "http":
            judge_provider = build_provider(with_overrides(config, provider="http"))
        report = evaluate_run(
            [(reference[cid], generated[cid]) for cid in shared],
            kinds=kind_list,
            judge_provider=judge_provider,
            pair_ids=shared,
            model_name=config.judge_model,
        )
        atomic_write_text(out_path, report.to_json() + "\n")
        if csv_path:
            atomic_write_text(csv_path, report.to_csv())
    except FileNotFoundError as exc:
        _fail_io(exc, as_json)
    except DisputeLensError as exc:
        _fail(exc, as_json)
    payload = report.to_dict()
    payload["report_path"] = str(out_path)
    lines = [f"evaluated {report.n} pairs -> {out_path}"]
    for kind in report.kinds:
        if kind in report.means:
            lines.append(
                f"  {kind.column_label:<12} mean={report.means[kind]:.4f} "
                f"(n={report.scored[kind]}, failures={report.failures[kind]})"
            )
    for scope, by_metric in report.reference_means.items():
        pretty = ", ".join(f"{m}={v:.4f}" for m, v in sorted(by_metric.items()))
        lines.append(f"  reference[{scope}]: {pretty}")
    _emit(payload, as_json, lines)


def _metric_kind(name: str):
    try:
        return metric_kind_from_name(name)
    except KeyError:
        raise click.BadParameter(f"unknown metric kind {name!r}") from None


@main.command()
@click.option("--original", "original_path", type=click.Path(), required=True)
@click.option("--generated", "generated_path", type=click.Path(), required=True)
@click.option("--kind", required=True, help="Metric kind, e.g. OverviewAccuracy.")
@click.option("--judge", "judge_kind", type=click.Choice(["mock", "http"]), default="mock", show_default=True)
@click.option("--script", "script_path", type=click.Path(), default=None)
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
def judge(original_path, generated_path, kind, judge_kind, script_path, config_path, as_json):
    """Judge a single summary pair on one metric (debugging aid)."""
    try:
        config = load_config(config_path)
        metric = _metric_kind(kind)
        original = load_summary(original_path)
        generated = load_summary(generated_path)
        if judge_kind == "mock":
            if not script_path:
                raise click.UsageError("--judge mock needs --script")
            provider = MockChatProvider(load_script(script_path))
        else:
            provider = build_provider(with_overrides(config, provider="http"))
        score = judge_summary(metric, original, generated, provider, model_name=config.judge_model)
    except FileNotFoundError as exc:
        _fail_io(exc, as_json)
    except DisputeLensError as exc:
        _fail(exc, as_json)
    payload = {"kind": metric.value, "value": score.value, "rationale": score.rationale_text}
    _emit(payload, as_json, [f"{metric.value}: {score.value}"])


@main.command()
@click.option("--report", "report_path", type=click.Path(), required=True)
@click.option("--human", "human_path", type=click.Path(), default=None, help="Human scores CSV.")
@click.option("--csv", "csv_path", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
def report(report_path, human_path, csv_path, as_json):
    """Render a stored report; add judge-vs-human rank correlation if given."""
    try:
        with open(report_path, encoding="utf-8") as fh:
            stored = MetricReport.from_dict(json.load(fh))
        correlations = None
        if human_path:
            human = load_human_scores(human_path)
            correlations = correlate_with_human(stored, human)
        if csv_path:
            atomic_write_text(csv_path, stored.to_csv())
    except FileNotFoundError as exc:
        _fail_io(exc, as_json)
    except DisputeLensError as exc:
        _fail(exc, as_json)
    payload = stored.to_dict()
    lines = [f"report over n={stored.n} pairs"]
    for kind in stored.kinds:
        if kind in stored.means:
            lines.append(f"  {kind.column_label:<12} mean={stored.means[kind]:.4f}")
    if correlations is not None:
        payload["spearman_vs_human"] = {k.value: v for k, v in correlations.items()}
        lines.append("judge-vs-human Spearman:")
        for kind, rho in correlations.items():
            lines.append(f"  {kind.column_label:<12} rho={rho:.4f}")
    _emit(payload, as_json, lines)


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--addr", default="127.0.0.1:8070", show_default=True)
@click.option("--corpus", "judgments_path", type=click.Path(), default=None)
@click.option("--cases", "cases_path", type=click.Path(), default=None)
@click.option("--index", "index_dir", type=click.Path(), default=None, help="Load persisted indexes from here.")
@click.option("--static", "static_dir", type=click.Path(), default=None, help="Serve UI assets from here.")
def serve(config_path, addr, judgments_path, cases_path, index_dir, static_dir):
    """Run the HTTP service."""
    import uvicorn

    from .errors import BindError
    from .service import create_app

    try:
        config = load_config(
            config_path,
            judgments_path=judgments_path,
            cases_path=cases_path,
            index_dir=index_dir,
            static_dir=static_dir,
        )
        host, _, port_text = addr.partition(":")
        try:
            port = int(port_text or "8070")
        except ValueError:
            raise BindError(f"bad --addr {addr!r}") from None
        app = create_app(config)
    except DisputeLensError as exc:
        _fail(exc, as_json=False)
    uvicorn.run(app, host=host or "127.0.0.1", port=port, log_level="info")


@main.command()
@click.option("--json", "as_json", is_flag=True)
def sectors(as_json):
    """Print the sector taxonomy."""
    if as_json:
        click.echo(taxonomy_json())
    else:
        for s in all_sectors():
            click.echo(f"{s.code}  {s.name}")


if __name__ == "__main__":
    main()
