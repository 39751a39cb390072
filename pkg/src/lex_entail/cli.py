"""Command-line entry point.

The CLI is a thin client of the harness service: by default it mounts the
FastAPI app in-process; pass --server (or set it in the config file) to
talk to a running instance instead.  File I/O stays on the caller's side,
the service does the work.

Config file: INI with a [harness] section (server, cache_dir, exemplars,
workers, policy) and an optional [layout] section; located via --config
or the LEX_ENTAIL_CONFIG environment variable.  Flags override the file.
API keys come only from LEX_ENTAIL_API_KEY.
"""

from __future__ import annotations

import configparser
import json
import os
import sys
import time
from pathlib import Path
from typing import Any, Optional

import click

from .reference import REFERENCE_CELLS, TEST_SET_SIZES
from .service import create_app

CONFIG_ENV = "LEX_ENTAIL_CONFIG"


class HarnessClient:
    """HTTP client facade over either a remote server or the in-process app."""

    def __init__(self, server: Optional[str], cache_dir: Optional[str]):
        if server:
            import httpx

            self._http = httpx.Client(base_url=server, timeout=600.0)
        else:
            from fastapi.testclient import TestClient

            self._http = TestClient(create_app(cache_dir))

    def post(self, path: str, payload: dict) -> dict:
        response = self._http.post(path, json=payload)
        return self._unwrap(response)

    def get(self, path: str) -> dict:
        return self._unwrap(self._http.get(path))

    @staticmethod
    def _unwrap(response) -> dict:
        if response.status_code != 200:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise click.ClickException(f"service error ({response.status_code}): {detail}")
        return response.json()


def _load_config(path: Optional[str]) -> dict[str, Any]:
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise click.ClickException(f"cannot read config file {path!r}")
    config: dict[str, Any] = dict(parser["harness"]) if "harness" in parser else {}
    if "layout" in parser:
        config["layout"] = dict(parser["layout"])
    return config


def _layout_payload(config: dict[str, Any]) -> dict:
    layout = config.get("layout", {})
    payload = {}
    for key in ("premise_label", "hypothesis_label", "separator"):
        if key in layout:
            payload[key] = layout[key]
    if "use_labels" in layout:
        payload["use_labels"] = str(layout["use_labels"]).lower() in ("1", "true", "yes")
    return payload


def _backend_payload(spec: str, model: Optional[str]) -> dict:
    kind, _, rest = spec.partition(":")
    if kind == "mock":
        if not rest:
            raise click.ClickException("mock backend needs a rules file: mock:rules.json")
        rules = json.loads(Path(rest).read_text(encoding="utf-8"))
        return {"kind": "mock", "model": model or "mock", "rules": rules}
    if kind == "remote":
        if not rest:
            raise click.ClickException("remote backend needs a URL: remote:https://...")
        if not model:
            raise click.ClickException("remote backend requires --model")
        return {"kind": "remote", "model": model, "base_url": rest}
    raise click.ClickException(f"unknown backend spec {spec!r} (use mock:... or remote:...)")


def _read_exemplars(path: Optional[str]) -> list[dict]:
    if not path:
        return []
    records = json.loads(Path(path).read_text(encoding="utf-8"))
    return records


@click.group()
@click.option("--server", default=None, help="Base URL of a running harness service.")
@click.option("--config", "config_path", default=None, help="Path to an INI config file.")
@click.option("--cache-dir", default=None, help="Completion cache directory (in-process mode).")
@click.pass_context
def main(ctx: click.Context, server: Optional[str], config_path: Optional[str], cache_dir: Optional[str]) -> None:
    """Prompting and evaluation harness for statute-law entailment."""
    config = _load_config(config_path)
    ctx.obj = {
        "config": config,
        "server": server or config.get("server"),
        "cache_dir": cache_dir or config.get("cache_dir"),
    }


def _client(ctx: click.Context) -> HarnessClient:
    return HarnessClient(ctx.obj["server"], ctx.obj["cache_dir"])


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--name", default=None, help="Corpus name (defaults to the file stem).")
@click.option("--strategy", "kind", required=True, type=click.Choice(["zs", "fs", "cot", "lr"]))
@click.option("--prompt", "prompt_id", default=2, type=int, help="Instruction prompt id (1-3).")
@click.option("--shots", default=0, type=int, help="Few-shot exemplar count.")
@click.option("--approach", default=None, help="Legal reasoning acronym (lr strategy).")
@click.option("--backend", "backend_spec", required=True, help="mock:rules.json or remote:URL")
@click.option("--model", default=None, help="Model identifier for remote backends.")
@click.option("--exemplars", "exemplars_path", default=None, type=click.Path(exists=True))
@click.option("--baseline-year", default=None, type=int)
@click.option("--workers", default=None, type=int)
@click.option("--policy", default=None, type=click.Choice(["strict", "exclude"]))
@click.option("--out", "out_dir", default="runs", type=click.Path())
@click.option("--deterministic", is_flag=True, help="Omit timestamps from artifacts.")
@click.option("--include-texts", is_flag=True, help="Keep prompts/completions in report.json.")
@click.pass_context
def run(
    ctx: click.Context,
    corpus_path: str,
    name: Optional[str],
    kind: str,
    prompt_id: int,
    shots: int,
    approach: Optional[str],
    backend_spec: str,
    model: Optional[str],
    exemplars_path: Optional[str],
    baseline_year: Optional[int],
    workers: Optional[int],
    policy: Optional[str],
    out_dir: str,
    deterministic: bool,
    include_texts: bool,
) -> None:
    """Execute one prompting strategy over a corpus and write a run report."""
    config = ctx.obj["config"]
    payload = {
        "corpus_xml": Path(corpus_path).read_text(encoding="utf-8"),
        "corpus_name": name or Path(corpus_path).stem,
        "strategy": {
            "kind": "zscot" if kind == "cot" else kind,
            "prompt_id": prompt_id,
            "shots": shots,
            "approach": approach,
            "layout": _layout_payload(config),
        },
        "backend": _backend_payload(backend_spec, model),
        "exemplars": _read_exemplars(exemplars_path or config.get("exemplars")),
        "workers": workers or int(config.get("workers", 1)),
        "scoring_policy": policy or config.get("policy", "strict"),
        "baseline_year": baseline_year,
        "include_texts": include_texts,
    }
    response = _client(ctx).post("/runs", payload)
    report = response["report"]

    stamp = "" if deterministic else time.strftime("%Y%m%d-%H%M%S-")
    run_dir = Path(out_dir) / f"{stamp}{report['strategy']}"
    run_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "strategy": report["strategy"],
        "corpus_name": report["corpus_name"],
        "corpus_digest": report["corpus_digest"],
        "model": report["model"],
        "scoring_policy": report["scoring_policy"],
        "cache_keys": [k for r in report["results"] for k in r["cache_keys"]],
    }
    if not deterministic:
        manifest["created_at"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    (run_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    (run_dir / "report.json").write_text(
        json.dumps(report, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    csv_lines = ["id,gold,predicted,status,correct"]
    for r in report["results"]:
        csv_lines.append(
            f"{r['case_id']},{r['gold']},{r['predicted'] or ''},{r['status']},{str(r['correct']).lower()}"
        )
    (run_dir / "report.csv").write_text("\n".join(csv_lines) + "\n", encoding="utf-8")

    click.echo(f"strategy:  {report['strategy']}")
    click.echo(f"cases:     {report['counts']['total']}")
    click.echo(f"accuracy:  {report['accuracy']:.4f}")
    if response.get("baseline"):
        base = response["baseline"]
        click.echo(
            f"baseline {int(base['year'])} ({base['baseline_accuracy']:.4f}): "
            f"{base['points']:+.2f} points, {base['relative_percent']:+.2f}% relative"
        )
    click.echo(f"artifacts: {run_dir}")


@main.command("export-finetune")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_id", required=True, type=click.IntRange(1, 4))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--backend", "backend_spec", default=None, help="Required for config 4.")
@click.option("--model", default=None)
@click.pass_context
def export_finetune(
    ctx: click.Context,
    corpus_path: str,
    config_id: int,
    out_path: str,
    backend_spec: Optional[str],
    model: Optional[str],
) -> None:
    """Build one of the four fine-tuning datasets and write it as JSONL."""
    payload = {
        "corpus_xml": Path(corpus_path).read_text(encoding="utf-8"),
        "corpus_name": Path(corpus_path).stem,
        "config_id": config_id,
        "backend": _backend_payload(backend_spec, model) if backend_spec else None,
    }
    response = _client(ctx).post("/finetune/export", payload)
    Path(out_path).write_text(response["jsonl"], encoding="utf-8")
    click.echo(f"wrote {response['count']} records to {out_path}")


@main.command()
@click.argument("run_dirs", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path())
@click.pass_context
def ensemble(ctx: click.Context, run_dirs: tuple[str, ...], out_path: Optional[str]) -> None:
    """Majority-vote ensemble over two or more run directories."""
    runs = []
    for run_dir in run_dirs:
        report_path = Path(run_dir) / "report.json"
        if not report_path.exists():
            raise click.ClickException(f"{run_dir} has no report.json")
        runs.append(json.loads(report_path.read_text(encoding="utf-8")))
    result = _client(ctx).post("/ensemble", {"runs": runs})
    if out_path:
        Path(out_path).write_text(
            json.dumps(result, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
    click.echo(f"runs:     {len(runs)}")
    click.echo(f"cases:    {result['counts']['total']}")
    click.echo(f"accuracy: {result['accuracy']:.4f}")


@main.command()
@click.option("--corpus", "corpus_path", default=None, type=click.Path(exists=True))
@click.option("--results", "results_path", default=None, type=click.Path(exists=True),
              help="JSON list of {accuracy, total|year, label?} cells to quantize-check.")
@click.option("--reference", is_flag=True, help="Check the built-in reference table.")
@click.pass_context
def validate(
    ctx: click.Context,
    corpus_path: Optional[str],
    results_path: Optional[str],
    reference: bool,
) -> None:
    """Lint a corpus and/or quantize-check a table of reported accuracies."""
    if not (corpus_path or results_path or reference):
        raise click.ClickException("nothing to validate: pass --corpus, --results or --reference")
    client = _client(ctx)
    failed = False

    if corpus_path:
        response = client.post(
            "/corpus/validate",
            {
                "corpus_xml": Path(corpus_path).read_text(encoding="utf-8"),
                "corpus_name": Path(corpus_path).stem,
            },
        )
        if response["ok"]:
            click.echo(f"corpus ok: {response['cases']} cases, digest {response['digest'][:12]}")
        else:
            click.echo(f"corpus INVALID: {response['error']}", err=True)
            failed = True

    cells = []
    if results_path:
        for cell in json.loads(Path(results_path).read_text(encoding="utf-8")):
            total = cell.get("total") or TEST_SET_SIZES[int(cell["year"])]
            cells.append(
                {"accuracy": cell["accuracy"], "total": total, "label": cell.get("label")}
            )
    if reference:
        cells.extend(
            {"accuracy": c.accuracy, "total": c.total, "label": f"{c.label}/{c.year}"}
            for c in REFERENCE_CELLS
        )
    if cells:
        response = client.post("/metrics/quantize", {"cells": cells})
        for result in response["results"]:
            label = result["label"] or f"{result['accuracy']:.4f}/{result['total']}"
            if result["count"] is None:
                click.echo(f"quantize FAIL: {label} has no unique correct-count", err=True)
                failed = True
            else:
                click.echo(
                    f"quantize ok:   {label} = {result['count']}/{result['total']}"
                )
    if failed:
        sys.exit(1)


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.pass_context
def explain(ctx: click.Context, corpus_path: str) -> None:
    """Print the argmax-cosine pseudo-explanation for every case."""
    response = _client(ctx).post(
        "/explain",
        {
            "corpus_xml": Path(corpus_path).read_text(encoding="utf-8"),
            "corpus_name": Path(corpus_path).stem,
        },
    )
    for item in response["items"]:
        click.echo(
            f"{item['case_id']}\t{item['index']}\t{item['score']:.4f}\t{item['sentence']}"
        )


@main.command()
@click.argument("action", type=click.Choice(["stats", "prune"]))
@click.pass_context
def cache(ctx: click.Context, action: str) -> None:
    """Inspect or prune the completion cache."""
    client = _client(ctx)
    if action == "stats":
        stats = client.get("/cache/stats")
        click.echo(f"entries: {stats['entries']}")
        click.echo(f"bytes:   {stats['bytes']}")
        click.echo(f"root:    {stats['root']}")
    else:
        result = client.post("/cache/prune", {})
        click.echo(f"removed {result['removed']} cache entries")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
@click.pass_context
def serve(ctx: click.Context, host: str, port: int) -> None:
    """Run the harness service."""
    import uvicorn

    uvicorn.run(create_app(ctx.obj["cache_dir"]), host=host, port=port)


if __name__ == "__main__":
    main()
