"""Operator entry points: ingest/validate the KB, build the index, ask a
single question end to end, run evaluations, print stats, and serve."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import index as index_mod
from . import kb as kb_mod
from .agent import AgentConfig, run_session
from .errors import MollyError
from .eval import CodeLimits, EvalReport, evaluate_dataset, render_report
from .llm import LiveBackend, MockBackend, Playbook, render_prompt, simple_request
from .service import load_config, serve

_PACKAGE_DATA = Path(__file__).parent / "data"
SAMPLE_KB = _PACKAGE_DATA / "sample_kb.jsonl"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="molly", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="validate an entry file and write a normalized KB")
    p_ingest.add_argument("--input", required=True)
    p_ingest.add_argument("--out", required=True)
    p_ingest.add_argument("--vocabulary", default=None, help="optional knowledge-point allow-list file")
    p_ingest.set_defaults(func=cmd_ingest)

    p_index = sub.add_parser("index", help="build the question vector index for a KB")
    p_index.add_argument("--kb", required=True)
    p_index.add_argument("--out", required=True)
    p_index.add_argument("--embedder", choices=("hash", "remote"), default="hash")
    p_index.add_argument("--dim", type=int, default=index_mod.DEFAULT_HASH_DIM)
    p_index.set_defaults(func=cmd_index)

    p_ask = sub.add_parser("ask", help="run one question through the pipeline")
    p_ask.add_argument("question")
    p_ask.add_argument("--kb", default=str(SAMPLE_KB))
    p_ask.add_argument("--index", default=None, help="vector index path (built in memory if omitted)")
    p_ask.add_argument("--backend", choices=("mock", "live"), default="mock")
    p_ask.add_argument("--playbook", default=None)
    p_ask.add_argument("--model", default=None)
    p_ask.add_argument("--k", type=int, default=3)
    p_ask.add_argument("--max-iters", type=int, default=3)
    p_ask.add_argument("--no-perception", action="store_true")
    p_ask.add_argument("--no-reflection", action="store_true")
    p_ask.add_argument("--trace", action="store_true", help="print the full transcript as JSON")
    p_ask.add_argument("--session-id", default=None)
    p_ask.add_argument("--templates-dir", default=None)
    p_ask.set_defaults(func=cmd_ask)

    p_eval = sub.add_parser("eval", help="evaluate a system over an item file")
    p_eval.add_argument("--items", required=True)
    p_eval.add_argument("--mode", choices=("agent", "baseline", "recorded"), required=True)
    p_eval.add_argument("--report", required=True, help="output directory for report files")
    p_eval.add_argument("--kb", default=str(SAMPLE_KB))
    p_eval.add_argument("--index", default=None)
    p_eval.add_argument("--backend", choices=("mock", "live"), default="mock")
    p_eval.add_argument("--playbook", default=None)
    p_eval.add_argument("--model", default=None)
    p_eval.add_argument("--recorded", default=None, help="JSONL of {id, answer} for --mode recorded")
    p_eval.add_argument("--code-mode", choices=("execution", "judge"), default="execution")
    p_eval.add_argument("--interpreter", default=sys.executable)
    p_eval.add_argument("--timeout", type=float, default=5.0)
    p_eval.add_argument("--parallelism", type=int, default=1)
    p_eval.add_argument("--no-perception", action="store_true")
    p_eval.add_argument("--no-reflection", action="store_true")
    p_eval.add_argument("--templates-dir", default=None)
    p_eval.set_defaults(func=cmd_eval)

    p_stats = sub.add_parser("stats", help="print dataset statistics for a KB")
    p_stats.add_argument("--kb", default=str(SAMPLE_KB))
    p_stats.add_argument("--json", action="store_true", dest="as_json")
    p_stats.set_defaults(func=cmd_stats)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--config", required=True)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def _make_backend(args) -> MockBackend | LiveBackend:
    if args.backend == "mock":
        if not args.playbook:
            raise MollyError("mock backend requires --playbook")
        return MockBackend(Playbook.from_file(args.playbook))
    return LiveBackend.from_env(model=args.model)


def _load_kb_and_index(kb_path: str, index_path: str | None):
    kb = kb_mod.load_dataset(kb_path)
    if index_path:
        idx = index_mod.load_index(index_path)
    else:
        embedder = index_mod.HashEmbedder()
        idx = index_mod.build_index(((e.id, e.question) for e in kb), embedder)
    return kb, idx


def cmd_ingest(args) -> int:
    kb = kb_mod.load_dataset(args.input, vocabulary_path=args.vocabulary)
    kb_mod.save_dataset(kb, args.out)
    print(f"ingested {len(kb)} entries -> {args.out}")
    return 0


def cmd_index(args) -> int:
    kb = kb_mod.load_dataset(args.kb)
    if args.embedder == "remote":
        embedder = index_mod.RemoteEmbedder.from_env()
    else:
        embedder = index_mod.HashEmbedder(args.dim)
    idx = index_mod.build_index(((e.id, e.question) for e in kb), embedder)
    index_mod.save_index(idx, args.out)
    print(f"indexed {len(idx)} questions (dim {idx.dim}) -> {args.out}")
    return 0


def cmd_ask(args) -> int:
    kb, idx = _load_kb_and_index(args.kb, args.index)
    backend = _make_backend(args)
    config = AgentConfig(
        k=args.k,
        max_reflection_iters=args.max_iters,
        perception=not args.no_perception,
        reflection=not args.no_reflection,
        templates_dir=args.templates_dir,
    )
    transcript = run_session(
        args.question, config, kb, idx, backend, session_id=args.session_id
    )
    if args.trace:
        print(json.dumps(transcript.to_dict(), ensure_ascii=False, indent=2))
    else:
        print(transcript.final_answer)
    if transcript.aborted:
        print(f"error: session aborted: {transcript.error}", file=sys.stderr)
        return 1
    return 0


def cmd_eval(args) -> int:
    items = list(kb_mod.load_dataset(args.items))
    backend = _make_backend(args)
    config = AgentConfig(
        perception=not args.no_perception,
        reflection=not args.no_reflection,
        templates_dir=args.templates_dir,
    )

    if args.mode == "agent":
        kb, idx = _load_kb_and_index(args.kb, args.index)

        def answer_source(item: kb_mod.QAEntry) -> str:
            transcript = run_session(item.question, config, kb, idx, backend)
            if transcript.aborted:
                raise MollyError(f"session aborted: {transcript.error}")
            return transcript.final_answer

    elif args.mode == "baseline":

        def answer_source(item: kb_mod.QAEntry) -> str:
            prompt = render_prompt(
                "base_qa", {"question": item.question}, args.templates_dir
            )
            return backend.complete(
                simple_request("generation", "You are a Python tutoring assistant.", prompt)
            )

    else:  # recorded
        if not args.recorded:
            raise MollyError("--mode recorded requires --recorded FILE")
        recorded: dict[str, str] = {}
        with open(args.recorded, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line:
                    record = json.loads(line)
                    recorded[record["id"]] = record["answer"]

        def answer_source(item: kb_mod.QAEntry) -> str:
            if item.id not in recorded:
                raise MollyError(f"no recorded answer for {item.id!r}")
            return recorded[item.id]

    report = evaluate_dataset(
        items,
        answer_source,
        backend,
        system_name=args.mode,
        code_mode=args.code_mode,
        limits=CodeLimits(interpreter_path=args.interpreter, timeout_secs=args.timeout),
        parallelism=args.parallelism,
        templates_dir=args.templates_dir,
    )

    out_dir = Path(args.report)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = render_report([report])
    (out_dir / "report.txt").write_text(table + "\n", encoding="utf-8")
    with open(out_dir / "report.json", "w", encoding="utf-8") as handle:
        json.dump(report.to_dict(), handle, ensure_ascii=False, indent=2)
    with open(out_dir / "items.jsonl", "w", encoding="utf-8") as handle:
        for item in report.items:
            handle.write(json.dumps(item.to_dict(), ensure_ascii=False) + "\n")
    print(table)
    failures = [item for item in report.items if item.error]
    if failures:
        print(f"warning: {len(failures)} item(s) recorded errors", file=sys.stderr)
    return 0


def cmd_stats(args) -> int:
    kb = kb_mod.load_dataset(args.kb)
    stats = kb_mod.compute_stats(kb)
    if args.as_json:
        print(json.dumps(stats.to_dict(), ensure_ascii=False, indent=2))
    else:
        print(kb_mod.render_stats_table(stats))
    return 0


def cmd_serve(args) -> int:
    config = load_config(args.config)
    serve(config)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MollyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
