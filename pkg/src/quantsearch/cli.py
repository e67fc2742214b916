"""Command-line driver for the whole pipeline.

Subcommands: extract, parse, build-corpus, train-tagger, mine,
train-ranker, search, eval, gen-synthetic, serve.  Every subcommand exits
0 on success; data errors print one "error: ..." line on stderr and exit 1.
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys

from . import bm25, mining, ranker, synth, tagger as tagger_mod
from .config import load_config
from .corpus import build_corpus, load_corpus, load_documents, save_corpus
from .engine import METHODS, SearchEngine
from .errors import QuantsearchError
from .extract import MagnitudeLexicon, extract_quantities, normalize_value
from .pipeline import run_pipeline
from .tokenize import tokenize_sentence


def _load_lexicon(args) -> MagnitudeLexicon:
    if getattr(args, "magnitudes", None):
        return MagnitudeLexicon.from_file(args.magnitudes)
    return MagnitudeLexicon()


def _tagger_from_args(args):
    if getattr(args, "tagger", None):
        return tagger_mod.PerceptronTagger.load(args.tagger)
    return tagger_mod.RuleTagger()


def cmd_extract(args) -> int:
    lexicon = _load_lexicon(args)
    text = open(args.input, encoding="utf-8").read() if args.input else args.text
    tokens = tokenize_sentence(text)
    for q in extract_quantities(tokens, lexicon):
        value = normalize_value(q.surface, lexicon)
        print(
            json.dumps(
                {
                    "span": [q.start, q.end],
                    "surface": q.surface,
                    "value": value.render(),
                    "kind": value.kind,
                    "sig_digits": value.sig_digits,
                },
                ensure_ascii=False,
            )
        )
    return 0


def cmd_parse(args) -> int:
    from . import bieo

    lexicon = _load_lexicon(args)
    tagger = _tagger_from_args(args)
    tokens = tokenize_sentence(args.text)
    for q in extract_quantities(tokens, lexicon):
        ps = bieo.mark_pivot(tokens, q)
        desc = bieo.decode_tags(tagger_mod.tag(ps, tagger), ps)
        print(
            json.dumps(
                {
                    "quantity": q.surface,
                    "description": desc.render(tokens),
                    "segments": [list(s) for s in desc.segments],
                },
                ensure_ascii=False,
            )
        )
    return 0


def cmd_build_corpus(args) -> int:
    lexicon = _load_lexicon(args)
    tagger = _tagger_from_args(args)
    config = load_config(args.config)
    paths = sorted(glob.glob(os.path.join(args.docs, "*.txt")))
    if not paths:
        raise QuantsearchError(f"no .txt documents under {args.docs}")
    corpus, report = build_corpus(
        load_documents(paths), tagger, lexicon,
        evidence_window=config.evidence_window, terminators=config.terminators,
        skip_years=config.skip_years,
    )
    save_corpus(corpus, args.out)
    print(
        f"documents={report.documents} sentences={report.sentences_kept} "
        f"records={len(corpus.records)} empty_descriptions={report.empty_descriptions} "
        f"failures={len(report.failures)}"
    )
    for doc_id, message in report.failures:
        print(f"failed {doc_id}: {message}", file=sys.stderr)
    return 0


def cmd_train_tagger(args) -> int:
    examples = tagger_mod.load_examples(args.data)
    model, report = tagger_mod.train_tagger(examples, epochs=args.epochs, seed=args.seed)
    model.save(args.out)
    for row in report.epochs:
        print(f"epoch={row['epoch']} updates={row['updates']} segment_f1={row['segment_f1']:.4f}")
    return 0


def cmd_mine(args) -> int:
    config = load_config(args.config)
    corpus = load_corpus(args.corpus)
    index = bm25.build_index(
        [(r.record_id, r.description_text) for r in corpus.records],
        k1=config.bm25_k1, b=config.bm25_b,
    )
    paraphrase, confusing, report = mining.mine(
        corpus.records, index, k=args.k or config.mining_k,
        min_score=config.mining_min_score,
    )
    mining.save_pairs(paraphrase, confusing, args.out)
    print(report.to_json())
    return 0


def cmd_train_ranker(args) -> int:
    config = load_config(args.config)
    corpus = load_corpus(args.corpus)
    paraphrase, confusing = mining.load_pairs(args.pairs)
    base = ranker.HashedEmbeddingModel(
        dim=config.embedding_dim, n_buckets=config.embedding_buckets, seed=config.seed
    )
    contrastive = ranker.ContrastiveConfig(
        margin=config.margin, max_negatives=config.max_negatives,
        epochs=args.epochs or config.ranker_epochs,
        learning_rate=config.learning_rate, seed=config.seed,
    )
    texts = {r.record_id: r.description_text for r in corpus.records}
    model, trace = ranker.train_contrastive(paraphrase, confusing, texts, contrastive, base)
    model.save(args.out)
    for epoch, loss in enumerate(trace):
        print(f"epoch={epoch} loss={loss:.6f}")
    return 0


def _engine_from_args(args) -> SearchEngine:
    config = load_config(args.config)
    corpus = load_corpus(args.corpus)
    models = {}
    if getattr(args, "ranker", None):
        models["dense_ws"] = ranker.HashedEmbeddingModel.load(args.ranker)
    if getattr(args, "embeddings", None):
        models["dense_pre"] = ranker.PrecomputedEmbeddings.load(args.embeddings)
    models.setdefault(
        "dense",
        ranker.HashedEmbeddingModel(
            dim=config.embedding_dim, n_buckets=config.embedding_buckets,
            seed=config.seed,
        ),
    )
    return SearchEngine(corpus, models, k1=config.bm25_k1, b=config.bm25_b)


def cmd_search(args) -> int:
    engine = _engine_from_args(args)
    hits = engine.search(args.method, args.query, args.k)
    for row in engine.hit_details(args.method, hits):
        print(
            f"{row['rank']}\t{row['score']:.6f}\t{row['value']}\t"
            f"{row['evidence']}\t{row['doc_id']}"
        )
    return 0


def cmd_eval(args) -> int:
    config = load_config(args.config)
    docs_dir = os.path.join(args.synthetic, "docs")
    paths = sorted(glob.glob(os.path.join(docs_dir, "*.txt")))
    if not paths:
        raise QuantsearchError(f"no documents under {docs_dir}")
    docs = load_documents(paths)
    labels = []
    with open(os.path.join(args.synthetic, "labels.jsonl"), encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            labels.append(
                (
                    obj["doc_id"],
                    tagger_mod.LabeledExample(
                        tokens=tuple(obj["tokens"]),
                        pivot=tuple(obj["pivot"]),
                        segments=tuple(tuple(s) for s in obj["segments"]),
                    ),
                )
            )
    result = run_pipeline(
        docs, labels, config,
        include_pretrained_import=not args.no_pretrained_import,
    )
    print(result.suite.table())
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(result.suite.to_json() + "\n")
    if args.win_csv:
        with open(args.win_csv, "w", encoding="utf-8") as fh:
            fh.write(result.suite.win_csv())
    return 0


def cmd_gen_synthetic(args) -> int:
    spec = synth.SyntheticSpec(
        n_facts=args.facts,
        distractor_rate=args.distractor_rate,
        n_docs=args.docs,
        seed=args.seed,
    )
    corpus = synth.generate(spec)
    synth.write_corpus(corpus, args.out)
    n_sentences = sum(1 for _ in corpus.labels)
    print(f"facts={len(corpus.facts)} labeled_quantities={n_sentences} docs={len(corpus.docs)}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        corpus_path=args.corpus,
        ranker_path=args.ranker,
        embeddings_path=args.embeddings,
        config_path=args.config,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantsearch",
        description="Extract, index, and search quantities in text documents.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract quantities from a sentence or file")
    p.add_argument("--text", default="")
    p.add_argument("--input")
    p.add_argument("--magnitudes", help="lexicon file: word<TAB>power lines")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("parse", help="parse quantity descriptions in a sentence")
    p.add_argument("--text", required=True)
    p.add_argument("--tagger", help="trained tagger file (default: rule baseline)")
    p.add_argument("--magnitudes")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("build-corpus", help="ingest documents into a corpus file")
    p.add_argument("--docs", required=True, help="directory of .txt documents")
    p.add_argument("--out", required=True)
    p.add_argument("--tagger")
    p.add_argument("--magnitudes")
    p.add_argument("--config")
    p.set_defaults(func=cmd_build_corpus)

    p = sub.add_parser("train-tagger", help="train the perceptron tagger")
    p.add_argument("--data", required=True, help="labeled examples, JSONL")
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=15)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train_tagger)

    p = sub.add_parser("mine", help="mine paraphrase/confusing pairs")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--config")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("train-ranker", help="contrastive training on mined pairs")
    p.add_argument("--corpus", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int)
    p.add_argument("--config")
    p.set_defaults(func=cmd_train_ranker)

    p = sub.add_parser("search", help="query a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--method", default="cq-bm25", choices=list(METHODS))
    p.add_argument("--query", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--ranker")
    p.add_argument("--embeddings")
    p.add_argument("--config")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="run the full pipeline + method comparison")
    p.add_argument("--synthetic", required=True, help="gen-synthetic output dir")
    p.add_argument("--report", help="write JSON metrics here")
    p.add_argument("--win-csv", help="write the win matrix CSV here")
    p.add_argument("--no-pretrained-import", action="store_true")
    p.add_argument("--config")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen-synthetic", help="generate a synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--facts", type=int, default=500)
    p.add_argument("--distractor-rate", type=float, default=0.35)
    p.add_argument("--docs", type=int, default=60)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_synthetic)

    p = sub.add_parser("serve", help="start the HTTP search service")
    p.add_argument("--corpus", required=True)
    p.add_argument("--ranker")
    p.add_argument("--embeddings")
    p.add_argument("--config")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QuantsearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
