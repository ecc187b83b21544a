"""Acceptance suite: one test per criterion, at the stated tolerances.

Run with ``pytest tests/test_acceptance.py -v`` to get one pass/fail line
per criterion.
"""

import json
import random
import time

import pytest

from axtract import evaluation, gold, segment, table_type
from axtract.abbrev import load_abbreviations
from axtract.cli import build_gold_linker
from axtract.config import PipelineConfig
from axtract.evaluation import evaluate_records, load_gold, topk_linking_accuracy
from axtract.filtering import filter_results
from axtract.linking import EvidenceSet, score_leaderboards
from axtract.pipeline import PipelineModels, records_to_json, run_extract
from axtract.taxonomy import generate_evidences, load_curated_mentions, load_taxonomy

from test_filtering import make_taxonomy, random_candidates, reference_filter
from test_linking import (brute_force_posteriors, random_evidence, random_noise,
                          random_taxonomy)


def announce(name, detail=""):
    print(f"[acceptance] {name}: PASS {detail}".rstrip())


def test_linking_math_oracle_equivalence():
    """score_leaderboards equals the brute-force mixture evaluation to 1e-9
    on >= 1000 random taxonomies (<= 10 leaderboards, <= 8 evidence items)."""
    rng = random.Random(20240917)
    started = time.monotonic()
    cases = 0
    worst = 0.0
    while cases < 1000:
        taxonomy = random_taxonomy(rng)
        assert len(taxonomy.leaderboards) <= 10
        noise = random_noise(rng)
        evidence = random_evidence(rng, taxonomy)
        assert len(evidence.items) <= 8
        got = {c.leaderboard_id: c.posterior
               for c in score_leaderboards(evidence, taxonomy, noise)}
        expected = brute_force_posteriors(evidence, taxonomy, noise)
        for key, val in expected.items():
            worst = max(worst, abs(got[key] - val))
            assert abs(got[key] - val) < 1e-9
        cases += 1
    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"took {elapsed:.1f}s"
    announce("linking-math oracle equivalence",
             f"({cases} cases, max deviation {worst:.2e}, {elapsed:.1f}s)")


def test_mention_probability_distributions():
    """Per-entity mention weights sum to 1 +- 1e-9 and unnormalized weights
    equal 1/#sharers, enumerated on >= 100 random taxonomies."""
    rng = random.Random(7)
    for _ in range(100):
        taxonomy = random_taxonomy(rng)
        for etype in ("task", "dataset", "metric"):
            # enumeration oracle: count sharers straight from the evidence map
            sharers = {}
            for name in taxonomy.entities(etype):
                for mention in taxonomy.evidence[(etype, name)]:
                    sharers[mention] = sharers.get(mention, 0) + 1
            for name in taxonomy.entities(etype):
                mentions = taxonomy.evidence[(etype, name)]
                weights = taxonomy.mention_weights[(etype, name)]
                assert abs(sum(weights.values()) - 1.0) <= 1e-9
                total = sum(1.0 / sharers[m] for m in mentions)
                for mention in mentions:
                    unnormalized = weights[mention] * total
                    assert abs(unnormalized - 1.0 / sharers[mention]) < 1e-9
    announce("mention probability distributions", "(100 taxonomies)")


def test_bm25_reference_equivalence():
    """Index scores equal a naive scorer on corpora <= 50 fragments for
    >= 500 random queries, exact to 1e-9."""
    from axtract.index import build_index, search, tokenize
    from axtract.ingest import PaperDocument
    from test_index import naive_bm25

    rng = random.Random(99)
    vocab = ["alpha", "beta", "gamma", "delta", "rouge-1", "sst-2", "model",
             "accuracy", "bleu", "test", "en-vi", "94.5"]
    queries_checked = 0
    while queries_checked < 500:
        texts = [" ".join(rng.choices(vocab, k=rng.randint(1, 12)))
                 for _ in range(rng.randint(1, 50))]
        doc = PaperDocument(paper_id="p", sections=[("S", t) for t in texts])
        idx = build_index(doc)
        assert len(idx) <= 50
        for _ in range(5):
            query = " ".join(rng.choices(vocab, k=rng.randint(1, 4)))
            expected = naive_bm25([tokenize(t) for t in texts], tokenize(query),
                                  idx.k1, idx.b)
            got = {f.order: s for f, s in search(idx, query, len(texts))}
            for pos, exp in enumerate(expected):
                assert abs(got.get(pos, 0.0) - exp) < 1e-9
            queries_checked += 1
    announce("bm25 reference equivalence", f"({queries_checked} queries)")


def test_end_to_end_golden_corpus(corpus_dir, corpus_indexes, gold_tables, tmp_path):
    """Classifiers trained on the mini-corpus + curated evidence reach
    micro F1 = 1.0 at TDMS on the held-in set, in under 60 s."""
    started = time.monotonic()

    type_model = table_type.train_table_type(
        [(gt.table, gt.table_type) for gt in gold_tables])
    seg_model = segment.train_segmenter(
        [(gt.paper_id, gt.table, gt.classes) for gt in gold_tables],
        corpus_indexes.get)
    type_model.save(tmp_path / "table_type.json")
    seg_model.save(tmp_path / "segmenter.json")

    config_payload = {
        "taxonomy": str((corpus_dir / "taxonomy.json").resolve()),
        "evidence_strategy": "combined",
        "curated_mentions": str((corpus_dir / "curated_mentions.json").resolve()),
        "abbreviations": str((corpus_dir / "abbreviations.tsv").resolve()),
        "table_type_model": "table_type.json",
        "segmenter_model": "segmenter.json",
        "thresholds": {"t1": 0.1, "t2": 0.5, "table_type": 0.5},
    }
    (tmp_path / "config.json").write_text(json.dumps(config_payload))
    config = PipelineConfig.load(tmp_path / "config.json")

    records, _ = run_extract(config, corpus_dir / "papers")
    gold_records = load_gold(corpus_dir / "gold_records.json",
                             load_taxonomy(corpus_dir / "taxonomy.json"))
    report = evaluate_records(records, gold_records, "tdms")
    elapsed = time.monotonic() - started
    assert report.micro.precision == 1.0
    assert report.micro.recall == 1.0
    assert report.micro.f1 == 1.0
    assert elapsed < 60.0, f"took {elapsed:.1f}s"
    announce("end-to-end golden mini-corpus",
             f"(micro F1 = {report.micro.f1:.1f}, {elapsed:.1f}s)")


def test_evidence_strategy_monotonicity(corpus_config, corpus_dir, gold_tables):
    """Top-5 linking accuracy: abbreviations >= bag-of-words, and
    Top-5 >= Top-1 for every strategy, on gold-segmented tables."""
    annotated = [gt for gt in gold_tables if gt.records]
    base = load_taxonomy(corpus_dir / "taxonomy.json")
    pairs = load_abbreviations(corpus_dir / "abbreviations.tsv")
    curated = load_curated_mentions(corpus_dir / "curated_mentions.json")

    accuracies = {}
    for strategy in ("bow", "abbreviations", "curated", "combined"):
        taxonomy = generate_evidences(base, strategy, abbreviations=pairs,
                                      curated=curated)
        models = PipelineModels.load(corpus_config)
        models.taxonomy = taxonomy
        linker = build_gold_linker(models, corpus_dir / "papers")
        accuracies[strategy] = {
            k: topk_linking_accuracy(annotated, linker, k) for k in (1, 5)}

    for strategy, by_k in accuracies.items():
        for column in ("leaderboard", "task", "dataset", "metric"):
            assert by_k[5][column] >= by_k[1][column], (strategy, column)
    for column in ("leaderboard", "task", "dataset", "metric"):
        assert accuracies["abbreviations"][5][column] >= accuracies["bow"][5][column]
    announce("evidence-strategy monotonicity",
             "(top5 abbr %.2f >= bow %.2f on full triple)" % (
                 accuracies["abbreviations"][5]["leaderboard"],
                 accuracies["bow"][5]["leaderboard"]))


def test_filtering_reference_equivalence():
    """filter_results equals the four-step brute-force reference on
    >= 1000 random candidate sets; at most one record per leaderboard."""
    taxonomy = make_taxonomy()
    rng = random.Random(314159)
    for _ in range(1000):
        t1, t2 = rng.random() * 0.6, rng.random()
        candidates = random_candidates(rng, taxonomy)
        records = filter_results(candidates, taxonomy, t1, t2)
        got = {(r.leaderboard_id, r.value, r.confidence, r.provenance)
               for r in records}
        assert got == reference_filter(candidates, taxonomy, t1, t2)
        ids = [r.leaderboard_id for r in records]
        assert len(ids) == len(set(ids))
    announce("filtering reference equivalence", "(1000 candidate sets)")


def test_evaluation_harness_self_checks():
    """Perfect predictions give P=R=F1=1; the 1-of-2 case gives 0.5 across
    the board; every emitted row satisfies F1 = 2PR/(P+R)."""
    from axtract.evaluation import GoldRecord, f1_score
    from axtract.filtering import ResultRecord

    def record(paper, dataset, value):
        return ResultRecord(paper_id=paper, task="T", dataset=dataset, metric="M",
                            value=value, model_name="m", leaderboard_id="x",
                            confidence=1.0, provenance=("t", 0, 0))

    def gold_rec(paper, dataset, value):
        return GoldRecord(paper_id=paper, task="T", dataset=dataset, metric="M",
                          value=value)

    perfect = evaluate_records([record("p", "D", 1.0)], [gold_rec("p", "D", 1.0)],
                               "tdms")
    assert (perfect.micro.precision, perfect.micro.recall, perfect.micro.f1) == \
        (1.0, 1.0, 1.0)

    half = evaluate_records(
        [record("p", "D1", 1.0), record("p", "DX", 9.0)],
        [gold_rec("p", "D1", 1.0), gold_rec("p", "D2", 2.0)], "tdms")
    assert (half.micro.precision, half.micro.recall, half.micro.f1) == (0.5, 0.5, 0.5)

    rng = random.Random(1234)
    for _ in range(50):
        preds = [record(f"p{rng.randint(0, 2)}", f"D{rng.randint(0, 3)}",
                        float(rng.randint(0, 2))) for _ in range(rng.randint(0, 8))]
        golds = [gold_rec(f"p{rng.randint(0, 2)}", f"D{rng.randint(0, 3)}",
                          float(rng.randint(0, 2))) for _ in range(rng.randint(0, 8))]
        for granularity in ("tdms", "tdm", "task", "dataset", "metric"):
            report = evaluate_records(preds, golds, granularity)
            for row in (report.micro, report.macro, *report.per_paper.values()):
                assert row.f1 == pytest.approx(
                    f1_score(row.precision, row.recall), abs=1e-12)
    announce("evaluation harness self-checks")


def test_extraction_determinism(corpus_config, corpus_dir):
    """Two full extract runs over the mini-corpus produce byte-identical
    records files."""
    first, _ = run_extract(corpus_config, corpus_dir / "papers")
    second, _ = run_extract(corpus_config, corpus_dir / "papers")
    assert records_to_json(first).encode() == records_to_json(second).encode()
    announce("extraction determinism", f"({len(first)} records)")
