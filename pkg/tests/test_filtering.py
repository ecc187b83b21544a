import random

from axtract.filtering import filter_results
from axtract.linking import ScoredCandidate
from axtract.taxonomy import Leaderboard, Taxonomy, build_taxonomy


def make_taxonomy():
    boards = [
        Leaderboard("rouge", "Summarization", "GigaWord", "Rouge-1",
                    higher_is_better=True),
        Leaderboard("wer", "Speech Recognition", "LibriSpeech", "Word Error Rate",
                    higher_is_better=False),
        Leaderboard("acc", "IC", "ImageNet", "Top 1 Accuracy",
                    higher_is_better=True),
    ]
    return build_taxonomy(boards)


def cand(board: Leaderboard, value, conf, kind="paper_model", model="Ours",
         cell=("table_1", 1, 1)):
    return ScoredCandidate(
        leaderboard_id=board.leaderboard_id, task=board.task,
        dataset=board.dataset, metric=board.metric, posterior=conf,
        cell=cell, raw_value=str(value), normalized_value=value,
        model_name=model, model_kind=kind, paper_id="p")


def reference_filter(candidates, taxonomy, t1, t2):
    """Four explicit passes, kept independent of the implementation."""
    higher = {b.leaderboard_id: b.higher_is_better for b in taxonomy.leaderboards}
    step1 = [c for c in candidates
             if c.model_kind == "paper_model" and c.normalized_value is not None]
    step2 = [c for c in step1 if c.posterior >= t1]
    step3 = []
    for board_id in {c.leaderboard_id for c in step2}:
        group = [c for c in step2 if c.leaderboard_id == board_id]
        better = max if higher.get(board_id, True) else min
        best_value = better(c.normalized_value for c in group)
        tied = [c for c in group if c.normalized_value == best_value]
        tied.sort(key=lambda c: (-c.posterior, c.cell))
        step3.append(tied[0])
    step4 = [c for c in step3 if c.posterior >= t2]
    return {(c.leaderboard_id, c.normalized_value, c.posterior, c.cell)
            for c in step4}


class TestRules:
    def test_higher_is_better_keeps_max(self):
        tax = make_taxonomy()
        rouge = tax.leaderboards[0]
        records = filter_results(
            [cand(rouge, 47.6, 0.9, model="NMT-1", cell=("t", 3, 1)),
             cand(rouge, 48.2, 0.9, model="NMT-2", cell=("t", 4, 1))],
            tax, 0.1, 0.5)
        assert len(records) == 1
        assert records[0].value == 48.2
        assert records[0].model_name == "NMT-2"

    def test_lower_is_better_keeps_min(self):
        tax = make_taxonomy()
        wer = tax.leaderboards[1]
        records = filter_results(
            [cand(wer, 5.2, 0.9, cell=("t", 1, 1)),
             cand(wer, 4.8, 0.9, cell=("t", 2, 1))],
            tax, 0.1, 0.5)
        assert [r.value for r in records] == [4.8]

    def test_cited_models_dropped(self):
        tax = make_taxonomy()
        rouge = tax.leaderboards[0]
        records = filter_results(
            [cand(rouge, 99.0, 0.99, kind="cited_model"),
             cand(rouge, 10.0, 0.8)],
            tax, 0.1, 0.5)
        assert [r.value for r in records] == [10.0]

    def test_missing_model_attribution_dropped(self):
        tax = make_taxonomy()
        records = filter_results(
            [cand(tax.leaderboards[0], 50.0, 0.9, kind=None, model=None)],
            tax, 0.1, 0.5)
        assert records == []

    def test_below_first_threshold_never_groups(self):
        tax = make_taxonomy()
        rouge = tax.leaderboards[0]
        # the better value is low-confidence; it must not evict the winner
        records = filter_results(
            [cand(rouge, 60.0, 0.05, cell=("t", 1, 1)),
             cand(rouge, 48.2, 0.9, cell=("t", 2, 1))],
            tax, 0.1, 0.5)
        assert [r.value for r in records] == [48.2]

    def test_second_threshold_after_grouping(self):
        tax = make_taxonomy()
        rouge = tax.leaderboards[0]
        # the best value survives grouping but dies at t2
        records = filter_results(
            [cand(rouge, 60.0, 0.3, cell=("t", 1, 1)),
             cand(rouge, 48.2, 0.9, cell=("t", 2, 1))],
            tax, 0.1, 0.5)
        assert records == []

    def test_value_tie_prefers_confidence_then_position(self):
        tax = make_taxonomy()
        rouge = tax.leaderboards[0]
        records = filter_results(
            [cand(rouge, 48.2, 0.7, cell=("t", 5, 1)),
             cand(rouge, 48.2, 0.9, cell=("t", 6, 1))],
            tax, 0.1, 0.5)
        assert records[0].confidence == 0.9
        records = filter_results(
            [cand(rouge, 48.2, 0.9, cell=("t", 5, 1)),
             cand(rouge, 48.2, 0.9, cell=("t", 2, 1))],
            tax, 0.1, 0.5)
        assert records[0].provenance == ("t", 2, 1)


def random_candidates(rng, taxonomy):
    kinds = ["paper_model", "paper_model", "cited_model", None]
    out = []
    for i in range(rng.randint(0, 20)):
        board = rng.choice(taxonomy.leaderboards)
        out.append(cand(
            board,
            value=round(rng.uniform(0, 100), 2),
            conf=round(rng.random(), 3),
            kind=rng.choice(kinds),
            model="M%d" % rng.randint(0, 3),
            cell=("table_%d" % rng.randint(1, 3), rng.randint(0, 5), rng.randint(0, 5)),
        ))
    return out


class TestReferenceEquivalence:
    def test_random_candidate_sets(self):
        tax = make_taxonomy()
        rng = random.Random(99)
        for _ in range(300):
            t1, t2 = rng.random() * 0.5, rng.random()
            candidates = random_candidates(rng, tax)
            got = filter_results(candidates, tax, t1, t2)
            got_set = {(r.leaderboard_id, r.value, r.confidence, r.provenance)
                       for r in got}
            assert got_set == reference_filter(candidates, tax, t1, t2)

    def test_at_most_one_per_leaderboard(self):
        tax = make_taxonomy()
        rng = random.Random(7)
        for _ in range(100):
            records = filter_results(random_candidates(rng, tax), tax,
                                     rng.random() * 0.3, rng.random())
            ids = [r.leaderboard_id for r in records]
            assert len(ids) == len(set(ids))

    def test_raising_t2_never_grows_output(self):
        tax = make_taxonomy()
        rng = random.Random(13)
        for _ in range(100):
            candidates = random_candidates(rng, tax)
            base = {(r.leaderboard_id, r.value)
                    for r in filter_results(candidates, tax, 0.1, 0.3)}
            higher = {(r.leaderboard_id, r.value)
                      for r in filter_results(candidates, tax, 0.1, 0.6)}
            assert higher <= base

    def test_raising_t1_can_grow_output(self):
        # not a bug: dropping a low-confidence best-value candidate at the
        # first threshold lets a higher-confidence runner-up win its group
        # and survive the second threshold
        tax = make_taxonomy()
        rouge = tax.leaderboards[0]
        candidates = [
            cand(rouge, 60.0, 0.2, cell=("t", 1, 1)),  # best value, low conf
            cand(rouge, 50.0, 0.9, cell=("t", 2, 1)),  # runner-up, high conf
        ]
        assert filter_results(candidates, tax, 0.1, 0.5) == []
        assert len(filter_results(candidates, tax, 0.3, 0.5)) == 1

    def test_output_is_extremum_of_survivors(self):
        tax = make_taxonomy()
        higher = {b.leaderboard_id: b.higher_is_better for b in tax.leaderboards}
        rng = random.Random(23)
        for _ in range(50):
            candidates = random_candidates(rng, tax)
            records = filter_results(candidates, tax, 0.2, 0.2)
            for r in records:
                survivors = [c.normalized_value for c in candidates
                             if c.leaderboard_id == r.leaderboard_id
                             and c.model_kind == "paper_model"
                             and c.posterior >= 0.2]
                extremum = max(survivors) if higher[r.leaderboard_id] else min(survivors)
                assert r.value == extremum
