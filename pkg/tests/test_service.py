import io
import json
import tarfile

import pytest
from fastapi.testclient import TestClient

from axtract import pipeline
from axtract.pipeline import extract_paper, save_extraction
from axtract.review import AnnotationDecision, AnnotationLog, merged_results
from axtract.service import create_app


def tar_bytes(src_dir) -> bytes:
    buf = io.BytesIO()
    with tarfile.open(fileobj=buf, mode="w:gz") as tar:
        tar.add(src_dir, arcname=".")
    return buf.getvalue()


@pytest.fixture()
def client(corpus_config, corpus_models, corpus_sources, tmp_path):
    store = tmp_path / "store"
    for pid in ("summ-giga", "effnet-image"):
        save_extraction(store, extract_paper(corpus_models, corpus_sources[pid]))
    app = create_app(corpus_config, store)
    return TestClient(app)


def numeric_cell(client, paper_id):
    view = client.get(f"/papers/{paper_id}").json()
    for table in view["tables"]:
        for r, row in enumerate(table["classes"]):
            for c, value in enumerate(row):
                if value == "numeric":
                    return table["table_id"], r, c
    raise AssertionError("no numeric cell found")


class TestEndpoints:
    def test_paper_list(self, client):
        assert client.get("/papers").json()["papers"] == ["effnet-image", "summ-giga"]

    def test_upload_triggers_extraction(self, client, corpus_dir):
        body = tar_bytes(corpus_dir / "papers" / "nmt-iwslt")
        resp = client.post("/papers?paper_id=nmt-iwslt", content=body)
        assert resp.status_code == 200
        payload = resp.json()
        assert payload["paper_id"] == "nmt-iwslt"
        assert payload["records"] == 2
        view = client.get("/papers/nmt-iwslt")
        assert view.status_code == 200

    def test_upload_garbage_is_400(self, client):
        resp = client.post("/papers", content=b"not a tarball at all")
        assert resp.status_code == 400

    def test_unknown_paper_404(self, client):
        assert client.get("/papers/ghost").status_code == 404

    def test_paper_view_shape(self, client):
        view = client.get("/papers/summ-giga").json()
        assert view["title"].startswith("Neural Abstractive")
        table = view["tables"][1]
        assert len(table["grid"]) == len(table["classes"])
        assert table["type"]["decided_type"] == "leaderboard"

    def test_candidates_top_first(self, client):
        # the 47.6 cell of the summarization table
        resp = client.get("/papers/summ-giga/cells/table_2/3/1/candidates?k=5")
        assert resp.status_code == 200
        cands = resp.json()["candidates"]
        assert len(cands) == 5
        top = cands[0]
        assert (top["task"], top["dataset"], top["metric"]) == \
            ("Summarization", "GigaWord", "Rouge-1")
        assert top["posterior"] == max(c["posterior"] for c in cands)

    def test_candidates_capped_by_taxonomy(self, client, corpus_models):
        n = len(corpus_models.taxonomy)
        resp = client.get(f"/papers/summ-giga/cells/table_2/3/1/candidates?k={n + 50}")
        assert len(resp.json()["candidates"]) == n

    def test_candidates_are_exact_truncation_of_scoring_output(
            self, client, corpus_models, corpus_sources):
        extraction = extract_paper(corpus_models, corpus_sources["summ-giga"])
        stored = extraction.candidates["table_2:3:1"]
        resp = client.get("/papers/summ-giga/cells/table_2/3/1/candidates?k=4")
        got = resp.json()["candidates"]
        assert got == [c.to_dict() for c in stored[:4]]

    def test_candidates_404s(self, client):
        assert client.get(
            "/papers/ghost/cells/table_2/3/1/candidates").status_code == 404
        assert client.get(
            "/papers/summ-giga/cells/table_9/0/0/candidates").status_code == 404
        assert client.get(
            "/papers/summ-giga/cells/table_2/99/0/candidates").status_code == 404
        # non-numeric cell has no candidate list
        assert client.get(
            "/papers/summ-giga/cells/table_2/0/0/candidates").status_code == 404


class TestAnnotations:
    def decision(self, leaderboard_id, **kw):
        base = {"paper_id": "summ-giga", "table_id": "table_2", "row": 3, "col": 1,
                "leaderboard_id": leaderboard_id}
        base.update(kw)
        return base

    def test_accept_and_results(self, client):
        cands = client.get(
            "/papers/summ-giga/cells/table_2/3/1/candidates?k=1").json()["candidates"]
        chosen = cands[0]["leaderboard_id"]
        resp = client.post("/annotations", json=self.decision(chosen, timestamp=1.0))
        assert resp.status_code == 200
        records = client.get("/papers/summ-giga/results").json()["records"]
        assert any(r["table_id"] == "table_2" and r["row"] == 3 for r in records)

    def test_unknown_leaderboard_409(self, client):
        resp = client.post("/annotations", json=self.decision("No::Such::Board"))
        assert resp.status_code == 409

    def test_malformed_body_400(self, client):
        resp = client.post("/annotations", content=b"{not json")
        assert resp.status_code == 400
        resp = client.post("/annotations", json={"paper_id": "summ-giga"})
        assert resp.status_code == 400

    def test_last_decision_wins(self, client, corpus_models):
        boards = [b.leaderboard_id for b in corpus_models.taxonomy.leaderboards[:2]]
        client.post("/annotations", json=self.decision(boards[0], timestamp=1.0))
        client.post("/annotations", json=self.decision(boards[1], timestamp=2.0))
        exported = client.get("/export").json()["annotations"]
        mine = [d for d in exported
                if (d["table_id"], d["row"], d["col"]) == ("table_2", 3, 1)]
        assert len(mine) == 1
        assert mine[0]["leaderboard_id"] == boards[1]

    def test_rejection_removes_cell_from_results(self, client):
        # reject the cell that currently produces the Rouge-1 record
        records = client.get("/papers/summ-giga/results").json()["records"]
        target = next(r for r in records if r["metric"] == "Rouge-1")
        decision = {"paper_id": "summ-giga", "table_id": target["table_id"],
                    "row": target["row"], "col": target["col"], "rejected": True}
        assert client.post("/annotations", json=decision).status_code == 200
        after = client.get("/papers/summ-giga/results").json()["records"]
        assert not any(r["table_id"] == target["table_id"]
                       and r["row"] == target["row"]
                       and r["col"] == target["col"] for r in after)

    def test_value_override_carried_to_results(self, client):
        cands = client.get(
            "/papers/summ-giga/cells/table_2/4/1/candidates?k=1").json()["candidates"]
        decision = {"paper_id": "summ-giga", "table_id": "table_2", "row": 4, "col": 1,
                    "leaderboard_id": cands[0]["leaderboard_id"],
                    "value_override": 0.844}
        client.post("/annotations", json=decision)
        records = client.get("/papers/summ-giga/results").json()["records"]
        overridden = [r for r in records if r["row"] == 4 and r["col"] == 1]
        assert overridden and overridden[0]["value"] == 0.844


class TestAnnotationLog:
    def test_log_replay_equals_export(self, tmp_path, corpus_models):
        log = AnnotationLog(tmp_path)
        import random
        rng = random.Random(4)
        boards = [b.leaderboard_id for b in corpus_models.taxonomy.leaderboards]
        expected_latest = {}
        for i in range(100):
            decision = AnnotationDecision(
                paper_id="p", table_id=f"table_{rng.randint(1, 3)}",
                row=rng.randint(0, 3), col=rng.randint(0, 3),
                leaderboard_id=rng.choice(boards), timestamp=float(i + 1))
            log.append(decision, corpus_models.taxonomy)
            expected_latest[decision.cell()] = decision
        replayed = log.latest_per_cell()
        assert {k: d.to_dict() for k, d in replayed.items()} == \
            {k: d.to_dict() for k, d in expected_latest.items()}

    def test_incremental_view_matches_recompute(self, tmp_path, corpus_models,
                                                corpus_sources):
        extraction = extract_paper(corpus_models, corpus_sources["summ-giga"])
        log = AnnotationLog(tmp_path)
        key = next(iter(extraction.candidates))
        table_id, row, col = key.rsplit(":", 2)
        decision = AnnotationDecision(
            paper_id="summ-giga", table_id=table_id, row=int(row), col=int(col),
            leaderboard_id=extraction.candidates[key][0].leaderboard_id,
            timestamp=1.0)
        log.append(decision, corpus_models.taxonomy)
        merged_once = merged_results(extraction, log, corpus_models.taxonomy)
        merged_again = merged_results(extraction, log, corpus_models.taxonomy)
        assert [r.to_dict() for r in merged_once] == [r.to_dict() for r in merged_again]
