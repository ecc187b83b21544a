import json

from click.testing import CliRunner

from axtract.cli import main


def invoke(*args):
    runner = CliRunner()
    result = runner.invoke(main, [str(a) for a in args], catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


class TestCli:
    def test_extract_writes_records(self, corpus_dir, tmp_path):
        out = tmp_path / "results.json"
        diag = tmp_path / "diag.jsonl"
        invoke("extract", "--config", corpus_dir / "config.json",
               "--source", corpus_dir / "papers" / "effnet-image",
               "--out", out, "--diagnostics", diag)
        records = json.loads(out.read_text())
        assert len(records) == 2
        assert {r["metric"] for r in records} == {"Top 1 Accuracy", "Top 5 Accuracy"}
        assert diag.exists()

    def test_extract_single_archive(self, corpus_dir, tmp_path):
        import tarfile
        archive = tmp_path / "summ-giga.tar.gz"
        with tarfile.open(archive, "w:gz") as tar:
            tar.add(corpus_dir / "papers" / "summ-giga", arcname=".")
        out = tmp_path / "results.json"
        invoke("extract", "--config", corpus_dir / "config.json",
               "--source", archive, "--out", out)
        records = json.loads(out.read_text())
        assert {r["metric"] for r in records} == {"Rouge-1", "Rouge-2", "Rouge-L"}

    def test_train_commands_round_trip(self, corpus_dir, tmp_path):
        invoke("train-table-type", "--gold", corpus_dir / "gold_tables.json",
               "--out", tmp_path / "tt.json")
        invoke("train-segmenter", "--gold", corpus_dir / "gold_tables.json",
               "--sources", corpus_dir / "papers",
               "--out", tmp_path / "seg.json")
        # models trained through the CLI drive a full extraction
        config = json.loads((corpus_dir / "config.json").read_text())
        config["taxonomy"] = str((corpus_dir / "taxonomy.json").resolve())
        config["curated_mentions"] = str((corpus_dir / "curated_mentions.json").resolve())
        config["abbreviations"] = str((corpus_dir / "abbreviations.tsv").resolve())
        config["table_type_model"] = "tt.json"
        config["segmenter_model"] = "seg.json"
        (tmp_path / "config.json").write_text(json.dumps(config))
        out = tmp_path / "results.json"
        invoke("extract", "--config", tmp_path / "config.json",
               "--source", corpus_dir / "papers" / "asr-librispeech",
               "--out", out)
        records = json.loads(out.read_text())
        assert [r["value"] for r in records] == [3.8]

    def test_evaluate_text_and_json(self, corpus_dir, tmp_path):
        out = tmp_path / "results.json"
        invoke("extract", "--config", corpus_dir / "config.json",
               "--source", corpus_dir / "papers", "--out", out)
        result = invoke("evaluate", "--pred", out,
                        "--gold", corpus_dir / "gold_records.json",
                        "--granularity", "tdms",
                        "--taxonomy", corpus_dir / "taxonomy.json")
        assert "micro" in result.output
        assert "1.0000" in result.output
        result = invoke("evaluate", "--pred", out,
                        "--gold", corpus_dir / "gold_records.json",
                        "--granularity", "tdm", "--json")
        payload = json.loads(result.output)
        assert payload["micro"]["f1"] == 1.0

    def test_link_eval(self, corpus_dir):
        result = invoke("link-eval", "--config", corpus_dir / "config.json",
                        "--gold-seg", corpus_dir / "gold_tables.json",
                        "--k", 5, "--sources", corpus_dir / "papers")
        payload = json.loads(result.output)
        assert payload["k"] == 5
        assert payload["accuracy"]["leaderboard"] == 1.0

    def test_detect_abbrevs(self, corpus_dir, tmp_path):
        out = tmp_path / "abbrev.tsv"
        invoke("detect-abbrevs", "--sources", corpus_dir / "papers", "--out", out)
        lines = out.read_text().splitlines()
        shorts = {line.split("\t")[0].lower() for line in lines}
        assert {"en-vi", "en-fr", "wer"} <= shorts
