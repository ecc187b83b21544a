import json
from pathlib import Path

import pytest

from axtract import gold, index, ingest
from axtract.config import PipelineConfig
from axtract.pipeline import PipelineModels

CORPUS = Path(__file__).resolve().parent.parent / "minicorpus"

PAPER_IDS = ("asr-librispeech", "effnet-image", "nmt-iwslt", "summ-giga",
             "survey-datasets")


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def corpus_config() -> PipelineConfig:
    return PipelineConfig.load(CORPUS / "config.json")


@pytest.fixture(scope="session")
def corpus_models(corpus_config) -> PipelineModels:
    return PipelineModels.load(corpus_config)


@pytest.fixture(scope="session")
def corpus_sources() -> dict:
    return {pid: ingest.load_bundle(CORPUS / "papers" / pid, paper_id=pid)
            for pid in PAPER_IDS}


@pytest.fixture(scope="session")
def corpus_docs(corpus_sources) -> dict:
    return {pid: ingest.extract_document(src)
            for pid, src in corpus_sources.items()}


@pytest.fixture(scope="session")
def corpus_indexes(corpus_docs) -> dict:
    return {pid: index.build_index(doc) for pid, doc in corpus_docs.items()}


@pytest.fixture(scope="session")
def gold_tables() -> list:
    return gold.load_gold_segmentation(CORPUS / "gold_tables.json")


@pytest.fixture(scope="session")
def gold_records_raw() -> list:
    return json.loads((CORPUS / "gold_records.json").read_text())
