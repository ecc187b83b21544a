"""axtract: extract machine-learning results tuples from LaTeX papers.

The pipeline ingests a LaTeX source bundle, extracts tables and text,
classifies table types, segments table cells semantically, links numeric
cells to a known taxonomy of leaderboards via evidence found in the
paper, and filters the scored candidates into final results tuples.
"""

from .abbrev import AbbreviationPair, detect_abbreviations
from .classifier import (ClassifierModel, LabeledExample, LabelDistribution,
                         TrainConfig, featurize, predict, train)
from .config import PipelineConfig
from .diagnostics import Diagnostics
from .evaluation import (EvalReport, GoldRecord, evaluate_records, load_gold,
                         topk_linking_accuracy)
from .filtering import ResultRecord, filter_results
from .gold import GoldCellRecord, GoldSegTable, load_gold_segmentation
from .index import Fragment, FragmentIndex, build_index, find_table_mentions, search
from .ingest import PaperDocument, PaperSource, extract_document, extract_tables, load_bundle
from .linking import (CellContexts, EvidenceItem, EvidenceSet, NoiseModel,
                      ScoredCandidate, gather_evidence, generate_contexts,
                      normalize_metric_value, score_leaderboards)
from .pipeline import PaperExtraction, PipelineModels, extract_paper, run_extract
from .review import AnnotationDecision, AnnotationLog, merged_results
from .segment import SegmentedTable, retrieve_cell_evidence, segment_table, train_segmenter
from .table_type import (TableTypeModel, TableTypePrediction, classify_table_type,
                         train_table_type)
from .taxonomy import (Leaderboard, Taxonomy, generate_evidences, load_taxonomy,
                       mention_probability)

__version__ = "0.1.0"
