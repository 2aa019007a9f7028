"""Fine-tuning bridge: prompt corpora in, adapter checkpoints and Yes/No scores out."""

from .corpus import CorpusError, CorpusRow, load_corpus
from .model import build_tiny_causal_lm, load_base_model, weights_hash
from .predict import Prediction, predict, score_rows, write_score_dump
from .tokenizer import CharTokenizer
from .tuning import TuneConfig, TuningStage, attach_adapter, finetune, run_two_step

__version__ = "0.1.0"
