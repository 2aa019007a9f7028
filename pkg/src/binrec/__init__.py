"""Binary-code collaborative filtering toolkit.

Trains binarized user/item embeddings with straight-through gradients,
renders the codes as 0/1 or dot-decimal text, generates Yes/No
instruction-tuning corpora around them, and evaluates AUC/UAUC over
all/warm/cold segments.
"""

from .codec import (
    CodeFormat,
    CodeText,
    binary_string_to_code,
    code_to_binary_string,
    compress_dot_decimal,
    compression_stats,
    decompress_dot_decimal,
    render_code,
)
from .collab import (
    BinarizationHead,
    CodeTable,
    CollabModel,
    TrainConfig,
    binarize,
    embed,
    encode_all,
    init_model,
    score_binmf,
    score_mf,
    ste_backward,
    train_binmf,
    train_mf,
)
from .dataset import (
    CatalogSchema,
    Interaction,
    LabeledInteraction,
    Segment,
    SplitSet,
    TableSchema,
    binarize_labels,
    chronological_split,
    index_arrays,
    ingest_interactions,
    load_item_catalog,
    partition_warm_cold,
)
from .evaluation import (
    MetricsReport,
    ScoredExample,
    auc,
    bitwise_and_score,
    evaluate,
    uauc,
)
from .promptgen import (
    CorpusMode,
    PromptRecord,
    PromptTemplate,
    build_corpus,
    completion_for_label,
    render_prompt,
    write_corpus,
)

__version__ = "0.1.0"
