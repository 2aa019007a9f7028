"""Build an instruction-tuning corpus: prompts with and without code fields.

Run: python demos/03_prompt_corpus.py
"""

from binrec.codec import CodeFormat, CodeText
from binrec.dataset import LabeledInteraction, chronological_split
from binrec.promptgen import CorpusMode, PromptTemplate, build_corpus, render_prompt

# A user's prompt carries their positively rated history (titles) plus the
# user/item codes; the completion is the Yes/No click label.
prompt = render_prompt(
    PromptTemplate(),
    history_titles=["The Hobbit", "A Wizard of Earthsea"],
    codes=(CodeText("172.16.254.1", CodeFormat.DOT_DECIMAL),
           CodeText("88.99.100.101", CodeFormat.DOT_DECIMAL)),
    target_title="The Left Hand of Darkness",
    mode=CorpusMode.FULL,
)
print(prompt)
print()

# The text-only variant (stage one of two-step tuning) drops the code fields:
print(render_prompt(PromptTemplate(), ["The Hobbit"], None, "Dune", CorpusMode.TEXT_ONLY))
print()

# Corpus generation walks a split chronologically; each record's history only
# ever contains that user's strictly earlier positives, never the target.
rows = [
    LabeledInteraction("u1", "i1", 5.0, 100, 1),
    LabeledInteraction("u1", "i2", 2.0, 200, 0),
    LabeledInteraction("u1", "i3", 4.0, 300, 1),
    LabeledInteraction("u1", "i4", 5.0, 400, 1),
    LabeledInteraction("u1", "i5", 1.0, 500, 0),
]
split = chronological_split(rows, (0.6, 0.2, 0.2))
catalog = {f"i{k}": f"Book No. {k}" for k in range(1, 6)}
codes = {("user", "u1"): "10100101"}
codes.update({("item", f"i{k}"): f"0101010{k % 2}" for k in range(1, 6)})

for record in build_corpus(split, catalog, codes, mode="full", partition="train"):
    print(f"[{record.completion}] {record.prompt[:90]}...")
