"""Clean raw note text and stream a corpus one sentence at a time.

Run with ``python demos/01_cleaning_and_streaming.py``.
"""

import tempfile
from pathlib import Path

from notevec.corpus import SentenceStream, normalize_text, split_sentences

raw = "Pt is a 67 y/o male w/ COPD; SOB x3 days. Denies fever? Uses inhaler BID!"

# Digits vanish, punctuation other than sentence breaks turns into spaces.
print("normalized:", normalize_text(raw))
for sentence in split_sentences(normalize_text(raw)):
    print("sentence:  ", sentence)

with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    (root / "a.txt").write_text(raw + "\n" + raw + "\n")
    (root / "b.txt").write_text("Cough improved. Follow up in 2 weeks.\n")

    # The stream can be iterated more than once, which training relies on.
    stream = SentenceStream(root)
    print("sentences per pass:", sum(1 for _ in stream), sum(1 for _ in stream))
    print("with dedupe:       ", sum(1 for _ in SentenceStream(root, dedupe=True)))
