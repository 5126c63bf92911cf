"""Note ingestion, cleaning and sentence streaming.

Cleaning keeps letters and the four sentence delimiters ``. ; ? !``; digits are
dropped outright and every other character becomes a word break. Sentences are
streamed lazily so a corpus directory never has to fit in memory.
"""

import csv
import hashlib
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CorpusIOError, FormatError, SchemaError

DELIMITERS = ".;?!"

_DIGITS = re.compile(r"[0-9]+")
_NON_KEPT = re.compile(r"[^a-z.;?! ]")
_SPACES = re.compile(r" {2,}")
_SPLIT = re.compile(r"[.;?!]")

ID_COLUMN = "PAT_ENC_CSN_ID"
TEXT_COLUMN = "NOTE_TEXT"


@dataclass(frozen=True)
class RawNote:
    encounter_id: str
    note_text: str

    def __post_init__(self):
        if not self.encounter_id:
            raise SchemaError("encounter_id must be non-empty")


@dataclass(frozen=True)
class CleanNote:
    encounter_id: str
    tokens: list = field(default_factory=list)


def normalize_text(raw):
    """Lowercase, drop digits, blank out punctuation other than delimiters.

    >>> normalize_text("Pt O2 sat 88%, stable.")
    'pt o sat stable.'
    """
    text = _DIGITS.sub("", raw.lower())
    text = _NON_KEPT.sub(" ", text)
    return _SPACES.sub(" ", text).strip()


def split_sentences(clean):
    """Split normalized text on delimiters into lists of tokens."""
    sentences = []
    for segment in _SPLIT.split(clean):
        tokens = segment.split()
        if tokens:
            sentences.append(tokens)
    return sentences


def tokenize(raw):
    """All tokens of a raw text with sentence boundaries discarded."""
    return [tok for sent in split_sentences(normalize_text(raw)) for tok in sent]


def _list_files(path):
    if path.is_dir():
        return sorted(p for p in path.iterdir() if p.is_file() and not p.name.startswith("."))
    return [path]


class SentenceStream:
    """Re-iterable stream of cleaned sentences over a file or directory.

    Files are visited in filename order and read line by line. Each call to
    ``iter`` starts a fresh pass, which is what vocabulary building followed
    by training needs.

    With ``dedupe=True`` a raw line identical to one already seen during the
    current pass is skipped; only a 16-byte digest per distinct line is kept.
    """

    def __init__(self, source, dedupe=False):
        self.source = Path(source)
        self.dedupe = dedupe
        if not self.source.exists():
            raise CorpusIOError(f"cannot read corpus path: {self.source}")

    def files(self):
        return _list_files(self.source)

    def __iter__(self):
        for _, line in _raw_lines(self.files(), self.dedupe):
            yield from split_sentences(normalize_text(line))


def _raw_lines(files, dedupe):
    seen = set()
    for path in files:
        try:
            handle = open(path, encoding="utf-8", errors="replace")
        except OSError as exc:
            raise CorpusIOError(f"cannot read corpus file: {path}: {exc.strerror}") from exc
        with handle:
            for line in handle:
                if dedupe:
                    digest = hashlib.blake2b(line.encode("utf-8"), digest_size=16).digest()
                    if digest in seen:
                        continue
                    seen.add(digest)
                yield path, line


def stream_corpus(source, dedupe=False):
    return SentenceStream(source, dedupe=dedupe)


def load_notes(path):
    """Read a notes CSV with ``PAT_ENC_CSN_ID`` and ``NOTE_TEXT`` columns."""
    path = Path(path)
    notes = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header {ID_COLUMN},{TEXT_COLUMN}")
        except csv.Error as exc:
            raise FormatError(str(exc), line=1, path=path) from exc
        header = [h.strip().lstrip("\ufeff") for h in header]
        for column in (ID_COLUMN, TEXT_COLUMN):
            if column not in header:
                raise SchemaError(f"{path}: missing required column {column}")
        id_at, text_at = header.index(ID_COLUMN), header.index(TEXT_COLUMN)
        row_number = 0
        while True:
            try:
                row = next(reader)
            except StopIteration:
                break
            except csv.Error as exc:
                raise FormatError(f"unparseable row {row_number + 1}: {exc}", line=reader.line_num, path=path) from exc
            row_number += 1
            if not row:
                continue
            if len(row) != len(header):
                raise FormatError(
                    f"row {row_number} has {len(row)} fields, expected {len(header)}",
                    line=reader.line_num,
                    path=path,
                )
            encounter_id = row[id_at].strip()
            if not encounter_id:
                raise FormatError(f"row {row_number} has an empty {ID_COLUMN}", line=reader.line_num, path=path)
            notes.append(RawNote(encounter_id, row[text_at]))
    return notes


def write_notes(notes, path):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow([ID_COLUMN, TEXT_COLUMN])
        for note in notes:
            writer.writerow([note.encounter_id, note.note_text])


def clean_notes(notes):
    return [CleanNote(note.encounter_id, tokenize(note.note_text)) for note in notes]


def write_clean_mirror(source, target, dedupe=False):
    """Write the cleaned sentences of every corpus file, one sentence per line.

    The output is a fixed point of cleaning: streaming the mirror yields the
    same sentences as streaming the source. Returns the written paths.
    """
    source, target = Path(source), Path(target)
    stream = SentenceStream(source, dedupe=dedupe)
    os.makedirs(target, exist_ok=True)
    files = stream.files()
    for path in files:
        # truncate every target up front so files with no surviving lines still exist
        open(target / path.name, "w").close()
    sink, current = None, None
    try:
        for path, line in _raw_lines(files, dedupe):
            if path != current:
                if sink is not None:
                    sink.close()
                sink, current = open(target / path.name, "a", encoding="utf-8"), path
            for sentence in split_sentences(normalize_text(line)):
                sink.write(" ".join(sentence) + "\n")
    finally:
        if sink is not None:
            sink.close()
    return [target / path.name for path in files]
