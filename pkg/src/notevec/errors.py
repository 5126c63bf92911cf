"""Exception hierarchy shared by every pipeline stage.

Each exception carries a ``category`` used by the command line front end to
print ``error:<category>:<message>`` lines.
"""


class PipelineError(Exception):
    category = "pipeline"


class ParameterError(PipelineError, ValueError):
    category = "parameter"


class SchemaError(PipelineError, ValueError):
    category = "schema"


class FormatError(PipelineError, ValueError):
    """Malformed file content; ``line`` is 1-based when known."""

    category = "format"

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{':'.join(where)}: {message}"
        super().__init__(message)


class EmptyVocabularyError(PipelineError, ValueError):
    category = "empty-vocabulary"


class VocabularyLookupError(PipelineError, KeyError):
    category = "lookup"

    def __init__(self, word):
        self.word = word
        super().__init__(word)

    def __str__(self):
        return f"word not in vocabulary: {self.word!r}"


class DomainError(PipelineError, ValueError):
    category = "domain"


class TrainingError(PipelineError, ValueError):
    category = "training"


class UndefinedAucError(PipelineError, ValueError):
    category = "undefined-auc"


class EmptyPartitionError(PipelineError, ValueError):
    category = "empty-partition"


class CorpusIOError(PipelineError, OSError):
    category = "io"
