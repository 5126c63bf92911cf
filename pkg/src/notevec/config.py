"""Flat ``key = value`` pipeline configuration.

Keys carry their section as a dotted prefix (``train.dim``). Relative paths
resolve against the directory of the config file, or the working directory
when no file is given.
"""

import configparser
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from .embedding import TrainConfig
from .errors import ParameterError
from .features import MODES, default_seeds_path
from .synth import TopicSpec

DEFAULTS = {
    "corpus_dir": "corpus",
    "clean_dir": "corpus_clean",
    "notes_csv": "notes.csv",
    "labels_csv": "labels.csv",
    "model_path": "model.txt",
    "seeds_file": "",
    "bags_dir": "bags",
    "clusters_csv": "wordclusters.csv",
    "sim_table_csv": "wordClusterSimilarity.csv",
    "features_dir": "features",
    "report_path": "report.txt",
    "corpus.dedupe": False,
    "train.dim": 500,
    "train.window": 10,
    "train.min_count": 100,
    "train.negatives": 5,
    "train.epochs": 5,
    "train.lr": 0.025,
    "train.seed": 1,
    "train.workers": 1,
    "train.subsample": 0.0,
    "bags.topn": 200,
    "cluster.k": 150,
    "cluster.max_iter": 100,
    "cluster.tol": 1e-10,
    "cluster.seed": 84,
    "model.rounds": 100,
    "model.cutoff_date": "2014-07-01",
    "score.modes": "bags,percentage,affinity",
    "score.strict_compat": False,
    "synth.n_topics": 2,
    "synth.words_per_topic": 30,
    "synth.shared_words": 20,
    "synth.sentence_min": 5,
    "synth.sentence_max": 12,
    "synth.purity": 0.8,
    "synth.n_sentences": 5000,
    "synth.min_count": 5,
    "synth.n_encounters": 500,
    "synth.cutoff_fraction": 0.8,
    "synth.signal_beta": 8.0,
    "synth.seed": 0,
}

PATH_KEYS = [k for k, v in DEFAULTS.items() if "." not in k]
SEED_KEYS = ("train.seed", "cluster.seed", "synth.seed")


def _coerce(key, raw):
    default = DEFAULTS[key]
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if isinstance(default, bool):
            lowered = text.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise ParameterError(f"config key {key}: cannot parse {raw!r}") from None
    return text


@dataclass
class PipelineConfig:
    values: dict = field(default_factory=lambda: dict(DEFAULTS))
    base_dir: Path = field(default_factory=Path.cwd)

    @classmethod
    def load(cls, path=None, overrides=None):
        values = dict(DEFAULTS)
        base = Path.cwd()
        if path is not None:
            path = Path(path)
            parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
            parser.optionxform = str
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as exc:
                raise ParameterError(f"cannot read config file {path}: {exc.strerror}") from exc
            parser.read_string("[pipeline]\n" + text, source=str(path))
            for key, raw in parser["pipeline"].items():
                if key not in DEFAULTS:
                    raise ParameterError(f"unknown config key {key!r} in {path}")
                values[key] = _coerce(key, raw)
            base = path.resolve().parent
        for key, raw in (overrides or {}).items():
            if key not in DEFAULTS:
                raise ParameterError(f"unknown config key {key!r}")
            values[key] = _coerce(key, raw)
        config = cls(values, base)
        config.validate()
        return config

    def __getitem__(self, key):
        return self.values[key]

    def path(self, key):
        value = self.values[key]
        if not value:
            return None
        p = Path(value)
        return p if p.is_absolute() else self.base_dir / p

    def seeds_path(self):
        return self.path("seeds_file") or default_seeds_path()

    def cutoff(self):
        try:
            return date.fromisoformat(self.values["model.cutoff_date"])
        except ValueError:
            raise ParameterError("model.cutoff_date must be YYYY-MM-DD") from None

    def modes(self):
        modes = [m.strip() for m in self.values["score.modes"].split(",") if m.strip()]
        unknown = [m for m in modes if m not in MODES]
        if unknown:
            raise ParameterError(f"unknown score modes {unknown}; choose from {list(MODES)}")
        return modes

    def train_config(self):
        v = self.values
        return TrainConfig(
            dim=v["train.dim"],
            window=v["train.window"],
            min_count=v["train.min_count"],
            negatives=v["train.negatives"],
            epochs=v["train.epochs"],
            initial_lr=v["train.lr"],
            rng_seed=v["train.seed"],
            workers=v["train.workers"],
            subsample_threshold=v["train.subsample"],
        )

    def topic_spec(self):
        v = self.values
        return TopicSpec(
            n_topics=v["synth.n_topics"],
            words_per_topic=v["synth.words_per_topic"],
            shared_words=v["synth.shared_words"],
            sentence_min=v["synth.sentence_min"],
            sentence_max=v["synth.sentence_max"],
            topic_purity=v["synth.purity"],
            n_sentences=v["synth.n_sentences"],
            min_count=v["synth.min_count"],
            rng_seed=v["synth.seed"],
        )

    def validate(self):
        self.train_config()
        self.topic_spec().validate()
        self.cutoff()
        self.modes()
        v = self.values
        if v["bags.topn"] < 1:
            raise ParameterError("bags.topn must be >= 1")
        if v["cluster.k"] < 1 or v["cluster.max_iter"] < 0 or v["cluster.tol"] < 0:
            raise ParameterError("cluster.k >= 1, cluster.max_iter >= 0 and cluster.tol >= 0 required")
        if v["model.rounds"] < 1:
            raise ParameterError("model.rounds must be >= 1")
        if v["synth.n_encounters"] < 20:
            raise ParameterError("synth.n_encounters must be >= 20")
        if not 0 < v["synth.cutoff_fraction"] < 1:
            raise ParameterError("synth.cutoff_fraction must lie in (0, 1)")

    def dump(self):
        lines = []
        for key, value in self.values.items():
            if isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"
