"""Command line front end: one subcommand per pipeline stage.

Every config key doubles as a ``--<key>`` flag. Failures print a single
``error:<category>:<message>`` line on stderr and exit non-zero (2 for an
out-of-vocabulary word, 1 otherwise).
"""

import argparse
import logging
import sys
from pathlib import Path

from . import corpus, embedding, features, learn, synth, vecops
from .config import DEFAULTS, SEED_KEYS, PipelineConfig
from .errors import CorpusIOError, PipelineError, VocabularyLookupError

log = logging.getLogger("notevec")

EXIT_LOOKUP = 2


def _require(path, what):
    if path is None or not Path(path).exists():
        raise CorpusIOError(f"{what} not found: {path}")
    return path


def cmd_clean(config):
    source = _require(config.path("corpus_dir"), "corpus_dir")
    written = corpus.write_clean_mirror(source, config.path("clean_dir"), dedupe=config["corpus.dedupe"])
    log.info("cleaned %d file(s) into %s", len(written), config.path("clean_dir"))
    return written


def cmd_train(config):
    source = _require(config.path("clean_dir"), "clean_dir")
    settings = config.train_config()
    sentences = corpus.stream_corpus(source, dedupe=config["corpus.dedupe"])
    log.info("building vocabulary")
    vocab = embedding.build_vocab(sentences, settings.min_count)
    log.info("training %d words x %d dims", len(vocab), settings.dim)
    model = embedding.init_model(vocab, settings)
    embedding.train(model, sentences, settings)
    embedding.save_model(model, config.path("model_path"))
    return model


def _load_model(config):
    return embedding.load_model(_require(config.path("model_path"), "model_path"))


def cmd_similar(config, word, topn, out=None):
    out = out or sys.stdout
    model = _load_model(config)
    neighbors = vecops.most_similar(model, word, topn)
    for neighbor, score in neighbors:
        out.write(f"{neighbor},{score:.6f}\n")
    return neighbors


def cmd_bags(config):
    model = _load_model(config)
    seeds = features.read_seeds(_require(config.seeds_path(), "seeds_file"))
    bags_dir = config.path("bags_dir")
    bags_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for seed in dict.fromkeys(seeds):
        if seed not in model.vocab:
            log.warning("seed %r not in vocabulary, skipped", seed)
            continue
        bag = vecops.build_seed_bag(model, seed, config["bags.topn"])
        path = bags_dir / f"{seed}.csv"
        vecops.write_seed_bag(bag, path)
        written.append(path)
    log.info("wrote %d seed bag(s) to %s", len(written), bags_dir)
    return written


def cmd_cluster(config):
    model = _load_model(config)
    clusters = vecops.cluster_model(
        model,
        config["cluster.k"],
        rng_seed=config["cluster.seed"],
        max_iter=config["cluster.max_iter"],
        tol=config["cluster.tol"],
    )
    vecops.write_clusters(clusters, config.path("clusters_csv"), words=model.vocab.words)
    vecops.write_sim_table(vecops.build_sim_table(model, clusters), config.path("sim_table_csv"))
    return clusters


def _read_bags(config):
    bags_dir = _require(config.path("bags_dir"), "bags_dir")
    return [vecops.read_seed_bag(p, topn=config["bags.topn"]) for p in sorted(Path(bags_dir).glob("*.csv"))]


def cmd_score(config):
    notes = corpus.clean_notes(corpus.load_notes(_require(config.path("notes_csv"), "notes_csv")))
    out_dir = config.path("features_dir")
    out_dir.mkdir(parents=True, exist_ok=True)
    strict = config["score.strict_compat"]
    written = {}
    modes = config.modes()
    if "bags" in modes:
        bags = _read_bags(config)
        if not bags:
            log.warning("no seed bags found in %s", config.path("bags_dir"))
        else:
            table = features.build_feature_table(notes, bags)
            written["bags"] = features.write_bag_features(table, out_dir / "bags")
    cluster_modes = [m for m in modes if m != "bags"]
    if cluster_modes:
        clusters = vecops.read_clusters(_require(config.path("clusters_csv"), "clusters_csv"))
        sims = None
        if "affinity" in cluster_modes:
            sims = vecops.read_sim_table(_require(config.path("sim_table_csv"), "sim_table_csv"))
        for mode in cluster_modes:
            table = features.build_feature_table(notes, clusters, mode, sims=sims, strict_compat=strict)
            path = out_dir / f"cluster_{mode}.csv"
            features.write_cluster_features(table, path)
            written[mode] = path
    return written


def feature_sets(config):
    """Feature tables present under ``features_dir``, keyed by set name."""
    out_dir = config.path("features_dir")
    sets = {}
    bags_dir = out_dir / "bags"
    if bags_dir.is_dir() and any(bags_dir.glob("*.csv")):
        sets["bags"] = features.read_bag_features(bags_dir)
    for mode in ("percentage", "affinity"):
        path = out_dir / f"cluster_{mode}.csv"
        if path.exists():
            sets[mode] = features.read_table(path)
    return sets


def cmd_evaluate(config, out=None):
    out = out or sys.stdout
    records = learn.load_labels(_require(config.path("labels_csv"), "labels_csv"))
    cutoff, rounds = config.cutoff(), config["model.rounds"]
    results = {}
    for name, table in feature_sets(config).items():
        results[name] = learn.evaluate_pipeline(table, records, cutoff, rounds)
    if any(r.lace is not None for r in records):
        results["baseline_lace"] = learn.evaluate_pipeline(learn.baseline_table(records), records, cutoff, rounds)
    if not results:
        log.warning("no feature sets found in %s", config.path("features_dir"))
    report = learn.format_report(results)
    out.write(report)
    report_path = config.path("report_path")
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(report, encoding="utf-8")
    return results


def cmd_synth(config):
    v = config.values
    dataset = synth.gen_labeled_encounters(
        config.topic_spec(),
        n_encounters=v["synth.n_encounters"],
        cutoff_fraction=v["synth.cutoff_fraction"],
        signal_beta=v["synth.signal_beta"],
        cutoff=config.cutoff(),
    )
    synth.write_dataset(
        dataset,
        config.path("corpus_dir"),
        config.path("notes_csv"),
        config.path("labels_csv"),
        seeds_file=config.path("seeds_file"),
        rng_seed=v["synth.seed"],
    )
    if config.path("seeds_file") is None:
        log.warning("seeds_file not set; synthetic seed words not written")
    return dataset


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="pipeline config file")
    common.add_argument("--seed", type=int, help="override every rng seed")
    common.add_argument("--workers", type=int, help="override train.workers")
    common.add_argument("--verbose", action="store_true")
    keys = common.add_argument_group("config keys")
    for key in DEFAULTS:
        keys.add_argument(f"--{key}", dest=f"key:{key}", metavar="VALUE")

    parser = argparse.ArgumentParser(prog="notevec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("clean", "write a cleaned mirror of corpus_dir into clean_dir"),
        ("train", "train word vectors on clean_dir and save model_path"),
        ("bags", "write a seed-bag CSV per in-vocabulary seed"),
        ("cluster", "spherical k-means over the model; write cluster and similarity CSVs"),
        ("score", "write feature CSVs for notes_csv"),
        ("evaluate", "boost, score and report test AUC per feature set"),
        ("synth", "generate a synthetic corpus, notes and labels"),
    ]:
        sub.add_parser(name, parents=[common], help=help_text)
    similar = sub.add_parser("similar", parents=[common], help="nearest words by cosine")
    similar.add_argument("word")
    similar.add_argument("--topn", type=int, default=10)
    return parser


def _overrides(args):
    overrides = {k[len("key:"):]: v for k, v in vars(args).items() if k.startswith("key:") and v is not None}
    if args.seed is not None:
        for key in SEED_KEYS:
            overrides.setdefault(key, str(args.seed))
    if args.workers is not None:
        overrides.setdefault("train.workers", str(args.workers))
    return overrides


def run(argv=None, out=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s:%(name)s:%(message)s",
        force=True,
    )
    config = PipelineConfig.load(args.config, _overrides(args))
    command = args.command
    if command == "similar":
        return cmd_similar(config, args.word, args.topn, out=out)
    if command == "evaluate":
        return cmd_evaluate(config, out=out)
    return {
        "clean": cmd_clean,
        "train": cmd_train,
        "bags": cmd_bags,
        "cluster": cmd_cluster,
        "score": cmd_score,
        "synth": cmd_synth,
    }[command](config)


def main(argv=None):
    try:
        run(argv)
    except VocabularyLookupError as exc:
        print(f"error:{exc.category}:{exc}", file=sys.stderr)
        return EXIT_LOOKUP
    except PipelineError as exc:
        print(f"error:{exc.category}:{exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error:io:{exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
