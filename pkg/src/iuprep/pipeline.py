"""Declarative pipeline: romanize -> clean -> BPE -> tag/mix -> shards + manifest."""

from __future__ import annotations

import copy
import hashlib
import json
import logging
import os
import shutil
from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

import yaml

from . import __version__
from . import bpe as bpe_mod
from ._parallel import chunked_map
from .cleaner import CleanConfig, CleanReport, clean, evaluate_many
from .corpus import Corpus, ParallelSegment, load_parallel, stats, write_lines, write_parallel
from .mixer import (RESTART, TAG_FORMAT, MixConfig, MixConfigError, default_cycles, directions_for,
                    expand_directions, sample_stream, tag)
from .translit import TransliterationTable

log = logging.getLogger(__name__)

STAGES = ("romanize", "clean", "bpe", "mix")
SHARD_SIZE = 100_000
MANIFEST = "manifest.json"
TRAINING_CONFIG = "training_config.yaml"

# dataset weights of the submitted system; paths are placeholders to edit
SUBMITTED_DATASETS = [
    ("hansard", "en", "iu", 15),
    ("europarl-en-et", "en", "et", 2),
    ("europarl-en-fi", "en", "fi", 2),
    ("paracrawl-en-et", "en", "et", 10),
    ("paracrawl-en-fi", "en", "fi", 10),
    ("ubiqus-documents", "en", "iu", 5),
    ("ubiqus-websites", "en", "iu", 1),
]

# submitted-system hyperparameters, recorded for an external trainer only
TRAINING_DEFAULTS = {
    "architecture": "transformer",
    "heads": 12,
    "model_dim": 768,
    "ff_dim": 3072,
    "position_encoding": "relative",
    "train_steps": 100000,
    "batch_type": "tokens",
    "batch_size_initial": 50000,
    "batch_size_final": 200000,
    "precision": "mixed",
    "gpus": 6,
    "averaging": "exponential_moving_average",
    "beam_size": 5,
    "length_penalty": "average",
}


class ConfigError(ValueError):
    pass


class PipelineError(RuntimeError):
    pass


def default_config_dict() -> dict:
    return {
        "output_dir": "out",
        "seed": 1234,
        "threads": 1,
        "stages": list(STAGES),
        "romanize": {"langs": ["iu"], "table": None},
        "clean": dict(CleanConfig().as_dict(), dedup_scope="dataset"),
        "bpe": {"n_merges": 12000, "marker": bpe_mod.MARKER},
        "mix": {
            "directions": [["en", "iu"], ["iu", "en"], ["en", "fi"], ["fi", "en"],
                           ["en", "et"], ["et", "en"]],
            "tag_format": TAG_FORMAT,
            "exhaustion_policy": RESTART,
            "shuffle": True,
            "cycles": None,
            "shard_size": SHARD_SIZE,
        },
        "datasets": [
            {"name": n, "src": f"data/{n}.{s}", "tgt": f"data/{n}.{t}",
             "src_lang": s, "tgt_lang": t, "weight": w}
            for n, s, t, w in SUBMITTED_DATASETS
        ],
    }


def default_config_yaml() -> str:
    return yaml.safe_dump(default_config_dict(), sort_keys=False, allow_unicode=True)


@dataclass(frozen=True)
class DatasetEntry:
    name: str
    src: Path
    tgt: Path
    src_lang: str
    tgt_lang: str
    weight: int = 1


@dataclass(frozen=True)
class PipelineConfig:
    datasets: tuple[DatasetEntry, ...]
    output_dir: Path
    stages: tuple[str, ...] = STAGES
    seed: int = 1234
    threads: int = 1
    romanize_langs: tuple[str, ...] = ("iu",)
    translit_table: Path | None = None
    clean: CleanConfig = field(default_factory=CleanConfig)
    dedup_scope: str = "dataset"
    n_merges: int = 12000
    marker: str = bpe_mod.MARKER
    directions: tuple = ()
    tag_format: str = TAG_FORMAT
    exhaustion_policy: str = RESTART
    shuffle: bool = True
    cycles: int | None = None
    shard_size: int = SHARD_SIZE

    @classmethod
    def from_dict(cls, raw: dict, base_dir=".") -> PipelineConfig:
        """Merge ``raw`` over the defaults and validate the result.

        Relative paths are resolved against ``base_dir`` (the config file's
        directory when loaded with :meth:`from_yaml`).
        """
        d = default_config_dict()
        for key, value in (raw or {}).items():
            if key not in d:
                raise ConfigError(f"unknown config key {key!r}")
            if isinstance(d[key], dict) and isinstance(value, dict):
                unknown = set(value) - set(d[key])
                if unknown:
                    raise ConfigError(f"unknown keys under {key!r}: {sorted(unknown)}")
                d[key] = {**d[key], **value}
            else:
                d[key] = value
        base = Path(base_dir)

        def resolve(p):
            p = Path(p)
            return p if p.is_absolute() else base / p

        try:
            datasets = tuple(
                DatasetEntry(e["name"], resolve(e["src"]), resolve(e["tgt"]),
                             e["src_lang"], e["tgt_lang"], e.get("weight", 1))
                for e in d["datasets"]
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed dataset entry: {exc}") from None
        clean_d = dict(d["clean"])
        dedup_scope = clean_d.pop("dedup_scope", "dataset")
        try:
            clean_cfg = CleanConfig.from_dict(clean_d)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"clean: {exc}") from None
        mix = d["mix"]
        cfg = cls(
            datasets=datasets,
            output_dir=resolve(d["output_dir"]),
            stages=tuple(d["stages"]),
            seed=d["seed"],
            threads=d["threads"],
            romanize_langs=tuple(d["romanize"]["langs"]),
            translit_table=resolve(d["romanize"]["table"]) if d["romanize"]["table"] else None,
            clean=clean_cfg,
            dedup_scope=dedup_scope,
            n_merges=d["bpe"]["n_merges"],
            marker=d["bpe"]["marker"],
            directions=tuple(tuple(x) for x in mix["directions"]),
            tag_format=mix["tag_format"],
            exhaustion_policy=mix["exhaustion_policy"],
            shuffle=mix["shuffle"],
            cycles=mix["cycles"],
            shard_size=mix["shard_size"],
        )
        cfg.validate()
        return cfg

    @classmethod
    def from_yaml(cls, path) -> PipelineConfig:
        path = Path(path)
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
        return cls.from_dict(raw, path.parent)

    def mix_config(self) -> MixConfig:
        return MixConfig({d.name: d.weight for d in self.datasets}, self.directions,
                         self.tag_format, self.seed, self.exhaustion_policy, self.shuffle)

    def validate(self, check_paths: bool = True):
        unknown = [s for s in self.stages if s not in STAGES]
        if unknown:
            raise ConfigError(f"unknown stages: {unknown}")
        order = [STAGES.index(s) for s in self.stages]
        if order != sorted(order) or len(set(order)) != len(order):
            raise ConfigError(f"stages must run in the order {list(STAGES)}, got {list(self.stages)}")
        if not self.datasets:
            raise ConfigError("no datasets configured")
        names = [d.name for d in self.datasets]
        if len(set(names)) != len(names):
            raise ConfigError(f"dataset names must be unique: {names}")
        for d in self.datasets:
            if not isinstance(d.weight, int) or isinstance(d.weight, bool) or d.weight < 1:
                raise ConfigError(f"dataset {d.name!r}: weight must be a positive integer")
            if d.src_lang == d.tgt_lang:
                raise ConfigError(f"dataset {d.name!r}: identical languages")
            if check_paths:
                for p in (d.src, d.tgt):
                    if not p.is_file():
                        raise ConfigError(f"dataset {d.name!r}: no such file {p}")
        if check_paths and self.translit_table is not None and not self.translit_table.is_file():
            raise ConfigError(f"no such transliteration table {self.translit_table}")
        if self.dedup_scope not in ("dataset", "global"):
            raise ConfigError("clean.dedup_scope must be 'dataset' or 'global'")
        if not isinstance(self.n_merges, int) or self.n_merges < 0:
            raise ConfigError("bpe.n_merges must be a non-negative integer")
        if not isinstance(self.threads, int) or self.threads < 1:
            raise ConfigError("threads must be a positive integer")
        if not isinstance(self.shard_size, int) or self.shard_size < 1:
            raise ConfigError("mix.shard_size must be a positive integer")
        if self.cycles is not None and (not isinstance(self.cycles, int) or self.cycles < 0):
            raise ConfigError("mix.cycles must be a non-negative integer or null")
        if "mix" in self.stages:
            try:
                mix = self.mix_config()
            except MixConfigError as exc:
                raise ConfigError(f"mix: {exc}") from None
            if not mix.directions:
                raise ConfigError("mix.directions is empty")
            langs = {lang for d in self.datasets for lang in (d.src_lang, d.tgt_lang)}
            for a, b in mix.directions:
                if not {a, b} <= langs:
                    raise ConfigError(f"direction {a}-{b} is not covered by any dataset")
            for d in self.datasets:
                if not [x for x in mix.directions if set(x) == {d.src_lang, d.tgt_lang}]:
                    raise ConfigError(f"dataset {d.name!r} serves none of the configured directions")
        if "bpe" in self.stages and (not self.marker or any(c.isspace() for c in self.marker)):
            raise ConfigError("bpe.marker must be non-empty and free of whitespace")


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


@contextmanager
def _lock(output_dir: Path):
    lock = output_dir.parent / f".{output_dir.name}.lock"
    output_dir.parent.mkdir(parents=True, exist_ok=True)
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise PipelineError(f"another run holds {lock}") from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        lock.unlink(missing_ok=True)


def write_json_atomic(path: Path, obj) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(obj, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def _romanize_corpus(corpus: Corpus, langs, table: TransliterationTable) -> Corpus:
    do_src = corpus.src_lang in langs
    do_tgt = corpus.tgt_lang in langs
    if not (do_src or do_tgt):
        return corpus
    segs = [ParallelSegment(table.romanize(s.source) if do_src else s.source,
                            table.romanize(s.target) if do_tgt else s.target,
                            s.src_lang, s.tgt_lang, s.dataset_id)
            for s in corpus.segments]
    return corpus.with_segments(segs)


def _tokenize_corpus(corpus: Corpus, model: bpe_mod.BpeModel | None, threads: int):
    """Per-segment (source tokens, target tokens) after BPE (or whitespace split)."""
    if model is None:
        return [(s.source.split(), s.target.split()) for s in corpus.segments]
    fn = partial(bpe_mod.apply_lines, model.to_text())
    src = chunked_map(fn, [s.source for s in corpus.segments], threads)
    tgt = chunked_map(fn, [s.target for s in corpus.segments], threads)
    return [(a.split(), b.split()) for a, b in zip(src, tgt)]


def write_shards(examples, out_dir: Path, shard_size: int = SHARD_SIZE, prefix: str = "train") -> list[str]:
    """Write one ``tagged source<TAB>target`` line per example; return shard names."""
    out_dir.mkdir(parents=True, exist_ok=True)
    names = []
    f = None
    n = 0
    try:
        for ex in examples:
            if n % shard_size == 0:
                if f:
                    f.close()
                name = f"{prefix}.{len(names):05d}.txt"
                names.append(name)
                f = open(out_dir / name, "w", encoding="utf-8", newline="\n")
            f.write(ex.to_line())
            f.write("\n")
            n += 1
    finally:
        if f:
            f.close()
    return names


def mix_to_shards(tokenized: list[tuple[Corpus, list]], mix: MixConfig, out_dir: Path,
                  cycles: int | None = None, shard_size: int = SHARD_SIZE, vocab=None,
                  path_prefix: str = "") -> dict:
    """Tag, mix and shard pre-tokenized corpora; return the mix manifest section."""
    pools = []
    for corpus, toks in tokenized:
        dirs = directions_for(corpus, mix.directions)
        if not dirs:
            raise MixConfigError(f"corpus {corpus.name!r} serves none of the configured directions")
        tok_corpus = Corpus.from_pairs(corpus.name, corpus.src_lang, corpus.tgt_lang,
                                       ((" ".join(a), " ".join(b)) for a, b in toks))
        pool = [tag(seg.source.split(), seg.target.split(), d, mix, corpus.name, vocab)
                for seg, d in expand_directions(tok_corpus, dirs)]
        pools.append((corpus.name, pool, len(dirs)))
    n_cycles = default_cycles(pools, mix) if cycles is None else cycles
    emitted = dict.fromkeys((name for name, _, _ in pools), 0)

    def counted():
        for ex in sample_stream(pools, mix, max_cycles=n_cycles):
            emitted[ex.dataset_id] += 1
            yield ex

    shards = write_shards(counted(), out_dir, shard_size)
    total = sum(emitted.values())
    return {
        "seed": mix.seed,
        "weights": dict(mix.weights),
        "directions": [list(d) for d in mix.directions],
        "tags": mix.tag_tokens(),
        "cycle_length": mix.cycle_length,
        "cycles": total // mix.cycle_length if mix.cycle_length else 0,
        "per_cycle": {name: mix.weights[name] for name, _, _ in pools},
        "pool_sizes": {name: len(pool) for name, pool, _ in pools},
        "emitted": emitted,
        "examples": total,
        "exhaustion_policy": mix.exhaustion_policy,
        "shard_size": shard_size,
        "shards": [path_prefix + s for s in shards],
    }


def emit_training_config(cfg: PipelineConfig | None, path, shards=(), vocab: str | None = None,
                         bpe_model: str | None = None, overrides: dict | None = None) -> dict:
    """Write the trainer-facing hyperparameter file; nothing here trains a model."""
    doc = dict(TRAINING_DEFAULTS)
    doc.update(overrides or {})
    data = {"shards": list(shards)}
    if vocab:
        data["vocab"] = vocab
    if bpe_model:
        data["bpe_model"] = bpe_model
    if cfg is not None:
        data["bpe_merges"] = cfg.n_merges
        data["weights"] = {d.name: d.weight for d in cfg.datasets}
        data["cycle_length"] = sum(d.weight for d in cfg.datasets)
        data["seed"] = cfg.seed
    doc["data"] = data
    text = "# Submitted-system settings for an external NMT trainer.\n"
    text += yaml.safe_dump(doc, sort_keys=False, allow_unicode=True)
    Path(path).write_text(text, encoding="utf-8", newline="\n")
    return doc


def _execute(cfg: PipelineConfig, out: Path) -> dict:
    stages = set(cfg.stages)
    table = (TransliterationTable.from_file(cfg.translit_table) if cfg.translit_table
             else TransliterationTable.default())
    data_dir = out / "data"
    data_dir.mkdir(parents=True)

    corpora = []
    entries = []
    for d in cfg.datasets:
        corpus = load_parallel(d.src, d.tgt, d.name, d.src_lang, d.tgt_lang, d.weight)
        entries.append({
            "name": d.name, "src_lang": d.src_lang, "tgt_lang": d.tgt_lang, "weight": d.weight,
            "src_sha256": _sha256(d.src), "tgt_sha256": _sha256(d.tgt),
            "raw_stats": stats(corpus).as_dict(),
        })
        corpora.append(corpus)
    log.info("loaded %d datasets, %d segments", len(corpora), sum(map(len, corpora)))

    if "romanize" in stages:
        corpora = [_romanize_corpus(c, set(cfg.romanize_langs), table) for c in corpora]

    seen = set() if cfg.dedup_scope == "global" else None
    decide = partial(_decide, threads=cfg.threads)
    cleaned = []
    for corpus, entry in zip(corpora, entries):
        if "clean" in stages:
            corpus, report = clean(corpus, cfg.clean, seen=seen, decide=decide)
        else:
            report = CleanReport(raw=len(corpus), selected=len(corpus))
        entry["clean_report"] = report.as_dict()
        entry["selected_stats"] = stats(corpus).as_dict()
        write_parallel(corpus, data_dir / f"{corpus.name}.{corpus.src_lang}",
                       data_dir / f"{corpus.name}.{corpus.tgt_lang}")
        cleaned.append(corpus)
        log.info("%s: raw %d -> selected %d", corpus.name, report.raw, report.selected)

    manifest = {
        "tool": "iuprep",
        "version": __version__,
        "seed": cfg.seed,
        "stages": {"run": list(cfg.stages), "skipped": [s for s in STAGES if s not in stages]},
        "datasets": entries,
    }

    model = None
    vocab = subword_vocab = None
    mix_cfg = cfg.mix_config() if "mix" in stages else None
    if "bpe" in stages:
        model = bpe_mod.learn(cleaned, cfg.n_merges, cfg.marker)
        model.save(out / "bpe.model")
        vocab = subword_vocab = bpe_mod.build_vocab(model, cleaned)
        if mix_cfg is not None:
            try:
                vocab = vocab.with_reserved(mix_cfg.tag_tokens())
            except ValueError as exc:
                raise MixConfigError(str(exc)) from None
        vocab.save(out / "vocab.txt")
        manifest["bpe"] = {
            "requested_merges": cfg.n_merges,
            "learned_merges": model.n_merges,
            "marker": model.marker,
            "digest": model.digest(),
            "subword_vocab_size": subword_vocab.size,
            "vocab_size": vocab.size,
        }
        log.info("bpe: %d merges, vocab %d", model.n_merges, vocab.size)

    tokenized = [(c, _tokenize_corpus(c, model, cfg.threads)) for c in cleaned]
    if model is not None:
        for c, toks in tokenized:
            write_lines(data_dir / f"{c.name}.bpe.{c.src_lang}", (" ".join(a) for a, _ in toks))
            write_lines(data_dir / f"{c.name}.bpe.{c.tgt_lang}", (" ".join(b) for _, b in toks))

    shards = []
    if mix_cfg is not None:
        mix_section = mix_to_shards(tokenized, mix_cfg, out / "shards", cfg.cycles, cfg.shard_size,
                                    subword_vocab, path_prefix="shards/")
        shards = mix_section["shards"]
        manifest["mix"] = mix_section
        log.info("mix: %d examples in %d shards", mix_section["examples"], len(shards))

    emit_training_config(cfg, out / TRAINING_CONFIG, shards,
                         "vocab.txt" if vocab is not None else None,
                         "bpe.model" if model is not None else None)
    manifest["training_config"] = TRAINING_CONFIG
    return manifest


def _decide(segments, cfg, threads=1):
    return chunked_map(partial(evaluate_many, cfg=cfg), segments, threads)


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Run every configured stage and return the manifest.

    Outputs are assembled in a staging directory and moved into place only
    after the manifest is written, so a failed run leaves no partial tree.
    """
    cfg.validate()
    out = Path(cfg.output_dir)
    if out.exists() and any(out.iterdir()) and not (out / MANIFEST).is_file():
        raise PipelineError(f"refusing to overwrite {out}: not empty and not a previous run")
    with _lock(out):
        staging = out.parent / f".{out.name}.staging"
        if staging.exists():
            shutil.rmtree(staging)
        try:
            manifest = _execute(cfg, staging)
            write_json_atomic(staging / MANIFEST, manifest)
        except BaseException:
            shutil.rmtree(staging, ignore_errors=True)
            raise
        if out.exists():
            shutil.rmtree(out)
        os.replace(staging, out)
    return copy.deepcopy(manifest)
