"""Command-line entry point: ``iuprep <subcommand>``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from dataclasses import replace
from functools import partial
from pathlib import Path

import yaml

from . import __version__
from . import bpe as bpe_mod
from ._parallel import chunked_map
from .cleaner import RULES, CleanConfig, clean, evaluate_many
from .corpus import AlignmentError, CorpusDecodeError, load_parallel, stats, write_parallel
from .metrics import corpus_bleu
from .mixer import RESTART, STOP, TAG_FORMAT, MixConfig, MixConfigError
from .pipeline import (MANIFEST, ConfigError, PipelineConfig, PipelineError, default_config_yaml,
                       mix_to_shards, run_pipeline, write_json_atomic)
from .translit import TransliterationTable

log = logging.getLogger("iuprep")


def _read_input(paths):
    if not paths:
        return sys.stdin.read()
    return "".join(Path(p).read_text(encoding="utf-8") for p in paths)


def _lines(text: str) -> list[str]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def _emit(lines, output):
    text = "".join(line + "\n" for line in lines)
    if output:
        Path(output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _direction(s: str) -> tuple[str, str]:
    a, sep, b = s.partition("-")
    if not sep or not a or not b:
        raise argparse.ArgumentTypeError(f"direction must look like en-iu, got {s!r}")
    return a, b


def cmd_translit(args):
    table = TransliterationTable.from_file(args.table) if args.table else TransliterationTable.default()
    fn = table.romanize if args.command == "romanize" else table.deromanize
    _emit([fn(line) for line in _lines(_read_input(args.files))], args.output)


def cmd_clean(args):
    disabled = set(args.disable or ())
    cfg = CleanConfig(args.min_avg_token_len, args.max_avg_token_len, args.max_char_ratio,
                      rules_enabled=frozenset(RULES) - disabled)
    corpus = load_parallel(args.src, args.tgt, args.name, args.src_lang, args.tgt_lang)
    decide = partial(_decide, threads=args.threads)
    cleaned, report = clean(corpus, cfg, decide=decide)
    write_parallel(cleaned, args.out_src, args.out_tgt)
    text = report.to_text()
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    if not args.quiet:
        sys.stdout.write(text)


def _decide(segments, cfg, threads=1):
    return chunked_map(partial(evaluate_many, cfg=cfg), segments, threads)


def cmd_learn_bpe(args):
    counts = Counter()
    for path in args.files:
        for line in _lines(Path(path).read_text(encoding="utf-8")):
            counts.update(line.split())
    model = bpe_mod.learn_from_counts(counts, args.merges, args.marker)
    model.save(args.output)
    log.info("learned %d of %d merges -> %s", model.n_merges, args.merges, args.output)
    if args.vocab:
        vocab = Counter()
        for word, n in counts.items():
            for tok in model.segment_word(word):
                vocab[tok] += n
        ordered = sorted(vocab.items(), key=lambda kv: (-kv[1], kv[0]))
        bpe_mod.Vocab(tuple(t for t, _ in ordered), tuple(c for _, c in ordered)).save(args.vocab)


def cmd_apply_bpe(args):
    model = bpe_mod.BpeModel.load(args.model)
    lines = _lines(_read_input(args.files))
    _emit(chunked_map(partial(bpe_mod.apply_lines, model.to_text()), lines, args.threads), args.output)


def cmd_detok(args):
    _emit([bpe_mod.detokenize(line.split(), args.marker) for line in _lines(_read_input(args.files))],
          args.output)


def cmd_mix(args):
    if not args.dataset:
        raise ConfigError("mix needs at least one --dataset")
    corpora = []
    for name, src, tgt, sl, tl, weight in args.dataset:
        corpora.append(load_parallel(src, tgt, name, sl, tl, int(weight)))
    mix = MixConfig({c.name: c.weight for c in corpora}, args.directions, args.tag_format,
                    args.seed, args.policy, not args.no_shuffle)
    mix.validate_against(corpora)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tokenized = [(c, [(s.source.split(), s.target.split()) for s in c.segments]) for c in corpora]
    section = mix_to_shards(tokenized, mix, out, args.cycles, args.shard_size)
    write_json_atomic(out / MANIFEST, {"tool": "iuprep", "version": __version__, "mix": section})
    log.info("wrote %d examples to %s", section["examples"], out)


def cmd_score(args):
    hyps = _lines(Path(args.hyp).read_text(encoding="utf-8"))
    refs = _lines(Path(args.ref).read_text(encoding="utf-8"))
    # BPE is undone before syllabics are restored, and both before tokenization
    if args.bpe:
        hyps = [bpe_mod.detokenize(h.split(), args.marker) for h in hyps]
    script = None
    if args.deromanize:
        table = TransliterationTable.default()
        hyps = [table.deromanize(h) for h in hyps]
        script = "syllabics"
    elif args.script:
        script = args.script
    report = corpus_bleu(hyps, refs, tokenize=args.tok, smooth=args.smooth, script=script)
    print(report.summary())
    if args.report:
        Path(args.report).write_text(json.dumps(report.as_dict(), indent=2) + "\n", encoding="utf-8")


def cmd_stats(args):
    corpus = load_parallel(args.src, args.tgt, "stats", args.src_lang, args.tgt_lang)
    for key, value in stats(corpus).as_dict().items():
        print(f"{key}: {value:.4f}" if isinstance(value, float) else f"{key}: {value}")


def cmd_run(args):
    cfg = PipelineConfig.from_yaml(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.output_dir:
        overrides["output_dir"] = Path(args.output_dir)
    if overrides:
        cfg = replace(cfg, **overrides)
        cfg.validate()
    manifest = run_pipeline(cfg)
    if not args.quiet:
        mix = manifest.get("mix", {})
        print(f"run complete: {cfg.output_dir} ({mix.get('examples', 0)} examples, "
              f"cycle length {mix.get('cycle_length', '-')})")


def cmd_config(args):
    if args.defaults:
        sys.stdout.write(default_config_yaml())
        return
    cfg = PipelineConfig.from_yaml(args.check)
    print(yaml.safe_dump({"valid": True, "datasets": [d.name for d in cfg.datasets],
                          "cycle_length": sum(d.weight for d in cfg.datasets)}, sort_keys=False), end="")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iuprep", description=__doc__)
    parser.add_argument("--seed", type=int, default=None, help="override the sampling seed")
    parser.add_argument("--threads", type=int, default=None, help="worker processes for per-segment stages")
    parser.add_argument("--quiet", "-q", action="store_true")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("romanize", "deromanize"):
        p = sub.add_parser(name, help=f"{name} Inuktitut text (stdin or files)")
        p.add_argument("files", nargs="*")
        p.add_argument("-o", "--output")
        p.add_argument("--table", help="two-column override table")
        p.set_defaults(func=cmd_translit)

    p = sub.add_parser("clean", help="deduplicate and filter a parallel corpus")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.add_argument("--src-lang", default="en")
    p.add_argument("--tgt-lang", default="iu")
    p.add_argument("--name", default="corpus")
    p.add_argument("--out-src", required=True)
    p.add_argument("--out-tgt", required=True)
    p.add_argument("--report", help="write the cleaning report here")
    defaults = CleanConfig()
    p.add_argument("--min-avg-token-len", type=float, default=defaults.min_avg_token_len)
    p.add_argument("--max-avg-token-len", type=float, default=defaults.max_avg_token_len)
    p.add_argument("--max-char-ratio", type=float, default=defaults.max_char_ratio)
    p.add_argument("--disable", action="append", choices=RULES, help="turn a rule off (repeatable)")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("learn-bpe", help="learn BPE merges from text files")
    p.add_argument("files", nargs="+")
    p.add_argument("--merges", type=int, default=12000)
    p.add_argument("--marker", default=bpe_mod.MARKER)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--vocab", help="also write the resulting vocabulary")
    p.set_defaults(func=cmd_learn_bpe)

    p = sub.add_parser("apply-bpe", help="segment text with a BPE model")
    p.add_argument("files", nargs="*")
    p.add_argument("--model", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_apply_bpe)

    p = sub.add_parser("detok", help="undo BPE segmentation")
    p.add_argument("files", nargs="*")
    p.add_argument("--marker", default=bpe_mod.MARKER)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_detok)

    p = sub.add_parser("mix", help="tag and mix tokenized parallel corpora into shards")
    p.add_argument("--dataset", nargs=6, action="append",
                   metavar=("NAME", "SRC", "TGT", "SRC_LANG", "TGT_LANG", "WEIGHT"))
    p.add_argument("--directions", type=_direction, nargs="+", required=True)
    p.add_argument("--tag-format", default=TAG_FORMAT)
    p.add_argument("--policy", choices=(RESTART, STOP), default=RESTART)
    p.add_argument("--cycles", type=int, default=None)
    p.add_argument("--shard-size", type=int, default=100_000)
    p.add_argument("--no-shuffle", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("score", help="corpus BLEU of a hypothesis file")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--tok", choices=("13a", "none"), default="13a")
    p.add_argument("--smooth", choices=("none", "floor"), default="none")
    p.add_argument("--bpe", action="store_true", help="hypotheses are BPE-segmented")
    p.add_argument("--marker", default=bpe_mod.MARKER)
    p.add_argument("--deromanize", action="store_true", help="restore syllabics before scoring")
    p.add_argument("--script", choices=("roman", "syllabics"), help="record the reference script")
    p.add_argument("--report", help="write the full report as JSON")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("stats", help="segment and token statistics of a parallel corpus")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.add_argument("--src-lang", default="en")
    p.add_argument("--tgt-lang", default="iu")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("run", help="run the full pipeline from a YAML config")
    p.add_argument("config")
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("config", help="print default config or validate one")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--defaults", action="store_true")
    g.add_argument("--check", metavar="CONFIG")
    p.set_defaults(func=cmd_config)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(name)s: %(message)s")
    if args.command in ("mix",) and args.seed is None:
        args.seed = 0
    if args.command in ("clean", "apply-bpe") and args.threads is None:
        args.threads = 1
    try:
        args.func(args)
    except (AlignmentError, CorpusDecodeError, ConfigError, MixConfigError, PipelineError,
            FileNotFoundError, ValueError) as exc:
        print(f"iuprep: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
