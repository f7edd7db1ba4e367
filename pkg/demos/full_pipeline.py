"""
Running the whole pipeline
==========================

Romanize, clean, learn BPE, then tag and mix into shards, driven by one
YAML file.  This uses the small synthetic fixture shipped with the tests.
"""
import json
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from iuprep.pipeline import PipelineConfig, run_pipeline

config = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "tiny.yaml"
cfg = PipelineConfig.from_yaml(config)
out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp()) / "out"
manifest = run_pipeline(replace(cfg, output_dir=out))

for d in manifest["datasets"]:
    print(f"{d['name']:16s} raw {d['clean_report']['raw']:4d} selected {d['clean_report']['selected']:4d}")
print("bpe:", manifest["bpe"]["learned_merges"], "merges, vocab", manifest["bpe"]["vocab_size"])
print("mix:", json.dumps(manifest["mix"]["emitted"]))
print((out / manifest["mix"]["shards"][0]).read_text(encoding="utf-8").splitlines()[0])
print("outputs in", out)
