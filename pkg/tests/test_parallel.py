from functools import partial

from iuprep import bpe
from iuprep._parallel import chunked_map
from iuprep.bpe import learn_from_counts


def test_pool_path_preserves_order():
    model = learn_from_counts({"low": 5, "lower": 2, "newest": 6, "widest": 3}, 10)
    lines = [f"low{'er' * (i % 3)} newest {i}" for i in range(250)]
    fn = partial(bpe.apply_lines, model.to_text())
    assert chunked_map(fn, lines, threads=3, chunk_size=40) == fn(lines)


def test_single_thread_runs_inline():
    assert chunked_map(lambda xs: [x * 2 for x in xs], [1, 2, 3], threads=1) == [2, 4, 6]
