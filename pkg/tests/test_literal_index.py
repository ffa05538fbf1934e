import random

from scribe.initializer import CacheSnapshot, ClassHierarchy, InitStats
from scribe.literal_index import (
    LITERAL,
    PREDICATE,
    build_index,
    load_index,
    save_index,
    split_words,
)


def snapshot_of(literals, predicates=None):
    return CacheSnapshot(
        endpoint_id="t",
        predicates=predicates or [("http://ex/name", 5)],
        literals=literals,
        hierarchy=ClassHierarchy(),
        language="en",
        max_literal_length=80,
        stats=InitStats(),
    )


class TestBuild:
    def test_top_k_selection(self):
        literals = [("a", 9), ("b", 7), ("c", 5), ("d", 3), ("e", 1)]
        index = build_index(snapshot_of(literals), k=2)
        assert {e.display for e in index.tree_literals} == {"a", "b"}
        assert index.bins.total_count == 3

    def test_k_zero_puts_everything_in_bins(self):
        literals = [("aaa", 9), ("bbb", 7)]
        index = build_index(snapshot_of(literals), k=0)
        assert index.tree_literals == []
        assert {e.kind for e in index.tree_entries} == {PREDICATE}
        assert index.bins.total_count == 2

    def test_tie_at_rank_k_prefers_lexicographically_smaller(self):
        literals = [("zed", 5), ("ant", 5), ("mid", 9)]
        index = build_index(snapshot_of(literals), k=2)
        assert {e.display for e in index.tree_literals} == {"mid", "ant"}

    def test_k_above_literal_count_empties_bins(self):
        index = build_index(snapshot_of([("a", 1)]), k=100)
        assert index.bins.total_count == 0

    def test_partition_tree_xor_one_bin(self):
        rng = random.Random(3)
        literals = [(f"lit {i} {'x' * rng.randrange(5)}", rng.randrange(10))
                    for i in range(40)]
        index = build_index(snapshot_of(literals), k=15)
        in_tree = {e.display for e in index.tree_literals}
        binned = []
        for key in index.bins.keys():
            for entry in index.bins.bin(key):
                binned.append(entry.display)
                assert key == len(entry.display)
        assert len(binned) == len(set(binned))
        assert set(binned) | in_tree == {lex for lex, _ in literals}
        assert set(binned) & in_tree == set()


class TestTreeLookup:
    def test_york_example(self):
        index = build_index(
            snapshot_of([("New York", 3), ("Yorkshire", 2), ("London", 1)]), k=3)
        found = [e.display for e in index.tree_lookup("York")
                 if e.kind == LITERAL]
        assert found == ["New York", "Yorkshire"]

    def test_exact_string_is_matched(self):
        index = build_index(snapshot_of([("New York", 3)]), k=1)
        assert any(e.display == "New York" for e in index.tree_lookup("New York"))

    def test_absent_probe(self):
        index = build_index(snapshot_of([("New York", 3)]), k=1)
        assert index.tree_lookup("zzz") == []

    def test_case_insensitive_returns_original_casing(self):
        index = build_index(snapshot_of([("Kennedy", 3)]), k=1)
        assert [e.display for e in index.tree_lookup("kenn")
                if e.kind == LITERAL] == ["Kennedy"]

    def test_predicate_local_names_and_split_words(self):
        snapshot = snapshot_of([], predicates=[("http://ex/birthPlace", 9)])
        index = build_index(snapshot, k=0)
        hits = index.tree_lookup("birth place")
        assert hits and all(e.canonical == "http://ex/birthPlace" for e in hits)
        assert any(e.canonical.endswith("birthPlace")
                   for e in index.tree_lookup("birthP"))

    def test_substring_completeness_random(self):
        rng = random.Random(17)
        alphabet = "abcXY "
        for _ in range(60):
            lits = list({("".join(rng.choice(alphabet)
                                  for _ in range(rng.randrange(1, 12))), 0)
                         for _ in range(rng.randrange(1, 15))})
            index = build_index(snapshot_of(lits), k=len(lits))
            probe = "".join(rng.choice(alphabet) for _ in range(rng.randrange(1, 4)))
            got = sorted(e.display for e in index.tree_lookup(probe)
                         if e.kind == LITERAL)
            brute = sorted(lex for lex, _ in lits
                           if probe.casefold() in lex.casefold())
            assert got == brute


class TestBins:
    def test_range_filter(self):
        literals = [("abcd", 0), ("abcdefghi", 0), ("a" * 15, 0)]
        index = build_index(snapshot_of(literals), k=0)
        assert index.bin_range(4, 14) == [(4, 1), (9, 1)]

    def test_range_below_everything(self):
        index = build_index(snapshot_of([("abcd", 0)]), k=0)
        assert index.bin_range(1, 2) == []

    def test_full_range_partitions_total(self):
        literals = [(f"word{i % 7}" + "y" * (i % 5), 0) for i in range(30)]
        index = build_index(snapshot_of(list(set(literals))), k=0)
        counted = sum(n for _, n in index.bin_range(0, 100))
        assert counted == index.bins.total_count


class TestSerialization:
    def test_round_trip_exact(self, tmp_path):
        literals = [("New York", 5), ("Boston", 3), ("Chicago", 1), ("LA", 0)]
        index = build_index(snapshot_of(literals), k=2)
        path = tmp_path / "index.jsonl"
        save_index(index, path)
        loaded = load_index(path)
        assert loaded.tree_entries == index.tree_entries
        assert loaded.bins == index.bins
        assert loaded.k == index.k

    def test_build_is_deterministic_bytes(self, tmp_path):
        literals = [("b", 2), ("a", 2), ("c", 9)]
        for name in ("one", "two"):
            save_index(build_index(snapshot_of(literals), k=2),
                       tmp_path / f"{name}.jsonl")
        assert ((tmp_path / "one.jsonl").read_bytes()
                == (tmp_path / "two.jsonl").read_bytes())


def test_split_words():
    assert split_words("birthPlace") == "birth place"
    assert split_words("numberOfPages") == "number of pages"
    assert split_words("snake_case_name") == "snake case name"
    assert split_words("name") == "name"
