import pytest

import init_oracles as oracle
from conftest import en, make_store, uri
from scribe.errors import BudgetExhausted, InitFailure
from scribe.fixtures import NS, RES
from scribe.initializer import (
    BudgetMeter,
    ClassHierarchy,
    InitConfig,
    QueryRunner,
    build_hierarchy,
    fetch_hierarchy,
    fetch_predicates,
    filter_literal_predicates,
    harvest_literals,
    initialize,
    load_snapshot,
    save_snapshot,
    score_significance,
)
from scribe.rdf import Endpoint, Literal, Local, TripleStore, Uri
from scribe.rdf.terms import OWL_CLASS, RDF_TYPE, RDFS_SUBCLASSOF


def runner_for(store, executor=None, budget=None):
    endpoint = Endpoint("test", Local(store))
    if executor is None:
        return QueryRunner(endpoint=endpoint, meter=BudgetMeter(budget))
    return QueryRunner(endpoint=endpoint, execute=executor,
                       meter=BudgetMeter(budget))


class TestFetchPredicates:
    def test_direct_counts(self):
        store = make_store(
            (uri("a"), Uri(NS + "p"), uri("x")),
            (uri("b"), Uri(NS + "p"), uri("x")),
            (uri("c"), Uri(NS + "p"), uri("y")),
            (uri("a"), Uri(NS + "q"), uri("y")),
        )
        assert fetch_predicates(runner_for(store)) == [(NS + "p", 3), (NS + "q", 1)]

    def test_empty_store(self):
        assert fetch_predicates(runner_for(TripleStore())) == []

    def test_fixture_matches_brute_force(self, kerouac_store):
        got = dict(fetch_predicates(runner_for(kerouac_store)))
        assert got == oracle.predicate_counts(kerouac_store)

    def test_timeout_becomes_init_failure(self, kerouac_store):
        executor = oracle.rule_executor(kerouac_store, lambda text: True)
        with pytest.raises(InitFailure):
            fetch_predicates(runner_for(kerouac_store, executor))


class TestFetchHierarchy:
    def test_person_with_two_subclasses(self, kennedy_store):
        hierarchy = fetch_hierarchy(runner_for(kennedy_store))
        assert hierarchy.roots == [NS + "Person"]
        assert hierarchy.children(NS + "Person") == [
            NS + "MovieDirector", NS + "Politician"]

    def test_no_class_declarations(self, films_store):
        assert fetch_hierarchy(runner_for(films_store)).empty

    def test_cycle_broken(self):
        a, b = NS + "A", NS + "B"
        store = make_store(
            (Uri(a), Uri(RDF_TYPE), Uri(OWL_CLASS)),
            (Uri(b), Uri(RDF_TYPE), Uri(OWL_CLASS)),
            (Uri(a), Uri(RDFS_SUBCLASSOF), Uri(b)),
            (Uri(b), Uri(RDFS_SUBCLASSOF), Uri(a)),
        )
        hierarchy = fetch_hierarchy(runner_for(store))
        edges = sum(len(v) for v in hierarchy.child_edges.values())
        assert edges == 1
        assert len(hierarchy.roots) == 1

    def test_build_hierarchy_deterministic(self):
        edges = [(NS + "P", NS + "B"), (NS + "P", NS + "A")]
        h1 = build_hierarchy(edges)
        h2 = build_hierarchy(list(reversed(edges)))
        assert h1 == h2


class TestFilterLiteralPredicates:
    def test_long_literal_predicate_excluded(self):
        store = make_store(
            (uri("a"), Uri(NS + "summary"), en("x" * 200)),
            (uri("a"), Uri(NS + "name"), en("short name")),
        )
        kept = filter_literal_predicates(
            runner_for(store), [NS + "summary", NS + "name"], InitConfig())
        assert kept == [NS + "name"]

    def test_inclusion_matches_brute_force(self, films_store):
        predicates = sorted({t.predicate.value for t in films_store})
        kept = filter_literal_predicates(runner_for(films_store), predicates,
                                         InitConfig())
        assert set(kept) == oracle.literal_predicates_passing_probe(films_store)

    def test_order_preserved(self, kennedy_store):
        kept = filter_literal_predicates(
            runner_for(kennedy_store), [NS + "surname", NS + "name"], InitConfig())
        assert kept == [NS + "surname", NS + "name"]


class TestHarvest:
    def test_hierarchy_store_equals_brute_force(self, kennedy_store):
        runner = runner_for(kennedy_store)
        hierarchy = fetch_hierarchy(runner)
        got = harvest_literals(runner, hierarchy, [NS + "name", NS + "surname"],
                               InitConfig())
        assert set(got) == oracle.filtered_literals(kennedy_store)

    def test_exhausted_budget_harvests_nothing(self, kennedy_store):
        runner = runner_for(kennedy_store, budget=0)
        hierarchy = ClassHierarchy()
        got = harvest_literals(runner, hierarchy, [NS + "name"], InitConfig(),
                               types=[NS + "Person"])
        assert got == []
        assert runner.stats.queries_issued == 0

    def test_root_timeout_recovers_at_leaves(self, kennedy_store):
        executor = oracle.rule_executor(
            kennedy_store,
            lambda text: f"<{RDF_TYPE}> <{NS}Person>" in text)
        runner = runner_for(kennedy_store, executor)
        hierarchy = fetch_hierarchy(runner)
        got = harvest_literals(runner, hierarchy, [NS + "name", NS + "surname"],
                               InitConfig())
        assert set(got) == oracle.filtered_literals(kennedy_store)
        assert runner.stats.queries_timed_out >= 1


class TestSignificance:
    def test_two_hop_chain(self):
        store = make_store(
            (uri("s1"), Uri(NS + "p"), uri("e")),
            (uri("s2"), Uri(NS + "p"), uri("e")),
            (uri("e"), Uri(NS + "name"), en("New York")),
            (uri("e"), Uri(RDF_TYPE), Uri(NS + "City")),
        )
        runner = runner_for(store)
        scores = score_significance(runner, ClassHierarchy(), [NS + "name"],
                                    {"New York"}, InitConfig(),
                                    types=[NS + "City"])
        assert scores["New York"] == 2 == oracle.significance(store, "New York")

    def test_isolated_literal_scores_zero(self):
        store = make_store(
            (uri("e"), Uri(NS + "name"), en("Lonely")),
            (uri("e"), Uri(RDF_TYPE), Uri(NS + "Thing")),
        )
        runner = runner_for(store)
        scores = score_significance(runner, ClassHierarchy(), [NS + "name"],
                                    {"Lonely"}, InitConfig(),
                                    types=[NS + "Thing"])
        assert scores.get("Lonely", 0) == 0 == oracle.significance(store, "Lonely")

    def test_same_subject_two_paths_counts_once(self):
        store = make_store(
            (uri("s"), Uri(NS + "p"), uri("e1")),
            (uri("s"), Uri(NS + "q"), uri("e2")),
            (uri("e1"), Uri(NS + "name"), en("Twin")),
            (uri("e2"), Uri(NS + "name"), en("Twin")),
            (uri("e1"), Uri(RDF_TYPE), Uri(NS + "Thing")),
            (uri("e2"), Uri(RDF_TYPE), Uri(NS + "Thing")),
        )
        runner = runner_for(store)
        scores = score_significance(runner, ClassHierarchy(), [NS + "name"],
                                    {"Twin"}, InitConfig(), types=[NS + "Thing"])
        assert scores["Twin"] == 1 == oracle.significance(store, "Twin")


class TestInitialize:
    def endpoint(self, store):
        return Endpoint("fixture", Local(store))

    def test_snapshot_matches_brute_force(self, kerouac_store, tmp_path):
        snapshot = initialize(self.endpoint(kerouac_store), InitConfig(),
                              snapshot_path=tmp_path / "snap.jsonl")
        assert {lex for lex, _ in snapshot.literals} == \
            oracle.filtered_literals(kerouac_store)
        counts = oracle.predicate_counts(kerouac_store)
        assert snapshot.predicates[0][1] == max(counts.values())
        assert dict(snapshot.predicates) == counts
        for lex, sig in snapshot.literals:
            assert sig == oracle.significance(kerouac_store, lex)

    def test_warehouse_equals_federated(self, kennedy_store):
        federated = initialize(self.endpoint(kennedy_store), InitConfig())
        warehouse = initialize(self.endpoint(kennedy_store),
                               InitConfig(warehouse_mode=True))
        assert set(federated.literals) == set(warehouse.literals)

    def test_no_hierarchy_store(self, films_store):
        snapshot = initialize(self.endpoint(films_store), InitConfig())
        assert snapshot.hierarchy.empty
        assert {lex for lex, _ in snapshot.literals} == \
            oracle.filtered_literals(films_store)

    def test_empty_endpoint(self):
        snapshot = initialize(self.endpoint(TripleStore()), InitConfig())
        assert snapshot.predicates == [] and snapshot.literals == []

    def test_budget_never_exceeded(self, kennedy_store):
        for budget in (0, 1, 3, 7, 20):
            issued = {"n": 0}

            def counting(endpoint, text, _issued=issued):
                from scribe.rdf import evaluate, parse
                _issued["n"] += 1
                return evaluate(kennedy_store, parse(text))

            snapshot = initialize(self.endpoint(kennedy_store),
                                  InitConfig(query_budget=budget),
                                  execute=counting)
            assert issued["n"] <= budget
            assert snapshot.stats.queries_issued == issued["n"]

    def test_scripted_timeouts_still_sound(self, kennedy_store):
        executor = oracle.class_size_executor(kennedy_store, threshold=12)
        snapshot = initialize(self.endpoint(kennedy_store), InitConfig(),
                              execute=executor)
        assert {lex for lex, _ in snapshot.literals} == \
            oracle.filtered_literals(kennedy_store)
        assert snapshot.stats.queries_timed_out >= 1

    def test_priority_under_truncation(self):
        # frequent predicate gets literals before the rare one when the
        # budget cuts harvesting short
        triples = []
        for i in range(6):
            subject = uri(f"e{i}")
            triples.append((subject, Uri(RDF_TYPE), Uri(NS + "Thing")))
            triples.append((subject, Uri(NS + "common"), en(f"common {i}")))
        triples.append((uri("e0"), Uri(NS + "rare"), en("rare 0")))
        store = make_store(*triples)

        config = InitConfig(page_size=2)
        full = initialize(self.endpoint(store), config)
        harvested_by_budget = {}
        for budget in range(1, full.stats.queries_issued + 1):
            snap = initialize(self.endpoint(store),
                              InitConfig(page_size=2, query_budget=budget))
            harvested_by_budget[budget] = {lex for lex, _ in snap.literals}
        rare_first = [lex for budget, lits in harvested_by_budget.items()
                      if any(l.startswith("rare") for l in lits)
                      and not all(f"common {i}" in lits for i in range(6))]
        assert rare_first == []


class TestSnapshotPersistence:
    def test_round_trip(self, kerouac_store, tmp_path):
        path = tmp_path / "snap.jsonl"
        snapshot = initialize(Endpoint("fx", Local(kerouac_store)), InitConfig(),
                              snapshot_path=path)
        loaded = load_snapshot(path)
        assert loaded.predicates == snapshot.predicates
        assert loaded.literals == snapshot.literals
        assert loaded.hierarchy == snapshot.hierarchy
        assert loaded.stats == snapshot.stats

    def test_reinit_replaces_snapshot(self, kerouac_store, kennedy_store, tmp_path):
        path = tmp_path / "snap.jsonl"
        initialize(Endpoint("a", Local(kerouac_store)), InitConfig(),
                   snapshot_path=path)
        initialize(Endpoint("b", Local(kennedy_store)), InitConfig(),
                   snapshot_path=path)
        assert load_snapshot(path).endpoint_id == "b"

    def test_save_is_deterministic(self, kennedy_store, tmp_path):
        snapshot = initialize(Endpoint("fx", Local(kennedy_store)), InitConfig())
        save_snapshot(snapshot, tmp_path / "a.jsonl")
        save_snapshot(snapshot, tmp_path / "b.jsonl")
        assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()


def test_budget_meter_contract():
    meter = BudgetMeter(2)
    meter.charge()
    meter.charge()
    with pytest.raises(BudgetExhausted):
        meter.charge()
    assert meter.used == 2
    unlimited = BudgetMeter()
    for _ in range(100):
        unlimited.charge()
    assert unlimited.used == 100
