import pytest

from conftest import en, make_store, uri
from init_oracles import rule_executor
from scribe.errors import AllEndpointsFailed
from scribe.federation import Registry, execute_federated, prefetch
from scribe.fixtures import NS
from scribe.rdf import Endpoint, Local, Uri, evaluate, execute_remote, parse


def local_endpoint(eid, store):
    return Endpoint(eid, Local(store))


@pytest.fixture
def disjoint_registry():
    registry = Registry()
    registry.register(local_endpoint("a", make_store(
        (uri("x1"), Uri(NS + "name"), en("Left")))))
    registry.register(local_endpoint("b", make_store(
        (uri("x2"), Uri(NS + "name"), en("Right")))))
    return registry


QUERY = "SELECT ?s ?o WHERE { ?s <%sname> ?o }" % NS


def test_union_of_disjoint_endpoints(disjoint_registry):
    result = execute_federated(disjoint_registry, QUERY)
    assert {row["o"].lexical for row in result.rows} == {"Left", "Right"}
    assert not result.truncated


def test_timeout_sets_truncated(disjoint_registry):
    calls = {"n": 0}

    def flaky(endpoint, text):
        if endpoint.id == "a":
            from scribe.errors import QueryTimeout
            raise QueryTimeout("scripted")
        return execute_remote(endpoint, text)

    result = execute_federated(disjoint_registry, QUERY, execute=flaky)
    assert result.truncated
    assert {row["o"].lexical for row in result.rows} == {"Right"}


def test_single_endpoint_equals_execute_remote(kerouac_store):
    registry = Registry()
    endpoint = local_endpoint("only", kerouac_store)
    registry.register(endpoint)
    federated = execute_federated(registry, QUERY)
    direct = execute_remote(endpoint, QUERY)
    assert federated.as_multiset() == direct.as_multiset()


def test_same_data_union_is_idempotent(kerouac_store):
    registry = Registry()
    registry.register(local_endpoint("a", kerouac_store))
    registry.register(local_endpoint("b", kerouac_store))
    federated = execute_federated(registry, QUERY)
    single = evaluate(kerouac_store, parse(QUERY))
    assert federated.as_multiset() == single.as_multiset()


def test_all_endpoints_failed(disjoint_registry):
    def dead(endpoint, text):
        from scribe.errors import NetworkError
        raise NetworkError("scripted")

    with pytest.raises(AllEndpointsFailed):
        execute_federated(disjoint_registry, QUERY, execute=dead)


def test_no_endpoints_registered():
    with pytest.raises(AllEndpointsFailed):
        execute_federated(Registry(), QUERY)


class TestPrefetch:
    def test_rows_capped_count_preserved(self, kennedy_store):
        registry = Registry()
        registry.register(local_endpoint("k", kennedy_store))
        query = "SELECT ?p ?o WHERE { ?p <%ssurname> ?o }" % NS
        [result] = prefetch(registry, [query], row_cap=3)
        assert result.answer_count == 15
        assert len(result.rows.rows) == 3

    def test_timeout_drops_candidate(self, kennedy_store):
        registry = Registry()
        registry.register(local_endpoint("k", kennedy_store))
        executor = rule_executor(kennedy_store, lambda text: "surname" in text)
        results = prefetch(registry, [
            "SELECT ?p WHERE { ?p <%ssurname> ?o }" % NS,
            "SELECT ?p WHERE { ?p <%sname> ?o }" % NS,
        ], execute=executor)
        assert results[0] is None
        assert results[1] is not None

    def test_empty_list_is_noop(self):
        assert prefetch(Registry(), []) == []
