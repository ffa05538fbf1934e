import math
import random
import string

import pytest
from hypothesis import given
from hypothesis import strategies as st

from jw_reference import reference_jaro_winkler
from scribe.similarity import JwParams, Lexicon, jaro_winkler

WORDS = st.text(alphabet=string.ascii_letters + " '-", max_size=24)


def test_identity():
    assert jaro_winkler("spouse", "spouse") == 1.0


def test_case_folded_equality_scores_one():
    assert jaro_winkler("Kennedy", "KENNEDY") == 1.0


def test_no_common_characters():
    assert jaro_winkler("abc", "xyz") == 0.0


def test_empty_conventions():
    assert jaro_winkler("", "") == 1.0
    assert jaro_winkler("", "x") == 0.0
    assert jaro_winkler("x", "") == 0.0


def test_kennedy_pair_passes_threshold():
    # hand-derived: jaro = (1 + 7/8 + 1)/3, full 4-char prefix boost
    score = jaro_winkler("Kennedy", "Kennedys")
    assert math.isclose(score, 0.975, abs_tol=1e-9)
    assert score >= JwParams().threshold


@given(WORDS, WORDS)
def test_symmetry(a, b):
    assert jaro_winkler(a, b) == jaro_winkler(b, a)


@given(WORDS, WORDS)
def test_range(a, b):
    score = jaro_winkler(a, b)
    assert 0.0 <= score <= 1.0
    if score == 1.0:
        assert a.casefold() == b.casefold()


def test_prefix_favoritism():
    # same Jaro score, longer common prefix never scores lower
    base = JwParams()
    pairs = [("martha", "marhta"), ("dwayne", "duane"), ("dixon", "dicksonx")]
    for a, b in pairs:
        boosted = jaro_winkler(a, b, base)
        unboosted = jaro_winkler(a, b, JwParams(prefix_scale=0.01))
        assert boosted >= unboosted


def test_reference_agreement_on_random_pairs():
    rng = random.Random(1234)
    alphabet = string.ascii_lowercase + string.ascii_uppercase + " -"
    for _ in range(1000):
        a = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 20)))
        b = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 20)))
        assert abs(jaro_winkler(a, b) - reference_jaro_winkler(a, b)) <= 1e-12


def test_params_validation():
    with pytest.raises(ValueError):
        JwParams(prefix_scale=0.3)
    with pytest.raises(ValueError):
        JwParams(threshold=0.0)


class TestLexicon:
    def test_wife_maps_to_spouse(self):
        lex = Lexicon.bundled()
        assert "spouse" in lex.lexicalize("wife")

    def test_husband_maps_to_spouse(self):
        lex = Lexicon.bundled()
        assert "spouse" in lex.lexicalize("husband")

    def test_unknown_term_identity_fallback(self):
        lex = Lexicon.bundled()
        assert lex.lexicalize("zzz") == {"zzz"}

    def test_forward_direction(self):
        lex = Lexicon.bundled()
        assert "wife" in lex.lexicalize("spouse")

    def test_from_file(self, tmp_path):
        path = tmp_path / "lex.json"
        path.write_text('{"spouse": ["wife"]}')
        lex = Lexicon.from_file(path)
        assert lex.lexicalize("WIFE") == {"wife", "spouse"}
