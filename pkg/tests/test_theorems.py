from functools import lru_cache

import pytest

from doctrina import pack
from doctrina.errors import UnsupportedTheorem
from doctrina.theorems import (THEOREM_IDS, Bundle, Check, TheoremReport, bundle_for, plain, run_all,
                               run_theorem_suite)


@lru_cache(maxsize=None)
def corpus_reports():
    return {r.theorem: r for r in run_all()}


@pytest.mark.parametrize("theorem", THEOREM_IDS)
def test_theorem_holds_on_corpus(theorem):
    rep = corpus_reports()[theorem]
    assert rep.passed, [c.as_dict() for c in rep.failures]
    assert rep.status == "pass"


def test_unknown_theorem():
    with pytest.raises(UnsupportedTheorem):
        run_theorem_suite("corpus", "T-NOPE")


@pytest.mark.parametrize("theorem,bundle", [("T-REGLEX", "Psi_C2"), ("T-SUPER", "B4"), ("T-EPS", "terminal-CH3"),
                                            ("T-DOWN", "1+B4"), ("T-CHAR", "C2-over-a")])
def test_single_bundles(theorem, bundle):
    assert run_theorem_suite(bundle, theorem).passed


def test_bundle_resolution():
    assert bundle_for("CH3").bases and not bundle_for("V").bases
    assert bundle_for("Psi_C2").doctrines[0].name == pack.doctrine("Psi_C2").name
    assert bundle_for(None).name == "corpus"


def test_report_status_precedence():
    rep = TheoremReport("T", "s", "b", [Check("c", "x", "unverifiable"), Check("c", "y", "pass")])
    assert rep.status == "pass"
    rep.checks.append(Check("c", "z", "fail"))
    assert rep.status == "fail" and not rep.passed
    assert TheoremReport("T", "s", "b", []).status == "vacuous"
    assert TheoremReport("T", "s", "b", [Check("c", "x", "unverifiable")]).status == "unverifiable"


def test_empty_bundle_is_vacuous():
    assert run_theorem_suite(Bundle("empty"), "T-EPS").status == "vacuous"


def test_plain_is_deterministic():
    assert plain({frozenset({"b", "a"}): ("u", 0)}) == {"['a', 'b']": ["u", 0]}
