import json

import pytest
from hypothesis import given, settings, strategies as st

from doctrina import pack
from doctrina.analysis import doctrine_equivalence
from doctrina.errors import ParseError, UnresolvedRef
from doctrina.instance import (doctrine_to_data, ident, pack_instance, parse_instance, parse_text, serialize,
                               shipped)
from doctrina.order import chain


def test_shipped_two_chain():
    inst = parse_instance(shipped("C2"))
    C = inst.category("C2")
    assert len(C.morphisms) == 3
    assert doctrine_equivalence(inst.doctrine("Psi_C2"), pack.doctrine("Psi_C2")) is not None
    assert doctrine_equivalence(inst.doctrine("C2-over-a"), pack.doctrine("C2-over-a")) is not None


def test_shipped_finsets():
    inst = parse_instance(shipped("FSprime"))
    assert len(inst.category(inst.names("categories")[0]).morphisms) == 305


def test_shipped_pack_matches_builders():
    inst = parse_instance(shipped("pack"))
    for name in inst.names("doctrines"):
        assert doctrine_equivalence(inst.doctrine(name), pack.doctrine(name)) is not None, name


def test_dangling_reference():
    text = "categories:\n  C:\n    objects: [a]\n    morphisms: [[id_a, a, z]]\n"
    with pytest.raises(UnresolvedRef) as err:
        parse_text(text).build_all()
    assert "z" in str(err.value)


def test_missing_doctrine_reference():
    with pytest.raises(UnresolvedRef):
        parse_text("name: x\n").doctrine("nope")


def test_bad_yaml_reports_line():
    with pytest.raises(ParseError) as err:
        parse_text("categories:\n  C:\n    objects: [a\n  D: {}\n")
    assert err.value.line >= 3


def test_unknown_section():
    with pytest.raises(ParseError):
        parse_text("widgets: {}\n")


def test_json_is_accepted():
    data = {"categories": {"C": {"preorder": ["x", "y"], "order": [["x", "y"]]}}}
    inst = parse_text(json.dumps(data))
    assert len(inst.category("C").morphisms) == 3


def test_serialize_round_trip():
    for stem in ("C2", "pack"):
        inst = parse_instance(shipped(stem))
        again = parse_text(serialize(inst))
        assert again.data == inst.data


def test_doctrine_to_data_round_trip():
    for name in ("Psi_C2", "terminal-B4", "Psi_V"):
        P = pack.doctrine(name)
        back = parse_text(serialize(doctrine_to_data(P))).doctrine(name)
        assert doctrine_equivalence(back, P) is not None


def test_pack_instance_lists_corpus():
    assert set(pack_instance()["doctrines"]) == set(pack.corpus_names())


def test_ident_rendering():
    assert ident(frozenset({2, 1})) == "{1,2}"
    assert ident(("u", 0)) == "(u,0)"
    assert ident(3) == "3"


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=5), st.integers(min_value=1, max_value=4))
def test_chain_doctrine_round_trip(n, m):
    from doctrina.doctrine import doctrine_from_tables
    C = pack.base("C2")
    lo, hi = sorted((n, m))
    # reindexing along u maps the longer chain on b into the shorter one on a, keeping tops
    table = {x: (lo - 1 if x == hi - 1 else min(x, lo - 1)) for x in range(hi)}
    P = doctrine_from_tables(C, {"a": chain(lo), "b": chain(hi)}, {"u": table}, C.structure, name="chains")
    back = parse_text(serialize(doctrine_to_data(P))).doctrine("chains")
    assert doctrine_equivalence(back, P) is not None
