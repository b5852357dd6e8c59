import pytest
from hypothesis import given, settings, strategies as st

from doctrina import pack
from doctrina.errors import NoAdjoint, NoMeet, NotAPoset, NotDistributive, NoTop, SizeCap
from doctrina.order import (MonotoneMap, boolean_lattice, chain, check_supercoherent, downset_frame,
                            is_order_isomorphic, left_adjoint_of, power_lattice, product_lattice,
                            supercompact_elements, supercompact_oracle, validate_frame, validate_semilattice)


def test_chain_meets_and_top():
    L = chain(4)
    assert L.top == 3 and L.bottom == 0
    assert L.meet(1, 3) == 1 and L.join(1, 2) == 2
    assert len(L.leq_pairs()) == 6  # strict pairs only


def test_boolean_lattice_is_powerset():
    B = boolean_lattice("pq")
    assert len(B) == 4
    assert B.top == frozenset("pq")
    assert B.meet(frozenset("p"), frozenset("q")) == frozenset()


def test_hasse_diagram_is_closed_transitively():
    L = validate_semilattice("abc", [("a", "b"), ("b", "c")])
    assert L.leq("a", "c")


def test_cycle_is_not_a_poset():
    with pytest.raises(NotAPoset):
        validate_semilattice("ab", [("a", "b"), ("b", "a")])


def test_two_maximal_elements_have_no_top():
    with pytest.raises(NoTop):
        validate_semilattice("xyz", [("z", "x"), ("z", "y")])


def test_missing_meet_is_reported():
    # two incomparable lower bounds of x and y
    pairs = [("a", "x"), ("a", "y"), ("b", "x"), ("b", "y"), ("x", "t"), ("y", "t")]
    with pytest.raises(NoMeet):
        validate_semilattice(["a", "b", "x", "y", "t"], pairs)


def test_product_and_power_lattices():
    L = product_lattice(chain(2), chain(3))
    assert len(L) == 6
    assert is_order_isomorphic(power_lattice(chain(2), 2), boolean_lattice("pq"))


def test_left_adjoint_of_inclusion_into_chain():
    L, M = chain(2), chain(3)
    # h: CH3 -> CH2 collapsing 1 and 2 has left adjoint 0->0, 1->1
    h = MonotoneMap(M, L, {0: 0, 1: 1, 2: 1})
    adj = left_adjoint_of(h)
    assert adj.table == {0: 0, 1: 1}


def test_left_adjoint_absent_when_meets_are_not_preserved():
    B = boolean_lattice("pq")
    two = chain(2)
    # "is nonempty" does not preserve meets, so has no left adjoint
    h = MonotoneMap(B, two, {x: int(bool(x)) for x in B})
    with pytest.raises(NoAdjoint):
        left_adjoint_of(h)


def test_pentagon_is_not_distributive():
    N5 = validate_semilattice(["0", "a", "b", "c", "1"],
                              [("0", "a"), ("a", "b"), ("0", "c"), ("b", "1"), ("c", "1")])
    with pytest.raises(NotDistributive):
        validate_frame(N5)


def test_downset_frame_of_chain_is_a_chain():
    F, eta = downset_frame(chain(3))
    assert len(F) == 4
    assert sorted(len(x) for x in supercompact_elements(F)) == [1, 2, 3]
    assert {eta(x) for x in chain(3)} == set(supercompact_elements(F))


def test_downset_frame_respects_cap():
    with pytest.raises(SizeCap):
        downset_frame(chain(5), cap=16)


def test_boolean_frame_fails_at_top():
    rep = check_supercoherent(validate_frame(boolean_lattice("pq")))
    assert not rep.ok and rep.diagnosis == "top"


def test_lattice_enumeration_counts():
    # 1, 1, 1, 2, 5 lattices of sizes 1..5; distributive ones: 1, 1, 1, 2, 3
    assert [len(pack.lattices(n)) for n in range(1, 6)] == [1, 1, 1, 2, 5]
    assert len(pack.frames(5)) == 8


@st.composite
def random_orders(draw):
    n = draw(st.integers(1, 5))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=8))
    return n, [(i, j) for i, j in pairs if i < j]


@settings(max_examples=150, deadline=None)
@given(random_orders())
def test_validated_semilattices_satisfy_meet_laws(data):
    n, pairs = data
    try:
        L = validate_semilattice(range(n), pairs)
    except (NoTop, NoMeet):
        return
    for x in L:
        assert L.leq(x, L.top)
        for y in L:
            m = L.meet(x, y)
            assert L.leq(m, x) and L.leq(m, y)
            assert all(L.leq(z, m) for z in L if L.leq(z, x) and L.leq(z, y))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.data())
def test_supercompacts_agree_with_oracle_on_downset_frames(size, data):
    M = data.draw(st.sampled_from(pack.lattices(size)))
    F, _ = downset_frame(M)
    assert set(supercompact_elements(F)) == set(supercompact_oracle(F))
