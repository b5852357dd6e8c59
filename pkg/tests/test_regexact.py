import pytest

from doctrina import pack
from doctrina.completion import existential_completion
from doctrina.doctrine import tops_selection, weak_subobjects_doctrine
from doctrina.errors import SizeCap
from doctrina.fincat import ChosenStructure, all_morphisms, search_equivalence, skeleton
from doctrina.regexact import (Relations, build_exact_functor, build_reg_functor, ex_lex, ex_reg, exact_completion,
                               is_per, reg_lex_direct, regular_completion, sub_fibre_recovery)


def test_relations_on_weak_subobjects():
    P = pack.doctrine("Psi_C2")
    R = Relations(P)
    for A in P.base.objects:
        eq = R.eq(A)
        assert R.functional(A, A, eq) and R.entire(A, A, eq)
        assert is_per(R, A, eq)


def test_reg_of_weak_subobjects_is_reg_lex():
    C = pack.base("C2")
    Reg = regular_completion(pack.doctrine("Psi_C2"))
    w = search_equivalence(Reg, reg_lex_direct(C, C.structure))
    assert w and w.verify()


@pytest.mark.parametrize("name", ["T1", "C2", "CH3", "B4"])
def test_ex_lex_matches_t_of_weak_subobjects(name):
    C = pack.base(name)
    T = exact_completion(weak_subobjects_doctrine(C, C.structure))
    assert search_equivalence(T, ex_lex(C))


def test_t_p_is_ex_reg_of_reg():
    P = pack.doctrine("C2-over-b3")
    T = exact_completion(P)
    R = regular_completion(P)
    R.structure = ChosenStructure(R)
    assert search_equivalence(T, ex_reg(R))
    assert len(skeleton(T).objects) == 3


def test_sub_of_reg_recovers_fibres():
    assert all(sub_fibre_recovery(pack.doctrine("Sub_B4")).values())


def test_caps_apply():
    with pytest.raises(SizeCap):
        regular_completion(pack.doctrine("Psi_CH3"), cap=2)
    with pytest.raises(SizeCap):
        exact_completion(pack.doctrine("Psi_CH3"), cap=2)


def test_reg_functor_on_a_completion_and_a_non_completion():
    P = pack.doctrine("C2-trivial")
    lam = all_morphisms(P.base)
    comp = existential_completion(P, lam)
    Q = comp.doctrine
    image = {A: [comp.unit(A, x) for x in P.fibres[A]] for A in P.base.objects}
    assert build_reg_functor(Q, image).verdict
    v = build_reg_functor(pack.doctrine("C2-over-b3"), tops_selection(pack.doctrine("C2-over-b3")))
    assert not v.verdict and v.witness is not None


def test_exact_functor_on_a_completion():
    P = pack.doctrine("CH3-trivial")
    comp = existential_completion(P, all_morphisms(P.base))
    Q = comp.doctrine
    image = {A: [comp.unit(A, x) for x in P.fibres[A]] for A in P.base.objects}
    v = build_exact_functor(Q, image)
    assert v.verdict and v.details["certificate"]
