"""The built-in example pack: named bases, doctrines, lattices and frames.

Every builder is deterministic and cached, so repeated calls share objects.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from .doctrine import (TOP, Doctrine, doctrine_from_tables, localic_doctrine, m_subobjects_doctrine,
                       powerset_doctrine, terminal_doctrine, trivial_doctrine, weak_subobjects_doctrine)
from .errors import DoctrinaError, MissingStructure
from .fincat import (ChosenStructure, FinSetCategory, LeftClass, all_morphisms, identities,
                     isomorphisms, monomorphisms, preorder_category, projections, terminal_category,
                     validate_category, verify_left_class)
from .order import boolean_lattice, chain, validate_semilattice


# bases

@lru_cache(maxsize=None)
def base(name):
    """A named base category with its chosen structure attached as ``.structure``."""
    if name == "T1":
        C = terminal_category("T1")
    elif name == "C2":
        C = preorder_category(["a", "b"], lambda x, y: (x, y) == ("a", "b"), names={("a", "b"): "u"}, name="C2")
    elif name == "CH3":
        C = preorder_category([0, 1, 2], lambda x, y: x <= y, name="CH3")
    elif name == "V":
        order = {("bot", "x"), ("bot", "y")}
        C = preorder_category(["bot", "x", "y"], lambda p, q: (p, q) in order, name="V")
    elif name == "B4":
        L = boolean_lattice("pq")
        names = {x: "".join(sorted(x)) or "0" for x in L}
        C = preorder_category([names[x] for x in L], lambda p, q: set(p) - {"0"} <= set(q) - {"0"}, name="B4")
    elif name == "FS012":
        C = FinSetCategory([0, 1, 2], name="FS012")
    elif name == "FS'":
        C = FinSetCategory([0, 1, 2, 4], name="FS'")
    else:
        raise KeyError(name)
    validate_category(C)
    C.structure = _structure_for(C)
    return C


def _structure_for(C):
    if isinstance(C, FinSetCategory) and 4 in C.objects:
        # 4 plays the role of 2×2 with the lexicographic projections
        tab = {}
        for A in C.objects:
            for B in C.objects:
                if A * B in C.objects:
                    AB = A * B
                    p1 = C.arrow(AB, A, [i // B for i in range(AB)]) if A else None
                    p2 = C.arrow(AB, B, [i % B for i in range(AB)]) if B else None
                    if AB == 0:
                        p1 = C.arrow(0, A, [])
                        p2 = C.arrow(0, B, [])
                    tab[A, B] = (AB, p1, p2)
        return ChosenStructure(C, terminal=1, products=tab)
    return ChosenStructure(C)


BASES = ("T1", "C2", "CH3", "V", "B4", "FS012")
LEX_BASES = ("T1", "C2", "CH3", "B4")


def class_preset(C, name, S=None):
    """Named left-class presets; ``full`` and ``all`` mean every arrow, ``pure`` means projections."""
    S = S if S is not None else getattr(C, "structure", None) or ChosenStructure(C)
    if name in ("all", "full"):
        return all_morphisms(C)
    if name in ("pure", "projections"):
        return projections(C, S)
    if name == "identities":
        return identities(C)
    if name == "isomorphisms":
        return isomorphisms(C)
    if name == "monomorphisms":
        return monomorphisms(C)
    raise KeyError(name)


# doctrines

def _c2_doctrine(fa, fb, table_u, name):
    C = base("C2")
    return doctrine_from_tables(C, {"a": fa, "b": fb}, {"u": table_u}, C.structure, name=name)


M1 = validate_semilattice([TOP], [], name="M1")


def _builders():
    CH2, CH3 = chain(2), chain(3)
    return {
        "T1-trivial": lambda: trivial_doctrine(base("T1"), base("T1").structure, name="T1-trivial"),
        "C2-trivial": lambda: trivial_doctrine(base("C2"), base("C2").structure, name="C2-trivial"),
        "Psi_C2": lambda: weak_subobjects_doctrine(base("C2"), base("C2").structure, name="Psi_C2"),
        "C2-over-b": lambda: _c2_doctrine(M1, CH2, {0: TOP, 1: TOP}, "C2-over-b"),
        "C2-over-a": lambda: _c2_doctrine(CH2, M1, {TOP: 1}, "C2-over-a"),
        "C2-constant": lambda: _c2_doctrine(CH2, CH2, {0: 0, 1: 1}, "C2-constant"),
        "C2-over-b3": lambda: _c2_doctrine(M1, CH3, {0: TOP, 1: TOP, 2: TOP}, "C2-over-b3"),
        "terminal-CH3": lambda: terminal_doctrine(CH3, name="terminal-CH3"),
        "terminal-B4": lambda: terminal_doctrine(boolean_lattice("pq"), name="terminal-B4"),
        "V-trivial": lambda: trivial_doctrine(base("V"), base("V").structure, name="V-trivial"),
        "Psi_V": lambda: weak_subobjects_doctrine(base("V"), base("V").structure, name="Psi_V"),
        "CH3-trivial": lambda: trivial_doctrine(base("CH3"), base("CH3").structure, name="CH3-trivial"),
        "Psi_CH3": lambda: weak_subobjects_doctrine(base("CH3"), base("CH3").structure, name="Psi_CH3"),
        "Sub_B4": lambda: m_subobjects_doctrine(base("B4"), base("B4").structure, name="Sub_B4"),
        "Pow_FS012": lambda: _on_base(powerset_doctrine(base("FS012"), name="Pow_FS012")),
        "CH3^FS012": lambda: _on_base(localic_doctrine(CH3, base("FS012"), name="CH3^FS012")),
    }


ALIASES = {
    "Υ_T1": "T1-trivial", "Υ_C2": "C2-trivial", "Ψ_C2": "Psi_C2", "Υ_V": "V-trivial", "Ψ_V": "Psi_V",
    "Υ_CH3": "CH3-trivial", "Ψ_CH3": "Psi_CH3", "Sub_FS'": "Pow_FS'",
}

def _on_base(P):
    """Share the base's chosen structure instead of a fresh search."""
    P.structure = P.base.structure
    return P


NEGATIVES = ("C2-over-a", "C2-constant")


@lru_cache(maxsize=None)
def doctrine(name):
    name = ALIASES.get(name, name)
    if name == "Pow_FS'":
        return _on_base(powerset_doctrine(base("FS'"), name="Pow_FS'"))
    if name == "Psi_T1":
        return weak_subobjects_doctrine(base("T1"), base("T1").structure, name="Psi_T1")
    if name == "Psi_B4":
        return weak_subobjects_doctrine(base("B4"), base("B4").structure, name="Psi_B4")
    builders = _builders()
    if name not in builders:
        raise KeyError(name)
    return builders[name]()


def corpus_names():
    return tuple(_builders())


def corpus():
    """The primary corpus as a list of doctrines in a fixed order."""
    return [doctrine(n) for n in corpus_names()]


def trivial_of(C):
    return trivial_doctrine(C, C.structure, name=f"{C.name}-trivial")


@dataclass
class CorpusPair:
    doctrine: Doctrine
    cls_name: str
    cls: LeftClass | None
    problem: str = ""


def corpus_pairs(class_names=("identities", "isomorphisms", "pure", "full")):
    """Every (doctrine, preset class) whose left-class axioms verify; failures carry the reason."""
    out = []
    for P in corpus():
        for cname in class_names:
            C = P.base
            try:
                lam = class_preset(C, cname, P.structure)
                rep = verify_left_class(C, P.structure, lam)
            except MissingStructure as exc:
                out.append(CorpusPair(P, cname, None, str(exc)))
                continue
            if not rep.ok:
                out.append(CorpusPair(P, cname, None, repr(rep.counterexamples[:1])))
            else:
                out.append(CorpusPair(P, cname, lam))
    return out


# lattices and frames

def _canonical_form(n, rel):
    """Lexicographically least relation matrix over all permutations fixing 0 and n-1."""
    from itertools import permutations
    inner = list(range(1, n - 1))
    best = None
    for perm in permutations(inner):
        p = [0, *perm, n - 1] if n > 1 else [0]
        key = tuple(rel[p[i]][p[j]] for i in range(n) for j in range(n))
        if best is None or key < best:
            best = key
    return best


def _posets_with_bounds(n):
    """Naturally labelled partial orders on 0..n-1 with least 0 and greatest n-1, as matrices."""
    if n == 1:
        yield [[True]]
        return
    pairs = [(i, j) for i in range(1, n - 1) for j in range(i + 1, n - 1)]
    for mask in range(2 ** len(pairs)):
        rel = [[i == j or i == 0 or j == n - 1 for j in range(n)] for i in range(n)]
        for k, (i, j) in enumerate(pairs):
            if mask >> k & 1:
                rel[i][j] = True
        closed = all(not (rel[i][k] and rel[k][j]) or rel[i][j] for i in range(n) for j in range(n) for k in range(n))
        if closed:
            yield rel


def _is_lattice(n, rel):
    for i in range(n):
        for j in range(n):
            lower = [k for k in range(n) if rel[k][i] and rel[k][j]]
            if not any(all(rel[m][k] for m in lower) for k in lower):
                return False
    return True


@lru_cache(maxsize=None)
def lattices(n):
    """All n-element lattices (equivalently finite meet-semilattices with top) up to isomorphism."""
    seen, out = set(), []
    for rel in _posets_with_bounds(n):
        if not _is_lattice(n, rel):
            continue
        key = _canonical_form(n, rel)
        if key in seen:
            continue
        seen.add(key)
        pairs = [(i, j) for i in range(n) for j in range(n) if i != j and rel[i][j]]
        out.append(validate_semilattice(range(n), pairs, name=f"L{n}.{len(out)}"))
    return tuple(out)


def meet_semilattices(max_size=5):
    """Finite meet-semilattices with top, up to isomorphism, of size 1..max_size."""
    return [L for n in range(1, max_size + 1) for L in lattices(n)]


def is_distributive(L):
    return all(L.meet(x, L.join(y, z)) == L.join(L.meet(x, y), L.meet(x, z)) for x in L for y in L for z in L)


def frames(max_size=6):
    """Finite frames (distributive lattices) up to isomorphism, of size 1..max_size."""
    return [L for n in range(1, max_size + 1) for L in lattices(n) if is_distributive(L)]


def one_plus(L, name=""):
    """``L`` with a new top adjoined."""
    new = "1+"
    elems = list(L) + [new]
    pairs = [(x, y) for x in L for y in L if L.leq(x, y) and x != y] + [(x, new) for x in L]
    return validate_semilattice(elems, pairs, name=name or f"1+{L.name}")


def frame_bundle(name):
    """Frames referenced by name in suites: B4, D(CH2), 1+B4."""
    if name == "B4":
        return boolean_lattice("pq")
    if name == "1+B4":
        return one_plus(boolean_lattice("pq"))
    raise KeyError(name)


def selection_tops(P):
    return {A: [P.top(A)] for A in P.base.objects}


def subsets_of(xs):
    xs = list(xs)
    return [c for k in range(len(xs) + 1) for c in combinations(xs, k)]
