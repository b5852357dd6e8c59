"""Finite categories, chosen limits, left classes and equivalence search."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from .errors import (BudgetExceeded, IncompleteComposition, MissingIdentity, MissingStructure,
                     NonAssociative)


class FinCategory:
    """A finite category given by its composition table.

    ``composition[(g, f)]`` is g∘f, defined exactly when ``tgt(f) == src(g)``.
    Identifiers are opaque hashables; list positions give the tie-break order.
    The constructor trusts its input, :func:`validate_category` checks it.
    """

    def __init__(self, objects, morphisms, identity, composition, name=""):
        self.objects = tuple(objects)
        self.obj_index = {A: i for i, A in enumerate(self.objects)}
        morphisms = list(morphisms)
        self.morphisms = tuple(m for m, _, _ in morphisms)
        self.mor_index = {m: i for i, m in enumerate(self.morphisms)}
        self._src = {m: s for m, s, _ in morphisms}
        self._tgt = {m: t for m, _, t in morphisms}
        self._id = dict(identity)
        self._comp = dict(composition)
        self.name = name
        homs = {(A, B): [] for A in self.objects for B in self.objects}
        for m in self.morphisms:
            homs.setdefault((self._src[m], self._tgt[m]), []).append(m)
        self._homs = {k: tuple(v) for k, v in homs.items()}
        self._iso_cache = {}

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<FinCategory{label}: {len(self.objects)} objects, {len(self.morphisms)} morphisms>"

    def src(self, f):
        return self._src[f]

    def tgt(self, f):
        return self._tgt[f]

    def identity(self, A):
        return self._id[A]

    def is_identity(self, f):
        return self._id.get(self._src[f]) == f

    def compose(self, *fs):
        """``compose(h, g, f)`` is h∘g∘f."""
        out = fs[-1]
        for g in reversed(fs[:-1]):
            out = self._comp[g, out]
        return out

    def hom(self, A, B):
        return self._homs.get((A, B), ())

    def arrows_into(self, B):
        return [m for m in self.morphisms if self._tgt[m] == B]

    def composable_pairs(self):
        for f in self.morphisms:
            for g in self.hom_from(self._tgt[f]):
                yield g, f

    def hom_from(self, A):
        return [m for B in self.objects for m in self._homs[A, B]]

    @property
    def is_preorder(self):
        return all(len(h) <= 1 for h in self._homs.values())

    def inverse(self, f):
        A, B = self._src[f], self._tgt[f]
        for g in self._homs[B, A]:
            if self._comp[g, f] == self._id[A] and self._comp[f, g] == self._id[B]:
                return g
        return None

    def is_iso(self, f):
        return self.inverse(f) is not None

    def iso_between(self, A, B):
        """Lowest-id isomorphism A -> B, or None."""
        key = (A, B)
        if key not in self._iso_cache:
            self._iso_cache[key] = next((f for f in self._homs[A, B] if self.is_iso(f)), None)
        return self._iso_cache[key]

    def key(self, m):
        return self.mor_index[m]

    def full_subcategory(self, objects, name=""):
        keep = [A for A in self.objects if A in set(objects)]
        ks = set(keep)
        mors = [(m, self._src[m], self._tgt[m]) for m in self.morphisms
                if self._src[m] in ks and self._tgt[m] in ks]
        comp = {(g, f): h for (g, f), h in self._comp.items()
                if self._src[f] in ks and self._tgt[f] in ks and self._tgt[g] in ks}
        return FinCategory(keep, mors, {A: self._id[A] for A in keep}, comp, name=name)

    def describe(self):
        """Plain-data description accepted by :func:`validate_category`."""
        return {
            "objects": list(self.objects),
            "morphisms": [[m, self._src[m], self._tgt[m]] for m in self.morphisms],
            "identity": {A: self._id[A] for A in self.objects},
            "compose": [[g, f, h] for (g, f), h in self._comp.items()],
        }


def _check_laws(C):
    for A in C.objects:
        i = C._id.get(A)
        if i is None or C._src.get(i) != A or C._tgt.get(i) != A:
            raise MissingIdentity(A)
    for (g, f), h in C._comp.items():
        if f not in C._src or g not in C._src or h not in C._src:
            raise IncompleteComposition((g, f), "unknown morphism")
        if C._tgt[f] != C._src[g]:
            raise IncompleteComposition((g, f), "entry for a non-composable pair")
        if C._src[h] != C._src[f] or C._tgt[h] != C._tgt[g]:
            raise IncompleteComposition((g, f), f"result {h!r} has the wrong type")
    for g, f in C.composable_pairs():
        if (g, f) not in C._comp:
            raise IncompleteComposition((g, f), "missing entry")
    for f in C.morphisms:
        if C._comp[C._id[C._tgt[f]], f] != f or C._comp[f, C._id[C._src[f]]] != f:
            bad = C._src[f] if C._comp[f, C._id[C._src[f]]] != f else C._tgt[f]
            raise MissingIdentity(bad, f"(identity is not neutral for {f!r})")
    _check_associative(C)
    return C


def _check_associative(C):
    local = {}
    for (A, B), ms in C._homs.items():
        for i, m in enumerate(ms):
            local[m] = i
    tables = {}

    def table(A, B, D):
        key = (A, B, D)
        if key not in tables:
            hab, hbd = C.hom(A, B), C.hom(B, D)
            tables[key] = np.array([[local[C._comp[g, f]] for f in hab] for g in hbd],
                                   dtype=np.int64).reshape(len(hbd), len(hab))
        return tables[key]

    objs = C.objects
    for A in objs:
        for D in objs:
            if len(C.hom(A, D)) < 2:
                continue  # both composites land in a hom-set with one element
            for B in objs:
                if not C.hom(A, B):
                    continue
                for Cc in objs:
                    if not C.hom(B, Cc) or not C.hom(Cc, D):
                        continue
                    t_abc, t_acd = table(A, B, Cc), table(A, Cc, D)
                    t_bcd, t_abd = table(B, Cc, D), table(A, B, D)
                    left = t_acd[:, t_abc]            # [h, g, f] -> h∘(g∘f)
                    right = t_abd[t_bcd]              # [h, g, f] -> (h∘g)∘f
                    if not np.array_equal(left, right):
                        h, g, f = map(int, np.argwhere(left != right)[0])
                        raise NonAssociative((C.hom(Cc, D)[h], C.hom(B, Cc)[g], C.hom(A, B)[f]))


def validate_category(raw, name=""):
    """Build and check a category from a plain description or an existing object.

    ``raw`` is a :class:`FinCategory` or a mapping with ``objects``,
    ``morphisms`` (triples id, source, target), ``identity`` (object to id)
    and ``compose`` (triples g, f, g∘f, or a mapping from pairs).
    """
    if isinstance(raw, FinCategory):
        return _check_laws(raw)
    comp = raw.get("compose", raw.get("composition", []))
    if isinstance(comp, dict):
        comp = {tuple(k): v for k, v in comp.items()}
    else:
        comp = {(g, f): h for g, f, h in comp}
    C = FinCategory(raw["objects"], [tuple(m) for m in raw["morphisms"]], raw["identity"], comp,
                    name=name or raw.get("name", ""))
    return _check_laws(C)


def preorder_category(elements, leq, names=None, name=""):
    """The category of a preorder: one arrow x -> y exactly when leq(x, y).

    ``names`` maps pairs to arrow ids; the default is ``id_x`` for identities
    and ``x<y`` otherwise.
    """
    elements = list(elements)
    names = dict(names or {})

    def nm(x, y):
        return names.get((x, y), f"id_{x}" if x == y else f"{x}<{y}")

    mors = [(nm(x, y), x, y) for x in elements for y in elements if x == y or leq(x, y)]
    ident = {x: nm(x, x) for x in elements}
    comp = {}
    for _, x, y in mors:
        for _, y2, z in mors:
            if y2 == y:
                comp[nm(y, z), nm(x, y)] = nm(x, z)
    return FinCategory(elements, mors, ident, comp, name=name)


def semilattice_category(L, name=""):
    """A semilattice viewed as a category."""
    return preorder_category(L.elements, L.leq, name=name or L.name)


class FinSetCategory(FinCategory):
    """Finite sets {0..n-1} for the listed sizes with all functions between them."""

    def __init__(self, sizes, name=""):
        sizes = list(sizes)
        self.sizes = {n: n for n in sizes}
        self._fn = {}
        mors = []
        for a in sizes:
            for b in sizes:
                for table in iproduct(range(b), repeat=a):
                    m = f"{a}>{b}:{''.join(map(str, table))}"
                    self._fn[m] = table
                    mors.append((m, a, b))
        ident = {a: f"{a}>{a}:{''.join(map(str, range(a)))}" for a in sizes}
        by_table = {(self_src, self_tgt, t): m for m, self_src, self_tgt in mors for t in [self._fn[m]]}
        comp = {}
        for f, a, b in mors:
            tf = self._fn[f]
            for c in sizes:
                for tg in iproduct(range(c), repeat=b):
                    g = by_table[b, c, tg]
                    comp[g, f] = by_table[a, c, tuple(tg[i] for i in tf)]
        super().__init__(sizes, mors, ident, comp, name=name or "FS" + "".join(map(str, sizes)))

    def function(self, m):
        return self._fn[m]

    def arrow(self, a, b, table):
        return f"{a}>{b}:{''.join(map(str, table))}"


def terminal_category(name="1"):
    return FinCategory(["*"], [("id_*", "*", "*")], {"*": "id_*"}, {("id_*", "id_*"): "id_*"}, name=name)


def discrete_category(objects, name=""):
    objects = list(objects)
    return FinCategory(objects, [(f"id_{A}", A, A) for A in objects], {A: f"id_{A}" for A in objects},
                       {(f"id_{A}", f"id_{A}"): f"id_{A}" for A in objects}, name=name)


def is_mono(C, f):
    """True iff post-composition with ``f`` is injective on every hom-set."""
    A = C.src(f)
    for X in C.objects:
        seen = set()
        for g in C.hom(X, A):
            h = C.compose(f, g)
            if h in seen:
                return False
            seen.add(h)
    return True


def _search_span(C, L1, L2, ok, count):
    """Lowest-id universal span (P, p1: P->L1, p2: P->L2) among cones accepted by ``ok``."""
    need = {X: count(X) for X in C.objects}
    order = sorted(C.objects, key=lambda X: need[X])
    for P in C.objects:
        if any(len(C.hom(X, P)) != need[X] for X in C.objects):
            continue
        for p1 in C.hom(P, L1):
            for p2 in C.hom(P, L2):
                if not ok(p1, p2):
                    continue
                if all(len({(C.compose(p1, m), C.compose(p2, m)) for m in C.hom(X, P)}) == need[X]
                       for X in order):
                    return P, p1, p2
    return None


class ChosenStructure:
    """Chosen, possibly partial, terminal object, products and pullbacks.

    Tabled entries win; otherwise limits are searched with a lowest-id
    tie-break (unless ``search`` is off) and memoised. Absence raises
    :class:`MissingStructure`.
    """

    def __init__(self, category, terminal=None, products=None, pullbacks=None, search=True):
        self.category = category
        self._terminal = terminal
        self._products = dict(products or {})
        self._pullbacks = dict(pullbacks or {})
        self._given = (terminal, dict(self._products), dict(self._pullbacks))
        self.search = search
        self._absent = set()
        self._mediate_cache = {}

    def terminal(self):
        C = self.category
        if self._terminal is None and self.search and "terminal" not in self._absent:
            found = next((T for T in C.objects if all(len(C.hom(X, T)) == 1 for X in C.objects)), None)
            if found is None:
                self._absent.add("terminal")
            self._terminal = found
        if self._terminal is None:
            raise MissingStructure("terminal")
        return self._terminal

    def to_terminal(self, X):
        return self.category.hom(X, self.terminal())[0]

    def product(self, A, B):
        key = (A, B)
        if key in self._products:
            return self._products[key]
        if key in self._absent or not self.search:
            raise MissingStructure("product", A, B)
        C = self.category
        found = _search_span(C, A, B, lambda p1, p2: True,
                             lambda X: len(C.hom(X, A)) * len(C.hom(X, B)))
        if found is None:
            self._absent.add(key)
            raise MissingStructure("product", A, B)
        self._products[key] = found
        return found

    def has_product(self, A, B):
        try:
            self.product(A, B)
            return True
        except MissingStructure:
            return False

    def pullback(self, f, g):
        """Pullback of the cospan f: X -> B <- Y: g as (P, leg to X, leg to Y)."""
        key = (f, g)
        if key in self._pullbacks:
            return self._pullbacks[key]
        C = self.category
        if C.tgt(f) != C.tgt(g):
            raise ValueError(f"{f!r} and {g!r} do not share a codomain")
        # pullbacks along identities are chosen strictly
        if C.is_identity(f):
            return (C.src(g), g, C.identity(C.src(g)))
        if C.is_identity(g):
            return (C.src(f), C.identity(C.src(f)), f)
        if key in self._absent or not self.search:
            raise MissingStructure("pullback", f, g)
        X, Y = C.src(f), C.src(g)

        def count(Z):
            c1 = Counter(C.compose(f, x) for x in C.hom(Z, X))
            c2 = Counter(C.compose(g, y) for y in C.hom(Z, Y))
            return sum(n * c2[k] for k, n in c1.items())

        found = _search_span(C, X, Y, lambda p1, p2: C.compose(f, p1) == C.compose(g, p2), count)
        if found is None:
            self._absent.add(key)
            raise MissingStructure("pullback", f, g)
        self._pullbacks[key] = found
        return found

    def has_pullback(self, f, g):
        try:
            self.pullback(f, g)
            return True
        except MissingStructure:
            return False

    def mediate(self, span, x1, x2):
        """The unique m with p1∘m = x1 and p2∘m = x2."""
        key = (span, x1, x2)
        if key not in self._mediate_cache:
            C = self.category
            P, p1, p2 = span
            found = [m for m in C.hom(C.src(x1), P) if C.compose(p1, m) == x1 and C.compose(p2, m) == x2]
            if len(found) != 1:
                raise MissingStructure("mediating arrow", span, x1, x2)
            self._mediate_cache[key] = found[0]
        return self._mediate_cache[key]

    def pair(self, f, g):
        """⟨f, g⟩ into the chosen product of the codomains."""
        C = self.category
        return self.mediate(self.product(C.tgt(f), C.tgt(g)), f, g)

    def diagonal(self, A):
        i = self.category.identity(A)
        return self.pair(i, i)

    def cross(self, f, g):
        """f × g between chosen products."""
        C = self.category
        P, p1, p2 = self.product(C.src(f), C.src(g))
        return self.pair(C.compose(f, p1), C.compose(g, p2))

    def tabled(self):
        """The limits supplied at construction, excluding searched ones."""
        terminal, products, pullbacks = self._given
        return {"terminal": terminal, "products": dict(products), "pullbacks": dict(pullbacks)}


def require_pullback(C, S, f, g):
    """Pullback span of f and g from ``S`` (tabled or searched)."""
    if S.category is not C:
        raise ValueError("structure belongs to another category")
    return S.pullback(f, g)


def validate_structure(S):
    """Check every tabled product and pullback against its universal property.

    Returns a list of problems; an empty list means the table is sound.
    """
    C = S.category
    problems = []
    for (A, B), (P, p1, p2) in S._products.items():
        if C.src(p1) != P or C.tgt(p1) != A or C.src(p2) != P or C.tgt(p2) != B:
            problems.append(("product has wrong legs", (A, B)))
            continue
        for X in C.objects:
            got = {(C.compose(p1, m), C.compose(p2, m)) for m in C.hom(X, P)}
            if len(got) != len(C.hom(X, P)) or len(got) != len(C.hom(X, A)) * len(C.hom(X, B)):
                problems.append(("product not universal", (A, B), X))
                break
        if (B, A) in S._products and C.iso_between(S._products[B, A][0], P) is None:
            problems.append(("product table not symmetric", (A, B)))
    for (f, g), (P, pf, pg) in S._pullbacks.items():
        if C.compose(f, pf) != C.compose(g, pg):
            problems.append(("pullback square does not commute", (f, g)))
            continue
        X, Y = C.src(f), C.src(g)
        for Z in C.objects:
            cones = {(x, y) for x in C.hom(Z, X) for y in C.hom(Z, Y) if C.compose(f, x) == C.compose(g, y)}
            got = {(C.compose(pf, m), C.compose(pg, m)) for m in C.hom(Z, P)}
            if got != cones or len(got) != len(C.hom(Z, P)):
                problems.append(("pullback not universal", (f, g), Z))
                break
    return problems


# left classes

class LeftClass(frozenset):
    """A set of morphism ids; see :func:`verify_left_class` for the axioms."""

    def __new__(cls, members, name=""):
        obj = super().__new__(cls, members)
        obj.name = name
        return obj

    def __repr__(self):
        return f"LeftClass({self.name or sorted(map(str, self))})"


def all_morphisms(C):
    return LeftClass(C.morphisms, name="all")


def identities(C):
    return LeftClass((C.identity(A) for A in C.objects), name="identities")


def isomorphisms(C):
    return LeftClass((m for m in C.morphisms if C.is_iso(m)), name="isos")


def monomorphisms(C):
    return LeftClass((m for m in C.morphisms if is_mono(C, m)), name="monos")


def projections(C, S):
    """First and second product projections of every available product, up to isomorphism."""
    out = set()
    for A in C.objects:
        for B in C.objects:
            if not S.has_product(A, B):
                continue
            P, p1, p2 = S.product(A, B)
            for Q in C.objects:
                for i in C.hom(Q, P):
                    if C.is_iso(i):
                        out.add(C.compose(p1, i))
                        out.add(C.compose(p2, i))
    return LeftClass(out, name="projections")


@dataclass
class LeftClassReport:
    identities: bool
    composition: bool
    pullback_stable: bool
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self):
        return self.identities and self.composition and self.pullback_stable

    def __bool__(self):
        return self.ok


def verify_left_class(C, S, lam):
    """Identities, closure under composition, and stability under base change."""
    lam = set(lam)
    bad = []
    ids_ok = True
    for A in C.objects:
        if C.identity(A) not in lam:
            ids_ok = False
            bad.append(("identity", C.identity(A)))
            break
    comp_ok = True
    for f in C.morphisms:
        if f not in lam:
            continue
        for g in C.hom_from(C.tgt(f)):
            if g in lam and C.compose(g, f) not in lam:
                comp_ok = False
                bad.append(("composition", (g, f)))
                break
        if not comp_ok:
            break
    pb_ok = True
    for f in C.morphisms:
        if f not in lam:
            continue
        for g in C.arrows_into(C.tgt(f)):
            try:
                _, _, leg = S.pullback(f, g)
            except MissingStructure:
                pb_ok = False
                bad.append(("missing pullback", (f, g)))
                continue
            if leg not in lam:
                pb_ok = False
                bad.append(("base change", (f, g, leg)))
    return LeftClassReport(ids_ok, comp_ok, pb_ok, bad)


# functors and equivalences

@dataclass
class FunctorData:
    source: FinCategory
    target: FinCategory
    obj_map: dict
    mor_map: dict

    def __call__(self, x):
        return self.obj_map[x] if x in self.obj_map else self.mor_map[x]

    def failures(self):
        S, T, F, G = self.source, self.target, self.obj_map, self.mor_map
        out = []
        for m in S.morphisms:
            if T.src(G[m]) != F[S.src(m)] or T.tgt(G[m]) != F[S.tgt(m)]:
                out.append(("typing", m))
        for A in S.objects:
            if G[S.identity(A)] != T.identity(F[A]):
                out.append(("identity", A))
        for g, f in S.composable_pairs():
            if G[S.compose(g, f)] != T.compose(G[g], G[f]):
                out.append(("composition", (g, f)))
                break
        return out

    @property
    def is_functor(self):
        return not self.failures()

    def hom_map_defects(self):
        """(non-full pairs, non-faithful pairs) over all pairs of source objects."""
        S, T = self.source, self.target
        not_full, not_faithful = [], []
        for A in S.objects:
            for B in S.objects:
                image = [self.mor_map[m] for m in S.hom(A, B)]
                if len(set(image)) != len(image):
                    not_faithful.append((A, B))
                if set(image) != set(T.hom(self.obj_map[A], self.obj_map[B])):
                    not_full.append((A, B))
        return not_full, not_faithful

    def essential_image_defects(self):
        T = self.target
        image = set(self.obj_map.values())
        return [Z for Z in T.objects if not any(T.iso_between(Y, Z) is not None for Y in image)]


@dataclass
class EquivalenceWitness:
    functor: FunctorData
    fullness: dict
    faithful: bool
    essential: dict

    def verify(self):
        F = self.functor
        if not F.is_functor:
            return False
        S, T = F.source, F.target
        for (A, B), table in self.fullness.items():
            for t, s in table.items():
                if F.mor_map[s] != t or S.src(s) != A or S.tgt(s) != B:
                    return False
            if set(table) != set(T.hom(F.obj_map[A], F.obj_map[B])):
                return False
        not_full, not_faithful = F.hom_map_defects()
        if not_full or not_faithful:
            return False
        for Z, (X, iso) in self.essential.items():
            if T.src(iso) != F.obj_map[X] or T.tgt(iso) != Z or not T.is_iso(iso):
                return False
        return set(self.essential) == set(T.objects)


@dataclass
class NotFound:
    reason: str   # "budget-exhausted" or "proven-absent"
    detail: str = ""

    def __bool__(self):
        return False


def witness_from_functor(F):
    """Certificates for a functor that is full, faithful and essentially surjective, else None."""
    not_full, not_faithful = F.hom_map_defects()
    if not_full or not_faithful or F.essential_image_defects():
        return None
    S, T = F.source, F.target
    fullness = {(A, B): {F.mor_map[m]: m for m in S.hom(A, B)} for A in S.objects for B in S.objects}
    essential = {}
    for Z in T.objects:
        for X in S.objects:
            iso = T.iso_between(F.obj_map[X], Z)
            if iso is not None:
                essential[Z] = (X, iso)
                break
    return EquivalenceWitness(F, fullness, True, essential)


def iso_classes(C):
    """Map each object to the lowest-index object isomorphic to it."""
    rep = {}
    for A in C.objects:
        rep[A] = next(R for R in C.objects if R == A or C.iso_between(R, A) is not None)
    return rep


def skeleton(C):
    rep = iso_classes(C)
    return C.full_subcategory(sorted(set(rep.values()), key=C.obj_index.get), name=f"sk({C.name})")


def _iso_search(S1, S2, budget, counter):
    """Isomorphisms between two skeletal categories.

    Returns the a-priori object-assignment space and a generator function
    yielding ``(obj_map, mor_map)`` pairs in canonical order.
    """
    o1, o2 = list(S1.objects), list(S2.objects)

    def sig(S, A):
        return (len(S.hom(A, A)), sorted(len(S.hom(A, B)) for B in S.objects),
                sorted(len(S.hom(B, A)) for B in S.objects))

    cands = {A: [B for B in o2 if sig(S2, B) == sig(S1, A)] for A in o1}
    space = 1
    for A in o1:
        space *= max(1, len(cands[A]))
    obj, used = {}, set()
    pairs = list(S1.composable_pairs())

    def tick():
        counter[0] += 1
        if counter[0] > budget:
            raise _Budget()

    def morphism_search():
        order = [m for m in S1.morphisms if not S1.is_identity(m)]
        mm = {S1.identity(A): S2.identity(obj[A]) for A in o1}
        taken = set()

        def consistent(m):
            for g, f in pairs:
                h = S1.compose(g, f)
                if m not in (g, f, h):
                    continue
                if g in mm and f in mm and h in mm and mm[h] != S2.compose(mm[g], mm[f]):
                    return False
            return True

        def go(k):
            tick()
            if k == len(order):
                yield dict(mm)
                return
            m = order[k]
            A, B = S1.src(m), S1.tgt(m)
            for t in S2.hom(obj[A], obj[B]):
                if t in taken:
                    continue
                mm[m] = t
                taken.add(t)
                if consistent(m):
                    yield from go(k + 1)
                del mm[m]
                taken.discard(t)

        yield from go(0)

    def go_obj(k):
        tick()
        if k == len(o1):
            for mm in morphism_search():
                yield dict(obj), mm
            return
        A = o1[k]
        for B in cands[A]:
            if B in used:
                continue
            if all(len(S1.hom(A, X)) == len(S2.hom(B, obj[X])) and len(S1.hom(X, A)) == len(S2.hom(obj[X], B))
                   for X in obj):
                obj[A] = B
                used.add(B)
                yield from go_obj(k + 1)
                del obj[A]
                used.discard(B)

    return space, lambda: go_obj(0)


def iter_isomorphisms(C, D, budget=200_000):
    """Every isomorphism C -> D as (obj_map, mor_map); raises BudgetExceeded past the budget."""
    counter = [0]
    if len(C.objects) != len(D.objects) or len(C.morphisms) != len(D.morphisms):
        return
    space, run = _iso_search(C, D, budget, counter)
    if space > budget:
        raise BudgetExceeded(space, budget)
    try:
        yield from run()
    except _Budget:
        raise BudgetExceeded(counter[0], budget) from None


class _Budget(Exception):
    pass


def search_equivalence(C, D, budget=200_000):
    """Find an equivalence C -> D, or report why none was found.

    Both categories are reduced to skeletons; an equivalence exists iff the
    skeletons are isomorphic. ``budget`` bounds search nodes: an a-priori
    object-assignment space above it raises :class:`BudgetExceeded`, running
    out during search returns ``NotFound("budget-exhausted")``.
    """
    S1, S2 = skeleton(C), skeleton(D)
    if len(S1.objects) != len(S2.objects) or len(S1.morphisms) != len(S2.morphisms):
        return NotFound("proven-absent", f"skeletons differ in size: {len(S1.objects)}/{len(S1.morphisms)} "
                                         f"vs {len(S2.objects)}/{len(S2.morphisms)}")
    counter = [0]
    space, run = _iso_search(S1, S2, budget, counter)
    if space > budget:
        raise BudgetExceeded(space, budget)
    try:
        found = next(run(), None)
    except _Budget:
        return NotFound("budget-exhausted", f"{counter[0]} nodes")
    if found is None:
        return NotFound("proven-absent", "no isomorphism between skeletons")
    obj, mor = found
    rep_c, rep_d = iso_classes(C), iso_classes(D)
    to_rep = {X: C.iso_between(X, rep_c[X]) for X in C.objects}
    from_rep = {X: C.iso_between(rep_c[X], X) for X in C.objects}
    obj_map = {X: obj[rep_c[X]] for X in C.objects}
    mor_map = {}
    for f in C.morphisms:
        X, Y = C.src(f), C.tgt(f)
        mor_map[f] = mor[C.compose(to_rep[Y], f, from_rep[X])]
    F = FunctorData(C, D, obj_map, mor_map)
    w = witness_from_functor(F)
    if w is None or not w.verify():
        raise AssertionError("equivalence search produced an invalid witness")
    return w


def quotient_category(C, rep, name=""):
    """Quotient by a congruence on hom-sets given as morphism -> representative."""
    keep = [m for m in C.morphisms if rep[m] == m]
    mors = [(m, C.src(m), C.tgt(m)) for m in keep]
    comp = {}
    for g in keep:
        for f in keep:
            if C.tgt(f) == C.src(g):
                comp[g, f] = rep[C.compose(g, f)]
    return FinCategory(C.objects, mors, {A: rep[C.identity(A)] for A in C.objects}, comp, name=name)
