"""Finite inf-semilattices, monotone maps, adjoints and downset frames.

Elements are arbitrary hashable labels. The order in which a semilattice lists
its elements fixes every tie-break made downstream, so constructions that
build semilattices always list elements in a reproducible order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import NoAdjoint, NoMeet, NoTop, NotAPoset, NotDistributive, SizeCap

DEFAULT_FRAME_CAP = 2 ** 12


class InfSemilattice:
    """A finite poset with a top element and binary meets.

    Build instances with :func:`validate_semilattice`; the constructor trusts
    its arguments. ``leq`` and ``meet`` are callables so large frames can use
    set operations instead of tables.
    """

    def __init__(self, elements, leq, meet, top, join=None, name=""):
        self.elements = tuple(elements)
        self.index = {x: i for i, x in enumerate(self.elements)}
        self._leq = leq
        self._meet = meet
        self._join = join
        self._join_cache = {}
        self.top = top
        self.name = name

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.index

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<InfSemilattice{label} with {len(self)} elements>"

    def leq(self, x, y):
        return self._leq(x, y)

    def meet(self, x, y):
        return self._meet(x, y)

    def meet_all(self, xs):
        out = self.top
        for x in xs:
            out = self._meet(out, x)
        return out

    @property
    def bottom(self):
        return self.meet_all(self.elements)

    def join(self, x, y):
        if self._join is not None:
            return self._join(x, y)
        key = (x, y)
        if key not in self._join_cache:
            # least upper bound exists because finite meets with top give a lattice
            self._join_cache[key] = self.meet_all(z for z in self.elements if self.leq(x, z) and self.leq(y, z))
        return self._join_cache[key]

    def join_all(self, xs):
        out = self.bottom
        for x in xs:
            out = self.join(out, x)
        return out

    def up(self, x):
        return [y for y in self.elements if self.leq(x, y)]

    def down(self, x):
        return [y for y in self.elements if self.leq(y, x)]

    def leq_pairs(self):
        return [(x, y) for x in self.elements for y in self.elements if x != y and self.leq(x, y)]

    def covers(self):
        """Hasse diagram edges (x, y) with x < y and nothing strictly between."""
        out = []
        for x, y in self.leq_pairs():
            if not any(z != x and z != y and self.leq(x, z) and self.leq(z, y) for z in self.elements):
                out.append((x, y))
        return out

    def restrict(self, subset, name=""):
        """The full subposet on ``subset``, which must contain top and be meet-closed."""
        keep = [x for x in self.elements if x in set(subset)]
        return InfSemilattice(keep, self._leq, self._meet, self.top, name=name or self.name)

    def principal_downset(self, a, name=""):
        """The sub-semilattice of elements below ``a`` with ``a`` as top."""
        keep = [x for x in self.elements if self.leq(x, a)]
        return InfSemilattice(keep, self._leq, self._meet, a, name=name)


def validate_semilattice(elements, leq_pairs, name=""):
    """Build an :class:`InfSemilattice` from elements and order pairs.

    The reflexive-transitive closure of ``leq_pairs`` is taken first, so a
    Hasse diagram is enough. Raises :class:`NotAPoset` on a cycle,
    :class:`NoTop` or :class:`NoMeet` when those fail to exist.
    """
    elements = list(elements)
    if len(set(elements)) != len(elements):
        raise NotAPoset(("duplicate element", elements))
    pos = {x: i for i, x in enumerate(elements)}
    n = len(elements)
    rel = [[i == j for j in range(n)] for i in range(n)]
    for x, y in leq_pairs:
        if x not in pos or y not in pos:
            raise NotAPoset(("unknown element", x if x not in pos else y))
        rel[pos[x]][pos[y]] = True
    for k in range(n):
        rk = rel[k]
        for i in range(n):
            if rel[i][k]:
                ri = rel[i]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True
    for i in range(n):
        for j in range(i + 1, n):
            if rel[i][j] and rel[j][i]:
                raise NotAPoset((elements[i], elements[j]))
    if n == 0:
        raise NoTop()
    tops = [j for j in range(n) if all(rel[i][j] for i in range(n))]
    if not tops:
        raise NoTop()
    meet = {}
    for i in range(n):
        for j in range(i, n):
            lower = [k for k in range(n) if rel[k][i] and rel[k][j]]
            glb = [k for k in lower if all(rel[m][k] for m in lower)]
            if not glb:
                raise NoMeet((elements[i], elements[j]))
            meet[elements[i], elements[j]] = meet[elements[j], elements[i]] = elements[glb[0]]
    leq = {(elements[i], elements[j]) for i in range(n) for j in range(n) if rel[i][j]}
    return InfSemilattice(elements, lambda x, y: (x, y) in leq, lambda x, y: meet[x, y],
                          elements[tops[0]], name=name)


def chain(n, name=""):
    """The n-element chain 0 < 1 < ... < n-1."""
    return validate_semilattice(range(n), [(i, i + 1) for i in range(n - 1)], name=name or f"CH{n}")


def boolean_lattice(atoms, name=""):
    """Subsets of ``atoms`` ordered by inclusion, elements as frozensets."""
    atoms = list(atoms)
    subsets = [frozenset(c) for k in range(len(atoms) + 1) for c in combinations(atoms, k)]
    return InfSemilattice(subsets, lambda x, y: x <= y, lambda x, y: x & y, frozenset(atoms),
                          join=lambda x, y: x | y, name=name or f"B{2 ** len(atoms)}")


def product_lattice(L, M, name=""):
    """Componentwise order on pairs."""
    elements = [(x, y) for x in L for y in M]
    return InfSemilattice(elements, lambda p, q: L.leq(p[0], q[0]) and M.leq(p[1], q[1]),
                          lambda p, q: (L.meet(p[0], q[0]), M.meet(p[1], q[1])), (L.top, M.top),
                          join=lambda p, q: (L.join(p[0], q[0]), M.join(p[1], q[1])), name=name)


def power_lattice(L, n, name=""):
    """Functions from an n-element set into L, ordered pointwise, as tuples."""
    elements = [()]
    for _ in range(n):
        elements = [e + (x,) for e in elements for x in L]
    return InfSemilattice(elements, lambda p, q: all(L.leq(a, b) for a, b in zip(p, q)),
                          lambda p, q: tuple(L.meet(a, b) for a, b in zip(p, q)), (L.top,) * n,
                          join=lambda p, q: tuple(L.join(a, b) for a, b in zip(p, q)), name=name)


def is_order_isomorphic(L, M):
    """Search an order isomorphism L -> M; returns a dict or None."""
    if len(L) != len(M):
        return None
    sig = lambda S, x: (len(S.up(x)), len(S.down(x)))
    src = list(L)
    cand = {x: [y for y in M if sig(M, y) == sig(L, x)] for x in src}
    assign, used = {}, set()

    def extend(k):
        if k == len(src):
            return True
        x = src[k]
        for y in cand[x]:
            if y in used:
                continue
            if all(L.leq(x, z) == M.leq(y, assign[z]) and L.leq(z, x) == M.leq(assign[z], y) for z in assign):
                assign[x] = y
                used.add(y)
                if extend(k + 1):
                    return True
                del assign[x]
                used.discard(y)
        return False

    return dict(assign) if extend(0) else None


class MonotoneMap:
    """A map between finite inf-semilattices given by a table."""

    def __init__(self, source, target, table, name=""):
        self.source = source
        self.target = target
        self.table = dict(table)
        self.name = name

    def __call__(self, x):
        return self.table[x]

    def __repr__(self):
        return f"<MonotoneMap {self.name or ''} {len(self.source)}->{len(self.target)}>"

    def __eq__(self, other):
        return isinstance(other, MonotoneMap) and self.table == other.table

    def __hash__(self):
        return hash(tuple(sorted(self.table.items(), key=repr)))

    @property
    def is_monotone(self):
        S, T, h = self.source, self.target, self.table
        return all(T.leq(h[x], h[y]) for x in S for y in S if S.leq(x, y))

    @property
    def preserves_top(self):
        return self.table[self.source.top] == self.target.top

    @property
    def preserves_meets(self):
        S, T, h = self.source, self.target, self.table
        return all(h[S.meet(x, y)] == T.meet(h[x], h[y]) for x in S for y in S)

    def meet_failure(self):
        S, T, h = self.source, self.target, self.table
        for x in S:
            for y in S:
                if h[S.meet(x, y)] != T.meet(h[x], h[y]):
                    return (x, y)
        return None

    @property
    def is_injective(self):
        return len(set(self.table.values())) == len(self.table)

    @property
    def is_surjective(self):
        return set(self.table.values()) == set(self.target.elements)

    @property
    def is_order_embedding(self):
        S, T, h = self.source, self.target, self.table
        return all(S.leq(x, y) == T.leq(h[x], h[y]) for x in S for y in S)

    @property
    def is_order_iso(self):
        return self.is_surjective and self.is_order_embedding

    def compose(self, other):
        """``self`` after ``other``."""
        return MonotoneMap(other.source, self.target, {x: self.table[other.table[x]] for x in other.source})

    def inverse(self):
        return MonotoneMap(self.target, self.source, {y: x for x, y in self.table.items()})


def identity_map(L):
    return MonotoneMap(L, L, {x: x for x in L}, name="id")


def left_adjoint_of(h):
    """Left adjoint of ``h: S -> T`` as a map ``T -> S``.

    The candidate sends a to the meet of all b with a <= h(b); it is returned
    only after the law L(a) <= b iff a <= h(b) has been checked on every pair.
    """
    S, T = h.source, h.target
    table = {}
    for a in T:
        above = [b for b in S if T.leq(a, h(b))]
        if not above:
            raise NoAdjoint((a, None), "no element maps above it")
        table[a] = S.meet_all(above)
    for a in T:
        for b in S:
            if S.leq(table[a], b) != T.leq(a, h(b)):
                raise NoAdjoint((a, b))
    return MonotoneMap(T, S, table, name=f"left adjoint of {h.name}" if h.name else "")


@dataclass
class FiniteFrame:
    """A finite distributive lattice; ``certificate`` says how distributivity was established."""
    carrier: InfSemilattice
    certificate: str = "checked on all triples"

    @property
    def elements(self):
        return self.carrier.elements

    def leq(self, x, y):
        return self.carrier.leq(x, y)

    def meet(self, x, y):
        return self.carrier.meet(x, y)

    def join(self, x, y):
        return self.carrier.join(x, y)

    def join_all(self, xs):
        return self.carrier.join_all(xs)

    @property
    def top(self):
        return self.carrier.top

    @property
    def bottom(self):
        return self.carrier.bottom

    def __len__(self):
        return len(self.carrier)

    def __iter__(self):
        return iter(self.carrier)


def validate_frame(L):
    """Check finite distributivity x ∧ (y ∨ z) = (x ∧ y) ∨ (x ∧ z)."""
    for x in L:
        for y in L:
            for z in L:
                if L.meet(x, L.join(y, z)) != L.join(L.meet(x, y), L.meet(x, z)):
                    raise NotDistributive((x, y, z))
    return FiniteFrame(L)


def downset_frame(M, cap=DEFAULT_FRAME_CAP):
    """The frame of downsets of ``M`` with the embedding a ↦ ↓a.

    Returns ``(frame, eta)``. Downsets are frozensets of elements of ``M``,
    listed by size and then by the positions of their members.
    """
    n = len(M)
    if 2 ** n > cap:
        raise SizeCap("downset frame", 2 ** n, cap)
    elems = list(M)
    below = [frozenset(j for j in range(n) if M.leq(elems[j], elems[i])) for i in range(n)]
    masks = []
    for mask in range(2 ** n):
        members = [i for i in range(n) if mask >> i & 1]
        if all(below[i] <= set(members) for i in members):
            masks.append(tuple(members))
    masks.sort(key=lambda t: (len(t), t))
    downsets = [frozenset(elems[i] for i in t) for t in masks]
    carrier = InfSemilattice(downsets, lambda x, y: x <= y, lambda x, y: x & y, frozenset(elems),
                             join=lambda x, y: x | y, name=f"D({M.name})" if M.name else "D")
    frame = FiniteFrame(carrier, certificate="downsets under union and intersection")
    eta = MonotoneMap(M, carrier, {a: frozenset(M.down(a)) for a in M}, name="principal downset")
    return frame, eta


def supercompact_elements(F):
    """Elements x with x not below the join of everything x is not below."""
    out = []
    for x in F.elements:
        rest = F.join_all(y for y in F.elements if not F.leq(x, y))
        if not F.leq(x, rest):
            out.append(x)
    return out


def supercompact_oracle(F, max_size=12):
    """Subset-quantified definition, for cross-checking on small frames."""
    elems = list(F.elements)
    if len(elems) > max_size:
        raise SizeCap("supercompact oracle", len(elems), max_size)
    out = []
    for x in elems:
        ok = True
        for mask in range(2 ** len(elems)):
            subset = [elems[i] for i in range(len(elems)) if mask >> i & 1]
            if F.leq(x, F.join_all(subset)) and not any(F.leq(x, b) for b in subset):
                ok = False
                break
        if ok:
            out.append(x)
    return out


@dataclass
class SupercoherenceReport:
    ok: bool
    diagnosis: str | None
    supercompacts: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def check_supercoherent(F):
    """Every element a join of supercompacts and supercompacts closed under finite meets.

    The empty meet is checked first, so a frame whose top is not supercompact
    reports the diagnosis ``"top"``.
    """
    sc = supercompact_elements(F)
    scs = set(sc)
    if F.top not in scs:
        return SupercoherenceReport(False, "top", sc)
    for x, y in combinations(sc, 2):
        if F.meet(x, y) not in scs:
            return SupercoherenceReport(False, f"meet of {x!r} and {y!r}", sc)
    for x in F.elements:
        if F.join_all(c for c in sc if F.leq(c, x)) != x:
            return SupercoherenceReport(False, f"element {x!r} is not a join of supercompacts", sc)
    return SupercoherenceReport(True, None, sc)
