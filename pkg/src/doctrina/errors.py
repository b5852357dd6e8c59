"""Exception types shared across the toolkit.

Every error carries the offending data as attributes so reports can render
witnesses without parsing messages.
"""


class DoctrinaError(Exception):
    """Base class for all toolkit errors."""


class SizeCap(DoctrinaError):
    def __init__(self, what, size, cap):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.what, self.size, self.cap = what, size, cap


class MissingStructure(DoctrinaError):
    """A limit the computation needs is absent from a truncated base."""

    def __init__(self, kind, *args):
        super().__init__(f"missing {kind} for {args!r}")
        self.kind, self.args_ = kind, args


# category laws
class NonAssociative(DoctrinaError):
    def __init__(self, triple):
        super().__init__(f"composition not associative on {triple!r}")
        self.triple = triple


class MissingIdentity(DoctrinaError):
    def __init__(self, obj, detail=""):
        super().__init__(f"no identity for object {obj!r} {detail}".rstrip())
        self.obj = obj


class IncompleteComposition(DoctrinaError):
    def __init__(self, pair, detail=""):
        super().__init__(f"composition table wrong at {pair!r} {detail}".rstrip())
        self.pair = pair


class BudgetExceeded(DoctrinaError):
    def __init__(self, space, budget):
        super().__init__(f"search space {space} exceeds budget {budget}")
        self.space, self.budget = space, budget


# order laws
class NotAPoset(DoctrinaError):
    def __init__(self, witness):
        super().__init__(f"not a partial order: {witness!r}")
        self.witness = witness


class NoMeet(DoctrinaError):
    def __init__(self, pair):
        super().__init__(f"no greatest lower bound for {pair!r}")
        self.pair = pair


class NoTop(DoctrinaError):
    def __init__(self):
        super().__init__("no greatest element")


class NotDistributive(DoctrinaError):
    def __init__(self, triple):
        super().__init__(f"distributivity fails on {triple!r}")
        self.triple = triple


class NoAdjoint(DoctrinaError):
    def __init__(self, pair, detail=""):
        super().__init__(f"no left adjoint; law fails on {pair!r} {detail}".rstrip())
        self.pair = pair


# doctrine laws
class NotFunctorial(DoctrinaError):
    def __init__(self, pair):
        super().__init__(f"reindexing not functorial on {pair!r}")
        self.pair = pair


class NotMeetPreserving(DoctrinaError):
    def __init__(self, morphism, pair):
        super().__init__(f"reindexing along {morphism!r} does not preserve the meet of {pair!r}")
        self.morphism, self.pair = morphism, pair


class NotTopPreserving(DoctrinaError):
    def __init__(self, morphism):
        super().__init__(f"reindexing along {morphism!r} does not preserve top")
        self.morphism = morphism


class NotStableSystem(DoctrinaError):
    def __init__(self, witness):
        super().__init__(f"not a stable system of monos: {witness!r}")
        self.witness = witness


class AmbiguousDelta(DoctrinaError):
    def __init__(self, obj, candidates):
        super().__init__(f"several equality predicates on {obj!r}: {candidates!r}")
        self.obj, self.candidates = obj, candidates


class NotClosedUnderReindex(DoctrinaError):
    def __init__(self, morphism, element):
        super().__init__(f"selection not closed under reindexing {element!r} along {morphism!r}")
        self.morphism, self.element = morphism, element


class NotClosedUnderMeet(DoctrinaError):
    def __init__(self, obj, pair):
        super().__init__(f"selection at {obj!r} not closed under the meet of {pair!r}")
        self.obj, self.pair = obj, pair


class MissingTop(DoctrinaError):
    def __init__(self, obj):
        super().__init__(f"selection at {obj!r} misses the top element")
        self.obj = obj


# constructions
class NotACongruence(DoctrinaError):
    def __init__(self, witness):
        super().__init__(f"relation is not a congruence: {witness!r}")
        self.witness = witness


class AmbiguousComprehension(DoctrinaError):
    def __init__(self, element, candidates):
        super().__init__(f"non-isomorphic comprehensions of {element!r}: {candidates!r}")
        self.element, self.candidates = element, candidates


class NonCommuting(DoctrinaError):
    def __init__(self, edge, witness):
        super().__init__(f"diagram edge {edge} does not commute at {witness!r}")
        self.edge, self.witness = edge, witness


class UnsupportedTheorem(DoctrinaError):
    def __init__(self, theorem_id):
        super().__init__(f"unknown theorem id {theorem_id!r}")
        self.theorem_id = theorem_id


# instance files
class ParseError(DoctrinaError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line, self.message = line, message


class UnresolvedRef(DoctrinaError):
    def __init__(self, ref, where=""):
        super().__init__(f"unresolved reference {ref!r} {where}".rstrip())
        self.ref = ref
