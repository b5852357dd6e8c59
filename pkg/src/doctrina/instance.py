"""Instance files: a YAML (or JSON) description of categories, structures,
semilattices, left classes, doctrines and subdoctrine selections.

Identifiers are strings. Every block is cross-referenced by name and
resolved lazily; a dangling name raises :class:`UnresolvedRef` with the line
of the offending block. Layout::

    name: demo
    categories:
      C2:
        objects: [a, b]
        morphisms: [[id_a, a, a], [id_b, b, b], [u, a, b]]
        identity: {a: id_a, b: id_b}
        compose: []            # composites with an identity may be omitted
      FS: {finsets: [0, 1, 2]}
      P3: {preorder: [x, y, z], order: [[x, y], [y, z]]}
    structures:
      S: {category: C2, terminal: b, products: [[a, b, a, id_a, u]], pullbacks: []}
    semilattices:
      CH2: {elements: ["0", "1"], order: [["0", "1"]]}
      B4: {boolean: [p, q]}
    classes:
      all: {category: C2, preset: full}
    doctrines:
      over-b:
        base: C2
        fibres: {a: M1, b: CH2}
        reindex: {u: {"0": T, "1": T}}
      Psi: {kind: weak-subobjects, base: C2}
    selections:
      tops: {doctrine: over-b, preset: tops}

``frames`` is accepted as a synonym of ``semilattices`` whose entries are
additionally validated as frames.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .doctrine import (doctrine_from_tables, localic_doctrine, m_subobjects_doctrine,
                       powerset_doctrine, terminal_doctrine, trivial_doctrine, weak_subobjects_doctrine)
from .errors import DoctrinaError, ParseError, UnresolvedRef
from .fincat import (ChosenStructure, FinCategory, FinSetCategory, LeftClass, preorder_category,
                     validate_category)
from .order import boolean_lattice, validate_frame, validate_semilattice

SECTIONS = ("categories", "structures", "semilattices", "frames", "classes", "doctrines", "selections")
DOCTRINE_KINDS = ("tables", "trivial", "weak-subobjects", "subobjects", "powerset", "localic", "terminal")


# loading with line numbers

class _Map(dict):
    line = 0


class _Loader(yaml.SafeLoader):
    pass


def _construct_map(loader, node):
    loader.flatten_mapping(node)
    out = _Map()
    out.line = node.start_mark.line + 1
    for k_node, v_node in node.value:
        key = loader.construct_object(k_node, deep=True)
        if isinstance(key, list):
            key = tuple(key)
        out[key] = loader.construct_object(v_node, deep=True)
    return out


_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_map)


def ident(x):
    """Canonical string id of an object, arrow or element."""
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (frozenset, set)):
        return "{" + ",".join(sorted(ident(y) for y in x)) + "}"
    if isinstance(x, tuple):
        return "(" + ",".join(ident(y) for y in x) + ")"
    if hasattr(x, "carrier") and hasattr(x, "relation"):
        return "per" + ident((x.carrier, x.relation))
    return str(x)


def _norm(x):
    """Stringify scalars recursively so ids compare as strings."""
    if isinstance(x, dict):
        out = _Map({ident(k): _norm(v) for k, v in x.items()})
        out.line = getattr(x, "line", 0)
        return out
    if isinstance(x, list):
        return [_norm(v) for v in x]
    if x is None:
        return None
    return ident(x)


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_plain(v) for v in x]
    return x


# the model

@dataclass
class InstanceFile:
    """Parsed instance: normalized data plus lazily built objects."""
    data: dict
    path: str = ""
    lines: dict = field(default_factory=dict)
    _built: dict = field(default_factory=dict, repr=False)

    @property
    def name(self):
        return self.data.get("name", "")

    def names(self, section):
        return list(self.data.get(section, {}))

    def _block(self, section, name, where):
        sec = self.data.get(section, {})
        if name not in sec:
            if section == "semilattices" and name in self.data.get("frames", {}):
                return self.data["frames"][name]
            raise UnresolvedRef(name, where)
        return sec[name]

    def _where(self, section, name, part=""):
        line = self.lines.get((section, name), 0)
        return f"line {line}: {section}.{name}{'.' + part if part else ''}"

    def _cached(self, key, build):
        if key not in self._built:
            self._built[key] = build()
        return self._built[key]

    # categories

    def category(self, name, where="reference"):
        block = self._block("categories", name, where)
        return self._cached(("category", name), lambda: self._build_category(name, block))

    def _build_category(self, name, b):
        w = self._where("categories", name)
        try:
            if "finsets" in b:
                C = FinSetCategory([int(n) for n in b["finsets"]], name=name)
            elif "preorder" in b:
                elems = list(b["preorder"])
                pairs = {tuple(p) for p in b.get("order", [])}
                for p in pairs:
                    for x in p:
                        if x not in elems:
                            raise UnresolvedRef(x, w + ".order")
                closure = _closure(elems, pairs)
                names = {(x, y): n for x, y, n in b.get("names", [])}
                C = preorder_category(elems, lambda x, y: (x, y) in closure, names=names, name=name)
            else:
                C = self._explicit_category(name, b, w)
            C = validate_category(C)
        except DoctrinaError as exc:
            if isinstance(exc, (UnresolvedRef, ParseError)):
                raise
            raise ParseError(self.lines.get(("categories", name), 0), f"category {name}: {exc}") from exc
        C.structure = ChosenStructure(C)
        return C

    def _explicit_category(self, name, b, w):
        for key in ("objects", "morphisms"):
            if key not in b:
                raise ParseError(self.lines.get(("categories", name), 0), f"category {name}: missing {key!r}")
        objects = list(b["objects"])
        obj = set(objects)
        mors = []
        for m in b["morphisms"]:
            if len(m) != 3:
                raise ParseError(self.lines.get(("categories", name), 0),
                                 f"category {name}: morphism entries are [id, source, target]")
            mid, s, t = m
            for x in (s, t):
                if x not in obj:
                    raise UnresolvedRef(x, f"{w}.morphisms.{mid}")
            mors.append((mid, s, t))
        ids = {m for m, _, _ in mors}
        ident_map = dict(b.get("identity", {}))
        for A in objects:
            if A not in ident_map:
                guess = f"id_{A}"
                if guess not in ids:
                    raise ParseError(self.lines.get(("categories", name), 0),
                                     f"category {name}: no identity for object {A!r}")
                ident_map[A] = guess
            elif ident_map[A] not in ids:
                raise UnresolvedRef(ident_map[A], f"{w}.identity")
        src = {m: s for m, s, _ in mors}
        tgt = {m: t for m, _, t in mors}
        comp = {}
        for g, f, h in b.get("compose", []):
            for x in (g, f, h):
                if x not in ids:
                    raise UnresolvedRef(x, f"{w}.compose")
            comp[g, f] = h
        for f in ids:
            comp.setdefault((ident_map[tgt[f]], f), f)
            comp.setdefault((f, ident_map[src[f]]), f)
        return FinCategory(objects, mors, ident_map, comp, name=name)

    def _obj(self, C, ref, where):
        idx = self._cached(("objs", id(C)), lambda: {ident(A): A for A in C.objects})
        if ref not in idx:
            raise UnresolvedRef(ref, where)
        return idx[ref]

    def _mor(self, C, ref, where):
        idx = self._cached(("mors", id(C)), lambda: {ident(m): m for m in C.morphisms})
        if ref not in idx:
            raise UnresolvedRef(ref, where)
        return idx[ref]

    # structures

    def structure(self, name, where="reference"):
        block = self._block("structures", name, where)
        return self._cached(("structure", name), lambda: self._build_structure(name, block))

    def _build_structure(self, name, b):
        w = self._where("structures", name)
        if "category" not in b:
            raise ParseError(self.lines.get(("structures", name), 0), f"structure {name}: missing 'category'")
        C = self.category(b["category"], w)
        terminal = self._obj(C, b["terminal"], w + ".terminal") if b.get("terminal") is not None else None
        products = {}
        for row in b.get("products", []):
            A, B, P, p1, p2 = row
            products[self._obj(C, A, w), self._obj(C, B, w)] = (
                self._obj(C, P, w), self._mor(C, p1, w + ".products"), self._mor(C, p2, w + ".products"))
        pullbacks = {}
        for row in b.get("pullbacks", []):
            f, g, P, pf, pg = row
            pullbacks[self._mor(C, f, w), self._mor(C, g, w)] = (
                self._obj(C, P, w), self._mor(C, pf, w + ".pullbacks"), self._mor(C, pg, w + ".pullbacks"))
        search = b.get("search", "true") not in ("false", "False", "no")
        return ChosenStructure(C, terminal, products, pullbacks, search=search)

    # semilattices

    def semilattice(self, name, where="reference"):
        block = self._block("semilattices", name, where)
        return self._cached(("semilattice", name), lambda: self._build_semilattice(name, block))

    def _build_semilattice(self, name, b):
        section = "semilattices" if name in self.data.get("semilattices", {}) else "frames"
        line = self.lines.get((section, name), 0)
        try:
            if "chain" in b:
                L = validate_semilattice([str(i) for i in range(int(b["chain"]))],
                                         [(str(i), str(i + 1)) for i in range(int(b["chain"]) - 1)], name=name)
            elif "boolean" in b:
                B = boolean_lattice(list(b["boolean"]))
                L = validate_semilattice([ident(x) for x in B],
                                         [(ident(x), ident(y)) for x in B for y in B if B.leq(x, y) and x != y],
                                         name=name)
            else:
                if "elements" not in b:
                    raise ParseError(line, f"semilattice {name}: missing 'elements'")
                elems = list(b["elements"])
                for p in b.get("order", []):
                    for x in p:
                        if x not in elems:
                            raise UnresolvedRef(x, self._where(section, name, "order"))
                L = validate_semilattice(elems, [tuple(p) for p in b.get("order", [])], name=name)
        except (UnresolvedRef, ParseError):
            raise
        except DoctrinaError as exc:
            raise ParseError(line, f"semilattice {name}: {exc}") from exc
        if section == "frames":
            validate_frame(L)
        return L

    # classes

    def left_class(self, name, where="reference"):
        block = self._block("classes", name, where)
        return self._cached(("class", name), lambda: self._build_class(name, block))

    def _build_class(self, name, b):
        from .pack import class_preset
        w = self._where("classes", name)
        C = self.category(b["category"], w)
        S = self.structure(b["structure"], w) if "structure" in b else C.structure
        if "preset" in b:
            try:
                return class_preset(C, b["preset"], S)
            except KeyError:
                raise UnresolvedRef(b["preset"], w + ".preset") from None
        return LeftClass([self._mor(C, m, w + ".morphisms") for m in b.get("morphisms", [])], name=name)

    # doctrines

    def doctrine(self, name, where="reference"):
        block = self._block("doctrines", name, where)
        return self._cached(("doctrine", name), lambda: self._build_doctrine(name, block))

    def _build_doctrine(self, name, b):
        w = self._where("doctrines", name)
        line = self.lines.get(("doctrines", name), 0)
        kind = b.get("kind", "tables")
        if kind not in DOCTRINE_KINDS:
            raise ParseError(line, f"doctrine {name}: unknown kind {kind!r}")
        if kind == "terminal":
            return terminal_doctrine(self.semilattice(b["fibre"], w + ".fibre"), name=name)
        if "base" not in b:
            raise ParseError(line, f"doctrine {name}: missing 'base'")
        C = self.category(b["base"], w + ".base")
        S = self.structure(b["structure"], w + ".structure") if "structure" in b else C.structure
        try:
            if kind == "trivial":
                return trivial_doctrine(C, S, name=name)
            if kind == "weak-subobjects":
                lam = self.left_class(b["class"], w + ".class") if "class" in b else None
                return weak_subobjects_doctrine(C, S, lam, name=name)
            if kind == "subobjects":
                M = self.left_class(b["class"], w + ".class") if "class" in b else None
                return m_subobjects_doctrine(C, S, M, name=name)
            if kind == "powerset":
                P = powerset_doctrine(C, name=name)
                P.structure = S
                return P
            if kind == "localic":
                P = localic_doctrine(self.semilattice(b["frame"], w + ".frame"), C, name=name)
                P.structure = S
                return P
        except (UnresolvedRef, ParseError):
            raise
        except (DoctrinaError, TypeError) as exc:
            raise ParseError(line, f"doctrine {name}: {exc}") from exc
        fibres, idx = {}, {}
        for A_ref, L_ref in b.get("fibres", {}).items():
            A = self._obj(C, A_ref, w + ".fibres")
            fibres[A] = self.semilattice(L_ref, f"{w}.fibres.{A_ref}")
            idx[A] = {ident(x): x for x in fibres[A]}
        for A in C.objects:
            if A not in fibres:
                raise ParseError(line, f"doctrine {name}: no fibre for object {ident(A)!r}")
        tables = {}
        for f_ref, table in b.get("reindex", {}).items():
            f = self._mor(C, f_ref, w + ".reindex")
            dom, cod = idx[C.tgt(f)], idx[C.src(f)]
            out = {}
            for x, y in table.items():
                if x not in dom:
                    raise UnresolvedRef(x, f"{w}.reindex.{f_ref}")
                if y not in cod:
                    raise UnresolvedRef(y, f"{w}.reindex.{f_ref}")
                out[dom[x]] = cod[y]
            tables[f] = out
        try:
            return doctrine_from_tables(C, fibres, tables, S, name=name)
        except DoctrinaError as exc:
            raise ParseError(line, f"doctrine {name}: {exc}") from exc

    # selections

    def selection(self, name, where="reference"):
        block = self._block("selections", name, where)
        return self._cached(("selection", name), lambda: self._build_selection(name, block))

    def _build_selection(self, name, b):
        w = self._where("selections", name)
        P = self.doctrine(b["doctrine"], w + ".doctrine")
        preset = b.get("preset")
        if preset == "tops":
            return {A: [P.top(A)] for A in P.base.objects}
        if preset == "all":
            return {A: list(P.fibres[A]) for A in P.base.objects}
        if preset is not None:
            raise UnresolvedRef(preset, w + ".preset")
        sel = {A: [] for A in P.base.objects}
        for A_ref, xs in b.get("elements", {}).items():
            A = self._obj(P.base, A_ref, w + ".elements")
            idx = {ident(x): x for x in P.fibres[A]}
            for x in xs:
                if x not in idx:
                    raise UnresolvedRef(x, f"{w}.elements.{A_ref}")
                sel[A].append(idx[x])
        return sel

    def build_all(self):
        """Resolve every block; returns the number of objects built."""
        builders = {"categories": self.category, "structures": self.structure, "semilattices": self.semilattice,
                    "frames": self.semilattice, "classes": self.left_class, "doctrines": self.doctrine,
                    "selections": self.selection}
        n = 0
        for section in SECTIONS:
            for name in self.names(section):
                builders[section](name, f"{section}.{name}")
                n += 1
        return n


def _closure(elems, pairs):
    rel = {(x, x) for x in elems} | set(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b) in list(rel):
            for (c, d) in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return rel


# parsing and serialization

def parse_text(text, path=""):
    try:
        raw = yaml.load(text, Loader=_Loader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ParseError(mark.line + 1 if mark else 0, str(exc.problem or exc)) from None
    except yaml.YAMLError as exc:
        raise ParseError(0, str(exc)) from None
    if raw is None:
        raw = _Map()
    if not isinstance(raw, dict):
        raise ParseError(1, "an instance file is a mapping of sections")
    lines = {}
    data = {}
    for key, val in raw.items():
        if key == "name":
            data["name"] = ident(val)
            continue
        if key not in SECTIONS:
            raise ParseError(getattr(raw, "line", 1), f"unknown section {key!r}")
        if not isinstance(val, dict):
            raise ParseError(getattr(raw, "line", 1), f"section {key!r} must be a mapping")
        sec = {}
        for name, block in val.items():
            if not isinstance(block, dict):
                raise ParseError(getattr(val, "line", 1), f"{key}.{name} must be a mapping")
            lines[key, ident(name)] = getattr(block, "line", 0)
            sec[ident(name)] = _norm(block)
        data[key] = sec
    return InstanceFile(_plain(data), path, lines)


def parse_instance(path):
    """Parse an instance file; raises :class:`ParseError` or, on resolution, :class:`UnresolvedRef`."""
    text = Path(path).read_text()
    inst = parse_text(text, str(path))
    inst.build_all()
    return inst


def serialize(inst_or_data):
    """YAML text that parses back to the same model."""
    data = inst_or_data.data if isinstance(inst_or_data, InstanceFile) else inst_or_data
    return yaml.safe_dump(_plain(data), sort_keys=False, allow_unicode=True, default_flow_style=None, width=110)


# building instance data from live objects

class InstanceWriter:
    """Collects categories, semilattices and doctrines into instance data."""

    def __init__(self, name=""):
        self.data = {"name": name} if name else {}
        self._cat_names = {}
        self._lat_names = {}

    def _section(self, key):
        return self.data.setdefault(key, {})

    def _unique(self, section, stem):
        sec = self._section(section)
        name, k = stem, 1
        while name in sec:
            k += 1
            name = f"{stem}.{k}"
        return name

    def add_category(self, C, name=None):
        if id(C) in self._cat_names:
            return self._cat_names[id(C)]
        name = self._unique("categories", name or C.name or "C")
        if len({ident(m) for m in C.morphisms} | {ident(A) for A in C.objects}) != len(C.morphisms) + len(C.objects):
            raise DoctrinaError(f"category {name}: ids collide after stringification")
        if isinstance(C, FinSetCategory):
            block = {"finsets": [ident(n) for n in C.objects]}
        else:
            ids = {C.identity(A) for A in C.objects}
            block = {"objects": [ident(A) for A in C.objects],
                     "morphisms": [[ident(m), ident(C.src(m)), ident(C.tgt(m))] for m in C.morphisms],
                     "identity": {ident(A): ident(C.identity(A)) for A in C.objects},
                     "compose": [[ident(g), ident(f), ident(C.compose(g, f))]
                                 for g, f in C.composable_pairs() if g not in ids and f not in ids]}
        self._section("categories")[name] = block
        self._cat_names[id(C)] = name
        return name

    def add_structure(self, S, name=None):
        C = S.category
        cname = self.add_category(C)
        tab = S.tabled()
        block = {"category": cname}
        if tab["terminal"] is not None:
            block["terminal"] = ident(tab["terminal"])
        if tab["products"]:
            block["products"] = [[ident(A), ident(B), ident(P), ident(p1), ident(p2)]
                                 for (A, B), (P, p1, p2) in tab["products"].items()]
        name = self._unique("structures", name or f"{cname}.limits")
        self._section("structures")[name] = block
        return name

    def add_semilattice(self, L, name=None):
        if id(L) in self._lat_names:
            return self._lat_names[id(L)]
        name = self._unique("semilattices", name or L.name or "L")
        if len({ident(x) for x in L}) != len(L):
            raise DoctrinaError(f"semilattice {name}: element ids collide after stringification")
        cover = [(x, y) for x in L for y in L if x != y and L.leq(x, y)
                 and not any(z not in (x, y) and L.leq(x, z) and L.leq(z, y) for z in L)]
        self._section("semilattices")[name] = {"elements": [ident(x) for x in L],
                                               "order": [[ident(x), ident(y)] for x, y in cover]}
        self._lat_names[id(L)] = name
        return name

    def add_doctrine(self, P, name=None):
        C = P.base
        cname = self.add_category(C)
        block = {"base": cname}
        if any(P.structure.tabled()[k] for k in ("products", "pullbacks")) or P.structure.tabled()["terminal"]:
            block["structure"] = self.add_structure(P.structure)
        name = self._unique("doctrines", name or P.name or "P")
        block["fibres"] = {ident(A): self.add_semilattice(P.fibres[A], f"{name}@{ident(A)}") for A in C.objects}
        block["reindex"] = {ident(f): {ident(x): ident(P.pull(f, x)) for x in P.fibres[C.tgt(f)]}
                            for f in C.morphisms if not C.is_identity(f)}
        self._section("doctrines")[name] = block
        return name

    def add_selection(self, P_name, P, sel, name):
        self._section("selections")[name] = {"doctrine": P_name,
                                             "elements": {ident(A): [ident(x) for x in xs] for A, xs in sel.items()}}
        return name


def doctrine_to_data(P, name=None):
    w = InstanceWriter(name or P.name)
    w.add_doctrine(P, name)
    return w.data


def pack_instance():
    """The whole example pack as instance data."""
    from . import pack
    w = InstanceWriter("doctrina-pack")
    for n in pack.corpus_names():
        w.add_doctrine(pack.doctrine(n), n)
    return w.data


def shipped(name):
    """Path of a shipped instance file by stem ('C2', 'FSprime', 'pack')."""
    return Path(__file__).with_name("data") / f"{name}.yaml"

