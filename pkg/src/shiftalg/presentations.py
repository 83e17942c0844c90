"""Subshift presentations and the constructions that produce them.

Two backends exist.  Finite-alphabet subshifts are presented by the trimmed,
minimized automaton of their language (:class:`SoficPresentation`).
Countable-alphabet subshifts in the supported class are presented flatly by
their point catalog (:class:`shiftalg.flat.FlatPresentation`).

Constructors: forbidden-word subshifts, edge subshifts of graphs (finite or
with N-indexed parallel-edge families), edge subshifts of ultragraphs, and
Markov shifts of 0/1 matrices, together with the hypothesis checks under
which the corresponding operator-algebra identifications are known to hold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .automaton import Dfa, TailTypes, UnsupportedPresentation
from .core import EPSILON, PARAM, Letter, PointTemplate, Word
from .flat import FlatPresentation, LetterFamily, PointFamily


class SoficPresentation:
    """A subshift over a finite alphabet, backed by a deterministic automaton.

    An empty subshift is represented with ``dfa = None``; every operation
    tolerates it.
    """

    kind = "sofic"

    def __init__(self, dfa: Dfa | None, alphabet=None):
        self.dfa = dfa
        if dfa is not None:
            self.alphabet = dfa.alphabet
        else:
            self.alphabet = tuple(sorted(set(alphabet or ()), key=lambda l: l.key()))
        self._types = None

    def is_empty(self) -> bool:
        return self.dfa is None

    @property
    def tail_types(self) -> TailTypes:
        if self._types is None:
            if self.dfa is None:
                raise ValueError("empty presentation has no tail types")
            self._types = TailTypes(self.dfa)
        return self._types

    def contains(self, x: PointTemplate) -> bool:
        if self.dfa is None:
            return False
        for l in set(x.preperiod.letters + x.period.letters):
            if l not in self.alphabet:
                return False
        return self.dfa.contains(x)

    def language_words(self, n: int) -> list[Word]:
        if n == 0:
            return [EPSILON]
        if self.dfa is None:
            return []
        return self.dfa.words(n)

    def language(self, n: int):
        return [(w, None) for w in self.language_words(n)]

    def num_states(self) -> int:
        return 0 if self.dfa is None else self.dfa.n

    def check_letter(self, l: Letter):
        if l not in self.alphabet:
            raise ValueError(f"letter {l} outside the alphabet")


def build_sofic(forbidden, alphabet) -> SoficPresentation:
    """Subshift of the sequences avoiding the given concrete factors."""
    alphabet = tuple(alphabet)
    for w in forbidden:
        if w.has_param:
            raise ValueError("forbidden words must be concrete")
        for l in w:
            if l not in alphabet:
                raise ValueError(f"forbidden word letter {l} outside the alphabet")
    dfa = Dfa.from_forbidden(alphabet, list(forbidden))
    return SoficPresentation(dfa, alphabet)


def full_shift(letters) -> SoficPresentation:
    return build_sofic([], letters)


def language_words(pres, n: int) -> list[Word]:
    """Exactly the length-``n`` words of the subshift.

    For the flat backend the list may contain parametric word schemas; their
    index ranges are available via ``pres.language(n)``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    return pres.language_words(n)


# -- graphs -----------------------------------------------------------------


@dataclass(frozen=True)
class GraphEdge:
    name: str
    src: str
    dst: str


@dataclass(frozen=True)
class EdgeFamily:
    name: str
    src: str
    dst: str
    min_index: int = 0


@dataclass(frozen=True)
class ParametricGraph:
    """A directed graph with ordinary edges plus N-indexed parallel-edge
    families (each family has one source and one range vertex)."""

    vertices: tuple
    edges: tuple = ()
    families: tuple = ()

    def __post_init__(self):
        names = [e.name for e in self.edges] + [f.name for f in self.families]
        if len(set(names)) != len(names):
            raise ValueError("edge names must be distinct")
        for e in list(self.edges) + list(self.families):
            if e.src not in self.vertices or e.dst not in self.vertices:
                raise ValueError(f"edge {e.name} touches an undeclared vertex")

    def out_edges(self, v):
        return [e for e in self.edges if e.src == v]

    def out_families(self, v):
        return [f for f in self.families if f.src == v]

    def is_finite(self) -> bool:
        return not self.families


@dataclass(frozen=True)
class GraphHypothesesReport:
    """Hypotheses under which the edge-subshift algebra is the graph algebra:
    no sinks, and no vertex that is both a source and an infinite emitter."""

    sinks: tuple
    source_infinite_emitters: tuple

    @property
    def passes(self) -> bool:
        return not self.sinks and not self.source_infinite_emitters


def check_graph_hypotheses(g: ParametricGraph) -> GraphHypothesesReport:
    sinks = []
    bad = []
    incoming = {v: 0 for v in g.vertices}
    for e in g.edges:
        incoming[e.dst] += 1
    for f in g.families:
        incoming[f.dst] += 1
    for v in g.vertices:
        emits_edges = bool(g.out_edges(v))
        emits_family = bool(g.out_families(v))
        if not emits_edges and not emits_family:
            sinks.append(v)
        if incoming[v] == 0 and emits_family:
            bad.append(v)
    return GraphHypothesesReport(tuple(sinks), tuple(bad))


def _finite_graph_presentation(g: ParametricGraph) -> SoficPresentation:
    edges = [(Letter(e.name), e.src, e.dst) for e in g.edges]
    alphabet = [Letter(e.name) for e in g.edges]
    if not edges:
        return SoficPresentation(None, alphabet)
    dfa = Dfa.from_labeled_edges(edges)
    return SoficPresentation(dfa, alphabet)


def graph_to_edge_subshift(g: ParametricGraph):
    """Edge subshift of a graph.

    Finite graphs yield a sofic presentation over the edge alphabet.  Graphs
    with parallel-edge families yield a flat presentation when the path
    space decomposes into one-parameter families, i.e. when every cycle is
    concrete and terminal and no path uses two family edges; otherwise the
    flat backend is refused with a witness.
    """
    if g.is_finite():
        return _finite_graph_presentation(g)
    return _parametric_graph_presentation(g)


def _live_vertices(g: ParametricGraph) -> set:
    alive = set(g.vertices)
    changed = True
    while changed:
        changed = False
        for v in list(alive):
            succs = [e.dst for e in g.out_edges(v)] + [f.dst for f in g.out_families(v)]
            if not any(w in alive for w in succs):
                alive.discard(v)
                changed = True
    return alive


def _parametric_graph_presentation(g: ParametricGraph) -> FlatPresentation:
    alive = _live_vertices(g)
    edges = [e for e in g.edges if e.src in alive and e.dst in alive]
    families = [f for f in g.families if f.src in alive and f.dst in alive]
    if not alive:
        return FlatPresentation([], [], [], [], [])

    # Strongly connected components of the live graph (family edges count).
    succ = {v: set() for v in alive}
    for e in edges:
        succ[e.src].add(e.dst)
    for f in families:
        succ[f.src].add(f.dst)
    sccs = _tarjan(sorted(alive), succ)
    comp = {}
    for i, c in enumerate(sccs):
        for v in c:
            comp[v] = i

    cyclic = set()
    for i, c in enumerate(sccs):
        internal_edges = [e for e in edges if comp[e.src] == i and comp[e.dst] == i]
        internal_fams = [f for f in families if comp[f.src] == i and comp[f.dst] == i]
        if internal_fams:
            raise UnsupportedPresentation(
                f"flat backend unsupported: edge family {internal_fams[0].name} lies on a "
                "cycle, so the path space is uncountable"
            )
        has_cycle = bool(internal_edges) or len(c) > 1
        if not has_cycle:
            continue
        cyclic.add(i)
        if len(internal_edges) > len(c):
            raise UnsupportedPresentation(
                "flat backend unsupported: a strongly connected component carries two "
                f"distinct cycles (vertices {sorted(c)}), so the path space is uncountable"
            )
        out_deg = {v: 0 for v in c}
        for e in internal_edges:
            out_deg[e.src] += 1
        if any(d != 1 for d in out_deg.values()):
            raise UnsupportedPresentation(
                "flat backend unsupported: component "
                f"{sorted(c)} is not a single cycle"
            )
        for v in c:
            external = [e for e in edges if e.src == v and comp[e.dst] != i]
            external += [f for f in families if f.src == v and comp[f.dst] != i]
            if external:
                raise UnsupportedPresentation(
                    f"flat backend unsupported: cycle through {v} has exit edge "
                    f"{external[0].name}; preperiods would be unbounded"
                )

    # Each infinite path is a finite run through acyclic components followed
    # by a terminal concrete cycle.
    cycle_words = {}
    for i in cyclic:
        c = sorted(sccs[i])
        nxt = {}
        lab = {}
        for e in edges:
            if comp[e.src] == i and comp[e.dst] == i:
                nxt[e.src] = e.dst
                lab[e.src] = Letter(e.name)
        for v in c:
            letters = []
            u = v
            while True:
                letters.append(lab[u])
                u = nxt[u]
                if u == v:
                    break
            cycle_words[v] = Word(tuple(letters))

    routes = []

    def extend(v, prefix, fam_count):
        if comp[v] in cyclic:
            routes.append((tuple(prefix), v))
            return
        for e in sorted(g.out_edges(v), key=lambda e: e.name):
            if e.dst in alive:
                extend(e.dst, prefix + [Letter(e.name)], fam_count)
        for f in sorted(g.out_families(v), key=lambda f: f.name):
            if f.dst in alive:
                if fam_count >= 1:
                    raise UnsupportedPresentation(
                        "flat backend unsupported: a path uses two edge families "
                        f"(second: {f.name}); points would need two parameters"
                    )
                extend(f.dst, prefix + [Letter(f.name, PARAM)], fam_count + 1)

    for v in sorted(alive):
        extend(v, [], 0)

    point_families = []
    explicits = []
    seen = set()
    for prefix, v in sorted(routes, key=lambda r: (len(r[0]), tuple(l.key() for l in r[0]))):
        t = PointTemplate(Word(prefix), cycle_words[v])
        if t in seen:
            continue
        seen.add(t)
        if t.has_param:
            fam_letter = next(l for l in prefix if l.has_param)
            fam = next(f for f in families if f.name == fam_letter.base)
            point_families.append(
                PointFamily(f"P{len(point_families)}", t, fam.min_index)
            )
        else:
            explicits.append((f"E{len(explicits)}", t))

    letters = [Letter(e.name) for e in edges]
    letter_fams = [LetterFamily(f.name, f.min_index) for f in families]
    schemas = _edge_schemas(edges, families)
    return FlatPresentation(letters, letter_fams, point_families, explicits, schemas)


def _edge_schemas(edges, families):
    """Allowed 2-blocks of an edge shift: range of the first edge equals the
    source of the second.  Family/family blocks would need two parameters and
    cannot occur in the supported class."""
    items = [(Letter(e.name), e.src, e.dst, False) for e in edges]
    items += [(Letter(f.name, PARAM), f.src, f.dst, True) for f in families]
    schemas = []
    for l1, _, dst1, fam1 in items:
        for l2, src2, _, fam2 in items:
            if dst1 != src2:
                continue
            if fam1 and fam2:
                raise UnsupportedPresentation(
                    "flat backend unsupported: two composable edge families"
                )
            schemas.append(Word((l1, l2)))
    return schemas


def _tarjan(vertices, succ):
    index = {}
    low = {}
    stack = []
    on_stack = set()
    out = []
    counter = [0]

    def visit(v):
        work = [(v, iter(sorted(succ.get(v, ()))))]
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        while work:
            u, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(succ.get(w, ())))))
                    advanced = True
                    break
                elif w in on_stack:
                    low[u] = min(low[u], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                p, _ = work[-1]
                low[p] = min(low[p], low[u])
            if low[u] == index[u]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == u:
                        break
                out.append(sorted(comp))

    for v in vertices:
        if v not in index:
            visit(v)
    return out


# -- ultragraphs --------------------------------------------------------------


@dataclass(frozen=True)
class UltragraphEdge:
    name: str
    src: str
    range: tuple


@dataclass(frozen=True)
class Ultragraph:
    vertices: tuple
    edges: tuple

    def __post_init__(self):
        names = [e.name for e in self.edges]
        if len(set(names)) != len(names):
            raise ValueError("edge names must be distinct")
        for e in self.edges:
            if e.src not in self.vertices:
                raise ValueError(f"edge {e.name} has undeclared source")
            if not e.range:
                raise ValueError(f"edge {e.name} has empty range")
            for v in e.range:
                if v not in self.vertices:
                    raise ValueError(f"edge {e.name} has undeclared range vertex")


def ultragraph_to_edge_subshift(u: Ultragraph):
    """Edge subshift of an ultragraph (forbidden 2-blocks ``ef`` with the
    source of ``f`` outside the range of ``e``).

    Returns ``(presentation, warnings)``; a vertex emitting no edge breaks
    the regularity hypothesis of the algebra identification but the subshift
    is still built.
    """
    warnings = []
    for v in u.vertices:
        if not any(e.src == v for e in u.edges):
            warnings.append(f"vertex {v} is not regular (emits no edge)")
    edges = []
    for e in u.edges:
        for f in u.edges:
            if f.src in e.range:
                edges.append((Letter(e.name), e.name, f.name))
    # Deterministic automaton on range sets: reading e leads to range(e).
    names = sorted(e.name for e in u.edges)
    erange = {e.name: frozenset(e.range) for e in u.edges}
    esrc = {e.name: e.src for e in u.edges}
    states = {}
    trans = [dict()]
    states["__start__"] = 0
    stack = []
    for name in names:
        r = erange[name]
        if r not in states:
            states[r] = len(trans)
            trans.append(dict())
            stack.append(r)
        trans[0][Letter(name)] = states[r]
    while stack:
        r = stack.pop()
        q = states[r]
        for name in names:
            if esrc[name] in r:
                r2 = erange[name]
                if r2 not in states:
                    states[r2] = len(trans)
                    trans.append(dict())
                    stack.append(r2)
                trans[q][Letter(name)] = states[r2]
    alphabet = [Letter(n) for n in names]
    try:
        dfa = Dfa(alphabet, trans, 0, check=False).trimmed().minimize()
    except ValueError:
        return SoficPresentation(None, alphabet), warnings
    return SoficPresentation(dfa, alphabet), warnings


def ultragraph_from_graph(g: ParametricGraph) -> Ultragraph:
    if not g.is_finite():
        raise ValueError("only finite graphs become ultragraphs here")
    return Ultragraph(
        g.vertices,
        tuple(UltragraphEdge(e.name, e.src, (e.dst,)) for e in g.edges),
    )


# -- 0/1 matrices -------------------------------------------------------------


@dataclass(frozen=True)
class ZeroOneMatrix:
    """A finite 0/1 matrix over a named index set, no row identically zero."""

    index_set: tuple
    rows: tuple

    def __post_init__(self):
        n = len(self.index_set)
        if len(self.rows) != n or any(len(r) != n for r in self.rows):
            raise ValueError("matrix must be square over the index set")
        for r in self.rows:
            if any(v not in (0, 1) for v in r):
                raise ValueError("entries must be 0 or 1")
        for i, r in enumerate(self.rows):
            if not any(r):
                raise ValueError(
                    f"row {self.index_set[i]} is identically zero"
                )

    def entry(self, i, j) -> int:
        return self.rows[self.index_set.index(i)][self.index_set.index(j)]


def matrix_subshift(a: ZeroOneMatrix) -> SoficPresentation:
    """Markov shift of the matrix: sequences with every 2-block enabled."""
    letters = [Letter(str(i)) for i in a.index_set]
    pos = {i: k for k, i in enumerate(a.index_set)}
    trans = [dict() for _ in range(len(a.index_set) + 1)]
    for i in a.index_set:
        trans[0][Letter(str(i))] = pos[i] + 1
    for i in a.index_set:
        for j in a.index_set:
            if a.rows[pos[i]][pos[j]] == 1:
                trans[pos[i] + 1][Letter(str(j))] = pos[j] + 1
    try:
        dfa = Dfa(letters, trans, 0, check=False).trimmed().minimize()
    except ValueError:
        return SoficPresentation(None, letters)
    return SoficPresentation(dfa, letters)


@dataclass(frozen=True)
class MatrixProductReport:
    """Verification of the finite-support set identity behind relation (EL4):
    the meet of follower sets and complements equals the disjoint union of
    the enabled letter cylinders."""

    support: tuple
    finitely_supported: bool
    identity_holds: bool
    union_disjoint: bool


def matrix_block_product(a: ZeroOneMatrix, xset, yset) -> tuple:
    """The products ``prod_{x in X} A[x,j] * prod_{y in Y} (1 - A[y,j])``."""
    vals = []
    for j in a.index_set:
        v = 1
        for x in xset:
            v *= a.entry(x, j)
        for y in yset:
            v *= 1 - a.entry(y, j)
        vals.append((j, v))
    return tuple(vals)


def matrix_relation_check(a: ZeroOneMatrix, xset, yset) -> MatrixProductReport:
    from . import setalg

    pres = matrix_subshift(a)
    support = tuple(j for j, v in matrix_block_product(a, xset, yset) if v == 1)
    lhs = setalg.uset_x(pres)
    for x in xset:
        lhs = setalg.intersect(lhs, setalg.follower(pres, Word((Letter(str(x)),))))
    for y in yset:
        lhs = setalg.intersect(
            lhs, setalg.complement(setalg.follower(pres, Word((Letter(str(y)),))))
        )
    cylinders = [setalg.cylinder(pres, Word((Letter(str(j)),))) for j in support]
    rhs = setalg.uset_empty(pres)
    disjoint = True
    for i, c in enumerate(cylinders):
        for c2 in cylinders[i + 1:]:
            if not setalg.is_empty(setalg.intersect(c, c2)):
                disjoint = False
        rhs = setalg.union(rhs, c)
    return MatrixProductReport(
        support=support,
        finitely_supported=True,
        identity_holds=setalg.equals(lhs, rhs),
        union_disjoint=disjoint,
    )
