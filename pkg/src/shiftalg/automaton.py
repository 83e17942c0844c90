"""Deterministic partial automata presenting subshifts over finite alphabets.

A :class:`Dfa` has a start state whose infinite-path labels are exactly the
subshift; every state is live (has an outgoing edge) and reachable, and the
path language of every state is contained in that of the start state, which
is what shift invariance of the presented set amounts to.

Besides the usual language queries this module computes the *tail type* of
an infinite word: the set of states from which the word can be read.  The
finitely many realizable tail types are the atoms in which the set-algebra
backend canonicalizes Boolean combinations of follower sets.
"""

from __future__ import annotations

from functools import lru_cache

from .core import EPSILON, Letter, PointTemplate, Word

MONOID_CAP = 200_000


class UnsupportedPresentation(Exception):
    """The construction is outside the class this backend decides exactly."""


class Dfa:
    """Immutable deterministic partial automaton with a start state.

    Parameters
    ----------
    alphabet : iterable of Letter
    trans : list of dicts, one per state, mapping Letter -> state
    q0 : start state
    """

    def __init__(self, alphabet, trans, q0, check=True):
        self.alphabet = tuple(sorted(set(alphabet), key=lambda l: l.key()))
        self.trans = tuple(dict(t) for t in trans)
        self.n = len(self.trans)
        self.q0 = q0
        if check:
            self._validate()

    def _validate(self):
        for q, t in enumerate(self.trans):
            if not t:
                raise ValueError(f"state {q} has no outgoing edge (not live)")
            for a in t:
                if a not in self.alphabet:
                    raise ValueError(f"transition letter {a} outside alphabet")
        seen = {self.q0}
        stack = [self.q0]
        while stack:
            q = stack.pop()
            for p in self.trans[q].values():
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        if len(seen) != self.n:
            raise ValueError("unreachable states present; trim first")
        for q in range(self.n):
            if not self._language_contained(q, self.q0):
                raise ValueError(
                    f"path labels from state {q} leave the subshift; "
                    "presented set is not shift invariant"
                )

    def _language_contained(self, q, p):
        seen = set()
        stack = [(q, p)]
        while stack:
            q1, p1 = stack.pop()
            if (q1, p1) in seen:
                continue
            seen.add((q1, p1))
            for a, q2 in self.trans[q1].items():
                p2 = self.trans[p1].get(a)
                if p2 is None:
                    return False
                stack.append((q2, p2))
        return True

    # -- basic queries ----------------------------------------------------

    def step(self, q, a):
        return self.trans[q].get(a)

    def run(self, q, word: Word):
        for a in word:
            q = self.trans[q].get(a)
            if q is None:
                return None
        return q

    def state_of(self, word: Word):
        return self.run(self.q0, word)

    def words(self, n: int) -> list[Word]:
        """All length-``n`` words readable from the start state, sorted."""
        level = [((), self.q0)]
        for _ in range(n):
            nxt = []
            for w, q in level:
                for a in sorted(self.trans[q], key=lambda l: l.key()):
                    nxt.append((w + (a,), self.trans[q][a]))
            level = nxt
        return sorted((Word(w) for w, _ in level), key=lambda w: w.key())

    def words_upto(self, n: int) -> list[Word]:
        out = []
        for k in range(n + 1):
            out.extend(self.words(k))
        return out

    def state_word(self, q) -> Word:
        """A shortest word carrying the start state to ``q`` (BFS witness)."""
        if q == self.q0:
            return EPSILON
        frontier = [(self.q0, ())]
        seen = {self.q0}
        while frontier:
            nxt = []
            for p, w in frontier:
                for a in sorted(self.trans[p], key=lambda l: l.key()):
                    r = self.trans[p][a]
                    if r == q:
                        return Word(w + (a,))
                    if r not in seen:
                        seen.add(r)
                        nxt.append((r, w + (a,)))
            frontier = nxt
        raise AssertionError("state unreachable")

    def contains(self, x: PointTemplate) -> bool:
        """Membership of an eventually periodic point, by cycle detection."""
        if x.has_param:
            raise ValueError("membership needs a concrete point")
        q = self.q0
        pre, per = x.preperiod.letters, x.period.letters
        for a in pre:
            q = self.trans[q].get(a)
            if q is None:
                return False
        seen = set()
        phase = 0
        while (q, phase) not in seen:
            seen.add((q, phase))
            q = self.trans[q].get(per[phase])
            if q is None:
                return False
            phase = (phase + 1) % len(per)
        return True

    # -- construction -----------------------------------------------------

    def minimize(self) -> "Dfa":
        """Merge states with equal path languages (Moore refinement)."""
        sig0 = [frozenset(t.keys()) for t in self.trans]
        classes = {
            s: i
            for i, s in enumerate(sorted(set(sig0), key=lambda s: sorted(l.key() for l in s)))
        }
        cls = [classes[s] for s in sig0]
        while True:
            sig = [
                (cls[q], tuple(sorted((a.key(), cls[p]) for a, p in self.trans[q].items())))
                for q in range(self.n)
            ]
            mapping = {s: i for i, s in enumerate(sorted(set(sig)))}
            new_cls = [mapping[s] for s in sig]
            if new_cls == cls:
                break
            cls = new_cls
        m = max(cls) + 1
        if m == self.n:
            return self
        trans = [dict() for _ in range(m)]
        for q in range(self.n):
            for a, p in self.trans[q].items():
                trans[cls[q]][a] = cls[p]
        return Dfa(self.alphabet, trans, cls[self.q0]).trimmed()

    def trimmed(self) -> "Dfa":
        """Restrict to live states reachable from the start state."""
        alive = set(range(self.n))
        changed = True
        while changed:
            changed = False
            for q in list(alive):
                if not any(p in alive for p in self.trans[q].values()):
                    alive.discard(q)
                    changed = True
        if self.q0 not in alive:
            raise ValueError("empty subshift")
        seen = {self.q0}
        stack = [self.q0]
        while stack:
            q = stack.pop()
            for a, p in self.trans[q].items():
                if p in alive and p not in seen:
                    seen.add(p)
                    stack.append(p)
        keep = sorted(seen)
        remap = {q: i for i, q in enumerate(keep)}
        trans = [
            {a: remap[p] for a, p in self.trans[q].items() if p in seen} for q in keep
        ]
        return Dfa(self.alphabet, trans, remap[self.q0])

    @staticmethod
    def from_forbidden(alphabet, forbidden) -> "Dfa | None":
        """Automaton of the set of sequences avoiding the given factors.

        Returns None when the subshift is empty.  States track the relevant
        suffix window of what was read; the result is trimmed to extendable
        words and minimized, so its path language is the language of the
        subshift (factors that dead-end are not in it).
        """
        alphabet = tuple(sorted(set(alphabet), key=lambda l: l.key()))
        forbidden = [w.letters for w in forbidden]
        if any(len(f) == 0 for f in forbidden):
            return None
        m = max((len(f) for f in forbidden), default=1)
        start = ()
        ids = {start: 0}
        trans = [dict()]
        stack = [start]
        while stack:
            w = stack.pop()
            q = ids[w]
            for a in alphabet:
                cand = w + (a,)
                if any(cand[len(cand) - len(f):] == f for f in forbidden if len(f) <= len(cand)):
                    continue
                nxt = cand[max(0, len(cand) - (m - 1)):]
                if nxt not in ids:
                    ids[nxt] = len(trans)
                    trans.append(dict())
                    stack.append(nxt)
                trans[q][a] = ids[nxt]
        alive = {q for q in range(len(trans))}
        changed = True
        while changed:
            changed = False
            for q in list(alive):
                if not any(p in alive for p in trans[q].values()):
                    alive.discard(q)
                    changed = True
        if 0 not in alive:
            return None
        keep = sorted(alive)
        remap = {q: i for i, q in enumerate(keep)}
        trimmed = [
            {a: remap[p] for a, p in trans[q].items() if p in alive} for q in keep
        ]
        dfa = Dfa(alphabet, trimmed, remap[0])
        return dfa.minimize()

    @staticmethod
    def from_labeled_edges(edges) -> "Dfa | None":
        """Automaton of an edge shift: ``edges`` holds (label, src, dst) triples.

        A fresh start state can begin with any edge; labels must be distinct.
        Returns None when no infinite paths exist.
        """
        labels = [e[0] for e in edges]
        if len(set(labels)) != len(labels):
            raise ValueError("edge labels must be distinct")
        vertices = sorted({e[1] for e in edges} | {e[2] for e in edges})
        vid = {v: i + 1 for i, v in enumerate(vertices)}
        trans = [dict() for _ in range(len(vertices) + 1)]
        for label, src, dst in edges:
            trans[0][label] = vid[dst]
            trans[vid[src]][label] = vid[dst]
        try:
            dfa = Dfa([e[0] for e in edges], trans, 0, check=False).trimmed()
        except ValueError:
            return None
        return dfa.minimize()


class TailTypes:
    """Realizable tail types of a :class:`Dfa` and their transition structure.

    The tail type of an infinite word is the set of states it can be read
    from.  Types are computed from the reachable part of the partial-map
    monoid: a state set D is realizable iff some reachable partial map has
    domain D and admits an infinite continuation whose domain stays D.
    """

    def __init__(self, dfa: Dfa):
        self.dfa = dfa
        self.types = self._realizable()
        self.index = {t: i for i, t in enumerate(self.types)}
        self._lift_table = {}
        for i, t in enumerate(self.types):
            for a in dfa.alphabet:
                lifted = self.lift_set(t, a)
                if lifted:
                    j = self.index.get(lifted)
                    if j is None:
                        raise AssertionError("lift of a realizable type must be realizable")
                    self._lift_table[(i, a)] = j

    def _realizable(self):
        dfa = self.dfa
        ident = tuple(range(dfa.n))
        maps = {ident}
        stack = [ident]
        succ = {}
        while stack:
            f = stack.pop()
            for a in dfa.alphabet:
                g = tuple(
                    None if q is None else dfa.trans[q].get(a) for q in f
                )
                if all(q is None for q in g):
                    continue
                succ.setdefault(f, {})[a] = g
                if g not in maps:
                    if len(maps) >= MONOID_CAP:
                        raise UnsupportedPresentation("transition monoid too large")
                    maps.add(g)
                    stack.append(g)
        by_dom = {}
        for f in maps:
            dom = frozenset(q for q in range(dfa.n) if f[q] is not None)
            if dom:
                by_dom.setdefault(dom, set()).add(f)
        realizable = []
        for dom, group in by_dom.items():
            live = set(group)
            changed = True
            while changed:
                changed = False
                for f in list(live):
                    ok = any(
                        g in live
                        for a, g in succ.get(f, {}).items()
                        if frozenset(q for q in range(self.dfa.n) if g[q] is not None) == dom
                    )
                    if not ok:
                        live.discard(f)
                        changed = True
            if live:
                if dfa.q0 not in dom:
                    raise AssertionError("realizable type misses the start state")
                realizable.append(dom)
        return tuple(sorted(realizable, key=lambda t: (len(t), sorted(t))))

    def lift_set(self, t: frozenset, a: Letter) -> frozenset:
        """Type of ``a . y`` given the type ``t`` of ``y``."""
        return frozenset(
            q for q in range(self.dfa.n) if self.dfa.trans[q].get(a) in t
        )

    def lift(self, tid: int, a: Letter):
        """Type id of ``a . y`` from the type id of ``y`` (None if empty)."""
        return self._lift_table.get((tid, a))

    def all_ids(self) -> frozenset:
        return frozenset(range(len(self.types)))

    def ids_containing(self, q) -> frozenset:
        return frozenset(i for i, t in enumerate(self.types) if q in t)

    def type_of_tail(self, x: PointTemplate) -> frozenset:
        """Tail type of a concrete eventually periodic point."""
        dfa = self.dfa
        vec = tuple(range(dfa.n))
        for a in x.preperiod:
            vec = tuple(None if q is None else dfa.trans[q].get(a) for q in vec)
        per = x.period.letters
        seen = {}
        phase = 0
        while (vec, phase) not in seen:
            seen[(vec, phase)] = True
            vec = tuple(None if q is None else dfa.trans[q].get(per[phase]) for q in vec)
            phase = (phase + 1) % len(per)
        return frozenset(q for q in range(dfa.n) if vec[q] is not None)

    def type_id_of_tail(self, x: PointTemplate):
        t = self.type_of_tail(x)
        return self.index.get(t)


def follower_intersection(dfa: Dfa, states):
    """Classify the set of infinite words readable from every state in ``states``.

    Returns ``("empty", None)``, ``("singleton", point)`` or
    ``("multiple", None)``.  The intersection is a singleton exactly when the
    live part of the product automaton reachable from the state tuple is a
    single deterministic lasso.
    """
    v0 = tuple(sorted(set(states)))
    if not v0:
        raise ValueError("need a nonempty state set")

    def succs(v):
        out = {}
        for a in dfa.alphabet:
            w = tuple(dfa.trans[q].get(a) for q in v)
            if all(q is not None for q in w):
                out[a] = w
        return out

    reach = {v0}
    stack = [v0]
    edges = {}
    while stack:
        v = stack.pop()
        edges[v] = succs(v)
        for w in edges[v].values():
            if w not in reach:
                reach.add(w)
                stack.append(w)
    live = set(reach)
    changed = True
    while changed:
        changed = False
        for v in list(live):
            if not any(w in live for w in edges[v].values()):
                live.discard(v)
                changed = True
    if v0 not in live:
        return ("empty", None)
    seen = set()
    frontier = {v0}
    while frontier:
        nxt = set()
        for v in frontier:
            seen.add(v)
            live_out = [(a, w) for a, w in sorted(edges[v].items(), key=lambda kv: kv[0].key()) if w in live]
            if len(live_out) > 1:
                return ("multiple", None)
            nxt.update(w for _, w in live_out if w not in seen)
        frontier = nxt
    labels = []
    trail = {v0: 0}
    v = v0
    while True:
        (a, w), = [(a, w) for a, w in edges[v].items() if w in live]
        labels.append(a)
        if w in trail:
            k = trail[w]
            point = PointTemplate(Word(tuple(labels[:k])), Word(tuple(labels[k:])))
            return ("singleton", point)
        trail[w] = len(labels)
        v = w
