"""Exact decision procedures for the Boolean algebra generated by the sets
``C(alpha, beta) = {beta x in X : alpha x in X}``.

Sofic backend.  A set is a finite union of pieces ``(w, types)``: the points
with prefix ``w`` whose tail has one of the listed tail types.  Pieces are
kept at the minimal prefix depth at which the set is expressible, with all
prefixes of equal length; this form is unique, so equality of sets is
syntactic.  Emptiness is immediate because only realizable tail types are
ever listed.

Flat backend.  A set is a choice of a finite or cofinite index set per point
family plus a finite set of explicit points (:class:`FlatUSet`).  Sets used
internally while assembling K-theory data may also carry the generic
parameter mark of :class:`shiftalg.flat.SymIndexSet`; such a set denotes one
honest set per large parameter value.

The public functions mirror the set operations: :func:`make_C`,
:func:`complement`, :func:`intersect`, :func:`union`, :func:`is_empty`,
:func:`equals`, :func:`contains_point`, :func:`relative_range`,
:func:`letters_from`, :func:`is_regular`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .automaton import UnsupportedPresentation, follower_intersection
from .core import EPSILON, PARAM, PARAM2, Letter, Param, PointTemplate, Word
from .flat import (
    FlatPresentation,
    SymCond,
    SymIndexSet,
    _rename_param,
    _rename_param2_to_param,
    _subst_param2,
)


# ---------------------------------------------------------------------------
# sofic backend
# ---------------------------------------------------------------------------


def _cache(pres):
    if not hasattr(pres, "_setalg_cache"):
        pres._setalg_cache = {}
    return pres._setalg_cache


def _level_words(pres, d):
    """Words of length d with their states, as {letters_tuple: state}."""
    cache = _cache(pres)
    key = ("level", d)
    if key not in cache:
        dfa = pres.dfa
        if d == 0:
            cache[key] = {(): dfa.q0}
        else:
            prev = _level_words(pres, d - 1)
            out = {}
            for w, q in prev.items():
                for a, p in dfa.trans[q].items():
                    out[w + (a,)] = p
            cache[key] = out
    return cache[key]


def _ids_containing(pres, q):
    cache = _cache(pres)
    key = ("contain", q)
    if key not in cache:
        cache[key] = pres.tail_types.ids_containing(q)
    return cache[key]


def _inv_lift(pres):
    cache = _cache(pres)
    if "inv_lift" not in cache:
        tt = pres.tail_types
        inv = {}
        for i in range(len(tt.types)):
            for a in pres.dfa.alphabet:
                j = tt.lift(i, a)
                if j is not None:
                    inv.setdefault((j, a), []).append(i)
        cache["inv_lift"] = inv
    return cache["inv_lift"]


@dataclass(frozen=True)
class SoficUSet:
    """Canonical element of the generated Boolean algebra, sofic backend."""

    pres: object
    items: tuple  # ((letters_tuple, frozenset_of_type_ids), ...) sorted

    def __eq__(self, other):
        return (
            isinstance(other, SoficUSet)
            and self.pres is other.pres
            and self.items == other.items
        )

    def __hash__(self):
        return hash((id(self.pres), self.items))

    @property
    def depth(self) -> int:
        return len(self.items[0][0]) if self.items else 0

    def __str__(self):
        if not self.items:
            return "{}"
        tt = self.pres.tail_types
        parts = []
        for w, ts in self.items:
            full = ts == _ids_containing(self.pres, _level_words(self.pres, len(w))[w])
            tail = "*" if full else f"types{sorted(ts)}"
            parts.append(f"({Word(w)}; {tail})")
        return " u ".join(parts)


def _sofic_canon(pres, mapping):
    """Minimal-depth canonical form from a {word_letters: typeset} map."""
    mapping = {w: ts for w, ts in mapping.items() if ts}
    if not mapping:
        return SoficUSet(pres, ())
    depth = len(next(iter(mapping)))
    tt = pres.tail_types
    inv = _inv_lift(pres)
    while depth > 0:
        prev_level = _level_words(pres, depth - 1)
        groups = {}
        for w, ts in mapping.items():
            groups.setdefault(w[:-1], {})[w[-1]] = ts
        new_mapping = {}
        ok = True
        for u, s_u in prev_level.items():
            children = groups.get(u, {})
            cand = set()
            for tid2 in _ids_containing(pres, s_u):
                good = True
                for a in pres.dfa.trans[s_u]:
                    for tid in inv.get((tid2, a), ()):
                        if tid not in children.get(a, frozenset()):
                            good = False
                            break
                    if not good:
                        break
                if good:
                    cand.add(tid2)
            cand = frozenset(cand)
            for a, p in pres.dfa.trans[s_u].items():
                expanded = frozenset(
                    tid for tid in _ids_containing(pres, p) if tt.lift(tid, a) in cand
                )
                if expanded != children.get(a, frozenset()):
                    ok = False
                    break
            if not ok:
                break
            if cand:
                new_mapping[u] = cand
        if not ok:
            break
        mapping = new_mapping
        depth -= 1
        if not mapping:
            return SoficUSet(pres, ())
    items = tuple(sorted(mapping.items(), key=lambda it: tuple(l.key() for l in it[0])))
    return SoficUSet(pres, items)


def _sofic_expand_to(pres, a: SoficUSet, depth: int):
    """Raw {word: typeset} map of ``a`` at the given depth (>= a.depth)."""
    tt = pres.tail_types
    mapping = dict(a.items)
    d = a.depth if a.items else 0
    while d < depth:
        nxt = {}
        level = _level_words(pres, d + 1)
        for w, ts in mapping.items():
            q = _level_words(pres, d)[w]
            for aa, p in pres.dfa.trans[q].items():
                ts2 = frozenset(
                    tid for tid in _ids_containing(pres, p) if tt.lift(tid, aa) in ts
                )
                if ts2:
                    nxt[w + (aa,)] = ts2
        mapping = nxt
        d += 1
    return mapping


def _sofic_empty(pres):
    return SoficUSet(pres, ())


def _sofic_x(pres):
    if pres.is_empty():
        return _sofic_empty(pres)
    return _sofic_canon(pres, {(): pres.tail_types.all_ids()})


def _sofic_make_C(pres, alpha: Word, beta: Word):
    if pres.is_empty():
        return _sofic_empty(pres)
    dfa = pres.dfa
    s_alpha = dfa.state_of(alpha)
    s_beta = dfa.state_of(beta)
    if s_alpha is None or s_beta is None:
        return _sofic_empty(pres)
    ts = _ids_containing(pres, s_alpha) & _ids_containing(pres, s_beta)
    return _sofic_canon(pres, {beta.letters: ts})


def _sofic_complement(a: SoficUSet):
    pres = a.pres
    if pres.is_empty():
        return a
    d = a.depth
    mapping = _sofic_expand_to(pres, a, d)
    out = {}
    for w, q in _level_words(pres, d).items():
        full = _ids_containing(pres, q)
        ts = full - mapping.get(w, frozenset())
        if ts:
            out[w] = ts
    return _sofic_canon(pres, out)


def _sofic_meet(a: SoficUSet, b: SoficUSet, op):
    pres = a.pres
    d = max(a.depth, b.depth)
    ma = _sofic_expand_to(pres, a, d)
    mb = _sofic_expand_to(pres, b, d)
    out = {}
    for w in set(ma) | set(mb):
        ts = op(ma.get(w, frozenset()), mb.get(w, frozenset()))
        if ts:
            out[w] = ts
    return _sofic_canon(pres, out)


def _sofic_rel_range_letter(a: SoficUSet, letter: Letter):
    pres = a.pres
    if not a.items:
        return a
    d = max(a.depth, 1)
    mapping = _sofic_expand_to(pres, a, d)
    out = {}
    for w, ts in mapping.items():
        if w[0] == letter:
            out[w[1:]] = ts
    return _sofic_canon(pres, out)


def _sofic_contains(a: SoficUSet, x: PointTemplate) -> bool:
    pres = a.pres
    if not a.items or not pres.contains(x):
        return False
    d = a.depth
    w = x.expand(d)
    for w2, ts in a.items:
        if w2 == w:
            tid = pres.tail_types.type_id_of_tail(x.drop(d))
            return tid in ts
    return False


def _sofic_letters(a: SoficUSet):
    pres = a.pres
    if not a.items:
        return LetterSet((), ())
    mapping = _sofic_expand_to(pres, a, max(a.depth, 1))
    return LetterSet(tuple(sorted({w[0] for w in mapping}, key=lambda l: l.key())), ())


def _type_witness(pres, tid) -> PointTemplate:
    """A concrete point whose tail type is exactly the given type."""
    cache = _cache(pres)
    key = ("witness", tid)
    if key in cache:
        return cache[key]
    dfa = pres.dfa
    target = pres.tail_types.types[tid]
    ident = tuple(range(dfa.n))
    parents = {ident: None}
    order = [ident]
    succ = {}
    i = 0
    while i < len(order):
        f = order[i]
        i += 1
        for a in sorted(dfa.alphabet, key=lambda l: l.key()):
            g = tuple(None if q is None else dfa.trans[q].get(a) for q in f)
            if all(q is None for q in g):
                continue
            succ.setdefault(f, {})[a] = g
            if g not in parents:
                parents[g] = (f, a)
                order.append(g)
    dom = lambda f: frozenset(q for q in range(dfa.n) if f[q] is not None)
    group = {f for f in parents if dom(f) == target}
    live = set(group)
    changed = True
    while changed:
        changed = False
        for f in list(live):
            if not any(
                g in live for g in succ.get(f, {}).values()
            ):
                live.discard(f)
                changed = True
    if not live:
        raise AssertionError("realizable type has no live map")
    f = sorted(live)[0]
    prefix = []
    node = f
    while parents[node] is not None:
        p, a = parents[node]
        prefix.append(a)
        node = p
    prefix.reverse()
    walk = [f]
    labels = []
    node = f
    while True:
        a, g = sorted(
            ((a, g) for a, g in succ[node].items() if g in live),
            key=lambda ag: ag[0].key(),
        )[0]
        labels.append(a)
        if g in walk:
            k = walk.index(g)
            point = PointTemplate(
                Word(tuple(prefix) + tuple(labels[:k])), Word(tuple(labels[k:]))
            )
            cache[key] = point
            return point
        walk.append(g)
        node = g


def _sofic_extract_point(a: SoficUSet) -> PointTemplate:
    w, ts = a.items[0]
    y = _type_witness(a.pres, min(ts))
    return y.prepend(Word(w))


def _sofic_singleton_uset(pres, x: PointTemplate):
    """The set {x} as an algebra element, or None when {x} is not in the
    algebra.  {x} is expressible iff some tail of x has a tail type whose
    follower intersection is just that tail."""
    if pres.is_empty() or not pres.contains(x):
        return None
    tt = pres.tail_types
    cur = x
    prefix = []
    seen = set()
    while cur not in seen:
        seen.add(cur)
        t = tt.type_of_tail(cur)
        verdict, point = follower_intersection(pres.dfa, t)
        if verdict == "singleton" and point == cur:
            tid = tt.index[t]
            return _sofic_canon(pres, {tuple(prefix): frozenset([tid])})
        prefix.append(cur.letter(0))
        cur = cur.shift()
    return None


# ---------------------------------------------------------------------------
# flat backend
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlatUSet:
    """Canonical set of the flat backend: per-family index sets plus
    explicit points."""

    pres: object
    fam: tuple  # SymIndexSet per point family
    expl: frozenset  # explicit point names

    def __eq__(self, other):
        return (
            isinstance(other, FlatUSet)
            and self.pres is other.pres
            and self.fam == other.fam
            and self.expl == other.expl
        )

    def __hash__(self):
        return hash((id(self.pres), self.fam, self.expl))

    @property
    def has_param(self) -> bool:
        return any(s.param for s in self.fam)

    def __str__(self):
        parts = []
        for f, s in zip(self.pres.families, self.fam):
            if not s.is_empty:
                parts.append(f"{f.name}:{s}")
        for e in sorted(self.expl):
            parts.append(e)
        return "{" + "; ".join(parts) + "}"


def _flat_empty(pres):
    return FlatUSet(
        pres,
        tuple(SymIndexSet.empty(f.min_index) for f in pres.families),
        frozenset(),
    )


def _flat_x(pres):
    return FlatUSet(
        pres,
        tuple(SymIndexSet.full(f.min_index) for f in pres.families),
        frozenset(pres.explicit_names()),
    )


def _flat_complement(a: FlatUSet):
    return FlatUSet(
        a.pres,
        tuple(s.complement() for s in a.fam),
        frozenset(a.pres.explicit_names()) - a.expl,
    )


def _flat_meet(a: FlatUSet, b: FlatUSet, setop, explop):
    return FlatUSet(
        a.pres,
        tuple(setop(s, t) for s, t in zip(a.fam, b.fam)),
        explop(a.expl, b.expl),
    )


def _flat_lookup_sym(a: FlatUSet, ident, kind):
    """Membership in ``a`` of an identified point.

    ``kind`` selects which symbolic index reached the identification:
    "param" for the tracked generic index, "fresh" for an independent
    generic index, or an int.
    """
    if ident is None:
        return False
    if ident[0] == "expl":
        return ident[1] in a.expl
    _, i, n = ident
    s = a.fam[i]
    if n == "diag":
        if kind == "param":
            return s.contains_param()
        if kind == "fresh":
            return s.contains_fresh()
        return s.contains_int(kind)
    return s.contains_int(n)


def _flat_contains(a: FlatUSet, x: PointTemplate) -> bool:
    ident = a.pres.identify(x)
    if ident is None:
        return False
    if ident[0] == "expl":
        return ident[1] in a.expl
    _, i, n = ident
    return a.fam[i].contains_int(n)


def _flat_add_ident(pres, fam_sets, expl_set, ident, param_mark=False):
    if ident is None:
        raise AssertionError("image point left the subshift")
    if ident[0] == "expl":
        if param_mark:
            raise UnsupportedPresentation("parameter-dependent explicit membership")
        expl_set.add(ident[1])
        return
    _, i, n = ident
    if n == "diag" or param_mark:
        fam_sets[i] = fam_sets[i].union(
            SymIndexSet.of(pres.families[i].min_index, (), param=True)
        )
    else:
        fam_sets[i] = fam_sets[i].union(
            SymIndexSet.of(pres.families[i].min_index, (n,))
        )


def _flat_make_C(pres, alpha: Word, beta: Word):
    """{beta x in X : alpha x in X} over the point catalog.

    Words may mention the generic parameter (used when assembling the
    K-theory map); the result is then one set per large parameter value.
    """
    fam_sets = [SymIndexSet.empty(f.min_index) for f in pres.families]
    expl_set = set()
    for i, f in enumerate(pres.families):
        tmpl = _rename_param(f.template)  # index variable m = PARAM2
        cond_a = pres.member_cond_pair(tmpl, lambda t: t.prepend(alpha))
        cond_b = pres.member_cond_pair(tmpl, lambda t: t.prepend(beta))
        cond = _cond_and(cond_a, cond_b)
        sel = cond.to_index_set_diag(f.min_index)
        if sel.is_empty:
            continue
        _flat_map_family_through(pres, fam_sets, expl_set, i, sel, beta)
    for name, p in pres.explicits:
        qa = p.prepend(alpha)
        qb = p.prepend(beta)
        if pres._member_bool(qa) and pres._member_bool(qb):
            ident, _ = pres.identify_sym(qb) if qb.has_param else (pres.identify(qb), {})
            _flat_add_ident(pres, fam_sets, expl_set, ident)
    return FlatUSet(pres, tuple(fam_sets), frozenset(expl_set))


def _cond_and(a: SymCond, b: SymCond) -> SymCond:
    keys = set(a.exceptions) | set(b.exceptions)
    exc = {
        n: a.exceptions.get(n, a.generic) and b.exceptions.get(n, b.generic)
        for n in keys
    }
    da = a.generic if a.diag is None else a.diag
    db = b.generic if b.diag is None else b.diag
    return SymCond(a.generic and b.generic, exc, diag=da and db)


def _flat_map_family_through(pres, fam_sets, expl_set, i, sel: SymIndexSet, beta: Word):
    """Add the points ``beta . T_i(m)`` for ``m in sel`` to the accumulators."""
    f = pres.families[i]
    if beta.has_param and sel.cofinite:
        raise UnsupportedPresentation(
            "parametric prefix over a cofinite index range needs two parameters"
        )
    small = sorted(
        set(pres._probe_indices(f.template.concrete_indices() | beta.concrete_indices()))
    )
    if sel.cofinite:
        q_m = _rename_param2_to_param(_rename_param(f.template).prepend(beta))
        generic, _ = pres.identify_sym(q_m)
        if generic is None or generic[0] != "fam" or generic[2] != "diag":
            raise UnsupportedPresentation(
                f"image of family {f.name} is not index preserving"
            )
        _, i2, _ = generic
        excluded = set(sel.ints) | {n for n in small if n >= f.min_index}
        base = SymIndexSet(
            pres.families[i2].min_index,
            True,
            frozenset(n for n in excluded if n >= pres.families[i2].min_index),
            not sel.contains_param(),
        )
        fam_sets[i2] = fam_sets[i2].union(base)
        for n in small:
            if n >= f.min_index and sel.contains_int(n):
                ident = pres.identify(f.template.subst(n).prepend(beta))
                _flat_add_ident(pres, fam_sets, expl_set, ident)
    else:
        for n in sorted(sel.ints):
            point = f.template.subst(n).prepend(beta)
            if beta.has_param:
                ident, _ = pres.identify_sym(point)
                _flat_add_ident(pres, fam_sets, expl_set, ident, param_mark=True)
            else:
                ident = pres.identify(point)
                _flat_add_ident(pres, fam_sets, expl_set, ident)
        if sel.param:
            q_diag = _rename_param2_to_param(_rename_param(f.template)).prepend(beta)
            generic, _ = pres.identify_sym(q_diag)
            _flat_add_ident(pres, fam_sets, expl_set, generic, param_mark=True)


def _flat_rel_range_letter(a: FlatUSet, letter: Letter):
    pres = a.pres
    prefix = Word((letter,))
    fam_sets = [SymIndexSet.empty(f.min_index) for f in pres.families]
    expl_set = set()
    for i, f in enumerate(pres.families):
        tmpl = _rename_param(f.template)
        cond = _flat_contains_cond_pair(a, tmpl, prefix)
        fam_sets[i] = cond.to_index_set_diag(f.min_index)
    for name, p in pres.explicits:
        q = p.prepend(prefix)
        if q.has_param:
            generic, _ = pres.identify_sym(q)
            if _flat_lookup_sym(a, generic, "param"):
                expl_set.add(name)
        else:
            if _flat_contains(a, q):
                expl_set.add(name)
    return FlatUSet(pres, tuple(fam_sets), frozenset(expl_set))


def _flat_contains_cond_pair(a: FlatUSet, tmpl, prefix: Word) -> SymCond:
    """Membership in ``a`` of ``prefix . tmpl[m]`` as the index m varies."""
    pres = a.pres
    q_diag = _rename_param2_to_param(tmpl).prepend(prefix)
    if q_diag.has_param:
        generic_ident, _ = pres.identify_sym(q_diag)
        diag = _flat_lookup_sym(a, generic_ident, "param")
    else:
        diag = _flat_contains(a, q_diag)
    q_off = tmpl.prepend(prefix)
    has_p = any(
        l.index == PARAM for l in q_off.preperiod.letters + q_off.period.letters
    )
    has_m = any(
        l.index == PARAM2 for l in q_off.preperiod.letters + q_off.period.letters
    )
    if has_p and has_m:
        generic = False
    elif has_m:
        q_m = _rename_param2_to_param(q_off)
        generic_ident, _ = pres.identify_sym(q_m)
        generic = _flat_lookup_sym(a, generic_ident, "fresh")
    else:
        generic = (
            _flat_lookup_sym(a, pres.identify_sym(q_off)[0], "param")
            if q_off.has_param
            else _flat_contains(a, q_off)
        )
    exceptions = {}
    for n in pres._probe_indices(tmpl.concrete_indices() | prefix.concrete_indices()):
        q = _subst_param2(tmpl, n).prepend(prefix)
        if q.has_param:
            generic_ident, _ = pres.identify_sym(q)
            exceptions[n] = _flat_lookup_sym(a, generic_ident, "param")
        else:
            exceptions[n] = _flat_contains(a, q)
    return SymCond(generic, exceptions, diag=diag)


def _flat_letters(a: FlatUSet):
    pres = a.pres
    concrete = set()
    fams = {}
    for i, f in enumerate(pres.families):
        s = a.fam[i]
        if s.is_empty:
            continue
        first = f.template.letter(0)
        if first.index is None:
            concrete.add(first)
        elif isinstance(first.index, Param):
            lmin = pres._letter_fams[first.base].min_index
            cur = fams.get(first.base, SymIndexSet.empty(lmin))
            fams[first.base] = cur.union(s.with_min(lmin) if lmin < s.min_index else s)
        else:
            concrete.add(first)
    for name in sorted(a.expl):
        concrete.add(pres.explicit_point(name).letter(0))
    return LetterSet(
        tuple(sorted(concrete, key=lambda l: l.key())),
        tuple(sorted(fams.items())),
    )


def _flat_size(a: FlatUSet):
    total = len(a.expl)
    for s in a.fam:
        n = s.size()
        if n is None:
            return None
        total += n
    return total


def _flat_extract_point(a: FlatUSet) -> PointTemplate:
    if a.expl:
        return a.pres.explicit_point(sorted(a.expl)[0])
    for i, s in enumerate(a.fam):
        f = a.pres.families[i]
        if s.cofinite:
            n = f.min_index
            while n in s.ints:
                n += 1
            return f.template.subst(n)
        if s.ints:
            return f.template.subst(min(s.ints))
    raise ValueError("empty set has no points")


def _flat_instantiate(a: FlatUSet, n: int) -> FlatUSet:
    return FlatUSet(a.pres, tuple(s.instantiate(n) for s in a.fam), a.expl)


# ---------------------------------------------------------------------------
# shared API
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LetterSet:
    """The letters whose cylinders meet a set: finitely many concrete
    letters plus, per letter family, an index set."""

    concrete: tuple
    families: tuple  # (family_name, SymIndexSet)

    @property
    def finite(self) -> bool:
        return all(s.is_finite for _, s in self.families)

    @property
    def empty(self) -> bool:
        return not self.concrete and all(s.is_empty for _, s in self.families)

    def count(self):
        if not self.finite:
            return None
        return len(self.concrete) + sum(s.size() for _, s in self.families)

    def letters(self):
        """Concrete list of letters (only when finite)."""
        if not self.finite:
            raise ValueError("letter set is infinite")
        out = list(self.concrete)
        for name, s in self.families:
            for n in sorted(s.ints):
                out.append(Letter(name, n))
            if s.param:
                out.append(Letter(name, PARAM))
        return sorted(out, key=lambda l: l.key())

    def __str__(self):
        parts = [str(l) for l in self.concrete]
        for name, s in self.families:
            if not s.is_empty:
                parts.append(f"{name}[{s}]")
        return "{" + ", ".join(parts) + "}"


def _same(a, b):
    if a.pres is not b.pres:
        raise ValueError("sets from different presentations cannot be combined")


def uset_x(pres):
    """The whole subshift as a set."""
    return _flat_x(pres) if pres.kind == "flat" else _sofic_x(pres)


def uset_empty(pres):
    return _flat_empty(pres) if pres.kind == "flat" else _sofic_empty(pres)


def make_C(pres, alpha: Word, beta: Word):
    """Canonical form of ``{beta x in X : alpha x in X}``."""
    for l in tuple(alpha) + tuple(beta):
        if pres.kind == "sofic":
            pres.check_letter(l)
        else:
            pres._check_letter(l)
    if pres.kind == "flat":
        return _flat_make_C(pres, alpha, beta)
    return _sofic_make_C(pres, alpha, beta)


def cylinder(pres, beta: Word):
    return make_C(pres, EPSILON, beta)


def follower(pres, alpha: Word):
    return make_C(pres, alpha, EPSILON)


def complement(a):
    return _flat_complement(a) if isinstance(a, FlatUSet) else _sofic_complement(a)


def intersect(a, b):
    _same(a, b)
    if isinstance(a, FlatUSet):
        return _flat_meet(a, b, SymIndexSet.intersect, frozenset.__and__)
    return _sofic_meet(a, b, frozenset.__and__)


def union(a, b):
    _same(a, b)
    if isinstance(a, FlatUSet):
        return _flat_meet(a, b, SymIndexSet.union, frozenset.__or__)
    return _sofic_meet(a, b, frozenset.__or__)


def minus(a, b):
    return intersect(a, complement(b))


def is_empty(a) -> bool:
    if isinstance(a, FlatUSet):
        return all(s.is_empty for s in a.fam) and not a.expl
    return not a.items


def equals(a, b) -> bool:
    _same(a, b)
    return a == b


def contains_point(a, x: PointTemplate) -> bool:
    if x.has_param:
        raise ValueError("contains_point needs a concrete point")
    if isinstance(a, FlatUSet):
        return _flat_contains(a, x)
    return _sofic_contains(a, x)


def relative_range(a, alpha: Word):
    """``r(A, alpha) = {x in X : alpha x in A}``, letter by letter."""
    out = a
    for l in alpha:
        if isinstance(out, FlatUSet):
            out = _flat_rel_range_letter(out, l)
        else:
            out = _sofic_rel_range_letter(out, l)
    return out


def letters_from(a) -> LetterSet:
    """The letters a whose cylinder meets the set."""
    if isinstance(a, FlatUSet):
        return _flat_letters(a)
    return _sofic_letters(a)


def is_regular(a) -> bool:
    """Nonempty and meeting only finitely many letter cylinders."""
    ls = letters_from(a)
    return ls.finite and not ls.empty


def regular_decomposition_holds(a) -> bool:
    """Check ``A == union over letters of (Z_a meet A)`` when regular."""
    if not is_regular(a):
        raise ValueError("decomposition applies to regular sets")
    acc = uset_empty(a.pres)
    for l in letters_from(a).letters():
        acc = union(acc, intersect(cylinder(a.pres, Word((l,))), a))
    return equals(acc, a)


def size_if_finite(a):
    if isinstance(a, FlatUSet):
        return _flat_size(a)
    if not a.items:
        return 0
    total = 0
    for w, ts in a.items:
        for tid in ts:
            verdict, _ = follower_intersection(a.pres.dfa, a.pres.tail_types.types[tid])
            if verdict != "singleton":
                return None
            # a singleton follower intersection bounds the type class by 1
            total += 1
    return total


def is_singleton(a) -> bool:
    """Is the set a one-point set?  Exact on both backends."""
    if isinstance(a, FlatUSet):
        return _flat_size(a) == 1
    if is_empty(a):
        return False
    x = _sofic_extract_point(a)
    s = _sofic_singleton_uset(a.pres, x)
    return s is not None and s == a


def the_point(a) -> PointTemplate:
    """The unique point of a singleton set."""
    if isinstance(a, FlatUSet):
        if _flat_size(a) != 1:
            raise ValueError("not a singleton")
        return _flat_extract_point(a)
    if not is_singleton(a):
        raise ValueError("not a singleton")
    return _sofic_extract_point(a)


def singleton_uset(pres, x: PointTemplate):
    """{x} as an element of the generated algebra; None when not expressible.

    On the flat backend one-point sets are always representable; whether
    they lie in the generated algebra is a question for the basis machinery.
    """
    if pres.kind == "flat":
        ident = pres.identify(x)
        if ident is None:
            return None
        fam_sets = [SymIndexSet.empty(f.min_index) for f in pres.families]
        expl = set()
        if ident[0] == "expl":
            expl.add(ident[1])
        else:
            _, i, n = ident
            fam_sets[i] = SymIndexSet.of(pres.families[i].min_index, (n,))
        return FlatUSet(pres, tuple(fam_sets), frozenset(expl))
    return _sofic_singleton_uset(pres, x)


def point_uset(pres, points) -> "FlatUSet":
    """Finite set of concrete points (flat backend convenience)."""
    acc = uset_empty(pres)
    for x in points:
        s = singleton_uset(pres, x)
        if s is None:
            raise ValueError(f"{x} is not a point of the presentation")
        acc = union(acc, s)
    return acc
