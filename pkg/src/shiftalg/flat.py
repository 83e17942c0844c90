"""Flat parametric presentations of countable subshifts over infinite alphabets.

A flat presentation lists the points of the subshift explicitly: finitely
many N-indexed families of eventually periodic templates (one symbolic index
each) plus finitely many parameter-free points, together with the k-block
schemas that cut the subshift out of the full shift.  Declared data is
validated (blocks of every point match a schema, families are pairwise
disjoint) and a completeness probe compares template-generated words against
schema-allowed words up to a configurable length.

Symbolic index sets describe subsets of an index family exactly: finite sets
and cofinite sets, optionally marked as containing/excluding "the" generic
parameter.  Soundness of the symbolic rules rests on the generic parameter
denoting an index larger than every concrete index in sight; small indices
are always handled by explicit instantiation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .core import EPSILON, PARAM, PARAM2, Letter, Param, PointTemplate, Word


@dataclass(frozen=True)
class LetterFamily:
    name: str
    min_index: int = 0


@dataclass(frozen=True)
class PointFamily:
    name: str
    template: PointTemplate  # mentions PARAM
    min_index: int = 0


@dataclass(frozen=True)
class SymIndexSet:
    """A finite or cofinite set of indices from ``{n : n >= min_index}``.

    ``ints`` lists the finite side (members if finite, exceptions if
    cofinite); ``param`` marks whether the generic index belongs to the
    finite side.  All concrete members of ``ints`` must be small relative to
    any generic index in play.
    """

    min_index: int
    cofinite: bool = False
    ints: frozenset = frozenset()
    param: bool = False

    def __post_init__(self):
        object.__setattr__(self, "ints", frozenset(self.ints))
        if any(n < self.min_index for n in self.ints):
            raise ValueError("index below the family domain")

    @staticmethod
    def empty(min_index: int) -> "SymIndexSet":
        return SymIndexSet(min_index)

    @staticmethod
    def full(min_index: int) -> "SymIndexSet":
        return SymIndexSet(min_index, cofinite=True)

    @staticmethod
    def of(min_index: int, ints=(), param=False) -> "SymIndexSet":
        return SymIndexSet(min_index, False, frozenset(ints), param)

    def complement(self) -> "SymIndexSet":
        return SymIndexSet(self.min_index, not self.cofinite, self.ints, self.param)

    def intersect(self, other: "SymIndexSet") -> "SymIndexSet":
        a, b = self, other
        if not a.cofinite and not b.cofinite:
            return SymIndexSet(a.min_index, False, a.ints & b.ints, a.param and b.param)
        if not a.cofinite and b.cofinite:
            return SymIndexSet(a.min_index, False, a.ints - b.ints, a.param and not b.param)
        if a.cofinite and not b.cofinite:
            return b.intersect(a)
        return SymIndexSet(a.min_index, True, a.ints | b.ints, a.param or b.param)

    def union(self, other: "SymIndexSet") -> "SymIndexSet":
        return self.complement().intersect(other.complement()).complement()

    @property
    def is_empty(self) -> bool:
        return not self.cofinite and not self.ints and not self.param

    @property
    def is_finite(self) -> bool:
        return not self.cofinite

    def size(self):
        """Number of elements; None means countably infinite."""
        if self.cofinite:
            return None
        return len(self.ints) + (1 if self.param else 0)

    def contains_int(self, n: int) -> bool:
        return (n in self.ints) != self.cofinite

    def contains_param(self) -> bool:
        """Membership of the generic index."""
        return self.param != self.cofinite

    def contains_fresh(self) -> bool:
        """Membership of a generic index distinct from the tracked one."""
        return self.cofinite

    @property
    def has_param_mark(self) -> bool:
        return self.param

    def drop_param(self) -> "SymIndexSet":
        return SymIndexSet(self.min_index, self.cofinite, self.ints, False)

    def with_min(self, new_min: int) -> "SymIndexSet":
        """The same set described over a larger ambient domain."""
        if new_min > self.min_index:
            raise ValueError("can only widen the domain")
        if new_min == self.min_index:
            return self
        if not self.cofinite:
            return SymIndexSet(new_min, False, self.ints, self.param)
        gap = frozenset(range(new_min, self.min_index))
        return SymIndexSet(new_min, True, self.ints | gap, self.param)

    def instantiate(self, n: int) -> "SymIndexSet":
        """Replace the generic index by the fresh concrete value ``n``."""
        if not self.param:
            return self
        if n in self.ints or n < self.min_index:
            raise ValueError("instantiation value must be fresh")
        return SymIndexSet(self.min_index, self.cofinite, self.ints | {n}, False)

    def __str__(self):
        parts = sorted(map(str, self.ints))
        if self.param:
            parts.append(PARAM.name)
        inner = "{" + ",".join(parts) + "}"
        if self.cofinite:
            return f"all\\{inner}" if parts else "all"
        return inner


@dataclass(frozen=True)
class SymCond:
    """Truth of a per-index condition: generically, on the diagonal, and at
    finitely many exceptional indices."""

    generic: bool
    exceptions: dict
    diag: Optional[bool] = None

    def to_index_set(self, min_index: int) -> SymIndexSet:
        if self.diag is not None:
            raise ValueError("two-variable condition cannot become an index set")
        exc = {n for n, v in self.exceptions.items() if v != self.generic and n >= min_index}
        if self.generic:
            return SymIndexSet(min_index, True, frozenset(exc), False)
        return SymIndexSet(min_index, False, frozenset(exc), False)

    def to_index_set_diag(self, min_index: int) -> SymIndexSet:
        """Index set over the catalog variable, with the diagonal tracked by
        the param mark (used when a second generic index is in play)."""
        exc = {n for n, v in self.exceptions.items() if v != self.generic and n >= min_index}
        if self.generic:
            return SymIndexSet(min_index, True, frozenset(exc), self.diag is False)
        return SymIndexSet(min_index, False, frozenset(exc), bool(self.diag))


def unify_template(catalog_template: PointTemplate, query: PointTemplate):
    """Match a one-parameter catalog template against a query template.

    The catalog parameter is ``PARAM2``; the query may mention ``PARAM`` (and
    nothing else).  Returns the binding for ``PARAM2`` (an int or ``PARAM``)
    or None when the shapes cannot be made equal.  Matching is purely
    syntactic on canonical forms, which is sound for bindings that introduce
    no letter coincidences; coincidence-prone small indices must be checked
    by instantiation.
    """
    t, q = catalog_template, query
    if len(t.preperiod) != len(q.preperiod) or len(t.period) != len(q.period):
        return None
    binding = None
    pairs = zip(
        t.preperiod.letters + t.period.letters,
        q.preperiod.letters + q.period.letters,
    )
    for lt, lq in pairs:
        if lt.base != lq.base or (lt.index is None) != (lq.index is None):
            return None
        if lt.index is None:
            continue
        if lt.index == PARAM2:
            value = lq.index
            if isinstance(value, Param) and value != PARAM:
                return None
            if binding is None:
                binding = value
            elif binding != value:
                return None
        else:
            if lt.index != lq.index:
                return None
    return binding


class FlatPresentation:
    """A subshift given by explicit point families, explicit points and
    block schemas.

    Parameters
    ----------
    letters : concrete alphabet letters
    letter_families : LetterFamily descriptors for the N-indexed letters
    families : PointFamily descriptors (templates mention PARAM)
    explicits : list of (name, PointTemplate) parameter-free points
    schemas : allowed k-blocks (words, at most one PARAM each)
    """

    kind = "flat"

    def __init__(self, letters, letter_families, families, explicits, schemas,
                 probe_length=None):
        self.letters = tuple(sorted(set(letters), key=lambda l: l.key()))
        self.letter_families = tuple(sorted(letter_families, key=lambda f: f.name))
        self.families = tuple(families)
        self.explicits = tuple(explicits)
        self.schemas = tuple(schemas)
        self._fam_index = {f.name: i for i, f in enumerate(self.families)}
        self._expl_index = {name: i for i, (name, _) in enumerate(self.explicits)}
        self._letter_fams = {f.name: f for f in self.letter_families}
        self._validate()
        if probe_length is None:
            probe_length = self.block_length + 1 if self.schemas else 0
        if probe_length:
            ok, diffs = self.completeness_probe(probe_length)
            if not ok:
                raise ValueError(f"completeness probe failed at n={probe_length}: {diffs}")

    # -- validation --------------------------------------------------------

    @property
    def block_length(self) -> int:
        return len(self.schemas[0]) if self.schemas else 0

    def concrete_indices(self) -> set[int]:
        out = set()
        for f in self.families:
            out |= f.template.concrete_indices()
        for _, p in self.explicits:
            out |= p.concrete_indices()
        for w in self.schemas:
            out |= w.concrete_indices()
        return out

    def _check_letter(self, l: Letter):
        if l.index is None:
            if l not in self.letters:
                raise ValueError(f"letter {l} not declared")
        else:
            fam = self._letter_fams.get(l.base)
            if fam is None:
                raise ValueError(f"letter family {l.base} not declared")
            if isinstance(l.index, int) and l.index < fam.min_index:
                raise ValueError(f"letter {l} below family domain")
            if isinstance(l.index, Param) and l.index != PARAM:
                raise ValueError(f"letter {l} uses a foreign parameter")

    def _validate(self):
        if len({f.name for f in self.families}) != len(self.families):
            raise ValueError("duplicate point family names")
        if len(self._expl_index) != len(self.explicits):
            raise ValueError("duplicate explicit point names")
        for w in self.schemas:
            if len(w) != self.block_length:
                raise ValueError("schemas must share one block length")
            params = {l.index for l in w if l.has_param}
            if len(params) > 1:
                raise ValueError("a schema may use at most one index variable")
            for l in w:
                self._check_letter(l)
        for f in self.families:
            if not f.template.has_param:
                raise ValueError(f"point family {f.name} does not use its parameter")
            for l in f.template.preperiod.letters + f.template.period.letters:
                self._check_letter(l)
                if l.index == PARAM and f.min_index < self._letter_fams[l.base].min_index:
                    raise ValueError(
                        f"point family {f.name} starts below the domain of letter "
                        f"family {l.base}"
                    )
        for _, p in self.explicits:
            if p.has_param:
                raise ValueError("explicit points must be parameter free")
            for l in p.preperiod.letters + p.period.letters:
                self._check_letter(l)
        self._validate_disjoint()
        if self.schemas:
            self._validate_windows()

    def _probe_indices(self, extra=()):
        base = self.concrete_indices() | set(extra)
        mins = [f.min_index for f in self.families] or [0]
        probe = set(base)
        for m in mins:
            probe.update({m, m + 1})
        hi = max(base, default=0) + 1
        probe.update({hi, hi + 1})
        return sorted(probe)

    def _instances(self, f: PointFamily, indices):
        return [(n, f.template.subst(n)) for n in indices if n >= f.min_index]

    def _validate_disjoint(self):
        probe = self._probe_indices()
        pool = []
        for i, f in enumerate(self.families):
            for n, p in self._instances(f, probe):
                pool.append((("fam", i, n), p))
        for name, p in self.explicits:
            pool.append((("expl", name), p))
        seen = {}
        for tag, p in pool:
            if p in seen:
                raise ValueError(f"catalog overlap: {tag} equals {seen[p]} ({p})")
            seen[p] = tag
        for i, f in enumerate(self.families):
            for i2, f2 in enumerate(self.families):
                if i2 <= i:
                    continue
                renamed = _rename_param(f.template)
                if unify_template(renamed, f2.template) == PARAM:
                    raise ValueError(
                        f"point families {f.name} and {f2.name} coincide generically"
                    )

    def _validate_windows(self):
        k = self.block_length
        for i, f in enumerate(self.families):
            for w in _template_windows(f.template, k):
                if not any(self._schema_matches(s, w) for s in self.schemas):
                    raise ValueError(f"family {f.name}: window {Word(w)} matches no schema")
            for n, inst in self._instances(f, self._probe_indices()):
                for w in _template_windows(inst, k):
                    if not any(self._schema_matches(s, w) for s in self.schemas):
                        raise ValueError(
                            f"family {f.name}[{n}]: window {Word(w)} matches no schema"
                        )
        for name, p in self.explicits:
            for w in _template_windows(p, k):
                if not any(self._schema_matches(s, w) for s in self.schemas):
                    raise ValueError(f"explicit {name}: window {Word(w)} matches no schema")

    def _schema_matches(self, schema: Word, window: tuple) -> bool:
        """Can the schema's variable be bound so the schema equals the window?

        Window letters may carry opaque parameters, which the schema variable
        may bind to consistently.
        """
        binding = None
        for ls, lw in zip(schema.letters, window):
            if ls.base != lw.base or (ls.index is None) != (lw.index is None):
                return False
            if ls.index is None:
                continue
            if isinstance(ls.index, Param):
                if binding is None:
                    binding = lw.index
                elif binding != lw.index:
                    return False
                if isinstance(lw.index, int):
                    fam = self._letter_fams[ls.base]
                    if lw.index < fam.min_index:
                        return False
            else:
                if ls.index != lw.index:
                    return False
        return True

    # -- membership ---------------------------------------------------------

    def is_empty(self) -> bool:
        return not self.families and not self.explicits

    def identify(self, x: PointTemplate):
        """Locate a concrete point in the catalog.

        Returns ``("fam", i, n)`` or ``("expl", name)`` or None.
        """
        if x.has_param:
            raise ValueError("identify needs a concrete point")
        for name, p in self.explicits:
            if p == x:
                return ("expl", name)
        candidates = self.concrete_indices() | x.concrete_indices()
        for i, f in enumerate(self.families):
            renamed = _rename_param(f.template)
            b = unify_template(renamed, x)
            cand = set(candidates)
            if isinstance(b, int):
                cand.add(b)
            for n in sorted(cand):
                if n >= f.min_index and f.template.subst(n) == x:
                    return ("fam", i, n)
        return None

    def contains(self, x: PointTemplate) -> bool:
        return self.identify(x) is not None

    def identify_sym(self, q: PointTemplate):
        """Identify a query with at most the generic parameter ``PARAM``.

        Returns ``(generic, exceptions)`` where ``generic`` is the
        identification valid for all large parameter values (None when the
        generic instance is outside the subshift; ``("fam", i, "diag")`` for
        an index-preserving family match; a concrete identification when the
        query is parameter free) and ``exceptions`` maps each small index to
        its concrete identification.
        """
        exceptions = {}
        if q.has_param:
            generic = None
            for i, f in enumerate(self.families):
                renamed = _rename_param(f.template)
                b = unify_template(renamed, q)
                if b == PARAM:
                    generic = ("fam", i, "diag")
                    break
            for n in self._probe_indices(q.concrete_indices()):
                exceptions[n] = self.identify(q.subst(n))
        else:
            generic = self.identify(q)
        return generic, exceptions

    def member_cond(self, q: PointTemplate) -> SymCond:
        """For which values of the parameter is ``q`` a point of the subshift?"""
        generic, exceptions = self.identify_sym(q)
        if not q.has_param:
            return SymCond(generic is not None, {})
        return SymCond(
            generic is not None,
            {n: ident is not None for n, ident in exceptions.items()},
        )

    def member_cond_pair(self, template: PointTemplate, wrap):
        """Membership of ``wrap(template[PARAM2 := m])`` as ``m`` varies.

        ``wrap`` maps a template to the queried point and may itself mention
        the generic ``PARAM``.  Returns a :class:`SymCond` over ``m`` whose
        ``diag`` field covers ``m`` equal to the generic parameter.
        """
        q_diag = wrap(_rename_param2_to_param(template))
        diag = self._member_bool(q_diag)
        generic = self._member_generic_offdiag(template, wrap)
        exceptions = {}
        for n in self._probe_indices(template.concrete_indices()):
            q = wrap(_subst_param2(template, n))
            exceptions[n] = self._member_bool(q)
        return SymCond(generic, exceptions, diag=diag)

    def _member_bool(self, q: PointTemplate) -> bool:
        if q.has_param:
            return self.member_cond(q).generic
        return self.contains(q)

    def _member_generic_offdiag(self, template, wrap) -> bool:
        # m generic and distinct from the generic PARAM: a catalog family can
        # absorb only one free index, so the query is a point iff one family
        # matches all its parametric positions at once.
        q = wrap(template)  # mentions PARAM2 (as m) and possibly PARAM
        has_p = _mentions(q, PARAM)
        has_m = _mentions(q, PARAM2)
        if has_p and has_m:
            return False
        if has_m:
            # relabel m as the single generic index and decide as usual
            return self.member_cond(_rename_param2_to_param(q)).generic
        return self._member_bool(q)

    # -- language ------------------------------------------------------------

    def language(self, n: int):
        """Length-``n`` words, as (word, min_index-or-None) schema pairs."""
        if n == 0:
            return [(EPSILON, None)]
        raw = []
        for f in self.families:
            t = f.template
            span = len(t.preperiod) + len(t.period)
            buf = t.expand(span + n)
            for o in range(span):
                raw.append((Word(buf[o:o + n]), f.min_index))
        for _, p in self.explicits:
            span = len(p.preperiod) + len(p.period)
            buf = p.expand(span + n)
            for o in range(span):
                raw.append((Word(buf[o:o + n]), None))
        merged = {}
        for w, m in raw:
            if w.has_param:
                cur = merged.get(w)
                merged[w] = m if cur is None else min(cur, m)
            else:
                merged.setdefault(w, None)
        out = []
        param_words = [(w, m) for w, m in merged.items() if w.has_param]
        for w, m in merged.items():
            if w.has_param:
                out.append((w, m))
                continue
            absorbed = False
            for pw, pm in param_words:
                b = _unify_word(pw, w)
                if isinstance(b, int) and b >= pm:
                    absorbed = True
                    break
            if not absorbed:
                out.append((w, None))
        return sorted(out, key=lambda wm: wm[0].key())

    def language_words(self, n: int) -> list[Word]:
        return [w for w, _ in self.language(n)]

    def schema_allowed(self, n: int):
        """Length-``n`` words allowed by the schemas, built letter by letter.

        Fresh opaque variables are introduced as needed; the result uses
        ``v0, v1, ...`` in order of first occurrence.
        """
        if n == 0:
            return [(EPSILON, None)]
        k = self.block_length
        schema_ints = {}
        for s in self.schemas:
            for l in s:
                if isinstance(l.index, int):
                    schema_ints.setdefault(l.base, set()).add(l.index)
        words = [((), 0)]  # (letters, number of vars used)
        for _ in range(n):
            nxt = []
            for w, nv in words:
                pool = list(self.letters)
                for lf in self.letter_families:
                    for c in sorted(schema_ints.get(lf.name, ())):
                        pool.append(Letter(lf.name, c))
                    for v in range(nv + 1):
                        pool.append(Letter(lf.name, Param(f"v{v}")))
                for a in pool:
                    w2 = w + (a,)
                    if len(w2) >= k and not any(
                        self._schema_matches(s, w2[-k:]) for s in self.schemas
                    ):
                        continue
                    nv2 = nv + (1 if isinstance(a.index, Param) and a.index.name == f"v{nv}" else 0)
                    nxt.append((w2, nv2))
            words = nxt
        out = set()
        for w, nv in words:
            if nv == 0:
                out.add((Word(w), None))
            elif nv == 1:
                # normalize the single variable to the canonical parameter
                letters = tuple(
                    Letter(l.base, PARAM) if isinstance(l.index, Param) else l
                    for l in w
                )
                fams = {l.base for l in w if isinstance(l.index, Param)}
                m = max(self._letter_fams[f].min_index for f in fams)
                out.add((Word(letters), m))
            else:
                out.add((Word(w), "multi"))
        return sorted(out, key=lambda wm: wm[0].key())

    def completeness_probe(self, n: int):
        """Compare template-generated and schema-allowed words up to length ``n``."""
        diffs = []
        for m in range(1, n + 1):
            lang = set(self.language(m))
            allowed = set(self.schema_allowed(m))
            if lang != allowed:
                diffs.append((m, sorted(str(w) for w, _ in allowed ^ lang)))
        return (not diffs, diffs)

    # -- misc ----------------------------------------------------------------

    def family(self, i: int) -> PointFamily:
        return self.families[i]

    def explicit_names(self):
        return tuple(name for name, _ in self.explicits)

    def explicit_point(self, name: str) -> PointTemplate:
        return self.explicits[self._expl_index[name]][1]


def _rename_param(t: PointTemplate) -> PointTemplate:
    letters_pre = tuple(
        Letter(l.base, PARAM2) if l.index == PARAM else l for l in t.preperiod
    )
    letters_per = tuple(
        Letter(l.base, PARAM2) if l.index == PARAM else l for l in t.period
    )
    return PointTemplate(Word(letters_pre), Word(letters_per))


def _subst_param2(t: PointTemplate, n: int) -> PointTemplate:
    pre = tuple(Letter(l.base, n) if l.index == PARAM2 else l for l in t.preperiod)
    per = tuple(Letter(l.base, n) if l.index == PARAM2 else l for l in t.period)
    return PointTemplate(Word(pre), Word(per))


def _mentions(t: PointTemplate, p: Param) -> bool:
    return any(l.index == p for l in t.preperiod.letters + t.period.letters)


def _template_windows(t: PointTemplate, k: int):
    span = len(t.preperiod) + len(t.period)
    buf = t.expand(span + k)
    return [buf[o:o + k] for o in range(span)]


def _unify_word(pattern: Word, w: Word):
    """Bind the single parameter of ``pattern`` so that it equals ``w``."""
    if len(pattern) != len(w):
        return None
    binding = None
    for lp, lw in zip(pattern.letters, w.letters):
        if lp.base != lw.base or (lp.index is None) != (lw.index is None):
            return None
        if lp.index is None:
            continue
        if isinstance(lp.index, Param):
            if binding is None:
                binding = lw.index
            elif binding != lw.index:
                return None
        elif lp.index != lw.index:
            return None
    return binding


def _rename_param2_to_param(t: PointTemplate) -> PointTemplate:
    pre = tuple(Letter(l.base, PARAM) if l.index == PARAM2 else l for l in t.preperiod)
    per = tuple(Letter(l.base, PARAM) if l.index == PARAM2 else l for l in t.period)
    return PointTemplate(Word(pre), Word(per))
