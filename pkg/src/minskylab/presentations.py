"""Semigroup presentations simulating Minsky machines.

Variants: S1, S2R, S2L (plain), S1', S2R' (with the counter glass),
S3R/S5R (K-glass right-hand versions) and the amalgam D(M), E(M), R.
Words are tuples of generator names; ``ZERO`` is the reserved zero symbol.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from . import kernels
from .machine import Command, Configuration, MachineError, MinskyMachine

ZERO = "0"
Word = tuple[str, ...]

VARIANTS = ("S1", "S2R", "S2L", "S1'", "S2R'", "S3R", "S5R", "AMALGAM")
PRIMED = ("S1'", "S2R'")

# rows of the command tables, used for stable relation ordering
_ROWS = {"add1": 0, "add2": 1, "tick": 2, "sub1": 3, "sub2": 4, "zero1": 5, "zero2": 6}


def w(text: str) -> Word:
    return tuple(text.split())


def fmt(word: Word) -> str:
    return " ".join(word)


@dataclass(frozen=True)
class Relation:
    lhs: Word
    rhs: Word
    tag: str = field(default="", compare=False)

    def __str__(self) -> str:
        return f"{fmt(self.lhs)} = {fmt(self.rhs)}"


@dataclass
class Presentation:
    name: str
    variant: str
    generators: tuple[str, ...]
    relations: list[Relation]
    zero: str | None = ZERO
    commuting: frozenset = frozenset()
    forbidden: tuple[Word, ...] = ()
    # per-command relation indices (into ``relations``) for derivation building
    command_relations: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @cached_property
    def index(self) -> dict[str, int]:
        return {g: i for i, g in enumerate(self.generators)}

    @cached_property
    def commute_matrix(self) -> np.ndarray:
        n = len(self.generators)
        m = np.zeros((n, n), dtype=np.uint8)
        for pair in self.commuting:
            x, y = tuple(pair)
            m[self.index[x], self.index[y]] = m[self.index[y], self.index[x]] = 1
        return m

    @cached_property
    def commute_sets(self) -> dict[str, frozenset]:
        out = {g: set() for g in self.generators}
        for pair in self.commuting:
            x, y = tuple(pair)
            out[x].add(y)
            out[y].add(x)
        return {g: frozenset(s) for g, s in out.items()}

    def commutes(self, x: str, y: str) -> bool:
        return y in self.commute_sets.get(x, ())

    def all_relations(self) -> list[Relation]:
        """Minsky/auxiliary relations, commuting instances, then the w = 0 list."""
        out = list(self.relations)
        for pair in sorted(tuple(sorted(p, key=self.index.get)) for p in self.commuting):
            x, y = pair
            out.append(Relation((x, y), (y, x), "commute"))
        out += [Relation(f, (ZERO,), "forbidden") for f in self.forbidden]
        return out

    def canonical(self, word: Word) -> Word:
        if self.zero is not None and self.zero in word:
            return (self.zero,)
        if not self.commuting or len(word) < 2:
            return tuple(word)
        idx = self.index
        ints = kernels.lex_normal([idx[x] for x in word], self.commute_matrix)
        return tuple(self.generators[i] for i in ints)

    def check_word(self, word: Word) -> None:
        for x in word:
            if x not in self.index and x != self.zero:
                raise ValueError(f"foreign generator {x!r} for {self.name}")

    def validate(self) -> None:
        for r in self.all_relations():
            self.check_word(r.lhs)
            self.check_word(r.rhs)
            if self.zero in r.lhs and r.lhs != (self.zero,):
                raise ValueError(f"zero inside a relation side: {r}")
            if r.lhs == (self.zero,):
                raise ValueError(f"zero must sit on the right: {r}")

    def reversed(self, name: str, variant: str) -> "Presentation":
        rels = [Relation(r.lhs[::-1], r.rhs[::-1], r.tag) for r in self.relations]
        return Presentation(name, variant, self.generators, rels, self.zero, self.commuting,
                            tuple(f[::-1] for f in self.forbidden),
                            dict(self.command_relations), {k: v for k, v in self.meta.items() if not k.startswith("_")})


# -- helpers -----------------------------------------------------------------

def _q(i: int) -> str:
    return f"q{i}"


def _glass_letters(k: int) -> tuple[str, str]:
    return f"a{k}", f"A{k}"


def _require_classic(m: MinskyMachine) -> None:
    if not m.is_classic():
        raise MachineError(f"{m.name}: only 2-glass machines with classic commands "
                           "(Add, guarded Sub, zero jump) fit the command tables")


def _commute_pairs(groups_a, groups_b) -> frozenset:
    return frozenset(frozenset((x, y)) for x in groups_a for y in groups_b)


def _sorted_rows(entries):
    """entries: (row, label, order, command, [Relation]); returns relations + map."""
    entries.sort(key=lambda e: (e[0], e[1], e[2]))
    rels, cmd_map = [], {}
    for _, _, _, cmd, rs in entries:
        idxs = []
        for r in rs:
            if r in rels:
                idxs.append(rels.index(r))
            else:
                idxs.append(len(rels))
                rels.append(r)
        if cmd is not None:
            cmd_map.setdefault(cmd, []).extend(idxs)
    return rels, cmd_map


def _row_of(cmd: Command) -> str:
    form, k = cmd.form()
    return f"{form}{k}"


def counter_words(max_len: int = 2) -> list[Word]:
    out = [()]
    for n in range(1, max_len + 1):
        out += [tuple(p) for p in product(("c", "c'", "e"), repeat=n)]
    return out


# -- configuration words -----------------------------------------------------

def config_word(variant: str, c: Configuration, counter: int | None = None) -> Word:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant}")
    k = len(c.glasses)
    want = {"S3R": 3, "S5R": 5}.get(variant, 2)
    if k != want:
        raise ValueError(f"variant {variant} encodes {want}-glass configurations, got {c}")
    if counter is not None and variant not in PRIMED:
        raise ValueError("counter only applies to primed variants")
    q = _q(c.label)
    if variant == "AMALGAM":
        m, n = c.glasses
        return ("A",) + ("a", "b") * m + (q,) + ("abar", "bbar") * n + ("B",)
    if variant in ("S1", "S1'"):
        m, n = c.glasses
        core = ("A1",) + ("a1",) * m + (q,) + ("a2",) * n + ("A2",)
        if variant == "S1'":
            core = ("C",) + ("c",) * (counter or 0) + core
        return core
    body: tuple = (q,)
    for i, e in enumerate(c.glasses, 1):
        a, A = _glass_letters(i)
        body += (a,) * e + (A,)
    if variant == "S2L":
        return body[::-1]
    if variant == "S2R'":
        body += ("c",) * (counter or 0) + ("C",)
    return body


def decode_config_word(variant: str, word: Word) -> Configuration | None:
    """Inverse of config_word on canonical words (counter must be absent)."""
    if variant == "S2L":
        word = word[::-1]
        variant = "S2R"
    glasses = {"S3R": 3, "S5R": 5}.get(variant, 2)
    toks = list(word)
    if variant in ("S1", "S1'"):
        if variant == "S1'":
            if not toks or toks[0] != "C":
                return None
            toks = toks[1:]
        if len(toks) < 3 or toks[0] != "A1" or toks[-1] != "A2":
            return None
        mid = toks[1:-1]
        qs = [i for i, x in enumerate(mid) if x.startswith("q")]
        if len(qs) != 1:
            return None
        left, right = mid[:qs[0]], mid[qs[0] + 1:]
        if set(left) - {"a1"} or set(right) - {"a2"}:
            return None
        return Configuration(int(mid[qs[0]][1:]), (len(left), len(right)))
    if variant == "AMALGAM":
        return None
    if variant == "S2R'":
        if not toks or toks[-1] != "C":
            return None
        toks = toks[:-1]
    if not toks or not toks[0].startswith("q"):
        return None
    label = int(toks[0][1:])
    pos = 1
    gl = []
    for k in range(1, glasses + 1):
        a, A = _glass_letters(k)
        e = 0
        while pos < len(toks) and toks[pos] == a:
            e += 1
            pos += 1
        if pos >= len(toks) or toks[pos] != A:
            return None
        pos += 1
        gl.append(e)
    if pos != len(toks):
        return None
    return Configuration(label, tuple(gl))


# -- forbidden factors -------------------------------------------------------

def _reference_words(variant: str, m: MinskyMachine, labels, bound: int = 2):
    glasses = {"S3R": 3, "S5R": 5}.get(variant, 2)
    for i in labels:
        for counts in product(range(bound + 1), repeat=glasses):
            c = Configuration(i, counts)
            if variant == "S1'":
                base = config_word("S1", c)
                for x in counter_words():
                    yield ("C",) + x + base
            elif variant == "S2R'":
                base = config_word("S2R", c)
                for x in counter_words():
                    yield base + x + ("C",)
            else:
                yield config_word(variant, c)


def allowed_pairs(words, p: Presentation) -> set[tuple[str, str]]:
    idx = p.index
    allowed = set()
    for word in words:
        for x, y in kernels.two_factors([idx[t] for t in word], p.commute_matrix):
            allowed.add((p.generators[x], p.generators[y]))
    return allowed


def forbidden_factors(variant: str, m: MinskyMachine, p: Presentation | None = None) -> set[Word]:
    """2-letter words that are not factors (mod commuting) of any configuration word.

    Coins up to 2 per glass suffice: every 2-letter factor of a configuration
    word already occurs with at most 2 coins in each glass.
    """
    if variant == "S2L":
        return {f[::-1] for f in forbidden_factors("S2R", m)}
    if p is None:
        p = _skeleton(variant, m)
    n = m.n_labels
    labels = range(0, n + 1) if variant in PRIMED else range(1, n + 1)
    allowed = allowed_pairs(_reference_words(variant, m, labels), p)
    return {(x, y) for x in p.generators for y in p.generators if (x, y) not in allowed}


def _skeleton(variant: str, m: MinskyMachine) -> Presentation:
    """Generators and commuting pairs of a variant (no relations)."""
    n = m.n_labels
    qs = tuple(_q(i) for i in range(n + 1))
    if variant in ("S3R", "S5R"):
        k = 3 if variant == "S3R" else 5
        gens = qs + tuple(x for i in range(1, k + 1) for x in _glass_letters(i))
        com = frozenset(frozenset((x, y))
                        for i in range(1, k + 1) for j in range(i + 1, k + 1)
                        for x in _glass_letters(i) for y in _glass_letters(j))
        return Presentation(f"{variant}({m.name})", variant, gens, [], ZERO, com)
    gens = qs + ("a1", "A1", "a2", "A2")
    counters = ("c", "c'", "e", "C")
    if variant in PRIMED:
        gens += counters
    com = frozenset()
    if variant in ("S2R", "S2L", "S2R'"):
        com = _commute_pairs(("a1", "A1"), ("a2", "A2"))
    if variant == "S2R'":
        com |= _commute_pairs(("a1", "a2", "A1", "A2"), counters)
    return Presentation(f"{variant}({m.name})", variant, gens, [], ZERO, com)


# -- S1 / S2 -----------------------------------------------------------------

def _minsky_relation(variant: str, cmd: Command, literal: bool = False) -> list[Relation]:
    form, k = cmd.form()
    qi, qj = _q(cmd.label), _q(cmd.next)
    a, A = _glass_letters(k)
    tag = f"cmd {cmd.to_dsl()}"
    right = variant in ("S2R", "S2R'")
    if form == "add":
        if k == 1 and not right:
            return [Relation((qi,), ("a1", qj), tag)]
        return [Relation((qi,), (qj, a), tag)]
    if form == "sub":
        if k == 1 and not right:
            return [Relation(("a1", qi), (qj,), tag)]
        return [Relation((qi, a), (qj,), tag)]
    # zero jump
    if k == 1 and not right:
        return [Relation(("A1", qi), ("A1", qj), tag)]
    if k == 2 and right and literal:
        return [Relation((qi, A), (qi, A), tag)]
    return [Relation((qi, A), (qj, A), tag)]


def _emit_plain(variant: str, m: MinskyMachine, literal: bool = False) -> Presentation:
    _require_classic(m)
    p = _skeleton(variant, m)
    entries = []
    for order, cmd in enumerate(m.commands):
        entries.append((_ROWS[_row_of(cmd)], cmd.label, order, cmd,
                        _minsky_relation(variant, cmd, literal)))
    rels, cmd_map = _sorted_rows(entries)
    rels.append(Relation(("q0",), (ZERO,), "stop"))
    p.relations = rels
    p.command_relations = cmd_map
    p.forbidden = tuple(sorted(forbidden_factors(variant, m, p), key=lambda f: [p.index[x] for x in f]))
    p.validate()
    return p


def emit_s1(m: MinskyMachine) -> Presentation:
    return _emit_plain("S1", m)


def emit_s2_right(m: MinskyMachine, literal: bool = False) -> Presentation:
    return _emit_plain("S2R", m, literal)


def emit_s2_left(m: MinskyMachine, literal: bool = False) -> Presentation:
    p = emit_s2_right(m, literal)
    q = p.reversed(f"S2L({m.name})", "S2L")
    q.validate()
    return q


# -- primed variants ---------------------------------------------------------

COUNTER_RELATIONS = [
    Relation(("c", "c'"), ("e",), "counter"),
    Relation(("c'", "c"), ("e",), "counter"),
    Relation(("e", "c"), ("c",), "counter"),
    Relation(("c", "e"), ("c",), "counter"),
    Relation(("e", "c'"), ("c'",), "counter"),
    Relation(("c'", "e"), ("c'",), "counter"),
]


def _emit_primed(variant: str, m: MinskyMachine, literal: bool = False,
                 strict_counter: bool = False) -> Presentation:
    """``literal`` emits the printed tick row (w1 read as q1, subscripts fixed at 1);
    ``strict_counter`` keeps the >=2 row from firing on the last coin."""
    _require_classic(m)
    p = _skeleton(variant, m)
    right = variant == "S2R'"
    entries = []
    for order, cmd in enumerate(m.commands):
        form, k = cmd.form()
        if form == "sub" and k == 1:
            qi, qj = _q(cmd.label), _q(cmd.next)
            if literal:
                qi = qj = "q1"
            tag = f"cmd {cmd.to_dsl()}"
            if right:
                tick = Relation((qi, "a1", "A1"), (qj, "A1", "c"), tag + " [eps1=1]")
                many = (Relation((_q(cmd.label), "a1", "a1"), (_q(cmd.next), "a1"), tag)
                        if strict_counter else
                        Relation((_q(cmd.label), "a1"), (_q(cmd.next),), tag))
            else:
                tick = Relation(("A1", "a1", qi), ("c", "A1", qj), tag + " [eps1=1]")
                many = (Relation(("a1", "a1", _q(cmd.label)), ("a1", _q(cmd.next)), tag)
                        if strict_counter else
                        Relation(("a1", _q(cmd.label)), (_q(cmd.next),), tag))
            entries.append((_ROWS["tick"], cmd.label, order, cmd, [tick]))
            entries.append((_ROWS["sub1"], cmd.label, order, cmd, [many]))
        else:
            entries.append((_ROWS[_row_of(cmd)], cmd.label, order, cmd,
                            _minsky_relation("S2R" if right else "S1", cmd, literal)))
    rels, cmd_map = _sorted_rows(entries)
    rels += COUNTER_RELATIONS
    for i in range(m.n_labels + 1):
        if right:
            rels.append(Relation((_q(i), "A1", "e", "C"), (ZERO,), "counter-zero"))
        else:
            rels.append(Relation(("C", "e", "A1", _q(i)), (ZERO,), "counter-zero"))
    p.relations = rels
    p.command_relations = cmd_map
    p.forbidden = tuple(sorted(forbidden_factors(variant, m, p), key=lambda f: [p.index[x] for x in f]))
    p.validate()
    return p


def emit_s1_prime(m: MinskyMachine, literal: bool = False, strict_counter: bool = False) -> Presentation:
    return _emit_primed("S1'", m, literal, strict_counter)


def emit_s2_prime(m: MinskyMachine, literal: bool = False, strict_counter: bool = False) -> Presentation:
    return _emit_primed("S2R'", m, literal, strict_counter)


# -- K glasses ---------------------------------------------------------------

def _sk_relation(cmd: Command) -> Relation:
    left: list[str] = [_q(cmd.label)]
    right: list[str] = [_q(cmd.next)]
    eff = dict(cmd.effect)
    guard = dict(cmd.guard.conds)
    for k in sorted(set(eff) | set(guard)):
        a, A = _glass_letters(k)
        d = eff.get(k, 0)
        g = guard.get(k)
        if g is False:
            # zero test; an Inc on the same glass sits before the bottom
            left.append(A)
            right.extend([a, A] if d > 0 else [A])
        elif g is True:
            left.append(a)
            if d == 0:
                right.append(a)
            elif d > 0:
                right.extend([a, a])
        elif d > 0:
            right.append(a)
    return Relation(tuple(left), tuple(right), f"cmd {cmd.to_dsl()}")


def emit_sk_right(m: MinskyMachine, k: int | None = None) -> Presentation:
    k = m.glasses if k is None else k
    if k not in (3, 5) or m.glasses != k:
        raise MachineError(f"emit_sk_right supports 3 or 5 glasses (machine has {m.glasses})")
    variant = f"S{k}R"
    p = _skeleton(variant, m)
    rels: list[Relation] = []
    cmd_map = {}
    for cmd in m.commands:
        r = _sk_relation(cmd)
        if r not in rels:
            rels.append(r)
        cmd_map.setdefault(cmd, []).append(rels.index(r))
    rels.append(Relation(("q0",), (ZERO,), "stop"))
    p.relations = rels
    p.command_relations = cmd_map
    p.forbidden = tuple(sorted(forbidden_factors(variant, m, p), key=lambda f: [p.index[x] for x in f]))
    p.validate()
    return p


# -- amalgam -----------------------------------------------------------------

@dataclass
class Amalgam:
    D: Presentation
    E: Presentation
    U: tuple[str, ...]
    R: Presentation


def _all_factors(words):
    out = set()
    for word in words:
        for i in range(len(word)):
            for j in range(i + 1, len(word) + 1):
                out.add(tuple(word[i:j]))
    return out


def _minimal_forbidden(gens, allowed: set[Word]) -> list[Word]:
    """Minimal words over ``gens`` that are not in the factor-closed set ``allowed``."""
    out = [(g,) for g in gens if (g,) not in allowed]
    maxlen = max((len(x) for x in allowed), default=0)
    for length in range(2, maxlen + 2):
        for base in [x for x in allowed if len(x) == length - 1]:
            for g in gens:
                cand = base + (g,)
                if cand not in allowed and cand[1:] in allowed:
                    out.append(cand)
    return sorted(set(out), key=lambda x: (len(x), x))


# how q_i is expanded in D, per (form, glass)
_AMALGAM_SHAPE = {("add", 1): "a u p", ("add", 2): "p u x", ("sub", 1): "u p",
                  ("zero", 1): "u p", ("sub", 2): "p u", ("zero", 2): "p u"}


def emit_amalgam(m: MinskyMachine, literal: bool = False) -> Amalgam:
    """D(M), E(M), the shared set U and the amalgamated presentation R.

    ``literal`` reproduces the printed rows (u_{1,2} in the zero-test rows and
    the printed Add(2) row); the default keeps the index pattern consistent.
    """
    _require_classic(m)
    n = m.n_labels
    qs = [_q(i) for i in range(n + 1)]
    ps = [f"p{i}" for i in range(n + 1)]
    us = [f"u{i}_{j}" for i in range(n + 1) for j in (1, 2)]
    # labels with several commands need one private second-stage letter each
    extra: dict[Command, str] = {}
    for label in range(1, n + 1):
        cmds = m.by_label(label)
        for r, cmd in enumerate(cmds):
            extra[cmd] = f"u{label}_{2 + r}"
    us += sorted({v for v in extra.values()} - set(us), key=lambda s: (int(s[1:].split("_")[0]), int(s.split("_")[1])))
    U = ("q0", "q1") + tuple(us)
    d_gens = tuple(["a", "bbar"] + qs + ps) + tuple(u for u in U if u not in qs)
    e_gens = ("A", "b", "abar", "B") + U
    d_rels: list[Relation] = []
    e_rels: list[Relation] = []
    cmd_map: dict[Command, list[tuple[str, int]]] = {}

    def add(target, rel, cmd, side):
        if rel not in target:
            target.append(rel)
        cmd_map.setdefault(cmd, []).append((side, target.index(rel)))

    for label in range(1, n + 1):
        cmds = m.by_label(label)
        shapes = {_AMALGAM_SHAPE[cmd.form()] for cmd in cmds}
        if len(shapes) > 1:
            raise MachineError(f"label {label}: commands need different q-expansions; "
                               "the amalgam tables cannot share them")
        for cmd in cmds:
            form, k = cmd.form()
            i, j = cmd.label, cmd.next
            qi, qj, pi = _q(i), _q(j), f"p{i}"
            u1 = f"u{i}_1"
            u2 = extra[cmd]
            tag = f"cmd {cmd.to_dsl()}"
            if form == "add" and k == 1:
                add(d_rels, Relation((qi,), ("a", u1, pi), tag), cmd, "D")
                add(e_rels, Relation((u1,), ("b", u2), tag), cmd, "E")
                add(d_rels, Relation((u2, pi), (qj,), tag), cmd, "D")
            elif form == "add":
                first, second = ("abar", "bbar") if literal else ("bbar", "abar")
                add(d_rels, Relation((qi,), (pi, u1, first), tag), cmd, "D")
                add(e_rels, Relation((u1,), (u2, second), tag), cmd, "E")
                add(d_rels, Relation((pi, u2), (qj,), tag), cmd, "D")
            elif form == "sub" and k == 1:
                add(d_rels, Relation((qi,), (u1, pi), tag), cmd, "D")
                add(e_rels, Relation(("b", u1), (u2,), tag), cmd, "E")
                add(d_rels, Relation(("a", u2, pi), (qj,), tag), cmd, "D")
            elif form == "sub":
                add(d_rels, Relation((qi,), (pi, u1), tag), cmd, "D")
                add(e_rels, Relation((u1, "abar"), (u2,), tag), cmd, "E")
                add(d_rels, Relation((pi, u2, "bbar"), (qj,), tag), cmd, "D")
            elif k == 1:
                uu = "u1_2" if literal else u2
                add(d_rels, Relation((qi,), (u1, pi), tag), cmd, "D")
                add(e_rels, Relation(("A", u1), ("A", uu), tag), cmd, "E")
                add(d_rels, Relation((uu, pi), (qj,), tag), cmd, "D")
            else:
                add(d_rels, Relation((qi,), (pi, u1), tag), cmd, "D")
                add(e_rels, Relation((u1, "B"), (u2, "B"), tag), cmd, "E")
                add(d_rels, Relation((pi, u2), (qj,), tag), cmd, "D")

    d_set, e_set = set(d_gens), set(e_gens)
    # E-pure pieces of every configuration word A(ab)^m q_i (abar bbar)^n B
    # with q_i in U, and the D-pure single letters.
    e_extra = [(l, q, r) for q in ("q0", "q1") for l in ("A", "b") for r in ("abar", "B")]
    d_words = [r.lhs for r in d_rels] + [r.rhs for r in d_rels] + [("q0",), ("q1",), ("a",), ("bbar",)]
    e_words = [r.lhs for r in e_rels] + [r.rhs for r in e_rels] + e_extra
    d_words = [x for x in d_words if set(x) <= d_set]
    e_words = [x for x in e_words if set(x) <= e_set]
    d_forb = _minimal_forbidden(d_gens, _all_factors(d_words))
    e_forb = _minimal_forbidden(e_gens, _all_factors(e_words))

    D = Presentation(f"D({m.name})", "AMALGAM-D", d_gens, d_rels, ZERO, frozenset(), tuple(d_forb))
    E = Presentation(f"E({m.name})", "AMALGAM-E", e_gens, e_rels, ZERO, frozenset(), tuple(e_forb))
    r_gens = d_gens + tuple(g for g in e_gens if g not in d_set)
    r_rels = d_rels + [r for r in e_rels if r not in d_rels]
    offset = {"D": 0, "E": len(d_rels)}
    r_map = {cmd: [offset[s] + i for s, i in lst] for cmd, lst in cmd_map.items()}
    forb = tuple(dict.fromkeys(d_forb + e_forb))
    R = Presentation(f"R({m.name})", "AMALGAM", r_gens, r_rels, ZERO, frozenset(), forb, r_map,
                     meta={"D": d_gens, "E": e_gens, "U": U})
    for p in (D, E, R):
        p.validate()
    return Amalgam(D, E, U, R)


# -- dispatch ----------------------------------------------------------------

def emit(variant: str, m: MinskyMachine, **flags) -> Presentation:
    if variant == "S1":
        return emit_s1(m)
    if variant == "S2R":
        return emit_s2_right(m, **flags)
    if variant == "S2L":
        return emit_s2_left(m, **flags)
    if variant == "S1'":
        return emit_s1_prime(m, **flags)
    if variant == "S2R'":
        return emit_s2_prime(m, **flags)
    if variant in ("S3R", "S5R"):
        return emit_sk_right(m, int(variant[1]))
    if variant == "AMALGAM":
        return emit_amalgam(m, **flags).R
    raise ValueError(f"unknown variant {variant}")


# -- quasi-identities --------------------------------------------------------

@dataclass
class QuasiIdentity:
    premises: list[tuple[Word, Word]]
    conclusion: tuple[Word, Word]
    variables: tuple[str, ...]

    def __str__(self) -> str:
        prem = " & ".join(f"{fmt(u)}={fmt(v)}" for u, v in self.premises)
        return f"{prem} -> {fmt(self.conclusion[0])} = {fmt(self.conclusion[1])}"


def emit_quasi_identity(p: Presentation, c: Configuration) -> QuasiIdentity:
    if c.label != 1:
        raise ValueError("input configurations start at label 1")
    if p.variant not in PRIMED:
        raise ValueError("quasi-identities are emitted for primed presentations")
    prem = [(r.lhs, r.rhs) for r in p.all_relations()]
    return QuasiIdentity(prem, (config_word(p.variant, c, 0), (ZERO,)), p.generators)


# -- interchange file --------------------------------------------------------

def dumps(p: Presentation) -> str:
    lines = [f"# presentation {p.name} variant={p.variant}", "[generators]", fmt(p.generators),
             "[zero]", p.zero or "", "[commuting]"]
    pairs = sorted(tuple(sorted(pair, key=p.index.get)) for pair in p.commuting)
    pairs.sort(key=lambda xy: (p.index[xy[0]], p.index[xy[1]]))
    lines += [fmt(xy) for xy in pairs]
    lines.append("[relations]")
    lines += [str(r) for r in p.relations]
    lines.append("[forbidden]")
    lines += [fmt(f) for f in p.forbidden]
    return "\n".join(lines) + "\n"


def loads(text: str) -> Presentation:
    name, variant = "P", "?"
    sections: dict[str, list[str]] = {}
    cur = None
    for line in text.splitlines():
        if line.startswith("# presentation"):
            parts = line.split()
            name = parts[2]
            variant = parts[3].split("=", 1)[1] if len(parts) > 3 else "?"
            continue
        if line.startswith("[") and line.endswith("]"):
            cur = line[1:-1]
            sections[cur] = []
            continue
        if cur is not None:
            sections[cur].append(line)
    gens = tuple(sections.get("generators", [""])[0].split())
    zero = (sections.get("zero", [""])[0].strip() or None)
    com = frozenset(frozenset(l.split()) for l in sections.get("commuting", []) if l.strip())
    rels = []
    for l in sections.get("relations", []):
        if l.strip():
            lhs, rhs = l.split("=")
            rels.append(Relation(w(lhs), w(rhs)))
    forb = tuple(w(l) for l in sections.get("forbidden", []) if l.strip())
    return Presentation(name, variant, gens, rels, zero, com, forb)
