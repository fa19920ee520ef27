"""Word problem machinery for the generated presentations.

Words are kept in canonical form (lexicographically least representative
modulo the commuting pairs). Relation applications are matched against
canonical words up to commutation, so a relation side may occur as a
scattered but "convex" set of positions.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from . import kernels
from .machine import (BACKWARD, Configuration, Equivalent, MinskyMachine, NotEquivalent,
                      equivalent_configs, sym_orbit)
from .presentations import (PRIMED, ZERO, Presentation, Relation, Word,
                            config_word, decode_config_word)

ZW: Word = (ZERO,)
L2R, R2L = "L2R", "R2L"


class FuelExhausted(RuntimeError):
    pass


# -- trace-monoid helpers -------------------------------------------------------

def _dependent(p: Presentation, x: str, y: str) -> bool:
    return x == y or not p.commutes(x, y)


def occurrences(p: Presentation, word: Word, side: Word) -> list[tuple[int, ...]]:
    """Position sets S of ``word`` that read ``side`` after commuting letters aside."""
    k = len(side)
    n = len(word)
    if k == 0 or k > n:
        return []
    if not p.commuting:
        return [tuple(range(i, i + k)) for i in range(n - k + 1) if word[i:i + k] == side]
    target = p.canonical(side)
    found = []

    def extend(chosen: list[int], j: int):
        if j == k:
            s = tuple(sorted(chosen))
            if s not in found and _convex(p, word, s):
                if p.canonical(tuple(word[i] for i in s)) == target:
                    found.append(s)
            return
        letter = side[j]
        for i in range(n):
            if word[i] != letter or i in chosen:
                continue
            # letters of side that depend on each other keep their order
            if any(_dependent(p, side[jj], letter) and chosen[jj] > i for jj in range(j)):
                continue
            chosen.append(i)
            extend(chosen, j + 1)
            chosen.pop()

    extend([], 0)
    found.sort()
    return found


def _convex(p: Presentation, word: Word, s: tuple[int, ...]) -> bool:
    """No dependency path leaves ``s`` and comes back into it."""
    members = set(s)
    lo, hi = s[0], s[-1]
    fwd = set()
    for t in range(lo + 1, hi):
        if t not in members and any(
                _dependent(p, word[u], word[t]) for u in range(lo, t) if u in members or u in fwd):
            fwd.add(t)
    back = set()
    for t in range(hi - 1, lo, -1):
        if t not in members and any(
                _dependent(p, word[t], word[u]) for u in range(t + 1, hi + 1) if u in members or u in back):
            back.add(t)
    return not (fwd & back)


def replace(p: Presentation, word: Word, s: tuple[int, ...], new: Word) -> Word:
    """Cut the convex set ``s`` out of ``word`` and insert ``new`` in its place."""
    if ZERO in new:
        return ZW
    if not p.commuting:
        return tuple(word[:s[0]]) + tuple(new) + tuple(word[s[-1] + 1:])
    members = set(s)
    lo = s[0]
    after = set()
    for t in range(lo + 1, len(word)):
        if t in members:
            continue
        if any(_dependent(p, word[u], word[t]) for u in range(lo, t) if u in members or u in after):
            after.add(t)
    before = [word[t] for t in range(len(word)) if t not in members and t not in after]
    rest = [word[t] for t in range(len(word)) if t in after]
    return p.canonical(tuple(before) + tuple(new) + tuple(rest))


def is_factor_mod_commuting(p: Presentation, u: Word, w: Word) -> bool:
    return bool(occurrences(p, p.canonical(w), tuple(u)))


def factors_mod_commuting(p: Presentation, word: Word) -> set[Word]:
    """Every factor, up to commutation, of ``word`` (canonical forms)."""
    n = len(word)
    if not p.commuting:
        return {tuple(word[i:j]) for i in range(n) for j in range(i + 1, n + 1)}
    preds = [0] * n
    for j in range(n):
        for i in range(j):
            if _dependent(p, word[i], word[j]):
                preds[j] |= 1 << i
    ideals = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for ideal in frontier:
            for j in range(n):
                if not ideal >> j & 1 and preds[j] & ~ideal == 0:
                    bigger = ideal | 1 << j
                    if bigger not in ideals:
                        ideals.add(bigger)
                        nxt.append(bigger)
        frontier = nxt
    out = set()
    for lo in ideals:
        for hi in ideals:
            if hi != lo and lo & hi == lo:
                diff = hi & ~lo
                out.add(p.canonical(tuple(word[i] for i in range(n) if diff >> i & 1)))
    return out


# -- zero detection / normalize ----------------------------------------------

def _zero_relations(p: Presentation) -> list[tuple[int, Relation]]:
    return [(i, r) for i, r in enumerate(p.all_relations()) if r.rhs == ZW]


def zero_witness(p: Presentation, word: Word):
    """A (relation index, occurrence) showing ``word`` equals Zero, or None."""
    if ZERO in word:
        return (-1, ())
    zr = _zero_relations(p)
    pairs = {r.lhs: i for i, r in zr if len(r.lhs) == 2}
    if pairs:
        idx = p.index
        present = kernels.two_factors([idx[x] for x in word], p.commute_matrix)
        hits = sorted(pairs[(p.generators[a], p.generators[b])] for a, b in present
                      if (p.generators[a], p.generators[b]) in pairs)
        if hits:
            i = hits[0]
            occ = occurrences(p, word, p.all_relations()[i].lhs)
            return (i, occ[0])
    for i, r in zr:
        if len(r.lhs) != 2:
            occ = occurrences(p, word, r.lhs)
            if occ:
                return (i, occ[0])
    return None


def normalize(p: Presentation, word: Word) -> Word:
    p.check_word(word)
    cw = p.canonical(tuple(word))
    if zero_witness(p, cw) is not None:
        return ZW
    return cw


# -- derivations ---------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    relation: int
    position: int
    direction: str

    def __str__(self) -> str:
        return f"({self.relation}, {self.position}, {self.direction})"


@dataclass
class Derivation:
    """``left`` rewrites u and ``right`` rewrites v; both end at the same word."""

    left: list[Step] = field(default_factory=list)
    right: list[Step] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.left) + len(self.right)

    def dumps(self) -> str:
        lines = [str(s) for s in self.left]
        if self.right:
            lines.append("--")
            lines += [str(s) for s in self.right]
        return "\n".join(lines) + ("\n" if lines else "")


def apply_step(p: Presentation, word: Word, step: Step) -> Word:
    rels = p.all_relations()
    r = rels[step.relation]
    src, dst = (r.lhs, r.rhs) if step.direction == L2R else (r.rhs, r.lhs)
    if word == ZW:
        raise ValueError("cannot rewrite the zero word")
    for s in occurrences(p, word, src):
        if s[0] == step.position:
            return replace(p, word, s, dst)
    raise ValueError(f"relation {step.relation} ({r}) does not occur at {step.position} in {word}")


def replay(p: Presentation, word: Word, steps) -> Word:
    cur = p.canonical(tuple(word))
    for st in steps:
        cur = apply_step(p, cur, st)
    return cur


def check_derivation(p: Presentation, u: Word, v: Word, d: Derivation) -> bool:
    return replay(p, u, d.left) == replay(p, v, d.right)


@dataclass
class Equal:
    derivation: Derivation


@dataclass
class Distinct:
    reason: str


@dataclass
class Unknown:
    fuel_spent: int


def neighbors(p: Presentation, word: Word):
    """(Step, result) for every single relation application, canonical order."""
    if word == ZW:
        return
    for i, r in enumerate(p.relations):
        if r.rhs == ZW:
            continue
        for direction, src, dst in ((L2R, r.lhs, r.rhs), (R2L, r.rhs, r.lhs)):
            for s in occurrences(p, word, src):
                yield Step(i, s[0], direction), replace(p, word, s, dst)
    zw = zero_witness(p, word)
    if zw is not None and zw[0] >= 0:
        yield Step(zw[0], zw[1][0], L2R), ZW


def _trace_to_steps(p: Presentation, variant: str, trace, start: Word) -> tuple[list[Step], Word]:
    steps = []
    cur = start
    rels = p.all_relations()
    for ts in trace.steps:
        want = p.canonical(config_word(variant, ts.target))
        done = False
        for ri in p.command_relations.get(ts.command, []):
            r = rels[ri]
            direction = L2R if ts.direction != BACKWARD else R2L
            src, dst = (r.lhs, r.rhs) if direction == L2R else (r.rhs, r.lhs)
            for s in occurrences(p, cur, src):
                nxt = replace(p, cur, s, dst)
                if nxt == want:
                    steps.append(Step(ri, s[0], direction))
                    cur = nxt
                    done = True
                    break
            if done:
                break
        if not done:
            raise RuntimeError(f"no relation realises {ts.command.to_dsl()} on {cur}")
    return steps, cur


def _stop_relation(p: Presentation) -> int | None:
    for i, r in enumerate(p.relations):
        if r.lhs == ("q0",) and r.rhs == ZW:
            return i
    return None


def _config_variant(p: Presentation) -> str | None:
    if p.variant in ("S1", "S2R", "S2L", "S3R", "S5R"):
        return p.variant
    return None


def _decode(p: Presentation, word: Word) -> Configuration | None:
    variant = _config_variant(p)
    if variant is None:
        return None
    if variant == "S2L":
        return decode_config_word("S2R", p.canonical(word[::-1]))
    return decode_config_word(variant, word)


def _to_zero(p, m, c: Configuration, start: Word, fuel: int):
    """Derivation start -> Zero via a path to a stop configuration, or a verdict."""
    stop = _stop_relation(p)
    parent, complete = sym_orbit(m, c, fuel, until=lambda x: x.label == 0)
    stops = [x for x in parent if x.label == 0]
    if stops and stop is not None:
        from .machine import _path
        trace = _path(parent, stops[0], c)
        steps, end = _trace_to_steps(p, _config_variant(p), trace, start)
        pos = end.index("q0")
        return steps + [Step(stop, pos, L2R)]
    if complete:
        return False
    return None


def decide_equal(p: Presentation, m: MinskyMachine, u: Word, v: Word, fuel: int):
    p.check_word(u)
    p.check_word(v)
    cu, cv = p.canonical(tuple(u)), p.canonical(tuple(v))
    if cu == cv:
        return Equal(Derivation())
    zu, zv = zero_witness(p, cu), zero_witness(p, cv)

    def zstep(word, z):
        return [] if word == ZW else [Step(z[0], z[1][0], L2R)]

    if zu is not None and zv is not None:
        return Equal(Derivation(zstep(cu, zu), zstep(cv, zv)))

    du = None if zu is not None else _decode(p, cu)
    dv = None if zv is not None else _decode(p, cv)
    if (du is not None or zu is not None) and (dv is not None or zv is not None) \
            and _config_variant(p) is not None:
        return _decide_configs(p, m, cu, cv, du, dv, zu, zv, fuel)
    return _bfs_equal(p, cu, cv, fuel)


def _decide_configs(p, m, cu, cv, du, dv, zu, zv, fuel):
    if len((du or dv).glasses) != m.glasses:
        raise ValueError(f"presentation {p.name} does not match machine {m.name}")
    if zu is not None or zv is not None:
        zero_side = zu if zu is not None else zv
        word, c = (cv, dv) if zu is not None else (cu, du)
        zs = [Step(zero_side[0], zero_side[1][0], L2R)] if zero_side[0] >= 0 else []
        r = _to_zero(p, m, c, word, fuel)
        if r is None:
            return Unknown(fuel)
        if r is False:
            return Distinct(f"{c} never reaches a stop configuration (orbit exhausted)")
        return Equal(Derivation(zs, r) if zu is not None else Derivation(r, zs))
    verdict = equivalent_configs(m, du, dv, fuel)
    if isinstance(verdict, Equivalent):
        steps, end = _trace_to_steps(p, _config_variant(p), verdict.witness, cu)
        assert end == cv
        return Equal(Derivation(steps))
    au = _to_zero(p, m, du, cu, fuel)
    av = _to_zero(p, m, dv, cv, fuel)
    if au not in (None, False) and av not in (None, False):
        return Equal(Derivation(au, av))
    if isinstance(verdict, NotEquivalent) and (au is False or av is False):
        return Distinct(f"{du} and {dv} are not equivalent and not both accepted")
    if au is False and av is False:
        return Distinct(f"{du} and {dv} are inequivalent")
    return Unknown(fuel)


def _bfs_equal(p: Presentation, cu: Word, cv: Word, fuel: int):
    """Bidirectional BFS over relation applications."""
    par_u = {cu: None}
    par_v = {cv: None}
    qu, qv = deque([cu]), deque([cv])
    spent = 0

    def path(par, word):
        steps = []
        while par[word] is not None:
            prev, st = par[word]
            steps.append(st)
            word = prev
        return steps[::-1]

    while qu or qv:
        for par, other, q in ((par_u, par_v, qu), (par_v, par_u, qv)):
            if not q:
                continue
            if spent >= fuel:
                return Unknown(spent)
            word = q.popleft()
            spent += 1
            for st, nxt in neighbors(p, word):
                if nxt in par:
                    continue
                par[nxt] = (word, st)
                if nxt in other:
                    left = path(par_u, nxt)
                    right = path(par_v, nxt)
                    return Equal(Derivation(left, right))
                q.append(nxt)
        if not qu:
            return Distinct(f"closure of {' '.join(cu)} exhausted ({len(par_u)} words)")
        if not qv:
            return Distinct(f"closure of {' '.join(cv)} exhausted ({len(par_v)} words)")
    return Unknown(spent)


def derivation_length(p, m, u, v, fuel) -> int | None:
    verdict = decide_equal(p, m, u, v, fuel)
    if isinstance(verdict, Equal):
        return len(verdict.derivation)
    return None


# -- divisors ----------------------------------------------------------------

@dataclass
class FuelExceeded:
    explored: int


class ZeroWord(ValueError):
    pass


@dataclass
class DivisorSet:
    closure: set[Word]
    factors: set[Word]
    classes: list[list[Word]]   # equality classes of factors, canonical order

    def __contains__(self, word) -> bool:
        return word in self.factors

    def __len__(self) -> int:
        return len(self.classes)


def word_closure(p: Presentation, word: Word, fuel: int):
    """Words reachable by relation applications; (set, complete, hit_zero)."""
    start = p.canonical(tuple(word))
    seen = {start}
    queue = deque([start])
    while queue:
        if len(seen) > fuel:
            return seen, False, False
        cur = queue.popleft()
        for _, nxt in neighbors(p, cur):
            if nxt == ZW:
                return seen, True, True
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen, True, False


def divisor_set(p: Presentation, m: MinskyMachine | None, word: Word, fuel: int):
    closure, complete, zero = word_closure(p, word, fuel)
    if zero:
        raise ZeroWord(f"{' '.join(word)} equals zero in {p.name}")
    if not complete:
        return FuelExceeded(len(closure))
    factors = set()
    for x in closure:
        factors |= factors_mod_commuting(p, x)
    # classes: connected components under single relation applications
    parent = {f: f for f in factors}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for f in sorted(factors, key=lambda x: (len(x), x)):
        for _, g in neighbors(p, f):
            if g == ZW or g not in factors:
                raise RuntimeError(f"divisor set not closed at {f} -> {g}")
            a, b = find(f), find(g)
            if a != b:
                parent[max(a, b, key=lambda x: (len(x), x))] = min(a, b, key=lambda x: (len(x), x))
    groups: dict[Word, list[Word]] = {}
    for f in factors:
        groups.setdefault(find(f), []).append(f)
    classes = [sorted(g, key=lambda x: (len(x), x)) for g in groups.values()]
    classes.sort(key=lambda g: (len(g[0]), g[0]))
    return DivisorSet(closure, factors, classes)


# -- confluent rewriting (amalgam) ---------------------------------------------

def _rules_by_head(p: Presentation) -> dict[str, list[tuple[int, Word, Word]]]:
    rules = p.meta.get("_rules_by_head")
    if rules is None:
        rules = {}
        for i, r in enumerate(p.all_relations()):
            rules.setdefault(r.lhs[0], []).append((i, r.lhs, r.rhs))
        p.meta["_rules_by_head"] = rules
    return rules


def _redexes(p: Presentation, word: Word):
    """(start, end, rule index, replacement) for every oriented rule occurrence."""
    rules = _rules_by_head(p)
    out = []
    for s, x in enumerate(word):
        for i, lhs, rhs in rules.get(x, ()):
            k = len(lhs)
            if word[s:s + k] == lhs:
                out.append((s, s + k, i, rhs))
    out.sort(key=lambda t: (t[2], t[0]))
    return out


def rewrite_confluent(p: Presentation, word: Word, fuel: int, rng: random.Random | None = None,
                      trace: list | None = None) -> Word:
    """Apply the relations left-to-right (and w -> 0) until none applies.

    Default strategy: leftmost-innermost redex. With ``rng`` a random redex is
    picked at each step.
    """
    if p.commuting:
        raise ValueError("confluent rewriting is defined for the amalgam presentation")
    cur = tuple(word)
    for _ in range(fuel + 1):
        if ZERO in cur:
            return ZW
        red = _redexes(p, cur)
        if not red:
            return cur
        if rng is None:
            s, e, i, rhs = min(red, key=lambda x: (x[1], x[0], x[2]))
        else:
            s, e, i, rhs = rng.choice(red)
        if trace is not None:
            trace.append(Step(i, s, L2R))
        cur = cur[:s] + tuple(rhs) + cur[e:]
    raise FuelExhausted(f"no normal form within {fuel} steps")


def oriented_derivation(p: Presentation, u: Word, v: Word, max_steps: int,
                        skip_zero: bool = True) -> list[Step] | None:
    """Shortest left-to-right rewriting u ->* v using the non-zero relations."""
    u, v = tuple(u), tuple(v)
    par = {u: None}
    frontier = [u]
    for _ in range(max_steps):
        nxt = []
        for word in frontier:
            for s, e, i, rhs in _redexes(p, word):
                if skip_zero and rhs == ZW:
                    continue
                w2 = word[:s] + tuple(rhs) + word[e:]
                if w2 in par:
                    continue
                par[w2] = (word, Step(i, s, L2R))
                if w2 == v:
                    steps = []
                    while par[w2] is not None:
                        w2, st = par[w2]
                        steps.append(st)
                    return steps[::-1]
                nxt.append(w2)
        frontier = nxt
    return None
