"""Finite semigroups given by multiplication tables."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .presentations import ZERO, Presentation, QuasiIdentity, Word
from .rewrite import DivisorSet, FuelExceeded, ZeroWord, divisor_set

EVAL_BUDGET = 10 ** 7


class NotAssociative(ValueError):
    def __init__(self, triple):
        super().__init__(f"(ab)c != a(bc) for (a, b, c) = {triple}")
        self.triple = triple


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class FiniteSemigroup:
    elements: tuple[str, ...]
    table: np.ndarray
    zero: int | None = None
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._index = {e: i for i, e in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def index(self, name: str) -> int:
        return self._index[name]

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def product(self, xs: Iterable[int]) -> int:
        it = iter(xs)
        v = next(it)
        for x in it:
            v = int(self.table[v, x])
        return v

    def power(self, x: int, k: int) -> int:
        return self.product([x] * k)

    def times(self, a: str, b: str) -> str:
        return self.elements[self.mul(self.index(a), self.index(b))]

    def identity(self) -> int | None:
        n = len(self)
        for e in range(n):
            if all(self.table[e, x] == x and self.table[x, e] == x for x in range(n)):
                return e
        return None

    def is_group(self) -> bool:
        e = self.identity()
        if e is None:
            return False
        return all(any(self.table[x, y] == e for y in range(len(self))) for x in range(len(self)))


def make_finite_semigroup(elements: Sequence[str], table, zero: str | int | None = None,
                          name: str = "") -> FiniteSemigroup:
    elements = tuple(str(e) for e in elements)
    t = np.asarray(table, dtype=np.int64)
    n = len(elements)
    if t.shape != (n, n):
        raise ValueError(f"table must be {n}x{n}, got {t.shape}")
    if n and (t.min() < 0 or t.max() >= n):
        raise ValueError("table entries out of range")
    bad = kernels.check_assoc(t)
    if bad is not None:
        raise NotAssociative(tuple(elements[i] for i in bad))
    z = elements.index(zero) if isinstance(zero, str) else zero
    if z is not None and not (np.all(t[z, :] == z) and np.all(t[:, z] == z)):
        raise ValueError(f"{elements[z]} is not a zero")
    return FiniteSemigroup(elements, t, z, name)


def from_function(elements: Sequence, op, zero=None, name: str = "") -> FiniteSemigroup:
    elements = list(elements)
    idx = {e: i for i, e in enumerate(elements)}
    table = [[idx[op(a, b)] for b in elements] for a in elements]
    z = idx[zero] if zero is not None else None
    return make_finite_semigroup([_name(e) for e in elements], table, z, name)


def _name(e) -> str:
    if isinstance(e, tuple):
        return "(" + ",".join(_name(x) for x in e) + ")"
    return str(e)


def direct_product(f1: FiniteSemigroup, f2: FiniteSemigroup) -> FiniteSemigroup:
    n1, n2 = len(f1), len(f2)
    pairs = [(a, b) for a in range(n1) for b in range(n2)]
    table = np.empty((n1 * n2, n1 * n2), dtype=np.int64)
    for i, (a, b) in enumerate(pairs):
        for j, (c, d) in enumerate(pairs):
            table[i, j] = f1.table[a, c] * n2 + f2.table[b, d]
    names = [f"({f1.elements[a]},{f2.elements[b]})" for a, b in pairs]
    zero = None
    if f1.zero is not None and f2.zero is not None:
        zero = f1.zero * n2 + f2.zero
    return make_finite_semigroup(names, table, zero, f"{f1.name}x{f2.name}")


# -- small built-in semigroups -------------------------------------------------

def _matrix_units(units: list[str], with_one: bool, name: str) -> FiniteSemigroup:
    def op(x, y):
        if x == "1":
            return y
        if y == "1":
            return x
        if x == "0" or y == "0":
            return "0"
        if x[2] != y[1]:
            return "0"
        return f"e{x[1]}{y[2]}"

    elems = (["1"] if with_one else []) + units + ["0"]
    return from_function(elems, op, zero="0", name=name)


BUILTINS = ("T", "P_right", "P_left", "P1_right", "P1_left")


def builtin(name: str) -> FiniteSemigroup:
    units = {"T": ["e11", "e12", "e22"], "P_right": ["e11", "e12"], "P_left": ["e11", "e21"],
             "P1_right": ["e11", "e12"], "P1_left": ["e11", "e21"]}
    if name not in units:
        raise ValueError(f"unknown built-in semigroup {name}; choose from {', '.join(BUILTINS)}")
    return _matrix_units(units[name], name.startswith("P1"), name)


def cyclic_group(n: int) -> FiniteSemigroup:
    """Z_n written multiplicatively: 1, g, g^2, ..."""
    f = from_function(range(n), lambda a, b: (a + b) % n, name=f"Z{n}")
    names = tuple("1" if k == 0 else "g" if k == 1 else f"g^{k}" for k in range(n))
    return FiniteSemigroup(names, f.table, None, f.name)


# -- structure -------------------------------------------------------------------

def ideal_generated(f: FiniteSemigroup, x: int) -> set[int]:
    """F¹ x F¹."""
    left = {x} | {int(f.table[a, x]) for a in range(len(f))}
    return left | {int(f.table[y, b]) for y in left for b in range(len(f))}


def is_zero_simple(f: FiniteSemigroup) -> bool:
    if f.zero is None:
        return False
    nonzero = [x for x in range(len(f)) if x != f.zero]
    if not nonzero:
        return False
    if all(f.table[a, b] == f.zero for a in range(len(f)) for b in range(len(f))):
        return False   # null semigroup
    target = set(nonzero)
    return all(target <= ideal_generated(f, x) for x in nonzero)


def nilpotency_degree(f: FiniteSemigroup) -> int | None:
    if f.zero is None:
        return None
    n = len(f)
    cur = set(range(n))
    for d in range(1, n + 2):
        if cur == {f.zero}:
            return d
        cur = {int(f.table[a, b]) for a in cur for b in range(n)}
    return None


def index_period(f: FiniteSemigroup, x: int) -> tuple[int, int]:
    """x^(i+p) = x^i with i, p least."""
    seen = {}
    k, y = 1, x
    while y not in seen:
        seen[y] = k
        y = f.mul(y, x)
        k += 1
    return seen[y], k - seen[y]


def idempotent_power_exponent(f: FiniteSemigroup) -> int:
    """Least m with x^m = x^{2m} for all x."""
    ips = [index_period(f, x) for x in range(len(f))]
    period = math.lcm(*(p for _, p in ips))
    top = max(i for i, _ in ips)
    return period * -(-top // period)


# -- Rees matrix semigroups ---------------------------------------------------

@dataclass
class ReesMatrix:
    group: FiniteSemigroup
    m: int                      # row indices i
    n: int                      # column indices j
    P: list[list[int | None]]   # P[i'][j], None = 0

    def validate(self):
        if not self.group.is_group():
            raise ValueError("ReesMatrix needs a group")
        if len(self.P) != self.m or any(len(r) != self.n for r in self.P):
            raise ValueError(f"P must be indexed P[i'][j] with {self.m} rows and {self.n} columns")
        for r in self.P:
            for x in r:
                if x is not None and not 0 <= x < len(self.group):
                    raise ValueError(f"P entry {x} is not a group element")


def rees_matrix_semigroup(r: ReesMatrix) -> FiniteSemigroup:
    r.validate()
    g = r.group
    triples = [(i, x, j) for i in range(r.m) for x in range(len(g)) for j in range(r.n)]
    elems = triples + ["0"]

    def op(a, b):
        if a == "0" or b == "0":
            return "0"
        i, x, j = a
        i2, y, j2 = b
        p = r.P[i2][j]
        if p is None:
            return "0"
        return (i, g.mul(g.mul(x, p), y), j2)

    names = [f"({i + 1},{g.elements[x]},{j + 1})" for i, x, j in triples] + ["0"]
    f = from_function(elems, op, zero="0", name="M0(G;P)")
    return FiniteSemigroup(tuple(names), f.table, f.zero, f.name)


# -- partial groups and split systems -----------------------------------------

@dataclass
class PartialGroup:
    """Elements 0..n-1 with identity 0; ``op[(a, b)]`` where defined."""

    size: int
    op: dict
    base: int | None = None     # elements 0..base-1 form the partial subgroup G
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.names:
            self.names = ("1",) + tuple(chr(ord("a") + i - 1) for i in range(1, self.size))

    def mul(self, a, b):
        return self.op.get((a, b))

    @property
    def G(self) -> list[int]:
        return list(range(self.base if self.base is not None else self.size))

    def products(self, xs: Iterable[int], ys: Iterable[int]) -> set[int]:
        return {self.op[(x, y)] for x in xs for y in ys if (x, y) in self.op}


def validate_partial_group(g: PartialGroup) -> list[str]:
    """Problems found; empty means valid."""
    issues = []
    n = g.size
    for x in range(n):
        if g.mul(0, x) != x or g.mul(x, 0) != x:
            issues.append(f"identity fails at {g.names[x]}")
        if not any(g.mul(x, y) == 0 and g.mul(y, x) == 0 for y in range(n)):
            issues.append(f"{g.names[x]} has no inverse")
    for a, b, c in itertools.product(range(n), repeat=3):
        ab, bc = g.mul(a, b), g.mul(b, c)
        if ab is None or bc is None:
            continue
        l, r = g.mul(ab, c), g.mul(a, bc)
        if l is not None and r is not None and l != r:
            issues.append(f"({g.names[a]}{g.names[b]}){g.names[c]} != {g.names[a]}({g.names[b]}{g.names[c]})")
    return issues


def triple_condition(g: PartialGroup, elems: Sequence[int]) -> bool:
    """(uv)w defined iff u(vw) defined, with equal values, for u, v, w in elems."""
    for u, v, w in itertools.product(elems, repeat=3):
        uv, vw = g.mul(u, v), g.mul(v, w)
        left = g.mul(uv, w) if uv is not None else None
        right = g.mul(u, vw) if vw is not None else None
        if left != right:
            return False
    return True


def enumerate_partial_groups(n: int) -> list[PartialGroup]:
    """All partial groups on {0..n-1} with identity 0 (labelled, not up to isomorphism)."""
    free = [(a, b) for a in range(1, n) for b in range(1, n)]
    out = []
    for vals in itertools.product([None] + list(range(n)), repeat=len(free)):
        op = {(0, x): x for x in range(n)} | {(x, 0): x for x in range(1, n)}
        op.update({k: v for k, v in zip(free, vals) if v is not None})
        g = PartialGroup(n, op)
        if not validate_partial_group(g):
            out.append(g)
    return out


class EnumerationTruncated(RuntimeError):
    pass


def enumerate_extensions(g: PartialGroup, bound: int, limit: int = 10 ** 6) -> list[PartialGroup]:
    """Partial groups G_i on at most ``bound`` elements containing G with G_i = G·G·G.

    G keeps the products it defines; products it leaves undefined may become
    defined in G_i. N(G_i) must be associative, which is the triple condition
    on G. Duplicates up to renaming of new elements are removed.
    """
    base = g.size
    found: dict[tuple, PartialGroup] = {}
    tried = 0
    open_cells = [(a, b) for a in range(1, base) for b in range(1, base) if (a, b) not in g.op]
    for total in range(base, bound + 1):
        if total > base and not open_cells:
            break   # G·G = G, so G·G·G = G
        new = list(range(base, total))
        cells = []
        for a in range(total):
            for b in range(total):
                if a == 0 or b == 0:
                    continue
                if a < base and b < base:
                    if (a, b) in g.op:
                        continue
                    cells.append(((a, b), [None] + list(range(total))))
                else:
                    cells.append(((a, b), [None] + list(range(total))))
        for vals in itertools.product(*[c[1] for c in cells]):
            tried += 1
            if tried > limit:
                raise EnumerationTruncated(f"more than {limit} candidate tables")
            op = dict(g.op)
            op.update({(0, x): x for x in range(total)})
            op.update({(x, 0): x for x in range(total)})
            op.update({c[0]: v for c, v in zip(cells, vals) if v is not None})
            cand = PartialGroup(total, op, base, g.names + tuple(f"n{i}" for i in range(1, total - base + 1)))
            G = list(range(base))
            ggg = cand.products(cand.products(G, G), G)
            if ggg != set(range(total)):
                continue
            if validate_partial_group(cand) or not triple_condition(cand, G):
                continue
            key = _canonical_key(cand, base)
            found.setdefault(key, cand)
    return list(found.values())


def _canonical_key(g: PartialGroup, base: int) -> tuple:
    new = list(range(base, g.size))
    best = None
    for perm in itertools.permutations(new):
        ren = {x: x for x in range(base)} | dict(zip(new, perm))
        key = tuple(sorted((ren[a], ren[b], ren[v]) for (a, b), v in g.op.items()))
        if best is None or key < best:
            best = key
    return (g.size, best)


def split_system_semigroup(gi: PartialGroup) -> FiniteSemigroup:
    """N(G_i): blocks {1}xGx{2}, {2}xGx{3}, {3}xGx{4}, {1}x(GG)x{3}, {2}x(GG)x{4}, {1}xG_ix{4}, and 0."""
    if validate_partial_group(gi):
        raise ValueError("not a partial group: " + "; ".join(validate_partial_group(gi)))
    G = gi.G
    GG = sorted(gi.products(G, G))
    blocks = {(1, 2): G, (2, 3): G, (3, 4): G, (1, 3): GG, (2, 4): GG, (1, 4): list(range(gi.size))}
    elems = [(i, u, j) for (i, j), us in blocks.items() for u in us] + ["0"]
    members = set(elems)

    def op(x, y):
        if x == "0" or y == "0" or x[2] != y[0]:
            return "0"
        uv = gi.mul(x[1], y[1])
        if uv is None:
            return "0"
        z = (x[0], uv, y[2])
        return z if z in members else "0"

    f = from_function(elems, op, zero="0", name="N(G)")
    names = tuple(f"({i},{gi.names[u]},{j})" for i, u, j in elems[:-1]) + ("0",)
    return FiniteSemigroup(names, f.table, f.zero, "N(G)")


# -- Rees quotients of presentations ------------------------------------------

def rees_quotient(p: Presentation, m, w: Word, fuel: int, check_relations: bool = True):
    """S/J where J is the ideal of words that do not divide ``w``."""
    ds = divisor_set(p, m, w, fuel)
    if isinstance(ds, FuelExceeded):
        return ds
    cls = {x: i for i, group in enumerate(ds.classes) for x in group}
    n = len(ds.classes)
    zero = n
    table = np.full((n + 1, n + 1), zero, dtype=np.int64)
    for a, ga in enumerate(ds.classes):
        for b, gb in enumerate(ds.classes):
            prod = p.canonical(ga[0] + gb[0])
            table[a, b] = cls.get(prod, zero)
    if check_relations:
        # representatives must not matter
        for a, ga in enumerate(ds.classes):
            for b, gb in enumerate(ds.classes):
                for x in ga[:4]:
                    for y in gb[:4]:
                        if cls.get(p.canonical(x + y), zero) != table[a, b]:
                            raise RuntimeError(f"product depends on representatives: {x} {y}")
    names = [".".join(g[0]) for g in ds.classes] + ["0"]
    f = make_finite_semigroup(names, table, zero, f"{p.name}/J({' '.join(w)})")
    f.meta["classes"] = ds.classes
    f.meta["class_of"] = cls
    f.meta["presentation"] = p
    if check_relations:
        _check_relations(f, p)
    return f


def element_of(f: FiniteSemigroup, word: Word) -> int:
    """Image of a word in a Rees quotient built by ``rees_quotient``."""
    p = f.meta["presentation"]
    if ZERO in word:
        return f.zero
    return f.meta["class_of"].get(p.canonical(tuple(word)), f.zero)


def _check_relations(f: FiniteSemigroup, p: Presentation):
    gen = generator_assignment(f)
    for r in p.all_relations():
        lhs, rhs = _eval_word(f, gen, r.lhs), _eval_word(f, gen, r.rhs)
        if lhs != rhs:
            raise RuntimeError(f"quotient violates relation {r}")


def generator_assignment(f: FiniteSemigroup) -> dict[str, int]:
    p = f.meta["presentation"]
    return {g: element_of(f, (g,)) for g in p.generators}


def _eval_word(f: FiniteSemigroup, assign: dict, word: Word) -> int:
    if ZERO in word:
        if f.zero is None:
            raise ValueError("word uses Zero but the semigroup has no zero")
        return f.zero
    return f.product(assign[x] for x in word)


# -- identities ---------------------------------------------------------------

def _compile_words(words, variables):
    idx = {v: i for i, v in enumerate(variables)}
    return [[-1 if x == ZERO else idx[x] for x in wd] for wd in words]


def _check_budget(f: FiniteSemigroup, nvars: int, budget: int):
    if len(f) ** nvars > budget:
        raise BudgetExceeded(f"{len(f)}^{nvars} assignments exceed the budget {budget}")


def eval_identity(f: FiniteSemigroup, u: Sequence[str], v: Sequence[str], budget: int = EVAL_BUDGET):
    """True iff u = v holds under every assignment; returns (holds, counterexample)."""
    variables = sorted(set(u) | set(v) - {ZERO})
    if ZERO in (*u, *v) and f.zero is None:
        raise ValueError("identity uses Zero but the semigroup has no zero")
    _check_budget(f, len(variables), budget)
    cu, cv = _compile_words([u, v], variables)
    bad = kernels.find_counterexample(f.table, len(variables), [], (cu, cv), f.zero)
    if bad is None:
        return True, None
    return False, {x: f.elements[a] for x, a in zip(variables, bad)}


def eval_quasi_identity(f: FiniteSemigroup, q: QuasiIdentity, budget: int = EVAL_BUDGET,
                        hints: Sequence[dict] = ()):
    """Returns (holds, counterexample).

    Assignments in ``hints`` (and, for Rees quotients, the natural generator
    assignment) are tried first; exhaustive search is only needed to prove truth.
    """
    variables = list(q.variables) if q.variables else sorted(
        {x for a, b in q.premises for x in (*a, *b)} | set(q.conclusion[0]) | set(q.conclusion[1]))
    variables = [x for x in variables if x != ZERO]
    uses_zero = any(ZERO in wd for pr in list(q.premises) + [q.conclusion] for wd in pr)
    if uses_zero and f.zero is None:
        raise ValueError("quasi-identity uses Zero but the semigroup has no zero")
    candidates = list(hints)
    if "presentation" in f.meta:
        candidates.insert(0, generator_assignment(f))
    for assign in candidates:
        if all(x in assign for x in variables):
            if all(_eval_word(f, assign, a) == _eval_word(f, assign, b) for a, b in q.premises) \
                    and _eval_word(f, assign, q.conclusion[0]) != _eval_word(f, assign, q.conclusion[1]):
                return False, {x: f.elements[assign[x]] for x in variables}
    _check_budget(f, len(variables), budget)
    prem = [tuple(_compile_words(pr, variables)) for pr in q.premises]
    concl = tuple(_compile_words(q.conclusion, variables))
    bad = kernels.find_counterexample(f.table, len(variables), prem, concl, f.zero)
    if bad is None:
        return True, None
    return False, {x: f.elements[a] for x, a in zip(variables, bad)}


def satisfies_power_law(f: FiniteSemigroup, m: int) -> bool:
    """x^m = x^{2m} for every x."""
    return all(f.power(x, m) == f.power(x, 2 * m) for x in range(len(f)))


# -- separating quotients -----------------------------------------------------

def separating_quotient_search(p: Presentation, m, u: Word, v: Word, order_bound: int = 2000,
                               fuel: int = 10 ** 4):
    """Smallest divisor-ideal Rees quotient separating u and v, as (F, order), or None."""
    if p.canonical(tuple(u)) == p.canonical(tuple(v)):
        raise ValueError("u and v are the same word")
    best = None
    for w in (u, v):
        if ZERO in w:
            continue
        f_ = None
        step = max(16, fuel // 64)
        budget = step
        while budget <= fuel:
            try:
                f_ = rees_quotient(p, m, w, budget)
            except ZeroWord:
                f_ = None
                break
            if not isinstance(f_, FuelExceeded):
                break
            f_ = None
            budget *= 4
        if f_ is None or len(f_) > order_bound:
            continue
        if element_of(f_, u) != element_of(f_, v) and (best is None or len(f_) < len(best)):
            best = f_
    return (best, len(best)) if best is not None else None


# -- table files ----------------------------------------------------------------

def dumps_table(f: FiniteSemigroup) -> str:
    lines = [" ".join(f.elements)]
    if f.zero is not None:
        lines.insert(0, f"# zero {f.elements[f.zero]}")
    for a in range(len(f)):
        lines.append(" ".join(f.elements[int(b)] for b in f.table[a]))
    return "\n".join(lines) + "\n"


def loads_table(text: str) -> FiniteSemigroup:
    zero = None
    rows = []
    for line in text.splitlines():
        if line.startswith("# zero "):
            zero = line[7:].strip()
        elif line.strip() and not line.startswith("#"):
            rows.append(line.split())
    names = rows[0]
    idx = {x: i for i, x in enumerate(names)}
    if len(rows) - 1 != len(names):
        raise ValueError(f"expected {len(names)} rows, got {len(rows) - 1}")
    table = [[idx[x] for x in r] for r in rows[1:]]
    return make_finite_semigroup(names, table, zero)
