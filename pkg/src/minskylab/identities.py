"""Identities, Zimin words, isoterms and the two variety conditions."""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import finite

Word = tuple[str, ...]

_TOKEN = re.compile(r"\s*([A-Za-z][0-9]*|\(|\))(?:\^(\d+))?")


def parse_word(text: str) -> Word:
    """``x1^2 x2``, ``xxyy`` or ``x^2y^2``; letters with trailing digits are one variable."""
    text = text.strip()
    out: list[str] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace() or text[pos] == "*":
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.group(1) in "()":
            raise ValueError(f"cannot parse word {text!r} at column {pos + 1}")
        out += [m.group(1)] * int(m.group(2) or 1)
        pos = m.end()
    if not out:
        raise ValueError("empty word")
    return tuple(out)


def fmt_word(w: Sequence[str]) -> str:
    out = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        out.append(w[i] + (f"^{j - i}" if j - i > 1 else ""))
        i = j
    sep = " " if any(len(x) > 1 for x in w) else ""
    return sep.join(out)


@dataclass(frozen=True)
class Identity:
    u: Word
    v: Word

    @classmethod
    def parse(cls, text: str) -> "Identity":
        if text.count("=") != 1:
            raise ValueError(f"identity needs exactly one '=': {text!r}")
        a, b = text.split("=")
        return cls(parse_word(a), parse_word(b))

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(self.u + self.v))

    @property
    def n(self) -> int:
        return len(self.variables)

    def reversed(self) -> "Identity":
        return Identity(self.u[::-1], self.v[::-1])

    def rename(self, mapping: dict) -> "Identity":
        return Identity(tuple(mapping[x] for x in self.u), tuple(mapping[x] for x in self.v))

    def __str__(self) -> str:
        return f"{fmt_word(self.u)} = {fmt_word(self.v)}"


def zimin(n: int) -> Word:
    if n < 1:
        raise ValueError("n >= 1")
    z: Word = ("x1",)
    for k in range(2, n + 1):
        z = z + (f"x{k}",) + z
    return z


def is_balanced(e: Identity) -> bool:
    return Counter(e.u) == Counter(e.v)


def _matches(side: Word, f: Sequence[str]):
    """Every substitution phi with phi(side) == f (nonempty images)."""
    side = tuple(side)
    f = tuple(f)

    def go(i: int, pos: int, phi: dict):
        if i == len(side):
            if pos == len(f):
                yield dict(phi)
            return
        x = side[i]
        rest = len(side) - i - 1
        if x in phi:
            img = phi[x]
            if f[pos:pos + len(img)] == img:
                yield from go(i + 1, pos + len(img), phi)
            return
        for end in range(pos + 1, len(f) - rest + 1):
            phi[x] = f[pos:end]
            yield from go(i + 1, end, phi)
            del phi[x]

    yield from go(0, 0, {})


def _apply(phi: dict, w: Word) -> Word:
    return tuple(y for x in w for y in phi[x])


def isoterm_witness(W: Sequence[str], e: Identity):
    """(factor, side, phi) showing W is not an isoterm for e, or None."""
    W = tuple(W)
    for side, other in ((e.u, e.v), (e.v, e.u)):
        extra = [x for x in dict.fromkeys(other) if x not in side]
        for i in range(len(W)):
            for j in range(i + len(side), len(W) + 1):
                fac = W[i:j]
                for phi in _matches(side, fac):
                    # letters outside W keep phi(other) != phi(side) whenever other has extra variables
                    full = phi | {x: (f"#{x}",) for x in extra}
                    if _apply(full, side) != _apply(full, other):
                        return fac, side, full
    return None


def is_isoterm(W: Sequence[str], e: Identity) -> bool:
    return isoterm_witness(W, e) is None


def as_letters(w) -> Word:
    return tuple(w) if not isinstance(w, str) else (tuple(w) if " " not in w else tuple(w.split()))


def zimin_isoterm_for_all(sigma: Sequence[Identity]) -> bool:
    if not sigma:
        return True
    n = max(e.n for e in sigma)
    z = zimin(n + 1)
    return all(is_isoterm(z, e) for e in sigma)


def satisfies_all(f: finite.FiniteSemigroup, sigma: Iterable[Identity], budget: int = finite.EVAL_BUDGET) -> bool:
    return all(finite.eval_identity(f, e.u, e.v, budget)[0] for e in sigma)


def _witnesses_thm4():
    b = finite.builtin
    return {
        "M1 (T)": b("T"),
        "M2-right (P_left x P1_right)": finite.direct_product(b("P_left"), b("P1_right")),
        "M2-left (P1_left x P_right)": finite.direct_product(b("P1_left"), b("P_right")),
    }


def _witnesses_thm5():
    b = finite.builtin
    return {
        "T": b("T"),
        "P1_right x P_left": finite.direct_product(b("P1_right"), b("P_left")),
        "P_right x P1_left": finite.direct_product(b("P_right"), b("P1_left")),
    }


@dataclass
class ConditionReport:
    value: bool
    clauses: dict

    def lines(self) -> list[str]:
        return [f"{k}: {v}" for k, v in self.clauses.items()] + [f"value: {self.value}"]


def theorem4_condition(sigma: Sequence[Identity], budget: int = finite.EVAL_BUDGET) -> ConditionReport:
    """Condition (4) for a non-periodic variety: excludes the three varieties, Z_{n+1} an isoterm.

    The variety generated by A x N lies in var(Sigma) iff A satisfies Sigma and
    every identity is balanced.
    """
    balanced = all(is_balanced(e) for e in sigma)
    clauses = {"all_balanced": balanced}
    contained = False
    for name, a in _witnesses_thm4().items():
        inside = balanced and satisfies_all(a, sigma, budget)
        clauses[f"contains {name}"] = inside
        contained |= inside
    z = zimin_isoterm_for_all(sigma)
    clauses["zimin_isoterm"] = z
    return ConditionReport((not contained) and z, clauses)


def theorem5_condition(sigma: Sequence[Identity], flip: bool = False,
                       budget: int = finite.EVAL_BUDGET) -> ConditionReport:
    """Condition (2): Z_{n+1} not an isoterm, and periodic or avoiding the three witnesses.

    ``flip`` asks for Z_{n+1} to be an isoterm instead, the reading suggested
    by the proof sketch that accompanies the statement.
    """
    z = zimin_isoterm_for_all(sigma)
    zimin_clause = z if flip else not z
    periodic = any(not is_balanced(e) for e in sigma)
    clauses = {"zimin_isoterm": z, "zimin_clause": zimin_clause, "periodic": periodic}
    avoid = True
    for name, a in _witnesses_thm5().items():
        sat = satisfies_all(a, sigma, budget)
        clauses[f"satisfied by {name}"] = sat
        avoid &= not sat
    clauses["avoids_witnesses"] = avoid
    return ConditionReport(zimin_clause and (periodic or avoid), clauses)


def loads_identities(text: str) -> list[Identity]:
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(Identity.parse(line))
    return out


def dumps_identities(sigma: Sequence[Identity]) -> str:
    return "".join(f"{e}\n" for e in sigma)
