"""Conway-style piecewise dilations simulating 2-glass machines.

Configuration (i;m,n) is coded as p_i 2^m 3^n with p_0 = 5, p_1 = 7, ...
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lcm

import numpy as np

from .machine import Configuration, Halted, MachineError, MinskyMachine, OutOfFuel, primes, pumping_witness, run


TABLE_LIMIT = 10 ** 6


class IntegralityError(ArithmeticError):
    pass


@lru_cache(maxsize=None)
def label_prime(i: int) -> int:
    return primes(i + 3)[i + 2]


@dataclass(frozen=True)
class Piece:
    require_divisors: frozenset
    forbid_divisors: frozenset
    factor: Fraction
    exact: int | None = None
    source: str = field(default="", compare=False)

    def admits(self, n: int) -> bool:
        if self.exact is not None:
            return n == self.exact
        return all(n % d == 0 for d in self.require_divisors) and \
            not any(n % d == 0 for d in self.forbid_divisors)

    def __str__(self) -> str:
        if self.exact is not None:
            cond = f"n = {self.exact}"
        else:
            cond = " and ".join([f"{d} | n" for d in sorted(self.require_divisors)]
                                + [f"{d} ∤ n" for d in sorted(self.forbid_divisors)])
        return f"({self.factor})·n  if {cond}"


def _overlap(a: Piece, b: Piece) -> bool:
    if a.exact is not None or b.exact is not None:
        if a.exact is not None and b.exact is not None:
            return a.exact == b.exact
        x, other = (a, b) if a.exact is not None else (b, a)
        return other.admits(x.exact)
    n = lcm(*a.require_divisors, *b.require_divisors)
    return not any(n % f == 0 for f in a.forbid_divisors | b.forbid_divisors)


@dataclass
class PiecewiseDilation:
    """Ordered pieces; n is left alone when no piece admits it."""

    pieces: list[Piece]
    machine: MinskyMachine | None = None
    label_primes: dict[int, int] = field(default_factory=dict)

    def check_disjoint(self):
        for i, a in enumerate(self.pieces):
            for b in self.pieces[i + 1:]:
                if _overlap(a, b):
                    raise MachineError(f"overlapping pieces: {a.source} / {b.source}")

    def piece_for(self, n: int) -> Piece | None:
        for pc in self._exact:
            if n == pc.exact:
                return pc
        # divisibility by any d | modulus only depends on n mod modulus
        r = n % self.modulus
        if self._table is not None:
            i = self._table[r]
            return self.pieces[i] if i >= 0 else None
        for pc in self.pieces:
            if pc.exact is None and pc.admits(r or self.modulus):
                return pc
        return None

    def __post_init__(self):
        self._exact = [pc for pc in self.pieces if pc.exact is not None]
        divs = [d for pc in self.pieces for d in pc.require_divisors | pc.forbid_divisors]
        self.modulus = lcm(*divs) if divs else 1
        self._table = None
        if self.modulus <= TABLE_LIMIT:
            r = np.arange(self.modulus, dtype=np.int64)
            table = np.full(self.modulus, -1, dtype=np.int64)
            # residue 0 stands for the modulus itself, which every divisor divides
            for i in reversed(range(len(self.pieces))):
                pc = self.pieces[i]
                if pc.exact is not None:
                    continue
                ok = np.ones(self.modulus, dtype=bool)
                for d in pc.require_divisors:
                    ok &= r % d == 0
                for d in pc.forbid_divisors:
                    ok &= r % d != 0
                table[ok] = i
            self._table = table.tolist()

    def __call__(self, n: int) -> int:
        return apply_kappa(self, n)


def encode_config(c: Configuration) -> int:
    if len(c.glasses) != 2:
        raise ValueError("Conway encoding is for 2-glass configurations")
    m, n = c.glasses
    return label_prime(c.label) * 2 ** m * 3 ** n


def decode_number(n: int, n_labels: int | None = None) -> Configuration | None:
    if n < 1:
        raise ValueError("n must be positive")
    m = 0
    while n % 2 == 0:
        n //= 2
        m += 1
    k = 0
    while n % 3 == 0:
        n //= 3
        k += 1
    if n < 5:
        return None
    # n must be a single prime >= 5
    if any(n % d == 0 for d in range(2, int(n ** 0.5) + 1)):
        return None
    i = 0
    while label_prime(i) < n:
        i += 1
    if n_labels is not None and i > n_labels:
        return None
    return Configuration(i, (m, k))


def compile_conway(m: MinskyMachine, literal_sub2: bool = False) -> PiecewiseDilation:
    """One piece per command, plus the stop piece 5 -> 1.

    Each piece also forbids the primes of the other labels so that pieces of
    different labels never overlap. ``literal_sub2`` uses the printed
    condition 2p_i | n for Sub(2), which breaks the simulation.
    """
    if not m.is_classic():
        raise MachineError("compile_conway needs a 2-glass machine in classic form")
    ps = {i: label_prime(i) for i in range(m.n_labels + 1)}
    pieces = []
    for cmd in m.canonical_commands():
        form, k = cmd.form()
        pi, pj = ps[cmd.label], ps[cmd.next]
        others = frozenset(p for i, p in ps.items() if i != cmd.label)
        g = 2 if k == 1 else 3
        if form == "add":
            req, forb, f = {pi}, set(), Fraction(g * pj, pi)
        elif form == "sub":
            d = 2 * pi if (literal_sub2 and k == 2) else g * pi
            req, forb, f = {d}, set(), Fraction(pj, g * pi)
        else:
            req, forb, f = {pi}, {g}, Fraction(pj, pi)
        pieces.append(Piece(frozenset(req), frozenset(forb) | others, f, source=cmd.to_dsl()))
    pieces.append(Piece(frozenset({5}), frozenset(), Fraction(1, 5), exact=5, source="stop"))
    fn = PiecewiseDilation(pieces, m, ps)
    fn.check_disjoint()
    return fn


def apply_kappa(f: PiecewiseDilation, n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    pc = f.piece_for(n)
    if pc is None:
        return n
    num, den = pc.factor.numerator, pc.factor.denominator
    mod = f.modulus
    small = n % mod if mod % den == 0 else n
    if (small * num) % den:
        raise IntegralityError(f"{pc} sends {n} to {pc.factor * n}")
    if small % den == 0:
        return n // den * num
    return n * num // den


@dataclass
class Trajectory:
    values: list[int]
    reached_one: bool

    @property
    def steps(self) -> int | None:
        return len(self.values) - 1 if self.reached_one else None

    def dumps(self) -> str:
        lines = [str(v) for v in self.values]
        lines.append(f"# reached_one={self.reached_one} s={self.steps} max={max(self.values)}")
        return "\n".join(lines) + "\n"


def iter_trajectory(f: PiecewiseDilation, n: int, fuel: int):
    """n, kappa(n), ... up to ``fuel`` steps; stops at 1 or at a fixed point."""
    yield n
    for _ in range(fuel):
        if n == 1:
            return
        nxt = apply_kappa(f, n)
        if nxt == n:
            return
        n = nxt
        yield n


def trajectory(f: PiecewiseDilation, n: int, fuel: int) -> Trajectory:
    vals = list(iter_trajectory(f, n, fuel))
    return Trajectory(vals, vals[-1] == 1)


@dataclass
class CorrespondenceRow:
    m: int
    verdict: str          # Agree / Disagree / BothInconclusive
    reached_one: bool
    halted: bool | None
    stepwise_ok: bool
    s: int | None


# -- exponent-vector evaluation ----------------------------------------------
# Codes p_i 2^m 3^n factor over the primes the pieces mention, so the same
# pieces can be applied to exponent vectors in O(#primes) per step. Used by
# verify_correspondence; cross-checked against apply_kappa on small values.

def _basis(f: PiecewiseDilation) -> list[int]:
    # glass primes and every label prime, even when no piece mentions them
    ps = {2, 3, *f.label_primes.values()}
    for pc in f.pieces:
        for d in (*pc.require_divisors, *pc.forbid_divisors, pc.factor.numerator,
                  pc.factor.denominator, pc.exact or 1):
            ps |= set(_factor(d))
    return sorted(ps)


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _vec(n: int, basis: list[int]) -> tuple[int, ...] | None:
    fac = _factor(n)
    if set(fac) - set(basis):
        return None
    return tuple(fac.get(p, 0) for p in basis)


class _ExpKappa:
    def __init__(self, f: PiecewiseDilation):
        self.basis = _basis(f)
        b = self.basis
        self.rows = []
        for pc in f.pieces:
            need = [0] * len(b)
            for d in pc.require_divisors:
                need = [max(x, y) for x, y in zip(need, _vec(d, b))]
            forbid = [b.index(q) for d in pc.forbid_divisors for q in _factor(d)]
            if any(len(_factor(d)) != 1 or _factor(d)[next(iter(_factor(d)))] != 1
                   for d in pc.forbid_divisors):
                raise ValueError("exponent evaluation needs prime forbidden divisors")
            delta = [x - y for x, y in zip(_vec(pc.factor.numerator, b), _vec(pc.factor.denominator, b))]
            exact = _vec(pc.exact, b) if pc.exact is not None else None
            self.rows.append((need, forbid, delta, exact))

    def __call__(self, v: tuple[int, ...]) -> tuple[int, ...]:
        return self.step(v)[0]

    def step(self, v: tuple[int, ...]) -> tuple[tuple[int, ...], int | None]:
        """(next vector, index of the piece applied or None)."""
        for idx, (need, forbid, delta, exact) in enumerate(self.rows):
            if exact is not None:
                ok = v == exact
            else:
                ok = all(x >= y for x, y in zip(v, need)) and all(v[i] == 0 for i in forbid)
            if ok:
                w = tuple(x + d for x, d in zip(v, delta))
                if min(w) < 0:
                    raise IntegralityError(f"non-integral value from exponents {v}")
                return w, idx
        return v, None

    def value(self, v) -> int:
        out = 1
        for p, e in zip(self.basis, v):
            out *= p ** e
        return out


def _iter_exponents(k: _ExpKappa, v, fuel: int, pumped: list | None = None):
    """Exponent vectors of the trajectory; stops early on a pumping segment.

    Pieces are disjoint, so if v_j >= v_i, the same piece was applied at i
    and j, and every forbidden prime met in between has unchanged exponent,
    the segment i..j repeats forever. Its indices are appended to ``pumped``.
    """
    one = tuple(0 for _ in v)
    vecs, used = [v], []
    last: dict[int, list[int]] = {}
    yield v
    for _ in range(fuel):
        if v == one:
            return
        w, idx = k.step(v)
        if w == v:
            return
        j = len(used)
        used.append(idx)
        for i in reversed(last.get(idx, [])[-64:]):
            d = [b - a for a, b in zip(vecs[i], v)]
            if min(d) >= 0 and all(k.rows[used[t]][3] is None and all(d[q] == 0 for q in k.rows[used[t]][1])
                                   for t in range(i, j + 1)):
                if pumped is not None:
                    pumped.append((i, j))
                return
        last.setdefault(idx, []).append(j)
        v = w
        vecs.append(v)
        yield v


def _run_codes(trace, basis: list[int]):
    """Exponent vectors of encode_config along a run."""
    for c in trace.configurations():
        yield _code_vec(c, basis)


def _code_vec(c: Configuration, basis: list[int]) -> tuple[int, ...]:
    v = [0] * len(basis)
    v[basis.index(label_prime(c.label))] += 1
    v[basis.index(2)] += c.glasses[0]
    v[basis.index(3)] += c.glasses[1]
    return tuple(v)


CROSS_CHECK = 300


def verify_correspondence(m: MinskyMachine, f: PiecewiseDilation, m_range, fuel: int):
    """Trajectory from p_1 2^m against the machine run from (1;m,0), step by step.

    The trajectory is followed on exponent vectors; its first CROSS_CHECK
    steps are replayed with apply_kappa on integers. A pumping segment in the
    trajectory (or in the run) settles "never reaches 1" before fuel runs out.
    """
    kx = _ExpKappa(f)
    one = tuple(0 for _ in kx.basis)
    rows = []
    for k in m_range:
        c = m.config(1, k, 0)
        pumped: list = []
        traj = list(_iter_exponents(kx, _code_vec(c, kx.basis), fuel, pumped))
        ints = iter_trajectory(f, encode_config(c), min(CROSS_CHECK, len(traj)))
        for x, z in zip(traj, ints):
            if kx.value(x) != z:
                raise IntegralityError(f"exponent evaluation diverged from apply_kappa at {z}")
        reached = traj[-1] == one
        traj_known = reached or bool(pumped) or len(traj) - 1 < fuel
        # as many machine steps as the trajectory took; the full budget if that settles nothing
        res = run(m, c, len(traj))
        if isinstance(res, OutOfFuel) and pumping_witness(res.trace) is None:
            res = run(m, c, fuel)
        halted = isinstance(res, Halted) and res.config == m.config(0, 0, 0)
        run_known = not isinstance(res, OutOfFuel) or pumping_witness(res.trace) is not None
        codes = list(_run_codes(res.trace, kx.basis))
        if halted:
            codes.append(one)
        n = min(len(traj), len(codes))
        stepwise = traj[:n] == codes[:n] and (not (reached or halted) or len(traj) == len(codes))
        if not traj_known and not run_known:
            verdict = "BothInconclusive"
        elif reached == halted and stepwise and traj_known == run_known:
            verdict = "Agree"
        else:
            verdict = "Disagree"
        rows.append(CorrespondenceRow(k, verdict, reached, halted, stepwise,
                                      len(traj) - 1 if reached else None))
    return rows
