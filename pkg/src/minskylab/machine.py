"""K-glass Minsky machines: data model, DSL, execution and Sym(M) search."""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

FORWARD = "forward"
BACKWARD = "backward"


class MachineError(ValueError):
    pass


class MachineSyntaxError(MachineError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


@dataclass(frozen=True, order=True)
class Guard:
    """Conjunction of glass tests; ``conds`` holds ``(glass, positive)``.

    An empty conjunction is the always-true guard.
    """

    conds: tuple[tuple[int, bool], ...] = ()

    def __post_init__(self):
        glasses = [k for k, _ in self.conds]
        if len(set(glasses)) != len(glasses):
            raise MachineError(f"guard tests glass twice: {self.conds}")
        object.__setattr__(self, "conds", tuple(sorted(self.conds)))

    @classmethod
    def always(cls) -> "Guard":
        return cls(())

    @classmethod
    def positive(cls, k: int) -> "Guard":
        return cls(((k, True),))

    @classmethod
    def zero(cls, k: int) -> "Guard":
        return cls(((k, False),))

    @property
    def kind(self) -> str:
        if not self.conds:
            return "Always"
        if len(self.conds) > 1:
            return "Conj"
        return "GlassPositive" if self.conds[0][1] else "GlassZero"

    def holds(self, glasses: Sequence[int]) -> bool:
        return all((glasses[k - 1] > 0) == pos for k, pos in self.conds)

    def requires_positive(self, k: int) -> bool:
        return (k, True) in self.conds

    def overlaps(self, other: "Guard") -> bool:
        mine = dict(self.conds)
        return not any(k in mine and mine[k] != pos for k, pos in other.conds)


@dataclass(frozen=True, order=True)
class Command:
    label: int
    guard: Guard
    # (glass, +1 | -1) pairs on distinct glasses
    effect: tuple[tuple[int, int], ...]
    next: int

    def __post_init__(self):
        if self.label < 1:
            raise MachineError("command labels start at 1")
        if self.next < 0:
            raise MachineError("next label must be non-negative")
        ks = [k for k, _ in self.effect]
        if len(set(ks)) != len(ks):
            raise MachineError(f"effect touches a glass twice: {self.effect}")
        for k, d in self.effect:
            if d not in (1, -1):
                raise MachineError(f"bad effect delta {d}")
            if d == -1 and not self.guard.requires_positive(k):
                raise MachineError(f"dec g{k} without a g{k}>0 guard")

    def glasses_used(self) -> set[int]:
        return {k for k, _ in self.guard.conds} | {k for k, _ in self.effect}

    def apply(self, c: "Configuration") -> "Configuration | None":
        if c.label != self.label or not self.guard.holds(c.glasses):
            return None
        g = list(c.glasses)
        for k, d in self.effect:
            g[k - 1] += d
        return Configuration(self.next, tuple(g))

    def apply_inverse(self, c: "Configuration") -> "Configuration | None":
        if c.label != self.next:
            return None
        g = list(c.glasses)
        for k, d in self.effect:
            g[k - 1] -= d
        if min(g) < 0:
            return None
        pre = Configuration(self.label, tuple(g))
        if not self.guard.holds(pre.glasses):
            return None
        return pre

    def to_dsl(self) -> str:
        parts = [f"{self.label}:"]
        if self.guard.conds:
            tests = ", ".join(f"g{k}{'>0' if pos else '=0'}" for k, pos in self.guard.conds)
            parts.append(f"if {tests}")
        if self.effect:
            acts = ", ".join(f"{'inc' if d > 0 else 'dec'} g{k}" for k, d in self.effect)
            parts.append(acts)
        parts.append(f"goto {self.next}")
        return " ".join(parts)

    def is_classic(self) -> bool:
        """One of the three 2-glass command forms: Add, guarded Sub, zero jump."""
        g, e = self.guard, self.effect
        if not g.conds:
            return len(e) == 1 and e[0][1] == 1
        if len(g.conds) != 1:
            return False
        k, pos = g.conds[0]
        if pos:
            return e == ((k, -1),)
        return e == ()

    def form(self) -> tuple[str, int]:
        """``("add"|"sub"|"zero", glass)`` for classic commands."""
        if not self.is_classic():
            raise MachineError(f"not a classic command: {self.to_dsl()}")
        if not self.guard.conds:
            return "add", self.effect[0][0]
        k, pos = self.guard.conds[0]
        return ("sub" if pos else "zero"), k


@dataclass(frozen=True, order=True)
class Configuration:
    label: int
    glasses: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "glasses", tuple(self.glasses))
        if self.label < 0 or any(x < 0 for x in self.glasses):
            raise MachineError(f"negative entry in configuration {self}")

    def __str__(self) -> str:
        return f"({self.label};{','.join(map(str, self.glasses))})"

    @classmethod
    def parse(cls, text: str) -> "Configuration":
        m = re.fullmatch(r"\s*\(?\s*(\d+)\s*;\s*([\d,\s]*?)\s*\)?\s*", text)
        if not m:
            raise MachineError(f"cannot parse configuration {text!r}")
        gl = tuple(int(x) for x in m.group(2).split(",") if x.strip())
        return cls(int(m.group(1)), gl)

    @property
    def size(self) -> int:
        """|c| = total coins + 1."""
        return sum(self.glasses) + 1


@dataclass(frozen=True)
class MinskyMachine:
    glasses: int
    commands: tuple[Command, ...]
    name: str = "M"

    def __post_init__(self):
        object.__setattr__(self, "commands", tuple(self.commands))
        if self.glasses < 2:
            raise MachineError("a Minsky machine has at least 2 glasses")
        labels = {c.label for c in self.commands}
        if labels and labels != set(range(1, max(labels) + 1)):
            raise MachineError(f"labels must be contiguous 1..N, got {sorted(labels)}")
        for c in self.commands:
            for k in c.glasses_used():
                if not 1 <= k <= self.glasses:
                    raise MachineError(f"glass g{k} out of range in {c.to_dsl()!r}")
            if c.next and c.next not in labels:
                raise MachineError(f"dangling goto {c.next} in {c.to_dsl()!r}")

    @property
    def n_labels(self) -> int:
        return max((c.label for c in self.commands), default=0)

    def by_label(self, label: int) -> list[Command]:
        return [c for c in self.commands if c.label == label]

    @cached_property
    def _sorted_by_label(self) -> dict[int, list[Command]]:
        out: dict[int, list[Command]] = {}
        for c in sorted(self.commands):
            out.setdefault(c.label, []).append(c)
        return out

    def canonical_commands(self) -> list[Command]:
        return sorted(self.commands)

    def is_classic(self) -> bool:
        return self.glasses == 2 and all(c.is_classic() for c in self.commands)

    def to_dsl(self) -> str:
        lines = [f"machine {self.name} glasses={self.glasses}"]
        lines += [c.to_dsl() for c in self.commands]
        return "\n".join(lines) + "\n"

    def config(self, label: int, *glasses: int) -> Configuration:
        g = tuple(glasses) + (0,) * (self.glasses - len(glasses))
        return Configuration(label, g)


# -- DSL ---------------------------------------------------------------------

_HEADER = re.compile(r"machine\s+(\S+)\s+glasses\s*=\s*(\d+)\s*$")
_CMD = re.compile(
    r"(?P<label>\d+)\s*:\s*"
    r"(?:if\s+(?P<tests>g\d+\s*(?:=0|>0)(?:\s*,\s*g\d+\s*(?:=0|>0))*)\s*)?"
    r"(?P<acts>(?:inc|dec)\s+g\d+(?:\s*,\s*(?:inc|dec)\s+g\d+)*)?\s*"
    r"goto\s+(?P<next>\d+)\s*$"
)


def parse_machine(text: str) -> MinskyMachine:
    header = None
    commands: list[Command] = []
    lines: list[tuple[int, int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        col = len(body) - len(body.lstrip()) + 1
        body = body.strip()
        if header is None:
            m = _HEADER.match(body)
            if not m:
                raise MachineSyntaxError("expected 'machine <name> glasses=<K>'", lineno, col)
            header = (m.group(1), int(m.group(2)))
            continue
        lines.append((lineno, col, body))
    if header is None:
        raise MachineSyntaxError("missing machine header", 1, 1)
    name, k = header
    for lineno, col, body in lines:
        m = _CMD.match(body)
        if not m:
            raise MachineSyntaxError(f"cannot parse command {body!r}", lineno, col)
        try:
            conds = []
            if m.group("tests"):
                for t in m.group("tests").split(","):
                    t = t.strip()
                    conds.append((int(t[1:-2]), t.endswith(">0")))
            effect = []
            if m.group("acts"):
                for a in m.group("acts").split(","):
                    op, g = a.split()
                    effect.append((int(g[1:]), 1 if op == "inc" else -1))
            for g, _ in conds + effect:
                if not 1 <= g <= k:
                    raise MachineError(f"glass g{g} out of range (glasses={k})")
            commands.append(Command(int(m.group("label")), Guard(tuple(conds)),
                                    tuple(effect), int(m.group("next"))))
        except MachineError as exc:
            if isinstance(exc, MachineSyntaxError):
                raise
            raise MachineSyntaxError(str(exc), lineno, col) from None
    try:
        return MinskyMachine(k, tuple(commands), name)
    except MachineError as exc:
        raise MachineSyntaxError(str(exc), lines[-1][0] if lines else 1, 1) from None


def format_machine(m: MinskyMachine) -> str:
    return m.to_dsl()


EX_A = parse_machine("""\
machine exa glasses=2
1: if g1=0 goto 0
1: if g1>0 dec g1 goto 2
2: if g1=0 goto 3
2: if g1>0 dec g1 goto 1
3: inc g2 goto 3
""")

EX_C = parse_machine("""\
machine exc glasses=2
1: inc g2 goto 2
2: if g1=0 goto 0
""")


def lift(m: MinskyMachine, glasses: int) -> MinskyMachine:
    """Same program over more glasses (the extra ones are never touched)."""
    return MinskyMachine(glasses, m.commands, m.name)


# -- semantics ---------------------------------------------------------------

def is_deterministic(m: MinskyMachine) -> bool:
    for label in range(1, m.n_labels + 1):
        cmds = m.by_label(label)
        for i, a in enumerate(cmds):
            for b in cmds[i + 1:]:
                if a.guard.overlaps(b.guard):
                    return False
    return True


def successors(m: MinskyMachine, c: Configuration) -> list[tuple[Command, Configuration]]:
    if c.label == 0:
        raise MachineError("stop configurations have no successors")
    out = []
    for cmd in m._sorted_by_label.get(c.label, ()):
        d = cmd.apply(c)
        if d is not None:
            out.append((cmd, d))
    return out


def step(m: MinskyMachine, c: Configuration) -> set[Configuration]:
    return {d for _, d in successors(m, c)}


@dataclass(frozen=True)
class TraceStep:
    source: Configuration
    command: Command
    direction: str
    target: Configuration


@dataclass
class Trace:
    start: Configuration
    steps: list[TraceStep] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def end(self) -> Configuration:
        return self.steps[-1].target if self.steps else self.start

    def configurations(self) -> list[Configuration]:
        return [self.start] + [s.target for s in self.steps]

    def reversed(self) -> "Trace":
        flip = {FORWARD: BACKWARD, BACKWARD: FORWARD}
        steps = [TraceStep(s.target, s.command, flip[s.direction], s.source)
                 for s in reversed(self.steps)]
        return Trace(self.end, steps)

    def extend(self, other: "Trace") -> "Trace":
        assert other.start == self.end
        return Trace(self.start, self.steps + other.steps)

    def check(self) -> bool:
        cur = self.start
        for s in self.steps:
            if s.source != cur:
                return False
            img = s.command.apply(cur) if s.direction == FORWARD else s.command.apply_inverse(cur)
            if img != s.target:
                return False
            cur = img
        return True


@dataclass
class Halted:
    config: Configuration
    trace: Trace


@dataclass
class Stuck:
    trace: Trace


@dataclass
class OutOfFuel:
    trace: Trace


def run(m: MinskyMachine, c: Configuration, fuel: int) -> Halted | Stuck | OutOfFuel:
    if not is_deterministic(m):
        raise MachineError("run() needs a deterministic machine; use equivalent_configs")
    if len(c.glasses) != m.glasses:
        raise MachineError(f"configuration {c} does not fit {m.glasses} glasses")
    trace = Trace(c)
    cur = c
    for _ in range(fuel):
        if cur.label == 0:
            return Halted(cur, trace)
        nxt = successors(m, cur)
        if not nxt:
            return Stuck(trace)
        cmd, d = nxt[0]
        trace.steps.append(TraceStep(cur, cmd, FORWARD, d))
        cur = d
    if cur.label == 0:
        return Halted(cur, trace)
    return OutOfFuel(trace)


def pumping_witness(trace: Trace, window: int = 64) -> tuple[int, int] | None:
    """Indices i < j proving a deterministic run never halts, or None.

    c_j has the label of c_i and at least as many coins everywhere, and every
    zero test between them is on a glass that did not grow, so the segment
    repeats forever.
    """
    cfgs = trace.configurations()
    last: dict[int, list[int]] = {}
    for j, cj in enumerate(cfgs):
        for i in reversed(last.get(cj.label, [])[-window:]):
            ci = cfgs[i]
            delta = [b - a for a, b in zip(ci.glasses, cj.glasses)]
            if min(delta) < 0:
                continue
            ok = all(delta[k - 1] == 0
                     for st in trace.steps[i:j] for k, pos in st.command.guard.conds if not pos)
            if ok:
                return i, j
        last.setdefault(cj.label, []).append(j)
    return None


class SymMachine:
    """Sym(M): M together with the inverse of every command."""

    def __init__(self, m: MinskyMachine):
        self.machine = m
        self.commands = m.canonical_commands()

    def forward(self, c: Configuration) -> list[tuple[Command, Configuration]]:
        if c.label == 0:
            return []
        return successors(self.machine, c)

    def backward(self, c: Configuration) -> list[tuple[Command, Configuration]]:
        out = []
        for cmd in self.commands:
            d = cmd.apply_inverse(c)
            if d is not None:
                out.append((cmd, d))
        return out

    def moves(self, c: Configuration) -> Iterator[TraceStep]:
        # canonical order: by command, forward before backward
        fw = dict(self.forward(c))
        bw = dict(self.backward(c))
        for cmd in self.commands:
            if cmd in fw:
                yield TraceStep(c, cmd, FORWARD, fw[cmd])
            if cmd in bw:
                yield TraceStep(c, cmd, BACKWARD, bw[cmd])


def symmetrize(m: MinskyMachine) -> SymMachine:
    return SymMachine(m)


@dataclass
class Equivalent:
    witness: Trace


@dataclass
class NotEquivalent:
    orbit_size: int = 0


@dataclass
class Unknown:
    fuel_spent: int = 0


class LemmaViolation(AssertionError):
    pass


# Searches run on raw states (label, g1, ..., gK); Configuration and
# TraceStep objects are only built for results.

class _RawSym:
    def __init__(self, m: MinskyMachine):
        self.commands = m.canonical_commands()
        self.rows = []
        touch: dict[int, set[int]] = {}
        for i, c in enumerate(self.commands):
            delta = [0] * m.glasses
            for k, d in c.effect:
                delta[k - 1] = d
            conds = tuple((k - 1, pos) for k, pos in c.guard.conds)
            self.rows.append((c.label, conds, tuple(delta), c.next))
            touch.setdefault(c.label, set()).add(i)
            touch.setdefault(c.next, set()).add(i)
        self.touch = {lab: sorted(ix) for lab, ix in touch.items()}

    def moves(self, st: tuple) -> list[tuple[int, str, tuple]]:
        label, g = st[0], st[1:]
        out = []
        rows = self.rows
        for i in self.touch.get(label, ()):
            lab, conds, delta, nxt = rows[i]
            if lab == label:
                for k, pos in conds:
                    if (g[k] > 0) != pos:
                        break
                else:
                    out.append((i, FORWARD, (nxt, *map(int.__add__, g, delta))))
            if nxt == label:
                pre = tuple(map(int.__sub__, g, delta))
                if min(pre) >= 0:
                    for k, pos in conds:
                        if (pre[k] > 0) != pos:
                            break
                    else:
                        out.append((i, BACKWARD, (lab,) + pre))
        return out

    def forward(self, st: tuple) -> tuple[int, tuple] | None:
        label, g = st[0], st[1:]
        for i in self.touch.get(label, ()):
            lab, conds, delta, nxt = self.rows[i]
            if lab == label and all((g[k] > 0) == pos for k, pos in conds):
                return i, (nxt,) + tuple(x + d for x, d in zip(g, delta))
        return None


@lru_cache(maxsize=64)
def _raw_sym(m: MinskyMachine) -> _RawSym:
    return _RawSym(m)


def _raw(c: Configuration) -> tuple:
    return (c.label,) + c.glasses


def _cfg(st: tuple) -> Configuration:
    return Configuration(st[0], st[1:])


def _raw_orbit(m: MinskyMachine, w: Configuration, fuel: int, until=None):
    sym = _raw_sym(m)
    start = _raw(w)
    parent: dict[tuple, tuple | None] = {start: None}
    queue = deque([start])
    expanded = 0
    while queue:
        if expanded >= fuel:
            return parent, False
        st = queue.popleft()
        expanded += 1
        for i, d, nxt in sym.moves(st):
            if nxt not in parent:
                parent[nxt] = (st, i, d)
                if until is not None and until(_cfg(nxt)):
                    return parent, False
                queue.append(nxt)
    return parent, True


@lru_cache(maxsize=128)
def _cached_orbit(m: MinskyMachine, w: Configuration, fuel: int):
    return _raw_orbit(m, w, fuel)


def _raw_path(m: MinskyMachine, parent, target: tuple, start: Configuration) -> Trace:
    cmds = _raw_sym(m).commands
    steps = []
    cur = target
    while parent[cur] is not None:
        prev, i, d = parent[cur]
        steps.append(TraceStep(_cfg(prev), cmds[i], d, _cfg(cur)))
        cur = prev
    return Trace(start, steps[::-1])


def sym_orbit(m: MinskyMachine, w: Configuration, fuel: int, until=None):
    """BFS over Sym(M) from ``w``; returns (parents, complete).

    With ``until`` the search stops as soon as a configuration satisfying it
    is discovered (``complete`` is then False).
    """
    raw, complete = _raw_orbit(m, w, fuel, until)
    cmds = _raw_sym(m).commands
    parent: dict[Configuration, TraceStep | None] = {}
    for st, link in raw.items():
        c = _cfg(st)
        parent[c] = None if link is None else TraceStep(_cfg(link[0]), cmds[link[1]], link[2], c)
    return parent, complete


def _path(parent, target: Configuration, start: Configuration) -> Trace:
    steps = []
    cur = target
    while cur != start:
        mv = parent[cur]
        steps.append(mv)
        cur = mv.source
    return Trace(start, steps[::-1])


def sym_search(m: MinskyMachine, w: Configuration, w2: Configuration, fuel: int):
    """Sym-BFS from w; orbits are cached, so many queries from one w are cheap."""
    if w == w2:
        return Equivalent(Trace(w))
    parent, complete = _cached_orbit(m, w, fuel)
    target = _raw(w2)
    if target in parent:
        return Equivalent(_raw_path(m, parent, target, w))
    if complete:
        return NotEquivalent(len(parent))
    return Unknown(fuel)


@lru_cache(maxsize=256)
def _forward_raw(m: MinskyMachine, c: Configuration, fuel: int):
    """Forward computation from c: (raw states, command indices, complete)."""
    sym = _raw_sym(m)
    cur = _raw(c)
    seen = {cur}
    states, used = [cur], []
    for _ in range(fuel):
        if cur[0] == 0:
            return states, used, True
        nxt = sym.forward(cur)
        if nxt is None:
            return states, used, True
        i, cur = nxt
        used.append(i)
        if cur in seen:
            return states, used, True  # entered a cycle
        seen.add(cur)
        states.append(cur)
    complete = cur[0] == 0 or sym.forward(cur) is None
    return states, used, complete


def _forward_trace(m: MinskyMachine, states, used, n: int) -> Trace:
    cmds = _raw_sym(m).commands
    steps = [TraceStep(_cfg(states[k]), cmds[used[k]], FORWARD, _cfg(states[k + 1])) for k in range(n)]
    return Trace(_cfg(states[0]), steps)


def forward_meet(m: MinskyMachine, w: Configuration, w2: Configuration, fuel: int):
    """Deterministic machines: w ≡ w2 iff their forward computations meet."""
    if not is_deterministic(m):
        raise MachineError("forward-meet needs a deterministic machine")
    a_st, a_used, a_done = _forward_raw(m, w, fuel)
    b_st, b_used, b_done = _forward_raw(m, w2, fuel)
    b_index = {c: i for i, c in enumerate(b_st)}
    for i, c in enumerate(a_st):
        if c in b_index:
            j = b_index[c]
            left = _forward_trace(m, a_st, a_used, i)
            right = _forward_trace(m, b_st, b_used, j).reversed()
            return Equivalent(left.extend(right))
    if a_done and b_done:
        return NotEquivalent(len(a_st) + len(b_st))
    return Unknown(len(a_st) + len(b_st))


def equivalent_configs(m: MinskyMachine, w: Configuration, w2: Configuration, fuel: int):
    sym = sym_search(m, w, w2, fuel)
    if not is_deterministic(m):
        return sym
    fm = forward_meet(m, w, w2, fuel)
    concluded = [v for v in (sym, fm) if not isinstance(v, Unknown)]
    if len(concluded) == 2 and type(sym) is not type(fm):
        raise LemmaViolation(f"Sym-BFS says {type(sym).__name__}, forward-meet says "
                             f"{type(fm).__name__} for {w} vs {w2}")
    return concluded[0] if concluded else sym


def is_accepted(m: MinskyMachine, c: Configuration, fuel: int):
    """True/False if decided within fuel (via the Sym-orbit), else None."""
    parent, complete = sym_orbit(m, c, fuel, until=lambda x: x.label == 0)
    if any(x.label == 0 for x in parent):
        return True
    return False if complete else None


# -- K -> 2 compiler ---------------------------------------------------------

def primes(n: int) -> list[int]:
    out: list[int] = []
    cand = 2
    while len(out) < n:
        if all(cand % p for p in out if p * p <= cand):
            out.append(cand)
        cand += 1
    return out


@dataclass
class Compiled:
    """2-glass simulation of a K-glass machine via prime-exponent encoding."""

    source: MinskyMachine
    target: MinskyMachine
    entry: dict[int, int]   # source label -> target label
    primes: tuple[int, ...]

    def encode(self, glasses: Sequence[int]) -> int:
        v = 1
        for p, e in zip(self.primes, glasses):
            v *= p ** e
        return v

    def decode(self, v: int) -> tuple[int, ...]:
        out = []
        for p in self.primes:
            e = 0
            while v % p == 0:
                v //= p
                e += 1
            out.append(e)
        return tuple(out)

    def map_config(self, c: Configuration) -> Configuration:
        label = 0 if c.label == 0 else self.entry[c.label]
        return Configuration(label, (self.encode(c.glasses), 0))

    def project(self, t: Configuration) -> Configuration | None:
        """Inverse of map_config on target configurations at block boundaries."""
        if t.glasses[1] != 0:
            return None
        if t.label == 0:
            return Configuration(0, self.decode(t.glasses[0]))
        inv = {v: k for k, v in self.entry.items()}
        if t.label not in inv:
            return None
        return Configuration(inv[t.label], self.decode(t.glasses[0]))


class _Builder:
    def __init__(self):
        self.rows: list[tuple[int, tuple, tuple, int | None]] = []
        self.count = 0

    def new(self) -> int:
        self.count += 1
        return self.count

    def add(self, label, conds, effect, nxt):
        self.rows.append((label, tuple(conds), tuple(effect), nxt))

    def multiply(self, p: int, done: int) -> int:
        """g1 <- p*g1 (g2 is scratch, returned empty)."""
        start, move, back, chain = self.new(), self.new(), self.new(), []
        self.add(start, [(1, False)], [], back)
        self.add(start, [(1, True)], [(1, -1)], move)
        prev = move
        for i in range(p):
            nxt = start if i == p - 1 else self.new()
            self.add(prev, [], [(2, 1)], nxt)
            prev = nxt
        self.add(back, [(2, False)], [], done)
        self.add(back, [(2, True)], [(2, -1)], chain_target := self.new())
        self.add(chain_target, [], [(1, 1)], back)
        return start

    def divide_test(self, p: int, yes: int, no: int, restore: bool) -> int:
        """Branch on p | g1. ``yes`` sees g1/p (or g1 if ``restore``), ``no`` sees g1."""
        states = [self.new() for _ in range(p)]
        # remainder-r states: g1 has been drained by (quotient*p + r); quotient in g2
        for r, s in enumerate(states):
            if r == p - 1:
                bump = self.new()
                self.add(s, [(1, True)], [(1, -1)], bump)
                self.add(bump, [], [(2, 1)], states[0])
            else:
                self.add(s, [(1, True)], [(1, -1)], states[r + 1])
            # g1 exhausted with remainder r
            if r == 0:
                if restore:
                    self.add(s, [(1, False)], [], self.multiply_back(p, 0, yes))
                else:
                    self.add(s, [(1, False)], [], self.move_back(yes))
            else:
                self.add(s, [(1, False)], [], self.multiply_back(p, r, no))
        return states[0]

    def move_back(self, done: int) -> int:
        s, t = self.new(), self.new()
        self.add(s, [(2, False)], [], done)
        self.add(s, [(2, True)], [(2, -1)], t)
        self.add(t, [], [(1, 1)], s)
        return s

    def multiply_back(self, p: int, r: int, done: int) -> int:
        """g1 <- p*g2 + r, g2 <- 0 (g1 is 0 on entry)."""
        s = self.new()
        self.add(s, [(2, False)], [], self._add_const(r, done))
        prev = self.new()
        self.add(s, [(2, True)], [(2, -1)], prev)
        for i in range(p):
            nxt = s if i == p - 1 else self.new()
            self.add(prev, [], [(1, 1)], nxt)
            prev = nxt
        return s

    def _add_const(self, r: int, done: int) -> int:
        if r == 0:
            return done
        first = self.new()
        prev = first
        for i in range(r):
            nxt = done if i == r - 1 else self.new()
            self.add(prev, [], [(1, 1)], nxt)
            prev = nxt
        return first

    def stuck(self) -> int:
        s = self.new()
        # g2 is empty whenever this is reached, so the guard never holds
        self.add(s, [(2, True)], [(2, -1)], s)
        return s


def compile_k_to_2(m: MinskyMachine) -> Compiled:
    if not is_deterministic(m):
        raise MachineError("compile_k_to_2 expects a deterministic machine")
    ps = tuple(primes(m.glasses))
    b = _Builder()
    entry = {label: b.new() for label in range(1, m.n_labels + 1)}
    dead = None

    def effects(cmd: Command) -> int:
        target = 0 if cmd.next == 0 else entry[cmd.next]
        cont = target
        for k, d in reversed(cmd.effect):
            p = ps[k - 1]
            if d > 0:
                cont = b.multiply(p, cont)
            else:
                cont = b.divide_test(p, cont, cont, restore=False)
        return cont

    for label in range(1, m.n_labels + 1):
        cmds = m.by_label(label)
        tested = sorted({k for c in cmds for k, _ in c.guard.conds})

        def tree(idx: int, known: dict[int, bool]) -> int:
            nonlocal dead
            if idx == len(tested):
                match = [c for c in cmds
                         if all(known[k] == pos for k, pos in c.guard.conds)]
                if not match:
                    if dead is None:
                        dead = b.stuck()
                    return dead
                return effects(match[0])
            k = tested[idx]
            yes = tree(idx + 1, {**known, k: True})
            no = tree(idx + 1, {**known, k: False})
            # g_k > 0 iff p_k divides the code
            return b.divide_test(ps[k - 1], yes, no, restore=True)

        start = tree(0, {})
        # entry label jumps straight into the decision tree
        b.add(entry[label], [], [], start)

    commands = []
    for label, conds, eff, nxt in b.rows:
        if not eff and not conds:
            # pure jump: realise as a zero test on the scratch glass (empty here)
            conds = ((2, False),)
        commands.append(Command(label, Guard(conds), eff, nxt))
    target = MinskyMachine(2, tuple(sorted(commands)), f"{m.name}_2g")
    return Compiled(m, target, entry, ps)


def simulate_compiled(comp: Compiled, c: Configuration, source_steps: int, fuel: int):
    """Run the target machine and project each block boundary back to the source.

    Returns the list of projected source configurations (start included).
    """
    t = comp.map_config(c)
    out = [c]
    cur = t
    spent = 0
    entries = set(comp.entry.values())
    while len(out) <= source_steps and spent < fuel:
        if cur.label == 0:
            break
        nxt = successors(comp.target, cur)
        if not nxt:
            break
        cur = nxt[0][1]
        spent += 1
        if cur.label in entries or cur.label == 0:
            out.append(comp.project(cur))
    return out


# -- depth glasses -----------------------------------------------------------

def attach_depth_glasses(m: MinskyMachine) -> MinskyMachine:
    if m.glasses != 3:
        raise MachineError("attach_depth_glasses expects a 3-glass machine")
    cmds = []
    for c in m.commands:
        cmds.append(Command(c.label, Guard(c.guard.conds + ((5, False),)),
                            tuple(sorted(c.effect + ((4, 1),))), c.next))
        cmds.append(Command(c.label, Guard(c.guard.conds + ((5, True),)), c.effect, c.next))
    for i in range(1, m.n_labels + 1):
        cmds.append(Command(i, Guard.always(), ((4, 1), (5, 1)), i))
        cmds.append(Command(i, Guard(((4, False), (5, False))), (), 0))
    return MinskyMachine(5, tuple(cmds), f"{m.name}_5g")


def depth_extra_commands(m5: MinskyMachine, label: int) -> tuple[Command, Command]:
    add = Command(label, Guard.always(), ((4, 1), (5, 1)), label)
    stop = Command(label, Guard(((4, False), (5, False))), (), 0)
    return add, stop


# -- emptying gaps -----------------------------------------------------------

def measure_empty_bound(m: MinskyMachine, inputs: Iterable[Configuration], fuel: int):
    """Per input: (max steps between configurations with an empty glass, |c| at gap start)."""
    if not is_deterministic(m):
        raise MachineError("measure_empty_bound needs a deterministic machine")
    report = []
    for c in inputs:
        res = run(m, c, fuel)
        cfgs = res.trace.configurations()
        marks = [i for i, x in enumerate(cfgs) if min(x.glasses) == 0]
        bounds = sorted({0, len(cfgs) - 1, *marks})
        gap, size = 0, c.size
        for a, b2 in zip(bounds, bounds[1:]):
            if b2 - a > gap:
                gap, size = b2 - a, cfgs[a].size
        report.append((c, gap, size))
    return report
