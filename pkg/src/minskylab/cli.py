"""Command-line front end: ``minskylab <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 fuel exhausted (verdict Unknown).
"""
from __future__ import annotations

import argparse
import hashlib
import random
import re
import sys
import time
from importlib import resources
from pathlib import Path

from . import conway, finite, identities, kernels, machine, presentations, rewrite

OK, FAILED, USAGE, NO_FUEL = 0, 1, 2, 3

DEFAULT_FUEL = 10_000


class UsageError(Exception):
    pass


class Report:
    """Line-oriented ``key: value`` report, deterministic for fixed inputs."""

    def __init__(self, args):
        self.lines: list[tuple[str, str]] = []
        self.add("command", args.cmd)
        if getattr(args, "fuel", None) is not None:
            self.add("fuel", args.fuel)
        self.add("seed", args.seed)

    def add(self, key: str, value):
        self.lines.append((key, str(value)))

    def render(self) -> str:
        return "".join(f"{k}: {v}\n" for k, v in self.lines)


# -- inputs ------------------------------------------------------------------

def load_machine(path: str, report: Report | None = None) -> machine.MinskyMachine:
    p = Path(path)
    if p.exists():
        text = p.read_text()
    else:
        try:
            text = resources.files("minskylab").joinpath("data", f"{path}.mm").read_text()
        except FileNotFoundError:
            raise UsageError(f"no machine file {path}") from None
    if report is not None:
        report.add("machine_sha256", hashlib.sha256(text.encode()).hexdigest()[:16])
    return machine.parse_machine(text)


def parse_config(text: str) -> machine.Configuration:
    try:
        return machine.Configuration.parse(text)
    except (ValueError, machine.MachineError) as e:
        raise UsageError(f"bad configuration {text!r}: {e}") from None


_WCONF = re.compile(r"^w\((.*)\)$")


def parse_word_arg(text: str, p: presentations.Presentation) -> presentations.Word:
    """Space separated generators, ``0`` for Zero, or ``w(i;m,n)`` for a configuration word."""
    text = text.strip()
    m = _WCONF.match(text)
    if m:
        variant = p.variant
        c = parse_config(m.group(1))
        return presentations.config_word(variant, c, 0 if variant in presentations.PRIMED else None)
    word = tuple(text.split())
    try:
        p.check_word(word)
    except ValueError as e:
        raise UsageError(str(e)) from None
    return word


def variant_name(text: str) -> str:
    key = text.upper().replace("P", "'") if text.upper() in ("S1P", "S2RP") else text.upper()
    for v in presentations.VARIANTS:
        if v.upper() == key:
            return v
    raise UsageError(f"unknown variant {text}; choose from {', '.join(presentations.VARIANTS)}")


def parse_range(text: str) -> range:
    if ".." in text:
        a, b = text.split("..", 1)
        return range(int(a), int(b) + 1)
    return range(int(text), int(text) + 1)


def write_out(text: str, out: str | None) -> str | None:
    if out:
        Path(out).write_text(text)
        return out
    sys.stdout.write(text)
    return None


# -- subcommands -------------------------------------------------------------

def cmd_parse(args, rep: Report) -> int:
    m = load_machine(args.machine, rep)
    rep.add("name", m.name)
    rep.add("glasses", m.glasses)
    rep.add("labels", m.n_labels)
    rep.add("commands", len(m.commands))
    rep.add("deterministic", machine.is_deterministic(m))
    rep.add("classic", m.is_classic())
    if args.echo:
        rep.add("canonical", "\n" + m.to_dsl().rstrip("\n"))
    return OK


def cmd_run(args, rep: Report) -> int:
    m = load_machine(args.machine, rep)
    c = parse_config(args.config)
    rep.add("start", c)
    res = machine.run(m, c, args.fuel)
    rep.add("outcome", type(res).__name__)
    rep.add("steps", len(res.trace))
    if isinstance(res, machine.Halted):
        rep.add("final", res.config)
    else:
        rep.add("last", res.trace.end)
    if args.trace:
        rep.add("trace", " -> ".join(str(x) for x in res.trace.configurations()))
    return NO_FUEL if isinstance(res, machine.OutOfFuel) else OK


def cmd_equiv(args, rep: Report) -> int:
    m = load_machine(args.machine, rep)
    a, b = parse_config(args.a), parse_config(args.b)
    v = machine.equivalent_configs(m, a, b, args.fuel)
    rep.add("pair", f"{a} {b}")
    rep.add("verdict", type(v).__name__)
    if isinstance(v, machine.Equivalent):
        rep.add("witness_length", len(v.witness))
        rep.add("witness", " -> ".join(str(x) for x in v.witness.configurations()))
    elif isinstance(v, machine.NotEquivalent):
        rep.add("orbit_size", v.orbit_size)
    return NO_FUEL if isinstance(v, machine.Unknown) else OK


def cmd_compile2(args, rep: Report) -> int:
    m = load_machine(args.machine, rep)
    comp = machine.compile_k_to_2(m)
    rep.add("source_glasses", m.glasses)
    rep.add("target_commands", len(comp.target.commands))
    rep.add("primes", ",".join(map(str, comp.primes)))
    rep.add("entry", " ".join(f"{k}->{v}" for k, v in sorted(comp.entry.items())))
    status = OK
    if args.check:
        c = parse_config(args.check)
        projected = machine.simulate_compiled(comp, c, args.steps, args.fuel)
        src = machine.run(m, c, args.steps).trace.configurations()
        ok = projected == src[:len(projected)] and len(projected) == len(src)
        rep.add("check", f"{c} source_steps={len(src) - 1} match={ok}")
        status = OK if ok else FAILED
    out = write_out(comp.target.to_dsl(), args.output)
    if out:
        rep.add("output", out)
    return status


def cmd_depth(args, rep: Report) -> int:
    m = load_machine(args.machine, rep)
    if m.glasses == 2:
        m = machine.lift(m, 3)
    m5 = machine.attach_depth_glasses(m)
    rep.add("commands", len(m5.commands))
    rep.add("deterministic", machine.is_deterministic(m5))
    out = write_out(m5.to_dsl(), args.output)
    if out:
        rep.add("output", out)
    return OK


def _presentation(args, m):
    """The requested presentation and the machine it simulates."""
    variant = variant_name(args.variant)
    flags = {}
    if getattr(args, "literal", False):
        flags["literal"] = True
    if getattr(args, "strict_counter", False):
        flags["strict_counter"] = True
    if variant in ("S3R", "S5R") and m.glasses == 2:
        m = machine.lift(m, 3)
    if variant == "S5R" and m.glasses == 3:
        m = machine.attach_depth_glasses(m)
    return presentations.emit(variant, m, **flags), m


def cmd_emit(args, rep: Report) -> int:
    m = load_machine(args.machine, rep)
    p, _ = _presentation(args, m)
    rep.add("variant", p.variant)
    rep.add("generators", len(p.generators))
    rep.add("relations", len(p.relations))
    rep.add("forbidden", len(p.forbidden))
    text = presentations.dumps(p)
    if args.output:
        Path(args.output).write_text(text)
        rep.add("output", args.output)
    else:
        rep.add("presentation", "\n" + text.rstrip("\n"))
    return OK


def cmd_decide(args, rep: Report) -> int:
    m = load_machine(args.machine, rep)
    p, m = _presentation(args, m)
    u, v = parse_word_arg(args.u, p), parse_word_arg(args.v, p)
    rep.add("u", presentations.fmt(u))
    rep.add("v", presentations.fmt(v))
    if p.variant == "AMALGAM":
        rng = random.Random(args.seed) if args.strategy == "random" else None
        try:
            nu = rewrite.rewrite_confluent(p, u, args.fuel, rng)
            nv = rewrite.rewrite_confluent(p, v, args.fuel, rng)
        except rewrite.FuelExhausted:
            rep.add("verdict", "Unknown")
            return NO_FUEL
        rep.add("strategy", args.strategy)
        rep.add("normal_forms", f"{presentations.fmt(nu)} | {presentations.fmt(nv)}")
        rep.add("verdict", "Equal" if nu == nv else "Distinct")
        return OK
    verdict = rewrite.decide_equal(p, m, u, v, args.fuel)
    rep.add("verdict", type(verdict).__name__)
    if isinstance(verdict, rewrite.Equal):
        d = verdict.derivation
        rep.add("derivation_length", len(d))
        rep.add("replay_ok", rewrite.check_derivation(p, u, v, d))
        rep.add("derivation", "\n" + d.dumps().rstrip("\n") if len(d) else "(empty)")
    elif isinstance(verdict, rewrite.Distinct):
        rep.add("reason", verdict.reason)
    return NO_FUEL if isinstance(verdict, rewrite.Unknown) else OK


def cmd_divisors(args, rep: Report) -> int:
    m = load_machine(args.machine, rep)
    p, m = _presentation(args, m)
    w = parse_word_arg(args.word, p)
    rep.add("word", presentations.fmt(w))
    try:
        ds = rewrite.divisor_set(p, m, w, args.fuel)
    except rewrite.ZeroWord as e:
        rep.add("result", f"zero ({e})")
        return FAILED
    if isinstance(ds, rewrite.FuelExceeded):
        rep.add("result", "FuelExceeded")
        rep.add("explored", ds.explored)
        return NO_FUEL
    rep.add("closure", len(ds.closure))
    rep.add("divisors", len(ds.factors))
    rep.add("classes", len(ds.classes))
    if args.list:
        rep.add("elements", " | ".join(presentations.fmt(g[0]) for g in ds.classes))
    return OK


def cmd_quotient(args, rep: Report) -> int:
    m = load_machine(args.machine, rep)
    p, m = _presentation(args, m)
    w = parse_word_arg(args.word, p)
    rep.add("word", presentations.fmt(w))
    try:
        f = finite.rees_quotient(p, m, w, args.fuel)
    except rewrite.ZeroWord as e:
        rep.add("result", f"zero ({e})")
        return FAILED
    if isinstance(f, rewrite.FuelExceeded):
        rep.add("result", "FuelExceeded")
        return NO_FUEL
    rep.add("order", len(f))
    rep.add("word_nonzero", finite.element_of(f, w) != f.zero)
    rep.add("nilpotency_degree", finite.nilpotency_degree(f))
    rep.add("power_exponent", finite.idempotent_power_exponent(f))
    status = OK
    for text in args.identity or []:
        e = identities.Identity.parse(text)
        holds, ce = finite.eval_identity(f, e.u, e.v)
        rep.add(f"identity {e}", holds if holds else f"False {ce}")
    if args.quasi:
        c = parse_config(args.quasi)
        q = presentations.emit_quasi_identity(p, c)
        holds, ce = finite.eval_quasi_identity(f, q)
        rep.add(f"quasi_identity L -> w{c} = 0", holds)
    if args.output:
        Path(args.output).write_text(finite.dumps_table(f))
        rep.add("output", args.output)
    return status


def cmd_conway_compile(args, rep: Report) -> int:
    m = load_machine(args.machine, rep)
    f = conway.compile_conway(m, literal_sub2=args.literal_sub2)
    rep.add("pieces", len(f.pieces))
    for i, pc in enumerate(f.pieces):
        rep.add(f"piece {i}", f"{pc}  [{pc.source}]")
    return OK


def cmd_conway_run(args, rep: Report) -> int:
    m = load_machine(args.machine, rep)
    f = conway.compile_conway(m, literal_sub2=args.literal_sub2)
    if args.n is not None:
        n = args.n
    else:
        n = conway.encode_config(parse_config(args.config or "1;0,0"))
    tr = conway.trajectory(f, n, args.fuel)
    rep.add("start", n)
    rep.add("reached_one", tr.reached_one)
    rep.add("s", tr.steps)
    rep.add("length", len(tr.values))
    rep.add("max_digits", len(str(max(tr.values))))
    if args.output:
        Path(args.output).write_text(tr.dumps())
        rep.add("output", args.output)
    elif len(tr.values) <= 50:
        rep.add("trajectory", " ".join(map(str, tr.values)))
    return OK if tr.reached_one or len(tr.values) < args.fuel + 1 else NO_FUEL


def cmd_conway_verify(args, rep: Report) -> int:
    m = load_machine(args.machine, rep)
    f = conway.compile_conway(m, literal_sub2=args.literal_sub2)
    rows = conway.verify_correspondence(m, f, parse_range(args.m), args.fuel)
    for r in rows:
        rep.add(f"m={r.m}", f"{r.verdict} reached_one={r.reached_one} halted={r.halted} s={r.s}")
    verdicts = {r.verdict for r in rows}
    rep.add("summary", " ".join(f"{v}x{sum(r.verdict == v for r in rows)}" for v in sorted(verdicts)))
    if "Disagree" in verdicts:
        return FAILED
    return NO_FUEL if "BothInconclusive" in verdicts else OK


def _group(name: str) -> finite.FiniteSemigroup:
    m = re.fullmatch(r"Z(\d+)", name)
    if m:
        return finite.cyclic_group(int(m.group(1)))
    f = _semigroup(name)
    if not f.is_group():
        raise UsageError(f"{name} is not a group")
    return f


def _semigroup(name: str) -> finite.FiniteSemigroup:
    if name in finite.BUILTINS:
        return finite.builtin(name)
    m = re.fullmatch(r"Z(\d+)", name)
    if m:
        return finite.cyclic_group(int(m.group(1)))
    if "x" in name and all(part in finite.BUILTINS for part in name.split("x")):
        parts = [finite.builtin(x) for x in name.split("x")]
        f = parts[0]
        for g in parts[1:]:
            f = finite.direct_product(f, g)
        return f
    path = Path(name)
    if path.exists():
        return finite.loads_table(path.read_text())
    raise UsageError(f"unknown semigroup {name}")


def cmd_rees_matrix(args, rep: Report) -> int:
    g = _group(args.group)
    rows = [r.split(",") for r in args.P.split(";")]
    P = [[None if x.strip() == "0" else g.index(x.strip()) for x in r] for r in rows]
    rm = finite.ReesMatrix(g, len(P), len(P[0]), P)
    f = finite.rees_matrix_semigroup(rm)
    rep.add("group", args.group)
    rep.add("P", args.P)
    rep.add("order", len(f))
    rep.add("zero_simple", finite.is_zero_simple(f))
    if args.output:
        Path(args.output).write_text(finite.dumps_table(f))
        rep.add("output", args.output)
    return OK


def cmd_split_system(args, rep: Report) -> int:
    status = OK
    total = 0
    for n in range(1, args.max_base + 1):
        for g in finite.enumerate_partial_groups(n):
            try:
                exts = finite.enumerate_extensions(g, args.bound)
            except finite.EnumerationTruncated as e:
                rep.add("truncated", e)
                return FAILED
            for gi in exts:
                total += 1
                try:
                    f = finite.split_system_semigroup(gi)
                except finite.NotAssociative as e:
                    rep.add(f"N(G_{total})", f"not associative {e.triple}")
                    status = FAILED
                    continue
                deg = finite.nilpotency_degree(f)
                if deg is None or deg > 4:
                    status = FAILED
                ops = " ".join(f"{gi.names[a]}{gi.names[b]}={gi.names[c]}"
                               for (a, b), c in sorted(gi.op.items()) if a and b)
                rep.add(f"N(G_{total})", f"|G|={gi.base} |G_i|={gi.size} order={len(f)} "
                                          f"nilpotency={deg} ops=[{ops}]")
    rep.add("semigroups", total)
    return status


def cmd_identity_eval(args, rep: Report) -> int:
    f = _semigroup(args.semigroup)
    e = identities.Identity.parse(args.identity)
    holds, ce = finite.eval_identity(f, e.u, e.v)
    rep.add("semigroup", f"{args.semigroup} (order {len(f)})")
    rep.add("identity", e)
    rep.add("holds", holds)
    if ce:
        rep.add("counterexample", " ".join(f"{k}={v}" for k, v in sorted(ce.items())))
    return OK


def cmd_zimin(args, rep: Report) -> int:
    z = identities.zimin(args.n)
    rep.add("n", args.n)
    rep.add("length", len(z))
    if len(z) <= 4096:
        rep.add("word", " ".join(z))
    return OK


def cmd_isoterm(args, rep: Report) -> int:
    e = identities.Identity.parse(args.identity)
    word = identities.as_letters(args.word)
    wit = identities.isoterm_witness(word, e)
    rep.add("word", " ".join(word))
    rep.add("identity", e)
    rep.add("isoterm", wit is None)
    if wit:
        fac, side, phi = wit
        rep.add("witness", f"factor {''.join(fac)} = phi({identities.fmt_word(side)}), "
                + ", ".join(f"{k}->{''.join(v)}" for k, v in sorted(phi.items())))
    return OK


def cmd_variety_check(args, rep: Report) -> int:
    sigma = [identities.Identity.parse(t) for t in args.identity or []]
    if args.file:
        sigma += identities.loads_identities(Path(args.file).read_text())
    rep.add("identities", "; ".join(str(e) for e in sigma) or "(none)")
    r4 = identities.theorem4_condition(sigma)
    r5 = identities.theorem5_condition(sigma, flip=args.flip)
    for k, v in r4.clauses.items():
        rep.add(f"thm4 {k}", v)
    rep.add("thm4 condition", r4.value)
    for k, v in r5.clauses.items():
        rep.add(f"thm5 {k}", v)
    rep.add("thm5 flip", args.flip)
    rep.add("thm5 condition", r5.value)
    return OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="minskylab", description="Minsky machines, semigroups and friends.")
    ap.add_argument("--timings", action="store_true", help="append wall-clock time (breaks byte-identity)")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add(name, fn, help_, machine_arg=True, fuel=None):
        sp = sub.add_parser(name, help=help_)
        if machine_arg:
            sp.add_argument("machine", help="machine file (.mm) or built-in name exa/exc")
        if fuel is not None:
            sp.add_argument("--fuel", type=int, default=fuel, help=f"search budget (default {fuel})")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")
        sp.set_defaults(fn=fn)
        return sp

    def add_variant(name, fn, help_, fuel):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("variant", help="S1, S2R, S2L, S1', S2R', S3R, S5R or AMALGAM")
        sp.add_argument("machine", help="machine file (.mm) or built-in name exa/exc")
        sp.add_argument("--fuel", type=int, default=fuel, help=f"search budget (default {fuel})")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")
        sp.add_argument("--literal", action="store_true", help="printed rows instead of corrected ones")
        sp.add_argument("--strict-counter", action="store_true", help="primed variants: a1 a1 q_i = a1 q_j")
        sp.set_defaults(fn=fn)
        return sp

    sp = add("parse", cmd_parse, "parse and summarise a machine")
    sp.add_argument("--echo", action="store_true", help="print the canonical program")
    sp = add("run", cmd_run, "run a deterministic machine", fuel=DEFAULT_FUEL)
    sp.add_argument("--config", required=True, help='start configuration, e.g. "1;2,0"')
    sp.add_argument("--trace", action="store_true")
    sp = add("equiv", cmd_equiv, "decide equivalence of two configurations", fuel=DEFAULT_FUEL)
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp = add("compile2", cmd_compile2, "compile to a 2-glass machine", fuel=DEFAULT_FUEL * 100)
    sp.add_argument("-o", "--output")
    sp.add_argument("--check", help="simulate from this source configuration and compare")
    sp.add_argument("--steps", type=int, default=20, help="source steps to check (default 20)")
    sp = add("depth-glasses", cmd_depth, "attach glasses 4 and 5")
    sp.add_argument("-o", "--output")

    sp = add_variant("emit", cmd_emit, "emit a presentation", fuel=None)
    sp.add_argument("-o", "--output")
    sp = add_variant("decide", cmd_decide, "decide u = v in a presentation", DEFAULT_FUEL)
    sp.add_argument("--u", required=True, help='word, "0", or w(i;m,n)')
    sp.add_argument("--v", required=True)
    sp.add_argument("--strategy", choices=("leftmost", "random"), default="leftmost",
                    help="amalgam rewriting strategy")
    sp = add_variant("divisors", cmd_divisors, "divisor set of a word", DEFAULT_FUEL)
    sp.add_argument("--word", required=True)
    sp.add_argument("--list", action="store_true")
    sp = add_variant("quotient", cmd_quotient, "Rees quotient by the non-divisors of a word", DEFAULT_FUEL)
    sp.add_argument("--word", required=True)
    sp.add_argument("--identity", action="append", help="identity to evaluate (repeatable)")
    sp.add_argument("--quasi", help="evaluate the quasi-identity L -> w(c) = 0 for this configuration")
    sp.add_argument("-o", "--output", help="write the multiplication table")

    for name, fn, fuel in (("conway-compile", cmd_conway_compile, None), ("conway-run", cmd_conway_run, DEFAULT_FUEL),
                           ("conway-verify", cmd_conway_verify, DEFAULT_FUEL)):
        sp = add(name, fn, f"{name.split('-')[1]} the piecewise dilation", fuel=fuel)
        sp.add_argument("--literal-sub2", action="store_true", help="printed 2p_i | n condition for Sub(2)")
        if name == "conway-run":
            sp.add_argument("--n", type=int)
            sp.add_argument("--config")
            sp.add_argument("-o", "--output", help="trajectory file")
        if name == "conway-verify":
            sp.add_argument("--m", default="0..8", help="range a..b (default 0..8)")

    sp = add("rees-matrix", cmd_rees_matrix, "Rees matrix semigroup over a group", machine_arg=False)
    sp.add_argument("--group", default="Z2", help="Zn, or a table file of a group")
    sp.add_argument("--P", required=True, help='rows separated by ";", entries by ",", 0 for zero')
    sp.add_argument("-o", "--output")
    sp = add("split-system", cmd_split_system, "N(G_i) for all small partial groups", machine_arg=False)
    sp.add_argument("--max-base", type=int, default=3, help="largest |G| (default 3)")
    sp.add_argument("--bound", type=int, default=4, help="largest |G_i| (default 4)")
    sp = add("identity-eval", cmd_identity_eval, "evaluate an identity in a finite semigroup", machine_arg=False)
    sp.add_argument("--semigroup", required=True, help="T, P_right, P1_left, products like P1_rightxP_left, or a table file")
    sp.add_argument("--identity", required=True)
    sp = add("zimin", cmd_zimin, "the n-th Zimin word", machine_arg=False)
    sp.add_argument("n", type=int)
    sp = add("isoterm", cmd_isoterm, "is a word an isoterm for an identity", machine_arg=False)
    sp.add_argument("--word", required=True)
    sp.add_argument("--identity", required=True)
    sp = add("variety-check", cmd_variety_check, "the two variety conditions", machine_arg=False)
    sp.add_argument("--identity", action="append")
    sp.add_argument("--file", help="identities file, one u = v per line")
    sp.add_argument("--flip", action="store_true", help="require Z_{n+1} to be an isoterm in the second condition")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if not hasattr(args, "fuel"):
        args.fuel = None
    rep = Report(args)
    t0 = time.perf_counter()
    try:
        code = args.fn(args, rep)
    except (conway.IntegralityError, machine.LemmaViolation, finite.NotAssociative) as e:
        rep.add("error", e)
        code = FAILED
    except finite.BudgetExceeded as e:
        rep.add("error", e)
        code = NO_FUEL
    except (UsageError, machine.MachineError, ValueError) as e:
        sys.stdout.write(rep.render())
        sys.stderr.write(f"error: {e}\n")
        return USAGE
    if args.timings:
        rep.add("seconds", f"{time.perf_counter() - t0:.3f}")
    rep.add("backend", kernels.BACKEND)
    rep.add("exit", code)
    sys.stdout.write(rep.render())
    return code


if __name__ == "__main__":
    raise SystemExit(main())
