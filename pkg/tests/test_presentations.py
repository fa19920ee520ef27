from itertools import product
from pathlib import Path

import pytest

from minskylab import machine as mm
from minskylab import presentations as pr
from minskylab.machine import EX_A, EX_C, Configuration
from minskylab.rewrite import normalize

GOLDEN = Path(__file__).parent / "golden"
SUFFIX = {"S1": "s1", "S2R": "s2r", "S2L": "s2l", "S1'": "s1p", "S2R'": "s2rp", "AMALGAM": "amalgam"}


def _machine_for(variant, m):
    if variant in ("S3R", "S5R"):
        m = mm.lift(m, 3)
    if variant == "S5R":
        m = mm.attach_depth_glasses(m)
    return m


CASES = [(name, m, v) for name, m in (("exa", EX_A), ("exc", EX_C)) for v in SUFFIX] + \
        [("exa", EX_A, "S3R"), ("exa", EX_A, "S5R")]


@pytest.mark.parametrize("name,m,variant", CASES, ids=[f"{c[0]}-{c[2]}" for c in CASES])
def test_golden(name, m, variant):
    suffix = SUFFIX.get(variant, variant.lower())
    p = pr.emit(variant, _machine_for(variant, m))
    assert pr.dumps(p) == (GOLDEN / f"{name}.{suffix}.pres").read_text()


@pytest.mark.parametrize("variant", ["S1", "S2R", "S2L", "S1'", "S2R'"])
def test_dumps_loads_round_trip(variant):
    p = pr.emit(variant, EX_A)
    q = pr.loads(pr.dumps(p))
    assert q.generators == p.generators
    assert q.relations == p.relations
    assert q.commuting == p.commuting
    assert q.forbidden == p.forbidden
    assert pr.dumps(q) == pr.dumps(p)


def test_s2r_relations_match_command_table():
    p = pr.emit("S2R", EX_A)
    rels = {str(r) for r in p.relations}
    assert rels == {"q3 = q3 a2", "q1 a1 = q2", "q2 a1 = q1", "q1 A1 = q0 A1", "q2 A1 = q3 A1", "q0 = 0"}


def test_s2l_is_mirror_of_s2r():
    r, l = pr.emit("S2R", EX_A), pr.emit("S2L", EX_A)
    assert {(x.lhs[::-1], x.rhs[::-1]) for x in r.relations} == {(x.lhs, x.rhs) for x in l.relations}
    assert {f[::-1] for f in r.forbidden} == set(l.forbidden)


def _rearrangements(word, p):
    seen = {tuple(word)}
    todo = [tuple(word)]
    while todo:
        w = todo.pop()
        for i in range(len(w) - 1):
            if p.commutes(w[i], w[i + 1]):
                v = w[:i] + (w[i + 1], w[i]) + w[i + 2:]
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
    return seen


@pytest.mark.parametrize("variant", ["S1", "S2R"])
def test_forbidden_factors_brute_force(variant):
    p = pr.emit(variant, EX_A)
    allowed = set()
    for i in range(1, EX_A.n_labels + 1):
        for a, b in product(range(4), repeat=2):
            for w in _rearrangements(pr.config_word(variant, Configuration(i, (a, b))), p):
                allowed |= {w[k:k + 2] for k in range(len(w) - 1)}
    want = {(x, y) for x in p.generators for y in p.generators} - allowed
    assert set(p.forbidden) == want


@pytest.mark.parametrize("variant", ["S1", "S2R", "S2L", "S1'", "S2R'"])
@pytest.mark.parametrize("m", [EX_A, EX_C], ids=["exa", "exc"])
def test_config_words_are_nonzero(variant, m):
    p = pr.emit(variant, m)
    labels = range(0 if variant in pr.PRIMED else 1, m.n_labels + 1)
    for i in labels:
        for a, b in product(range(4), repeat=2):
            w = pr.config_word(variant, Configuration(i, (a, b)))
            assert normalize(p, w) != ("0",), (variant, w)


@pytest.mark.parametrize("variant", ["S1", "S2R", "S2L", "S1'", "S2R'", "S3R"])
def test_decode_inverts_config_word(variant):
    k = 3 if variant == "S3R" else 2
    p = pr.emit(variant, mm.lift(EX_A, k) if k == 3 else EX_A)
    for i in range(4):
        for gl in product(range(3), repeat=k):
            c = Configuration(i, gl)
            w = p.canonical(pr.config_word(variant, c))
            if variant == "S2L":
                assert pr.decode_config_word("S2R", p.canonical(w[::-1])) == c
            else:
                assert pr.decode_config_word(variant, w) == c


def test_config_word_shapes():
    c = Configuration(1, (2, 1))
    assert pr.config_word("S1", c) == pr.w("A1 a1 a1 q1 a2 A2")
    assert pr.config_word("S2R", c) == pr.w("q1 a1 a1 A1 a2 A2")
    assert pr.config_word("S2L", c) == pr.w("A2 a2 A1 a1 a1 q1")
    assert pr.config_word("S1'", c, 2) == pr.w("C c c A1 a1 a1 q1 a2 A2")
    assert pr.config_word("S2R'", c, 1) == pr.w("q1 a1 a1 A1 a2 A2 c C")
    assert pr.config_word("AMALGAM", c) == pr.w("A a b a b q1 abar bbar B")
    with pytest.raises(ValueError):
        pr.config_word("S3R", c)


def test_primed_has_counter_relations():
    p = pr.emit("S1'", EX_C)
    gens = set(p.generators)
    assert {"C", "c", "c'", "e"} <= gens
    q = pr.emit_quasi_identity(p, Configuration(1, (0, 0)))
    assert q.conclusion == (pr.w("C A1 q1 A2"), ("0",))
    assert len(q.premises) == len(p.all_relations())


def test_amalgam_pieces():
    am = pr.emit_amalgam(EX_A)
    d, e = set(am.D.generators), set(am.E.generators)
    assert d & e == set(am.U)
    assert {"q0", "q1"} <= set(am.U)
    # three relations per command
    for cmd in EX_A.commands:
        assert len(am.R.command_relations[cmd]) == 3


def test_non_classic_rejected():
    m = mm.parse_machine("machine x glasses=2\n1: inc g1, inc g2 goto 0\n")
    with pytest.raises(mm.MachineError):
        pr.emit("S1", m)
