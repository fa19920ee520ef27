import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from minskylab import conway as cw
from minskylab import machine as mm
from minskylab.machine import EX_A, EX_C, Configuration


@pytest.fixture(scope="module")
def fa():
    return cw.compile_conway(EX_A)


def test_label_primes():
    assert [cw.label_prime(i) for i in range(5)] == [5, 7, 11, 13, 17]


def test_encode_decode():
    c = Configuration(1, (2, 0))
    assert cw.encode_config(c) == 28
    assert cw.decode_number(28) == c
    assert cw.decode_number(12) is None
    assert cw.decode_number(5 * 7) is None


@given(st.integers(0, 6), st.integers(0, 8), st.integers(0, 8))
def test_decode_inverts_encode(i, a, b):
    c = Configuration(i, (a, b))
    assert cw.decode_number(cw.encode_config(c)) == c


def test_ex_a_chain(fa):
    t = cw.trajectory(fa, 28, 100)
    assert t.values == [28, 22, 7, 5, 1]
    assert t.reached_one and t.steps == 4


def test_stop_piece_only_at_five(fa):
    assert fa(5) == 1
    # (0;1,0) is not the stop configuration and is left alone
    assert fa(10) == 10


def test_pieces_disjoint(fa):
    fa.check_disjoint()
    for n in range(1, 5000):
        hits = [pc for pc in fa.pieces if pc.admits(n)]
        assert len(hits) <= 1


def test_piece_for_matches_linear_scan(fa):
    for n in range(1, 3000):
        scan = next((pc for pc in fa.pieces if pc.admits(n)), None)
        assert fa.piece_for(n) == scan


def test_ex_a_pieces():
    f = cw.compile_conway(EX_A)
    by_src = {pc.source: pc for pc in f.pieces}
    assert by_src["1: if g1>0 dec g1 goto 2"].factor == Fraction(11, 14)
    assert by_src["1: if g1=0 goto 0"].factor == Fraction(5, 7)
    assert by_src["3: inc g2 goto 3"].factor == Fraction(3)
    assert by_src["stop"].exact == 5


@pytest.mark.parametrize("m", [EX_A, EX_C], ids=["exa", "exc"])
def test_stepwise_small(m):
    f = cw.compile_conway(m)
    for i in range(1, m.n_labels + 1):
        for a, b in product(range(4), repeat=2):
            c = Configuration(i, (a, b))
            nxt = mm.step(m, c)
            n = cw.encode_config(c)
            if nxt:
                (d,) = nxt
                assert f(n) == cw.encode_config(d)
            else:
                assert f(n) == n


def test_literal_sub2_breaks_simulation():
    both = mm.parse_machine("machine s glasses=2\n1: if g2>0 dec g2 goto 0\n1: if g2=0 goto 0\n")
    with pytest.raises(mm.MachineError, match="overlapping"):
        cw.compile_conway(both, literal_sub2=True)
    cw.compile_conway(both)
    sub = mm.parse_machine("machine s glasses=2\n1: if g2>0 dec g2 goto 0\n")
    f = cw.compile_conway(sub, literal_sub2=True)
    with pytest.raises(cw.IntegralityError):
        f(cw.encode_config(Configuration(1, (1, 0))))


def test_verify_correspondence_ex_a(fa):
    rows = cw.verify_correspondence(EX_A, fa, range(0, 6), 2000)
    assert [r.verdict for r in rows] == ["Agree"] * 6
    assert [r.reached_one for r in rows] == [m % 2 == 0 for m in range(6)]


def test_fixed_point_stops_trajectory(fa):
    t = cw.trajectory(fa, 17, 10)
    assert t.values == [17] and not t.reached_one and t.steps is None


def test_trajectory_dumps(fa):
    text = cw.trajectory(fa, 28, 10).dumps()
    assert text.splitlines()[0] == "28"
    assert text.splitlines()[-1] == "# reached_one=True s=4 max=28"


def test_non_classic_rejected():
    with pytest.raises(mm.MachineError):
        cw.compile_conway(mm.lift(EX_A, 3))


def _random_classic(rng):
    n = rng.randint(1, 4)
    cmds = []
    for label in range(1, n + 1):
        k = rng.randint(1, 2)
        if rng.random() < 0.4:
            cmds.append(mm.Command(label, mm.Guard.always(), ((k, 1),), rng.randint(0, n)))
        else:
            cmds.append(mm.Command(label, mm.Guard.positive(k), ((k, -1),), rng.randint(0, n)))
            cmds.append(mm.Command(label, mm.Guard.zero(k), (), rng.randint(0, n)))
    return mm.MinskyMachine(2, tuple(cmds), f"r{n}")


def test_pumping_verdicts_sound():
    # "never reaches 1" from a pumping segment must survive a much longer integer run
    rng = random.Random(7)
    for _ in range(60):
        m = _random_classic(rng)
        f = cw.compile_conway(m)
        rows = cw.verify_correspondence(m, f, range(0, 5), 300)
        assert all(r.verdict != "Disagree" for r in rows), m.to_dsl()
        for r in rows:
            if r.verdict == "Agree" and not r.reached_one:
                t = cw.trajectory(f, cw.encode_config(m.config(1, r.m, 0)), 3000)
                assert not t.reached_one


COUNTDOWN = """machine countdown glasses=2
1: if g1>0 dec g1 goto 2
1: if g1=0 goto 3
2: inc g2 goto 1
3: if g2>0 dec g2 goto 3
3: if g2=0 goto 0
"""


def test_long_run_without_pumping():
    m = mm.parse_machine(COUNTDOWN)
    f = cw.compile_conway(m)
    (row,) = cw.verify_correspondence(m, f, [40], 1000)
    assert row.verdict == "Agree" and row.reached_one and row.halted
    assert row.s == 40 * 3 + 2 + 1
