import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from minskylab import finite as fs
from minskylab import identities as idn
from minskylab.identities import Identity


def _brute_isoterm(W, e):
    """Try every substitution whose images are factors of W."""
    W = tuple(W)
    facs = {W[i:j] for i in range(len(W)) for j in range(i + 1, len(W) + 1)}
    for side, other in ((e.u, e.v), (e.v, e.u)):
        xs = sorted(set(side))
        for imgs in itertools.product(sorted(facs), repeat=len(xs)):
            phi = dict(zip(xs, imgs))
            img = tuple(y for x in side for y in phi[x])
            if img not in facs:
                continue
            phi.update({x: ("#",) for x in other if x not in phi})
            if tuple(y for x in other for y in phi[x]) != img:
                return False
    return True


def test_parse_forms():
    assert idn.parse_word("x1^2 x2") == ("x1", "x1", "x2")
    assert idn.parse_word("xxyy") == tuple("xxyy")
    assert idn.parse_word("x^2y^2") == tuple("xxyy")
    e = Identity.parse("x^2y^2 = y^2x^2")
    assert str(e) == "x^2y^2 = y^2x^2"
    with pytest.raises(ValueError):
        Identity.parse("xy")
    with pytest.raises(ValueError):
        idn.parse_word("x(y")


def test_identity_file_round_trip():
    sigma = [Identity.parse("xxyy=yyxx"), Identity.parse("x1 x2 x1 = x1^2 x2")]
    assert idn.loads_identities(idn.dumps_identities(sigma) + "# comment\n\n") == sigma


def test_zimin():
    assert idn.zimin(3) == ("x1", "x2", "x1", "x3", "x1", "x2", "x1")
    for n in range(1, 12):
        assert len(idn.zimin(n)) == 2 ** n - 1


def test_worked_isoterm_example():
    w = tuple("ababbab")
    assert not idn.is_isoterm(w, Identity.parse("x^2 = x^3"))
    assert idn.is_isoterm(w, Identity.parse("x^3 = x^4"))


WORDS = st.lists(st.sampled_from("ab"), min_size=1, max_size=7)
SIDES = st.lists(st.sampled_from("xy"), min_size=1, max_size=4)


@settings(max_examples=150, deadline=None)
@given(WORDS, SIDES, SIDES)
def test_isoterm_matches_brute_force(w, u, v):
    e = Identity(tuple(u), tuple(v))
    assert idn.is_isoterm(w, e) == _brute_isoterm(w, e)


@settings(max_examples=80, deadline=None)
@given(WORDS, SIDES, SIDES)
def test_isoterm_closed_under_factors(w, u, v):
    e = Identity(tuple(u), tuple(v))
    if idn.is_isoterm(w, e):
        for i in range(len(w)):
            for j in range(i + 1, len(w) + 1):
                assert idn.is_isoterm(w[i:j], e)


def test_balanced():
    assert idn.is_balanced(Identity.parse("xxyy=yyxx"))
    assert not idn.is_balanced(Identity.parse("x^2=x^3"))


def test_witnesses_satisfy_their_identity():
    t = fs.builtin("T")
    assert idn.satisfies_all(t, [Identity.parse("x^2y^2=y^2x^2")])
    assert not idn.satisfies_all(t, [Identity.parse("xy=yx")])


def test_theorem4_commutative():
    rep = idn.theorem4_condition([Identity.parse("xy=yx")])
    assert rep.clauses["all_balanced"]
    assert not rep.clauses["zimin_isoterm"]
    assert rep.value is False


def test_theorem4_power_identity():
    # periodic: nothing containing A x N, value rests on the Zimin clause
    rep = idn.theorem4_condition([Identity.parse("x^3=x^4")])
    assert not rep.clauses["all_balanced"]
    assert rep.clauses["zimin_isoterm"]
    assert rep.value is True


def test_theorem5_flip():
    sigma = [Identity.parse("x^3=x^4")]
    a = idn.theorem5_condition(sigma)
    b = idn.theorem5_condition(sigma, flip=True)
    assert a.clauses["zimin_isoterm"] == b.clauses["zimin_isoterm"]
    assert a.value != b.value
    assert a.lines()[-1].startswith("value: ")


def test_reversed_identity():
    e = Identity.parse("x y y = y x")
    assert e.reversed() == Identity(tuple("yyx"), tuple("xy"))
    assert e.rename({"x": "a", "y": "b"}) == Identity(tuple("abb"), tuple("ba"))
