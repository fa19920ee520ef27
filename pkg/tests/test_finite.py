import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minskylab import finite as fs
from minskylab import presentations as pr
from minskylab.machine import EX_C


def _brute_assoc(t):
    n = len(t)
    return all(t[t[a][b]][c] == t[a][t[b][c]] for a in range(n) for b in range(n) for c in range(n))


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 3).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, n - 1), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_associativity_gate(table):
    names = [f"x{i}" for i in range(len(table))]
    if _brute_assoc(table):
        fs.make_finite_semigroup(names, table)
    else:
        with pytest.raises(fs.NotAssociative):
            fs.make_finite_semigroup(names, table)


def test_builtins():
    t = fs.builtin("T")
    assert len(t) == 4 and t.zero == t.index("0")
    assert t.times("e11", "e12") == "e12"
    assert t.times("e12", "e11") == "0"
    pr_ = fs.builtin("P1_right")
    assert pr_.identity() == pr_.index("1")
    with pytest.raises(ValueError):
        fs.builtin("Q")


def test_direct_product_order():
    f = fs.direct_product(fs.builtin("P1_right"), fs.builtin("P_left"))
    assert len(f) == 12
    assert f.zero is not None


def test_cyclic_group():
    z = fs.cyclic_group(4)
    assert z.is_group()
    assert z.times("g", "g^3") == "1"


def test_nilpotency():
    t = fs.builtin("T")
    assert fs.nilpotency_degree(t) is None   # e11 is idempotent
    null = fs.make_finite_semigroup(["a", "0"], [[1, 1], [1, 1]], "0")
    assert fs.nilpotency_degree(null) == 2


def test_idempotent_power_exponent_oracle():
    rng = random.Random(7)
    for f in [fs.builtin(b) for b in fs.BUILTINS] + [fs.cyclic_group(k) for k in range(1, 7)]:
        m = fs.idempotent_power_exponent(f)
        assert fs.satisfies_power_law(f, m)
        assert not any(fs.satisfies_power_law(f, k) for k in range(1, m))
    # transformation semigroups of random maps on 4 points
    for _ in range(10):
        maps = {tuple(rng.randrange(4) for _ in range(4)) for _ in range(2)}
        todo = list(maps)
        while todo:
            a = todo.pop()
            for b in list(maps):
                for c in (tuple(b[x] for x in a), tuple(a[x] for x in b)):
                    if c not in maps:
                        maps.add(c)
                        todo.append(c)
        f = fs.from_function(sorted(maps), lambda a, b: tuple(b[x] for x in a))
        m = fs.idempotent_power_exponent(f)
        assert fs.satisfies_power_law(f, m)
        assert not any(fs.satisfies_power_law(f, k) for k in range(1, m))


def test_rees_matrix_zero_simple():
    z2 = fs.cyclic_group(2)
    f = fs.rees_matrix_semigroup(fs.ReesMatrix(z2, 2, 2, [[0, 1], [1, 0]]))
    assert len(f) == 9 and fs.is_zero_simple(f)
    g = fs.rees_matrix_semigroup(fs.ReesMatrix(z2, 2, 2, [[0, 1], [None, None]]))
    assert not fs.is_zero_simple(g)
    assert f.times("(1,g,1)", "(1,g,1)") == "(1,1,1)"


def test_rees_matrix_bad_shape():
    with pytest.raises(ValueError):
        fs.rees_matrix_semigroup(fs.ReesMatrix(fs.cyclic_group(2), 2, 3, [[0, 0], [0, 0]]))


def test_null_semigroup_not_zero_simple():
    null = fs.make_finite_semigroup(["a", "0"], [[1, 1], [1, 1]], "0")
    assert not fs.is_zero_simple(null)


def test_partial_groups_small():
    assert len(fs.enumerate_partial_groups(1)) == 1
    for g in fs.enumerate_partial_groups(3):
        assert fs.validate_partial_group(g) == []


def test_split_system_z2():
    op = {(a, b): (a + b) % 2 for a in range(2) for b in range(2)}
    g = fs.PartialGroup(2, op)
    n = fs.split_system_semigroup(g)
    assert fs.nilpotency_degree(n) == 4


def test_table_round_trip():
    for f in (fs.builtin("T"), fs.cyclic_group(3), fs.direct_product(fs.builtin("T"), fs.builtin("P_left"))):
        g = fs.loads_table(fs.dumps_table(f))
        assert g.elements == f.elements
        assert np.array_equal(g.table, f.table)
        assert g.zero == f.zero


def test_eval_identity():
    t = fs.builtin("T")
    assert fs.eval_identity(t, list("xxyy"), list("yyxx"))[0]
    holds, cex = fs.eval_identity(t, list("xy"), list("yx"))
    assert not holds and set(cex) == {"x", "y"}
    with pytest.raises(fs.BudgetExceeded):
        fs.eval_identity(t, list("xyzw"), list("wzyx"), budget=10)


def test_eval_identity_brute_force():
    rng = random.Random(11)
    f = fs.direct_product(fs.builtin("P_left"), fs.builtin("P1_right"))
    for _ in range(30):
        u = [rng.choice("xy") for _ in range(rng.randint(1, 4))]
        v = [rng.choice("xy") for _ in range(rng.randint(1, 4))]
        want = all(f.product([a[0] if c == "x" else a[1] for c in u])
                   == f.product([a[0] if c == "x" else a[1] for c in v])
                   for a in itertools.product(range(len(f)), repeat=2))
        assert fs.eval_identity(f, u, v)[0] == want


@pytest.fixture(scope="module")
def exc_quotient():
    p = pr.emit("S1'", EX_C)
    return p, fs.rees_quotient(p, EX_C, pr.w("C A1 q1 A2"), 10 ** 4)


def test_rees_quotient_ex_c(exc_quotient):
    p, f = exc_quotient
    assert isinstance(f, fs.FiniteSemigroup)
    assert fs.element_of(f, pr.w("C A1 q1 A2")) != f.zero
    assert fs.element_of(f, pr.w("q1 q1")) == f.zero
    assert fs.eval_identity(f, list("xxyy"), list("yyxx"))[0]
    q = pr.emit_quasi_identity(p, EX_C.config(1))
    holds, cex = fs.eval_quasi_identity(f, q)
    assert not holds and cex["q1"] == "q1"


def test_rees_quotient_round_trip(exc_quotient):
    _, f = exc_quotient
    g = fs.loads_table(fs.dumps_table(f))
    assert np.array_equal(g.table, f.table)


def test_separating_quotient():
    p = pr.emit("S1'", EX_C)
    res = fs.separating_quotient_search(p, EX_C, pr.w("C A1 q1 A2"), ("0",))
    assert res is not None and res[1] == len(res[0])
