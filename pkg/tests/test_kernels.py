"""The compiled kernels must agree with the pure-Python ones."""
import random

import numpy as np
import pytest

from minskylab import _pykernels, kernels

try:
    from minskylab import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="Cython extension not built")


def _commute(n, rng):
    m = np.zeros((n, n), dtype=np.uint8)
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < 0.4:
                m[a, b] = m[b, a] = 1
    return m


def _brute_lex_normal(word, commute):
    # smallest word reachable by swapping adjacent commuting letters
    start = tuple(word)
    seen = {start}
    todo = [start]
    while todo:
        w = todo.pop()
        for i in range(len(w) - 1):
            if w[i] != w[i + 1] and commute[w[i]][w[i + 1]]:
                v = w[:i] + (w[i + 1], w[i]) + w[i + 2:]
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
    return list(min(seen)), seen


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


def test_lex_normal_matches_brute_force():
    rng = random.Random(1)
    for _ in range(200):
        n = rng.randint(1, 4)
        cm = _commute(n, rng)
        word = [rng.randrange(n) for _ in range(rng.randint(0, 7))]
        want, _ = _brute_lex_normal(word, cm)
        assert _pykernels.lex_normal(word, cm) == want


def test_two_factors_matches_brute_force():
    rng = random.Random(2)
    for _ in range(200):
        n = rng.randint(1, 4)
        cm = _commute(n, rng)
        word = [rng.randrange(n) for _ in range(rng.randint(0, 6))]
        _, klass = _brute_lex_normal(word, cm)
        want = {(w[i], w[i + 1]) for w in klass for i in range(len(w) - 1)}
        assert _pykernels.two_factors(word, cm) == want


def test_check_assoc():
    z3 = [[(a + b) % 3 for b in range(3)] for a in range(3)]
    assert _pykernels.check_assoc(np.array(z3)) is None
    bad = np.array([[1, 0], [0, 0]])
    assert _pykernels.check_assoc(bad) is not None


@needs_c
def test_parity_random():
    rng = random.Random(3)
    for _ in range(300):
        n = rng.randint(1, 5)
        cm = _commute(n, rng)
        word = [rng.randrange(n) for _ in range(rng.randint(0, 9))]
        assert list(_ckernels.lex_normal(word, cm)) == _pykernels.lex_normal(word, cm)
        assert set(_ckernels.two_factors(word, cm)) == _pykernels.two_factors(word, cm)
    for _ in range(100):
        n = rng.randint(1, 4)
        t = np.array([[rng.randrange(n) for _ in range(n)] for _ in range(n)], dtype=np.int64)
        a, b = _ckernels.check_assoc(t), _pykernels.check_assoc(t)
        assert (a is None) == (b is None)
        if a is not None:
            assert tuple(a) == tuple(b)


@needs_c
def test_parity_counterexample():
    rng = random.Random(4)
    left_zero = np.array([[0, 0], [1, 1]], dtype=np.int64)
    for _ in range(50):
        u = [rng.randrange(2) for _ in range(rng.randint(1, 3))]
        v = [rng.randrange(2) for _ in range(rng.randint(1, 3))]
        a = _ckernels.find_counterexample(left_zero, 2, [], (u, v), None)
        b = _pykernels.find_counterexample(left_zero, 2, [], (u, v), None)
        assert (None if a is None else tuple(a)) == (None if b is None else tuple(b))
