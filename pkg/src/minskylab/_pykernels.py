"""Pure-Python kernels. Same contracts as ``_ckernels.pyx``."""
from itertools import product


def lex_normal(word, commute):
    rest = list(word)
    out = []
    while rest:
        best = -1
        seen = []
        for i, x in enumerate(rest):
            if all(commute[y][x] for y in seen):
                if best < 0 or x < rest[best]:
                    best = i
            seen.append(x)
        out.append(rest.pop(best))
    return out


def two_factors(word, commute):
    """All (x, y) that occur as a length-2 factor of some rearrangement of ``word``."""
    n = len(word)
    out = set()
    for s in range(n):
        x = word[s]
        # positions between s and t that must follow s
        after = []
        for t in range(s + 1, n):
            y = word[t]
            ok = True
            for u in after:
                if not commute[word[u]][y]:
                    ok = False
                    break
            if ok:
                out.add((x, y))
                if commute[x][y]:
                    out.add((y, x))
            if not commute[x][y] or any(not commute[word[u]][y] for u in after):
                after.append(t)
    return out


def check_assoc(table):
    n = len(table)
    for a in range(n):
        ra = table[a]
        for b in range(n):
            ab = ra[b]
            rab = table[ab]
            rb = table[b]
            for c in range(n):
                if rab[c] != ra[rb[c]]:
                    return (a, b, c)
    return None


def _ev(table, word, assign, zero):
    v = -2
    for x in word:
        y = zero if x < 0 else assign[x]
        v = y if v == -2 else table[v][y]
    return v


def find_counterexample(table, nvars, premises, conclusion, zero):
    n = len(table)
    for assign in product(range(n), repeat=nvars):
        if all(_ev(table, u, assign, zero) == _ev(table, v, assign, zero) for u, v in premises):
            u, v = conclusion
            if _ev(table, u, assign, zero) != _ev(table, v, assign, zero):
                return assign
    return None
