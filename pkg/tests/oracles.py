"""Naive reference computations shared by the tests."""

from __future__ import annotations

from fractions import Fraction
from math import comb


def all_walks(oracle, n):
    """Yield (vertices, weight) for every nonzero-weight walk of length n from the root."""
    stack = [([oracle.root], Fraction(1))]
    while stack:
        path, w = stack.pop()
        if len(path) == n + 1:
            yield path, w
            continue
        for x, c in oracle.neighbors(path[-1]):
            stack.append((path + [x], w * c))


def naive_series(oracle, v, N):
    """The eight coefficient lists computed straight from their walk definitions."""
    out = {k: [] for k in ("a", "b", "c", "d", "a_v", "b_v", "c_v", "e_v")}
    r = oracle.root
    for n in range(N + 1):
        acc = dict.fromkeys(out, Fraction(0))
        for path, w in all_walks(oracle, n):
            after = path[1:]
            interior = path[1:-1]
            acc["d"] += w
            if r in after:
                acc["a"] += w
            if path[-1] == r:
                acc["b"] += w
                if n >= 1 and r not in interior:
                    acc["c"] += w
            if v is None:
                continue
            if v in after:
                acc["a_v"] += w
            if path[-1] == r and v not in after:
                acc["b_v"] += w
            if n >= 1 and path[-1] == v and v not in interior:
                acc["c_v"] += w
                if r not in interior:
                    acc["e_v"] += w
        for k in out:
            out[k].append(acc[k])
    if v is None:
        for k in ("a_v", "b_v", "c_v", "e_v"):
            del out[k]
    return out


def line_return(m):
    """Probability that the simple walk on the line is at 0 after 2m steps."""
    return Fraction(comb(2 * m, m), 4 ** m)
