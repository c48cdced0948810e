from __future__ import annotations

from fractions import Fraction
from math import comb, factorial

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import line_return
from walkgen.errors import ResourceBudgetError, UsageError
from walkgen.grids import (
    GridSpec,
    ball_size,
    decode,
    dp_budget,
    encode,
    encode_many,
    grid_oracle,
    lattice_return_series,
    polya_column,
    polya_probability,
)
from walkgen.series import EXACT, FLOAT
from walkgen.verifier import WalkConstraint, enumerate_walks
from walkgen.walks import coefficients


def cubic_return(m):
    """Multinomial sum for closed walks of length 2m on the cubic lattice."""
    s = sum((factorial(m) // (factorial(j) * factorial(k) * factorial(m - j - k))) ** 2
            for j in range(m + 1) for k in range(m + 1 - j))
    return Fraction(comb(2 * m, m) * s, 36 ** m)


def test_origin_is_root():
    for d in range(1, 5):
        assert encode((0,) * d) == 1


@given(st.lists(st.integers(-10 ** 4, 10 ** 4), min_size=1, max_size=4))
def test_encode_round_trip(pt):
    assert decode(encode(pt), len(pt)) == tuple(pt)


def test_encode_round_trip_bulk():
    rng = np.random.default_rng(0)
    pts = rng.integers(-500, 501, size=(100_000, 3))
    ids = encode_many(pts)
    assert len(set(ids.tolist())) == len({tuple(p) for p in pts.tolist()})
    for p, i in zip(pts[:2000].tolist(), ids[:2000].tolist()):
        assert encode(p) == i and decode(i, 3) == tuple(p)


def test_encode_is_a_bijection_on_small_ids():
    ids = sorted(encode((x, y)) for x in range(-20, 21) for y in range(-20, 21) if abs(x) + abs(y) <= 3)
    assert len(set(ids)) == len(ids)
    for i in range(1, 200):
        assert encode(decode(i, 2)) == i


def test_grid_oracle_degree_and_weights():
    for d in (1, 3):
        g = grid_oracle(d)
        nb = g.neighbors(1)
        assert len(nb) == 2 * d
        assert all(w == Fraction(1, 2 * d) for _, w in nb)
        assert g.v_transitive and g.convex_by_construction


def test_target_id():
    g = grid_oracle(GridSpec(2, (1, 0)))
    assert g.target_id == encode((1, 0))
    with pytest.raises(UsageError):
        GridSpec(2, (1,))
    with pytest.raises(UsageError):
        GridSpec(0)


def test_ball_size():
    assert ball_size(1, 5) == 11
    assert ball_size(2, 2) == 13
    assert ball_size(3, 1) == 7
    assert len(grid_oracle(2).ball(4, FLOAT).ids) == ball_size(2, 4)


def test_float_ball_matches_exact_ball():
    g = grid_oracle(3)
    fb = g.ball(5, FLOAT)
    eb = g.ball(5, EXACT).to_float()
    assert np.array_equal(fb.ids, eb.ids)
    assert abs(fb.matrix - eb.matrix).max() == 0


def test_polya_examples():
    assert polya_probability(GridSpec(1), 2) == Fraction(1, 2)
    assert polya_probability(GridSpec(1), 4) == Fraction(5, 8)
    for d in (1, 2, 3):
        assert polya_probability(GridSpec(d, (1,) + (0,) * (d - 1)), 0) == 0


def test_polya_brute_force_line():
    for n in range(1, 9):
        w, _ = enumerate_walks(grid_oracle(1), WalkConstraint(n, require_visit_after_start=1))
        assert polya_probability(GridSpec(1), n) == w


def test_polya_monotone_and_bounded():
    for spec in (GridSpec(2), GridSpec(2, (1, 1)), GridSpec(3, (1, 0, 0))):
        col = polya_column(spec, 20)
        vals = list(col.coeffs)
        assert all(0 <= x <= 1 for x in vals)
        assert all(x <= y for x, y in zip(vals, vals[1:]))


def test_budget_enforced():
    with pytest.raises(ResourceBudgetError):
        polya_column(GridSpec(3), dp_budget(3) + 1, FLOAT)
    assert dp_budget(4) > 0


def test_closed_forms():
    assert lattice_return_series(1, 4).coeffs == (1, 0, Fraction(1, 2), 0, Fraction(3, 8))
    assert lattice_return_series(2, 4).coeffs == (1, 0, Fraction(1, 4), 0, Fraction(9, 64))
    assert lattice_return_series(3, 2)[2] == Fraction(1, 6)
    with pytest.raises(UsageError):
        lattice_return_series(4, 4)


def test_cubic_recurrence_matches_multinomial_sum():
    s = lattice_return_series(3, 40)
    for m in range(21):
        assert s[2 * m] == cubic_return(m)
        assert s[2 * m + 1] == 0 if 2 * m + 1 <= 40 else True


def test_float_closed_forms_match_exact():
    for d in (1, 2, 3):
        ex = lattice_return_series(d, 200).to_float().coeffs
        fl = lattice_return_series(d, 200, FLOAT).coeffs
        np.testing.assert_allclose(fl, ex, rtol=1e-12, atol=0)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_dp_return_series_matches_closed_form(d):
    N = 30
    if d < 3:
        assert coefficients(grid_oracle(d), None, N).b == lattice_return_series(d, N)
    else:
        dp = coefficients(grid_oracle(d), None, N, backend=FLOAT).b.coeffs
        np.testing.assert_allclose(dp, lattice_return_series(3, N, FLOAT).coeffs, rtol=1e-12, atol=1e-300)
    assert [lattice_return_series(1, N)[2 * m] for m in range(N // 2 + 1)] == \
        [line_return(m) for m in range(N // 2 + 1)]


@pytest.mark.parametrize("d", [1, 2, 3])
def test_translation_symmetry(d):
    # walks 0 -> e1 weigh the same as walks e1 -> 0
    e1 = (1,) + (0,) * (d - 1)
    g = grid_oracle(d)
    fwd = coefficients(g, None, 8)
    for n in range(1, 8):
        there, _ = enumerate_walks(g, WalkConstraint(n, end_at=encode(e1)))
        back = _walks_between(g, encode(e1), 1, n)
        assert there == back


def _walks_between(g, start, end, n):
    frontier = {start: Fraction(1)}
    for _ in range(n):
        nxt = {}
        for u, w in frontier.items():
            for x, c in g.neighbors(u):
                nxt[x] = nxt.get(x, 0) + w * c
        frontier = nxt
    return frontier.get(end, Fraction(0))


@pytest.mark.parametrize("spec", [GridSpec(2), GridSpec(2, (1, 1)), GridSpec(1, (3,))])
def test_polya_column_equals_dp_visit_series(spec):
    g = grid_oracle(spec)
    b = coefficients(g, None if spec.target_is_origin else g.target_id, 14)
    assert polya_column(spec, 14) == (b.a if spec.target_is_origin else b.a_v)
