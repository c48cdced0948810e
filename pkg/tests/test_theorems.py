from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from walkgen.errors import InsufficientOrderError
from walkgen.graphs import cancelling_square, k2, path3, star5, zero_return_triangle
from walkgen.grids import encode, grid_oracle
from walkgen.series import EXACT, FLOAT, ConvergencePolicy, Mode
from walkgen.theorems import (
    ASSERTED,
    EVIDENCED,
    FAILED,
    THEOREM_IDS,
    VERIFIED,
    absolute_sum_bound,
    evaluate,
    oracle_meta,
    report_to_json,
)
from walkgen.scalars import gauss
from walkgen.walks import EdgeListOracle, coefficients


def run(oracle, v, N, backend=EXACT, flags=None, series=None, policy=ConvergencePolicy()):
    bundle = coefficients(oracle, v, N, backend)
    meta = oracle_meta(oracle, N, v, policy, flags)
    return evaluate(bundle, meta, policy, series)


def resolvent_sums(oracle, v=None):
    """D(1), B(1) and the v-avoiding D(1) from (I - W)^-1 on a finite graph."""
    ids = oracle.vertices()
    idx = {u: i for i, u in enumerate(ids)}
    W = np.zeros((len(ids), len(ids)), dtype=complex)
    for a, b, w in oracle.edges:
        W[idx[a], idx[b]] = W[idx[b], idx[a]] = complex(w)
    G = np.linalg.inv(np.eye(len(ids)) - W)
    r = idx[oracle.root]
    D = G[r].sum()
    B = G[r, r]
    if v is None:
        return D, B, None
    keep = [i for i in range(len(ids)) if i != idx[v]]
    Gv = np.linalg.inv(np.eye(len(keep)) - W[np.ix_(keep, keep)])
    return D, B, D - Gv[keep.index(r)].sum()


def test_every_theorem_reported():
    ev = run(k2(), 2, 64)
    assert [r.theorem_id for r in ev.reports] == list(THEOREM_IDS)


def test_order_too_short():
    with pytest.raises(InsufficientOrderError):
        run(k2(), 2, 10)


def test_k2_forced_walk():
    ev = run(k2(), 2, 64)
    t12 = ev["T12"]
    assert t12.applicable and t12.result == 1
    assert set(t12.branches) == {1, -1}
    assert ev["T3"].result == math.inf and ev["T3"].grade == VERIFIED
    assert ev["T6"].result == 1
    assert ev.preferred.theorem_id == "T3"
    assert not ev["T4"].applicable


def test_line_is_recurrent():
    ev = run(grid_oracle(1), None, 1024, FLOAT)
    assert ev["T6"].applicable and ev["T6"].result == 1
    assert ev["T6"].hypothesis("convex").grade == VERIFIED
    assert not ev["T4"].applicable


def test_light_nonconvex_finite_graph_sums():
    g = path3(Fraction(1, 4))
    D, B, Av = resolvent_sums(g, 3)
    ev = run(g, 3, 96)
    assert ev["T1"].applicable and ev["T2"].applicable
    A = (1 - 1 / B) * D
    assert complex(ev["T1"].result) == pytest.approx(A, abs=1e-9)
    assert complex(ev["T2"].result) == pytest.approx(A, abs=1e-9)
    assert ev["T7"].applicable
    assert complex(ev["T7"].result) == pytest.approx(Av, abs=1e-9)
    assert not ev["T4"].applicable
    assert ev["T4"].hypothesis("convex").grade == FAILED


def test_complex_weight_sum():
    g = EdgeListOracle([(1, 2, gauss(Fraction(1, 5), Fraction(1, 7))), (2, 3, Fraction(-1, 4)),
                        (1, 3, Fraction(1, 6))])
    D, B, _ = resolvent_sums(g)
    ev = run(g, None, 96)
    assert complex(ev["T1"].result) == pytest.approx((1 - 1 / B) * D, abs=1e-9)


def test_star_bound_fails_with_heavy_weights():
    ev = run(star5(1), 2, 64)
    assert not ev["T2"].applicable


def test_convex_hypothesis_overridden_by_assertion():
    ev = run(path3(Fraction(1, 4)), 3, 96, flags={"convex": True})
    h = ev["T4"].hypothesis("convex")
    assert h.grade == ASSERTED
    assert "false" in h.evidence.lower() or "fail" in h.evidence.lower()


def test_series_assertion_replaces_classifier():
    ev = run(k2(Fraction(1, 2)), 2, 64, series={"B": "+inf"})
    assert ev.verdicts["b"].mode is Mode.DIVERGES_TO_PLUS_INFINITY
    assert not ev.verdicts["b"].heuristic


def test_zero_return_triangle_reads_zero_over_zero_as_one():
    ev = run(zero_return_triangle(), 2, 128, flags={"convex": True})
    for tid in ("T7star", "T10star"):
        rep = ev[tid]
        assert rep.applicable, tid
        assert rep.result == 0
        assert rep.warnings
    assert not ev["T7"].applicable
    assert ev["T7"].hypothesis("B(1) != 0 (conclusion)").grade == FAILED


def test_cancelling_square_short_circuit():
    ev = run(cancelling_square(), 4, 64, flags={"convex": True})
    for tid in ("T8", "T11"):
        rep = ev[tid]
        assert rep.applicable and rep.result == 0, tid
    assert any(h.grade == VERIFIED for h in ev["T8"].hypotheses if "B_v" in h.name)


def test_absolute_sum_bound_geometric():
    from walkgen.series import TruncatedSeries

    s = TruncatedSeries.geometric(0.25, 200, FLOAT)
    bound = absolute_sum_bound(s)
    assert bound["total"] == pytest.approx(1 / 3, rel=1e-9)


def test_plane_neighbour_first_passage():
    ev = run(grid_oracle(2), encode((1, 0)), 128, FLOAT)
    assert ev["T12"].applicable and ev["T12"].result == 1
    assert ev["T12"].hypothesis("v-transitive").grade == ASSERTED


def test_cubic_lattice_transient():
    ev = run(grid_oracle(3), None, 64, FLOAT)
    t4 = ev["T4"]
    assert t4.applicable and t4.grade == EVIDENCED
    assert 0.25 < t4.result < 0.45
    assert t4.cross_check is not None


def test_report_json():
    ev = run(k2(), 2, 64)
    data = json.loads(json.dumps([report_to_json(r) for r in ev.reports]))
    t3 = next(d for d in data if d["theorem_id"] == "T3")
    assert t3["result"] == "+inf" and t3["schema"] == 1
    assert all("hypotheses" in d for d in data)
