"""Nearest-neighbour walks on the integer lattice, embedded in the positive integers.

Lattice points are mapped to vertex ids by folding each coordinate onto
the nonnegative integers (``z -> 2z`` or ``-2z-1``), combining coordinates
with iterated Cantor pairing, and adding one, so the origin becomes the
root ``1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import sparse

from .errors import ResourceBudgetError, UsageError
from .series import EXACT, FLOAT, TruncatedSeries, partial_sums
from .walks import Ball, WeightOracle, coefficients

__all__ = [
    "GridSpec",
    "GridOracle",
    "encode",
    "decode",
    "encode_many",
    "grid_oracle",
    "dp_budget",
    "ball_size",
    "polya_column",
    "polya_probability",
    "lattice_return_series",
]

# largest walk length the grid dynamic program accepts, per dimension
DP_BUDGET = {1: 4096, 2: 512, 3: 128}
MAX_BALL = 3_000_000


def _fold(z: int) -> int:
    return 2 * z if z >= 0 else -2 * z - 1


def _unfold(n: int) -> int:
    return n // 2 if n % 2 == 0 else -(n + 1) // 2


def _pair(a: int, b: int) -> int:
    s = a + b
    return s * (s + 1) // 2 + b


def _unpair(z: int) -> tuple[int, int]:
    w = (math.isqrt(8 * z + 1) - 1) // 2
    b = z - w * (w + 1) // 2
    return w - b, b


def encode(point: Sequence[int]) -> int:
    """Vertex id of a lattice point; the origin maps to 1."""
    pt = [int(x) for x in point]
    if not pt:
        raise UsageError("a lattice point needs at least one coordinate")
    acc = _fold(pt[0])
    for z in pt[1:]:
        acc = _pair(acc, _fold(z))
    return acc + 1


def decode(vid: int, d: int) -> tuple[int, ...]:
    """Inverse of :func:`encode` for dimension ``d``."""
    if vid < 1:
        raise UsageError(f"vertex ids start at 1, got {vid}")
    z = int(vid) - 1
    folded = []
    for _ in range(d - 1):
        z, b = _unpair(z)
        folded.append(b)
    folded.append(z)
    return tuple(_unfold(x) for x in reversed(folded))


def encode_many(points: np.ndarray) -> np.ndarray:
    """Vectorised :func:`encode` over the rows of an integer array."""
    pts = np.asarray(points, dtype=np.int64)
    if pts.ndim == 1:
        pts = pts[:, None]
    folded = np.where(pts >= 0, 2 * pts, -2 * pts - 1)
    acc = folded[:, 0].copy()
    for i in range(1, pts.shape[1]):
        b = folded[:, i]
        s = acc + b
        if len(s) and int(s.max()) > 3_000_000_000:
            raise ResourceBudgetError("lattice ball too large for 64-bit vertex ids")
        acc = s * (s + 1) // 2 + b
    return acc + 1


@dataclass(frozen=True)
class GridSpec:
    """Dimension ``d`` and target lattice point for the nearest-neighbour walk."""

    d: int
    target: tuple[int, ...] | None = None

    def __post_init__(self):
        if int(self.d) < 1:
            raise UsageError("dimension must be at least 1")
        object.__setattr__(self, "d", int(self.d))
        t = (0,) * self.d if self.target is None else tuple(int(x) for x in self.target)
        if len(t) != self.d:
            raise UsageError(f"target {t} does not have {self.d} coordinates")
        object.__setattr__(self, "target", t)

    @property
    def target_is_origin(self) -> bool:
        return not any(self.target)


def ball_size(d: int, radius: int) -> int:
    """Number of lattice points with l1 norm at most ``radius``."""
    return sum(2 ** k * math.comb(d, k) * math.comb(radius, k) for k in range(min(d, radius) + 1))


def dp_budget(d: int) -> int:
    """Largest order the grid dynamic program accepts in dimension ``d``."""
    if d in DP_BUDGET:
        return DP_BUDGET[d]
    r = 0
    while ball_size(d, r + 1) <= MAX_BALL:
        r += 1
    return r


def _ball_points(d: int, radius: int) -> np.ndarray:
    pts = np.arange(-radius, radius + 1, dtype=np.int64)[:, None]
    for _ in range(1, d):
        slack = radius - np.abs(pts).sum(axis=1)
        counts = 2 * slack + 1
        rep = np.repeat(pts, counts, axis=0)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        offs = np.arange(len(rep), dtype=np.int64) - starts
        last = offs - np.repeat(slack, counts)
        pts = np.hstack([rep, last[:, None]])
    return pts


class GridOracle(WeightOracle):
    """Nearest-neighbour walk on the ``d``-dimensional lattice, weight ``1/(2d)``."""

    convex_by_construction = True

    def __init__(self, spec: GridSpec):
        super().__init__(root=1, v_transitive=True, witness="translation by the target point")
        self.spec = spec
        self.d = spec.d
        self.weight = Fraction(1, 2 * spec.d)
        self.target_id = encode(spec.target)

    def neighbors(self, u: int) -> list[tuple[int, object]]:
        p = decode(int(u), self.d)
        out = []
        for i in range(self.d):
            for s in (1, -1):
                q = list(p)
                q[i] += s
                out.append((encode(q), self.weight))
        out.sort(key=lambda t: t[0])
        return out

    def is_real_nonnegative(self, radius: int) -> bool:
        return True

    def check_budget(self, order: int) -> None:
        limit = dp_budget(self.d)
        if order > limit:
            raise ResourceBudgetError(
                f"order {order} exceeds the dynamic-program budget {limit} for d={self.d}"
            )

    def ball(self, radius: int, backend: str = EXACT) -> Ball:
        self.check_budget(radius)
        if backend == EXACT:
            return Ball.from_oracle(self, radius, EXACT)
        return self._float_ball(radius)

    def _float_ball(self, radius: int) -> Ball:
        d = self.d
        pts = _ball_points(d, radius)
        ids = encode_many(pts)
        order = np.argsort(ids, kind="stable")
        ids, pts = ids[order], pts[order]
        n = len(ids)
        itype = np.int32 if n < 2**31 else np.int64
        norms = np.abs(pts).sum(axis=1)
        rows, cols = [], []
        idx = np.arange(n, dtype=itype)
        for i in range(d):
            for s in (1, -1):
                q = pts.copy()
                q[:, i] += s
                inside = norms - np.abs(pts[:, i]) + np.abs(q[:, i]) <= radius
                qid = encode_many(q[inside])
                rows.append(idx[inside])
                cols.append(np.searchsorted(ids, qid).astype(itype))
                del q
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        data = np.full(len(rows), 1.0 / (2 * d))
        m = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
        m.sort_indices()
        return Ball.from_matrix(ids, m, radius)


def grid_oracle(spec: GridSpec | int) -> GridOracle:
    if not isinstance(spec, GridSpec):
        spec = GridSpec(int(spec))
    return GridOracle(spec)


def polya_column(spec: GridSpec, N: int, backend: str = EXACT) -> TruncatedSeries:
    """Probabilities ``P(target visited at some step in 1..n)`` for ``n <= N``.

    Grid weights are convex, so ``D = 1/(1-x)`` and the column is the
    running sum of the nonnegative first-arrival series.  This keeps the
    float column monotone instead of drifting by an ulp at odd steps.
    """
    oracle = grid_oracle(spec)
    oracle.check_budget(N)
    if spec.target_is_origin:
        return partial_sums(coefficients(oracle, None, N, backend).c)
    return partial_sums(coefficients(oracle, oracle.target_id, N, backend).c_v)


def polya_probability(spec: GridSpec, n: int, backend: str = EXACT):
    """Probability that the walk from the origin visits the target within ``n`` steps."""
    if n < 0:
        raise UsageError("n must be nonnegative")
    return polya_column(spec, n, backend)[n]


def lattice_return_series(d: int, N: int, backend: str = EXACT) -> TruncatedSeries:
    """Return-to-origin probabilities ``b_n`` for ``n <= N`` from closed forms.

    ``d = 1``: ``C(2m, m) / 4^m``; ``d = 2``: its square; ``d = 3``:
    ``q_m = t_m / 36^m`` where ``t_m`` counts closed walks of length ``2m``
    and satisfies ``m^3 t_m = 2(2m-1)(10m^2-10m+3) t_{m-1}
    - 36(m-1)(2m-1)(2m-3) t_{m-2}``.  Odd coefficients are zero.
    """
    if d not in (1, 2, 3):
        raise UsageError(f"closed-form return series only for d in (1, 2, 3), got {d}")
    if N < 0:
        raise UsageError("order must be nonnegative")
    M = N // 2
    if backend == EXACT:
        q = [Fraction(1)]
        if d in (1, 2):
            r = Fraction(1)
            for m in range(1, M + 1):
                r = r * Fraction(2 * m - 1, 2 * m)
                q.append(r if d == 1 else r * r)
        else:
            t = [1, 6]
            for m in range(2, M + 1):
                num = 2 * (2 * m - 1) * (10 * m * m - 10 * m + 3) * t[m - 1] - 36 * (m - 1) * (2 * m - 1) * (2 * m - 3) * t[m - 2]
                t.append(num // m ** 3)
            q = [Fraction(t[m], 36 ** m) for m in range(M + 1)]
        out = [Fraction(0)] * (N + 1)
        for m in range(M + 1):
            out[2 * m] = q[m]
        return TruncatedSeries(out, EXACT)
    q = np.zeros(M + 1)
    q[0] = 1.0
    if d in (1, 2):
        m = np.arange(1, M + 1, dtype=float)
        r = np.concatenate([[1.0], np.cumprod((2 * m - 1) / (2 * m))])
        q = r if d == 1 else r * r
    else:
        if M >= 1:
            q[1] = 6.0 / 36.0
        for m in range(2, M + 1):
            q[m] = (2 * (2 * m - 1) * (10 * m * m - 10 * m + 3) * q[m - 1] / 36.0
                    - (m - 1) * (2 * m - 1) * (2 * m - 3) * q[m - 2] / 36.0) / m ** 3
    out = np.zeros(N + 1)
    out[0 : 2 * M + 1 : 2] = q
    return TruncatedSeries(out, FLOAT)
