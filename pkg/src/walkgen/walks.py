"""Weight oracles and the dynamic program for the eight walk series.

A weight oracle describes a graph embedded in the complete graph on the
positive integers: ``neighbors(u)`` lists ``(w, h({u, w}))`` for every
``w`` joined to ``u`` by a nonzero weight.  Walks start at ``root``; a
length-``N`` walk never leaves the ball of radius ``N`` around the root, so
the dynamic program materialises only that ball.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import sparse

from .errors import GraphFormatError, UsageError
from .scalars import exact_abs, is_real, to_exact, to_float
from .series import EXACT, FLOAT, TruncatedSeries, mul

__all__ = [
    "WeightOracle",
    "EdgeListOracle",
    "FunctionOracle",
    "Ball",
    "Walk",
    "CoefficientBundle",
    "SEQUENCE_NAMES",
    "V_SEQUENCE_NAMES",
    "reachable_set",
    "coefficients",
    "ConvexityReport",
    "check_convexity",
    "check_slimness_bound",
]

SEQUENCE_NAMES = ("a", "b", "c", "d")
V_SEQUENCE_NAMES = ("a_v", "b_v", "c_v", "e_v")


class WeightOracle:
    """Base class for graphs presented through a neighbour function.

    Subclasses implement :meth:`neighbors`.  ``v_transitive`` is a
    declaration, never checked: it records that some weight-preserving
    vertex bijection maps the root to every target the caller uses.
    """

    convex_by_construction = False

    def __init__(self, root: int = 1, v_transitive: bool = False, witness: str | None = None):
        if not isinstance(root, (int, np.integer)) or root < 1:
            raise UsageError(f"root must be a positive integer id, got {root!r}")
        self.root = int(root)
        self.v_transitive = bool(v_transitive)
        self.transitivity_witness = witness

    def neighbors(self, u: int) -> list[tuple[int, object]]:
        raise NotImplementedError

    def declare_transitive(self, flag: bool = True, witness: str | None = None) -> WeightOracle:
        """Set the transitivity declaration in place and return self."""
        self.v_transitive = bool(flag)
        self.transitivity_witness = witness if flag else None
        return self

    def ball(self, radius: int, backend: str = EXACT) -> Ball:
        """Vertices within ``radius`` edges of the root, with their edges."""
        return Ball.from_oracle(self, radius, backend)

    def is_real_nonnegative(self, radius: int) -> bool:
        """True if every edge weight inside the ball is real and >= 0."""
        return self.ball(radius, EXACT).real_nonnegative()


def _clean_neighbors(u: int, items) -> list[tuple[int, object]]:
    out = []
    for w, c in items:
        w = int(w)
        if w == u:
            raise GraphFormatError(f"self-loop at vertex {u}")
        if w < 1:
            raise GraphFormatError(f"vertex ids must be positive, got {w}")
        if c != 0:
            out.append((w, c))
    out.sort(key=lambda t: t[0])
    return out


class EdgeListOracle(WeightOracle):
    """Finite graph given by a list of weighted edges ``(u, v, weight)``."""

    def __init__(self, edges: Iterable[tuple[int, int, object]], root: int = 1,
                 v_transitive: bool = False, witness: str | None = None, name: str | None = None):
        super().__init__(root, v_transitive, witness)
        self.name = name
        adj: dict[int, dict[int, object]] = {}
        self.edges: list[tuple[int, int, object]] = []
        for e in edges:
            if len(e) != 3:
                raise GraphFormatError(f"edge must be (u, v, weight), got {e!r}")
            u, v, w = e
            u, v = int(u), int(v)
            if u < 1 or v < 1:
                raise GraphFormatError(f"vertex ids must be positive, got {u}, {v}")
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if v in adj.get(u, {}):
                raise GraphFormatError(f"duplicate edge {key}")
            w = to_exact(w)
            self.edges.append((key[0], key[1], w))
            if w == 0:
                continue
            adj.setdefault(u, {})[v] = w
            adj.setdefault(v, {})[u] = w
        self._adj = {u: sorted(nb.items()) for u, nb in adj.items()}

    def neighbors(self, u: int) -> list[tuple[int, object]]:
        return list(self._adj.get(int(u), []))

    def vertices(self) -> list[int]:
        vs = {self.root}
        for u, v, _ in self.edges:
            vs.update((u, v))
        return sorted(vs)


class FunctionOracle(WeightOracle):
    """Graph whose neighbourhoods are computed on demand by a callable."""

    def __init__(self, fn: Callable[[int], Iterable[tuple[int, object]]], root: int = 1,
                 v_transitive: bool = False, witness: str | None = None):
        super().__init__(root, v_transitive, witness)
        self._fn = fn

    def neighbors(self, u: int) -> list[tuple[int, object]]:
        return _clean_neighbors(int(u), ((w, to_exact(c)) for w, c in self._fn(int(u))))


@dataclass
class Ball:
    """Vertices within a radius of the root and the edges among them.

    ``ids`` is sorted.  The exact form keeps adjacency lists of
    ``(index, weight)``; the float form keeps a symmetric CSR matrix.
    """

    ids: np.ndarray
    radius: int
    adjacency: list | None = None
    matrix: sparse.csr_matrix | None = None
    _index: dict | None = field(default=None, repr=False)

    @classmethod
    def from_oracle(cls, oracle: WeightOracle, radius: int, backend: str = EXACT) -> Ball:
        if radius < 0:
            raise UsageError("radius must be nonnegative")
        dist = {oracle.root: 0}
        queue = deque([oracle.root])
        nbrs: dict[int, list] = {}
        while queue:
            u = queue.popleft()
            nb = oracle.neighbors(u)
            nbrs[u] = nb
            if dist[u] == radius:
                continue
            for w, c in nb:
                if w not in dist and c != 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        ids = np.array(sorted(dist), dtype=np.int64)
        index = {int(u): i for i, u in enumerate(ids)}
        adjacency = []
        for u in ids:
            row = [(index[w], to_exact(c)) for w, c in nbrs[int(u)] if w in index and c != 0]
            row.sort(key=lambda t: t[0])
            adjacency.append(row)
        ball = cls(ids=ids, radius=radius, adjacency=adjacency, _index=index)
        if backend == FLOAT:
            ball = ball.to_float()
        return ball

    @classmethod
    def from_matrix(cls, ids: np.ndarray, matrix: sparse.csr_matrix, radius: int) -> Ball:
        return cls(ids=np.asarray(ids, dtype=np.int64), radius=radius, matrix=matrix.tocsr())

    @property
    def size(self) -> int:
        return len(self.ids)

    def index_of(self, u: int) -> int | None:
        if self._index is not None:
            return self._index.get(int(u))
        i = int(np.searchsorted(self.ids, u))
        if i < len(self.ids) and self.ids[i] == u:
            return i
        return None

    def to_float(self) -> Ball:
        if self.matrix is not None:
            return self
        rows, cols, vals = [], [], []
        for i, row in enumerate(self.adjacency):
            for j, c in row:
                rows.append(i)
                cols.append(j)
                vals.append(to_float(c))
        dtype = complex if any(isinstance(x, complex) for x in vals) else float
        n = len(self.ids)
        m = sparse.csr_matrix((np.array(vals, dtype=dtype), (rows, cols)), shape=(n, n))
        m.sort_indices()
        return Ball(ids=self.ids, radius=self.radius, matrix=m, _index=self._index)

    def to_exact(self) -> Ball:
        if self.adjacency is not None:
            return self
        m = self.matrix.tocsr()
        adjacency = []
        for i in range(m.shape[0]):
            lo, hi = m.indptr[i], m.indptr[i + 1]
            adjacency.append([(int(j), to_exact(x.item())) for j, x in zip(m.indices[lo:hi], m.data[lo:hi])])
        return Ball(ids=self.ids, radius=self.radius, adjacency=adjacency, _index=self._index)

    def real_nonnegative(self) -> bool:
        if self.adjacency is not None:
            return all(is_real(c) and c >= 0 for row in self.adjacency for _, c in row)
        d = self.matrix.data
        return (not np.iscomplexobj(d)) and bool(np.all(d >= 0))


@dataclass(frozen=True)
class Walk:
    """A vertex sequence with distinct consecutive vertices and its weight."""

    vertices: tuple[int, ...]
    weight: object = Fraction(1)

    def __post_init__(self):
        if not self.vertices:
            raise UsageError("a walk has at least its start vertex")
        for x, y in zip(self.vertices, self.vertices[1:]):
            if x == y:
                raise UsageError(f"consecutive repeat of vertex {x}")

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def end(self) -> int:
        return self.vertices[-1]

    @classmethod
    def along(cls, oracle: WeightOracle, vertices: Sequence[int]) -> Walk:
        """Build the walk and multiply its edge weights (1 for no steps)."""
        vs = tuple(int(x) for x in vertices)
        w = Fraction(1)
        for x, y in zip(vs, vs[1:]):
            c = dict(oracle.neighbors(x)).get(y, 0)
            w = w * to_exact(c)
        return cls(vs, w)


def reachable_set(oracle: WeightOracle, n: int) -> set[int]:
    """Vertices reachable from the root by at most ``n`` nonzero edges."""
    if n < 0:
        raise UsageError("n must be nonnegative")
    return {int(u) for u in oracle.ball(n, EXACT).ids}


@dataclass(frozen=True)
class CoefficientBundle:
    """The walk series ``a, b, c, d`` and, for a target ``v``, ``a_v, b_v, c_v, e_v``."""

    order: int
    backend: str
    root: int
    a: TruncatedSeries
    b: TruncatedSeries
    c: TruncatedSeries
    d: TruncatedSeries
    v: int | None = None
    a_v: TruncatedSeries | None = None
    b_v: TruncatedSeries | None = None
    c_v: TruncatedSeries | None = None
    e_v: TruncatedSeries | None = None
    v_in_ball: bool = True

    @property
    def has_v(self) -> bool:
        return self.v is not None

    def names(self) -> tuple[str, ...]:
        return SEQUENCE_NAMES + (V_SEQUENCE_NAMES if self.has_v else ())

    def series(self) -> dict[str, TruncatedSeries]:
        return {k: getattr(self, k) for k in self.names()}

    def rows(self) -> list[tuple]:
        """One tuple ``(n, a_n, b_n, ...)`` per order, in column order."""
        cols = [getattr(self, k).as_list() for k in self.names()]
        return [(n, *(c[n] for c in cols)) for n in range(self.order + 1)]

    def to_float(self) -> CoefficientBundle:
        kw = {k: getattr(self, k).to_float() for k in self.names()}
        return CoefficientBundle(self.order, FLOAT, self.root, v=self.v, v_in_ball=self.v_in_ball, **kw)

    def truncate(self, order: int) -> CoefficientBundle:
        kw = {k: getattr(self, k).truncate(order) for k in self.names()}
        return CoefficientBundle(order, self.backend, self.root, v=self.v, v_in_ball=self.v_in_ball, **kw)


class _ExactStepper:
    def __init__(self, ball: Ball):
        self.adj = ball.adjacency
        self.n = ball.size

    def step(self, s: list) -> list:
        out = [0] * self.n
        adj = self.adj
        for i, x in enumerate(s):
            if x:
                for j, w in adj[i]:
                    out[j] += x * w
        return out


def _run_exact(ball: Ball, r: int, vi: int | None, N: int) -> dict[str, list]:
    n = ball.size
    stepper = _ExactStepper(ball)
    zero = Fraction(0)
    plain = [zero] * n
    plain[r] = Fraction(1)
    first = list(plain)
    seq = {k: [] for k in ("b", "c", "d")}
    seq["d"].append(Fraction(1))
    seq["b"].append(Fraction(1))
    seq["c"].append(zero)
    if vi is not None:
        avoid = list(plain)
        enter = list(plain)
        for k in V_SEQUENCE_NAMES:
            seq[k] = []
        seq["a_v"].append(zero)
        seq["b_v"].append(Fraction(1))
        seq["c_v"].append(zero)
        seq["e_v"].append(zero)
    for _ in range(1, N + 1):
        plain = stepper.step(plain)
        dn = sum(plain, zero)
        seq["d"].append(dn)
        seq["b"].append(plain[r])
        first = stepper.step(first)
        seq["c"].append(first[r])
        first[r] = zero
        if vi is not None:
            avoid = stepper.step(avoid)
            seq["c_v"].append(avoid[vi])
            avoid[vi] = zero
            seq["b_v"].append(avoid[r])
            seq["a_v"].append(dn - sum(avoid, zero))
            enter = stepper.step(enter)
            seq["e_v"].append(enter[vi])
            enter[vi] = zero
            enter[r] = zero
    return seq


def _run_float(ball: Ball, r: int, vi: int | None, N: int) -> dict[str, np.ndarray]:
    A = ball.matrix
    n = ball.size
    k = 2 if vi is None else 4
    dtype = np.result_type(A.dtype, float)
    S = np.zeros((n, k), dtype=dtype)
    S[r, :] = 1
    out = {name: np.zeros(N + 1, dtype=dtype) for name in ("b", "c", "d") + (V_SEQUENCE_NAMES if vi is not None else ())}
    out["d"][0] = 1
    out["b"][0] = 1
    if vi is not None:
        out["b_v"][0] = 1
    for m in range(1, N + 1):
        S = np.asarray(A @ S)
        dn = S[:, 0].sum()
        out["d"][m] = dn
        out["b"][m] = S[r, 0]
        out["c"][m] = S[r, 1]
        S[r, 1] = 0
        if vi is not None:
            out["c_v"][m] = S[vi, 2]
            S[vi, 2] = 0
            out["b_v"][m] = S[r, 2]
            out["a_v"][m] = dn - S[:, 2].sum()
            out["e_v"][m] = S[vi, 3]
            S[vi, 3] = 0
            S[r, 3] = 0
    return out


def coefficients(oracle: WeightOracle, v: int | None = None, N: int = 16,
                 backend: str = EXACT, ball: Ball | None = None) -> CoefficientBundle:
    """All eight walk series of ``oracle`` through order ``N``.

    Forbidden vertices are removed from the state vector before the next
    step, so each order costs one sparse step per series family.  ``a`` is
    the convolution of ``c`` with ``d``; ``a_v`` is computed directly as
    ``d_n`` minus the weight of walks that never visit ``v``, which agrees
    with ``c_v * d`` whenever the graph is v-transitive.
    """
    if N < 0:
        raise UsageError("order must be nonnegative")
    if backend not in (EXACT, FLOAT):
        raise UsageError(f"unknown backend {backend!r}")
    if v is not None:
        v = int(v)
        if v == oracle.root:
            raise UsageError("target v must differ from the root; use the plain family for v = root")
    if ball is None:
        ball = oracle.ball(N, backend)
    else:
        ball = ball.to_float() if backend == FLOAT else ball.to_exact()
    r = ball.index_of(oracle.root)
    vi = ball.index_of(v) if v is not None else None
    in_ball = v is None or vi is not None
    if backend == EXACT:
        seq = _run_exact(ball, r, vi, N)
    else:
        seq = _run_float(ball, r, vi, N)
    S = {k: TruncatedSeries(val, backend) for k, val in seq.items()}
    a = mul(S["c"], S["d"])
    kw = dict(order=N, backend=backend, root=oracle.root, a=a, b=S["b"], c=S["c"], d=S["d"])
    if v is not None:
        if vi is None:
            # no walk of length <= N reaches v
            zero = TruncatedSeries.zero(N, backend)
            kw.update(v=v, a_v=zero, b_v=S["b"], c_v=zero, e_v=zero, v_in_ball=False)
        else:
            kw.update(v=v, **{k: S[k] for k in V_SEQUENCE_NAMES})
    return CoefficientBundle(**kw)


@dataclass(frozen=True)
class ConvexityReport:
    """Incident-weight sums for every vertex in a ball."""

    radius: int
    sums: dict
    ok: dict
    deficits: dict
    exact: bool

    @property
    def all_convex(self) -> bool:
        return all(self.ok.values())

    def failures(self) -> list[int]:
        return sorted(u for u, good in self.ok.items() if not good)


def check_convexity(oracle: WeightOracle, radius: int, tol: float = 1e-12) -> ConvexityReport:
    """Whether incident weights sum to 1 at every vertex within ``radius``.

    Sums use the oracle's full neighbour lists, including neighbours
    outside the ball.
    """
    verts = sorted(reachable_set(oracle, radius))
    sums, ok, deficits = {}, {}, {}
    exact = True
    for u in verts:
        s = sum((to_exact(c) for _, c in oracle.neighbors(u)), Fraction(0))
        sums[u] = s
        deficits[u] = 1 - s
        ok[u] = s == 1
        if not ok[u] and abs(complex(to_float(s)) - 1) <= tol:
            ok[u] = True
            exact = False
    return ConvexityReport(radius, sums, ok, deficits, exact)


def check_slimness_bound(oracle: WeightOracle, radius: int):
    """Largest ``sum_w |h({u, w})|`` over vertices ``u`` within ``radius``."""
    best = Fraction(0)
    for u in sorted(reachable_set(oracle, radius)):
        s = sum((exact_abs(to_exact(c)) for _, c in oracle.neighbors(u)), Fraction(0))
        if s > best:
            best = s
    return best
