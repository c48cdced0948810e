"""Brute-force walk enumeration and exact checks of the generating-function identities."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import UsageError
from .scalars import format_scalar
from .series import EXACT, TruncatedSeries, add, mul, reciprocal
from .walks import (
    SEQUENCE_NAMES,
    V_SEQUENCE_NAMES,
    CoefficientBundle,
    WeightOracle,
    check_convexity,
    coefficients,
)

__all__ = [
    "DEFAULT_CAP",
    "WalkConstraint",
    "enumerate_walks",
    "enumerate_bundle",
    "IdentityResult",
    "IdentityReport",
    "verify_identities",
]

DEFAULT_CAP = 12


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("WALKGEN_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class WalkConstraint:
    """Which walks of a given length from the root are counted.

    ``forbid_interior`` vertices may not occur at steps ``1..n-1``;
    ``forbid_everywhere_after_start`` vertices may not occur at steps
    ``1..n``; ``require_visit_after_start`` must occur at some step
    ``1..n``.  When ``end_at`` is also in ``forbid_interior`` the walk is
    a first arrival and needs at least one step.
    """

    length: int
    end_at: int | None = None
    forbid_interior: frozenset = field(default_factory=frozenset)
    forbid_everywhere_after_start: frozenset = field(default_factory=frozenset)
    require_visit_after_start: int | None = None

    def __post_init__(self):
        if self.length < 0:
            raise UsageError("walk length must be nonnegative")
        object.__setattr__(self, "forbid_interior", frozenset(self.forbid_interior))
        object.__setattr__(self, "forbid_everywhere_after_start", frozenset(self.forbid_everywhere_after_start))
        if self.end_at is not None and self.end_at in self.forbid_everywhere_after_start:
            raise UsageError(f"end vertex {self.end_at} is forbidden at every step")
        r = self.require_visit_after_start
        if r is not None and r in self.forbid_everywhere_after_start:
            raise UsageError(f"required vertex {r} is forbidden at every step")

    @property
    def first_arrival(self) -> bool:
        return self.end_at is not None and self.end_at in self.forbid_interior

    # the constraint families behind the eight series
    @classmethod
    def kind(cls, name: str, n: int, root: int, v: int | None = None) -> WalkConstraint:
        if name in V_SEQUENCE_NAMES and v is None:
            raise UsageError(f"series {name} needs a target vertex")
        table = {
            "a": dict(require_visit_after_start=root),
            "b": dict(end_at=root),
            "c": dict(end_at=root, forbid_interior={root}),
            "d": dict(),
            "a_v": dict(require_visit_after_start=v),
            "b_v": dict(end_at=root, forbid_everywhere_after_start={v}),
            "c_v": dict(end_at=v, forbid_interior={v}),
            "e_v": dict(end_at=v, forbid_interior={v, root}),
        }
        if name not in table:
            raise UsageError(f"unknown series {name!r}")
        return cls(n, **table[name])


def _walk_sum(oracle: WeightOracle, con: WalkConstraint, prefix: list, weight, visited: bool):
    """Weight and count of completions of ``prefix`` satisfying ``con``."""
    n = con.length
    total, count = Fraction(0), 0
    stack = [(prefix[-1], len(prefix) - 1, weight, visited)]
    target = con.require_visit_after_start
    neighbors = _cached_neighbors(oracle)
    while stack:
        u, i, w, seen = stack.pop()
        if i == n:
            if con.end_at is not None and u != con.end_at:
                continue
            if target is not None and not seen:
                continue
            if n == 0 and con.first_arrival:
                continue
            total += w
            count += 1
            continue
        for x, c in neighbors(u):
            j = i + 1
            if x in con.forbid_everywhere_after_start:
                continue
            if j < n and x in con.forbid_interior:
                continue
            stack.append((x, j, w * c, seen or x == target))
    return total, count


def _branch(args):
    oracle, con, x, c = args
    return _walk_sum(oracle, con, [oracle.root, x], c, x == con.require_visit_after_start)


def enumerate_walks(oracle: WeightOracle, constraint: WalkConstraint, cap: int = DEFAULT_CAP):
    """Exact total weight and number of nonzero-weight walks meeting ``constraint``."""
    if constraint.length > cap:
        raise UsageError(f"walk length {constraint.length} exceeds the enumeration cap {cap}")
    con = constraint
    if con.length == 0 or _workers() == 1:
        return _walk_sum(oracle, con, [oracle.root], Fraction(1), False)
    jobs = []
    for x, c in oracle.neighbors(oracle.root):
        if x in con.forbid_everywhere_after_start or (con.length > 1 and x in con.forbid_interior):
            continue
        jobs.append((oracle, con, x, c))
    total, count = Fraction(0), 0
    with ProcessPoolExecutor(max_workers=_workers()) as pool:
        for w, k in pool.map(_branch, jobs):
            total += w
            count += k
    return total, count


def _cached_neighbors(oracle: WeightOracle):
    cache: dict = {}

    def get(u):
        nb = cache.get(u)
        if nb is None:
            nb = cache[u] = oracle.neighbors(u)
        return nb

    return get


def _bundle_walk(oracle, N, v, start, w0, root_hits, v_hits, acc):
    root = oracle.root
    neighbors = _cached_neighbors(oracle)
    stack = [(start, 1, w0, root_hits, v_hits)] if start is not None else []
    while stack:
        u, i, w, rh_before, vh_before = stack.pop()
        rh = rh_before + (u == root)
        vh = vh_before + (u == v)
        acc["d"][i] += w
        if u == root:
            acc["b"][i] += w
            if rh_before == 0:
                acc["c"][i] += w
        if rh:
            acc["a"][i] += w
        if v is not None:
            if vh:
                acc["a_v"][i] += w
            elif u == root:
                acc["b_v"][i] += w
            if u == v and vh_before == 0:
                acc["c_v"][i] += w
                if rh_before == 0:
                    acc["e_v"][i] += w
        if i < N:
            for x, c in neighbors(u):
                stack.append((x, i + 1, w * c, rh, vh))
    return acc


def _empty_acc(N, v):
    names = SEQUENCE_NAMES + (V_SEQUENCE_NAMES if v is not None else ())
    return {k: [Fraction(0)] * (N + 1) for k in names}


def _bundle_branch(args):
    oracle, N, v, x, c = args
    return _bundle_walk(oracle, N, v, x, c, 0, 0, _empty_acc(N, v))


def enumerate_bundle(oracle: WeightOracle, v: int | None, N: int, cap: int = DEFAULT_CAP) -> CoefficientBundle:
    """All eight series through order ``N`` by explicit depth-first enumeration."""
    if N > cap:
        raise UsageError(f"order {N} exceeds the enumeration cap {cap}")
    if v is not None and v == oracle.root:
        raise UsageError("target v must differ from the root")
    acc = _empty_acc(N, v)
    acc["d"][0] = Fraction(1)
    acc["b"][0] = Fraction(1)
    if v is not None:
        acc["b_v"][0] = Fraction(1)
    if N >= 1:
        first = oracle.neighbors(oracle.root)
        if _workers() > 1 and len(first) > 1:
            with ProcessPoolExecutor(max_workers=_workers()) as pool:
                parts = list(pool.map(_bundle_branch, [(oracle, N, v, x, c) for x, c in first]))
        else:
            parts = [_bundle_walk(oracle, N, v, x, c, 0, 0, _empty_acc(N, v)) for x, c in first]
        for part in parts:
            for k, seq in part.items():
                acc[k] = [p + q for p, q in zip(acc[k], seq)]
    S = {k: TruncatedSeries(seq, EXACT) for k, seq in acc.items()}
    return CoefficientBundle(N, EXACT, oracle.root, v=v, **S)


@dataclass(frozen=True)
class IdentityResult:
    """Outcome of one identity, checked order by order."""

    name: str
    applicable: bool
    requires_transitivity: bool
    passed: bool
    first_failure: int | None = None
    lhs: object = None
    rhs: object = None
    note: str = ""

    def to_json(self) -> dict:
        return {
            "identity": self.name,
            "applicable": self.applicable,
            "requires_transitivity": self.requires_transitivity,
            "passed": self.passed,
            "first_failing_order": self.first_failure,
            "lhs": None if self.lhs is None else format_scalar(self.lhs),
            "rhs": None if self.rhs is None else format_scalar(self.rhs),
            "note": self.note,
        }


@dataclass(frozen=True)
class IdentityReport:
    order: int
    v: int | None
    source: str
    transitivity_declared: bool
    results: tuple[IdentityResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results if r.applicable)

    def first_failure(self) -> IdentityResult | None:
        fails = [r for r in self.results if r.applicable and not r.passed]
        return min(fails, key=lambda r: r.first_failure) if fails else None

    def result(self, name: str) -> IdentityResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_json(self) -> dict:
        ff = self.first_failure()
        return {
            "schema": 1,
            "order": self.order,
            "v": self.v,
            "source": self.source,
            "transitivity_declared": self.transitivity_declared,
            "passed": self.passed,
            "first_failure": None if ff is None else {"identity": ff.name, "order": ff.first_failure},
            "identities": [r.to_json() for r in self.results],
        }


def _compare(name, lhs: TruncatedSeries, rhs: TruncatedSeries, applicable, needs_trans, note=""):
    for n in range(lhs.order + 1):
        if lhs[n] != rhs[n]:
            return IdentityResult(name, applicable, needs_trans, False, n, lhs[n], rhs[n], note)
    return IdentityResult(name, applicable, needs_trans, True, None, None, None, note)


def verify_identities(oracle: WeightOracle, v: int | None, N: int, source: str = "auto",
                      cap: int = DEFAULT_CAP, convexity_radius: int | None = None) -> IdentityReport:
    """Check the walk identities coefficient-wise in exact arithmetic.

    ``source`` picks where the series come from: ``"enumerate"`` (explicit
    walks, needs ``N <= cap``), ``"dp"`` (the dynamic program) or
    ``"auto"`` (enumerate when ``N <= cap``).  Identities that need a
    weight-preserving bijection taking the root to ``v`` are always
    computed but only count toward ``passed`` when the oracle declares one.
    """
    if source == "auto":
        source = "enumerate" if N <= cap else "dp"
    if source == "enumerate":
        bundle = enumerate_bundle(oracle, v, N, cap)
    elif source == "dp":
        bundle = coefficients(oracle, v, N, EXACT)
    else:
        raise UsageError(f"unknown source {source!r}")
    return check_bundle(bundle, oracle, source, convexity_radius)


def check_bundle(bundle: CoefficientBundle, oracle: WeightOracle, source: str = "dp",
                 convexity_radius: int | None = None) -> IdentityReport:
    N = bundle.order
    one = TruncatedSeries.one(N, EXACT)
    declared = bool(oracle.v_transitive)
    a, b, c, d = bundle.a, bundle.b, bundle.c, bundle.d
    results = [
        _compare("A=C*D", a, mul(c, d), True, False),
        _compare("B=1/(1-C)", b, reciprocal(add(one, c, 1, -1)), True, False),
    ]
    if bundle.has_v:
        note = "" if declared else "transitivity not declared; reported only"
        results.append(_compare("A_v=C_v*D", bundle.a_v, mul(bundle.c_v, d), declared, True, note))
        rhs = add(bundle.b_v, mul(mul(bundle.c_v, bundle.c_v), b))
        results.append(_compare("B=B_v+C_v^2*B", b, rhs, declared, True, note))
        results.append(_compare("C_v=B_v*E_v", bundle.c_v, mul(bundle.b_v, bundle.e_v), True, False))
    radius = N if convexity_radius is None else convexity_radius
    convex = oracle.convex_by_construction or check_convexity(oracle, radius).all_convex
    geometric = TruncatedSeries([1] * (N + 1), EXACT)
    results.append(_compare("D=1/(1-x)", d, geometric, convex, False,
                            "" if convex else "weights are not convex; reported only"))
    return IdentityReport(N, bundle.v, source, declared, tuple(results))
