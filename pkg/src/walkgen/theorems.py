"""Hypothesis checking and evaluation of the fourteen walk-limit formulas.

Each formula is reported as a :class:`TheoremReport`.  Every hypothesis
carries a grade:

``verified-exact``
    established from exact data or by construction;
``evidenced-numeric``
    supported by the finite-prefix classifier (never a proof);
``user-asserted``
    supplied by the caller;
``failed``
    not established (refuted or no evidence).

A report is applicable iff no hypothesis failed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import InsufficientOrderError
from .scalars import GaussianRational, format_scalar
from .series import (
    DEFAULT_POLICY,
    EXACT,
    FLOAT,
    ConvergencePolicy,
    ConvergenceVerdict,
    Mode,
    TruncatedSeries,
    classify_at_one,
    combine_product,
    fit_tail,
)
from .walks import CoefficientBundle, WeightOracle, check_convexity, reachable_set

__all__ = [
    "VERIFIED",
    "EVIDENCED",
    "ASSERTED",
    "FAILED",
    "THEOREM_IDS",
    "Hypothesis",
    "OracleMeta",
    "oracle_meta",
    "TheoremReport",
    "Evaluation",
    "evaluate",
    "absolute_sum_bound",
    "report_to_json",
]

VERIFIED = "verified-exact"
EVIDENCED = "evidenced-numeric"
ASSERTED = "user-asserted"
FAILED = "failed"
_RANK = {VERIFIED: 3, EVIDENCED: 2, ASSERTED: 1, FAILED: 0}

# absolute-convergence variants first, then conditional, then +inf
THEOREM_IDS = ("T2", "T5", "T8", "T11", "T1", "T4", "T7", "T7star", "T10", "T10star",
               "T3", "T6", "T9", "T12")
_NEEDS_V = {"T7", "T7star", "T8", "T9", "T10", "T10star", "T11", "T12"}
_SQRT_VALUED = {"T7", "T7star", "T8", "T10", "T10star", "T11"}
_LIMIT_THEOREMS = {"T4", "T5", "T6", "T10", "T10star", "T11", "T12"}

SERIES_LABELS = {"a": "A", "b": "B", "c": "C", "d": "D", "a_v": "A_v", "b_v": "B_v",
                 "c_v": "C_v", "e_v": "E_v"}


@dataclass(frozen=True)
class Hypothesis:
    name: str
    grade: str
    evidence: str = ""

    @property
    def holds(self) -> bool:
        return self.grade != FAILED

    def to_json(self) -> dict:
        return {"name": self.name, "verdict": self.grade, "evidence": self.evidence}


def _weakest(grades) -> str:
    grades = list(grades)
    return min(grades, key=_RANK.__getitem__) if grades else VERIFIED


@dataclass(frozen=True)
class OracleMeta:
    """Graded structural facts about the weight behind a bundle."""

    light: Hypothesis
    convex: Hypothesis
    nonnegative: Hypothesis
    v_transitive: Hypothesis
    v_reachable: Hypothesis | None = None
    component_size: int | None = None


def _closed_component(oracle: WeightOracle, radius: int) -> int | None:
    """Vertex count of the root's component if it lies within ``radius``."""
    if getattr(oracle, "convex_by_construction", False) and not hasattr(oracle, "edges"):
        return None
    inner = reachable_set(oracle, radius)
    outer = reachable_set(oracle, radius + 1)
    return len(inner) if inner == outer else None


def oracle_meta(oracle: WeightOracle, order: int, v: int | None = None,
                policy: ConvergencePolicy = DEFAULT_POLICY,
                assertions: Mapping | None = None) -> OracleMeta:
    """Grade lightness, convexity, nonnegativity, transitivity and reachability.

    Graphs with a finite root component are checked on the whole component
    (exact).  Infinite graphs are checked within ``policy.convexity_radius``
    unless they are convex by construction.  Keys ``convex``,
    ``nonnegative`` and ``v_transitive`` in ``assertions`` override the
    checks and are graded as user-asserted.
    """
    assertions = dict(assertions or {})
    light = Hypothesis("light", VERIFIED, "every vertex has finite degree (slim, hence light)")
    radius = policy.convexity_radius
    comp = None if getattr(oracle, "convex_by_construction", False) else _closed_component(oracle, max(order, radius))
    check_radius = max(order, radius) if comp is not None else radius

    if oracle.convex_by_construction:
        convex = Hypothesis("convex", VERIFIED, "incident weights sum to 1 by construction")
        nonneg = Hypothesis("real nonnegative weights", VERIFIED, "weights are positive by construction")
    else:
        rep = check_convexity(oracle, check_radius)
        if rep.all_convex:
            grade = VERIFIED if comp is not None and rep.exact else EVIDENCED
            where = "whole component" if comp is not None else f"radius {check_radius}"
            convex = Hypothesis("convex", grade, f"incident weights sum to 1 on the {where}")
        else:
            bad = rep.failures()[0]
            convex = Hypothesis("convex", FAILED,
                                f"incident weights at vertex {bad} sum to {format_scalar(rep.sums[bad])}")
        nn = oracle.is_real_nonnegative(check_radius)
        if nn:
            grade = VERIFIED if comp is not None else EVIDENCED
            nonneg = Hypothesis("real nonnegative weights", grade, f"checked within radius {check_radius}")
        else:
            nonneg = Hypothesis("real nonnegative weights", FAILED, "a negative or non-real weight occurs")

    if oracle.v_transitive:
        trans = Hypothesis("v-transitive", ASSERTED, f"declared; witness: {oracle.transitivity_witness or 'none given'}")
    else:
        trans = Hypothesis("v-transitive", FAILED, "not declared")

    reach = None
    if v is not None:
        if hasattr(oracle, "target_id") and v == getattr(oracle, "target_id"):
            reach = Hypothesis("v in V(h)", VERIFIED, "lattice points are all reachable")
        elif v in reachable_set(oracle, order):
            reach = Hypothesis("v in V(h)", VERIFIED, f"reached within {order} steps")
        elif comp is not None:
            reach = Hypothesis("v in V(h)", FAILED, "v lies outside the root's component")
        else:
            reach = Hypothesis("v in V(h)", FAILED, f"not reached within {order} steps")

    def override(h: Hypothesis, key: str) -> Hypothesis:
        if key not in assertions:
            return h
        flag = bool(assertions[key])
        note = f"asserted {flag}; check said: {h.grade} ({h.evidence})"
        return Hypothesis(h.name, ASSERTED if flag else FAILED, note)

    return OracleMeta(
        light=light,
        convex=override(convex, "convex"),
        nonnegative=override(nonneg, "nonnegative"),
        v_transitive=override(trans, "v_transitive"),
        v_reachable=reach,
        component_size=comp,
    )


@dataclass
class TheoremReport:
    theorem_id: str
    hypotheses: list[Hypothesis]
    applicable: bool
    result: object = None
    kind: str = "limit"
    branches: tuple | None = None
    selection_evidence: str | None = None
    cross_check: dict | None = None
    warnings: list[str] = field(default_factory=list)
    preferred: bool = False
    heuristic: bool = True

    @property
    def grade(self) -> str:
        return _weakest(h.grade for h in self.hypotheses) if self.applicable else FAILED

    def hypothesis(self, name: str) -> Hypothesis:
        for h in self.hypotheses:
            if h.name == name:
                return h
        raise KeyError(name)

    def to_json(self) -> dict:
        return report_to_json(self)


@dataclass(frozen=True)
class Evaluation:
    """All reports plus the verdicts they were derived from."""

    reports: list[TheoremReport]
    verdicts: dict[str, ConvergenceVerdict]
    b_abs_bound: dict

    def __iter__(self):
        return iter(self.reports)

    def __getitem__(self, tid: str) -> TheoremReport:
        for r in self.reports:
            if r.theorem_id == tid:
                return r
        raise KeyError(tid)

    def __contains__(self, tid) -> bool:
        return any(r.theorem_id == tid for r in self.reports)

    @property
    def preferred(self) -> TheoremReport | None:
        for r in self.reports:
            if r.preferred:
                return r
        return None

    def applicable(self) -> list[TheoremReport]:
        return [r for r in self.reports if r.applicable]


# ---------------------------------------------------------------------------
# helpers


def _fmt(x) -> str:
    if x is None:
        return "none"
    if isinstance(x, (Fraction, GaussianRational)):
        return format_scalar(x)
    if isinstance(x, complex):
        if x.imag == 0:
            return f"{x.real:.12g}"
        return f"{x.real:.12g}{x.imag:+.12g}j"
    if isinstance(x, float):
        return "+inf" if x == math.inf else f"{x:.12g}"
    return str(x)


def _scalar(z):
    z = complex(z)
    return z.real if z.imag == 0 else z


def _canonical_sqrt(z: complex) -> complex:
    w = cmath.sqrt(complex(z))
    if w.real < 0 or (w.real == 0 and w.imag < 0):
        w = -w
    return w


def _exists(label: str, verdict: ConvergenceVerdict, absolute: bool = False) -> Hypothesis:
    name = f"{label}(1) exists" + (" absolutely" if absolute else "")
    ok = verdict.absolute if absolute else verdict.exists
    desc = f"{verdict.mode.value} via {verdict.test}"
    if verdict.exists:
        desc += f", value {_fmt(verdict.value)}"
    if not ok:
        return Hypothesis(name, FAILED, desc)
    if not verdict.heuristic:
        return Hypothesis(name, ASSERTED, desc)
    return Hypothesis(name, EVIDENCED, desc)


def _infinite(label: str, verdict: ConvergenceVerdict, exact_reason: str | None = None) -> Hypothesis:
    name = f"{label}(1) = +inf"
    if not verdict.infinite:
        return Hypothesis(name, FAILED, f"{verdict.mode.value} via {verdict.test}")
    if exact_reason:
        return Hypothesis(name, VERIFIED, exact_reason)
    grade = EVIDENCED if verdict.heuristic else ASSERTED
    return Hypothesis(name, grade, f"{verdict.test}")


def absolute_sum_bound(series, policy: ConvergencePolicy = DEFAULT_POLICY, start: int = 1) -> dict:
    """Estimate ``sum_{n >= start} |s_n|``: the prefix sum plus a fitted tail.

    Returns the prefix sum, the tail estimate (``inf`` when the tail fit is
    not summable or missing with a nonzero window) and their total.
    """
    mags = np.abs(np.asarray(series.to_float().coeffs))
    N = len(mags) - 1
    prefix = float(mags[start:].sum())
    n0 = policy.window_start(N)
    fit = fit_tail(mags, max(n0 + 1, start))
    window = float(mags[max(n0 + 1, start):].sum())
    if fit is None:
        tail = 0.0 if window <= policy.tol else math.inf
    elif fit.rms <= policy.fit_rms and fit.convergent and (
            fit.model == "geometric" or fit.rate >= 1 + policy.convergent_margin):
        tail = fit.remainder
    else:
        tail = math.inf
    return {"prefix": prefix, "tail": tail, "total": prefix + tail, "fit": fit}


def _bound_hypothesis(bound: dict, policy: ConvergencePolicy) -> Hypothesis:
    name = "sum_{n>=1} |b_n| < 1"
    total, prefix = bound["total"], bound["prefix"]
    if prefix >= 1:
        return Hypothesis(name, FAILED, f"prefix sum alone is {prefix:.6g} >= 1")
    if total >= 1:
        return Hypothesis(name, FAILED, f"prefix {prefix:.6g} + tail {bound['tail']:.3g} >= 1")
    note = f"prefix {prefix:.6g} + fitted tail {bound['tail']:.3g} = {total:.6g}"
    if total > 1 - policy.bound_margin:
        note += " (marginal)"
    return Hypothesis(name, EVIDENCED, note)


def _series_equal(x, y, exact: bool, policy: ConvergencePolicy) -> bool:
    if exact:
        return x == y
    scale = max(1.0, abs(complex(x)), abs(complex(y)))
    return abs(complex(x) - complex(y)) <= policy.zero_tol * scale


def _difference_check(bundle: CoefficientBundle, meta: OracleMeta, c_total: float,
                      policy: ConvergencePolicy) -> tuple[Hypothesis, Hypothesis | None, str]:
    """Short-circuit test ``B_v = B`` and the displayed bound for the first difference.

    Returns (equality hypothesis, bound hypothesis or None, state) where
    state is ``"equal"``, ``"bounded"`` or ``"failed"``.
    """
    exact = bundle.backend == EXACT
    bv, b = bundle.b_v, bundle.b
    N = bundle.order
    k = next((n for n in range(N + 1) if not _series_equal(bv[n], b[n], exact, policy)), None)
    if k is None:
        m = meta.component_size
        if exact and m is not None and N >= 2 * m:
            eq = Hypothesis("B_v(x) = B(x)", VERIFIED,
                            f"coefficients agree through order {N} >= 2 * {m} on a finite component")
        else:
            eq = Hypothesis("B_v(x) = B(x)", EVIDENCED, f"coefficients agree through order {N}")
        return eq, None, "equal"
    eq = Hypothesis("B_v(x) = B(x)", FAILED, f"first difference at order {k}")
    diff = np.abs(np.asarray(bv.to_float().coeffs) - np.asarray(b.to_float().coeffs))
    tail = absolute_sum_bound(TruncatedSeries(diff, FLOAT), policy, start=k + 1)
    denom = diff[k] * (1 - c_total)
    name = "first-difference bound < 1"
    if denom <= 0:
        return eq, Hypothesis(name, FAILED, "1 - c is not positive"), "failed"
    value = tail["total"] / denom
    note = f"k = {k}, bound = {value:.6g}"
    if value >= 1:
        return eq, Hypothesis(name, FAILED, note), "failed"
    if value > 1 - policy.bound_margin:
        note += " (within margin of 1)"
    return eq, Hypothesis(name, EVIDENCED, note), "bounded"


# ---------------------------------------------------------------------------


def _classify_all(bundle: CoefficientBundle, policy: ConvergencePolicy,
                  assertions: Mapping) -> dict[str, ConvergenceVerdict]:
    fb = bundle.to_float()
    out = {}
    for key in bundle.names():
        label = SERIES_LABELS[key]
        if label in assertions:
            out[key] = _as_verdict(assertions[label])
        else:
            out[key] = classify_at_one(getattr(fb, key), policy)
    return out


def _as_verdict(x) -> ConvergenceVerdict:
    if isinstance(x, ConvergenceVerdict):
        return x
    if isinstance(x, tuple):
        mode, value = x
        return ConvergenceVerdict.asserted(mode, value)
    if x == math.inf or x == "+inf":
        return ConvergenceVerdict.asserted(Mode.DIVERGES_TO_PLUS_INFINITY)
    return ConvergenceVerdict.asserted(Mode.ABSOLUTE, _scalar(x))


def evaluate(bundle: CoefficientBundle, meta: OracleMeta,
             policy: ConvergencePolicy = DEFAULT_POLICY,
             assertions: Mapping | None = None) -> Evaluation:
    """Check every formula's hypotheses and compute the applicable ones.

    ``assertions`` may map series labels (``"A"``, ``"B"``, ..., ``"E_v"``)
    to verdicts, ``(mode, value)`` pairs, plain values or ``"+inf"``;
    these replace the classifier for that series.
    """
    assertions = dict(assertions or {})
    if bundle.order < policy.min_order:
        raise InsufficientOrderError(
            f"bundle order {bundle.order} is below the minimum {policy.min_order}")
    V = _classify_all(bundle, policy, assertions)
    fb = bundle.to_float()
    convex, nonneg, light = meta.convex, meta.nonnegative, meta.light
    trans = meta.v_transitive

    # A = C * D always; A_v = C_v * D needs transitivity
    if not V["a"].exists and not V["a"].infinite and "A" not in assertions:
        combo = combine_product(V["c"], V["d"])
        if combo.exists:
            V["a"] = combo
    if bundle.has_v and not V["a_v"].exists and not V["a_v"].infinite and trans.holds \
            and "A_v" not in assertions:
        combo = combine_product(V["c_v"], V["d"])
        if combo.exists:
            V["a_v"] = combo

    d_exact_reason = None
    if convex.grade == VERIFIED:
        d_exact_reason = "convex weights give D(x) = 1/(1-x)"

    # +inf propagation through a = c * d for nonnegative weights
    c_pos = bool(np.any(np.asarray(fb.c.coeffs).real > 0))
    if nonneg.holds and V["d"].infinite and c_pos and not V["a"].infinite and "A" not in assertions:
        V["a"] = ConvergenceVerdict(Mode.DIVERGES_TO_PLUS_INFINITY, None, V["d"].diagnostics)
    if bundle.has_v and trans.holds and nonneg.holds and V["d"].infinite and "A_v" not in assertions:
        if bool(np.any(np.asarray(fb.c_v.coeffs).real > 0)) and not V["a_v"].infinite:
            V["a_v"] = ConvergenceVerdict(Mode.DIVERGES_TO_PLUS_INFINITY, None, V["d"].diagnostics)

    bound = absolute_sum_bound(bundle.b, policy)
    bound_h = _bound_hypothesis(bound, policy)

    ctx = _Context(bundle, fb, meta, V, policy, bound, bound_h, d_exact_reason)
    reports = []
    for tid in THEOREM_IDS:
        if tid in _NEEDS_V and not bundle.has_v:
            continue
        reports.append(_EVALUATORS[tid](ctx))

    best = None
    for r in reports:
        if r.applicable and (best is None or _RANK[r.grade] > _RANK[best.grade]):
            best = r
    if best is not None:
        best.preferred = True
    return Evaluation(reports, V, bound)


@dataclass
class _Context:
    bundle: CoefficientBundle
    fb: CoefficientBundle
    meta: OracleMeta
    V: dict
    policy: ConvergencePolicy
    bound: dict
    bound_h: Hypothesis
    d_exact: str | None

    def is_zero(self, z) -> bool:
        return abs(complex(z)) <= self.policy.zero_tol

    def v_hyps(self) -> list[Hypothesis]:
        return [self.meta.v_transitive, self.meta.v_reachable]


def _finish(tid: str, hyps: list[Hypothesis], ctx: _Context, compute) -> TheoremReport:
    hyps = [h for h in hyps if h is not None]
    applicable = all(h.holds for h in hyps)
    rep = TheoremReport(tid, hyps, applicable, kind="limit" if tid in _LIMIT_THEOREMS else "sum")
    if applicable:
        compute(rep)
    return rep


def _nonzero_b(ctx: _Context, absolute: bool = False) -> Hypothesis | None:
    vb = ctx.V["b"]
    if vb.exists and ctx.is_zero(vb.value):
        return Hypothesis("B(1) != 0 (conclusion)", FAILED,
                          "B(1) evidence is 0, so the existence hypotheses cannot all hold")
    return None


def _limit_cross_check(rep: TheoremReport, seq, ctx: _Context, label: str):
    arr = np.asarray(seq.coeffs)
    direct = _scalar(arr[-1])
    steps = np.abs(np.diff(arr[-3:])) if len(arr) >= 3 else np.array([math.inf])
    stabilized = bool(np.max(steps) < ctx.policy.tol)
    chosen = rep.result
    if chosen is None or chosen == math.inf:
        diff = None
    else:
        diff = abs(complex(chosen) - complex(direct))
    rep.cross_check = {
        "direct": direct,
        "source": f"{label}_N at N = {len(arr) - 1}",
        "abs_difference": diff,
        "stabilized": stabilized,
        "consistent": (diff <= 10 * ctx.policy.tol) if (stabilized and diff is not None) else None,
    }


def _sum_cross_check(rep: TheoremReport, seq, verdict: ConvergenceVerdict, ctx: _Context, label: str):
    arr = np.asarray(seq.coeffs)
    partial = _scalar(arr.sum())
    chosen = rep.result
    if chosen == math.inf:
        rep.cross_check = {"direct": "+inf" if verdict.infinite else partial,
                           "source": f"{label} verdict {verdict.mode.value}",
                           "abs_difference": None, "stabilized": verdict.infinite,
                           "consistent": verdict.infinite}
        return
    ref = verdict.value if verdict.exists else partial
    diff = abs(complex(chosen) - complex(ref))
    stabilized = verdict.exists and verdict.diagnostics is not None and \
        verdict.diagnostics.tail_bound < ctx.policy.tol
    rep.cross_check = {
        "direct": ref,
        "source": f"{label}(1) " + ("verdict value" if verdict.exists else "partial sum"),
        "abs_difference": diff,
        "stabilized": bool(stabilized),
        "consistent": (diff <= 10 * ctx.policy.tol) if stabilized else None,
    }


def _set_sqrt(rep: TheoremReport, z, factor, reference, ref_desc: str):
    w = _canonical_sqrt(z) * complex(factor)
    plus, minus = _scalar(w), _scalar(-w)
    rep.branches = (plus, minus)
    if reference is None:
        rep.result = plus
        rep.selection_evidence = "no reference value; canonical branch"
        return
    dp, dm = abs(w - complex(reference)), abs(-w - complex(reference))
    rep.result = plus if dp <= dm else minus
    rep.selection_evidence = (f"branch nearest to {ref_desc} = {_fmt(_scalar(reference))} "
                              f"(distances {dp:.3g} vs {dm:.3g}); selection is heuristic")


# ---------------------------------------------------------------------------
# v = root


def _t1(ctx: _Context) -> TheoremReport:
    V = ctx.V
    hyps = [ctx.meta.light, _exists("D", V["d"]), _exists("C", V["c"]), _exists("B", V["b"]),
            _exists("A", V["a"]), _nonzero_b(ctx)]

    def compute(rep):
        B, D = complex(V["b"].value), complex(V["d"].value)
        rep.result = _scalar((1 - 1 / B) * D)
        _sum_cross_check(rep, ctx.fb.a, V["a"], ctx, "A")
    return _finish("T1", hyps, ctx, compute)


def _t2(ctx: _Context) -> TheoremReport:
    V = ctx.V
    hyps = [ctx.meta.light, _exists("D", V["d"], absolute=True), ctx.bound_h]

    def compute(rep):
        B = _b_value(ctx)
        D = complex(V["d"].value)
        rep.result = _scalar((1 - 1 / B) * D)
        _sum_cross_check(rep, ctx.fb.a, V["a"], ctx, "A")
    return _finish("T2", hyps, ctx, compute)


def _b_value(ctx: _Context) -> complex:
    vb = ctx.V["b"]
    if vb.exists:
        return complex(vb.value)
    return complex(np.asarray(ctx.fb.b.coeffs).sum())


def _t3(ctx: _Context) -> TheoremReport:
    hyps = [ctx.meta.light, ctx.meta.nonnegative, _infinite("D", ctx.V["d"], ctx.d_exact)]

    def compute(rep):
        rep.result = math.inf
        _sum_cross_check(rep, ctx.fb.a, ctx.V["a"], ctx, "A")
    return _finish("T3", hyps, ctx, compute)


def _t4(ctx: _Context) -> TheoremReport:
    V = ctx.V
    hyps = [ctx.meta.light, ctx.meta.convex, _exists("B", V["b"]), _exists("C", V["c"]), _nonzero_b(ctx)]

    def compute(rep):
        rep.result = _scalar(1 - 1 / complex(V["b"].value))
        _limit_cross_check(rep, ctx.fb.a, ctx, "a")
    return _finish("T4", hyps, ctx, compute)


def _t5(ctx: _Context) -> TheoremReport:
    hyps = [ctx.meta.light, ctx.meta.convex, ctx.bound_h]

    def compute(rep):
        rep.result = _scalar(1 - 1 / _b_value(ctx))
        _limit_cross_check(rep, ctx.fb.a, ctx, "a")
    return _finish("T5", hyps, ctx, compute)


def _t6(ctx: _Context) -> TheoremReport:
    hyps = [ctx.meta.light, ctx.meta.nonnegative, ctx.meta.convex, _infinite("B", ctx.V["b"])]

    def compute(rep):
        rep.result = 1.0
        _limit_cross_check(rep, ctx.fb.a, ctx, "a")
    return _finish("T6", hyps, ctx, compute)


# ---------------------------------------------------------------------------
# v != root


def _ratio(ctx: _Context) -> complex:
    return 1 - complex(ctx.V["b_v"].value) / complex(ctx.V["b"].value)


def _av_reference(ctx: _Context):
    va = ctx.V["a_v"]
    if va.exists:
        return va.value, "A_v(1) verdict value"
    return _scalar(np.asarray(ctx.fb.a_v.coeffs).sum()), "partial sum of A_v"


def _degenerate_warning(rep: TheoremReport, ctx: _Context):
    bv = ctx.V["b_v"]
    if bv.exists and not ctx.is_zero(bv.value):
        rep.warnings.append(
            f"B(1) is 0 but B_v(1) = {_fmt(bv.value)} is not; the weight may not be v-transitive")


def _t7(ctx: _Context, star: bool = False) -> TheoremReport:
    V = ctx.V
    tid = "T7star" if star else "T7"
    hyps = [ctx.meta.light] + ctx.v_hyps()
    if star:
        hyps.append(_exists("E_v", V["e_v"]))
    hyps += [_exists("D", V["d"]), _exists("C_v", V["c_v"])]
    if not star:
        hyps.append(_exists("C", V["c"]))
    hyps += [_exists("B_v", V["b_v"]), _exists("B", V["b"]), _exists("A_v", V["a_v"])]
    if not star:
        hyps.append(_nonzero_b(ctx))

    def compute(rep):
        if star and ctx.is_zero(V["b"].value):
            rep.result = 0.0
            rep.branches = (0.0, 0.0)
            rep.selection_evidence = "B(1) evidence is 0: 0/0 read as 1, so the set is {0}"
            _degenerate_warning(rep, ctx)
        else:
            ref, desc = _av_reference(ctx)
            _set_sqrt(rep, _ratio(ctx), V["d"].value, ref, desc)
        _sum_cross_check(rep, ctx.fb.a_v, V["a_v"], ctx, "A_v")
    return _finish(tid, hyps, ctx, compute)


def _t8(ctx: _Context, convex_variant: bool = False) -> TheoremReport:
    V = ctx.V
    tid = "T11" if convex_variant else "T8"
    hyps = [ctx.meta.light] + ctx.v_hyps()
    if convex_variant:
        hyps.append(ctx.meta.convex)
    else:
        hyps.append(_exists("D", V["d"], absolute=True))
    hyps += [_exists("B_v", V["b_v"], absolute=True), ctx.bound_h]
    eq, bound_h, state = _difference_check(ctx.bundle, ctx.meta, ctx.bound["total"], ctx.policy)
    if state == "equal":
        hyps.append(eq)
    else:
        hyps.append(bound_h)

    def compute(rep):
        if state == "equal":
            rep.result = 0.0
            rep.branches = (0.0, 0.0)
            rep.selection_evidence = "B_v = B, so A_v(x) = 0"
        elif convex_variant:
            _set_sqrt(rep, 1 - complex(V["b_v"].value) / _b_value(ctx), 1,
                      ctx.fb.a_v[ctx.bundle.order], "a_v,N")
        else:
            ref, desc = _av_reference(ctx)
            _set_sqrt(rep, 1 - complex(V["b_v"].value) / _b_value(ctx), V["d"].value, ref, desc)
        if convex_variant:
            _limit_cross_check(rep, ctx.fb.a_v, ctx, "a_v")
        else:
            _sum_cross_check(rep, ctx.fb.a_v, V["a_v"], ctx, "A_v")
    return _finish(tid, hyps, ctx, compute)


def _t9(ctx: _Context) -> TheoremReport:
    hyps = [ctx.meta.light, ctx.meta.nonnegative] + ctx.v_hyps() + [_infinite("D", ctx.V["d"], ctx.d_exact)]

    def compute(rep):
        rep.result = math.inf
        _sum_cross_check(rep, ctx.fb.a_v, ctx.V["a_v"], ctx, "A_v")
    return _finish("T9", hyps, ctx, compute)


def _t10(ctx: _Context, star: bool = False) -> TheoremReport:
    V = ctx.V
    tid = "T10star" if star else "T10"
    hyps = [ctx.meta.light, ctx.meta.convex] + ctx.v_hyps()
    if star:
        hyps.append(_exists("E_v", V["e_v"]))
    hyps.append(_exists("C_v", V["c_v"]))
    if not star:
        hyps.append(_exists("C", V["c"]))
    hyps += [_exists("B_v", V["b_v"]), _exists("B", V["b"])]
    if not star:
        hyps.append(_nonzero_b(ctx))

    def compute(rep):
        if star and ctx.is_zero(V["b"].value):
            rep.result = 0.0
            rep.branches = (0.0, 0.0)
            rep.selection_evidence = "B(1) evidence is 0: 0/0 read as 1, so the limit is 0"
            _degenerate_warning(rep, ctx)
        else:
            _set_sqrt(rep, _ratio(ctx), 1, ctx.fb.a_v[ctx.bundle.order], "a_v,N")
        _limit_cross_check(rep, ctx.fb.a_v, ctx, "a_v")
    return _finish(tid, hyps, ctx, compute)


def _t12(ctx: _Context) -> TheoremReport:
    hyps = [ctx.meta.light, ctx.meta.nonnegative, ctx.meta.convex] + ctx.v_hyps() + \
        [_infinite("B", ctx.V["b"])]

    def compute(rep):
        # C_v(1)^2 = 1 - B_v/B = 1 once B diverges; the trend picks the sign
        _set_sqrt(rep, 1.0, 1, ctx.fb.a_v[ctx.bundle.order], "a_v,N")
        _limit_cross_check(rep, ctx.fb.a_v, ctx, "a_v")
    return _finish("T12", hyps, ctx, compute)


_EVALUATORS = {
    "T1": _t1,
    "T2": _t2,
    "T3": _t3,
    "T4": _t4,
    "T5": _t5,
    "T6": _t6,
    "T7": _t7,
    "T7star": lambda c: _t7(c, star=True),
    "T8": _t8,
    "T9": _t9,
    "T10": _t10,
    "T10star": lambda c: _t10(c, star=True),
    "T11": lambda c: _t8(c, convex_variant=True),
    "T12": _t12,
}


# ---------------------------------------------------------------------------
# serialisation


def _json_scalar(x):
    if x is None:
        return None
    if isinstance(x, (Fraction, GaussianRational)):
        return format_scalar(x)
    if isinstance(x, (bool, str)):
        return x
    if isinstance(x, (np.floating, np.complexfloating)):
        x = x.item()
    if isinstance(x, complex):
        if x.imag == 0:
            x = x.real
        else:
            return {"re": _json_scalar(x.real), "im": _json_scalar(x.imag)}
    if isinstance(x, float):
        if x == math.inf:
            return "+inf"
        if math.isnan(x):
            return None
        return x
    if isinstance(x, int):
        return x
    return str(x)


def report_to_json(rep: TheoremReport) -> dict:
    out = {
        "schema": 1,
        "theorem_id": rep.theorem_id,
        "kind": rep.kind,
        "applicable": rep.applicable,
        "grade": rep.grade,
        "preferred": rep.preferred,
        "heuristic": rep.heuristic,
        "hypotheses": [h.to_json() for h in rep.hypotheses],
        "result": _json_scalar(rep.result) if rep.applicable else None,
    }
    if rep.branches is not None:
        out["branches"] = [_json_scalar(b) for b in rep.branches]
        out["selected"] = _json_scalar(rep.result)
        out["selection_evidence"] = rep.selection_evidence
    if rep.cross_check is not None:
        out["cross_check"] = {k: _json_scalar(v) for k, v in rep.cross_check.items()}
    if rep.warnings:
        out["warnings"] = list(rep.warnings)
    return out
