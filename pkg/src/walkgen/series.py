"""Truncated formal power series and their behaviour at ``x = 1``.

Two backends are supported.  The exact backend keeps coefficients as
``Fraction`` / :class:`~walkgen.scalars.GaussianRational` and is used to
check generating-function identities bit for bit.  The float backend keeps
a read-only numpy array (``float64`` or ``complex128``) and is used for
limit evaluation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import zeta

from .errors import InsufficientOrderError, NonUnitError, NotASquareError, UsageError
from .scalars import exact_sqrt, to_exact, to_float

EXACT = "exact"
FLOAT = "float"
BACKENDS = (EXACT, FLOAT)

__all__ = [
    "EXACT",
    "FLOAT",
    "TruncatedSeries",
    "ConvergencePolicy",
    "DEFAULT_POLICY",
    "Mode",
    "ConvergenceVerdict",
    "Diagnostics",
    "TailFit",
    "AbelEstimate",
    "add",
    "mul",
    "reciprocal",
    "sqrt",
    "divide_by_one_minus_x",
    "partial_sums",
    "fit_tail",
    "periodic_ratio",
    "classify_at_one",
    "abel_extrapolate",
    "combine_product",
    "allclose",
]


def _float_array(values) -> np.ndarray:
    vals = [to_float(v) for v in values]
    dtype = complex if any(isinstance(v, complex) for v in vals) else float
    arr = np.array(vals, dtype=dtype)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    return arr


class TruncatedSeries:
    """Coefficients ``u_0 .. u_N`` of a formal power series.

    Instances are immutable.  ``order`` is the highest retained exponent, so
    ``len(series) == order + 1``.
    """

    __slots__ = ("_coeffs", "backend")

    def __init__(self, coeffs: Iterable, backend: str = EXACT):
        if backend == EXACT:
            c = tuple(to_exact(x) for x in coeffs)
        elif backend == FLOAT:
            if isinstance(coeffs, np.ndarray) and coeffs.dtype in (np.float64, np.complex128):
                c = np.array(coeffs, copy=True)
            else:
                c = _float_array(list(coeffs))
            if np.iscomplexobj(c) and not np.any(c.imag):
                c = np.ascontiguousarray(c.real)
            c.setflags(write=False)
        else:
            raise UsageError(f"unknown backend {backend!r}")
        if len(c) == 0:
            raise UsageError("a truncated series needs at least one coefficient")
        object.__setattr__(self, "_coeffs", c)
        object.__setattr__(self, "backend", backend)

    def __setattr__(self, name, value):
        raise AttributeError("TruncatedSeries is immutable")

    # construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, order: int, backend: str = EXACT) -> TruncatedSeries:
        return cls([0] * (order + 1), backend)

    @classmethod
    def one(cls, order: int, backend: str = EXACT) -> TruncatedSeries:
        return cls.monomial(0, order, 1, backend)

    @classmethod
    def monomial(cls, k: int, order: int, coeff=1, backend: str = EXACT) -> TruncatedSeries:
        c = [0] * (order + 1)
        if k <= order:
            c[k] = coeff
        return cls(c, backend)

    @classmethod
    def geometric(cls, ratio, order: int, backend: str = EXACT) -> TruncatedSeries:
        """``sum_n ratio^n x^n`` truncated at ``order``."""
        r = to_exact(ratio) if backend == EXACT else to_float(ratio)
        out, p = [], (Fraction(1) if backend == EXACT else 1.0)
        for _ in range(order + 1):
            out.append(p)
            p = p * r
        return cls(out, backend)

    @classmethod
    def from_function(cls, f: Callable[[int], object], order: int, backend: str = EXACT):
        return cls([f(n) for n in range(order + 1)], backend)

    # basic protocol ---------------------------------------------------------

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    def __len__(self):
        return len(self._coeffs)

    def __getitem__(self, n):
        return self._coeffs[n]

    def __iter__(self):
        return iter(self._coeffs)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if self.backend != other.backend or self.order != other.order:
            return False
        if self.backend == EXACT:
            return self._coeffs == other._coeffs
        return bool(np.array_equal(self._coeffs, other._coeffs))

    def __hash__(self):
        if self.backend == EXACT:
            return hash(self._coeffs)
        return hash(self._coeffs.tobytes())

    def __repr__(self):
        head = ", ".join(str(c) for c in list(self._coeffs)[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"TruncatedSeries([{head}{more}], order={self.order}, backend={self.backend!r})"

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, other, 1, -1)

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    # conversions --------------------------------------------------------------

    def scale(self, alpha) -> TruncatedSeries:
        if self.backend == EXACT:
            a = to_exact(alpha)
            return TruncatedSeries([a * c for c in self._coeffs], EXACT)
        return TruncatedSeries(np.asarray(self._coeffs) * to_float(alpha), FLOAT)

    def to_float(self) -> TruncatedSeries:
        if self.backend == FLOAT:
            return self
        return TruncatedSeries(_float_array(self._coeffs), FLOAT)

    def to_exact(self) -> TruncatedSeries:
        if self.backend == EXACT:
            return self
        return TruncatedSeries(self._coeffs.tolist(), EXACT)

    def to_backend(self, backend: str) -> TruncatedSeries:
        return self.to_exact() if backend == EXACT else self.to_float()

    def truncate(self, order: int) -> TruncatedSeries:
        if order > self.order:
            raise UsageError(f"cannot extend order {self.order} to {order}")
        return TruncatedSeries(self._coeffs[: order + 1], self.backend)

    def is_real(self) -> bool:
        if self.backend == FLOAT:
            return not np.iscomplexobj(self._coeffs)
        return all(isinstance(c, Fraction) for c in self._coeffs)

    def as_list(self) -> list:
        return list(self._coeffs) if self.backend == EXACT else self._coeffs.tolist()


def _check_pair(U: TruncatedSeries, V: TruncatedSeries) -> None:
    if U.order != V.order:
        raise UsageError(f"order mismatch: {U.order} vs {V.order}")
    if U.backend != V.backend:
        raise UsageError(f"backend mismatch: {U.backend} vs {V.backend}")


def add(U: TruncatedSeries, V: TruncatedSeries, alpha=1, beta=1) -> TruncatedSeries:
    """Coefficient-wise ``alpha*u_n + beta*v_n``."""
    _check_pair(U, V)
    if U.backend == EXACT:
        a, b = to_exact(alpha), to_exact(beta)
        return TruncatedSeries([a * u + b * v for u, v in zip(U.coeffs, V.coeffs)], EXACT)
    a, b = to_float(alpha), to_float(beta)
    return TruncatedSeries(a * np.asarray(U.coeffs) + b * np.asarray(V.coeffs), FLOAT)


def mul(U: TruncatedSeries, V: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated at the common order."""
    _check_pair(U, V)
    N = U.order
    if U.backend == FLOAT:
        return TruncatedSeries(np.convolve(U.coeffs, V.coeffs)[: N + 1], FLOAT)
    u, v = U.coeffs, V.coeffs
    nz = [j for j in range(N + 1) if u[j]]
    out = []
    for n in range(N + 1):
        s = 0
        for j in nz:
            if j > n:
                break
            w = v[n - j]
            if w:
                s += u[j] * w
        out.append(s)
    return TruncatedSeries(out, EXACT)


def reciprocal(V: TruncatedSeries, floor: float = 1e-12) -> TruncatedSeries:
    """``1/V`` through the order of ``V``.

    Uses ``u_0 = 1/v_0`` and ``u_n = -(1/v_0) * sum_{j=1..n} v_j u_{n-j}``.
    On the float backend ``|v_0|`` must exceed ``floor`` times the largest
    coefficient magnitude.
    """
    N = V.order
    v = V.coeffs
    if V.backend == EXACT:
        if not v[0]:
            raise NonUnitError("constant term is zero; the series is not a unit")
        inv0 = 1 / v[0]
        nz = [j for j in range(1, N + 1) if v[j]]
        u = [inv0]
        for n in range(1, N + 1):
            s = 0
            for j in nz:
                if j > n:
                    break
                s += v[j] * u[n - j]
            u.append(-inv0 * s)
        return TruncatedSeries(u, EXACT)
    arr = np.asarray(v)
    scale = float(np.max(np.abs(arr))) or 1.0
    if abs(arr[0]) <= floor * scale:
        raise NonUnitError(f"|v_0| = {abs(arr[0]):.3g} is below the unit floor")
    u = np.zeros(N + 1, dtype=np.result_type(arr.dtype, float))
    inv0 = 1 / arr[0]
    u[0] = inv0
    for n in range(1, N + 1):
        # sum_{j=1..n} v_j u_{n-j}
        u[n] = -inv0 * np.dot(arr[1 : n + 1], u[n - 1 :: -1][:n])
    return TruncatedSeries(u, FLOAT)


def _canonical_float_sqrt(z: complex) -> complex:
    w = complex(np.sqrt(complex(z)))
    if w.real < 0 or (w.real == 0 and w.imag < 0):
        w = -w
    return w


def sqrt(V: TruncatedSeries, tol: float = 1e-12) -> TruncatedSeries:
    """Square root with the canonical branch.

    The leading coefficient of the result has positive real part (ties
    broken by nonnegative imaginary part).  When the lowest nonzero term of
    ``V`` sits at ``x^(2l)``, the top ``l`` coefficients of the result are
    not determined by ``V`` through order ``N`` and are returned as zero;
    the square of the result still equals ``V`` through order ``N``.
    """
    N = V.order
    if V.backend == EXACT:
        v = list(V.coeffs)
        nz = [n for n in range(N + 1) if v[n]]
    else:
        arr = np.asarray(V.coeffs)
        scale = float(np.max(np.abs(arr))) if len(arr) else 0.0
        nz = [n for n in range(N + 1) if abs(arr[n]) > tol * scale] if scale else []
        v = arr.tolist()
    if not nz:
        return TruncatedSeries.zero(N, V.backend)
    low = nz[0]
    if low % 2:
        raise NotASquareError(f"lowest nonzero term has odd exponent {low}")
    l = low // 2
    t = v[low:]  # coefficients of V / x^(2l), known through order N - 2l
    M = N - l  # result needs W' through this order, but t only reaches N - 2l
    if V.backend == EXACT:
        w0 = exact_sqrt(t[0])
        two_w0 = 2 * w0
        w = [w0]
        for n in range(1, M + 1):
            tn = t[n] if n < len(t) else 0
            s = 0
            for j in range(1, n):
                if w[j] and w[n - j]:
                    s += w[j] * w[n - j]
            w.append((tn - s) / two_w0)
        out = [0] * l + w
        # coefficients beyond N - l are undetermined by V; keep them zero
        for n in range(N - l + 1, N + 1):
            out[n] = 0
        return TruncatedSeries(out, EXACT)
    w0 = _canonical_float_sqrt(t[0])
    dtype = complex if (np.iscomplexobj(arr) or w0.imag != 0) else float
    w = np.zeros(M + 1, dtype=dtype)
    w[0] = w0 if dtype is complex else w0.real
    for n in range(1, M + 1):
        tn = t[n] if n < len(t) else 0.0
        s = np.dot(w[1:n], w[n - 1 : 0 : -1]) if n > 1 else 0.0
        w[n] = (tn - s) / (2 * w[0])
    out = np.zeros(N + 1, dtype=dtype)
    out[l : N - l + 1] = w[: N - 2 * l + 1]
    return TruncatedSeries(out, FLOAT)


def divide_by_one_minus_x(V: TruncatedSeries) -> TruncatedSeries:
    """Multiply by ``1/(1-x)``: coefficient ``n`` is ``v_0 + ... + v_n``."""
    return partial_sums(V)


def partial_sums(V: TruncatedSeries) -> TruncatedSeries:
    if V.backend == FLOAT:
        return TruncatedSeries(np.cumsum(V.coeffs), FLOAT)
    out, s = [], 0
    for c in V.coeffs:
        s = s + c
        out.append(s)
    return TruncatedSeries(out, EXACT)


def allclose(U: TruncatedSeries, V: TruncatedSeries, rtol: float = 1e-12) -> bool:
    """Equality up to ``rtol`` relative to the largest coefficient."""
    if U.order != V.order:
        return False
    a = np.asarray(U.to_float().coeffs)
    b = np.asarray(V.to_float().coeffs)
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))), 1e-300)
    return bool(np.all(np.abs(a - b) <= rtol * scale))


# ---------------------------------------------------------------------------
# behaviour at x = 1


@dataclass(frozen=True)
class ConvergencePolicy:
    """Thresholds used by the at-one classifier and the theorem layer.

    ``tail_start`` defaults to ``N // 2``.  Exponent margins are relative to
    the harmonic borderline ``p = 1`` of a power-law tail ``alpha * n**-p``.
    """

    tail_start: int | None = None
    tol: float = 1e-9
    divergence_threshold: float = 1e6
    convergent_margin: float = 0.1
    divergent_margin: float = 0.02
    oscillation_shrink: float = 0.9
    fit_rms: float = 0.5
    euler_depth: int = 10
    zero_tol: float = 1e-9
    min_order: int = 64
    bound_margin: float = 0.05
    float_rtol: float = 1e-12
    convexity_radius: int = 6

    def __post_init__(self):
        for name in ("tol", "divergence_threshold", "oscillation_shrink", "fit_rms", "zero_tol",
                     "float_rtol"):
            if not getattr(self, name) > 0:
                raise UsageError(f"policy value {name} must be positive")
        if self.min_order < 1 or self.euler_depth < 0 or self.convexity_radius < 0:
            raise UsageError("policy orders must be nonnegative (min_order >= 1)")
        if self.tail_start is not None and self.tail_start < 0:
            raise UsageError("tail_start must be nonnegative")

    def window_start(self, order: int) -> int:
        n0 = order // 2 if self.tail_start is None else self.tail_start
        return max(0, min(n0, order))


DEFAULT_POLICY = ConvergencePolicy()


class Mode(str, enum.Enum):
    ABSOLUTE = "absolute"
    CONDITIONAL = "conditional"
    DIVERGES_TO_PLUS_INFINITY = "diverges_to_plus_infinity"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class TailFit:
    """Least-squares fit of ``log|u_n|`` over the tail window.

    ``model`` is ``"geometric"`` (``alpha * rate**n``) or ``"power"``
    (``alpha * n**-rate``); ``period`` is the gcd of gaps between nonzero
    terms, and ``remainder`` estimates ``sum_{n>N} |u_n|``.
    """

    model: str
    alpha: float
    rate: float
    rms: float
    period: int
    last_index: int
    remainder: float

    @property
    def convergent(self) -> bool:
        return math.isfinite(self.remainder)

    def exponent(self) -> float | None:
        return self.rate if self.model == "power" else None


@dataclass(frozen=True)
class Diagnostics:
    test: str
    last_partial_sum: complex | float
    oscillation: float
    tail_bound: float
    fit: TailFit | None = None
    order: int = 0


@dataclass(frozen=True)
class ConvergenceVerdict:
    """Evidence about ``U(1)`` from a finite prefix.

    Verdicts are heuristic: ``heuristic`` is always True for classifier
    output and False only for user-supplied assertions.
    """

    mode: Mode
    value: complex | float | None = None
    diagnostics: Diagnostics | None = None
    heuristic: bool = True

    def __post_init__(self):
        has_value = self.value is not None
        if has_value != (self.mode in (Mode.ABSOLUTE, Mode.CONDITIONAL)):
            raise UsageError(f"value must be present iff mode is absolute/conditional ({self.mode})")

    @property
    def exists(self) -> bool:
        return self.mode in (Mode.ABSOLUTE, Mode.CONDITIONAL)

    @property
    def absolute(self) -> bool:
        return self.mode is Mode.ABSOLUTE

    @property
    def infinite(self) -> bool:
        return self.mode is Mode.DIVERGES_TO_PLUS_INFINITY

    @property
    def test(self) -> str:
        return self.diagnostics.test if self.diagnostics else "asserted"

    @classmethod
    def asserted(cls, mode: Mode | str, value=None) -> ConvergenceVerdict:
        """A caller-supplied verdict (not derived from data)."""
        return cls(Mode(mode), value, None, heuristic=False)


def _lstsq_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    A = np.vstack([np.ones_like(x), x]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid * resid)))


def fit_tail(mags: np.ndarray, start: int) -> TailFit | None:
    """Fit geometric and power-law models to the nonzero tail magnitudes.

    Returns the better fit (smaller log-scale rms, power law on ties), or
    None when fewer than three nonzero terms lie in ``[start, N]``.
    """
    mags = np.asarray(mags, dtype=float)
    N = len(mags) - 1
    idx = np.arange(max(start, 1), N + 1)
    idx = idx[mags[idx] > 0]
    if len(idx) < 3:
        return None
    n = idx.astype(float)
    y = np.log(mags[idx])
    period = int(np.gcd.reduce(np.diff(idx)))
    last = int(idx[-1])

    c_g, s_g, rms_g = _lstsq_line(n, y)
    c_p, s_p, rms_p = _lstsq_line(np.log(n), y)

    if rms_p <= rms_g + 1e-12:
        alpha, p = math.exp(c_p), -s_p
        if p > 1:
            rem = alpha * period ** (-p) * float(zeta(p, last / period + 1))
        else:
            rem = math.inf
        return TailFit("power", alpha, p, rms_p, period, last, rem)
    alpha, r = math.exp(c_g), math.exp(s_g)
    rg = r ** period
    if rg < 1:
        rem = alpha * r ** last * rg / (1 - rg)
    else:
        rem = math.inf
    return TailFit("geometric", alpha, r, rms_g, period, last, rem)


def periodic_ratio(u: np.ndarray, start: int, floor: float = 0.0, rtol: float = 1e-8,
                   max_period: int = 64) -> tuple[int, complex] | None:
    """Smallest ``P`` with ``u[n+P] = rho * u[n]`` across ``[start, N]``.

    Terms with ``|u_n| <= floor`` count as zero and must repeat with
    period ``P`` as well.  Rational series whose dominant poles share a
    modulus and differ by ``P``-th roots of unity have this shape.
    Returns ``(P, rho)`` or None.
    """
    u = np.asarray(u)
    N = len(u) - 1
    tail = u[max(start, 0):]
    live = np.abs(tail) > floor
    if live.sum() < 3:
        return None
    for P in range(1, min(max_period, (len(tail) - 1) // 3) + 1):
        if not np.array_equal(live[P:], live[:-P]):
            continue
        mask = live[:-P]
        if mask.sum() < 2:
            continue
        ratios = tail[P:][mask] / tail[:-P][mask]
        rho = complex(ratios[-1])
        if np.max(np.abs(ratios - rho)) <= rtol * max(1.0, abs(rho)):
            return P, rho
    return None


def _fit_diverges(fit: TailFit, policy: ConvergencePolicy) -> bool:
    if fit.model == "power":
        return fit.rate <= 1 + policy.divergent_margin
    return fit.rate ** fit.period >= 1


def _fit_converges(fit: TailFit, policy: ConvergencePolicy) -> bool:
    if fit.model == "power":
        return fit.rate >= 1 + policy.convergent_margin and fit.convergent
    return fit.convergent


def _euler_average(s: np.ndarray, depth: int) -> complex | float:
    s = np.asarray(s)
    k = min(depth, len(s) - 1)
    s = s[len(s) - k - 1 :]
    for _ in range(k):
        s = 0.5 * (s[1:] + s[:-1])
    return s[0].item()


def _uniform_phase(u: np.ndarray, start: int) -> complex | None:
    tail = u[start:]
    tail = tail[np.abs(tail) > 0]
    if len(tail) == 0:
        return None
    ph = tail / np.abs(tail)
    if np.max(np.abs(ph - ph[-1])) < 1e-6:
        return complex(ph[-1])
    return None


def _spread(values: np.ndarray) -> float:
    """Diameter bound of a set of partial sums (exact for real values)."""
    if len(values) == 0:
        return 0.0
    if np.iscomplexobj(values):
        return float(math.hypot(np.ptp(values.real), np.ptp(values.imag)))
    return float(np.ptp(values))


def _scalar(z) -> complex | float:
    z = complex(z)
    return z.real if z.imag == 0 else z


def classify_at_one(U: TruncatedSeries, policy: ConvergencePolicy = DEFAULT_POLICY) -> ConvergenceVerdict:
    """Classify ``sum u_n`` as absolute, conditional, ``+inf`` or undetermined.

    The tests run in order: (i) absolute, the tail is periodic-geometric
    (``u_{n+P} = rho u_n`` with ``|rho| < 1``, summed in closed form), or
    the fitted remainder of ``sum |u_n|`` converges (or the tail window is
    already below ``tol``);
    (ii) conditional, the partial-sum oscillation over ``[n0, N]`` is
    below ``tol`` or at most ``oscillation_shrink`` times the oscillation
    over ``[n0/2, n0]``; (iii) divergence to ``+inf`` for real nonnegative
    series whose partial sums pass ``divergence_threshold`` or whose fitted
    tail is not summable.  This is evidence from a finite prefix, not a
    proof.
    """
    u = np.asarray(U.to_float().coeffs)
    N = len(u) - 1
    n0 = policy.window_start(N)
    S = np.cumsum(u)
    last = _scalar(S[-1])
    mags = np.abs(u)
    # float coefficients carry roundoff where the exact value is zero
    floor = 1e-13 * float(mags.max()) if U.backend == FLOAT and N >= 0 else 0.0
    fit = fit_tail(np.where(mags > floor, mags, 0.0), n0 + 1)
    window_abs = float(mags[n0 + 1 :].sum())
    osc_last = _spread(S[n0:])
    osc_prev = _spread(S[n0 // 2 : n0 + 1])

    # (i) absolute convergence
    pr = periodic_ratio(u, n0 + 1, floor) if N - n0 >= 6 else None
    if pr is not None and abs(pr[1]) < 1:
        P, rho = pr
        rem_vec = np.sum(u[N - P + 1 :]) * rho / (1 - rho)
        rem_abs = float(np.sum(mags[N - P + 1 :])) * abs(rho) / (1 - abs(rho))
        diag = Diagnostics("absolute-periodic", last, osc_last, rem_abs, fit, N)
        return ConvergenceVerdict(Mode.ABSOLUTE, _scalar(S[-1] + rem_vec), diag)
    if fit is None and window_abs <= policy.tol:
        diag = Diagnostics("absolute-terminated", last, osc_last, window_abs, None, N)
        return ConvergenceVerdict(Mode.ABSOLUTE, last, diag)
    if fit is not None and fit.rms <= policy.fit_rms and _fit_converges(fit, policy):
        rem = fit.remainder
        phase = _uniform_phase(u, n0 + 1)
        tail_value = phase * rem if phase is not None else 0.0
        value = _scalar(S[-1] + tail_value)
        test = "absolute-observed" if rem <= policy.tol else "absolute-fitted"
        diag = Diagnostics(test, last, osc_last, rem, fit, N)
        return ConvergenceVerdict(Mode.ABSOLUTE, value, diag)

    # (ii) conditional convergence
    if osc_last <= policy.tol or (osc_prev > 0 and osc_last <= policy.oscillation_shrink * osc_prev):
        value = _scalar(_euler_average(S, policy.euler_depth))
        diag = Diagnostics("conditional-cauchy", last, osc_last, osc_last, fit, N)
        return ConvergenceVerdict(Mode.CONDITIONAL, value, diag)

    # (iii) divergence to +infinity
    real = not np.iscomplexobj(u)
    if real and np.all(u >= 0):
        if S[-1] > policy.divergence_threshold:
            diag = Diagnostics("diverges-threshold", last, osc_last, math.inf, fit, N)
            return ConvergenceVerdict(Mode.DIVERGES_TO_PLUS_INFINITY, None, diag)
        if fit is not None and fit.rms <= policy.fit_rms and _fit_diverges(fit, policy):
            diag = Diagnostics("diverges-fitted-growth", last, osc_last, math.inf, fit, N)
            return ConvergenceVerdict(Mode.DIVERGES_TO_PLUS_INFINITY, None, diag)

    diag = Diagnostics("undetermined", last, osc_last, math.nan, fit, N)
    return ConvergenceVerdict(Mode.UNDETERMINED, None, diag)


def combine_product(first: ConvergenceVerdict, second: ConvergenceVerdict) -> ConvergenceVerdict:
    """Verdict for the Cauchy product of two series.

    Absolute x absolute gives absolute; conditional x absolute (in either
    order) gives conditional with the product value (Mertens).  Everything
    else is undetermined.
    """
    modes = {first.mode, second.mode}
    if modes == {Mode.ABSOLUTE}:
        mode = Mode.ABSOLUTE
    elif modes == {Mode.ABSOLUTE, Mode.CONDITIONAL}:
        mode = Mode.CONDITIONAL
    else:
        return ConvergenceVerdict(Mode.UNDETERMINED, None, Diagnostics("mertens", math.nan, math.nan, math.nan))
    value = _scalar(complex(first.value) * complex(second.value))
    tb = [v.diagnostics.tail_bound for v in (first, second) if v.diagnostics]
    diag = Diagnostics("mertens", value, math.nan, max(tb) if tb else math.nan)
    return ConvergenceVerdict(mode, value, diag, heuristic=first.heuristic or second.heuristic)


# ---------------------------------------------------------------------------
# Abel extrapolation

DEFAULT_ABEL_GRID = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))


@dataclass(frozen=True)
class AbelEstimate:
    value: complex | float
    residual: float
    grid: tuple[float, ...] = field(default=())
    values: tuple = field(default=())
    truncation_error: float = 0.0


def _neville(ts: Sequence[float], fs: Sequence, t: float = 0.0):
    p = [complex(f) for f in fs]
    n = len(ts)
    for k in range(1, n):
        for i in range(n - k):
            j = i + k
            p[i] = ((t - ts[j]) * p[i] - (t - ts[i]) * p[i + 1]) / (ts[i] - ts[j])
    return p[0]


def abel_extrapolate(U: TruncatedSeries, grid: Sequence[float] = DEFAULT_ABEL_GRID,
                     tol: float = 1e-9) -> AbelEstimate:
    """Estimate ``lim_{x->1-} F_U(x)`` from samples of the truncated sum.

    ``F_U`` is evaluated by Horner's rule at every grid point and the limit
    is taken by polynomial extrapolation in ``t = 1 - x`` (Neville).  The
    residual is the change when the point farthest from 1 is dropped.
    """
    xs = [float(x) for x in grid]
    if not xs or any(not (0 <= x < 1) for x in xs) or any(b <= a for a, b in zip(xs, xs[1:])):
        raise UsageError("grid must be strictly increasing inside [0, 1)")
    u = np.asarray(U.to_float().coeffs)
    N = len(u) - 1
    xmax = xs[-1]
    n0 = N // 2
    M = float(np.max(np.abs(u[n0:]))) if N >= 0 else 0.0
    trunc = M * xmax ** (N + 1) / (1 - xmax)
    if trunc > tol:
        raise InsufficientOrderError(
            f"truncation error {trunc:.3g} at x={xmax} exceeds {tol:.3g}; raise the order"
        )
    coeffs = u[::-1]
    values = [np.polyval(coeffs, x).item() for x in xs]
    ts = [1 - x for x in xs]
    est = _neville(ts, values)
    if len(xs) > 1:
        # drop the sample farthest from x = 1
        alt = _neville(ts[1:], values[1:])
        residual = abs(est - alt)
    else:
        residual = math.inf
    return AbelEstimate(_scalar(est), float(residual), tuple(xs), tuple(values), trunc)
