"""Adaptive quadrature engines for finite, semi-infinite, oscillatory and 2D integrals.

All integrands are vectorized: they receive a numpy array of abscissae and
return an array of (possibly complex) values.  ``vectorize_scalar`` wraps a
scalar-only callable.  Every engine returns an IntegrationResult carrying a
value, an error estimate from the embedded rule pair, the evaluation count and
a convergence flag.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import HintViolation, NonConvergence

__all__ = [
    "QuadConfig",
    "DecayHint",
    "IntegrationResult",
    "Domain",
    "integrate_adaptive",
    "integrate_semiinfinite",
    "integrate_fourier_line",
    "integrate_2d",
    "vectorize_scalar",
]


@dataclass(frozen=True)
class QuadConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 4000
    max_evals: int = 2_000_000
    truncation_margin: float = 0.1

    def __post_init__(self):
        if not (0.0 < self.abs_tol < 1.0 and 0.0 < self.rel_tol < 1.0):
            raise ValueError("tolerances must lie in (0, 1)")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")

    def with_tol(self, abs_tol=None, rel_tol=None) -> "QuadConfig":
        return QuadConfig(
            abs_tol=self.abs_tol if abs_tol is None else abs_tol,
            rel_tol=self.rel_tol if rel_tol is None else rel_tol,
            max_subdivisions=self.max_subdivisions,
            max_evals=self.max_evals,
            truncation_margin=self.truncation_margin,
        )


@dataclass(frozen=True)
class DecayHint:
    """Declared decay envelope of an integrand on a half line.

    kind 'exponential': |f| ~ A e^{-rate*x};  'gaussian': |f| ~ A e^{-rate*x^2};
    'power': |f| ~ A x^{-rate} with rate > 1.  oscillation_freq records the
    dominant angular frequency, used to align subdivisions.
    """

    kind: str
    rate: float
    oscillation_freq: float = 0.0

    def __post_init__(self):
        if self.kind not in ("exponential", "gaussian", "power"):
            raise ValueError(f"unknown decay kind {self.kind!r}")
        if self.rate <= 0.0:
            raise ValueError("decay rate must be positive")
        if self.kind == "power" and self.rate <= 1.0:
            raise ValueError("power decay needs exponent > 1")

    def envelope(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "exponential":
            return np.exp(-self.rate * x)
        if self.kind == "gaussian":
            return np.exp(-self.rate * x * x)
        return np.where(x > 1.0, x ** (-self.rate), 1.0)

    def truncation_point(self, tail_bound: float, amplitude: float = 1.0) -> float:
        """Smallest T with the analytic tail bound below tail_bound."""
        a = max(amplitude, 1e-300)
        if self.kind == "exponential":
            # tail = A e^{-rT}/r
            t = math.log(a / (tail_bound * self.rate)) / self.rate
        elif self.kind == "gaussian":
            # tail < A e^{-rT^2}/(2rT); drop the 1/T factor (conservative)
            t = math.sqrt(max(math.log(a / tail_bound), 1.0) / self.rate)
        else:
            # tail = A T^{1-p}/(p-1)
            t = (a / (tail_bound * (self.rate - 1.0))) ** (1.0 / (self.rate - 1.0))
        return max(t, 1.0)


@dataclass
class IntegrationResult:
    value: complex
    err_estimate: float
    evals: int
    converged: bool

    def __add__(self, other: "IntegrationResult") -> "IntegrationResult":
        return IntegrationResult(
            self.value + other.value,
            self.err_estimate + other.err_estimate,
            self.evals + other.evals,
            self.converged and other.converged,
        )


@dataclass(frozen=True)
class Domain:
    """1D domain spec for integrate_2d: finite [a,b], semi-infinite [0,inf)
    with a decay hint, or the full real line with a symmetric hint."""

    kind: str
    a: float = 0.0
    b: float = 1.0
    hint: DecayHint | None = None

    def __post_init__(self):
        if self.kind not in ("finite", "semi_infinite", "real_line"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind != "finite" and self.hint is None:
            raise ValueError("unbounded domains need a decay hint")


def vectorize_scalar(f):
    """Wrap a scalar callable so quadrature engines can batch-evaluate it."""

    def g(xs):
        xs = np.atleast_1d(xs)
        return np.array([f(float(x)) for x in xs], dtype=complex)

    return g


# Embedded Gauss pair: a 7-point rule nested (in accuracy, not nodes) inside a
# 15-point rule; the difference supplies the local error estimate.
_XG7, _WG7 = np.polynomial.legendre.leggauss(7)
_XG15, _WG15 = np.polynomial.legendre.leggauss(15)


def _rule_pair(f, a: float, b: float):
    """Return (I15, |I15-I7|, evals) on [a, b]."""
    h = 0.5 * (b - a)
    m = 0.5 * (b + a)
    xs = np.concatenate((m + h * _XG15, m + h * _XG7))
    ys = np.asarray(f(xs), dtype=complex)
    if not np.all(np.isfinite(ys)):
        raise NonConvergence(f"non-finite integrand value on [{a}, {b}]")
    i15 = h * np.dot(_WG15, ys[:15])
    i7 = h * np.dot(_WG7, ys[15:])
    return i15, abs(i15 - i7), xs.size


def integrate_adaptive(f, a: float, b: float, cfg: QuadConfig) -> IntegrationResult:
    """Adaptive bisection on [a, b] with an embedded Gauss rule pair."""
    if not a < b:
        raise ValueError("need a < b")
    val, err, n = _rule_pair(f, a, b)
    # heap keyed by -err; counter breaks ties deterministically
    counter = 1
    heap = [(-err, 0, a, b, val, err)]
    total = val
    total_err = err
    nsub = 0
    while heap and nsub < cfg.max_subdivisions and n < cfg.max_evals:
        if total_err <= max(cfg.abs_tol, cfg.rel_tol * abs(total)):
            break
        _, _, lo, hi, v_old, e_old = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval at floating-point resolution
            heapq.heappush(heap, (0.0, counter, lo, hi, v_old, e_old))
            counter += 1
            break
        v1, e1, n1 = _rule_pair(f, lo, mid)
        v2, e2, n2 = _rule_pair(f, mid, hi)
        n += n1 + n2
        total += v1 + v2 - v_old
        total_err += e1 + e2 - e_old
        heapq.heappush(heap, (-e1, counter, lo, mid, v1, e1))
        heapq.heappush(heap, (-e2, counter + 1, mid, hi, v2, e2))
        counter += 2
        nsub += 1
    # recompute from the heap to avoid error-estimate drift
    if heap:
        total = sum(item[4] for item in heap)
        total_err = sum(item[5] for item in heap)
    converged = total_err <= max(cfg.abs_tol, cfg.rel_tol * abs(total))
    return IntegrationResult(complex(total), float(total_err), n, converged)


def _estimate_amplitude(f, hint: DecayHint, t0: float):
    """Sample |f|/envelope on the front of [0, t0]; also flags gross hint
    violations near the truncation point."""
    front = np.array([0.02, 0.05, 0.1, 0.2, 0.35, 0.5]) * t0
    back = np.array([0.7, 0.85]) * t0
    fv = np.abs(np.asarray(f(front), dtype=complex))
    env = hint.envelope(front)
    amp = float(np.max(fv / np.maximum(env, 1e-300))) if fv.size else 0.0
    if amp > 0.0:
        bv = np.abs(np.asarray(f(back), dtype=complex))
        benv = amp * hint.envelope(back)
        if np.any(bv > 10.0 * np.maximum(benv, 1e-280)):
            raise HintViolation(
                "integrand exceeds declared decay envelope by more than 10x"
            )
    return amp


def integrate_semiinfinite(f, hint: DecayHint, cfg: QuadConfig) -> IntegrationResult:
    """Integrate f over [0, inf) by hint-driven truncation + adaptive rule."""
    tail = cfg.abs_tol * cfg.truncation_margin
    t0 = hint.truncation_point(tail, 1.0)
    amp = _estimate_amplitude(f, hint, t0)
    if amp == 0.0:
        return IntegrationResult(0.0 + 0.0j, 0.0, 8, True)
    t = hint.truncation_point(tail, amp)
    t = min(max(t, 1.0), 1e6)
    return _integrate_chunked(f, 0.0, t, hint.oscillation_freq, cfg)


def _integrate_chunked(f, a: float, b: float, omega: float, cfg: QuadConfig):
    """Adaptive integration of [a, b]; when omega*(b-a) is large the interval
    is pre-split into half-period-aligned chunks so oscillation cancellation
    happens inside each adaptive call."""
    omega = abs(omega)
    if omega * (b - a) <= 20.0:
        return integrate_adaptive(f, a, b, cfg)
    half_period = math.pi / omega
    # group half-periods so the chunk count stays bounded
    n_chunks = int(min(max(2, math.ceil((b - a) / half_period / 4.0)), 256))
    edges = np.linspace(a, b, n_chunks + 1)
    sub_cfg = cfg.with_tol(abs_tol=cfg.abs_tol / n_chunks)
    out = IntegrationResult(0.0 + 0.0j, 0.0, 0, True)
    for lo, hi in zip(edges[:-1], edges[1:]):
        out = out + integrate_adaptive(f, float(lo), float(hi), sub_cfg)
    return out


def integrate_fourier_line(
    g, omega: float, hint: DecayHint, cfg: QuadConfig, even: bool = False
) -> IntegrationResult:
    """Compute the Fourier-type line integral of g with phase e^{-i*omega*y}
    over the whole real axis.  For even g this is 2*int_0^inf cos(omega y) g."""
    tail = cfg.abs_tol * cfg.truncation_margin
    t0 = hint.truncation_point(tail, 1.0)
    amp = _estimate_amplitude(lambda y: g(np.asarray(y)), hint, t0)
    if amp == 0.0:
        return IntegrationResult(0.0 + 0.0j, 0.0, 8, True)
    t = min(max(hint.truncation_point(tail, amp), 1.0), 1e6)
    if even:
        fe = lambda y: 2.0 * np.cos(omega * y) * np.asarray(g(y))
        return _integrate_chunked(fe, 0.0, t, omega, cfg)
    fw = lambda y: np.exp(-1j * omega * y) * np.asarray(g(y))
    half = cfg.with_tol(abs_tol=cfg.abs_tol / 2.0)
    left = _integrate_chunked(fw, -t, 0.0, omega, half)
    right = _integrate_chunked(fw, 0.0, t, omega, half)
    return left + right


def _domain_interval(dom: Domain, tail: float, scale: float = 1.0):
    if dom.kind == "finite":
        return dom.a, dom.b
    t = min(max(dom.hint.truncation_point(tail, scale), 1.0), 1e6)
    if dom.kind == "semi_infinite":
        return 0.0, t
    return -t, t


def integrate_2d(f, outer: Domain, inner: Domain, cfg: QuadConfig) -> IntegrationResult:
    """Iterated 2D integration: the outer variable is adaptive, the inner
    integral is evaluated at 10x tighter tolerance per outer abscissa.
    f(u, ys) must accept a scalar outer value and an array of inner values."""
    tail = cfg.abs_tol * cfg.truncation_margin
    in_cfg = cfg.with_tol(abs_tol=cfg.abs_tol / 10.0, rel_tol=cfg.rel_tol / 10.0)
    ia, ib = _domain_interval(inner, tail * 0.1)
    oa, ob = _domain_interval(outer, tail)
    in_omega = inner.hint.oscillation_freq if inner.hint is not None else 0.0
    out_omega = outer.hint.oscillation_freq if outer.hint is not None else 0.0
    state = {"evals": 0, "err": 0.0, "converged": True}

    def outer_integrand(us):
        us = np.atleast_1d(us)
        vals = np.empty(us.shape, dtype=complex)
        for i, u in enumerate(us):
            r = _integrate_chunked(lambda ys: f(float(u), ys), ia, ib, in_omega, in_cfg)
            state["evals"] += r.evals
            state["err"] = max(state["err"], r.err_estimate)
            state["converged"] = state["converged"] and r.converged
            vals[i] = r.value
        return vals

    res = _integrate_chunked(outer_integrand, oa, ob, out_omega, cfg)
    # inner error propagates through the outer measure
    inner_err = state["err"] * (ob - oa)
    return IntegrationResult(
        res.value,
        res.err_estimate + inner_err,
        res.evals + state["evals"],
        res.converged and state["converged"],
    )
