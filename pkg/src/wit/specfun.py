"""Special functions of complex index.

Everything the transform kernels need: complex gamma, Macdonald function of
complex order, Bessel J/I, Gauss 2F1 with conjugate-pair parameter support on
the negative axis, Tricomi psi, Whittaker W (two independent integral routes)
and M, parabolic cylinder D, generalized pFq and the Appell F1/F3 double
series.  Quadrature-backed functions return an EvalResult with an error
estimate and the route taken.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AccuracyLoss,
    DomainError,
    NonConvergence,
    PoleError,
    RangeError,
    UnsupportedParameters,
)
from .quadrature import DecayHint, QuadConfig, integrate_adaptive, _integrate_chunked

__all__ = [
    "EvalResult",
    "gamma_complex",
    "rgamma",
    "abs_gamma_sq",
    "pochhammer",
    "macdonald_k",
    "macdonald_k_array",
    "macdonald_k_order_array",
    "bessel_j",
    "bessel_i",
    "bessel_i_with_deriv",
    "gauss_2f1",
    "tricomi_psi",
    "whittaker_w",
    "whittaker_w_macdonald_route",
    "whittaker_w_m_array",
    "whittaker_m",
    "parabolic_cylinder_d",
    "hyp_pfq",
    "appell_f1",
    "appell_f3",
]

_DEFAULT_CFG = QuadConfig()


@dataclass
class EvalResult:
    value: complex
    err_estimate: float
    route: str

    def __complex__(self):
        return complex(self.value)


def cpow(x: float, w) -> complex:
    """x**w for real x > 0 and complex w."""
    return cmath.exp(w * math.log(x))


# ---------------------------------------------------------------------------
# gamma

# Lanczos coefficients, g = 7, 9 terms (double-precision classic set).
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _near_nonpositive_int(z: complex, tol: float = 1e-12) -> bool:
    if abs(z.imag) > tol:
        return False
    r = round(z.real)
    return r <= 0 and abs(z.real - r) <= tol


def _lanczos(z: complex) -> complex:
    # valid for Re z >= 0.5
    z = z - 1.0
    s = _LANCZOS_C[0]
    for i in range(1, len(_LANCZOS_C)):
        s += _LANCZOS_C[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * s


def gamma_complex(z) -> complex:
    """Euler gamma for complex argument; raises PoleError on the poles."""
    z = complex(z)
    if _near_nonpositive_int(z):
        raise PoleError(f"gamma pole at z={z}")
    if z.real < 0.5:
        # reflection; sin(pi z) can overflow for large |Im z|, compute in logs
        if abs(z.imag) > 30.0:
            return cmath.exp(_log_pi_over_sin(z)) / _lanczos(1.0 - z)
        return math.pi / (cmath.sin(math.pi * z) * _lanczos(1.0 - z))
    return _lanczos(z)


def _log_pi_over_sin(z: complex) -> complex:
    # log(pi / sin(pi z)) without overflow for large |Im z|
    iz = 1j * math.pi * z
    if z.imag > 0:
        # sin(pi z) = (e^{i pi z} - e^{-i pi z})/(2i); e^{-i pi z} dominates
        return math.log(2.0 * math.pi) + 1j * math.pi / 2 + iz - cmath.log1p(
            -cmath.exp(2.0 * iz)
        )
    return math.log(2.0 * math.pi) + 1j * math.pi / 2 - iz - cmath.log1p(
        -cmath.exp(-2.0 * iz)
    ) - 1j * math.pi


def rgamma(z) -> complex:
    """1/Gamma(z); entire, returns 0 at the poles."""
    z = complex(z)
    if _near_nonpositive_int(z):
        return 0.0 + 0.0j
    return 1.0 / gamma_complex(z)


def abs_gamma_sq(z) -> float:
    """|Gamma(z)|^2 = Gamma(z) * Gamma(conj z)."""
    return abs(gamma_complex(z)) ** 2


def pochhammer(a, n: int) -> complex:
    """Rising factorial (a)_n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = 1.0 + 0.0j
    a = complex(a)
    for j in range(n):
        out *= a + j
    return out


# ---------------------------------------------------------------------------
# Macdonald function of complex order (cosh-integral route)


def _macdonald_cutoff(y: float, re_sigma: float, tol: float) -> float:
    # smallest U with y*cosh(U) - |Re sigma|*U >= -log(tol) + margin
    level = -math.log(tol) + 5.0
    rs = abs(re_sigma)
    u = math.acosh(max(level / y, 1.5))
    for _ in range(4):
        u = math.acosh(max((level + rs * u) / y, 1.5))
    return u


def macdonald_k(order, y: float, cfg: QuadConfig = _DEFAULT_CFG) -> EvalResult:
    """K_sigma(y) = int_0^inf exp(-y cosh u) cosh(sigma u) du for y > 0."""
    if y <= 0:
        raise DomainError("macdonald_k needs y > 0")
    sigma = complex(order)
    u_max = _macdonald_cutoff(y, sigma.real, cfg.abs_tol * cfg.truncation_margin)

    def integrand(us):
        return np.exp(-y * np.cosh(us)) * np.cosh(sigma * us)

    res = integrate_adaptive(integrand, 0.0, u_max, cfg)
    if not res.converged:
        raise NonConvergence("macdonald_k adaptive budget exhausted")
    return EvalResult(res.value, res.err_estimate + cfg.abs_tol * cfg.truncation_margin,
                      "cosh_integral")


def _panel_nodes(a: float, b: float, n_panels: int, n_gauss: int = 16):
    xg, wg = np.polynomial.legendre.leggauss(n_gauss)
    edges = np.linspace(a, b, n_panels + 1)
    h = 0.5 * (edges[1:] - edges[:-1])
    m = 0.5 * (edges[1:] + edges[:-1])
    xs = (m[:, None] + h[:, None] * xg[None, :]).ravel()
    ws = (h[:, None] * wg[None, :]).ravel()
    return xs, ws


def macdonald_k_array(order, ys: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """K_sigma at a vector of arguments via a fixed composite Gauss grid.

    The u-grid is sized for the smallest argument; panels of unit width keep
    the smooth integrand fully resolved at 16 points per panel.
    """
    sigma = complex(order)
    ys = np.asarray(ys, dtype=float)
    y_min = float(np.min(ys))
    if y_min <= 0:
        raise DomainError("macdonald_k_array needs y > 0")
    u_max = _macdonald_cutoff(y_min, sigma.real, tol)
    us, ws = _panel_nodes(0.0, u_max, max(4, int(math.ceil(u_max))))
    ch = np.cosh(us)
    w_kernel = ws * np.cosh(sigma * us)
    # rows: y values; columns: u nodes
    return np.exp(-np.outer(ys, ch)) @ w_kernel


def macdonald_k_order_array(orders: np.ndarray, y: float, tol: float = 1e-12) -> np.ndarray:
    """K at a vector of complex orders, one positive argument."""
    orders = np.asarray(orders, dtype=complex)
    if y <= 0:
        raise DomainError("macdonald_k_order_array needs y > 0")
    re_max = float(np.max(np.abs(orders.real)))
    u_max = _macdonald_cutoff(y, re_max, tol)
    us, ws = _panel_nodes(0.0, u_max, max(4, int(math.ceil(u_max))))
    w_env = ws * np.exp(-y * np.cosh(us))
    return np.cosh(np.outer(orders, us)) @ w_env


# ---------------------------------------------------------------------------
# Bessel J (real order >= -1/2) and I (complex order)

_J_SWITCH = 12.0


def _bessel_j_series(nu: float, xs: np.ndarray, max_terms: int = 400) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    half = 0.5 * xs
    term = np.where(xs == 0.0, 1.0 if nu == 0.0 else 0.0,
                    np.exp(nu * np.log(np.where(xs > 0, half, 1.0)))) * rgamma(nu + 1.0).real
    if nu == 0.0:
        term = np.ones_like(xs)
    out = term.copy()
    q = -0.25 * xs * xs
    for k in range(max_terms):
        term = term * q / ((k + 1.0) * (nu + k + 1.0))
        out += term
        if np.all(np.abs(term) <= 1e-17 * (1.0 + np.abs(out))):
            break
    return out


def _bessel_j_asym(nu: float, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    mu = 4.0 * nu * nu
    p = np.ones_like(xs)
    q = np.zeros_like(xs)
    a = np.ones_like(xs)
    best = np.full_like(xs, np.inf)
    for k in range(1, 30):
        a = a * (mu - (2.0 * k - 1.0) ** 2) / (8.0 * k * xs)
        mag = np.max(np.abs(a))
        if mag > np.max(best):
            break
        best = np.minimum(best, np.abs(a))
        s = (-1.0) ** (k // 2)
        if k % 2 == 1:
            q = q + s * a
        else:
            p = p + s * a
    chi = xs - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * xs)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j(order: float, x, route: str = "auto"):
    """Bessel J of real order >= -1/2 at nonnegative real argument(s).

    Ascending series below x=12, Hankel asymptotic expansion above; the two
    are cross-checked in a band around the switch and AccuracyLoss is raised
    if they disagree beyond 1e-9.
    """
    if order < -0.5:
        raise DomainError("bessel_j supports order >= -1/2")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs < 0):
        raise DomainError("bessel_j needs x >= 0")
    if route == "series":
        out = _bessel_j_series(order, xs)
    elif route == "asymptotic":
        out = _bessel_j_asym(order, xs)
    else:
        out = np.empty_like(xs)
        lo = xs <= _J_SWITCH
        if np.any(lo):
            out[lo] = _bessel_j_series(order, xs[lo])
        if np.any(~lo):
            out[~lo] = _bessel_j_asym(order, xs[~lo])
        band = (xs > _J_SWITCH - 0.5) & (xs < _J_SWITCH + 0.5)
        if np.any(band):
            d = np.abs(_bessel_j_series(order, xs[band]) - _bessel_j_asym(order, xs[band]))
            if np.any(d > 1e-9):
                raise AccuracyLoss(
                    f"bessel_j routes disagree by {float(np.max(d)):.2e} near switch"
                )
    return float(out[0]) if np.isscalar(x) or np.asarray(x).ndim == 0 else out


def bessel_i(order, x, tol: float = 1e-15, max_terms: int = 600):
    """Modified Bessel I of complex order, ascending series; x <= 50."""
    sigma = complex(order)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs <= 0):
        raise DomainError("bessel_i needs x > 0")
    if np.any(xs > 50.0):
        raise RangeError("bessel_i supports x <= 50")
    half_log = np.log(0.5 * xs)
    term = np.exp(sigma * half_log) * rgamma(sigma + 1.0)
    out = term.copy()
    q = 0.25 * xs * xs
    ok = 0
    for k in range(max_terms):
        term = term * q / ((k + 1.0) * (sigma + k + 1.0))
        out = out + term
        if np.all(np.abs(term) <= tol * (1.0 + np.abs(out))):
            ok += 1
            if ok >= 3:
                break
        else:
            ok = 0
    else:
        raise NonConvergence("bessel_i series did not settle")
    return complex(out[0]) if np.asarray(x).ndim == 0 else out


def bessel_i_with_deriv(order, x: float, tol: float = 1e-15):
    """(I_sigma(x), I'_sigma(x)) from one term-wise differentiated series."""
    sigma = complex(order)
    if not 0 < x <= 50.0:
        raise RangeError("bessel_i_with_deriv supports 0 < x <= 50")
    half_log = math.log(0.5 * x)
    term = cmath.exp(sigma * half_log) * rgamma(sigma + 1.0)
    val = term
    der = term * sigma / x
    q = 0.25 * x * x
    for k in range(600):
        term = term * q / ((k + 1.0) * (sigma + k + 1.0))
        val += term
        der += term * (sigma + 2.0 * (k + 1.0)) / x
        if abs(term) <= tol * (1.0 + abs(val)):
            break
    return val, der


# ---------------------------------------------------------------------------
# Gauss 2F1 on the closed negative real axis


def _hyp2f1_raw_series(a, b, c, w, tol: float, max_terms: int = 100_000):
    """Plain ascending series at argument w, |w| < 1; returns (sum, err)."""
    term = 1.0 + 0.0j
    out = term
    ok = 0
    for n in range(max_terms):
        term = term * (a + n) * (b + n) / ((c + n) * (n + 1.0)) * w
        out += term
        if abs(term) <= tol * (1.0 + abs(out)):
            ok += 1
            if ok >= 3:
                return out, abs(term)
        else:
            ok = 0
    raise NonConvergence("2F1 series exceeded term budget")


def _gauss_2f1_series(a, b, c, z, cfg: QuadConfig) -> EvalResult:
    w = z / (z - 1.0)
    s, tail = _hyp2f1_raw_series(a, c - b, c, w, 1e-16)
    pref = cpow(1.0 - z, -a) if z != 0 else 1.0
    val = pref * s
    return EvalResult(val, abs(pref) * tail + 1e-15 * abs(val), "series")


def _gauss_2f1_transformation(a, b, c, z, cfg: QuadConfig) -> EvalResult:
    # inversion z -> 1/z (connection formula), valid off integer a-b
    if z >= -1.0:
        raise DomainError("inversion route needs z < -1")
    g_c = gamma_complex(c)
    t1 = (
        g_c * gamma_complex(b - a) * rgamma(b) * rgamma(c - a)
        * cmath.exp(-a * cmath.log(-z))
    )
    s1, tail1 = _hyp2f1_raw_series(a, a - c + 1.0, a - b + 1.0, 1.0 / z, 1e-16)
    t2 = (
        g_c * gamma_complex(a - b) * rgamma(a) * rgamma(c - b)
        * cmath.exp(-b * cmath.log(-z))
    )
    s2, tail2 = _hyp2f1_raw_series(b, b - c + 1.0, b - a + 1.0, 1.0 / z, 1e-16)
    val = t1 * s1 + t2 * s2
    err = abs(t1) * tail1 + abs(t2) * tail2 + 1e-14 * (abs(t1 * s1) + abs(t2 * s2))
    return EvalResult(val, err, "transformation")


def _gauss_2f1_integral(a, b, c, z, cfg: QuadConfig) -> EvalResult:
    """Bessel-Macdonald integral route for conjugate-pair numerator
    parameters a = u+s, b = u-s (u real) at z = -x^2 <= 0."""
    u = 0.5 * (a + b)
    sigma = 0.5 * (a - b)
    if abs(u.imag) > 1e-10 or abs(complex(c).imag) > 1e-10:
        raise UnsupportedParameters("integral route needs real a+b and c")
    u = u.real
    c = complex(c).real
    if c <= 0 or u <= abs(sigma.real):
        raise UnsupportedParameters("integral route needs c > 0 and (a+b)/2 > |Re (a-b)/2|")
    x = math.sqrt(-z)
    two_sigma = 2.0 * sigma

    def integrand(ys):
        return (
            np.exp((2.0 * u - c) * np.log(ys))
            * bessel_j(c - 1.0, x * ys)
            * macdonald_k_array(two_sigma, ys)
        )

    level = -math.log(cfg.abs_tol * cfg.truncation_margin) + 5.0
    t_max = level + max(2.0 * u - c, 0.0) * math.log(level + 3.0) + 3.0
    # y in (0,1] via y = e^{-v}: turns the log-oscillation of K near 0 into a
    # plain damped oscillation in v
    head_rate = 2.0 * u - c + 1.0 - 2.0 * abs(sigma.real)
    v_max = level / head_rate

    def head(vs):
        return np.exp(-vs) * integrand(np.exp(-vs))

    res_head = integrate_adaptive(head, 0.0, v_max, cfg)
    res_tail = _integrate_chunked(integrand, 1.0, t_max, x, cfg)
    res = res_head + res_tail
    pref = (
        2.0 ** (1.0 - 2.0 * u + c) * x ** (1.0 - c) * gamma_complex(c)
        * rgamma(a) * rgamma(b)
    )
    val = pref * res.value
    return EvalResult(val, abs(pref) * res.err_estimate + 1e-13 * abs(val),
                      "macdonald_integral")


def gauss_2f1(a, b, c, z: float, cfg: QuadConfig = _DEFAULT_CFG,
              route: str = "auto") -> EvalResult:
    """Gauss 2F1(a,b;c;z) for real z <= 0.

    Default: Pfaff transformation to w = z/(z-1) in [0,1) plus the ascending
    series.  Past w = 0.9 the argument is large and negative; conjugate-pair
    numerator parameters (the only pattern the transform kernels produce)
    switch to the inversion/integral routes.
    """
    a, b, c = complex(a), complex(b), complex(c)
    if _near_nonpositive_int(c):
        raise PoleError(f"2F1 denominator parameter pole at c={c}")
    if z > 0:
        raise DomainError("gauss_2f1 supports z <= 0")
    if z == 0.0:
        return EvalResult(1.0 + 0.0j, 0.0, "series")
    if route == "series":
        return _gauss_2f1_series(a, b, c, z, cfg)
    if route == "integral":
        return _gauss_2f1_integral(a, b, c, z, cfg)
    if route == "transformation":
        return _gauss_2f1_transformation(a, b, c, z, cfg)
    w = z / (z - 1.0)
    if w <= 0.9:
        return _gauss_2f1_series(a, b, c, z, cfg)
    if abs((a + b).imag) > 1e-10:
        raise UnsupportedParameters(
            "large-argument 2F1 requires conjugate-pair numerator parameters"
        )
    ab = a - b
    if abs(ab.imag) < 1e-6 and abs(ab.real - round(ab.real)) < 1e-6:
        # inversion formula degenerates near integer a-b
        return _gauss_2f1_integral(a, b, c, z, cfg)
    return _gauss_2f1_transformation(a, b, c, z, cfg)


# ---------------------------------------------------------------------------
# Laplace-type integrals with endpoint power singularities


def _laplace_split(base, kappa: float, rate: float, poly_growth: float,
                   cfg: QuadConfig):
    """Integrate base(s)*s^kappa over [0, inf) where base is smooth, decays
    like e^{-rate*s} with polynomial factor s^poly_growth, and kappa > -1.

    [0,1] uses s = v^{1/(1+kappa)} so the transformed integrand is bounded;
    [1,T] is integrated directly with hint-driven truncation.
    """
    level = -math.log(cfg.abs_tol * cfg.truncation_margin) + 3.0
    t_max = level / rate
    for _ in range(3):
        t_max = (level + max(poly_growth, 0.0) * math.log(max(t_max, 2.0))) / rate
    t_max = max(t_max, 2.0)

    if kappa < 0.0:
        p = 1.0 / (1.0 + kappa)

        def head(vs):
            ss = vs ** p
            return p * base(ss) * np.exp((p - 1.0) * np.log(vs) + kappa * np.log(ss))

        res_head = integrate_adaptive(head, 1e-14, 1.0, cfg)
    else:
        res_head = integrate_adaptive(
            lambda ss: base(ss) * ss ** kappa, 1e-14, 1.0, cfg
        )
    res_tail = integrate_adaptive(
        lambda ss: base(ss) * np.exp(kappa * np.log(ss)), 1.0, t_max, cfg
    )
    return res_head + res_tail


def tricomi_psi(a, b, x: float, cfg: QuadConfig = _DEFAULT_CFG) -> EvalResult:
    """Tricomi's confluent function of the second kind via its Laplace
    integral, Re a > 0, x > 0."""
    a, b = complex(a), complex(b)
    if a.real <= 0:
        raise DomainError("tricomi_psi needs Re a > 0")
    if x <= 0:
        raise DomainError("tricomi_psi needs x > 0")
    exp_t = a - 1.0          # t^{a-1}
    exp_1pt = b - a - 1.0    # (1+t)^{b-a-1}

    def base(ts):
        out = np.exp(-x * ts + exp_1pt * np.log1p(ts))
        if exp_t.imag != 0.0:
            out = out * np.exp(1j * exp_t.imag * np.log(ts))
        return out

    res = _laplace_split(base, exp_t.real, x, exp_1pt.real, cfg)
    pref = rgamma(a)
    val = pref * res.value
    return EvalResult(val, abs(pref) * res.err_estimate + 1e-14 * abs(val),
                      "laplace_integral")


def whittaker_w(alpha: float, m, x: float, cfg: QuadConfig = _DEFAULT_CFG) -> EvalResult:
    """Whittaker W_{alpha,m}(x) via its Laplace integral representation.

    Valid for Re m + 1/2 > alpha; handles complex second index (and hence the
    purely imaginary indices of the index transforms).
    """
    m = complex(m)
    if x <= 0:
        raise DomainError("whittaker_w needs x > 0")
    if not m.real + 0.5 > alpha:
        raise DomainError("whittaker_w requires Re m + 1/2 > alpha")
    exp_s = m - alpha - 0.5
    exp_1ps = m + alpha - 0.5

    def base(ss):
        out = np.exp(-x * ss + exp_1ps * np.log1p(ss))
        if exp_s.imag != 0.0:
            out = out * np.exp(1j * exp_s.imag * np.log(ss))
        return out

    res = _laplace_split(base, exp_s.real, x, exp_1ps.real, cfg)
    pref = cmath.exp(-0.5 * x + (m + 0.5) * math.log(x)) * rgamma(0.5 - alpha + m)
    val = pref * res.value
    return EvalResult(val, abs(pref) * res.err_estimate + 1e-14 * abs(val),
                      "laplace_integral")


def whittaker_w_m_array(alpha: float, m0: float, taus: np.ndarray, x: float,
                        n_panels: int = 10) -> np.ndarray:
    """W_{alpha, m0 + i tau_j}(x) for a vector of taus on one fixed x.

    Shares a composite Gauss grid across all orders; the tau dependence enters
    only through exp(i tau (log s + log(1+s))), so the whole batch costs one
    matrix product.  Used by the tau-quadratures of the index transforms.
    """
    taus = np.asarray(taus, dtype=float)
    if x <= 0:
        raise DomainError("whittaker_w_m_array needs x > 0")
    if not m0 + 0.5 > alpha:
        raise DomainError("requires m0 + 1/2 > alpha")
    kappa = m0 - alpha - 0.5
    tau_max = float(np.max(np.abs(taus))) if taus.size else 1.0
    level = -math.log(1e-14) + 3.0
    t_max = max((level + abs(m0 + alpha) * math.log(level + 3.0)) / x, 2.0)

    # head s in (0,1] via s = e^{-w}: the tau-phase becomes linear in w, so a
    # composite Gauss grid with tau-aware panel width is exact to machine level
    w_max = level / (kappa + 1.0)
    width = min(1.0, 6.0 / max(1.0, tau_max))
    ws_nodes, ww = _panel_nodes(0.0, w_max, max(4, int(math.ceil(w_max / width))))
    s_head = np.exp(-ws_nodes)
    base_head = ww * np.exp(-(kappa + 1.0) * ws_nodes - x * s_head
                            + (m0 + alpha - 0.5) * np.log1p(s_head))
    if t_max > 60.0:
        # small x: a linear grid cannot resolve the tau-phase over the long
        # tail, but in w = log s the phase is near-linear and the grid stays
        # a few dozen panels regardless of 1/x
        w_hi = math.log(t_max)
        width_w = min(0.15, 4.0 / max(1.0, 2.0 * tau_max))
        n_tail = max(n_panels, int(math.ceil(w_hi / width_w)))
        w_tail, wwt = _panel_nodes(0.0, w_hi, n_tail)
        s_tail = np.exp(w_tail)
        base_tail = wwt * np.exp(-x * s_tail + (kappa + 1.0) * w_tail
                                 + (m0 + alpha - 0.5) * np.log1p(s_tail))
    else:
        # tail [1, t_max]: phase drift <= 1.5*tau per unit near s=1
        tail_width = min(1.0 / max(min(x, 4.0), 0.25),
                         4.0 / max(1.0, tau_max))
        n_tail = max(n_panels, int(math.ceil((t_max - 1.0) / tail_width)))
        s_tail, wt = _panel_nodes(1.0, t_max, min(n_tail, 600))
        base_tail = wt * np.exp(-x * s_tail + kappa * np.log(s_tail)
                                + (m0 + alpha - 0.5) * np.log1p(s_tail))
    ss = np.concatenate((s_head, s_tail))
    base = np.concatenate((base_head, base_tail))
    phase_log = np.log(ss) + np.log1p(ss)
    integral = np.exp(1j * np.outer(taus, phase_log)) @ base
    ms = m0 + 1j * taus
    pref = np.exp(-0.5 * x + (ms + 0.5) * math.log(x))
    rg = np.array([rgamma(0.5 - alpha + m) for m in ms])
    return pref * rg * integral


def whittaker_w_macdonald_route(mu: float, tau: float, x: float,
                                cfg: QuadConfig = _DEFAULT_CFG) -> EvalResult:
    """W_{mu, i tau}(x) through the Gaussian-weighted Macdonald integral;
    independent of the Laplace route, needs mu < 1/2."""
    if mu >= 0.5:
        raise DomainError("macdonald route requires mu < 1/2")
    if x <= 0:
        raise DomainError("needs x > 0")
    level = -math.log(cfg.abs_tol * cfg.truncation_margin) + 5.0
    # solve t^2/(4x) + t = level
    t_max = 2.0 * x * (math.sqrt(1.0 + level / x) - 1.0) + 3.0
    kappa = -2.0 * mu
    two_itau = 2j * tau

    def integrand(ts):
        return np.exp(-ts * ts / (4.0 * x)) * macdonald_k_array(two_itau, ts)

    if kappa < 0.0:
        p = 1.0 / (1.0 + kappa)

        def head(vs):
            ts = vs ** p
            return p * np.exp((p - 1.0) * np.log(vs) + kappa * np.log(ts)) * integrand(ts)

        res = integrate_adaptive(head, 1e-14, 1.0, cfg) + integrate_adaptive(
            lambda ts: integrand(ts) * np.exp(kappa * np.log(ts)), 1.0, t_max, cfg
        )
    else:
        res = integrate_adaptive(
            lambda ts: integrand(ts) * np.exp(kappa * np.log(ts)), 1e-14, t_max, cfg
        )
    denom = gamma_complex(0.5 - mu + 1j * tau) * gamma_complex(0.5 - mu - 1j * tau)
    pref = 2.0 * cpow(4.0 * x, mu) * math.exp(-0.5 * x) / denom
    val = pref * res.value
    # the fixed-grid Macdonald integrand carries a small bias that the
    # oscillatory cancellation of K_{2 i tau} near t = 0 amplifies by
    # roughly e^{2 pi tau}; fold that into the estimate alongside the
    # quadrature error
    bias = (4e-12 * math.exp(2.0 * math.pi * abs(tau)) + 2e-9) * abs(val)
    return EvalResult(val, abs(pref) * res.err_estimate + bias,
                      "macdonald_integral")


def whittaker_m(a, b, x: float, tol: float = 1e-15) -> complex:
    """Whittaker M_{a,b}(x) from the confluent series; x <= 50."""
    a, b = complex(a), complex(b)
    if x <= 0:
        raise DomainError("whittaker_m needs x > 0")
    if x > 50.0:
        raise RangeError("whittaker_m supports x <= 50")
    if _near_nonpositive_int(2.0 * b + 1.0):
        raise PoleError("whittaker_m pole: 2b+1 is a non-positive integer")
    f = hyp_pfq([b - a + 0.5], [2.0 * b + 1.0], x, tol=tol)
    return cmath.exp(-0.5 * x + (b + 0.5) * math.log(x)) * f


def parabolic_cylinder_d(p, z: float) -> complex:
    """Parabolic cylinder D_p(z) for z > 0; Tricomi route for Re p < 0 and
    the three-term recurrence upward otherwise."""
    p = complex(p)
    if z <= 0:
        raise DomainError("parabolic_cylinder_d needs z > 0")

    def via_psi(q):
        psi = tricomi_psi(-0.5 * q, 0.5, 0.5 * z * z)
        return cmath.exp(0.5 * q * math.log(2.0)) * math.exp(-0.25 * z * z) * psi.value

    if p.real < 0.0:
        return via_psi(p)
    n = int(math.floor(p.real)) + 1
    q = p - n
    d_prev = via_psi(q - 1.0)
    d_cur = via_psi(q)
    r = q
    for _ in range(n):
        d_prev, d_cur = d_cur, z * d_cur - r * d_prev
        r = r + 1.0
    return d_cur


def hyp_pfq(num, den, z: float, tol: float = 1e-15, max_terms: int = 100_000) -> complex:
    """Generalized hypergeometric pFq at real argument, p <= q+1 with |.|
    restrictions handled by the caller; ratio-test truncation."""
    num = [complex(v) for v in num]
    den = [complex(v) for v in den]
    for d in den:
        if _near_nonpositive_int(d):
            raise PoleError(f"pFq denominator parameter pole at {d}")
    term = 1.0 + 0.0j
    out = term
    ok = 0
    for n in range(max_terms):
        ratio = z / (n + 1.0)
        for a in num:
            ratio *= a + n
        for d in den:
            ratio /= d + n
        term *= ratio
        out += term
        if abs(term) <= tol * (1.0 + abs(out)):
            ok += 1
            if ok >= 3:
                return out
        else:
            ok = 0
    raise NonConvergence("pFq series exceeded term budget")


def _appell_sum(ratio_x, ratio_y, x: float, y: float, tol: float,
                max_diag: int) -> complex:
    """Shared anti-diagonal evaluator.  ratio_x(m,n) multiplies term(m-1,n)
    into term(m,n); ratio_y(m,n) multiplies term(m,n-1) into term(m,n)."""
    if not (abs(x) < 1.0 and abs(y) < 1.0):
        raise DomainError("Appell series need |x| < 1 and |y| < 1")
    diag = np.array([1.0 + 0.0j])  # diagonal d: index m, n = d - m
    total = 1.0 + 0.0j
    ok = 0
    for d in range(1, max_diag):
        new = np.empty(d + 1, dtype=complex)
        ms = np.arange(d)
        new[:d] = diag * ratio_y(ms, d - ms)      # from (m, n-1)
        new[d] = diag[d - 1] * ratio_x(d, 0)      # from (m-1, 0)
        contrib = np.sum(new)
        total += contrib
        diag = new
        if np.sum(np.abs(new)) <= tol * (1.0 + abs(total)):
            ok += 1
            if ok >= 3:
                return total
        else:
            ok = 0
    raise NonConvergence("Appell series exceeded diagonal budget")


def appell_f1(a, b1, b2, c, x: float, y: float, tol: float = 1e-15,
              max_diag: int = 8000) -> complex:
    """Appell F1 double series inside the unit bidisk."""
    a, b1, b2, c = complex(a), complex(b1), complex(b2), complex(c)
    if _near_nonpositive_int(c):
        raise PoleError("appell_f1 denominator parameter pole")

    def rx(m, n):
        return x * (a + m + n - 1.0) * (b1 + m - 1.0) / (m * (c + m + n - 1.0))

    def ry(m, n):
        return y * (a + m + n - 1.0) * (b2 + n - 1.0) / (n * (c + m + n - 1.0))

    return _appell_sum(rx, ry, x, y, tol, max_diag)


def appell_f3(a1, a2, b1, b2, c, x: float, y: float, tol: float = 1e-15,
              max_diag: int = 8000) -> complex:
    """Appell F3 double series inside the unit bidisk."""
    a1, a2, b1, b2, c = (complex(a1), complex(a2), complex(b1), complex(b2),
                         complex(c))
    if _near_nonpositive_int(c):
        raise PoleError("appell_f3 denominator parameter pole")

    def rx(m, n):
        return x * (a1 + m - 1.0) * (b1 + m - 1.0) / (m * (c + m + n - 1.0))

    def ry(m, n):
        return y * (a2 + n - 1.0) * (b2 + n - 1.0) / (n * (c + m + n - 1.0))

    return _appell_sum(rx, ry, x, y, tol, max_diag)
