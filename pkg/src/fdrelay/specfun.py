"""Special functions used by the outage expressions.

Incomplete gamma functions are restricted to integer shape, where the
finite-series form holds and extends to negative arguments. All functions
accept scalars; the incomplete gamma family also accepts numpy arrays for
the second argument.
"""

import math
import operator

import numpy as np

from .errors import DomainError, NumericError
from .quad import IntegrationSpec, integrate

__all__ = [
    "gamma_fn",
    "lower_inc_gamma",
    "upper_inc_gamma",
    "reg_lower_gamma",
    "reg_upper_gamma",
    "scaled_lower_gamma",
    "kummer_1f1",
    "log_kummer_1f1",
    "tricomi_u",
    "whittaker_w",
]

HYP_MAX_TERMS = 10_000
HYP_RTOL = 1e-14

# Below this |w| the alternating/cancelling finite sums are replaced by series.
_NEG_SERIES_LIMIT = 30.0


def gamma_fn(x):
    """Gamma function for ``x > 0``; exact factorials for integer ``x``."""
    if not x > 0:
        raise DomainError(f"gamma_fn requires x > 0, got {x!r}")
    if float(x).is_integer() and x <= 171:
        return float(math.factorial(int(x) - 1))
    return math.gamma(x)


def _int_shape(m):
    try:
        mi = operator.index(m)
    except TypeError:
        if isinstance(m, float) and m.is_integer():
            mi = int(m)
        else:
            raise DomainError(f"shape must be a positive integer, got {m!r}") from None
    if mi < 1:
        raise DomainError(f"shape must be a positive integer, got {m!r}")
    return mi


def _exp_partial_sum(m, x):
    """sum_{a<m} x^a / a!  (elementwise)."""
    term = np.ones_like(x)
    total = np.ones_like(x)
    for a in range(1, m):
        term = term * x / a
        total = total + term
    return total


def _lower_series(m, x):
    """P(m, x) = x^m e^-x sum_n x^n / (m)_{n+1} / ... regularized, for 0 <= x < m+1."""
    term = np.full_like(x, 1.0 / m)
    total = term.copy()
    n = 0
    while True:
        n += 1
        term = term * x / (m + n)
        total = total + term
        if np.all(term <= 1e-17 * total) or n > 500:
            break
    with np.errstate(divide="ignore"):
        logp = m * np.log(x) - x - math.lgamma(m)
    return np.where(x > 0, np.exp(logp) * total, 0.0)


def _wrap(x, out):
    return float(out) if np.ndim(x) == 0 else out


def reg_lower_gamma(m, x):
    """Regularized lower incomplete gamma P(m, x) for integer m and x >= 0."""
    m = _int_shape(m)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(np.isnan(xa)):
        raise DomainError("reg_lower_gamma requires x >= 0")
    xs = np.atleast_1d(xa)
    small = xs < m + 1
    out = np.empty_like(xs)
    out[small] = _lower_series(m, xs[small])
    big = xs[~small]
    out[~small] = 1.0 - np.exp(-big) * _exp_partial_sum(m, big) if big.size else big
    return _wrap(x, out.reshape(xa.shape))


def reg_upper_gamma(m, x):
    """Regularized upper incomplete gamma Q(m, x) = Gamma(m, x)/Gamma(m).

    Defined for all real x through the finite series, which is the analytic
    continuation for integer m.
    """
    m = _int_shape(m)
    xa = np.asarray(x, dtype=float)
    if np.any(np.isnan(xa)):
        raise DomainError("reg_upper_gamma got NaN")
    xs = np.atleast_1d(xa)
    out = np.empty_like(xs)
    mid = (xs >= 0) & (xs < m + 1)
    out[mid] = 1.0 - _lower_series(m, xs[mid])
    rest = ~mid
    with np.errstate(over="ignore"):
        out[rest] = np.exp(-xs[rest]) * _exp_partial_sum(m, xs[rest])
    return _wrap(x, out.reshape(xa.shape))


def lower_inc_gamma(m, x):
    """Lower incomplete gamma function gamma(m, x), integer m >= 1, x >= 0."""
    m = _int_shape(m)
    return reg_lower_gamma(m, x) * gamma_fn(m)


def upper_inc_gamma(m, x):
    """Upper incomplete gamma function Gamma(m, x), integer m >= 1, any real x.

    For x < 0 this is (m-1)! e^{-x} sum_{a<m} x^a/a!, e.g. Gamma(2, -1) = 0.
    """
    m = _int_shape(m)
    return reg_upper_gamma(m, x) * gamma_fn(m)


def scaled_lower_gamma(n, w):
    """gamma(n, w) / w^n = integral_0^1 t^{n-1} e^{-w t} dt, any real w.

    Entire in w, so it stays finite where ``gamma(n, w)`` and ``w^n`` both
    vanish or change sign together.
    """
    n = _int_shape(n)
    wa = np.asarray(w, dtype=float)
    ws = np.atleast_1d(wa)
    out = np.empty_like(ws)

    neg = (ws < 0) & (ws > -_NEG_SERIES_LIMIT)
    if np.any(neg):
        # sum_j (-w)^j / (j! (n+j)), positive terms
        v = -ws[neg]
        term = np.ones_like(v)
        total = term / n
        j = 0
        while True:
            j += 1
            term = term * v / j
            inc = term / (n + j)
            total = total + inc
            if np.all(inc <= 1e-17 * total) or j > 1000:
                break
        out[neg] = total

    pos = (ws >= 0) & (ws < n + 1)
    if np.any(pos):
        # e^-w sum_j w^j / (n (n+1) ... (n+j)), positive terms
        v = ws[pos]
        term = np.full_like(v, 1.0 / n)
        total = term.copy()
        j = 0
        while True:
            j += 1
            term = term * v / (n + j)
            total = total + term
            if np.all(term <= 1e-17 * total) or j > 500:
                break
        out[pos] = np.exp(-v) * total

    far = ~(neg | pos)
    if np.any(far):
        v = ws[far]
        with np.errstate(over="ignore"):
            g = math.factorial(n - 1) * (1.0 - np.exp(-v) * _exp_partial_sum(n, v))
            out[far] = g / v**n
    return _wrap(w, out.reshape(wa.shape))


def _hyp1f1_log_series(a, b, z):
    """log of sum_n (a)_n / (b)_n z^n / n!, for series whose terms are all positive.

    The running sum is rescaled whenever it grows large so arguments in the
    thousands do not overflow.
    """
    log_scale = 0.0
    term = 1.0
    total = 1.0
    for n in range(HYP_MAX_TERMS):
        term *= (a + n) / (b + n) * z / (n + 1)
        total += term
        if term <= HYP_RTOL * total:
            return log_scale + math.log(total)
        if total > 1e250:
            log_scale += math.log(total)
            term /= total
            total = 1.0
    raise NumericError(
        f"1F1({a}, {b}, {z}) series did not converge in {HYP_MAX_TERMS} terms",
        estimate=math.exp(min(log_scale, 700.0)) * total, error=term, term="kummer_1f1")


def _hyp1f1_series(a, b, z):
    term = 1.0
    total = 1.0
    for n in range(HYP_MAX_TERMS):
        term *= (a + n) / (b + n) * z / (n + 1)
        total += term
        if term == 0.0 or abs(term) <= HYP_RTOL * abs(total):
            return total
    raise NumericError(
        f"1F1({a}, {b}, {z}) series did not converge in {HYP_MAX_TERMS} terms",
        estimate=total, error=abs(term), term="kummer_1f1")


def kummer_1f1(a, b, z):
    """Confluent hypergeometric function 1F1(a; b; z) for real arguments.

    Summed as a power series; for z < 0 the Kummer transformation
    1F1(a; b; z) = e^z 1F1(b - a; b; -z) is applied first so the summed
    series has no sign alternation (when b - a >= 0).
    """
    if b <= 0 and float(b).is_integer():
        raise DomainError(f"1F1 undefined for non-positive integer b={b!r}")
    if z == 0:
        return 1.0
    if a > 0 and b > 0 and (z > 0 or b - a >= 0):
        return math.exp(log_kummer_1f1(a, b, z))
    if z < 0:
        return math.exp(z) * _hyp1f1_series(b - a, b, -z)
    return _hyp1f1_series(a, b, z)


def log_kummer_1f1(a, b, z):
    """log 1F1(a; b; z) for b > a > 0 (or b >= a, z > 0), where 1F1 > 0.

    Works in the log domain, so e.g. 1F1(1; 3; -3000) stays representable.
    """
    if not (a > 0 and b > 0 and (z >= 0 or b - a >= 0)):
        raise DomainError("log_kummer_1f1 needs a, b > 0 and either z >= 0 or b >= a")
    if z == 0:
        return 0.0
    if z < 0:
        if b == a:
            return z
        return z + _hyp1f1_log_series(b - a, b, -z)
    return _hyp1f1_log_series(a, b, z)


def _u_polynomial(n, b, z):
    """U(-n, b, z) for integer n >= 0 (a polynomial of degree n in z)."""
    total = 0.0
    for k in range(n + 1):
        poch = 1.0
        for j in range(n - k):
            poch *= b + k + j
        total += (-1) ** k * math.comb(n, k) * poch * z**k
    return (-1) ** n * total


def _u_integral(a, b, z, rel_tol=1e-13):
    # U(a,b,z) = 1/Gamma(a) int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt, with t = s/z
    c = b - a - 1.0

    def f(s):
        return np.exp(-s + (a - 1.0) * np.log(s) + c * np.log1p(s / z))

    try:
        val, _ = integrate(f, IntegrationSpec(0.0, abs_tol=1e-300, rel_tol=rel_tol))
    except NumericError as exc:
        raise exc.with_term("tricomi_u")
    return val * z ** (-a) / math.gamma(a)


def tricomi_u(a, b, z):
    """Tricomi confluent hypergeometric function U(a, b, z) for z > 0.

    a > 0: numerical integration of the Laplace-type integral.
    a - b + 1 > 0: Kummer reflection U(a,b,z) = z^{1-b} U(a-b+1, 2-b, z).
    a a non-positive integer: closed polynomial.
    """
    if not z > 0:
        raise DomainError(f"tricomi_u requires z > 0, got {z!r}")
    if a > 0:
        return _u_integral(a, b, z)
    if a - b + 1 > 0:
        return z ** (1.0 - b) * _u_integral(a - b + 1.0, 2.0 - b, z)
    if float(a).is_integer():
        return _u_polynomial(int(-a), b, z)
    raise NumericError(f"tricomi_u({a}, {b}, z) outside supported parameter range",
                       term="tricomi_u")


def _whittaker_parts(kappa, mu, z):
    """(log of e^{-z/2} z^{mu+1/2}, U(mu - kappa + 1/2, 1 + 2 mu, z))."""
    if not z > 0:
        raise DomainError(f"whittaker_w requires z > 0, got {z!r}")
    u = tricomi_u(mu - kappa + 0.5, 1.0 + 2.0 * mu, z)
    return -0.5 * z + (mu + 0.5) * math.log(z), u


def whittaker_w(kappa, mu, z):
    """Whittaker function W_{kappa,mu}(z) for z > 0.

    W_{k,m}(z) = e^{-z/2} z^{m+1/2} U(m - k + 1/2, 1 + 2m, z).
    """
    log_pre, u = _whittaker_parts(kappa, mu, z)
    return math.exp(log_pre) * u
