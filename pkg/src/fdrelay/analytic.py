"""Closed-form and semi-analytic outage probabilities.

All routines need integer Nakagami shapes: the incomplete-gamma series they
rely on are finite sums only for integer m.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import scaled_rates
from .errors import NumericError, UnsupportedAnalyticError
from .quad import IntegrationSpec, integrate
from .schemes import SchemeKind, threshold_for
from .specfun import (
    _whittaker_parts,
    gamma_fn,
    log_kummer_1f1,
    reg_lower_gamma,
    reg_upper_gamma,
    scaled_lower_gamma,
)

__all__ = [
    "OutageEstimate",
    "WhittakerTermParams",
    "whittaker_terms",
    "gamma_cdf",
    "ratio_link_cdf",
    "ordered_ratio_prob",
    "srd_outage",
    "outage_direct",
    "outage_nc_af",
    "outage_nc_sdf",
    "outage_sc_af",
    "outage_sc_sdf",
    "outage",
]

# Quadrature tolerances for the semi-analytic paths.
OUTER_TOL = {"abs_tol": 1e-11, "rel_tol": 1e-9}
INNER_TOL = {"abs_tol": 1e-13, "rel_tol": 1e-10}


@dataclass(frozen=True)
class OutageEstimate:
    """Outage probability with provenance.

    ``method`` is one of ``closed-form``, ``quadrature`` or ``monte-carlo``.
    ``details`` holds named intermediate terms (not part of equality).
    """

    p: float
    method: str
    std_err: float = 0.0
    trials: int = 0
    details: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise NumericError(f"outage probability {self.p!r} outside [0, 1]",
                               estimate=self.p, term=self.method)
        if self.std_err < 0 or self.trials < 0:
            raise ValueError("std_err and trials must be non-negative")


@dataclass(frozen=True)
class WhittakerTermParams:
    """Parameters of the k-th Whittaker term in the ratio-link CDF."""

    k: int
    a: float
    b: float
    c: float
    d: float
    log_b_coef: float  # log of the common prefactor B


def _ints(*shapes):
    out = []
    for m in shapes:
        if not float(m).is_integer() or m < 1:
            raise UnsupportedAnalyticError(
                f"analytic outage needs integer Nakagami shapes, got m={m!r}")
        out.append(int(m))
    return out


def gamma_cdf(m, rate, x):
    """CDF of a Gamma(m, rate) variable at x >= 0 (integer m)."""
    return reg_lower_gamma(m, rate * np.asarray(x, dtype=float) if np.ndim(x) else rate * x)


def _gamma_pdf(m, rate, x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        logf = m * math.log(rate) + (m - 1) * np.log(x) - rate * x - math.lgamma(m)
    return np.where(x > 0, np.exp(logf), 1.0 * rate if m == 1 else 0.0)


def _scale_points(m, rate, lo=0.0, hi=math.inf):
    """Breakpoints around the bulk of a Gamma(m, rate) density inside (lo, hi).

    Without them a density much narrower than the integration range can fall
    between the nodes of the initial panels and be missed altogether.
    """
    mean = m / rate
    return tuple(p for p in (mean * f for f in (1e-2, 0.1, 0.5, 1.0, 2.0, 10.0)) if lo < p < hi)


def _cdf_diff(m, rate, lo, hi):
    """F(hi) - F(lo) for a Gamma(m, rate) CDF, without cancellation near 1."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    p_lo = reg_lower_gamma(m, rate * lo)
    via_lower = reg_lower_gamma(m, rate * hi) - p_lo
    via_upper = reg_upper_gamma(m, rate * lo) - reg_upper_gamma(m, rate * hi)
    return np.where(p_lo < 0.5, via_lower, via_upper)


def whittaker_terms(m_x, alpha_x, m_y, alpha_y, eta):
    """Term parameters (a, b, c, d, B) for k = 0 .. m_y - 1."""
    ax_eta = alpha_x * eta
    log_b = -0.5 * (ax_eta - alpha_y) + m_x * math.log(ax_eta) - math.lgamma(m_x)
    c = ax_eta + alpha_y
    return [
        WhittakerTermParams(k=k, a=(m_x - k - 1) / 2, b=(-m_x - k) / 2, c=c,
                            d=(m_x + k + 1) / 2, log_b_coef=log_b)
        for k in range(m_y)
    ]


def ratio_link_cdf(m_x, alpha_x, m_y, alpha_y, eta):
    """P(gamma_X / (gamma_Y + 1) < eta) for independent Gamma link SINRs.

    Closed form: P(m_x, a_x eta) + B sum_k c^{-d} a_y^k W_{a,b}(c). The
    exponentials of B and of W are merged in the log domain so that large
    rate parameters do not overflow.
    """
    m_x, m_y = _ints(m_x, m_y)
    if eta <= 0:
        return 0.0
    total = reg_lower_gamma(m_x, alpha_x * eta)
    for t in whittaker_terms(m_x, alpha_x, m_y, alpha_y, eta):
        log_w_pre, u = _whittaker_parts(t.a, t.b, t.c)
        log_mag = t.log_b_coef - t.d * math.log(t.c) + t.k * math.log(alpha_y) + log_w_pre
        total += math.exp(log_mag) * u
    return total


def ordered_ratio_prob(m_x, alpha_x, m_y, alpha_y, eta, deadline=None):
    """P(gamma_Y <= gamma_X < eta (gamma_Y + 1)).

    The event where link X is the stronger one and still its SINR against
    link Y stays below eta; integrated over gamma_Y.
    """
    m_x, m_y = _ints(m_x, m_y)
    if eta <= 0:
        return 0.0
    z_max = math.inf if eta >= 1 else eta / (1.0 - eta)

    def f(z):
        return _gamma_pdf(m_y, alpha_y, z) * np.maximum(
            _cdf_diff(m_x, alpha_x, z, eta * (1.0 + z)), 0.0)

    val, _ = integrate(f, IntegrationSpec(0.0, z_max, **OUTER_TOL),
                       points=_scale_points(m_y, alpha_y, 0.0, z_max), deadline=deadline)
    return val


def _prob_x_below_y(m_x, alpha_x, m_y, alpha_y, deadline=None):
    """P(gamma_X < gamma_Y)."""
    def f(z):
        return _gamma_pdf(m_y, alpha_y, z) * gamma_cdf(m_x, alpha_x, z)
    return integrate(f, IntegrationSpec(0.0, **OUTER_TOL),
                     points=_scale_points(m_y, alpha_y), deadline=deadline)[0]


def srd_outage(m_sd, alpha_sd, m_rd, alpha_rd, eta):
    """P(gamma_SD + gamma_RD < eta) as a finite sum of Kummer 1F1 terms.

    P(m_rd, a_rd eta) - sum_{k<m_sd} (a_sd eta)^k (a_rd eta)^m_rd e^{-a_rd eta}
    / Gamma(m_rd + k + 1) * 1F1(k + 1; m_rd + k + 1; (a_rd - a_sd) eta).
    """
    m_sd, m_rd = _ints(m_sd, m_rd)
    if eta <= 0:
        return 0.0
    z = (alpha_rd - alpha_sd) * eta
    total = reg_lower_gamma(m_rd, alpha_rd * eta)
    for k in range(m_sd):
        log_term = (k * math.log(alpha_sd * eta) + m_rd * math.log(alpha_rd * eta)
                    - alpha_rd * eta - math.lgamma(m_rd + k + 1)
                    + log_kummer_1f1(k + 1, m_rd + k + 1, z))
        total -= math.exp(log_term)
    return total


def _rates(ch, cfg):
    r = scaled_rates(ch, cfg)
    return r.alpha_t_sd, r.alpha_t_sr, r.alpha_t_rd


def outage_direct(ch, cfg):
    (m_sd,) = _ints(ch.m_sd)
    a_sd, _, _ = _rates(ch, cfg)
    eta = threshold_for(SchemeKind.DIRECT, cfg)
    return OutageEstimate(reg_lower_gamma(m_sd, a_sd * eta), "closed-form")


def _wrap_numeric(term, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except NumericError as exc:
        raise exc.with_term(term)


def outage_nc_af(ch, cfg, reading="composed", deadline=None):
    """NC-AF outage.

    ``reading="composed"`` (default) sums the two disjoint branches of the
    piecewise end-to-end SINR: relay branch (gamma_RD > gamma_SD) by nested
    quadrature, direct branch by a 1-D integral. ``reading="kernel"`` returns
    the ratio-link closed form P(gamma_SD/(gamma_RD+1) < eta) on its own.
    Both are reported in ``details``.
    """
    m_sd, m_sr, m_rd = _ints(ch.m_sd, ch.m_sr, ch.m_rd)
    a_sd, a_sr, a_rd = _rates(ch, cfg)
    eta = threshold_for(SchemeKind.NC_AF, cfg)
    kernel = _wrap_numeric("nc-af/kernel", ratio_link_cdf, m_sd, a_sd, m_rd, a_rd, eta)
    if reading == "kernel":
        return OutageEstimate(kernel, "closed-form", details={"kernel": kernel})
    if reading != "composed":
        raise ValueError(f"unknown reading {reading!r}")
    if eta <= 0:
        return OutageEstimate(0.0, "quadrature")

    direct_branch = _wrap_numeric("nc-af/direct-branch", ordered_ratio_prob,
                                  m_sd, a_sd, m_rd, a_rd, eta, deadline=deadline)
    sd_below_rd = _wrap_numeric("nc-af/P(SD<RD)", _prob_x_below_y,
                                m_sd, a_sd, m_rd, a_rd, deadline=deadline)

    def inner(s):
        # P(gamma_SD < gamma_RD, relay-branch SINR < eta | gamma_SR = s), s > eta
        u_star = eta * (1.0 + s) / (s - eta)
        z1 = u_star
        z2 = u_star / (1.0 - u_star) if u_star < 1.0 else math.inf

        def g(z):
            lo = np.clip(z / u_star - 1.0, 0.0, z)
            return _gamma_pdf(m_rd, a_rd, z) * np.maximum(_cdf_diff(m_sd, a_sd, lo, z), 0.0)

        spec = IntegrationSpec(0.0, z2, **INNER_TOL)
        pts = (z1,) + _scale_points(m_rd, a_rd, 0.0, z2)
        return integrate(g, spec, points=pts, deadline=deadline)[0]

    def outer(s):
        h = np.array([inner(v) for v in np.ravel(s)]).reshape(np.shape(s))
        return _gamma_pdf(m_sr, a_sr, s) * h

    tail = _wrap_numeric("nc-af/relay-branch", integrate, outer,
                         IntegrationSpec(eta, **OUTER_TOL),
                         points=_scale_points(m_sr, a_sr, eta), deadline=deadline)[0]
    relay_branch = gamma_cdf(m_sr, a_sr, eta) * sd_below_rd + tail
    p = relay_branch + direct_branch
    return OutageEstimate(p, "quadrature", details={
        "relay_branch": relay_branch, "direct_branch": direct_branch, "kernel": kernel})


def outage_nc_sdf(ch, cfg, reading="selection", deadline=None):
    """NC-SDF outage P_SD P_SR + P_XD (1 - P_SR).

    ``reading="selection"`` (default) takes the strongest of the two links
    per realization, as the receiver does. ``reading="fixed"`` pins X to the
    relay link and uses the ratio-link closed form for P_XD.
    """
    m_sd, m_sr, m_rd = _ints(ch.m_sd, ch.m_sr, ch.m_rd)
    a_sd, a_sr, a_rd = _rates(ch, cfg)
    eta = threshold_for(SchemeKind.NC_SDF, cfg)
    p_sd = reg_lower_gamma(m_sd, a_sd * eta)
    p_sr = reg_lower_gamma(m_sr, a_sr * eta)
    p_xd_fixed = _wrap_numeric("nc-sdf/kernel", ratio_link_cdf, m_rd, a_rd, m_sd, a_sd, eta)
    if reading == "fixed":
        p_xd, method = p_xd_fixed, "closed-form"
    elif reading == "selection":
        relay_best = _wrap_numeric("nc-sdf/relay-best", ordered_ratio_prob,
                                   m_rd, a_rd, m_sd, a_sd, eta, deadline=deadline)
        direct_best = _wrap_numeric("nc-sdf/direct-best", ordered_ratio_prob,
                                    m_sd, a_sd, m_rd, a_rd, eta, deadline=deadline)
        p_xd, method = relay_best + direct_best, "quadrature"
    else:
        raise ValueError(f"unknown reading {reading!r}")
    p = p_sd * p_sr + p_xd * (1.0 - p_sr)
    return OutageEstimate(p, method, details={
        "p_sd": p_sd, "p_sr": p_sr, "p_xd": p_xd, "p_xd_fixed": p_xd_fixed})


def _sc_af_pieces(ch, cfg):
    m_sd, m_sr, m_rd = _ints(ch.m_sd, ch.m_sr, ch.m_rd)
    a_sd, a_sr, a_rd = _rates(ch, cfg)
    x = threshold_for(SchemeKind.SC_AF, cfg)
    # pre * coef[a][b] multiplies the b-th term
    log_pre = -a_sd * x + m_rd * math.log(a_rd) - math.lgamma(m_rd)
    coef = np.zeros(m_sd)
    for a in range(m_sd):
        for b in range(a + 1):
            coef[b] += (a_sd * x) ** a / (math.factorial(b) * math.factorial(a - b))
    return m_sd, m_sr, m_rd, a_sd, a_sr, a_rd, x, math.exp(log_pre) * coef


def outage_sc_af(ch, cfg, form="regrouped", deadline=None):
    """SC-AF outage F_rho(eta_AF), with rho the combined FDE SNR.

    The gamma_SD CDF and the gamma_RD integral are done in closed form and
    the remaining gamma_SR integral numerically.

    ``form="regrouped"`` (default) keeps the inner result of each gamma_SR
    region together, which stays finite for every parameter set.
    ``form="split"`` separates it into three outer integrals (one over
    [0, inf), two over (eta_AF, inf)); these diverge individually once
    alpha_RD <= alpha_SD, in which case NumericError is raised.
    """
    m_sd, m_sr, m_rd, a_sd, a_sr, a_rd, x, w = _sc_af_pieces(ch, cfg)
    if x <= 0:
        return OutageEstimate(0.0, "quadrature")
    gam = [gamma_fn(m_rd + b) for b in range(m_sd)]

    def lam(s):
        return a_rd + a_sd * (x - s) / (1.0 + s)

    def z_edge(s):
        return x * (1.0 + s) / (s - x)

    if form == "regrouped":
        def below(s):
            q = (x - s) / (1.0 + s) / x
            ls = lam(s)
            acc = sum(w[b] * gam[b] * q**b / ls ** (m_rd + b) for b in range(m_sd))
            return _gamma_pdf(m_sr, a_sr, s) * (1.0 - acc)

        def above(s):
            z = z_edge(s)
            arg = lam(s) * z
            acc = sum(w[b] * (-1) ** b * z**m_rd * scaled_lower_gamma(m_rd + b, arg)
                      for b in range(m_sd))
            return _gamma_pdf(m_sr, a_sr, s) * (reg_lower_gamma(m_rd, a_rd * z) - acc)

        lo = _wrap_numeric("sc-af/gamma_SR<=eta", integrate, below,
                           IntegrationSpec(0.0, x, **OUTER_TOL),
                           points=_scale_points(m_sr, a_sr, 0.0, x), deadline=deadline)[0]
        hi = _wrap_numeric("sc-af/gamma_SR>eta", integrate, above,
                           IntegrationSpec(x, **OUTER_TOL),
                           points=_scale_points(m_sr, a_sr, x), deadline=deadline)[0]
        return OutageEstimate(lo + hi, "quadrature", details={"below": lo, "above": hi})

    if form != "split":
        raise ValueError(f"unknown form {form!r}")
    if a_rd <= a_sd:
        raise NumericError("split form diverges when alpha_RD <= alpha_SD "
                           f"({a_rd!r} <= {a_sd!r}); use form='regrouped'",
                           term="sc-af/split")

    def i_upper_rd(s):
        return _gamma_pdf(m_sr, a_sr, s) * reg_upper_gamma(m_rd, a_rd * z_edge(s))

    def i_full(b):
        def f(s):
            q = (x - s) / (1.0 + s) / x
            return _gamma_pdf(m_sr, a_sr, s) * gam[b] * q**b / lam(s) ** (m_rd + b)
        return f

    def i_tail(b):
        def f(s):
            q = (x - s) / (1.0 + s) / x
            ls = lam(s)
            ug = reg_upper_gamma(m_rd + b, ls * z_edge(s)) * gam[b]
            return _gamma_pdf(m_sr, a_sr, s) * q**b * ug / ls ** (m_rd + b)
        return f

    i1 = _wrap_numeric("sc-af/split-1", integrate, i_upper_rd,
                       IntegrationSpec(x, **OUTER_TOL), deadline=deadline)[0]
    acc = 0.0
    for b in range(m_sd):
        full = _wrap_numeric(f"sc-af/split-2[b={b}]", integrate, i_full(b),
                             IntegrationSpec(0.0, **OUTER_TOL), deadline=deadline)[0]
        tail = _wrap_numeric(f"sc-af/split-3[b={b}]", integrate, i_tail(b),
                             IntegrationSpec(x, **OUTER_TOL), deadline=deadline)[0]
        acc += w[b] * (full - tail)
    return OutageEstimate(1.0 - i1 - acc, "quadrature", details={"split_1": i1})


def outage_sc_sdf(ch, cfg):
    """SC-SDF outage P_SD P_SR + P_SRD (1 - P_SR) at the block-penalised threshold."""
    m_sd, m_sr, m_rd = _ints(ch.m_sd, ch.m_sr, ch.m_rd)
    a_sd, a_sr, a_rd = _rates(ch, cfg)
    eta = threshold_for(SchemeKind.SC_SDF, cfg)
    p_sd = reg_lower_gamma(m_sd, a_sd * eta)
    p_sr = reg_lower_gamma(m_sr, a_sr * eta)
    p_srd = _wrap_numeric("sc-sdf/srd", srd_outage, m_sd, a_sd, m_rd, a_rd, eta)
    p = p_sd * p_sr + p_srd * (1.0 - p_sr)
    return OutageEstimate(p, "closed-form", details={"p_sd": p_sd, "p_sr": p_sr, "p_srd": p_srd})


def outage(kind, ch, cfg, **kw):
    """Dispatch to the analytic routine for ``kind``."""
    kind = SchemeKind(kind)
    fn = {
        SchemeKind.DIRECT: outage_direct,
        SchemeKind.NC_AF: outage_nc_af,
        SchemeKind.NC_SDF: outage_nc_sdf,
        SchemeKind.SC_AF: outage_sc_af,
        SchemeKind.SC_SDF: outage_sc_sdf,
    }[kind]
    return fn(ch, cfg, **kw)
