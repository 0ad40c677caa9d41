"""Per-trial decision statistics for the direct, NC and SC schemes.

Every evaluator works elementwise on numpy arrays as well as on scalars, so
the Monte Carlo engine can push whole batches through them.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "SchemeKind",
    "SpectralProfile",
    "threshold_for",
    "capacity",
    "prelog",
    "sinr_nc_af",
    "sinr_nc_sdf",
    "rho_sc_af",
    "rho_sc_sdf",
    "af_gain",
    "profile_sc_af",
    "profile_sc_sdf",
    "mi_exact_fde",
    "mi_exact_fde_sum",
    "fde_geometry",
]


class SchemeKind(enum.Enum):
    DIRECT = "direct"
    NC_AF = "nc-af"
    NC_SDF = "nc-sdf"
    SC_AF = "sc-af"
    SC_SDF = "sc-sdf"

    @property
    def is_sdf(self):
        return self in (SchemeKind.NC_SDF, SchemeKind.SC_SDF)

    @property
    def is_combining(self):
        return self in (SchemeKind.SC_AF, SchemeKind.SC_SDF)


def prelog(kind, cfg):
    """Fraction of channel uses carrying useful symbols."""
    if kind is SchemeKind.SC_AF:
        return cfg.n_block / (cfg.n_block + cfg.tau_af)
    if kind is SchemeKind.SC_SDF:
        nl = cfg.n_block * cfg.l_super
        return nl / (nl + cfg.tau_sdf)
    return 1.0


def threshold_for(kind, cfg, rate=None):
    """Linear SINR threshold eta: outage iff the decision statistic is below it."""
    r = cfg.rate_r if rate is None else rate
    return 2.0 ** (r / prelog(kind, cfg)) - 1.0


def capacity(kind, value, cfg):
    """Bits per channel use for an SINR (NC/direct) or combined SNR / 2^MI - 1 (SC)."""
    return prelog(kind, cfg) * np.log2(1.0 + np.asarray(value, dtype=float))


def sinr_nc_af(s):
    """End-to-end NC-AF SINR; relay branch only when gamma_RD > gamma_SD strictly."""
    g_sr, g_sd, g_rd = (np.asarray(v, dtype=float) for v in (s.gamma_sr, s.gamma_sd, s.gamma_rd))
    u = g_rd / (g_sd + 1.0)
    relay = g_sr * u / (g_sr + u + 1.0)
    direct = g_sd / (g_rd + 1.0)
    out = np.where(g_rd > g_sd, relay, direct)
    return out if out.ndim else float(out)


def sinr_nc_sdf(s, cfg, relay_active, convention="matched"):
    """NC-SDF SINR of the strongest received link, the other one interfering.

    The link with the larger received power wins, ties going to the direct
    link. ``convention="matched"`` weights each link by its own transmitter
    power; ``"fixed-power"`` uses P_R on the decoded link and P_S on the
    interferer whichever node owns them.
    """
    g_sd = np.asarray(s.gamma_sd, dtype=float)
    g_rd = np.asarray(s.gamma_rd, dtype=float)
    active = np.asarray(relay_active, dtype=bool)
    direct_best = g_sd >= g_rd
    if convention == "matched":
        best = np.where(direct_best, g_sd / (g_rd + 1.0), g_rd / (g_sd + 1.0))
    elif convention == "fixed-power":
        # back out |h|^2 N_D-normalized received powers
        k = cfg.p_r / cfg.p_s
        num = np.where(direct_best, k * g_sd, g_rd)
        den = np.where(direct_best, g_rd / k, g_sd)
        best = num / (den + 1.0)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    out = np.where(active, best, g_sd)
    return out if out.ndim else float(out)


def rho_sc_af(s):
    """Combined SNR after signal-based FDE of the direct and AF-relayed paths."""
    g_sr, g_sd, g_rd = (np.asarray(v, dtype=float) for v in (s.gamma_sr, s.gamma_sd, s.gamma_rd))
    out = (g_sr * g_rd + g_sd * g_sr + g_sd) / (1.0 + g_sr + g_rd)
    return out if out.ndim else float(out)


def rho_sc_sdf(s, relay_active):
    g_sd = np.asarray(s.gamma_sd, dtype=float)
    out = np.where(np.asarray(relay_active, dtype=bool), g_sd + np.asarray(s.gamma_rd), g_sd)
    return out if out.ndim else float(out)


def af_gain(h_sr_sq, ch, cfg):
    """Amplification factor beta meeting the relay power constraint (diagnostic only)."""
    return np.sqrt(cfg.p_r / (cfg.p_s * np.asarray(h_sr_sq) + cfg.p_r * ch.sigma2_rr + cfg.n_r))


@dataclass
class SpectralProfile:
    """Per-subcarrier SNR gamma_i = rho + 2|mu| cos(2 pi i tau / n + theta)."""

    rho: np.ndarray
    mu_abs: np.ndarray
    theta: np.ndarray


def _theta(s):
    if s.phase_sd is None or s.phase_rd is None:
        return np.zeros_like(np.asarray(s.gamma_sd, dtype=float))
    return np.mod(np.asarray(s.phase_sd) - np.asarray(s.phase_rd), 2 * np.pi)


def profile_sc_af(s):
    g_sr, g_sd, g_rd = (np.asarray(v, dtype=float) for v in (s.gamma_sr, s.gamma_sd, s.gamma_rd))
    den = 1.0 + g_sr + g_rd
    rho = (g_sr * g_rd + g_sd * g_sr + g_sd) / den
    mu = np.sqrt(g_sd * (g_sr + 1.0) * g_rd * g_sr) / den
    return SpectralProfile(rho, mu, _theta(s))


def profile_sc_sdf(s, relay_active):
    g_sd = np.asarray(s.gamma_sd, dtype=float)
    g_rd = np.where(np.asarray(relay_active, dtype=bool), np.asarray(s.gamma_rd, dtype=float), 0.0)
    return SpectralProfile(g_sd + g_rd, np.sqrt(g_sd * g_rd), _theta(s))


def fde_geometry(kind, cfg):
    """(subcarriers, relay delay) of the circulant channel seen by the FDE."""
    if kind is SchemeKind.SC_AF:
        return cfg.n_block, cfg.tau_af
    if kind is SchemeKind.SC_SDF:
        return cfg.n_block * cfg.l_super, cfg.tau_sdf
    raise ValueError(f"{kind} has no FDE stage")


def mi_exact_fde(profile, n, tau):
    """Average mutual information (1/n) sum_i log2(1 + gamma_i), in closed form.

    The phases 2 pi i tau/n + theta visit q = n/gcd(n, tau) equispaced angles,
    each n/q times. Writing 1 + rho + 2|mu| cos(phi) = A |1 + r e^{j phi}|^2
    with A r = |mu|, A (1 + r^2) = 1 + rho, the product over the q angles
    collapses to A^q |1 - (-r)^q e^{j q theta}|^2.
    """
    rho = np.asarray(profile.rho, dtype=float)
    mu = np.asarray(profile.mu_abs, dtype=float)
    theta = np.asarray(profile.theta, dtype=float)
    if np.any(rho < 2 * mu * (1 - 1e-12) - 1e-300):
        raise DomainError("profile violates rho >= 2|mu|; some 1 + gamma_i may be <= 0")
    q = n // math.gcd(n, tau % n) if tau % n else 1
    disc = np.sqrt(np.maximum((1.0 + rho) ** 2 - 4.0 * mu * mu, 0.0))
    big_a = 0.5 * (1.0 + rho + disc)
    r = mu / big_a
    rq = r**q
    sign = -1.0 if q % 2 else 1.0
    mod2 = 1.0 - 2.0 * sign * rq * np.cos(q * theta) + rq * rq
    out = np.log2(big_a) + np.log2(mod2) / q
    return out if out.ndim else float(out)


def mi_exact_fde_sum(profile, n, tau):
    """Direct per-subcarrier summation of the same quantity (reference path)."""
    i = np.arange(n)
    rho = np.asarray(profile.rho, dtype=float)[..., None]
    mu = np.asarray(profile.mu_abs, dtype=float)[..., None]
    theta = np.asarray(profile.theta, dtype=float)[..., None]
    g = rho + 2 * mu * np.cos(2 * np.pi * i * tau / n + theta)
    if np.any(1 + g <= 0):
        raise DomainError("1 + gamma_i <= 0")
    out = np.mean(np.log2(1 + g), axis=-1)
    return out if out.ndim else float(out)
