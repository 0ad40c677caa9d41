"""Nakagami-m link model: parameters, scaled SINR rates and sampling."""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ConfigError

__all__ = [
    "ChannelParams",
    "SystemConfig",
    "ScaledRates",
    "LinkSample",
    "db_to_linear",
    "linear_to_db",
    "delay_to_channel_uses",
    "scaled_rates",
    "sample_link",
    "sample_links",
    "make_rng",
]


def db_to_linear(v):
    if np.ndim(v):
        return 10.0 ** (np.asarray(v, dtype=float) / 10.0)
    return 10.0 ** (float(v) / 10.0)


def linear_to_db(v):
    return 10.0 * np.log10(v)


def delay_to_channel_uses(seconds, t_symbol):
    """Convert a processing delay in seconds to whole channel uses."""
    return int(round(seconds / t_symbol))


@dataclass(frozen=True)
class ChannelParams:
    """Per-link Nakagami shape m and average power sigma^2 (linear), plus RSI variance."""

    m_sd: float = 2
    m_sr: float = 2
    m_rd: float = 2
    sigma2_sd: float = 1.0
    sigma2_sr: float = 1.0
    sigma2_rd: float = 1.0
    sigma2_rr: float = 0.0

    def __post_init__(self):
        for name in ("m_sd", "m_sr", "m_rd"):
            if not getattr(self, name) >= 0.5:
                raise ConfigError(f"{name} must be >= 0.5, got {getattr(self, name)!r}")
        for name in ("sigma2_sd", "sigma2_sr", "sigma2_rd"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)!r}")
        if not self.sigma2_rr >= 0:
            raise ConfigError(f"sigma2_rr must be >= 0, got {self.sigma2_rr!r}")

    @classmethod
    def from_db(cls, sd_db, sr_db, rd_db, rr_db, m=2, **shapes):
        kw = {"m_sd": m, "m_sr": m, "m_rd": m}
        kw.update(shapes)
        return cls(sigma2_sd=db_to_linear(sd_db), sigma2_sr=db_to_linear(sr_db),
                   sigma2_rd=db_to_linear(rd_db), sigma2_rr=db_to_linear(rr_db), **kw)

    @property
    def alpha_sd(self):
        return self.m_sd / self.sigma2_sd

    @property
    def alpha_sr(self):
        return self.m_sr / self.sigma2_sr

    @property
    def alpha_rd(self):
        return self.m_rd / self.sigma2_rd

    def replace(self, **kw):
        return replace(self, **kw)


@dataclass(frozen=True)
class SystemConfig:
    """Powers and noise are linear; all delays are in channel uses.

    ``tau_cp`` defaults to the largest relay delay so that the CP always
    covers the relayed echo.
    """

    p_s: float = 1.0
    p_r: float = 1.0
    n_r: float = 1.0
    n_d: float = 1.0
    rate_r: float = 1.0
    n_block: int = 20
    l_super: int = 3
    tau_af: int = 1
    tau_sdf: int = 60
    t_symbol: float = 8.33e-6
    tau_cp: Optional[int] = None

    def __post_init__(self):
        for name in ("p_s", "p_r", "n_r", "n_d", "rate_r"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)!r}")
        if self.n_block < 1 or self.l_super < 1:
            raise ConfigError("n_block and l_super must be >= 1")
        if self.tau_af < 0 or self.tau_sdf < 0:
            raise ConfigError("relay delays must be >= 0")
        if self.tau_cp is not None and self.tau_cp < max(self.tau_af, self.tau_sdf):
            raise ConfigError(f"tau_cp={self.tau_cp} shorter than the relay delay")

    @property
    def cp_length(self):
        return max(self.tau_af, self.tau_sdf) if self.tau_cp is None else self.tau_cp

    def replace(self, **kw):
        return replace(self, **kw)


@dataclass(frozen=True)
class ScaledRates:
    """Rate parameters of the Gamma-distributed link SINRs."""

    alpha_t_sd: float
    alpha_t_sr: float
    alpha_t_rd: float


@dataclass
class LinkSample:
    """Instantaneous link SINRs (scalars or equal-length arrays) and phases."""

    gamma_sr: np.ndarray
    gamma_sd: np.ndarray
    gamma_rd: np.ndarray
    phase_sd: Optional[np.ndarray] = None
    phase_rd: Optional[np.ndarray] = None


def scaled_rates(ch, cfg):
    return ScaledRates(
        alpha_t_sd=cfg.n_d / cfg.p_s * ch.alpha_sd,
        alpha_t_sr=(cfg.p_r * ch.sigma2_rr + cfg.n_r) / cfg.p_s * ch.alpha_sr,
        alpha_t_rd=cfg.n_d / cfg.p_r * ch.alpha_rd,
    )


def make_rng(seed):
    """Counter-based (Philox) generator seeded from an int or SeedSequence."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(ss))


def sample_link(shape, rate, rng, size=None):
    """Gamma(shape, rate) variates (mean shape/rate).

    Backed by numpy's exact rejection samplers (Marsaglia-Tsang for
    shape > 1), so tails are exact rather than CLT-approximate.
    """
    if not shape >= 0.5:
        raise ConfigError(f"shape must be >= 0.5, got {shape!r}")
    if not rate > 0:
        raise ConfigError(f"rate must be > 0, got {rate!r}")
    return rng.gamma(shape, 1.0 / rate, size)


def sample_links(ch, cfg, rng, size=None, phases=False):
    """Draw independent link SINRs (and uniform phases when ``phases``)."""
    r = scaled_rates(ch, cfg)
    g_sr = sample_link(ch.m_sr, r.alpha_t_sr, rng, size)
    g_sd = sample_link(ch.m_sd, r.alpha_t_sd, rng, size)
    g_rd = sample_link(ch.m_rd, r.alpha_t_rd, rng, size)
    ph_sd = ph_rd = None
    if phases:
        ph_sd = rng.uniform(0.0, 2 * np.pi, size)
        ph_rd = rng.uniform(0.0, 2 * np.pi, size)
    return LinkSample(g_sr, g_sd, g_rd, ph_sd, ph_rd)
