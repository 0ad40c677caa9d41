"""Monte Carlo outage estimation, the independent check on :mod:`analytic`.

Trials are split into fixed-size batches. Batch ``i`` draws from its own
Philox stream keyed by ``(seed, i)``, so the estimate depends only on the
seed and the batch partition, never on how many workers ran the batches or
in which order they finished.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from .analytic import OutageEstimate
from .channel import db_to_linear, make_rng, sample_links
from .errors import ConfigError
from .schemes import (
    SchemeKind,
    fde_geometry,
    mi_exact_fde,
    prelog,
    profile_sc_af,
    profile_sc_sdf,
    rho_sc_af,
    rho_sc_sdf,
    sinr_nc_af,
    sinr_nc_sdf,
    threshold_for,
)

__all__ = [
    "McConfig",
    "SWEEP_AXES",
    "apply_axis",
    "batch_outage_count",
    "derive_seed",
    "estimate_outage",
    "sweep",
]


@dataclass(frozen=True)
class McConfig:
    trials: int = 1_000_000
    seed: int = 0
    batch_size: int = 250_000
    mi_mode: str = "approx"
    workers: int = 1

    def __post_init__(self):
        if self.batch_size < 1 or self.trials < 1:
            raise ConfigError("trials and batch_size must be >= 1")
        if self.mi_mode not in ("approx", "exact"):
            raise ConfigError(f"mi_mode must be 'approx' or 'exact', got {self.mi_mode!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.batch_size > self.trials:
            # a run shorter than one batch is a single batch
            object.__setattr__(self, "batch_size", self.trials)

    @property
    def batches(self):
        """Sizes of the batches, in order."""
        full, rest = divmod(self.trials, self.batch_size)
        return [self.batch_size] * full + ([rest] if rest else [])


def batch_outage_count(kind, ch, cfg, seed, index, size, mi_mode="approx",
                       convention="matched"):
    """Number of outage events in batch ``index`` of ``size`` trials."""
    kind = SchemeKind(kind)
    rng = make_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    exact = mi_mode == "exact" and kind.is_combining
    s = sample_links(ch, cfg, rng, size, phases=exact)
    eta = threshold_for(kind, cfg)

    if kind is SchemeKind.DIRECT:
        stat = s.gamma_sd
    elif kind is SchemeKind.NC_AF:
        stat = sinr_nc_af(s)
    elif kind is SchemeKind.NC_SDF:
        stat = sinr_nc_sdf(s, cfg, s.gamma_sr >= eta, convention=convention)
    elif kind is SchemeKind.SC_AF:
        stat = profile_sc_af(s) if exact else rho_sc_af(s)
    else:
        active = s.gamma_sr >= eta
        stat = profile_sc_sdf(s, active) if exact else rho_sc_sdf(s, active)

    if exact:
        n, tau = fde_geometry(kind, cfg)
        cap = prelog(kind, cfg) * mi_exact_fde(stat, n, tau)
        return int(np.count_nonzero(cap < cfg.rate_r))
    return int(np.count_nonzero(stat < eta))


def estimate_outage(kind, ch, cfg, mc, convention="matched"):
    """Outage probability estimate with its Wald standard error.

    When every trial lands on the same side (no outage, or all outage), the
    rule-of-three bound 3/trials stands in for the standard error.
    """
    kind = SchemeKind(kind)
    sizes = mc.batches
    work = partial(_count_one, kind, ch, cfg, mc.seed, mc.mi_mode, convention)
    jobs = list(enumerate(sizes))
    if mc.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=mc.workers) as pool:
            counts = list(pool.map(work, jobs))
    else:
        counts = [work(j) for j in jobs]
    n = sum(sizes)
    p = sum(counts) / n
    se = math.sqrt(p * (1.0 - p) / n) if 0 < p < 1 else 3.0 / n
    return OutageEstimate(p, "monte-carlo", std_err=se, trials=n)


def _count_one(kind, ch, cfg, seed, mi_mode, convention, job):
    index, size = job
    return batch_outage_count(kind, ch, cfg, seed, index, size, mi_mode, convention)


def derive_seed(seed, index):
    """Seed for grid point ``index`` of a sweep started from ``seed``."""
    return int(np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1, np.uint64)[0])


SWEEP_AXES = ("R", "sigma2_RR_dB", "sigma2_SR_dB", "sigma2_SD_dB", "sigma2_RD_dB")


def apply_axis(ch, cfg, axis, value, sd_offset_db=None):
    """Return ``(ch, cfg)`` with ``axis`` set to ``value``.

    ``sd_offset_db`` couples the S->D variance to the S->R axis
    (sigma2_SD_dB = value + sd_offset_db).
    """
    if sd_offset_db is not None and axis != "sigma2_SR_dB":
        raise ConfigError("sd_offset_db only applies to the sigma2_SR_dB axis")
    if axis == "R":
        return ch, cfg.replace(rate_r=float(value))
    key = {
        "sigma2_RR_dB": "sigma2_rr",
        "sigma2_SR_dB": "sigma2_sr",
        "sigma2_SD_dB": "sigma2_sd",
        "sigma2_RD_dB": "sigma2_rd",
    }.get(axis)
    if key is None:
        raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    upd = {key: db_to_linear(value)}
    if sd_offset_db is not None:
        upd["sigma2_sd"] = db_to_linear(value + sd_offset_db)
    return ch.replace(**upd), cfg


def sweep(kind, ch, cfg, axis, grid, mc, sd_offset_db=None, convention="matched"):
    """One Monte Carlo estimate per grid value, each with its own derived seed."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    out = []
    for i, v in enumerate(grid):
        ch_i, cfg_i = apply_axis(ch, cfg, axis, v, sd_offset_db)
        mc_i = McConfig(mc.trials, derive_seed(mc.seed, i), mc.batch_size, mc.mi_mode, mc.workers)
        out.append((v, estimate_outage(kind, ch_i, cfg_i, mc_i, convention=convention)))
    return out

