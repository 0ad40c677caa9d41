"""Figure presets and scheme labels used by the command line.

All powers and variances here are in dB; they are converted to linear
values when a preset is materialized.
"""

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams, SystemConfig, db_to_linear, delay_to_channel_uses
from .errors import ConfigError
from .schemes import SchemeKind

__all__ = [
    "GLOBAL_DEFAULTS",
    "LARGE_SUPER_BLOCK",
    "PRESETS",
    "SCHEME_LABELS",
    "Preset",
    "base_config",
    "frange",
    "get_preset",
    "resolve_scheme",
]

LARGE_SUPER_BLOCK = 10_000

GLOBAL_DEFAULTS = {
    "n_block": 20,
    "tau_af": 1,
    "tau_sdf_seconds": 500e-6,
    "t_symbol": 8.33e-6,
    "p_s_db": 5.0,
    "p_r_db": 5.0,
    "n_r": 1.0,
    "n_d": 1.0,
    "m": 2,
    "l_super": 3,
}

# label -> (scheme, super-block length override or None)
SCHEME_LABELS = {
    "direct": (SchemeKind.DIRECT, None),
    "nc-af": (SchemeKind.NC_AF, None),
    "nc-sdf": (SchemeKind.NC_SDF, None),
    "sc-af": (SchemeKind.SC_AF, None),
    "sc-sdf": (SchemeKind.SC_SDF, LARGE_SUPER_BLOCK),
    "sc-sdf3": (SchemeKind.SC_SDF, 3),
}


def frange(start, step, stop):
    """Inclusive arithmetic grid start, start+step, ..., stop (rounded to 12 digits)."""
    if step == 0 or (stop - start) * step < 0:
        raise ConfigError(f"bad grid {start}:{step}:{stop}")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def resolve_scheme(label, cfg):
    """Map a CLI scheme label to ``(SchemeKind, SystemConfig)``."""
    try:
        kind, l_super = SCHEME_LABELS[label]
    except KeyError:
        raise ConfigError(
            f"unknown scheme {label!r}; expected one of {sorted(SCHEME_LABELS)}") from None
    if l_super is not None:
        cfg = cfg.replace(l_super=l_super)
    return kind, cfg


def base_config(rate_r=2.0, **overrides):
    g = GLOBAL_DEFAULTS
    kw = dict(
        p_s=db_to_linear(g["p_s_db"]),
        p_r=db_to_linear(g["p_r_db"]),
        n_r=g["n_r"],
        n_d=g["n_d"],
        rate_r=rate_r,
        n_block=g["n_block"],
        l_super=g["l_super"],
        tau_af=g["tau_af"],
        tau_sdf=delay_to_channel_uses(g["tau_sdf_seconds"], g["t_symbol"]),
        t_symbol=g["t_symbol"],
    )
    kw.update(overrides)
    return SystemConfig(**kw)


@dataclass(frozen=True)
class Preset:
    name: str
    sd_db: float
    sr_db: float
    rd_db: float
    rr_db: float
    rate_r: float
    axis: str
    grid: tuple
    sd_offset_db: float = None
    schemes: tuple = field(default=tuple(SCHEME_LABELS))

    def channel(self, m=GLOBAL_DEFAULTS["m"]):
        return ChannelParams.from_db(self.sd_db, self.sr_db, self.rd_db, self.rr_db, m=m)

    def config(self):
        return base_config(rate_r=self.rate_r)

    def echo(self):
        """Parameters as they appear in figure captions (dB, plus the axis)."""
        return {
            "sigma2_SD_dB": self.sd_db,
            "sigma2_SR_dB": self.sr_db,
            "sigma2_RD_dB": self.rd_db,
            "sigma2_RR_dB": self.rr_db,
            "R": self.rate_r,
            "axis": self.axis,
            "sd_offset_db": self.sd_offset_db,
        }


_R_GRID = tuple(frange(0.5, 0.25, 6.0))
_RR_GRID = tuple(frange(-5.0, 2.5, 15.0))
_SR_GRID = tuple(frange(10.0, 2.0, 26.0))

PRESETS = {
    "fig2": Preset("fig2", sd_db=0, sr_db=20, rd_db=20, rr_db=0, rate_r=2.0,
                   axis="R", grid=_R_GRID),
    "fig3": Preset("fig3", sd_db=10, sr_db=20, rd_db=20, rr_db=0, rate_r=2.0,
                   axis="R", grid=_R_GRID),
    "fig4": Preset("fig4", sd_db=5, sr_db=20, rd_db=20, rr_db=0, rate_r=2.0,
                   axis="sigma2_RR_dB", grid=_RR_GRID),
    "fig5": Preset("fig5", sd_db=8, sr_db=10, rd_db=10, rr_db=0, rate_r=2.0,
                   axis="sigma2_RR_dB", grid=_RR_GRID),
    # S->D variance tracks the S->R axis, 10 dB below it
    "fig6": Preset("fig6", sd_db=0, sr_db=10, rd_db=20, rr_db=0, rate_r=2.0,
                   axis="sigma2_SR_dB", grid=_SR_GRID, sd_offset_db=-10.0),
    "fig7": Preset("fig7", sd_db=0, sr_db=10, rd_db=5, rr_db=0, rate_r=2.0,
                   axis="sigma2_SR_dB", grid=_SR_GRID, sd_offset_db=-10.0),
}


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}") from None
