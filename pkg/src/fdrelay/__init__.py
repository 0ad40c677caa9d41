"""Outage probability of full-duplex relaying schemes over Nakagami-m fading.

Analytic (closed-form and quadrature) evaluators and a Monte Carlo engine for
direct transmission, non-combining and signal-combining AF/SDF relaying.
"""

__version__ = "0.1.0"

from .analytic import OutageEstimate, outage
from .channel import ChannelParams, LinkSample, ScaledRates, SystemConfig, db_to_linear
from .errors import ConfigError, DomainError, NumericError, UnsupportedAnalyticError
from .montecarlo import McConfig, estimate_outage, sweep
from .presets import PRESETS, SCHEME_LABELS, get_preset, resolve_scheme
from .schemes import SchemeKind, threshold_for

__all__ = [
    "ChannelParams",
    "ConfigError",
    "DomainError",
    "LinkSample",
    "McConfig",
    "NumericError",
    "OutageEstimate",
    "PRESETS",
    "SCHEME_LABELS",
    "ScaledRates",
    "SchemeKind",
    "SystemConfig",
    "UnsupportedAnalyticError",
    "db_to_linear",
    "estimate_outage",
    "get_preset",
    "outage",
    "resolve_scheme",
    "sweep",
    "threshold_for",
]
