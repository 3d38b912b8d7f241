"""Python access to the tug-of-war solver, game simulator and kernel constants."""

from ._tow import (
    TowError,
    gamma_constant,
    mc_moment,
    moment_table,
    normalize_config,
    simulate,
    solve,
)

INTERIOR, COLLAR, EXTERIOR = 0, 1, 2

__all__ = [
    "TowError",
    "gamma_constant",
    "mc_moment",
    "moment_table",
    "normalize_config",
    "simulate",
    "solve",
    "INTERIOR",
    "COLLAR",
    "EXTERIOR",
]
