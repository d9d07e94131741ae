"""Dyadic BMO, maximal function and weight computations on 2^(nJ) grids.

Grid data is passed as flat row-major cell values (x fastest). Cubes are
``(level, ix, iy)`` tuples; ``(0, 0, 0)`` is the unit cube.
"""

from ._jnkit import (
    ConfigError,
    DomainError,
    IoError,
    ainfty_constant,
    ap_bump_constant,
    ap_constant,
    bmo_norm,
    build_function,
    check_bmo_lp,
    check_weighted_bmo,
    cp_constant,
    cz_decompose,
    dyadic_maximal,
    gamma,
    minimize_power_ratio,
    project,
    sharp_maximal,
    tail_bridge,
    verify,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "IoError",
    "ainfty_constant",
    "ap_bump_constant",
    "ap_constant",
    "bmo_norm",
    "build_function",
    "check_bmo_lp",
    "check_weighted_bmo",
    "cp_constant",
    "cz_decompose",
    "dyadic_maximal",
    "gamma",
    "minimize_power_ratio",
    "project",
    "sharp_maximal",
    "tail_bridge",
    "verify",
]
