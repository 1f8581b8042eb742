"""Small-gain certificates and DoS-resilience simulation for networked
distributed control systems.

The heavy lifting lives in the C++ extension; this package re-exports the
main operations: certificate analysis (`certify`), closed-loop simulation
(`simulate`), attack-budget fitting (`fit_budget`, `check_budget`), the
built-in experiment files (`gen_example`), and the small matrix toolkit.
"""

from dossim._core import (
    ConfigError,
    SmallGainViolated,
    builtin_names,
    certify,
    check_budget,
    eig_extremes_symmetric,
    fit_budget,
    gen_example,
    is_hurwitz,
    log_norm,
    simulate,
    solve_lyapunov,
    spectral_norm,
    spectral_radius,
)

__all__ = [
    "ConfigError",
    "SmallGainViolated",
    "builtin_names",
    "certify",
    "check_budget",
    "eig_extremes_symmetric",
    "fit_budget",
    "gen_example",
    "is_hurwitz",
    "log_norm",
    "simulate",
    "solve_lyapunov",
    "spectral_norm",
    "spectral_radius",
]

__version__ = "0.1.0"
