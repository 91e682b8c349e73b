"""Hidden-set size estimation: samplers, estimators, asymptotic-regime
simulation and exact verification oracles."""

__version__ = "0.1.0"

from ._backend import JIT_ENABLED, backend_name  # noqa: F401
