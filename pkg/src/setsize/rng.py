"""Seedable counter-based random generation.

An :class:`RngState` is a value, never shared: each draw consumes the state
and stores its successor. Sub-streams derived from a master seed with
``RngState.derive`` are pairwise distinct and reproducible on every platform
at any thread count.
"""

import numpy as np

from . import _kernels as _k

__all__ = [
    "RngState",
    "draw_binomial",
    "draw_hypergeometric",
    "draw_poisson",
    "draw_zt_poisson",
    "draw_exponential",
    "draw_without_replacement",
    "inverse_cdf_boundary",
    "BOUNDARY_FAMILIES",
]

# codes shared with the compiled kernels
BOUNDARY_FAMILIES = {"uniform": 0, "polynomial": 1, "exponential": 2}


class RngState:
    """Position in one deterministic random stream."""

    __slots__ = ("seed", "stream", "_state_word")

    def __init__(self, seed: int, stream: int = 0):
        self.seed = seed
        self.stream = stream
        self._state = _k.derive_state(
            np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
            np.uint64(stream & 0xFFFFFFFFFFFFFFFF),
            np.uint64(0),
        )

    # compiled kernels return the successor state as a plain Python int;
    # it must go back in as uint64 or the kernels would re-type to int64
    @property
    def _state(self) -> np.uint64:
        return self._state_word

    @_state.setter
    def _state(self, value):
        self._state_word = np.uint64(int(value) & 0xFFFFFFFFFFFFFFFF)

    def __repr__(self):
        return f"RngState(seed={self.seed}, stream={self.stream})"

    @classmethod
    def derive(cls, seed: int, cell: int, rep: int) -> "RngState":
        """Stream for replication `rep` of cell `cell` under a master seed."""
        st = cls(seed, 0)
        st._state = _k.derive_state(
            np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
            np.uint64(cell), np.uint64(rep),
        )
        st.stream = cell
        return st

    def next_uniform(self) -> float:
        """Uniform double in [0, 1)."""
        u, self._state = _k.next_f64(self._state)
        return float(u)

    def next_uniform_open(self) -> float:
        """Uniform double in (0, 1)."""
        u, self._state = _k.next_f64_open(self._state)
        return float(u)

    def next_below(self, bound: int) -> int:
        if bound <= 0:
            raise ValueError("bound must be positive")
        v, self._state = _k.next_below(self._state, np.int64(bound))
        return int(v)


def draw_binomial(n: int, p: float, rng: RngState) -> int:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0,1], got {p}")
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    v, rng._state = _k.draw_binomial(rng._state, np.int64(n), float(p))
    return int(v)


def draw_hypergeometric(total: int, marked: int, draws: int,
                        rng: RngState) -> int:
    if not 0 <= marked <= total:
        raise ValueError(f"need 0 <= marked <= total, got {marked}, {total}")
    if not 0 <= draws <= total:
        raise ValueError(f"need 0 <= draws <= total, got {draws}, {total}")
    v, rng._state = _k.draw_hypergeometric(
        rng._state, np.int64(total), np.int64(marked), np.int64(draws))
    return int(v)


def draw_poisson(lam: float, rng: RngState) -> int:
    if lam < 0:
        raise ValueError(f"rate must be non-negative, got {lam}")
    v, rng._state = _k.draw_poisson(rng._state, float(lam))
    return int(v)


def draw_zt_poisson(lam: float, rng: RngState) -> int:
    if lam <= 0:
        raise ValueError(f"rate must be positive, got {lam}")
    v, rng._state = _k.draw_zt_poisson(rng._state, float(lam))
    return int(v)


def draw_exponential(rate: float, rng: RngState) -> float:
    if rate <= 0:
        raise ValueError(f"rate must be positive, got {rate}")
    v, rng._state = _k.draw_exponential(rng._state, float(rate))
    return float(v)


def draw_without_replacement(population: int, size: int,
                             rng: RngState) -> list:
    """Uniform `size`-subset of {1..population}, sorted."""
    if not 0 <= size <= population:
        raise ValueError(
            f"need 0 <= size <= population, got {size}, {population}")
    if size == 0:
        return []
    arr, rng._state = _k.sample_wor(
        rng._state, np.int64(population), np.int64(size))
    return [int(x) for x in arr]


def inverse_cdf_boundary(u: float, theta: float, family: str = "uniform",
                         degree: float = 0.0) -> float:
    """Inverse CDF on (0, theta) for the boundary densities.

    `family` is one of uniform, polynomial (with the given degree) or
    exponential. polynomial with degree 0 is exactly the uniform branch.
    """
    if not 0.0 < u < 1.0:
        raise ValueError(f"u must be in (0,1), got {u}")
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    if family not in BOUNDARY_FAMILIES:
        raise ValueError(f"unknown boundary family {family!r}")
    if degree < 0:
        raise ValueError(f"degree must be non-negative, got {degree}")
    return float(_k.boundary_icdf(
        float(u), float(theta), BOUNDARY_FAMILIES[family], float(degree)))
