"""Population / sampling mechanism configurations and single-observation
simulators.

Each family couples a hidden set of known true size with the query mechanism
an analyst would actually face: order statistics of sampled labels, counts,
failure times, overlaps of independent samples, network degrees, capture
histories. All simulators are pure functions of (config, rng).
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels as _k
from .rng import BOUNDARY_FAMILIES, RngState

INF_HORIZON = float("inf")


class ConfigError(ValueError):
    """Model configuration violates a family invariant."""


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


# ---------------------------------------------------------------------------
# Configurations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TankConfig:
    family = "tank"
    population_size: int
    sample_size: int
    offset: int = 0

    def validate(self):
        _require(self.population_size >= 1, "population_size must be >= 1")
        _require(1 <= self.sample_size <= self.population_size,
                 "need 1 <= sample_size <= population_size")


@dataclass(frozen=True)
class IntervalConfig:
    family = "interval"
    theta: float
    sample_size: int
    boundary: str = "uniform"  # uniform | polynomial | exponential
    degree: float = 0.0

    def validate(self):
        _require(self.theta > 0, "theta must be positive")
        _require(self.sample_size >= 1, "sample_size must be >= 1")
        _require(self.boundary in BOUNDARY_FAMILIES,
                 f"unknown boundary family {self.boundary!r}")
        _require(self.degree >= 0, "degree must be non-negative")


@dataclass(frozen=True)
class BinomialCountConfig:
    family = "binomial"
    population_size: int
    p: float
    repetitions: int = 1

    def validate(self):
        _require(self.population_size >= 1, "population_size must be >= 1")
        _require(0 < self.p < 1, "p must be in (0,1)")
        _require(self.repetitions >= 1, "repetitions must be >= 1")


@dataclass(frozen=True)
class ZTPoissonConfig:
    family = "ztp"
    population_size: int
    rate: float
    known_rate: bool = False

    def validate(self):
        _require(self.population_size >= 1, "population_size must be >= 1")
        _require(self.rate > 0, "rate must be positive")


@dataclass(frozen=True)
class WaitingTimeConfig:
    family = "waiting"
    population_size: int
    rate: float
    horizon: float = INF_HORIZON  # inf encodes the everything-observed case

    def validate(self):
        _require(self.population_size >= 1, "population_size must be >= 1")
        _require(self.rate > 0, "rate must be positive")
        _require(self.horizon > 0, "horizon must be positive")


@dataclass(frozen=True)
class MultiplierConfig:
    family = "multiplier"
    population_size: int
    prevalence: float
    sample_size: int
    redraw_first: bool = True
    benchmark: Optional[int] = None  # fixed |s_1| instead of a random draw

    def validate(self):
        _require(self.population_size >= 1, "population_size must be >= 1")
        _require(0 < self.prevalence < 1, "prevalence must be in (0,1)")
        _require(1 <= self.sample_size <= self.population_size,
                 "need 1 <= sample_size <= population_size")
        if self.benchmark is not None:
            _require(0 <= self.benchmark <= self.population_size,
                     "benchmark must be in [0, N]")


@dataclass(frozen=True)
class CRC2Config:
    family = "crc2"
    population_size: int
    n1: int
    n2: int

    def validate(self):
        _require(self.population_size >= 1, "population_size must be >= 1")
        _require(1 <= self.n1 <= self.population_size, "need 1 <= n1 <= N")
        _require(1 <= self.n2 <= self.population_size, "need 1 <= n2 <= N")


@dataclass(frozen=True)
class CRCkConfig:
    family = "crck"
    population_size: int
    sizes: tuple

    def validate(self):
        _require(len(self.sizes) >= 2, "need k >= 2 samples")
        for n in self.sizes:
            _require(1 <= n <= self.population_size,
                     "each sample size must be in [1, N]")


@dataclass(frozen=True)
class NsumGeneralConfig:
    family = "nsum_general"
    total: int              # M, size of the enclosing population
    hidden: int             # N, size of the hidden subset
    edge_prob: float
    sample_size: int        # drawn from V \ U

    def validate(self):
        _require(1 <= self.hidden < self.total, "need 1 <= hidden < total")
        _require(0 < self.edge_prob <= 1, "edge_prob must be in (0,1]")
        _require(1 <= self.sample_size <= self.total - self.hidden,
                 "need sample_size <= total - hidden")


@dataclass(frozen=True)
class NsumHiddenConfig:
    family = "nsum_hidden"
    population_size: int
    edge_prob: float
    sample_size: int

    def validate(self):
        _require(self.population_size >= 2, "population_size must be >= 2")
        _require(0 < self.edge_prob <= 1, "edge_prob must be in (0,1]")
        _require(2 <= self.sample_size <= self.population_size,
                 "need 2 <= sample_size <= population_size")


@dataclass(frozen=True)
class HTClusterConfig:
    family = "ht"
    sizes: tuple            # cluster sizes N_1..N_H
    sample_size: int

    def validate(self):
        _require(len(self.sizes) >= 1, "need at least one cluster")
        for s in self.sizes:
            _require(s >= 1, "cluster sizes must be >= 1")
        _require(1 <= self.sample_size < min(self.sizes),
                 "need sample_size < min cluster size")

    @property
    def population_size(self):
        return sum(self.sizes)


# ---------------------------------------------------------------------------
# Observations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrderedObservation:
    family: str
    values: tuple  # sorted

    @property
    def size(self):
        return len(self.values)

    @property
    def x_min(self):
        return self.values[0]

    @property
    def x_max(self):
        return self.values[-1]


@dataclass(frozen=True)
class CountObservation:
    counts: tuple


@dataclass(frozen=True)
class ZTPObservation:
    counts: tuple           # the positive counts only
    population_size: int

    @property
    def observed(self):
        return len(self.counts)


@dataclass(frozen=True)
class WaitingObservation:
    times: tuple            # sorted failure times below the horizon
    rate: float
    horizon: float

    @property
    def count(self):
        return len(self.times)


@dataclass(frozen=True)
class MultiplierObservation:
    benchmark: int          # x = |s_1|
    overlap: int            # m = |s_1 ∩ s_2|
    sample_size: int        # n = |s_2|


@dataclass(frozen=True)
class CRC2Observation:
    n1: int
    n2: int
    overlap: int


@dataclass(frozen=True)
class CRCkObservation:
    sizes: tuple            # n_1..n_k
    table: dict             # capture pattern tuple -> count, all-zero absent
    marked: tuple           # M_2..M_k (count marked before sample i)
    recaptured: tuple       # m_2..m_k

    @property
    def k(self):
        return len(self.sizes)

    @property
    def distinct(self):
        """r, the number of distinct units ever captured."""
        return sum(self.table.values())


@dataclass(frozen=True)
class NsumGeneralObservation:
    degrees_total: tuple    # d_i^V per sampled unit
    degrees_hidden: tuple   # d_i^U per sampled unit
    total: int              # M


@dataclass(frozen=True)
class NsumHiddenObservation:
    degrees_hidden: tuple   # d_i^U per sampled unit
    degrees_sample: tuple   # d_i^s per sampled unit


@dataclass(frozen=True)
class HTObservation:
    clusters: tuple         # sampled cluster index per draw (1-based)
    cluster_sizes: tuple    # N_h of the sampled cluster per draw
    probabilities: tuple    # design inclusion probability per draw


# ---------------------------------------------------------------------------
# Simulators
# ---------------------------------------------------------------------------

def simulate_ordered(cfg, rng: RngState) -> OrderedObservation:
    """One ordered sample from a Tank or Interval population."""
    cfg.validate()
    if cfg.family == "tank":
        arr, rng._state = _k.sample_wor(
            rng._state, np.int64(cfg.population_size),
            np.int64(cfg.sample_size))
        vals = tuple(int(x) + cfg.offset for x in arr)
        return OrderedObservation("tank", vals)
    fam = BOUNDARY_FAMILIES[cfg.boundary]
    draws = []
    for _ in range(cfg.sample_size):
        u = rng.next_uniform_open()
        draws.append(float(_k.boundary_icdf(u, cfg.theta, fam, cfg.degree)))
    return OrderedObservation("interval", tuple(sorted(draws)))


def simulate_counts(cfg, rng: RngState):
    """One observation from a count family (binomial, zt-Poisson, waiting)."""
    cfg.validate()
    if cfg.family == "binomial":
        counts = []
        for _ in range(cfg.repetitions):
            c, rng._state = _k.draw_binomial(
                rng._state, np.int64(cfg.population_size), cfg.p)
            counts.append(int(c))
        return CountObservation(tuple(counts))
    if cfg.family == "ztp":
        counts = []
        for _ in range(cfg.population_size):
            c, rng._state = _k.draw_poisson(rng._state, cfg.rate)
            if c > 0:
                counts.append(int(c))
        return ZTPObservation(tuple(counts), cfg.population_size)
    # waiting time: exponential failure times censored at the horizon
    times = []
    for _ in range(cfg.population_size):
        t, rng._state = _k.draw_exponential(rng._state, cfg.rate)
        if t < cfg.horizon:
            times.append(float(t))
    return WaitingObservation(tuple(sorted(times)), cfg.rate, cfg.horizon)


def simulate_two_sample(cfg, rng: RngState,
                        fixed_first: Optional[int] = None):
    """Multiplier or two-sample capture-recapture overlap.

    For the multiplier family, `fixed_first` carries the benchmark size
    |s_1| forward so that repeated samples reuse the same trait realization
    (the infill behavior); when absent the benchmark is freshly drawn.
    """
    cfg.validate()
    if cfg.family == "multiplier":
        if fixed_first is None:
            fixed_first = cfg.benchmark
        if fixed_first is None:
            x, rng._state = _k.draw_binomial(
                rng._state, np.int64(cfg.population_size), cfg.prevalence)
            x = int(x)
        else:
            if not 0 <= fixed_first <= cfg.population_size:
                raise ConfigError("fixed_first outside [0, N]")
            x = int(fixed_first)
        m, rng._state = _k.draw_hypergeometric(
            rng._state, np.int64(cfg.population_size), np.int64(x),
            np.int64(cfg.sample_size))
        return MultiplierObservation(x, int(m), cfg.sample_size)
    m, rng._state = _k.draw_hypergeometric(
        rng._state, np.int64(cfg.population_size), np.int64(cfg.n1),
        np.int64(cfg.n2))
    return CRC2Observation(cfg.n1, cfg.n2, int(m))


def simulate_crck(cfg: CRCkConfig, rng: RngState) -> CRCkObservation:
    """k sequential without-replacement samples with capture histories."""
    cfg.validate()
    total = cfg.population_size
    history = np.zeros(total, dtype=np.int64)
    sizes = np.asarray(cfg.sizes, dtype=np.int64)
    rng._state = _k.crck_capture(rng._state, np.int64(total), sizes, history)
    k = len(cfg.sizes)
    table = {}
    marked = []
    recaptured = []
    seen = 0
    for i in range(k):
        bit = 1 << i
        if i >= 1:
            marked.append(seen)
            m_i = 0
            for h in history:
                if h & bit and h & (bit - 1):
                    m_i += 1
            recaptured.append(m_i)
        for h in history:
            if h & bit and (h & (bit - 1)) == 0:
                seen += 1
    for h in history:
        if h == 0:
            continue
        key = tuple((int(h) >> j) & 1 for j in range(k))
        table[key] = table.get(key, 0) + 1
    return CRCkObservation(cfg.sizes, table, tuple(marked),
                           tuple(recaptured))


def simulate_nsum(cfg, rng: RngState):
    """Degree observations for either network scale-up scenario.

    Edges follow an Erdős–Rényi graph with the configured edge probability;
    only edges incident to sampled units are materialized.
    """
    cfg.validate()
    n = cfg.sample_size
    if cfg.family == "nsum_hidden":
        d_s = np.zeros(n, dtype=np.int64)
        d_u = np.zeros(n, dtype=np.int64)
        rng._state = _k.nsum_hidden_degrees(
            rng._state, np.int64(cfg.population_size), cfg.edge_prob,
            np.int64(n), d_s, d_u)
        return NsumHiddenObservation(tuple(int(x) for x in d_u),
                                     tuple(int(x) for x in d_s))
    d_v = np.zeros(n, dtype=np.int64)
    d_u = np.zeros(n, dtype=np.int64)
    rng._state = _k.nsum_general_degrees(
        rng._state, np.int64(cfg.total), np.int64(cfg.hidden),
        cfg.edge_prob, np.int64(n), d_v, d_u)
    return NsumGeneralObservation(tuple(int(x) for x in d_v),
                                  tuple(int(x) for x in d_u), cfg.total)


def simulate_ht_cluster(cfg: HTClusterConfig, rng: RngState) -> HTObservation:
    """Sequential cluster-then-unit draws with design probabilities."""
    cfg.validate()
    h_count = len(cfg.sizes)
    n = cfg.sample_size
    clusters = []
    sizes = []
    probs = []
    for _ in range(n):
        h = rng.next_below(h_count)
        # the within-cluster unit is uniform among unsampled units; only the
        # cluster identity enters the estimator, so the unit index is not kept
        clusters.append(h + 1)
        sizes.append(cfg.sizes[h])
        probs.append(n / (h_count * cfg.sizes[h]))
    return HTObservation(tuple(clusters), tuple(sizes), tuple(probs))
