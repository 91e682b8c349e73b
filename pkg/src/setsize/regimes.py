"""Asymptotic-regime schedules.

A schedule is an ordered list of cells, each pairing a concrete model
configuration with a repeated-sample count k_t. Three kinds:

- finite_population: the population is fixed and the sampled fraction grows
  until the final cell is a census (or its family analogue, p -> 1 or an
  infinite horizon).
- infill: population and per-sample sizes constant, k_t strictly increasing.
- outfill: k_t = 1 and population size grows with sample/population ratios
  held at the configured targets (plus a growing-k variant for multi-sample
  capture-recapture, where the number of samples also increases).
"""

import dataclasses
import math
from dataclasses import dataclass

from . import models
from .models import ConfigError

KINDS = ("finite_population", "infill", "outfill")


@dataclass(frozen=True)
class Cell:
    t: int                  # schedule index value (grid entry)
    cfg: object             # ModelConfig for this cell
    k_t: int                # repeated samples per replication
    target: float           # true hidden-set size for this cell
    sample_sizes: tuple     # the per-sample sizes, for reporting


@dataclass(frozen=True)
class RegimeSchedule:
    kind: str
    family: str
    cells: tuple
    ratios: tuple


def _round_clamp(c, total, lo=1, hi=None):
    if hi is None:
        hi = total - 1
    v = int(round(c * total))
    return max(lo, min(v, hi))


def _check_grid(grid):
    if len(grid) < 1:
        raise ConfigError("grid must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("grid must be strictly increasing")


def _check_ratios(ratios, count, upper_open=True):
    if len(ratios) == 1 and count > 1:
        ratios = ratios * count
    if len(ratios) != count:
        raise ConfigError(f"expected {count} ratio(s), got {len(ratios)}")
    for c in ratios:
        if upper_open:
            if not 0 < c < 1:
                raise ConfigError(f"ratio {c} outside (0,1)")
        elif not 0 < c <= 1:
            raise ConfigError(f"ratio {c} outside (0,1]")
    return tuple(ratios)


def build_schedule(family, kind, base_cfg, grid, ratios=(),
                   growing_k=False):
    """Materialize a regime as explicit (config, k_t) cells.

    grid semantics: population sizes (outfill), repeated-sample counts
    (infill), or the family's growing quantity (finite_population: sample
    size, second-sample size, or horizon). ratios are the outfill
    sample/population targets.
    """
    if kind not in KINDS:
        raise ConfigError(f"unknown regime kind {kind!r}")
    grid = list(grid)
    _check_grid(grid)
    if kind == "infill":
        cells = _infill(family, base_cfg, grid)
        ratios = ()
    elif kind == "outfill":
        cells = _outfill(family, base_cfg, grid, ratios, growing_k)
        ratios = tuple(ratios)
    else:
        cells = _finite_population(family, base_cfg, grid)
        ratios = ()
    return RegimeSchedule(kind, family, tuple(cells), ratios)


def _target(cfg):
    if cfg.family == "interval":
        return float(cfg.theta)
    if cfg.family == "nsum_general":
        return float(cfg.hidden)
    return float(cfg.population_size)


def _sample_sizes(cfg):
    if cfg.family in ("crc2",):
        return (cfg.n1, cfg.n2)
    if cfg.family in ("crck", "ht"):
        return tuple(cfg.sizes) if cfg.family == "crck" else (
            cfg.sample_size,)
    if cfg.family in ("ztp", "waiting"):
        return ()
    if cfg.family == "binomial":
        return (cfg.repetitions,)
    return (cfg.sample_size,)


def _infill(family, base_cfg, grid):
    for k in grid:
        if k < 1:
            raise ConfigError("infill sample counts must be >= 1")
    return [Cell(int(k), base_cfg, int(k), _target(base_cfg),
                 _sample_sizes(base_cfg)) for k in grid]


def _outfill(family, base_cfg, grid, ratios, growing_k):
    cells = []
    if family == "tank":
        (c,) = _check_ratios(ratios, 1)
        for nt in grid:
            cfg = models.TankConfig(int(nt), _round_clamp(c, int(nt)),
                                    base_cfg.offset)
            cells.append(Cell(int(nt), cfg, 1, float(nt),
                              (cfg.sample_size,)))
    elif family == "interval":
        # the continuous family admits a full-rate sample, c = 1
        (c,) = _check_ratios(ratios, 1, upper_open=False)
        for nt in grid:
            n = max(1, int(round(c * nt)))
            cfg = models.IntervalConfig(float(nt), n, base_cfg.boundary,
                                        base_cfg.degree)
            cells.append(Cell(int(nt), cfg, 1, float(nt), (n,)))
    elif family == "binomial":
        (c,) = _check_ratios(ratios, 1)
        for nt in grid:
            cfg = models.BinomialCountConfig(int(nt), base_cfg.p,
                                             _round_clamp(c, int(nt)))
            cells.append(Cell(int(nt), cfg, 1, float(nt),
                              (cfg.repetitions,)))
    elif family in ("ztp", "waiting"):
        # the mechanism itself queries every unit; no ratio applies
        for nt in grid:
            cfg = dataclasses.replace(base_cfg, population_size=int(nt))
            cells.append(Cell(int(nt), cfg, 1, float(nt), ()))
    elif family == "multiplier":
        # one ratio: sample fraction, random benchmark at the configured
        # prevalence. two ratios: (benchmark fraction, sample fraction) with
        # the benchmark held at its exact fractional size.
        if len(ratios) == 2:
            cb, cs = _check_ratios(ratios, 2)
        else:
            (cs,) = _check_ratios(ratios, 1)
            cb = None
        for nt in grid:
            bench = None if cb is None else _round_clamp(cb, int(nt))
            cfg = models.MultiplierConfig(int(nt), base_cfg.prevalence,
                                          _round_clamp(cs, int(nt)),
                                          base_cfg.redraw_first, bench)
            cells.append(Cell(int(nt), cfg, 1, float(nt),
                              (cfg.sample_size,)))
    elif family == "crc2":
        c1, c2 = _check_ratios(ratios, 2)
        for nt in grid:
            cfg = models.CRC2Config(int(nt), _round_clamp(c1, int(nt)),
                                    _round_clamp(c2, int(nt)))
            cells.append(Cell(int(nt), cfg, 1, float(nt),
                              (cfg.n1, cfg.n2)))
    elif family == "crck":
        if growing_k:
            # every sample keeps capture fraction p; the number of samples
            # grows just fast enough that N * (1-p)^k -> 0
            (p,) = _check_ratios(ratios, 1)
            for nt in grid:
                k = math.ceil(math.log(10.0 * nt) / -math.log(1.0 - p))
                k = max(k, 2)
                n_i = _round_clamp(p, int(nt))
                cfg = models.CRCkConfig(int(nt), (n_i,) * k)
                cells.append(Cell(int(nt), cfg, 1, float(nt), (n_i,) * k))
        else:
            k = len(base_cfg.sizes)
            cs = _check_ratios(ratios, k)
            for nt in grid:
                sizes = tuple(_round_clamp(c, int(nt)) for c in cs)
                cfg = models.CRCkConfig(int(nt), sizes)
                cells.append(Cell(int(nt), cfg, 1, float(nt), sizes))
    elif family == "nsum_general":
        # grid entries are total population sizes M_t; the hidden fraction
        # and the sample fraction are both held
        ch, cs = _check_ratios(ratios, 2)
        for mt in grid:
            hidden = _round_clamp(ch, int(mt))
            n = max(1, min(int(round(cs * mt)), int(mt) - hidden))
            cfg = models.NsumGeneralConfig(int(mt), hidden,
                                           base_cfg.edge_prob, n)
            cells.append(Cell(int(mt), cfg, 1, float(hidden), (n,)))
    elif family == "nsum_hidden":
        (c,) = _check_ratios(ratios, 1)
        for nt in grid:
            n = max(2, _round_clamp(c, int(nt), lo=2, hi=int(nt)))
            cfg = models.NsumHiddenConfig(int(nt), base_cfg.edge_prob, n)
            cells.append(Cell(int(nt), cfg, 1, float(nt), (n,)))
    elif family == "ht":
        # grid entries are replication factors t: clusters tiled t times
        (c,) = _check_ratios(ratios, 1)
        for t in grid:
            sizes = tuple(base_cfg.sizes) * int(t)
            nt = sum(sizes)
            n = _round_clamp(c, nt)
            cfg = models.HTClusterConfig(sizes, n)
            cells.append(Cell(int(t), cfg, 1, float(nt), (n,)))
    else:
        raise ConfigError(f"family {family!r} has no outfill schedule")
    return cells


def _finite_population(family, base_cfg, grid):
    cells = []
    if family == "tank":
        nn = base_cfg.population_size
        if grid[-1] != nn:
            raise ConfigError("final sample size must equal the population")
        for n in grid:
            cfg = models.TankConfig(nn, int(n), base_cfg.offset)
            cells.append(Cell(int(n), cfg, 1, float(nn), (int(n),)))
    elif family == "crc2":
        nn = base_cfg.population_size
        if grid[-1] != nn:
            raise ConfigError("final second sample must be a census")
        for n2 in grid:
            cfg = models.CRC2Config(nn, base_cfg.n1, int(n2))
            cells.append(Cell(int(n2), cfg, 1, float(nn),
                              (base_cfg.n1, int(n2))))
    elif family == "waiting":
        # grid entries are horizons; an infinite final horizon (the census
        # analogue) is appended when not already present
        horizons = [float(h) for h in grid]
        if not math.isinf(horizons[-1]):
            horizons.append(models.INF_HORIZON)
        for i, h in enumerate(horizons):
            cfg = models.WaitingTimeConfig(base_cfg.population_size,
                                           base_cfg.rate, h)
            cells.append(Cell(i + 1, cfg, 1,
                              float(base_cfg.population_size), ()))
    else:
        raise ConfigError(
            f"family {family!r} has no finite-population schedule")
    return cells
