"""Replicated-experiment engine.

Runs schedule cells with deterministic per-replication random streams,
aggregates per-replication estimates into cell diagnostics (bias, variance,
MSE, consistency probabilities, a normality statistic), and fits log-log
rates across cells.

Determinism: replication `rep` of cell `cell` always uses the stream derived
from (master_seed, cell, rep), so results are bit-identical at any thread
count and chunking.

When a cell's outcome space is small (German tank subsets, two-sample
overlap support, cluster-draw sequences) the engine switches to exact
enumeration and reports zero-variance ground-truth moments instead of Monte
Carlo estimates.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels as _k
from ._backend import JIT_ENABLED
from .models import ConfigError

EXACT_ATOM_LIMIT = 1_000_000

# kernel output columns per family, in kernel column order
FAMILY_COLUMNS = {
    "tank": ("tank.mle", "tank.goodman", "tank.gap", "tank.unknown_origin",
             "tank.bayes_mean"),
    "interval": ("interval.mle", "interval.umvue"),
    "binomial": ("binom.mme", "binom.mle_discrete", "binom.mle_continuous",
                 "binom.bayes_mode"),
    "ztp": ("ztp",),
    "waiting": ("waiting.mle",),
    "multiplier": ("mbm",),
    "crc2": ("crc.lp", "crc.chapman"),
    "crck": ("crc.k_mle", "crc.seber_mean"),
    "nsum_general": ("nsum.general",),
    "nsum_hidden": ("nsum.hidden", "nsum.hidden_mme"),
    "ht": ("ht",),
}

ALL_ESTIMATORS = tuple(e for cols in FAMILY_COLUMNS.values() for e in cols)


@dataclass(frozen=True)
class CellStats:
    estimator_id: str
    t: int
    target: float
    replications: int
    valid: int
    mean: float
    bias: float
    variance: float
    mse: float
    mc_se: float
    ks_stat: float
    p_outside: dict
    seed: int
    exact: bool = False


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float


def check_estimators(family, estimator_ids):
    cols = FAMILY_COLUMNS.get(family)
    if cols is None:
        raise ConfigError(f"unknown family {family!r}")
    bad = [e for e in estimator_ids if e not in cols]
    if bad:
        raise ConfigError(
            f"estimator(s) {bad} not available for family {family!r}")


# ---------------------------------------------------------------------------
# Kernel dispatch
# ---------------------------------------------------------------------------

def _launch(cfg, seed, cell_index, r0, r1, k_t, out, estimator_ids=()):
    s = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    c = np.uint64(cell_index)
    fam = cfg.family
    if fam == "tank":
        _k.cell_tank(s, c, r0, r1, k_t, np.int64(cfg.population_size),
                     np.int64(cfg.sample_size), np.int64(cfg.offset), out)
    elif fam == "interval":
        from .rng import BOUNDARY_FAMILIES
        _k.cell_interval(s, c, r0, r1, k_t, float(cfg.theta),
                         np.int64(cfg.sample_size),
                         np.int64(BOUNDARY_FAMILIES[cfg.boundary]),
                         float(cfg.degree), out)
    elif fam == "binomial":
        want = _binom_want(estimator_ids or FAMILY_COLUMNS["binomial"])
        _k.cell_binom(s, c, r0, r1, k_t, np.int64(cfg.population_size),
                      float(cfg.p), np.int64(cfg.repetitions), want,
                      2.0, 2.0, np.int64(4 * cfg.population_size + 100), out)
    elif fam == "ztp":
        _k.cell_ztp(s, c, r0, r1, k_t, np.int64(cfg.population_size),
                    float(cfg.rate), cfg.known_rate, out)
    elif fam == "waiting":
        _k.cell_waiting(s, c, r0, r1, k_t, np.int64(cfg.population_size),
                        float(cfg.rate), float(cfg.horizon), out)
    elif fam == "multiplier":
        bench = -1 if cfg.benchmark is None else int(cfg.benchmark)
        _k.cell_multiplier(s, c, r0, r1, k_t, np.int64(cfg.population_size),
                           float(cfg.prevalence),
                           np.int64(cfg.sample_size), np.int64(bench), out)
    elif fam == "crc2":
        _k.cell_crc2(s, c, r0, r1, k_t, np.int64(cfg.population_size),
                     np.int64(cfg.n1), np.int64(cfg.n2), out)
    elif fam == "crck":
        sizes = np.asarray(cfg.sizes, dtype=np.int64)
        _k.cell_crck(s, c, r0, r1, k_t, np.int64(cfg.population_size),
                     sizes, out)
    elif fam == "nsum_general":
        _k.cell_nsum_general(s, c, r0, r1, k_t, np.int64(cfg.total),
                             np.int64(cfg.hidden), float(cfg.edge_prob),
                             np.int64(cfg.sample_size), out)
    elif fam == "nsum_hidden":
        _k.cell_nsum_hidden(s, c, r0, r1, k_t,
                            np.int64(cfg.population_size),
                            float(cfg.edge_prob),
                            np.int64(cfg.sample_size), out)
    elif fam == "ht":
        sizes = np.asarray(cfg.sizes, dtype=np.int64)
        _k.cell_ht(s, c, r0, r1, k_t, np.int64(len(cfg.sizes)), sizes,
                   np.int64(cfg.sample_size), out)
    else:
        raise ConfigError(f"unknown family {fam!r}")


def _binom_want(estimator_ids):
    cols = FAMILY_COLUMNS["binomial"]
    return np.asarray([cols[i] in estimator_ids for i in range(4)],
                      dtype=np.bool_)


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

def normality_stat(values):
    """KS distance between standardized values and the standard normal."""
    v = np.asarray(values, dtype=np.float64)
    v = v[np.isfinite(v)]
    if v.size < 50:
        raise ValueError("need at least 50 valid estimates")
    sd = v.std(ddof=1)
    if sd == 0:
        raise ValueError("zero variance sample")
    z = np.sort((v - v.mean()) / sd)
    cdf = 0.5 * (1.0 + np.vectorize(math.erf)(z / math.sqrt(2.0)))
    n = z.size
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def _column_stats(eid, values, t, target, eps_list, seed):
    r = values.size
    mask = np.isfinite(values)
    valid = int(mask.sum())
    p_outside = {}
    if valid == 0:
        for eps in eps_list:
            p_outside[eps] = 1.0
        return CellStats(eid, t, target, r, 0, float("nan"), float("nan"),
                         float("nan"), float("nan"), float("nan"),
                         float("nan"), p_outside, seed)
    v = values[mask]
    mean = float(v.mean())
    bias = mean - target
    variance = float(v.var(ddof=1)) if valid > 1 else 0.0
    mse = float(np.mean((v - target) ** 2))
    mc_se = math.sqrt(variance / valid) if valid > 1 else 0.0
    dev = np.abs(v - target)
    for eps in eps_list:
        # undefined replications count as outside: conservative consistency
        p_outside[eps] = float((int((dev > eps).sum()) + (r - valid)) / r)
    try:
        ks = normality_stat(v)
    except ValueError:
        ks = float("nan")
    return CellStats(eid, t, target, r, valid, mean, bias, variance, mse,
                     mc_se, ks, p_outside, seed)


# ---------------------------------------------------------------------------
# Exact enumeration path
# ---------------------------------------------------------------------------

def exact_atoms(cfg, k_t):
    """Outcome-space size when the cell supports exact enumeration."""
    if k_t != 1:
        return None
    if cfg.family == "tank":
        return math.comb(cfg.population_size, cfg.sample_size)
    if cfg.family == "crc2":
        lo = max(0, cfg.n1 + cfg.n2 - cfg.population_size)
        return min(cfg.n1, cfg.n2) - lo + 1
    if cfg.family == "ht":
        return len(cfg.sizes) ** cfg.sample_size
    return None


def _exact_tank_distribution(nn, n):
    """(lo, hi) joint pmf of the sample extremes: list of (lo, hi, weight)."""
    total = Fraction(math.comb(nn, n))
    out = []
    if n == 1:
        for v in range(1, nn + 1):
            out.append((v, v, Fraction(1) / total))
        return out
    for lo in range(1, nn - n + 2):
        for hi in range(lo + n - 1, nn + 1):
            w = Fraction(math.comb(hi - lo - 1, n - 2)) / total
            out.append((lo, hi, w))
    return out


def _exact_cell(cfg, eids, t, target, eps_list, seed):
    """Zero-variance cell statistics from full enumeration."""
    fam = cfg.family
    dists = {eid: [] for eid in eids}  # (value or None, prob)
    atoms = exact_atoms(cfg, 1)
    if fam == "tank":
        n = cfg.sample_size
        for lo, hi, w in _exact_tank_distribution(cfg.population_size, n):
            lo += cfg.offset
            hi += cfg.offset
            for eid in eids:
                if eid == "tank.mle":
                    v = Fraction(hi)
                elif eid == "tank.goodman":
                    v = Fraction(n + 1, n) * hi - 1
                elif eid == "tank.gap":
                    v = (hi + Fraction(hi - lo, n - 1) - 1 if n >= 2
                         else None)
                elif eid == "tank.unknown_origin":
                    v = (Fraction((n + 1) * (hi - lo), n - 1) - 1
                         if n >= 2 else None)
                else:
                    v = (Fraction((n - 1) * (hi - 1), n - 2) if n > 2
                         else None)
                dists[eid].append((v, w))
    elif fam == "crc2":
        nn, n1, n2 = cfg.population_size, cfg.n1, cfg.n2
        denom = math.comb(nn, n2)
        lo = max(0, n1 + n2 - nn)
        for m in range(lo, min(n1, n2) + 1):
            w = Fraction(math.comb(n1, m) * math.comb(nn - n1, n2 - m),
                         denom)
            for eid in eids:
                if eid == "crc.chapman":
                    v = Fraction((n1 + 1) * (n2 + 1), m + 1) - 1
                else:
                    v = Fraction(n1 * n2, m) if m > 0 else None
                dists[eid].append((v, w))
    elif fam == "ht":
        import itertools
        h = len(cfg.sizes)
        n = cfg.sample_size
        w = Fraction(1, h ** n)
        for seq in itertools.product(range(h), repeat=n):
            v = Fraction(h * sum(cfg.sizes[j] for j in seq), n)
            dists["ht"].append((v, w))
    else:
        raise ConfigError(f"no exact mode for family {fam!r}")
    stats = {}
    tgt = Fraction(target).limit_denominator(10 ** 9)
    for eid, pairs in dists.items():
        defined = [(v, w) for v, w in pairs if v is not None]
        pdef = sum(w for _, w in defined)
        if pdef == 0:
            stats[eid] = CellStats(eid, t, target, atoms, 0, float("nan"),
                                   float("nan"), float("nan"), float("nan"),
                                   0.0, float("nan"),
                                   {eps: 1.0 for eps in eps_list}, seed,
                                   exact=True)
            continue
        e1 = sum(v * w for v, w in defined) / pdef
        e2 = sum(v * v * w for v, w in defined) / pdef
        var = e2 - e1 * e1
        mse = sum((v - tgt) ** 2 * w for v, w in defined) / pdef
        p_out = {}
        for eps in eps_list:
            feps = Fraction(eps).limit_denominator(10 ** 9)
            mass = sum(w for v, w in defined if abs(v - tgt) > feps)
            p_out[eps] = float(mass + (1 - pdef))
        nvalid = sum(1 for v, _ in pairs if v is not None)
        stats[eid] = CellStats(eid, t, target, atoms, nvalid, float(e1),
                               float(e1 - tgt), float(var), float(mse), 0.0,
                               float("nan"), p_out, seed, exact=True)
    return stats


# ---------------------------------------------------------------------------
# Cell / schedule execution
# ---------------------------------------------------------------------------

def _resolve_threads(threads):
    if threads in (0, None):
        return min(os.cpu_count() or 1, 8)
    return max(1, int(threads))


def run_cell(cfg, k_t, estimator_ids, replications, master_seed,
             cell_index=0, eps_list=(0.5,), threads=0, exact="auto",
             t=None, target=None):
    """All requested estimator diagnostics for one schedule cell."""
    check_estimators(cfg.family, estimator_ids)
    if replications < 2:
        raise ConfigError("need at least 2 replications")
    if target is None:
        target = float(getattr(cfg, "theta", None)
                       or getattr(cfg, "hidden", None)
                       or cfg.population_size)
    if t is None:
        t = cell_index
    atoms = exact_atoms(cfg, k_t)
    use_exact = (exact is True
                 or (exact == "auto" and atoms is not None
                     and atoms <= EXACT_ATOM_LIMIT))
    if use_exact:
        if atoms is None:
            raise ConfigError(
                f"exact mode unsupported for family {cfg.family!r} "
                f"with k_t={k_t}")
        if atoms > EXACT_ATOM_LIMIT:
            raise ConfigError("outcome space too large for exact mode")
        return _exact_cell(cfg, tuple(estimator_ids), t, target, eps_list,
                           master_seed)
    cols = FAMILY_COLUMNS[cfg.family]
    out = np.full((replications, len(cols)), np.nan, dtype=np.float64)
    nthreads = _resolve_threads(threads)
    if nthreads == 1 or not JIT_ENABLED or replications < 256:
        _launch(cfg, master_seed, cell_index, 0, replications, k_t, out,
                estimator_ids)
    else:
        chunk = max(64, -(-replications // (nthreads * 4)))
        bounds = [(r0, min(r0 + chunk, replications))
                  for r0 in range(0, replications, chunk)]
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            futs = [pool.submit(_launch, cfg, master_seed, cell_index,
                                r0, r1, k_t, out, estimator_ids)
                    for r0, r1 in bounds]
            for f in futs:
                f.result()
    stats = {}
    for j, eid in enumerate(cols):
        if eid in estimator_ids:
            stats[eid] = _column_stats(eid, out[:, j], t, target, eps_list,
                                       master_seed)
    return stats


def run_schedule(schedule, estimator_ids, replications, master_seed,
                 eps_list=(0.5,), threads=0, exact="auto"):
    """run_cell over every schedule cell with cell-index-derived seeds.

    Returns an ordered list of (cell, {estimator_id: CellStats}).
    """
    check_estimators(schedule.family, estimator_ids)
    results = []
    for idx, cell in enumerate(schedule.cells):
        stats = run_cell(cell.cfg, cell.k_t, estimator_ids, replications,
                         master_seed, cell_index=idx, eps_list=eps_list,
                         threads=threads, exact=exact, t=cell.t,
                         target=cell.target)
        results.append((cell, stats))
    return results


def fit_loglog_rate(xs, mses):
    """Least-squares slope of log(mse) against log(x)."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(mses, dtype=np.float64)
    if xs.size < 3:
        raise ValueError("need at least 3 cells for a rate fit")
    if np.any(ys <= 0) or np.any(xs <= 0):
        raise ValueError("rate fit needs positive sizes and positive mse")
    lx = np.log(xs)
    ly = np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    return RateFit(float(slope), float(intercept), min(1.0, r2))


def consistency_curve(cell_stats, eps):
    """Ordered (t, p_outside(eps)) pairs from a per-cell stats list."""
    out = []
    for st in cell_stats:
        if eps not in st.p_outside:
            raise ValueError(f"eps={eps} was not recorded for t={st.t}")
        out.append((st.t, st.p_outside[eps]))
    return out
