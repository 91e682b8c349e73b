"""Point estimators of hidden-set size, one entry point per observation
family, plus the closed-form moment approximations used to check them.

Every estimator returns :class:`Estimate` values carrying an explicit
status: ``ok``, ``undefined`` (a precondition such as a positive denominator
failed) or ``boundary`` (a solver or search stopped at its bound). Undefined
estimates are never silently replaced by sentinels.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels as _k

OK = "ok"
UNDEFINED = "undefined"
BOUNDARY = "boundary"


@dataclass(frozen=True)
class Estimate:
    estimator_id: str
    value: float
    status: str = OK

    @property
    def is_ok(self):
        return self.status == OK


def _undef(eid):
    return Estimate(eid, float("nan"), UNDEFINED)


# ---------------------------------------------------------------------------
# Order-statistic families
# ---------------------------------------------------------------------------

def est_german_tank(obs):
    """Serial-number estimators from an ordered label sample.

    mle is the sample maximum; goodman the unbiased correction; gap adds the
    average spacing; unknown_origin uses only the range, so it is invariant
    to a shifted label origin; bayes_mean is the posterior mean under the
    1/N prior (defined for n > 2).
    """
    n = obs.size
    hi = obs.x_max
    lo = obs.x_min
    out = {
        "tank.mle": Estimate("tank.mle", float(hi)),
        "tank.goodman": Estimate(
            "tank.goodman", (n + 1) / n * hi - 1.0),
    }
    if n >= 2:
        rng = hi - lo
        out["tank.gap"] = Estimate(
            "tank.gap", hi + rng / (n - 1) - 1.0)
        out["tank.unknown_origin"] = Estimate(
            "tank.unknown_origin", (n + 1) * rng / (n - 1) - 1.0)
    else:
        out["tank.gap"] = _undef("tank.gap")
        out["tank.unknown_origin"] = _undef("tank.unknown_origin")
    if n > 2:
        out["tank.bayes_mean"] = Estimate(
            "tank.bayes_mean", (n - 1) * (hi - 1.0) / (n - 2))
    else:
        out["tank.bayes_mean"] = _undef("tank.bayes_mean")
    return out


def est_interval(obs):
    """Maximum and its unbiased rescaling for a continuous boundary."""
    n = obs.size
    if n == 0:
        return {"interval.mle": _undef("interval.mle"),
                "interval.umvue": _undef("interval.umvue")}
    hi = obs.x_max
    return {
        "interval.mle": Estimate("interval.mle", float(hi)),
        "interval.umvue": Estimate("interval.umvue", (n + 1) / n * hi),
    }


# ---------------------------------------------------------------------------
# Count families
# ---------------------------------------------------------------------------

def est_binomial_known_p(obs, p):
    """Moment and likelihood estimators for repeated Binomial(N, p) counts."""
    if not 0 < p < 1:
        raise ValueError(f"p must be in (0,1), got {p}")
    counts = np.asarray(obs.counts, dtype=np.int64)
    if counts.size == 0:
        raise ValueError("counts must be non-empty")
    xbar = float(counts.mean())
    xmax = int(counts.max())
    out = {"binom.mme": Estimate("binom.mme", xbar / p)}
    cap = np.int64(max(8 * xmax // max(p, 1e-12), 1000) + xmax)
    if xmax == 0:
        out["binom.mle_discrete"] = Estimate(
            "binom.mle_discrete", 0.0, BOUNDARY)
        out["binom.mle_continuous"] = Estimate(
            "binom.mle_continuous", 0.0, BOUNDARY)
        return out
    v, status = _k.binom_mle_discrete(counts, float(p), cap)
    out["binom.mle_discrete"] = Estimate(
        "binom.mle_discrete", float(v), OK if status == 0 else BOUNDARY)
    v2, status2 = _k.binom_mle_continuous(counts, float(p), float(cap))
    out["binom.mle_continuous"] = Estimate(
        "binom.mle_continuous", float(v2), OK if status2 == 0 else BOUNDARY)
    return out


def est_binomial_unknown_p(obs, prior_a, prior_b, n_max=None):
    """Posterior mode of N with a Beta(a, b) prior on the unknown p.

    The posterior over N is proper only for a > 1. The mode is found by a
    log-space grid scan over [X_(n), n_max]; hitting the upper end is
    reported as boundary status.
    """
    if prior_a <= 1:
        raise ValueError("prior_a must exceed 1 for a proper posterior")
    if prior_b <= 0:
        raise ValueError("prior_b must be positive")
    counts = np.asarray(obs.counts, dtype=np.int64)
    if counts.size == 0:
        raise ValueError("counts must be non-empty")
    xmax = int(counts.max())
    if n_max is None:
        n_max = 50 * xmax + 100
    if n_max < xmax:
        raise ValueError("n_max must be at least the largest count")
    v, status = _k.binom_bayes_mode(
        counts, float(prior_a), float(prior_b), np.int64(n_max))
    return Estimate("binom.bayes_mode", float(v),
                    OK if status == 0 else BOUNDARY)


def est_ztp(obs, lambda_known=None):
    """Population size from the positive-count subsample.

    With a known rate the estimate is |s| / (1 - e^{-rate}); otherwise the
    rate solves mean(count) = lam / (1 - e^{-lam}), which requires the mean
    to exceed 1.
    """
    nobs = obs.observed
    if nobs == 0:
        return {"ztp.lambda": _undef("ztp.lambda"), "ztp": _undef("ztp")}
    if lambda_known is not None:
        if lambda_known <= 0:
            raise ValueError("rate must be positive")
        lam = float(lambda_known)
    else:
        xbar = sum(obs.counts) / nobs
        if xbar <= 1.0:
            return {"ztp.lambda": _undef("ztp.lambda"),
                    "ztp": _undef("ztp")}
        lam = float(_k.ztp_lambda_root(xbar))
    return {
        "ztp.lambda": Estimate("ztp.lambda", lam),
        "ztp": Estimate("ztp", nobs / -math.expm1(-lam)),
    }


def est_waiting_time(obs):
    """MLE of N from the number of failures seen before the horizon.

    The event times carry no extra information about N: the estimator is the
    discrete binomial MLE applied to the single count of observed failures
    with success probability 1 - e^{-rate * horizon}.
    """
    n = obs.count
    if math.isinf(obs.horizon):
        return Estimate("waiting.mle", float(n))
    p = -math.expm1(-obs.rate * obs.horizon)
    if n == 0:
        return Estimate("waiting.mle", 0.0, BOUNDARY)
    counts = np.asarray([n], dtype=np.int64)
    cap = np.int64(max(8 * n // max(p, 1e-12), 1000) + n)
    v, status = _k.binom_mle_discrete(counts, float(p), cap)
    return Estimate("waiting.mle", float(v), OK if status == 0 else BOUNDARY)


# ---------------------------------------------------------------------------
# Two-sample and multi-sample families
# ---------------------------------------------------------------------------

def est_multiplier(obs):
    """Benchmark-multiplier estimate x * n / m; undefined on zero overlap."""
    if obs.overlap == 0:
        return Estimate("mbm", float("nan"), UNDEFINED)
    return Estimate("mbm", obs.benchmark * obs.sample_size / obs.overlap)


def est_nsum_general(obs):
    """Scale-up ratio M * sum d^U / sum d^V from a general-population sample."""
    s_v = sum(obs.degrees_total)
    if s_v == 0:
        return Estimate("nsum.general", float("nan"), UNDEFINED)
    return Estimate("nsum.general",
                    obs.total * sum(obs.degrees_hidden) / s_v)


def est_nsum_hidden(obs):
    """Within-sample scale-up ratios from a hidden-population sample."""
    s_s = sum(obs.degrees_sample)
    if s_s == 0:
        return {"nsum.hidden": _undef("nsum.hidden"),
                "nsum.hidden_mme": _undef("nsum.hidden_mme")}
    n = len(obs.degrees_sample)
    s_u = sum(obs.degrees_hidden)
    return {
        "nsum.hidden": Estimate("nsum.hidden", n * s_u / s_s),
        "nsum.hidden_mme": Estimate(
            "nsum.hidden_mme", (n - 1) * s_u / s_s + 1.0),
    }


def est_ht(obs):
    """Horvitz-Thompson total: sum of inverse inclusion probabilities."""
    for p in obs.probabilities:
        if p <= 0:
            raise ValueError("inclusion probabilities must be positive")
    return Estimate("ht", sum(1.0 / p for p in obs.probabilities))


def est_crc2(obs):
    """Lincoln-Petersen ratio and the Chapman bias-corrected variant."""
    n1, n2, m = obs.n1, obs.n2, obs.overlap
    chap = Estimate("crc.chapman", (n1 + 1) * (n2 + 1) / (m + 1) - 1.0)
    if m == 0:
        return {"crc.lp": Estimate("crc.lp", float("nan"), UNDEFINED),
                "crc.chapman": chap}
    return {"crc.lp": Estimate("crc.lp", n1 * n2 / m), "crc.chapman": chap}


def est_crck(obs):
    """Root of (1 - r/N) = prod(1 - n_i/N) from k-sample capture data.

    Defined when every sample size is below the number of distinct captures
    r; a census sample (n_i = r) pins the root to the boundary N = r.
    """
    r = obs.distinct
    sizes = np.asarray(obs.sizes, dtype=np.int64)
    v, status = _k.darroch_solve(np.int64(r), sizes)
    if status == 1:
        return Estimate("crc.k_mle", float("nan"), UNDEFINED)
    return Estimate("crc.k_mle", float(v), OK if status == 0 else BOUNDARY)


def est_seber_mean(obs):
    """Average of the per-stage Chapman estimates over samples 2..k."""
    vals = []
    for marked, size, recap in zip(obs.marked, obs.sizes[1:],
                                   obs.recaptured):
        vals.append((marked + 1) * (size + 1) / (recap + 1) - 1.0)
    return Estimate("crc.seber_mean", sum(vals) / len(vals))


# ---------------------------------------------------------------------------
# Closed-form moment approximations (capture-recapture)
# ---------------------------------------------------------------------------

def approx_crc_moments(population_size, sizes, r_plugin=None):
    """Closed-form bias/variance expressions for CRC estimators.

    Returns a dict with chapman_bias_exact and chapman_var_outfill for two
    samples, and darroch_bias / darroch_var (delta-method forms, with E[r]
    replaced by r_plugin) for any k >= 2. Entries whose domain conditions
    fail are returned as None.
    """
    nn = int(population_size)
    sizes = [int(s) for s in sizes]
    k = len(sizes)
    out = {"chapman_bias_exact": None, "chapman_var_outfill": None,
           "darroch_bias": None, "darroch_var": None}
    if k == 2:
        n1, n2 = sizes
        if n1 + n2 + 1 <= nn:
            num = (Fraction(math.factorial(nn - n1))
                   * Fraction(math.factorial(nn - n2)))
            den = (Fraction(math.factorial(nn))
                   * Fraction(math.factorial(nn - n1 - n2 - 1)))
            out["chapman_bias_exact"] = float(-num / den)
        ratio = nn / (n1 * n2)
        out["chapman_var_outfill"] = nn * nn * (
            ratio + 2.0 * ratio ** 2 + 6.0 * ratio ** 3)
    if r_plugin is not None:
        r = float(r_plugin)
        if not max(sizes) < r < nn:
            raise ValueError("r_plugin must lie in (max n_i, N)")
        a = (k - 1.0) / nn - sum(1.0 / (nn - s) for s in sizes)
        b = (k - 1.0) / nn ** 2 - sum(1.0 / (nn - s) ** 2 for s in sizes)
        inv = 1.0 / (nn - r) + a
        if inv > 0:
            out["darroch_var"] = 1.0 / inv
            out["darroch_bias"] = (a * a + b) / (2.0 * inv * inv)
    return out
