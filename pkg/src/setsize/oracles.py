"""Exact small-instance ground truth, independent of the Monte Carlo path.

Expectations and variances are computed in rational arithmetic by full
enumeration of the outcome space, so closed-form claims can be checked with
zero tolerance. Sizes are capped where the combinatorics would explode.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "ExactMoments",
    "exact_tank_moments",
    "exact_two_sample_moments",
    "exact_ht_moments",
    "reference_root_solve",
]


@dataclass(frozen=True)
class ExactMoments:
    expectation: Fraction
    variance: Fraction
    support_size: int
    # probability of the conditioning event when the estimator is only
    # defined on part of the support (1 when unconditional)
    condition_prob: Fraction = Fraction(1)


def _moments(weighted):
    """(value, weight) pairs -> ExactMoments with renormalized weights."""
    total = sum(w for _, w in weighted)
    if total == 0:
        raise ValueError("estimator undefined on the whole support")
    e1 = sum(v * w for v, w in weighted) / total
    e2 = sum(v * v * w for v, w in weighted) / total
    return e1, e2 - e1 * e1, total


_TANK_IDS = ("mle", "goodman", "gap", "unknown_origin", "bayes_mean")


def exact_tank_moments(population_size, sample_size, estimator_id):
    """Enumerate all C(N, n) label subsets; exact estimator moments."""
    nn, n = int(population_size), int(sample_size)
    eid = estimator_id.removeprefix("tank.")
    if eid not in _TANK_IDS:
        raise ValueError(f"unknown tank estimator {estimator_id!r}")
    if not 1 <= n <= nn:
        raise ValueError("need 1 <= sample_size <= population_size")
    if nn > 20:
        raise ValueError("population_size capped at 20 for enumeration")
    weighted = []
    for subset in itertools.combinations(range(1, nn + 1), n):
        lo, hi = subset[0], subset[-1]
        if eid == "mle":
            v = Fraction(hi)
        elif eid == "goodman":
            v = Fraction(n + 1, n) * hi - 1
        elif eid == "gap":
            if n < 2:
                raise ValueError("gap needs sample_size >= 2")
            v = hi + Fraction(hi - lo, n - 1) - 1
        elif eid == "unknown_origin":
            if n < 2:
                raise ValueError("unknown_origin needs sample_size >= 2")
            v = Fraction((n + 1) * (hi - lo), n - 1) - 1
        else:
            if n <= 2:
                raise ValueError("bayes_mean needs sample_size > 2")
            v = Fraction((n - 1) * (hi - 1), n - 2)
        weighted.append((v, Fraction(1)))
    e, var, total = _moments(weighted)
    return ExactMoments(e, var, len(weighted))


def exact_two_sample_moments(population_size, n1, n2, estimator_id):
    """Sum over the hypergeometric support of the sample overlap m.

    estimator_id: lp (conditioned on m >= 1), chapman, or mbm-conditional
    (benchmark n1, second sample n2, conditioned on m >= 1).
    """
    nn = int(population_size)
    n1, n2 = int(n1), int(n2)
    if nn > 10_000:
        raise ValueError("population_size capped at 10^4")
    if not (1 <= n1 <= nn and 1 <= n2 <= nn):
        raise ValueError("sample sizes must be in [1, N]")
    eid = estimator_id.removeprefix("crc.")
    if eid not in ("lp", "chapman", "mbm-conditional"):
        raise ValueError(f"unknown two-sample estimator {estimator_id!r}")
    lo = max(0, n1 + n2 - nn)
    hi = min(n1, n2)
    denom = math.comb(nn, n2)
    weighted = []
    support = 0
    for m in range(lo, hi + 1):
        w = Fraction(math.comb(n1, m) * math.comb(nn - n1, n2 - m), denom)
        support += 1
        if eid == "chapman":
            v = Fraction((n1 + 1) * (n2 + 1), m + 1) - 1
        elif m == 0:
            continue  # ratio estimators condition on overlap
        else:
            v = Fraction(n1 * n2, m)
        weighted.append((v, w))
    e, var, total = _moments(weighted)
    return ExactMoments(e, var, support, total)


def exact_ht_moments(cluster_sizes, sample_size):
    """Enumerate all cluster-draw sequences for the two-stage design.

    The estimate depends only on which cluster each draw lands in; the
    within-cluster unit choice is exchangeable and cancels, so the outcome
    space is the H^n equally likely cluster sequences.
    """
    sizes = [int(s) for s in cluster_sizes]
    n = int(sample_size)
    h = len(sizes)
    if h < 1 or n < 1:
        raise ValueError("need at least one cluster and one draw")
    if h ** n > 1_000_000:
        raise ValueError("outcome space capped at 10^6 sequences")
    weighted = []
    for seq in itertools.product(range(h), repeat=n):
        v = Fraction(h * sum(sizes[j] for j in seq), n)
        weighted.append((v, Fraction(1)))
    e, var, total = _moments(weighted)
    return ExactMoments(e, var, len(weighted))


def reference_root_solve(f, lo, hi, tol=1e-12):
    """Plain bisection; requires a sign change on [lo, hi].

    Deliberately unaccelerated: used only as an independent check of the
    production solvers.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if flo * fhi > 0:
        raise ValueError("no sign change on the bracket")
    for _ in range(10_000):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (fhi > 0):
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)
