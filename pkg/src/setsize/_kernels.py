"""Numeric kernels: counter-based RNG, exact discrete samplers, solvers and
per-family replication loops.

Everything here is numba-compilable (see :mod:`setsize._backend`).  All
randomness flows through an explicit uint64 state value that is passed in and
returned, never shared; replication streams are derived by hashing
(master seed, cell index, replication index), so results are independent of
execution order and thread count.
"""

import math

import numpy as np

from ._backend import njit

U64 = np.uint64

_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_INV53 = 1.1102230246251565e-16  # 2^-53


# ---------------------------------------------------------------------------
# RNG core (splitmix64-style counter generator)
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def mix64(z):
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True, nogil=True)
def derive_state(seed, a, b):
    """Starting state for sub-stream (a, b) of a master seed."""
    s = mix64(seed + _GOLDEN)
    s = mix64(s ^ (a * _MIX1 + _GOLDEN))
    s = mix64(s ^ (b * _MIX2 + _GOLDEN))
    return s


@njit(cache=True, nogil=True)
def next_u64(state):
    state = state + _GOLDEN
    return mix64(state), state


@njit(cache=True, nogil=True)
def next_f64(state):
    """Uniform double in [0, 1)."""
    v, state = next_u64(state)
    return (v >> U64(11)) * _INV53, state


@njit(cache=True, nogil=True)
def next_f64_open(state):
    """Uniform double in (0, 1), both endpoints excluded."""
    v, state = next_u64(state)
    return ((v >> U64(11)) + 0.5) * _INV53, state


@njit(cache=True, nogil=True)
def next_below(state, bound):
    """Uniform integer in [0, bound); unbiased by rejection."""
    b = U64(bound)
    t = (U64(0) - b) % b  # 2^64 mod b
    while True:
        v, state = next_u64(state)
        if v >= t:
            return np.int64(v % b), state


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def lchoose(n, k):
    if k < 0 or k > n:
        return -np.inf
    return (math.lgamma(n + 1.0) - math.lgamma(k + 1.0)
            - math.lgamma(n - k + 1.0))


@njit(cache=True, nogil=True)
def digamma(x):
    # downward recurrence to x >= 6, then the asymptotic series
    r = 0.0
    while x < 6.0:
        r -= 1.0 / x
        x += 1.0
    f = 1.0 / (x * x)
    tail = f * (1.0 / 12.0
                - f * (1.0 / 120.0
                       - f * (1.0 / 252.0
                              - f * (1.0 / 240.0
                                     - f * (1.0 / 132.0)))))
    return r + math.log(x) - 0.5 / x - tail


# ---------------------------------------------------------------------------
# Exact distribution samplers
# ---------------------------------------------------------------------------
# Discrete samplers invert the CDF by walking the pmf outward from the mode
# (recurrence relations, O(sqrt(var)) expected steps).  The enumeration order
# does not affect the sampled law.

@njit(cache=True, nogil=True)
def draw_binomial(state, n, p):
    if n <= 0 or p <= 0.0:
        return np.int64(0), state
    if p >= 1.0:
        return np.int64(n), state
    q = 1.0 - p
    m = np.int64((n + 1) * p)
    if m > n:
        m = np.int64(n)
    logpm = (lchoose(n, m) + m * math.log(p) + (n - m) * math.log1p(-p))
    pm = math.exp(logpm)
    u, state = next_f64(state)
    if u < pm:
        return m, state
    u -= pm
    lo = m
    hi = m
    plo = pm
    phi = pm
    while lo > 0 or hi < n:
        if hi < n:
            phi = phi * ((n - hi) / (hi + 1.0)) * (p / q)
            hi += 1
            if u < phi:
                return np.int64(hi), state
            u -= phi
        if lo > 0:
            plo = plo * (lo / (n - lo + 1.0)) * (q / p)
            lo -= 1
            if u < plo:
                return np.int64(lo), state
            u -= plo
    return m, state  # float tail leakage (< 1e-15 mass): fall back to mode


@njit(cache=True, nogil=True)
def draw_hypergeometric(state, total, marked, draws):
    lo = draws + marked - total
    if lo < 0:
        lo = np.int64(0)
    hi = draws if draws < marked else marked
    if lo >= hi:
        return np.int64(lo), state
    m = np.int64((draws + 1.0) * (marked + 1.0) / (total + 2.0))
    if m < lo:
        m = np.int64(lo)
    if m > hi:
        m = np.int64(hi)
    logpm = (lchoose(marked, m) + lchoose(total - marked, draws - m)
             - lchoose(total, draws))
    pm = math.exp(logpm)
    u, state = next_f64(state)
    if u < pm:
        return m, state
    u -= pm
    a = m
    b = m
    pa = pm
    pb = pm
    while a > lo or b < hi:
        if b < hi:
            pb = pb * ((marked - b) * (draws - b)
                       / ((b + 1.0) * (total - marked - draws + b + 1.0)))
            b += 1
            if u < pb:
                return np.int64(b), state
            u -= pb
        if a > lo:
            pa = pa * ((a * (total - marked - draws + a))
                       / ((marked - a + 1.0) * (draws - a + 1.0)))
            a -= 1
            if u < pa:
                return np.int64(a), state
            u -= pa
    return m, state


@njit(cache=True, nogil=True)
def draw_poisson(state, lam):
    if lam <= 0.0:
        return np.int64(0), state
    if lam < 10.0:
        # chop-down inversion from zero
        u, state = next_f64(state)
        k = np.int64(0)
        pk = math.exp(-lam)
        while u >= pk:
            u -= pk
            k += 1
            pk *= lam / k
            if k > 2000:
                break
        return k, state
    m = np.int64(lam)
    logpm = -lam + m * math.log(lam) - math.lgamma(m + 1.0)
    pm = math.exp(logpm)
    u, state = next_f64(state)
    if u < pm:
        return m, state
    u -= pm
    lo = m
    hi = m
    plo = pm
    phi = pm
    for _ in range(100000):
        moved = False
        phi = phi * (lam / (hi + 1.0))
        hi += 1
        if u < phi:
            return np.int64(hi), state
        u -= phi
        if lo > 0:
            plo = plo * (lo / lam)
            lo -= 1
            moved = True
            if u < plo:
                return np.int64(lo), state
            u -= plo
        if not moved and phi < 1e-300:
            break
    return m, state


@njit(cache=True, nogil=True)
def draw_zt_poisson(state, lam):
    """Poisson conditioned on being positive.

    Rejection of zeros for lam >= 0.1; inverse-CDF summation of the truncated
    pmf below that, where P(0) is close to 1 and rejection would thrash.
    """
    if lam >= 0.1:
        while True:
            k, state = draw_poisson(state, lam)
            if k > 0:
                return k, state
    u, state = next_f64(state)
    k = np.int64(1)
    pk = lam / math.expm1(lam)
    while u >= pk:
        u -= pk
        k += 1
        pk *= lam / k
        if k > 500:
            break
    return k, state


@njit(cache=True, nogil=True)
def draw_exponential(state, rate):
    u, state = next_f64_open(state)
    return -math.log1p(-u) / rate, state


@njit(cache=True, nogil=True)
def boundary_icdf(u, theta, family, degree):
    """Inverse CDF of the near-boundary densities on (0, theta).

    family: 0 = uniform, 1 = polynomial of the given degree, 2 = exponential.
    """
    if family == 1:
        return theta * u ** (1.0 / (degree + 1.0))
    if family == 2:
        if theta > 30.0:
            # ln(1 + u(e^t - 1)) = t + ln(u + (1-u)e^-t), stable for large t
            return theta + math.log(u + (1.0 - u) * math.exp(-theta))
        return math.log1p(u * math.expm1(theta))
    return theta * u


@njit(cache=True, nogil=True)
def sample_wor(state, total, size):
    """Uniform without-replacement sample of `size` labels from {1..total}."""
    arr = np.arange(1, total + 1)
    for i in range(size):
        j, state = next_below(state, total - i)
        j += i
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp
    out = np.sort(arr[:size])
    return out, state


@njit(cache=True, nogil=True)
def sample_wor_minmax(state, total, size):
    """Min and max of a uniform without-replacement sample from {1..total}."""
    arr = np.arange(1, total + 1)
    xmin = np.int64(total + 1)
    xmax = np.int64(0)
    for i in range(size):
        j, state = next_below(state, total - i)
        j += i
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp
        v = arr[i]
        if v < xmin:
            xmin = v
        if v > xmax:
            xmax = v
    return xmin, xmax, state


# ---------------------------------------------------------------------------
# Scalar solvers used by estimators
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def ztp_lambda_root(xbar):
    """Solve lam / (1 - exp(-lam)) = xbar for lam > 0 (requires xbar > 1)."""
    lo = 1e-12
    hi = xbar
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f = mid / (-math.expm1(-mid)) - xbar
        if f > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@njit(cache=True, nogil=True)
def darroch_solve(r, sizes):
    """Root of (1 - r/N) = prod(1 - n_i/N) on (r, inf).

    Returns (value, status): status 0 = ok, 1 = undefined, 2 = boundary
    (either census n_i = r, where the root sits at N = r, or the bracket
    could not be closed).
    """
    k = sizes.shape[0]
    if r <= 0:
        return np.nan, np.int64(1)
    nmax = np.int64(0)
    nsum = np.int64(0)
    for i in range(k):
        if sizes[i] > nmax:
            nmax = sizes[i]
        nsum += sizes[i]
    if nmax > r:
        return np.nan, np.int64(1)
    if nmax == r:
        return float(r), np.int64(2)
    if nsum <= r:
        # no recaptures at all: likelihood increases without bound
        return np.nan, np.int64(1)
    lo = float(r) * (1.0 + 1e-12)
    hi = float(r) + 1.0
    fhi = -1.0
    for _ in range(200):
        prod = 1.0
        for i in range(k):
            prod *= 1.0 - sizes[i] / hi
        fhi = (1.0 - r / hi) - prod
        if fhi > 0.0:
            break
        lo = hi
        hi *= 2.0
    if fhi <= 0.0:
        return hi, np.int64(2)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        prod = 1.0
        for i in range(k):
            prod *= 1.0 - sizes[i] / mid
        f = (1.0 - r / mid) - prod
        if f > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * hi:
            break
    return 0.5 * (lo + hi), np.int64(0)


@njit(cache=True, nogil=True)
def binom_mle_discrete(counts, p, cap):
    """Largest N with L(N) >= L(N-1) for iid Binomial(N, p) counts.

    Returns (value, status): 0 ok, 2 boundary (all-zero counts or cap hit).
    """
    n = counts.shape[0]
    xmax = np.int64(0)
    for i in range(n):
        if counts[i] > xmax:
            xmax = counts[i]
    if xmax == 0:
        return np.int64(0), np.int64(2)
    q = 1.0 - p
    best = xmax
    m = xmax + 1
    while m <= cap:
        t = 1.0
        for i in range(n):
            t *= q * m / (m - counts[i])
        if t >= 1.0:
            best = m
            m += 1
        else:
            return best, np.int64(0)
    return best, np.int64(2)


@njit(cache=True, nogil=True)
def binom_score(counts, p, nn):
    n = counts.shape[0]
    s = n * math.log1p(-p)
    for i in range(n):
        s += digamma(nn + 1.0) - digamma(nn - counts[i] + 1.0)
    return s


@njit(cache=True, nogil=True)
def binom_mle_continuous(counts, p, cap):
    """Zero of the continuous score in N, clipped below at X_(n)."""
    n = counts.shape[0]
    xmax = np.int64(0)
    for i in range(n):
        if counts[i] > xmax:
            xmax = counts[i]
    if xmax == 0:
        return 0.0, np.int64(2)
    lo = float(xmax)
    if binom_score(counts, p, lo) <= 0.0:
        return lo, np.int64(0)
    hi = lo * 2.0 + 2.0
    ok = False
    for _ in range(200):
        if hi > cap:
            break
        if binom_score(counts, p, hi) < 0.0:
            ok = True
            break
        hi *= 2.0
    if not ok:
        return hi, np.int64(2)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if binom_score(counts, p, mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-9 * hi:
            break
    return 0.5 * (lo + hi), np.int64(0)


@njit(cache=True, nogil=True)
def binom_bayes_mode(counts, a, b, nmax):
    """Posterior mode of N under Beta(a, b) prior on p, flat prior on N.

    Grid argmax of sum_i log C(N, x_i) + log Beta(a + sum x, b + nN - sum x)
    over N in [X_(n), nmax].  Returns (value, status): 2 = mode at nmax.
    """
    n = counts.shape[0]
    xmax = np.int64(0)
    ssum = np.int64(0)
    for i in range(n):
        ssum += counts[i]
        if counts[i] > xmax:
            xmax = counts[i]
    best = xmax
    bestlp = -np.inf
    for nn in range(xmax, nmax + 1):
        lp = (math.lgamma(a + ssum) + math.lgamma(b + n * nn - ssum)
              - math.lgamma(a + b + n * nn))
        for i in range(n):
            lp += lchoose(nn, counts[i])
        if lp > bestlp:
            bestlp = lp
            best = nn
    if best == nmax:
        return np.int64(best), np.int64(2)
    return np.int64(best), np.int64(0)


# ---------------------------------------------------------------------------
# Per-observation model kernels shared by the public simulators
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def crck_capture(state, total, sizes, history):
    """k-sample capture histories for every unit.

    history is an int64[total] scratch array; bit j of unit i is set when the
    unit is caught in sample j.  Returns the new state.
    """
    total_units = history.shape[0]
    for i in range(total_units):
        history[i] = 0
    k = sizes.shape[0]
    for j in range(k):
        idx, state = sample_wor(state, total, sizes[j])
        for a in range(idx.shape[0]):
            history[idx[a] - 1] |= np.int64(1) << np.int64(j)
    return state


@njit(cache=True, nogil=True)
def nsum_hidden_degrees(state, hidden, edge_prob, size, d_s, d_u):
    """Within-sample and hidden-population degrees for a sample from U.

    Generates the C(n,2) within-sample edges once (symmetric) and each unit's
    independent edges to the N - n unsampled units.
    """
    n = d_s.shape[0]
    for i in range(n):
        d_s[i] = 0
    for i in range(n):
        for j in range(i + 1, n):
            u, state = next_f64(state)
            if u < edge_prob:
                d_s[i] += 1
                d_s[j] += 1
    for i in range(n):
        extra, state = draw_binomial(state, hidden - n, edge_prob)
        d_u[i] = d_s[i] + extra
    return state


@njit(cache=True, nogil=True)
def nsum_general_degrees(state, total, hidden, edge_prob, size, d_v, d_u):
    """Degrees to V and to U for a sample from the general population."""
    n = d_v.shape[0]
    for i in range(n):
        d_v[i] = 0
    for i in range(n):
        for j in range(i + 1, n):
            u, state = next_f64(state)
            if u < edge_prob:
                d_v[i] += 1
                d_v[j] += 1
    for i in range(n):
        du, state = draw_binomial(state, hidden, edge_prob)
        rest, state = draw_binomial(state, total - hidden - n, edge_prob)
        d_u[i] = du
        d_v[i] += du + rest
    return state


# ---------------------------------------------------------------------------
# Replication (cell) kernels
# ---------------------------------------------------------------------------
# Each kernel fills out[rep, :] for rep in [r0, r1) with per-replication
# estimates; NaN marks an undefined estimate.  k samples per replication are
# aggregated with the infill rule: average per-sample estimates, except the
# order-statistic MLEs which are max-combined.

@njit(cache=True, nogil=True)
def cell_tank(seed, cell, r0, r1, k, total, size, offset, out):
    # columns: mle, goodman, gap, unknown_origin, bayes_mean
    for rep in range(r0, r1):
        st = derive_state(seed, U64(cell), U64(rep))
        mle = -np.inf
        sg = 0.0
        sgap = 0.0
        suo = 0.0
        sb = 0.0
        for _ in range(k):
            x1, xn, st = sample_wor_minmax(st, total, size)
            lo = float(x1 + offset)
            hi = float(xn + offset)
            if hi > mle:
                mle = hi
            sg += (size + 1.0) / size * hi - 1.0
            if size >= 2:
                rng_ = hi - lo
                sgap += hi + rng_ / (size - 1.0) - 1.0
                suo += (size + 1.0) * rng_ / (size - 1.0) - 1.0
            if size > 2:
                sb += (size - 1.0) * (hi - 1.0) / (size - 2.0)
        out[rep, 0] = mle
        out[rep, 1] = sg / k
        out[rep, 2] = sgap / k if size >= 2 else np.nan
        out[rep, 3] = suo / k if size >= 2 else np.nan
        out[rep, 4] = sb / k if size > 2 else np.nan


@njit(cache=True, nogil=True)
def cell_interval(seed, cell, r0, r1, k, theta, size, family, degree, out):
    # columns: mle (max-combined), umvue (averaged)
    for rep in range(r0, r1):
        st = derive_state(seed, U64(cell), U64(rep))
        mle = -np.inf
        su = 0.0
        for _ in range(k):
            xn = 0.0
            for _ in range(size):
                u, st = next_f64_open(st)
                x = boundary_icdf(u, theta, family, degree)
                if x > xn:
                    xn = x
            if xn > mle:
                mle = xn
            su += (size + 1.0) / size * xn
        out[rep, 0] = mle
        out[rep, 1] = su / k


@njit(cache=True, nogil=True)
def cell_binom(seed, cell, r0, r1, k, total, p, reps, want, prior_a, prior_b,
               nmax, out):
    # columns: mme, mle_discrete, mle_continuous, bayes_mode
    cap = np.int64(total * 8 + 1000)
    counts = np.empty(reps, dtype=np.int64)
    for rep in range(r0, r1):
        st = derive_state(seed, U64(cell), U64(rep))
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        s3 = 0.0
        for _ in range(k):
            tot = 0.0
            for i in range(reps):
                c, st = draw_binomial(st, total, p)
                counts[i] = c
                tot += c
            s0 += tot / reps / p
            if want[1]:
                v, _stat = binom_mle_discrete(counts, p, cap)
                s1 += v
            if want[2]:
                v2, _stat = binom_mle_continuous(counts, p, float(cap))
                s2 += v2
            if want[3]:
                v3, _stat = binom_bayes_mode(counts, prior_a, prior_b, nmax)
                s3 += v3
        out[rep, 0] = s0 / k
        out[rep, 1] = s1 / k if want[1] else np.nan
        out[rep, 2] = s2 / k if want[2] else np.nan
        out[rep, 3] = s3 / k if want[3] else np.nan


@njit(cache=True, nogil=True)
def cell_ztp(seed, cell, r0, r1, k, total, lam, known, out):
    # column: ztp population estimate
    for rep in range(r0, r1):
        st = derive_state(seed, U64(cell), U64(rep))
        acc = 0.0
        valid = 0
        for _ in range(k):
            nobs = 0
            tot = 0.0
            for _ in range(total):
                c, st = draw_poisson(st, lam)
                if c > 0:
                    nobs += 1
                    tot += c
            if nobs == 0:
                continue
            if known:
                acc += nobs / (-math.expm1(-lam))
                valid += 1
            else:
                xbar = tot / nobs
                if xbar > 1.0:
                    lam_hat = ztp_lambda_root(xbar)
                    acc += nobs / (-math.expm1(-lam_hat))
                    valid += 1
        out[rep, 0] = acc / valid if valid > 0 else np.nan


@njit(cache=True, nogil=True)
def cell_waiting(seed, cell, r0, r1, k, total, lam, horizon, out):
    # column: waiting-time MLE == binomial discrete MLE on the event count
    if horizon == np.inf:
        p = 1.0
    else:
        p = -math.expm1(-lam * horizon)
    cap = np.int64(total * 8 + 1000)
    counts = np.empty(1, dtype=np.int64)
    for rep in range(r0, r1):
        st = derive_state(seed, U64(cell), U64(rep))
        acc = 0.0
        for _ in range(k):
            c, st = draw_binomial(st, total, p)
            counts[0] = c
            v, _stat = binom_mle_discrete(counts, p, cap)
            acc += v
        out[rep, 0] = acc / k


@njit(cache=True, nogil=True)
def cell_multiplier(seed, cell, r0, r1, k, total, prevalence, size, fixed_x,
                    out):
    # column: benchmark-multiplier estimate x*n/m; the benchmark is drawn
    # once per replication and held fixed across the k sample pairs
    for rep in range(r0, r1):
        st = derive_state(seed, U64(cell), U64(rep))
        if fixed_x >= 0:
            x = np.int64(fixed_x)
        else:
            x, st = draw_binomial(st, total, prevalence)
        acc = 0.0
        valid = 0
        for _ in range(k):
            m, st = draw_hypergeometric(st, total, x, size)
            if m > 0:
                acc += x * float(size) / m
                valid += 1
        out[rep, 0] = acc / valid if valid > 0 else np.nan


@njit(cache=True, nogil=True)
def cell_crc2(seed, cell, r0, r1, k, total, n1, n2, out):
    # columns: lincoln_petersen, chapman
    for rep in range(r0, r1):
        st = derive_state(seed, U64(cell), U64(rep))
        slp = 0.0
        nlp = 0
        sch = 0.0
        for _ in range(k):
            m, st = draw_hypergeometric(st, total, n1, n2)
            if m > 0:
                slp += n1 * float(n2) / m
                nlp += 1
            sch += (n1 + 1.0) * (n2 + 1.0) / (m + 1.0) - 1.0
        out[rep, 0] = slp / nlp if nlp > 0 else np.nan
        out[rep, 1] = sch / k


@njit(cache=True, nogil=True)
def cell_crck(seed, cell, r0, r1, k, total, sizes, out):
    # columns: darroch MLE, seber mean-Petersen
    # sufficient statistics simulated by the exact hypergeometric chain
    # m_i | M_i ~ Hypergeometric(N, M_i, n_i), M_{i+1} = M_i + n_i - m_i
    ks = sizes.shape[0]
    for rep in range(r0, r1):
        st = derive_state(seed, U64(cell), U64(rep))
        sd = 0.0
        ss = 0.0
        for _ in range(k):
            marked = np.int64(0)
            seber = 0.0
            for i in range(ks):
                m, st = draw_hypergeometric(st, total, marked, sizes[i])
                if i >= 1:
                    seber += ((marked + 1.0) * (sizes[i] + 1.0) / (m + 1.0)
                              - 1.0)
                marked = marked + sizes[i] - m
            r = marked
            v, status = darroch_solve(r, sizes)
            if status == 1:
                sd = np.nan
            else:
                sd += v
            ss += seber / (ks - 1.0)
        out[rep, 0] = sd / k
        out[rep, 1] = ss / k


@njit(cache=True, nogil=True)
def cell_nsum_general(seed, cell, r0, r1, k, total, hidden, edge_prob, size,
                      out):
    # column: M * sum d^U / sum d^V; degree sums drawn from their exact
    # joint law (binomial components; within-sample edges count twice)
    pairs = size * (size - 1) // 2
    rest_n = size * (total - hidden - size)
    for rep in range(r0, r1):
        st = derive_state(seed, U64(cell), U64(rep))
        acc = 0.0
        valid = 0
        for _ in range(k):
            e_s, st = draw_binomial(st, pairs, edge_prob)
            s_du, st = draw_binomial(st, size * hidden, edge_prob)
            s_rest, st = draw_binomial(st, rest_n, edge_prob)
            s_dv = 2 * e_s + s_du + s_rest
            if s_dv > 0:
                acc += total * float(s_du) / s_dv
                valid += 1
        out[rep, 0] = acc / valid if valid > 0 else np.nan


@njit(cache=True, nogil=True)
def cell_nsum_hidden(seed, cell, r0, r1, k, hidden, edge_prob, size, out):
    # columns: simplified n*sum d^U / sum d^s, and the MME with the +1 term
    pairs = size * (size - 1) // 2
    rest_n = size * (hidden - size)
    for rep in range(r0, r1):
        st = derive_state(seed, U64(cell), U64(rep))
        acc0 = 0.0
        acc1 = 0.0
        valid = 0
        for _ in range(k):
            e_s, st = draw_binomial(st, pairs, edge_prob)
            s_ds = 2 * e_s
            s_rest, st = draw_binomial(st, rest_n, edge_prob)
            s_du = s_ds + s_rest
            if s_ds > 0:
                acc0 += size * float(s_du) / s_ds
                acc1 += (size - 1.0) * s_du / s_ds + 1.0
                valid += 1
        if valid > 0:
            out[rep, 0] = acc0 / valid
            out[rep, 1] = acc1 / valid
        else:
            out[rep, 0] = np.nan
            out[rep, 1] = np.nan


@njit(cache=True, nogil=True)
def cell_ht(seed, cell, r0, r1, k, nclusters, sizes, size, out):
    # column: Horvitz-Thompson total, sum over draws of H*N_h/n
    for rep in range(r0, r1):
        st = derive_state(seed, U64(cell), U64(rep))
        acc = 0.0
        for _ in range(k):
            s = 0.0
            for _ in range(size):
                h, st = next_below(st, nclusters)
                s += sizes[h]
            acc += s * nclusters / size
        out[rep, 0] = acc / k
