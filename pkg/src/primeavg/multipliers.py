"""Major-arc approximating multipliers for prime averages.

The exponential sum attached to the log-weighted prime average is

    m_N(xi) = (1/theta(N)) * sum over primes p <= N of e(xi p) log p,

with e(x) = exp(2 pi i x).  Near a reduced rational a/q it is modelled by

    L_hat[a,q; N](theta) = G(1_q, a) M_hat_N(theta)
                           - G(chi_q, a) M_hat^beta_N(theta)   (exceptional case)

where M^beta_N is the Cesaro-type kernel with weights
(n^beta - (n-1)^beta)/(beta N) on sites 1..N, and the exceptional term is
only present when a real zero beta of the quadratic L-function mod q is
supplied (synthetically, unless a scan ever finds one).

The glued approximant at dyadic scale N = 2^n is

    nu_n(xi)   = sum over levels s of nu_n_s(xi),
    nu_n_s(xi) = sum over arcs a/q at level s of
                 L_hat[a,q; 2^n](xi - a/q) * eta_s(xi - a/q),

where level s collects the reduced fractions with 2^s <= q < 2^(s+1) whose
denominator is square-free or 4 times a square-free number, and
eta_s(xi) = eta(2^(4s) xi) for a fixed smooth plateau cutoff eta (1 on
[-1/4, 1/4], 0 outside (-1/2, 1/2)).  The eta_s supports of distinct arcs at
one level are disjoint.  Pi_n_t truncates the sum at levels s <= sqrt(t).

Grid evaluation samples xi = j/G on a power-of-two grid; per-arc windows
restrict work to the support of each eta_s.  m_N on a grid goes through one
FFT of the folded log p weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import gauss
from .characters import DirichletCharacter
from .ntheory import DomainError, PrimeTable, is_squarefree

DEFAULT_S_MAX = 6

# --- kernels ---


@dataclass(frozen=True)
class Kernel:
    """A finitely supported weight sequence: sites (ascending) and weights."""

    sites: np.ndarray
    weights: np.ndarray

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @property
    def max_site(self) -> int:
        return int(self.sites[-1]) if self.sites.size else 0


def kernel_M_beta(N: int, beta: float) -> Kernel:
    """M^beta_N: weights (n^beta - (n-1)^beta)/(beta N) on sites 1..N.

    beta lies in [1/2, 1]; beta = 1 gives the plain Cesaro average.  N = 0
    yields the empty kernel.  Every weight is <= 1/N and the total mass is
    N^(beta-1)/beta.
    """
    if not 0.5 <= beta <= 1.0:
        raise DomainError("beta must lie in [1/2, 1]")
    if N < 0:
        raise DomainError("N must be >= 0")
    if N == 0:
        return Kernel(sites=np.empty(0, dtype=np.int64), weights=np.empty(0))
    n = np.arange(1, N + 1, dtype=np.float64)
    w = (n ** beta - (n - 1) ** beta) / (beta * N)
    return Kernel(sites=np.arange(1, N + 1, dtype=np.int64), weights=w)


def kernel_delta(n: int) -> Kernel:
    """The point mass at site n."""
    return Kernel(sites=np.array([n], dtype=np.int64), weights=np.array([1.0]))


def prime_kernel(N: int, table: PrimeTable, weighted: bool) -> Kernel:
    """Averaging kernel over primes <= N: log p / theta(N), or 1/pi(N)."""
    if N < 2:
        raise DomainError("prime averages need N >= 2")
    p = table.primes_upto(N)
    if weighted:
        w = np.log(p.astype(np.float64)) / table.theta(N)
    else:
        w = np.full(p.size, 1.0 / p.size)
    return Kernel(sites=p.copy(), weights=w)


def fourier_kernel(kernel: Kernel, xi: float | np.ndarray) -> np.ndarray | complex:
    """K_hat(xi) = sum of w(site) e(xi site), matching the e(+) convention of m_N."""
    xv = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    out = np.zeros(xv.shape, dtype=np.complex128)
    # chunk the sites to bound the outer-product workspace
    step = max(1, (1 << 22) // max(xv.size, 1))
    for lo in range(0, kernel.sites.size, step):
        s = kernel.sites[lo:lo + step].astype(np.float64)
        w = kernel.weights[lo:lo + step]
        out += (w[None, :] * np.exp(2j * np.pi * np.outer(xv, s))).sum(axis=1)
    if np.ndim(xi) == 0:
        return complex(out[0])
    return out


@dataclass(frozen=True)
class MultiplierGrid:
    """Samples of a 1-periodic multiplier at xi = j/resolution."""

    resolution: int
    values: np.ndarray

    def __post_init__(self):
        if self.resolution & (self.resolution - 1):
            raise DomainError("grid resolution must be a power of two")


def fourier_kernel_grid(kernel: Kernel, resolution: int) -> MultiplierGrid:
    """K_hat sampled on j/resolution via one FFT of the folded weights."""
    if resolution & (resolution - 1):
        raise DomainError("grid resolution must be a power of two")
    folded = np.bincount((kernel.sites % resolution).astype(np.int64),
                         weights=kernel.weights, minlength=resolution)
    vals = np.fft.ifft(folded) * resolution  # sum w e(+jk/G)
    return MultiplierGrid(resolution=resolution, values=vals)


_MBETA_CACHE: dict[tuple[int, float], np.ndarray] = {}


def fourier_M_beta(N: int, beta: float, theta: float | np.ndarray):
    """M_hat^beta_N(theta).  Closed geometric form for beta = 1, direct sum else."""
    tv = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    if N == 0:
        out = np.zeros(tv.shape, dtype=np.complex128)
    elif beta == 1.0:
        d = tv - np.round(tv)
        out = np.empty(tv.shape, dtype=np.complex128)
        zero = d == 0.0
        nz = ~zero
        dn = d[nz]
        out[zero] = 1.0
        out[nz] = (np.exp(1j * np.pi * dn * (N + 1))
                   * np.sin(np.pi * N * dn) / (N * np.sin(np.pi * dn)))
    else:
        key = (N, beta)
        w = _MBETA_CACHE.get(key)
        if w is None:
            n = np.arange(1, N + 1, dtype=np.float64)
            w = (n ** beta - (n - 1) ** beta) / (beta * N)
            if N <= (1 << 20) and len(_MBETA_CACHE) < 8:
                _MBETA_CACHE[key] = w
        out = np.zeros(tv.shape, dtype=np.complex128)
        step = max(1, (1 << 22) // max(tv.size, 1))
        n_all = np.arange(1, N + 1, dtype=np.float64)
        for lo in range(0, N, step):
            out += (w[lo:lo + step][None, :]
                    * np.exp(2j * np.pi * np.outer(tv, n_all[lo:lo + step]))).sum(axis=1)
    if np.ndim(theta) == 0:
        return complex(out[0])
    return out


def prime_multiplier(N: int, xi: float | np.ndarray, table: PrimeTable):
    """m_N(xi) = (1/theta(N)) sum_{p <= N} e(xi p) log p, summed directly."""
    if N < 2:
        raise DomainError("m_N needs N >= 2")
    k = prime_kernel(N, table, weighted=True)
    return fourier_kernel(k, xi)


def prime_multiplier_grid(N: int, resolution: int, table: PrimeTable) -> MultiplierGrid:
    """m_N sampled at j/resolution through one FFT of the folded log weights."""
    if N < 2:
        raise DomainError("m_N needs N >= 2")
    return fourier_kernel_grid(prime_kernel(N, table, weighted=True), resolution)


# --- the smooth plateau cutoff ---

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)
_ETA_PANELS = 4


def _bump_raw(u: np.ndarray) -> np.ndarray:
    """Unnormalized C-infinity bump supported on [-1/8, 1/8]."""
    v = 8.0 * u
    out = np.zeros_like(v)
    inside = np.abs(v) < 1.0
    vi = v[inside]
    out[inside] = np.exp(-1.0 / (1.0 - vi * vi))
    return out


@lru_cache(maxsize=1)
def _bump_norm() -> float:
    total = 0.0
    edges = np.linspace(-0.125, 0.125, 17)
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        total += half * float(_GL_WEIGHTS @ _bump_raw(mid + half * _GL_NODES))
    return total


def _bump_integral(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Integral of the normalized bump over [lo, hi] (cached fixed-order rule)."""
    out = np.zeros(lo.shape)
    width = hi - lo
    pos = np.flatnonzero(width > 0)
    norm = _bump_norm()
    for start in range(0, pos.size, 1 << 16):
        sel = pos[start:start + (1 << 16)]
        lo_p, w_p = lo[sel], width[sel]
        acc = np.zeros(lo_p.shape)
        for p in range(_ETA_PANELS):
            a = lo_p + w_p * (p / _ETA_PANELS)
            half = w_p / (2 * _ETA_PANELS)
            mid = a + half
            nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
            acc += half * (_bump_raw(nodes) @ _GL_WEIGHTS)
        out[sel] = acc / norm
    return out


def eta(xi: float | np.ndarray):
    """Smooth plateau cutoff: 1 on |xi| <= 1/4, 0 on |xi| >= 1/2, else in (0, 1).

    Realized as the indicator of [-3/8, 3/8] convolved with a normalized
    C-infinity bump supported on [-1/8, 1/8]; the convolution integral is
    evaluated with a fixed-order Gauss-Legendre rule on cached nodes.  eta is
    even and exactly 0/1 off the transition bands.
    """
    xv = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    a = np.abs(xv)
    out = np.zeros(a.shape)
    out[a <= 0.25] = 1.0
    band = (a > 0.25) & (a < 0.5)
    if band.any():
        ab = a[band]
        # the quadrature can overshoot 1 by an ulp; eta is exactly in [0, 1]
        out[band] = np.clip(_bump_integral(ab - 0.375, np.full(ab.shape, 0.125)), 0.0, 1.0)
    if np.ndim(xi) == 0:
        return float(out[0])
    return out


def eta_s(s: int, xi: float | np.ndarray):
    """eta_s(xi) = eta(2^(4s) xi): support shrinks to |xi| < 2^(-4s-1)."""
    if s < 0:
        raise DomainError("level s must be >= 0")
    return eta(np.asarray(xi, dtype=np.float64) * float(2 ** (4 * s)))


def eta_support_radius(s: int) -> float:
    return 0.5 * 2.0 ** (-4 * s)


# --- arcs and approximants ---


@dataclass(frozen=True)
class RationalPoint:
    """A reduced rational a/q in (0, 1], tagged with its level s."""

    a: int
    q: int
    s: int

    @property
    def value(self) -> float:
        return self.a / self.q


def arc_admissible(q: int) -> bool:
    """Denominators kept by the arc family: square-free, or 4 * square-free."""
    return is_squarefree(q) or (q % 4 == 0 and is_squarefree(q // 4))


@lru_cache(maxsize=64)
def enumerate_arcs(s: int) -> tuple[RationalPoint, ...]:
    """Level-s arcs: reduced a/q with 2^s <= q < 2^(s+1) and admissible q.

    Level 0 is the single point 1/1.  The count is below 2^(2(s+1)).
    """
    if s < 0:
        raise DomainError("level s must be >= 0")
    if s == 0:
        return (RationalPoint(a=1, q=1, s=0),)
    out = []
    for q in range(1 << s, 1 << (s + 1)):
        if not arc_admissible(q):
            continue
        for a in range(1, q + 1):
            if math.gcd(a, q) == 1:
                out.append(RationalPoint(a=a, q=q, s=s))
    return tuple(out)


@dataclass(frozen=True)
class ApproximantSpec:
    """One local model L[a,q; N]: principal term plus optional exceptional term."""

    a: int
    q: int
    N: int
    exceptional: tuple[DirichletCharacter, float] | None = None


def approximant_hat(spec: ApproximantSpec, theta: float | np.ndarray):
    """L_hat[a,q; N](theta) per the major-arc model."""
    g0 = gauss.ramanujan_gauss_principal(spec.q, spec.a)
    out = g0 * np.atleast_1d(fourier_M_beta(spec.N, 1.0, theta))
    if spec.exceptional is not None:
        chi, beta = spec.exceptional
        if chi.modulus != spec.q:
            raise DomainError("exceptional character modulus must match the arc")
        g1 = gauss.gauss_sum_bruteforce(chi, spec.a)
        out = out - g1 * np.atleast_1d(fourier_M_beta(spec.N, beta, theta))
    if np.ndim(theta) == 0:
        return complex(out[0])
    return out


Injection = dict[int, tuple[DirichletCharacter, float]]


def _arc_spec(arc: RationalPoint, N: int, injection: Injection | None) -> ApproximantSpec:
    exc = injection.get(arc.q) if injection else None
    return ApproximantSpec(a=arc.a, q=arc.q, N=N, exceptional=exc)


def _circular(theta: np.ndarray) -> np.ndarray:
    """Reduce to the fundamental window [-1/2, 1/2)."""
    return (theta + 0.5) % 1.0 - 0.5


def nu_n_s(n: int, s: int, xi: float | np.ndarray, injection: Injection | None = None):
    """nu_n^s(xi): the level-s layer of the glued approximant at scale 2^n.

    At most one arc contributes at any xi because the eta_s supports are
    disjoint within a level.
    """
    xv = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    out = np.zeros(xv.shape, dtype=np.complex128)
    radius = eta_support_radius(s)
    N = 1 << n
    for arc in enumerate_arcs(s):
        theta = _circular(xv - arc.value)
        mask = np.abs(theta) < radius
        if not mask.any():
            continue
        spec = _arc_spec(arc, N, injection)
        th = theta[mask]
        out[mask] += np.atleast_1d(approximant_hat(spec, th)) * eta_s(s, th)
    if np.ndim(xi) == 0:
        return complex(out[0])
    return out


def nu_n(n: int, xi: float | np.ndarray, s_max: int = DEFAULT_S_MAX,
         injection: Injection | None = None):
    """nu_n(xi) = sum of the level layers s = 0..s_max."""
    xv = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    out = np.zeros(xv.shape, dtype=np.complex128)
    for s in range(s_max + 1):
        out += np.atleast_1d(nu_n_s(n, s, xv, injection))
    if np.ndim(xi) == 0:
        return complex(out[0])
    return out


def _levels_for_t(t: float) -> int:
    """floor(sqrt(t)), guarded against float dust at perfect squares."""
    if t < 0:
        raise DomainError("t must be >= 0")
    s = int(math.sqrt(t))
    while (s + 1) * (s + 1) <= t:
        s += 1
    while s * s > t:
        s -= 1
    return s


def pi_n_t(n: int, t: float, xi: float | np.ndarray,
           injection: Injection | None = None):
    """Pi_n^t(xi): levels s <= sqrt(t) only.  Requires n >= t."""
    if n < t:
        raise DomainError("Pi_n^t needs n >= t")
    return nu_n(n, xi, s_max=_levels_for_t(t), injection=injection)


# --- grid sampling with per-arc windows ---

_ETA_WINDOW_CACHE: dict[tuple[int, int], list] = {}
_NU_GRID_CACHE: dict[tuple, np.ndarray] = {}


def _injection_key(injection: Injection | None):
    if not injection:
        return None
    return tuple(sorted((q, beta) for q, (_, beta) in injection.items()))


def _eta_windows(s: int, resolution: int) -> list:
    """Per-arc grid windows at level s: (arc, grid indices, theta, eta values)."""
    key = (s, resolution)
    got = _ETA_WINDOW_CACHE.get(key)
    if got is not None:
        return got
    out = []
    radius = eta_support_radius(s)
    G = resolution
    for arc in enumerate_arcs(s):
        c = arc.a / arc.q
        j_lo = math.floor((c - radius) * G) + 1
        j_hi = math.ceil((c + radius) * G) - 1
        if j_hi < j_lo:
            continue
        j = np.arange(j_lo, j_hi + 1, dtype=np.int64)
        theta = j / G - c
        keep = np.abs(theta) < radius
        j, theta = j[keep], theta[keep]
        if j.size == 0:
            continue
        ev = eta_s(s, theta)
        nz = ev > 0.0
        if not nz.any():
            continue
        out.append((arc, np.mod(j[nz], G), theta[nz], ev[nz]))
    _ETA_WINDOW_CACHE[key] = out
    return out


def nu_n_s_grid(n: int, s: int, resolution: int,
                injection: Injection | None = None) -> np.ndarray:
    """nu_n^s sampled at j/resolution, assembled from the per-arc windows."""
    key = (n, s, resolution, _injection_key(injection))
    got = _NU_GRID_CACHE.get(key)
    if got is not None:
        return got
    out = np.zeros(resolution, dtype=np.complex128)
    N = 1 << n
    for arc, idx, theta, ev in _eta_windows(s, resolution):
        spec = _arc_spec(arc, N, injection)
        # indices within one arc window are distinct mod the resolution
        out[idx] += np.atleast_1d(approximant_hat(spec, theta)) * ev
    if resolution <= (1 << 18) and len(_NU_GRID_CACHE) < 512:
        _NU_GRID_CACHE[key] = out
    return out


def nu_n_grid(n: int, resolution: int, s_max: int = DEFAULT_S_MAX,
              injection: Injection | None = None) -> np.ndarray:
    out = np.zeros(resolution, dtype=np.complex128)
    for s in range(s_max + 1):
        out = out + nu_n_s_grid(n, s, resolution, injection)
    return out


def pi_n_t_grid(n: int, t: float, resolution: int,
                injection: Injection | None = None) -> np.ndarray:
    if n < t:
        raise DomainError("Pi_n^t needs n >= t")
    return nu_n_grid(n, resolution, s_max=_levels_for_t(t), injection=injection)


def clear_caches() -> None:
    """Drop the memoized arc windows and grid layers (mainly for tests)."""
    _ETA_WINDOW_CACHE.clear()
    _NU_GRID_CACHE.clear()
    _MBETA_CACHE.clear()


# --- error reports ---


def approximation_error(n: int, resolution: int, table: PrimeTable,
                        s_max: int = DEFAULT_S_MAX,
                        injection: Injection | None = None) -> float:
    """E(n) = max over the grid of |m_{2^n} - nu_n|.

    The resolution must be a power of two, at least 2^(n/2); the theory makes
    E(n) decay like exp(-c sqrt(n)), which the acceptance suite checks as a
    trend E(n+4) < E(n).
    """
    if resolution & (resolution - 1):
        raise DomainError("grid resolution must be a power of two")
    if resolution < 2 ** (n / 2):
        raise DomainError("grid resolution must be at least 2^(n/2)")
    m = prime_multiplier_grid(1 << n, resolution, table).values
    nu = nu_n_grid(n, resolution, s_max=s_max, injection=injection)
    return float(np.max(np.abs(m - nu)))


def major_arc_error(N: int, Q: float, a: int, q: int, xi: float,
                    table: PrimeTable) -> float:
    """|m_N(xi) - L_hat[a,q; N](xi - a/q)| under the major-arc constraints.

    Requires q <= Q, gcd(a, q) = 1, and |xi - a/q| <= Q/N.
    """
    if q > Q:
        raise DomainError("major arc needs q <= Q")
    if math.gcd(a, q) != 1:
        raise DomainError("a/q must be reduced")
    theta = float(_circular(np.array([xi - a / q]))[0])
    if abs(theta) > Q / N:
        raise DomainError("xi must satisfy |xi - a/q| <= Q/N")
    spec = ApproximantSpec(a=a, q=q, N=N)
    return abs(complex(prime_multiplier(N, xi, table)) - complex(approximant_hat(spec, theta)))


def partial_summation_bracket(N: int, table: PrimeTable) -> float:
    """theta(N)/log N + sum_{n=2}^{N-1} theta(n) (1/log n - 1/log(n+1)).

    Equals pi(N) exactly; the float evaluation is an identity check.
    """
    if N < 2:
        raise DomainError("the bracket needs N >= 2")
    n = np.arange(2, N, dtype=np.float64)
    p = table.primes_upto(N)
    logp = np.log(p.astype(np.float64))
    theta_cum = np.cumsum(logp)
    # theta(n) for n = 2..N-1 via searchsorted on the prime list
    k = np.searchsorted(p, np.arange(2, N), side="right")
    theta_n = np.where(k > 0, theta_cum[np.maximum(k - 1, 0)], 0.0)
    inner = theta_n * (1.0 / np.log(n) - 1.0 / np.log(n + 1.0))
    return float(table.theta(N) / math.log(N) + inner.sum())


def bound_ratio_checks(resolution: int = 1 << 12,
                       n_range: tuple[int, int] = (6, 14),
                       betas: tuple[float, ...] = (0.5, 0.75, 0.9, 0.95),
                       q_max: int = 100) -> dict:
    """Measured suprema of |LHS|/RHS for the kernel and Gauss bounds.

    Returns the observed sup for each of: the two-sided M_hat bound
    (min{(N|xi|)^-1, N|xi|}), the one-sided M_hat^beta bound ((N|xi|)^-1),
    the dyadic-difference bound (min pair + (1-beta) N^(beta-1)), and the
    Gauss modulus bound (sqrt(q0)/phi(q)).  The values are measured on fixed
    grids and frozen into a fixture by the test suite.
    """
    from .characters import enumerate_quadratic_characters

    G = resolution
    j = np.arange(1, G)
    xi = np.minimum(j, G - j) / G  # circular |xi|, nonzero
    sup_two_sided = 0.0
    sup_one_sided = 0.0
    sup_dyadic = 0.0
    rows = []
    for n in range(n_range[0], n_range[1] + 1, 2):
        N = 1 << n
        mhat = np.abs(fourier_M_beta(N, 1.0, j / G))
        rhs = np.minimum(1.0 / (N * xi), N * xi)
        r = float(np.max(mhat / rhs))
        rows.append({"check": "two-sided", "n": n, "sup": r})
        sup_two_sided = max(sup_two_sided, r)
    for beta in betas:
        for n in range(n_range[0], min(n_range[1], 12) + 1, 3):
            N = 1 << n
            mb = np.abs(fourier_M_beta(N, beta, j / G))
            r = float(np.max(mb * (N * xi)))
            rows.append({"check": "one-sided", "beta": beta, "n": n, "sup": r})
            sup_one_sided = max(sup_one_sided, r)
            mb2 = np.abs(np.asarray(fourier_M_beta(2 * N, beta, j / G))
                         - np.asarray(fourier_M_beta(N, beta, j / G)))
            rhs = np.minimum(1.0 / (N * xi), N * xi) + (1.0 - beta) * N ** (beta - 1.0)
            r = float(np.max(mb2 / rhs))
            rows.append({"check": "dyadic-difference", "beta": beta, "n": n, "sup": r})
            sup_dyadic = max(sup_dyadic, r)
    sup_gauss = 0.0
    for q in range(3, q_max + 1):
        for chi in enumerate_quadratic_characters(q):
            sup_gauss = max(sup_gauss, gauss.gauss_bound_ratio(chi))
    return {
        "two_sided_sup": sup_two_sided,
        "one_sided_sup": sup_one_sided,
        "dyadic_difference_sup": sup_dyadic,
        "gauss_modulus_sup": sup_gauss,
        "rows": rows,
    }
