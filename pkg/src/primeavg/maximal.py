"""Dyadic maximal operators over prime averages, and their measurements.

Signals are finitely supported functions on the integers, stored as an
offset plus a dense value array.  Averaging operators act by correlation,

    (K f)(x) = sum over sites of K.weights * f(x + site),

so that the Fourier multiplier of K is K_hat(xi) = sum w e(+ xi site),
matching the multipliers module.  The two averaging operators are

    A_N f(x) = (1/pi(N))    * sum over primes p <= N of f(x + p),
    M_N f(x) = (1/theta(N)) * sum over primes p <= N of f(x + p) log p,

and partial summation dominates |A_N f| pointwise by sup_N' |M_N' f|.

maximal_dyadic forms sup over n of |op_{2^n} f| for one of four families:
the prime averages ('averages', 'weighted'), the Cesaro kernels applied to
an eta_s-filtered signal ('mbeta-filtered'), the truncated glued multiplier
('pi'), and a single arc level of it ('nu-s').  Kernel families are computed
by zero-padded FFT correlation (next power of two at least support +
2^n_max, cross-validated against direct correlation); multiplier families
sample the multiplier on the same grid, which realizes the operator on a
circle of that circumference.

weak_type_sweep measures lambda * |{sup_n A_{2^n} 1_F > lambda}| normalized
by log^2(e/lambda) |F| on a geometric lambda grid.  weak_norm implements the
discrete weak-ell^1 norm max_k k * v_(k) over the sorted magnitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import multipliers as mult
from .multipliers import Injection, Kernel, prime_kernel
from .ntheory import DomainError, PrimeTable

# --- signals ---


@dataclass
class Signal:
    """A finitely supported function on Z: values[i] = f(offset + i)."""

    offset: int
    values: np.ndarray

    @classmethod
    def delta(cls, at: int = 0) -> "Signal":
        return cls(offset=at, values=np.array([1.0]))

    @classmethod
    def interval(cls, start: int, length: int) -> "Signal":
        return cls(offset=start, values=np.ones(length))

    @classmethod
    def indicator(cls, points: np.ndarray | list) -> "Signal":
        pts = np.asarray(sorted(set(int(p) for p in points)), dtype=np.int64)
        if pts.size == 0:
            return cls(offset=0, values=np.zeros(1))
        vals = np.zeros(int(pts[-1] - pts[0]) + 1)
        vals[pts - pts[0]] = 1.0
        return cls(offset=int(pts[0]), values=vals)

    @property
    def support_end(self) -> int:
        return self.offset + len(self.values)

    def lp_norm(self, p: float) -> float:
        return float(np.sum(np.abs(self.values) ** p) ** (1.0 / p))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def mass(self) -> float:
        return float(np.sum(self.values).real)

    def at(self, x: int | np.ndarray):
        """f(x) with zero extension outside the stored window."""
        xi = np.atleast_1d(np.asarray(x, dtype=np.int64)) - self.offset
        ok = (xi >= 0) & (xi < len(self.values))
        out = np.zeros(xi.shape, dtype=self.values.dtype)
        out[ok] = self.values[xi[ok]]
        return out[0] if np.ndim(x) == 0 else out


def signal_sub(a: Signal, b: Signal) -> Signal:
    lo = min(a.offset, b.offset)
    hi = max(a.support_end, b.support_end)
    out = np.zeros(hi - lo, dtype=np.result_type(a.values, b.values))
    out[a.offset - lo: a.offset - lo + len(a.values)] += a.values
    out[b.offset - lo: b.offset - lo + len(b.values)] -= b.values
    return Signal(offset=lo, values=out)


def random_signal(rng: np.random.Generator, length: int, complex_values: bool = True,
                  offset: int = 0, unit_l2: bool = True) -> Signal:
    v = rng.standard_normal(length)
    if complex_values:
        v = v + 1j * rng.standard_normal(length)
    if unit_l2:
        v = v / np.linalg.norm(v)
    return Signal(offset=offset, values=v)


# --- kernel application: direct and FFT correlation ---


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def apply_kernel(kernel: Kernel, f: Signal, method: str = "auto") -> Signal:
    """Correlate: out(x) = sum_sites w * f(x + site).

    Output support is [f.offset - max_site, f.offset + len - 1].  The FFT
    path zero-pads to the next power of two >= support + max_site + 1; the
    direct path is exact summation.  Both agree to ~1e-10 on unit-scale data
    and either can be forced for cross-validation.
    """
    if method not in ("auto", "direct", "fft"):
        raise DomainError("method must be auto, direct, or fft")
    smax = kernel.max_site
    if kernel.sites.size == 0:
        return Signal(offset=f.offset, values=np.zeros_like(f.values))
    dense = np.zeros(smax + 1)
    dense[kernel.sites] = kernel.weights
    if method == "direct" or (method == "auto" and smax < (1 << 14)):
        out = np.convolve(f.values, dense[::-1], mode="full")
    else:
        L = len(f.values) + smax + 1
        Z = _next_pow2(L)
        if np.iscomplexobj(f.values):
            out = np.fft.ifft(np.fft.fft(f.values, Z) * np.fft.fft(dense[::-1], Z))
        else:
            out = np.fft.irfft(np.fft.rfft(f.values, Z) * np.fft.rfft(dense[::-1], Z), Z)
        out = out[: len(f.values) + smax]
    return Signal(offset=f.offset - smax, values=out)


def average_primes(N: int, f: Signal, table: PrimeTable, method: str = "auto") -> Signal:
    """A_N f: the unweighted prime average, weights 1/pi(N)."""
    return apply_kernel(prime_kernel(N, table, weighted=False), f, method)


def average_primes_weighted(N: int, f: Signal, table: PrimeTable,
                            method: str = "auto") -> Signal:
    """M_N f: the log-weighted prime average, weights log p / theta(N)."""
    return apply_kernel(prime_kernel(N, table, weighted=True), f, method)


def prime_average_all_scales(f: Signal, N_max: int, table: PrimeTable,
                             weighted: bool) -> tuple[int, np.ndarray, np.ndarray]:
    """All scales N in [2, N_max] at once, via cumulative sums over the primes.

    Returns (offset, Ns, matrix): row k of the matrix is op_{N} f on the
    common window for N = Ns[k]; between consecutive primes the operator is
    constant, so Ns lists one N per prime count.  Exact direct summation.
    """
    p = table.primes_upto(N_max)
    if p.size == 0:
        raise DomainError("N_max below the first prime")
    L = len(f.values) + int(p[-1])
    acc = np.zeros(L, dtype=np.result_type(f.values, np.float64))
    rows = np.zeros((p.size, L), dtype=acc.dtype)
    w = np.log(p.astype(np.float64)) if weighted else np.ones(p.size)
    norm = np.cumsum(w)
    for k, (pk, wk) in enumerate(zip(p, w)):
        sl = acc[int(p[-1]) - int(pk): int(p[-1]) - int(pk) + len(f.values)]
        sl += wk * f.values
        rows[k] = acc / norm[k]
    return f.offset - int(p[-1]), p.astype(np.int64), rows


# --- dyadic maximal functions ---


def _grid_size(f: Signal, reach: int, floor: int = 0) -> int:
    return max(_next_pow2(len(f.values) + reach + 1), floor)


def _embed(f: Signal, Z: int, pad: int) -> np.ndarray:
    if len(f.values) + pad > Z:
        raise DomainError("grid too small for the signal and kernel reach")
    arr = np.zeros(Z, dtype=np.complex128 if np.iscomplexobj(f.values) else np.float64)
    arr[pad: pad + len(f.values)] = f.values
    return arr


def _apply_multiplier_circular(arr: np.ndarray, mult_values: np.ndarray) -> np.ndarray:
    """out = F^{-1}(mult * arr_hat) on the circle of length len(arr).

    The multiplier values sample m(j/Z) with the e(+) convention, so the
    operation is circular correlation against the kernel of m.  A real input
    with a Hermitian multiplier (m(-xi) = conj m(xi), true for all kernels
    here) goes through rfft.
    """
    Z = arr.size
    if np.iscomplexobj(arr):
        return np.fft.ifft(np.fft.fft(arr) * mult_values)
    return np.fft.irfft(np.fft.rfft(arr) * mult_values[: Z // 2 + 1], Z)


def maximal_dyadic(f: Signal, family: str, n_max: int, table: PrimeTable | None = None,
                   *, beta: float | None = None, s: int | None = None,
                   t: float | None = None, injection: Injection | None = None,
                   resolution: int | None = None) -> Signal:
    """sup over n of |op_{2^n} f| for one operator family.

    family:
      'averages'       A_{2^n}, n = 1..n_max (needs table)
      'weighted'       M_{2^n}, n = 1..n_max (needs table)
      'mbeta-filtered' M^beta_{2^n} applied to F^{-1}(eta_s f_hat), n = 0..n_max
                       (needs beta, s)
      'pi'             F^{-1}(Pi_n^t f_hat), n = ceil(t)..n_max (needs t)
      'nu-s'           F^{-1}(nu_n^s f_hat), n = 0..n_max (needs s)

    Kernel families return the exact maximal function on the support of the
    outputs.  Multiplier families realize the operators on a circle of
    power-of-two circumference >= support + 2^n_max (or `resolution`), and
    return the full circular window.
    """
    reach = 1 << n_max
    if family in ("averages", "weighted"):
        if table is None:
            raise DomainError("prime averaging families need a sieve table")
        Z = _grid_size(f, reach)
        pad = reach
        arr = _embed(f, Z, pad)
        real_in = not np.iscomplexobj(arr)
        fhat = np.fft.rfft(arr) if real_in else np.fft.fft(arr)
        run = None
        for n in range(1, n_max + 1):
            k = prime_kernel(1 << n, table, weighted=(family == "weighted"))
            dense = np.zeros(Z)
            dense[k.sites] = k.weights
            if real_in:
                out = np.fft.irfft(fhat * np.conj(np.fft.rfft(dense)), Z)
            else:
                out = np.fft.ifft(fhat * np.conj(np.fft.fft(dense)))
            out = np.abs(out)
            run = out if run is None else np.maximum(run, out)
        vals = run[: pad + len(f.values)]
        return Signal(offset=f.offset - pad, values=vals)

    if family == "mbeta-filtered":
        if beta is None or s is None:
            raise DomainError("mbeta-filtered needs beta and s")
        Z = resolution or _grid_size(f, reach, floor=1 << 14)
        arr = _embed(f, Z, reach if len(f.values) + reach <= Z else 0)
        eta_grid = mult.eta_s(s, _signed_frequencies(Z))
        filtered = _apply_multiplier_circular(arr, eta_grid.astype(np.complex128))
        run = None
        for n in range(0, n_max + 1):
            mg = _mbeta_multiplier_grid(1 << n, beta, Z)
            out = np.abs(_apply_multiplier_circular(filtered, mg))
            run = out if run is None else np.maximum(run, out)
        return Signal(offset=f.offset - (reach if len(f.values) + reach <= Z else 0),
                      values=run)

    if family in ("pi", "nu-s"):
        if family == "pi" and t is None:
            raise DomainError("pi family needs t")
        if family == "nu-s" and s is None:
            raise DomainError("nu-s family needs s")
        Z = resolution or _grid_size(f, reach, floor=1 << 14)
        pad = reach if len(f.values) + reach <= Z else 0
        arr = _embed(f, Z, pad).astype(np.complex128)
        fhat = np.fft.fft(arr)
        run = None
        n_lo = max(0, math.ceil(t)) if family == "pi" else 0
        for n in range(n_lo, n_max + 1):
            if family == "pi":
                mg = mult.pi_n_t_grid(n, t, Z, injection)
            else:
                mg = mult.nu_n_s_grid(n, s, Z, injection)
            out = np.abs(np.fft.ifft(fhat * mg))
            run = out if run is None else np.maximum(run, out)
        if run is None:
            run = np.zeros(Z)
        return Signal(offset=f.offset - pad, values=run)

    raise DomainError(f"unknown family: {family}")


def _signed_frequencies(Z: int) -> np.ndarray:
    """j/Z reduced to [-1/2, 1/2) in FFT index order."""
    j = np.arange(Z, dtype=np.float64) / Z
    return (j + 0.5) % 1.0 - 0.5


def _mbeta_multiplier_grid(N: int, beta: float, Z: int) -> np.ndarray:
    if beta == 1.0 or N == 0:
        return np.asarray(mult.fourier_M_beta(N, beta, np.arange(Z, dtype=np.float64) / Z),
                          dtype=np.complex128)
    return mult.fourier_kernel_grid(mult.kernel_M_beta(N, beta), Z).values


# --- distribution, weak norms, sweeps ---


def distribution_count(g: Signal, lam: float) -> int:
    """#{x : |g(x)| > lam} (strict)."""
    return int(np.count_nonzero(np.abs(g.values) > lam))


def weak_norm(g: Signal | np.ndarray) -> float:
    """Discrete weak-ell^1 norm: max over k >= 1 of k * v_k, v sorted descending.

    Equals sup over lam of lam * #{|g| >= lam}.
    """
    v = np.abs(g.values if isinstance(g, Signal) else np.asarray(g))
    v = np.sort(v.ravel())[::-1]
    if v.size == 0:
        return 0.0
    return float(np.max(v * np.arange(1, v.size + 1)))


def default_lambda_grid(j_max: int = 10) -> np.ndarray:
    """Geometric lambda grid 2^-1, ..., 2^-j_max (decreasing)."""
    return 0.5 ** np.arange(1, j_max + 1)


@dataclass(frozen=True)
class WeakTypeReport:
    """Superlevel counts of sup_n A_{2^n} 1_F on a lambda grid.

    normalized[i] = lambda_i * counts[i] / (log^2(e/lambda_i) * |F|); the
    weak-type L log^2 L bound predicts these stay bounded.
    """

    lambda_grid: np.ndarray
    counts: np.ndarray
    normalized: np.ndarray
    set_size: float
    n_max: int

    @property
    def max_normalized(self) -> float:
        return float(np.max(self.normalized))


def weak_type_sweep(F: Signal, lambda_grid: np.ndarray, n_max: int,
                    table: PrimeTable) -> WeakTypeReport:
    """Counts |{sup_{n <= n_max} A_{2^n} 1_F > lambda}| over the lambda grid.

    F must be a 0/1 indicator signal.  Counts are nonincreasing in lambda
    and zero for lambda >= 1.
    """
    vals = np.asarray(F.values)
    if not np.all((vals == 0) | (vals == 1)):
        raise DomainError("weak_type_sweep expects a 0/1 indicator signal")
    size = float(vals.sum())
    if size == 0:
        raise DomainError("weak_type_sweep needs a nonempty set")
    lam = np.asarray(lambda_grid, dtype=np.float64)
    if np.any(lam <= 0) or np.any(lam >= 1):
        raise DomainError("lambda grid must lie in (0, 1)")
    g = maximal_dyadic(F, "averages", n_max, table)
    absg = np.abs(g.values)
    counts = np.array([(absg > l).sum() for l in lam], dtype=np.int64)
    normalized = lam * counts / (np.log(np.e / lam) ** 2 * size)
    return WeakTypeReport(lambda_grid=lam, counts=counts, normalized=normalized,
                          set_size=size, n_max=n_max)


# --- residue classes, arc decay, A/B split, ell^p ratios ---


def residue_equidistribution(f: Signal, Q: int, r: int, s: int, beta: float,
                             n_max: int, table: PrimeTable | None = None,
                             resolution: int | None = None) -> dict:
    """Weak norm of sup_n |M^beta_{2^n} (eta_s-filtered f)| along Qx + r.

    Requires Q <= 2^(2s).  Returns the weak norm, the ell^1 norm of the
    filtered signal on the same residue class, and their ratio; the
    equidistribution bound predicts the ratio stays of size ~1/Q uniformly
    in r.
    """
    if Q < 1 or Q > 4 ** s:
        raise DomainError("residue sampling needs 1 <= Q <= 2^(2s)")
    if not 1 <= r <= Q:
        raise DomainError("residue r must lie in [1, Q]")
    g = maximal_dyadic(f, "mbeta-filtered", n_max, beta=beta, s=s,
                       resolution=resolution)
    # the filtered signal itself, for the comparison norm
    Z = g.values.size
    arr = _embed(f, Z, f.offset - g.offset)
    eta_grid = mult.eta_s(s, _signed_frequencies(Z))
    filtered = _apply_multiplier_circular(arr, eta_grid.astype(np.complex128))
    idx = np.arange(Z)
    cls = np.mod(g.offset + idx - r, Q) == 0
    weak = weak_norm(g.values[cls])
    l1 = float(np.sum(np.abs(filtered[cls])))
    return {"Q": Q, "r": r, "s": s, "beta": beta,
            "weak_norm": weak, "l1_norm": l1,
            "ratio": weak / l1 if l1 > 0 else math.inf}


def l2_arc_maximal_decay(s: int, f: Signal, n_max: int,
                         resolution: int | None = None,
                         injection: Injection | None = None) -> float:
    """|| sup_n |F^{-1}(nu_n^s f_hat)| ||_2 / ||f||_2 on the realization circle.

    The single-level maximal bound predicts decay ~2^(-s/2) in the level.
    """
    g = maximal_dyadic(f, "nu-s", n_max, s=s, injection=injection,
                       resolution=resolution)
    denom = f.lp_norm(2.0)
    return float(np.linalg.norm(g.values) / denom)


@dataclass(frozen=True)
class ABSplit:
    """The low/high frequency split at threshold t.

    For n >= t: A = F^{-1}(Pi_n^t f_hat) and B = M_{2^n} f - A, realized on a
    common grid.  For n < t: A = M_{2^n} f and B = 0.  A + B reconstructs
    M_{2^n} f exactly.
    """

    t: float

    def apply(self, n: int, f: Signal, table: PrimeTable,
              injection: Injection | None = None,
              resolution: int | None = None) -> tuple[Signal, Signal]:
        return ab_split_apply(self.t, n, f, table, injection=injection,
                              resolution=resolution)


def ab_split_apply(t: float, n: int, f: Signal, table: PrimeTable,
                   injection: Injection | None = None,
                   resolution: int | None = None) -> tuple[Signal, Signal]:
    """One scale of the A/B split; see ABSplit."""
    if n < t:
        a = average_primes_weighted(1 << n, f, table)
        return a, Signal(offset=a.offset, values=np.zeros_like(a.values))
    N = 1 << n
    Z = resolution or _grid_size(f, N)
    pad = N if len(f.values) + N <= Z else 0
    arr = _embed(f, Z, pad).astype(np.complex128)
    fhat = np.fft.fft(arr)
    pi_grid = mult.pi_n_t_grid(n, t, Z, injection)
    m_grid = mult.prime_multiplier_grid(N, Z, table).values
    a_vals = np.fft.ifft(fhat * pi_grid)
    b_vals = np.fft.ifft(fhat * (m_grid - pi_grid))
    off = f.offset - pad
    return Signal(offset=off, values=a_vals), Signal(offset=off, values=b_vals)


def b_part_maximal_l2(t: float, f: Signal, n_max: int, table: PrimeTable,
                      injection: Injection | None = None,
                      resolution: int | None = None) -> float:
    """|| sup_{t <= n <= n_max} |B_n^t f| ||_2 / ||f||_2 on the realization circle."""
    if math.ceil(t) > n_max:
        raise DomainError("b_part_maximal_l2 needs n_max >= t")
    N_max = 1 << n_max
    Z = resolution or _grid_size(f, N_max)
    pad = N_max if len(f.values) + N_max <= Z else 0
    arr = _embed(f, Z, pad).astype(np.complex128)
    fhat = np.fft.fft(arr)
    run = None
    for n in range(math.ceil(t), n_max + 1):
        pi_grid = mult.pi_n_t_grid(n, t, Z, injection)
        m_grid = mult.prime_multiplier_grid(1 << n, Z, table).values
        out = np.abs(np.fft.ifft(fhat * (m_grid - pi_grid)))
        run = out if run is None else np.maximum(run, out)
    return float(np.linalg.norm(run) / f.lp_norm(2.0))


def lp_maximal_ratio(f: Signal, p: float, n_max: int, table: PrimeTable) -> float:
    """|| sup_n |M_{2^n} f| ||_p / ||f||_p for p in (1, 2]."""
    if not 1.0 < p <= 2.0:
        raise DomainError("p must lie in (1, 2]")
    g = maximal_dyadic(f, "weighted", n_max, table)
    return float(g.lp_norm(p) / f.lp_norm(p))
