"""Concrete ergodic systems, prime-orbit averages, and transference checks.

Two measure-preserving systems are provided: the circle rotation
T x = x + alpha mod 1 under Lebesgue measure, and the cyclic shift
T x = x + 1 mod m under counting measure.  The prime orbit average is

    A_N f(x) = (1/pi(N)) * sum over primes p <= N of f(T^p x).

Rotations store alpha as an exact rational convergent num/den of its
continued fraction with den in [2^33, 2^38) when one exists, so T^k x is
computed in exact int64 arithmetic: the approximant error is below 2^-66
per step, hence below 1e-9 accumulated over orbits of length up to 2^24,
and no floating drift accrues at all.

transference_sample realizes the sampling argument that moves maximal
inequalities from the integers to the dynamical system: with
F = {0 <= n <= R : T^n x in A}, the orbit average of 1_A at T^n x equals
the integer average of 1_F at n for all n <= R - L and N <= L.  Both sides
are computed by different routes in integer arithmetic (orbit shift
accumulation vs signal convolution), so the comparison is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .ntheory import DomainError, PrimeTable

_DEN_MIN = 1 << 33
_DEN_MAX = 1 << 38
_ORBIT_CAP = 1 << 25


def _convergent_in_range(cf: list[int], terminated: bool) -> tuple[int, int]:
    """num/den from the continued fraction [0; a1, a2, ...] with den targeted
    to [2^33, 2^38).

    A terminating expansion whose final denominator is smaller is used
    exactly.  If one partial quotient jumps the denominator past the upper
    bound, the last convergent below it is kept; its error is still below
    1/(den * 2^38).
    """
    h_prev, h = 1, 0
    k_prev, k = 0, 1
    for a in cf:
        h_next = a * h + h_prev
        k_next = a * k + k_prev
        if k_next >= _DEN_MAX:
            break
        h_prev, h = h, h_next
        k_prev, k = k, k_next
        if k >= _DEN_MIN:
            return h, k
    if terminated or k >= _DEN_MIN:
        return h, k
    return h, k


def _cf_of_fraction(x: Fraction) -> list[int]:
    out = []
    p, q = x.numerator, x.denominator
    while q:
        a, r = divmod(p, q)
        out.append(a)
        p, q = q, r
    return out[1:]  # drop a0 = 0 for x in [0, 1)


@dataclass(frozen=True)
class DynamicalSystem:
    """A circle rotation (kind='rotation') or cyclic shift (kind='shift').

    Rotations act on [0, 1) with alpha = num/den exactly; shifts act on
    residues mod `modulus`.
    """

    kind: str
    num: int = 0
    den: int = 1
    modulus: int = 0

    @classmethod
    def rotation(cls, alpha, cf_depth: int | None = None) -> "DynamicalSystem":
        """Rotation by alpha in [0, 1); 'golden' and 'silver' name the two
        quadratic irrationals (sqrt(5)-1)/2 and sqrt(2)-1, whose continued
        fractions are all 1s and all 2s.  cf_depth caps the number of
        partial quotients kept before the convergent is chosen."""
        if alpha == "golden":
            cf, term = [1] * 64, False
        elif alpha == "silver":
            cf, term = [2] * 48, False
        else:
            a = float(alpha)
            if not 0.0 <= a < 1.0:
                raise DomainError("rotation angle must lie in [0, 1)")
            if a == 0.0:
                return cls(kind="rotation", num=0, den=1)
            frac = Fraction(a)
            cf, term = _cf_of_fraction(frac), True
        if cf_depth is not None:
            if cf_depth < 1:
                raise DomainError("cf_depth must be positive")
            cf, term = cf[:cf_depth], True
        num, den = _convergent_in_range(cf, term)
        return cls(kind="rotation", num=num, den=den)

    @classmethod
    def shift(cls, m: int) -> "DynamicalSystem":
        if m < 1:
            raise DomainError("cyclic shift needs a positive modulus")
        return cls(kind="shift", modulus=m)

    @property
    def alpha(self) -> float:
        if self.kind != "rotation":
            raise DomainError("alpha is only defined for rotations")
        return self.num / self.den

    def orbit_positions(self, x0, ks: np.ndarray) -> np.ndarray:
        """T^k x0 for each k in ks; floats in [0,1) for rotations, int
        residues for shifts.  k is capped at 2^25 to keep the rotation's
        integer arithmetic inside int64."""
        ks = np.asarray(ks, dtype=np.int64)
        if ks.size and (ks.min() < 0 or ks.max() >= _ORBIT_CAP):
            raise DomainError("orbit indices must lie in [0, 2^25)")
        if self.kind == "shift":
            return np.mod(int(x0) + ks, self.modulus)
        # k * alpha mod 1 in exact integer arithmetic; x0 enters once, as a
        # float, so rational alphas (including the identity) keep it intact.
        rot = np.mod(ks * self.num, self.den).astype(np.float64) / self.den
        return np.mod(float(x0) % 1.0 + rot, 1.0)


def interval_indicator(a: float, b: float):
    """1_{[a,b)} on the circle, wrapping when a > b."""
    if a <= b:
        return lambda x: ((np.asarray(x) >= a) & (np.asarray(x) < b)).astype(np.float64)
    return lambda x: ((np.asarray(x) >= a) | (np.asarray(x) < b)).astype(np.float64)


def orbit_average(system: DynamicalSystem, f, x0, N: int, table: PrimeTable):
    """A_N f(x0) = (1/pi(N)) sum over primes p <= N of f(T^p x0)."""
    if N < 2:
        raise DomainError("prime averages need N >= 2")
    ps = table.primes_upto(N)
    vals = np.asarray(f(system.orbit_positions(x0, ps)))
    out = vals.mean()
    return complex(out) if np.iscomplexobj(vals) else float(out)


@dataclass(frozen=True)
class OrbitAverageTrace:
    """A_{2^n} f(x0) across dyadic scales, with convergence columns.

    diffs[i] = |values[i] - values[i-1]| (nan at i = 0); distances holds
    |values - reference| when a candidate limit is supplied.
    """

    scales: np.ndarray
    values: np.ndarray
    diffs: np.ndarray
    reference: complex | float | None
    distances: np.ndarray | None


def convergence_diagnostic(system: DynamicalSystem, f, x0, n_max: int,
                           table: PrimeTable, reference=None) -> OrbitAverageTrace:
    """Trace of A_{2^n} f(x0) for n = 1..n_max (n_max <= 24).

    One orbit enumeration serves every scale: cumulative sums are cut at
    the prime-counting boundaries pi(2^n).
    """
    if not 1 <= n_max <= 24:
        raise DomainError("n_max must lie in [1, 24]")
    ps = table.primes_upto(1 << n_max)
    vals = np.asarray(f(system.orbit_positions(x0, ps)))
    real_obs = not np.iscomplexobj(vals)
    csum = np.cumsum(vals.astype(np.complex128))
    scales = np.asarray([1 << n for n in range(1, n_max + 1)], dtype=np.int64)
    counts = np.asarray([table.count(int(N)) for N in scales], dtype=np.int64)
    averages = csum[counts - 1] / counts
    if real_obs:
        averages = averages.real
    diffs = np.abs(np.diff(averages, prepend=averages[:1]))
    diffs[0] = np.nan
    dist = np.abs(averages - reference) if reference is not None else None
    return OrbitAverageTrace(scales=scales, values=averages, diffs=diffs,
                             reference=reference, distances=dist)


@dataclass(frozen=True)
class TransferenceResult:
    """Orbit-side vs integer-side maximal averages of an indicator.

    Row k of both count arrays is the superlevel count of
    sup over dyadic N <= L of A_N at level lambda_grid[k], over the window
    0 <= n <= R - L.  identity_discrepancy is the largest absolute
    difference between the two sides' integer prime-count sums; the
    transference identity makes it 0.
    """

    R: int
    L: int
    set_size: int
    scales: np.ndarray
    lambda_grid: np.ndarray
    orbit_counts: np.ndarray
    signal_counts: np.ndarray
    identity_discrepancy: int

    @property
    def counts_equal(self) -> bool:
        return bool(np.array_equal(self.orbit_counts, self.signal_counts))


def transference_sample(system: DynamicalSystem, indicator, x0, R: int, L: int,
                        table: PrimeTable,
                        lambda_grid: np.ndarray | None = None) -> TransferenceResult:
    """Sample F = {0 <= n <= R : T^n x0 in A} and compare maximal averages.

    The orbit side accumulates integer sums sum over p <= N of 1_A(T^(n+p) x0)
    by shifted-slice addition; the integer side convolves 1_F against the
    prime indicator (FFT, rounded back to exact integers).  The identity
    A_N(1_A)(T^n x0) = A_N(1_F)(n) for n <= R - L, N <= L makes the two
    integer arrays equal entry for entry, so superlevel counts agree exactly.
    """
    if not 2 <= L < R:
        raise DomainError("need 2 <= L < R")
    if lambda_grid is None:
        lambda_grid = np.asarray([0.75, 0.5, 0.25, 0.125])
    member = np.asarray(indicator(system.orbit_positions(x0, np.arange(R + 1))))
    if not np.all((member == 0) | (member == 1)):
        raise DomainError("indicator must take values in {0, 1}")
    member = member.astype(np.int64)
    W = R - L + 1
    n_top = int(math.log2(L))
    scales = np.asarray([1 << n for n in range(1, n_top + 1)], dtype=np.int64)

    # orbit side: shifted-slice accumulation, incremental across scales
    acc = np.zeros(W, dtype=np.int64)
    orbit_sums = np.zeros((scales.size, W), dtype=np.int64)
    prev = 0
    for i, N in enumerate(scales):
        for p in table.primes_upto(int(N))[prev:]:
            acc += member[int(p): int(p) + W]
        prev = table.count(int(N))
        orbit_sums[i] = acc

    # integer side: convolution of the sampled set against prime indicators
    Z = 1 << max(1, (R + 1 + int(scales[-1])).bit_length())
    fhat = np.fft.rfft(member.astype(np.float64), Z)
    signal_sums = np.zeros_like(orbit_sums)
    for i, N in enumerate(scales):
        dense = np.zeros(Z)
        dense[table.primes_upto(int(N))] = 1.0
        conv = np.fft.irfft(fhat * np.conj(np.fft.rfft(dense)), Z)
        signal_sums[i] = np.rint(conv[:W]).astype(np.int64)

    discrepancy = int(np.max(np.abs(orbit_sums - signal_sums)))
    counts = np.asarray([table.count(int(N)) for N in scales], dtype=np.int64)
    lam = np.asarray(lambda_grid, dtype=np.float64)

    def _superlevel(sums: np.ndarray) -> np.ndarray:
        maximal = np.max(sums / counts[:, None], axis=0)
        return np.asarray([(maximal > l).sum() for l in lam], dtype=np.int64)

    return TransferenceResult(
        R=R, L=L, set_size=int(member.sum()), scales=scales, lambda_grid=lam,
        orbit_counts=_superlevel(orbit_sums),
        signal_counts=_superlevel(signal_sums),
        identity_discrepancy=discrepancy)


def ks_uniform_distance(system: DynamicalSystem, x0, count: int) -> float:
    """Kolmogorov-Smirnov distance of {T^n x0 : n < count} from uniform."""
    if system.kind != "rotation":
        raise DomainError("uniformity check applies to rotations")
    pos = np.sort(system.orbit_positions(x0, np.arange(count)))
    i = np.arange(count, dtype=np.float64)
    return float(max(np.max((i + 1) / count - pos), np.max(pos - i / count)))
