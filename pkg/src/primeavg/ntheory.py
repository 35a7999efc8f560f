"""Prime sieves, Chebyshev-type counting, and multiplicative functions.

Provides the bit-packed sieve of Eratosthenes with an optional disk cache,
prime counting pi(N) and the log-weighted count theta(N) = sum of log p over
primes p <= N (together with its restriction to arithmetic progressions),
the classical multiplicative functions (mobius, euler_phi, factorize,
is_squarefree), and the totient-weighted logarithmic sum phi_capital.

All logarithms are natural.
"""

from __future__ import annotations

import math
import os
import struct
import tempfile
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SIEVE_CAP = 1 << 30

_CACHE_ENV = "PRIMEAVG_CACHE_DIR"
_CACHE_MAGIC = b"PAVS"
_CACHE_VERSION = 2
_CACHE_HEADER = struct.Struct("<4sIQI")


class CapacityError(ValueError):
    """Raised when an argument exceeds a configured capacity cap."""


class DomainError(ValueError):
    """Raised when an argument is outside the documented domain."""


@dataclass
class PrimeTable:
    """Sieve output over [0, limit].

    Attributes:
        limit: Largest integer covered by the sieve.
        flags: Boolean array of length limit + 1; flags[n] is True iff n is
            prime.  Treated as immutable once built.
        prime_list: Ascending int64 array of the primes <= limit.
    """

    limit: int
    flags: np.ndarray
    prime_list: np.ndarray
    _log_primes: np.ndarray | None = field(default=None, repr=False)
    _theta_cum: np.ndarray | None = field(default=None, repr=False)

    def count(self, n: float) -> int:
        """Number of primes <= n."""
        if n > self.limit:
            raise CapacityError(f"count({n}) exceeds sieve limit {self.limit}")
        return int(np.searchsorted(self.prime_list, math.floor(n), side="right"))

    def log_primes(self) -> np.ndarray:
        """log p for each prime in prime_list, cached."""
        if self._log_primes is None:
            self._log_primes = np.log(self.prime_list.astype(np.float64))
        return self._log_primes

    def theta(self, x: float) -> float:
        """Chebyshev theta: sum of log p over primes p <= x."""
        if x > self.limit:
            raise CapacityError(f"theta({x}) exceeds sieve limit {self.limit}")
        if self._theta_cum is None:
            self._theta_cum = np.concatenate(([0.0], np.cumsum(self.log_primes())))
        k = np.searchsorted(self.prime_list, math.floor(x), side="right")
        return float(self._theta_cum[k])

    def primes_upto(self, n: float) -> np.ndarray:
        """View of prime_list restricted to primes <= n."""
        if n > self.limit:
            raise CapacityError(f"primes_upto({n}) exceeds sieve limit {self.limit}")
        k = np.searchsorted(self.prime_list, math.floor(n), side="right")
        return self.prime_list[:k]


_TABLES: dict[int, PrimeTable] = {}


def _cache_dir() -> Path | None:
    env = os.environ.get(_CACHE_ENV)
    if env:
        return Path(env)
    home = Path.home()
    if home.exists():
        return home / ".cache" / "primeavg"
    return None


def _cache_path(limit: int, cache_dir: Path | None) -> Path | None:
    base = cache_dir if cache_dir is not None else _cache_dir()
    if base is None:
        return None
    return base / f"sieve_{limit}.bits"


def _read_cache(path: Path, limit: int) -> np.ndarray | None:
    try:
        raw = path.read_bytes()
    except OSError:
        return None
    if len(raw) < _CACHE_HEADER.size:
        return None
    magic, version, lim, crc = _CACHE_HEADER.unpack_from(raw)
    if magic != _CACHE_MAGIC or version != _CACHE_VERSION or lim != limit:
        return None
    body = raw[_CACHE_HEADER.size:]
    if len(body) != (limit + 1 + 7) // 8 or zlib.crc32(body) != crc:
        return None
    packed = np.frombuffer(body, dtype=np.uint8)
    return np.unpackbits(packed, count=limit + 1).astype(bool)


def _write_cache(path: Path, limit: int, flags: np.ndarray) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        packed = np.packbits(flags.astype(np.uint8))
        body = packed.tobytes()
        payload = _CACHE_HEADER.pack(_CACHE_MAGIC, _CACHE_VERSION, limit,
                                     zlib.crc32(body))
        fd, tmp = tempfile.mkstemp(dir=str(path.parent), suffix=".tmp")
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
            fh.write(body)
        os.replace(tmp, path)
    except OSError:
        pass  # cache is best-effort; the in-memory table is authoritative


def sieve_primes(limit: int, cache_dir: str | Path | None = None,
                 use_disk: bool = True) -> PrimeTable:
    """Sieve of Eratosthenes over [0, limit], bit-packed on disk.

    Tables are memoized per limit within the process.  On disk the sieve is
    stored as a little-endian header (magic, version, limit) followed by the
    raw bitset; a file that fails any header check is regenerated.

    Args:
        limit: Inclusive sieve bound, 2 <= limit <= SIEVE_CAP.
        cache_dir: Overrides the cache directory (else PRIMEAVG_CACHE_DIR or
            ~/.cache/primeavg).
        use_disk: Disable to keep the table purely in memory.

    Returns:
        PrimeTable with flags and the ascending prime list.
    """
    if limit < 2:
        raise DomainError("sieve limit must be >= 2")
    if limit > SIEVE_CAP:
        raise CapacityError(f"sieve limit {limit} exceeds cap {SIEVE_CAP}")
    table = _TABLES.get(limit)
    if table is not None:
        return table

    flags = None
    path = _cache_path(limit, Path(cache_dir) if cache_dir else None) if use_disk else None
    if path is not None:
        flags = _read_cache(path, limit)
    fresh = flags is None
    if fresh:
        flags = np.ones(limit + 1, dtype=bool)
        flags[:2] = False
        for i in range(2, math.isqrt(limit) + 1):
            if flags[i]:
                flags[i * i:: i] = False
    primes = np.flatnonzero(flags).astype(np.int64)
    table = PrimeTable(limit=limit, flags=flags, prime_list=primes)
    _TABLES[limit] = table
    if fresh and path is not None:
        _write_cache(path, limit, flags)
    return table


def prime_count(n: float, table: PrimeTable) -> int:
    """pi(n): number of primes <= n."""
    return table.count(n)


def chebyshev_theta(x: float, table: PrimeTable) -> float:
    """theta(x) = sum_{p <= x} log p."""
    return table.theta(x)


def chebyshev_theta_progression(x: float, q: int, r: int, table: PrimeTable) -> float:
    """theta(x; q, r) = sum of log p over primes p <= x with p = r (mod q)."""
    if q < 1:
        raise DomainError("modulus q must be >= 1")
    p = table.primes_upto(x)
    mask = (p % q) == (r % q)
    if not mask.any():
        return 0.0
    return float(np.log(p[mask].astype(np.float64)).sum())


# --- multiplicative functions (trial division against a small shared sieve) ---

_SMALL_LIMIT = 1 << 16
_SMALL_PRIMES: np.ndarray | None = None


def _small_primes() -> np.ndarray:
    global _SMALL_PRIMES
    if _SMALL_PRIMES is None:
        flags = np.ones(_SMALL_LIMIT + 1, dtype=bool)
        flags[:2] = False
        for i in range(2, math.isqrt(_SMALL_LIMIT) + 1):
            if flags[i]:
                flags[i * i:: i] = False
        _SMALL_PRIMES = np.flatnonzero(flags).astype(np.int64)
    return _SMALL_PRIMES


@dataclass(frozen=True)
class Factorization:
    """Prime factorization n = prod p_i^e_i with p_i ascending."""

    n: int
    factors: tuple[tuple[int, int], ...]


def factorize(n: int) -> Factorization:
    """Trial-division factorization; capped at n <= 2^32."""
    if n < 1:
        raise DomainError("factorize requires n >= 1")
    if n > (1 << 32):
        raise CapacityError("factorize is capped at 2^32")
    m = n
    out: list[tuple[int, int]] = []
    for p in _small_primes():
        p = int(p)
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
    if m > 1:
        out.append((m, 1))
    return Factorization(n=n, factors=tuple(out))


def mobius(n: int) -> int:
    """Mobius function: (-1)^k on square-free n with k prime factors, else 0."""
    f = factorize(n)
    if any(e > 1 for _, e in f.factors):
        return 0
    return -1 if len(f.factors) % 2 else 1


def euler_phi(n: int) -> int:
    """Euler totient."""
    f = factorize(n)
    out = 1
    for p, e in f.factors:
        out *= (p - 1) * p ** (e - 1)
    return out


def is_squarefree(n: int) -> bool:
    """True iff no prime divides n twice."""
    return all(e == 1 for _, e in factorize(n).factors)


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    out = [1]
    for p, e in factorize(n).factors:
        out = [d * p ** k for d in out for k in range(e + 1)]
    return sorted(out)


def phi_capital(t: float) -> float:
    """Phi(t) = sum over 1 <= q < 2^sqrt(t) of (1 + log q) / phi(q).

    The sum is empty only for t <= 0; any t > 0 includes q = 1.
    """
    if t <= 0:
        return 0.0
    bound = 2.0 ** math.sqrt(t)
    qmax = int(bound)
    if float(qmax) == bound:
        qmax -= 1
    total = 0.0
    for q in range(1, qmax + 1):
        total += (1.0 + math.log(q)) / euler_phi(q)
    return total
