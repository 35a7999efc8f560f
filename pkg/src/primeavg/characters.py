"""Dirichlet characters, L-functions on the real axis, and the zero scan.

Characters mod q are stored as full value tables indexed by residue.  The
values are roots of unity, so alongside the complex table each character
keeps an integer phase table: chi(x) = exp(2 pi i * phase[x] / order) on the
units, with phase = -1 off the units.  Products, conjugates, and the
principal/quadratic classification are then exact integer arithmetic.

Enumeration walks the unit group (Z/q)^* through its cyclic components:
(Z/p^k)^* is cyclic for odd p, and (Z/2^k)^* is {+-1} x <5> for k >= 3.

L(s, chi) for non-principal chi is evaluated through the Hurwitz-zeta
Euler-Maclaurin expansion summed against the character, with the pole terms
cancelled exactly using sum chi(a) = 0, so s = 1 needs no special casing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .ntheory import CapacityError, DomainError, divisors, euler_phi, factorize

ENUM_CAP = 10 ** 6
_TWO_PI = 2.0 * math.pi


@dataclass
class DirichletCharacter:
    """A Dirichlet character mod q as a full value table.

    Attributes:
        modulus: The modulus q >= 1.
        order: Common denominator of the phase numerators.  Not necessarily
            the multiplicative order of the character.
        phases: int64 array of length q; phases[x] = k means the value at
            residue x is exp(2 pi i k / order); -1 marks non-units.
        values: complex128 array of length q with the actual values.
    """

    modulus: int
    order: int
    phases: np.ndarray
    values: np.ndarray
    _decomp: "PrimitiveDecomposition | None" = field(default=None, repr=False)

    def __call__(self, n: int | np.ndarray) -> complex | np.ndarray:
        idx = np.mod(n, self.modulus)
        return self.values[idx]

    @property
    def kind(self) -> str:
        """'principal', 'quadratic' (real with a -1), or 'other'."""
        on_units = self.phases[self.phases >= 0]
        if np.all(on_units == 0):
            return "principal"
        half = self.order // 2
        if self.order % 2 == 0 and np.all((on_units == 0) | (on_units == half)):
            return "quadratic"
        return "other"

    @property
    def is_real(self) -> bool:
        on_units = self.phases[self.phases >= 0]
        half = self.order // 2
        return bool(np.all(on_units == 0) or
                    (self.order % 2 == 0 and np.all((on_units == 0) | (on_units == half))))

    def unit_residues(self) -> np.ndarray:
        return np.flatnonzero(self.phases >= 0)


@dataclass(frozen=True)
class PrimitiveDecomposition:
    """chi = chi_star lifted from its conductor: chi(n) = chi_star(n) on units."""

    conductor: int
    primitive_char: DirichletCharacter


class _GroupData:
    """Generators, orders, and discrete logs of (Z/q)^*."""

    def __init__(self, q: int):
        self.q = q
        gens: list[int] = []
        orders: list[int] = []
        for p, e in factorize(q).factors:
            pe = p ** e
            rest = q // pe
            if p == 2:
                if e == 2:
                    gens.append(_crt_lift(3, pe, rest))
                    orders.append(2)
                elif e >= 3:
                    gens.append(_crt_lift(pe - 1, pe, rest))
                    orders.append(2)
                    gens.append(_crt_lift(5, pe, rest))
                    orders.append(2 ** (e - 2))
            else:
                gens.append(_crt_lift(_primitive_root(p, e), pe, rest))
                orders.append(euler_phi(pe))
        self.gens = gens
        self.orders = orders
        self.exponent = math.lcm(*orders) if orders else 1
        self.phi = euler_phi(q)

        k = len(gens)
        dlog = np.full((q, max(k, 1)), -1, dtype=np.int64)
        unit_mask = np.zeros(q, dtype=bool)
        if q == 1:
            unit_mask[0] = True
        elif k == 0:  # q == 2, trivial unit group
            unit_mask[1] = True
        else:
            idx = [0] * k
            x = 1
            for _ in range(self.phi):
                dlog[x, :k] = idx
                for i in reversed(range(k)):
                    idx[i] += 1
                    x = (x * gens[i]) % q
                    if idx[i] < orders[i]:
                        break
                    idx[i] = 0
            unit_mask = dlog[:, 0] >= 0
        self.dlog = dlog
        self.unit_mask = unit_mask


def _crt_lift(g: int, pe: int, rest: int) -> int:
    """The residue mod pe*rest that is g mod pe and 1 mod rest."""
    if rest == 1:
        return g % pe
    m = pe * rest
    inv_rest = pow(rest, -1, pe)
    inv_pe = pow(pe, -1, rest)
    return (g * rest * inv_rest + 1 * pe * inv_pe) % m


def _primitive_root(p: int, e: int) -> int:
    """Smallest primitive root mod p, lifted to p^e if needed."""
    phi_p = p - 1
    prime_divs = [r for r, _ in factorize(phi_p).factors]
    g = 2
    while True:
        if all(pow(g, phi_p // r, p) != 1 for r in prime_divs):
            break
        g += 1
    if e == 1:
        return g
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


@lru_cache(maxsize=512)
def _group_data(q: int) -> _GroupData:
    return _GroupData(q)


def _char_from_exponents(q: int, ks: tuple[int, ...]) -> DirichletCharacter:
    g = _group_data(q)
    L = g.exponent
    phases = np.full(q, -1, dtype=np.int64)
    if not g.gens:
        phases[g.unit_mask] = 0
    else:
        scale = np.array([k * (L // d) for k, d in zip(ks, g.orders)], dtype=np.int64)
        units = np.flatnonzero(g.unit_mask)
        phases[units] = np.mod(g.dlog[units, : len(g.gens)] @ scale, L)
    return _char_from_phases(q, phases, L)


def _char_from_phases(q: int, phases: np.ndarray, order: int) -> DirichletCharacter:
    values = np.zeros(q, dtype=np.complex128)
    units = phases >= 0
    values[units] = np.exp(2j * np.pi * phases[units] / order)
    return DirichletCharacter(modulus=q, order=order, phases=phases, values=values)


def principal_character(q: int) -> DirichletCharacter:
    """The principal character mod q: 1 on units, 0 elsewhere."""
    if q < 1:
        raise DomainError("modulus must be >= 1")
    g = _group_data(q)
    return _char_from_exponents(q, tuple(0 for _ in g.gens))


def enumerate_characters(q: int, cap: int = ENUM_CAP) -> list[DirichletCharacter]:
    """All phi(q) characters mod q, principal first, in a fixed order.

    The order is lexicographic in the exponent tuples on the unit-group
    generators, so repeated calls enumerate identically.
    """
    if q < 1:
        raise DomainError("modulus must be >= 1")
    if q > cap:
        raise CapacityError(f"enumeration modulus {q} exceeds cap {cap}")
    g = _group_data(q)
    return [_char_from_exponents(q, ks) for ks in product(*(range(d) for d in g.orders))]


def enumerate_quadratic_characters(q: int) -> list[DirichletCharacter]:
    """The quadratic characters mod q (order matches enumerate_characters)."""
    g = _group_data(q)
    choices = [(0, d // 2) if d % 2 == 0 else (0,) for d in g.orders]
    out = []
    for ks in product(*choices):
        if any(ks):
            out.append(_char_from_exponents(q, ks))
    return out


def character_product(a: DirichletCharacter, b: DirichletCharacter) -> DirichletCharacter:
    """Pointwise product of two characters with the same modulus (exact)."""
    if a.modulus != b.modulus:
        raise DomainError("character product requires equal moduli")
    L = math.lcm(a.order, b.order)
    phases = np.full(a.modulus, -1, dtype=np.int64)
    units = a.phases >= 0
    phases[units] = np.mod(a.phases[units] * (L // a.order)
                           + b.phases[units] * (L // b.order), L)
    return _char_from_phases(a.modulus, phases, L)


def conductor(chi: DirichletCharacter) -> PrimitiveDecomposition:
    """Minimal period decomposition of chi.

    The conductor q0 is the least divisor d of q such that chi(m) = chi(n)
    whenever m = n (mod d) and gcd(mn, q) = 1.  The induced primitive
    character chi_star mod q0 agrees with chi on the units of q.
    """
    if chi._decomp is not None:
        return chi._decomp
    q = chi.modulus
    units = chi.unit_residues()
    q0 = q
    for d in divisors(q):
        seen: dict[int, int] = {}
        ok = True
        for x in units:
            r = int(x) % d
            ph = int(chi.phases[x])
            prev = seen.get(r)
            if prev is None:
                seen[r] = ph
            elif prev != ph:
                ok = False
                break
        if ok:
            q0 = d
            break

    if q0 == 1:
        phases = np.zeros(1, dtype=np.int64)
    else:
        phases = np.full(q0, -1, dtype=np.int64)
        for a in range(1, q0 + 1):
            if math.gcd(a, q0) != 1:
                continue
            n = a
            while math.gcd(n, q) != 1:
                n += q0
                if n > a + q * q0:
                    raise RuntimeError("no unit lift found; inconsistent table")
            phases[a % q0] = chi.phases[n % q]
    star = _char_from_phases(q0, phases, chi.order)
    decomp = PrimitiveDecomposition(conductor=q0, primitive_char=star)
    chi._decomp = decomp
    return decomp


def is_primitive(chi: DirichletCharacter) -> bool:
    return conductor(chi).conductor == chi.modulus


def character_json(chi: DirichletCharacter) -> dict:
    """JSON-ready description: modulus, conductor, kind, (re, im) value pairs."""
    dec = conductor(chi)
    return {
        "modulus": chi.modulus,
        "conductor": dec.conductor,
        "kind": chi.kind,
        "values": [[float(v.real), float(v.imag)] for v in chi.values],
    }


# --- L-functions on the real axis ---

_EM_K = 28          # directly summed terms
_EM_J = 11          # Euler-Maclaurin correction depth
_EM_COEF = [float(Fraction(b) / math.factorial(2 * j))
            for j, b in enumerate([Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42),
                                   Fraction(-1, 30), Fraction(5, 66),
                                   Fraction(-691, 2730), Fraction(7, 6),
                                   Fraction(-3617, 510), Fraction(43867, 798),
                                   Fraction(-174611, 330), Fraction(854513, 138)],
                                  start=1)]


def _phi1m(u: np.ndarray) -> np.ndarray:
    """expm1(u)/u, stable through u = 0."""
    u = np.asarray(u, dtype=np.float64)
    small = np.abs(u) < 1e-8
    safe = np.where(small, 1.0, u)
    return np.where(small, 1.0 + u / 2.0, np.expm1(safe) / safe)


def l_function_real(chi: DirichletCharacter, s: float | np.ndarray):
    """L(s, chi) for non-principal chi and real s in (0, 1.5].

    Uses the Euler-Maclaurin expansion of the Hurwitz zeta values zeta(s, a/q)
    summed against chi(a).  The 1/(s-1) pole is removed exactly before
    summation (it cancels against sum chi(a) = 0), so the evaluation is
    uniformly accurate through s = 1.  Returns a real result when chi is
    real-valued.
    """
    if chi.kind == "principal":
        raise DomainError("L-series evaluation requires a non-principal character")
    s_in = np.asarray(s, dtype=np.float64)
    if np.any(s_in <= 0.0) or np.any(s_in > 1.5):
        raise DomainError("s must lie in (0, 1.5]")
    scalar = s_in.ndim == 0
    sv = np.atleast_1d(s_in)[:, None]  # (m, 1)

    q = chi.modulus
    units = chi.unit_residues()
    w = chi.values[units]
    real_out = chi.is_real
    if real_out:
        w = w.real
    x = units.astype(np.float64) / q  # (u,)

    # directly summed head: sum_{k<K} (x+k)^(-s)
    k = np.arange(_EM_K, dtype=np.float64)
    base = ((x[None, :, None] + k[None, None, :]) ** (-sv[:, :, None])).sum(axis=2)

    y = x[None, :] + _EM_K
    logy = np.log(y)
    # [(y)^(1-s) - 1]/(s-1), the pole-free remainder of y^(1-s)/(s-1)
    mid = -logy * _phi1m(-(sv - 1.0) * logy)
    tail = 0.5 * y ** (-sv)
    poch = np.ones_like(sv)
    for j, c in enumerate(_EM_COEF, start=1):
        # pochhammer s(s+1)...(s+2j-2)
        if j == 1:
            poch = sv.copy()
        else:
            poch = poch * (sv + (2 * j - 3)) * (sv + (2 * j - 2))
        tail = tail + c * poch * y ** (-(sv + 2 * j - 1))

    zeta_block = base + mid + tail  # (m, u)
    out = (q ** (-np.atleast_1d(s_in))) * (zeta_block @ w)
    if not real_out:
        out = out.astype(np.complex128)
    if scalar:
        return out[0].item() if not real_out else float(out[0])
    return out


@dataclass(frozen=True)
class ExceptionalZeroResult:
    """Outcome of the real-zero scan near s = 1.

    found is False when |L| stays above the zero tolerance on the whole scan
    window.  beta and character_index (into enumerate_quadratic_characters)
    are set when found.  diagnostic flags numerically murky cases, and is
    'synthetic-injection' for manufactured results.
    """

    modulus: int
    found: bool
    beta: float | None = None
    character_index: int | None = None
    diagnostic: str | None = None
    min_abs_l: float = math.inf
    c: float = 1.0


def exceptional_zero_scan(q: int, c: float = 1.0, zero_tol: float = 1e-8,
                          grid_points: int = 512, bisect_steps: int = 60) -> ExceptionalZeroResult:
    """Scan (max(1/2, 1 - c/log q), 1) for a real zero of any quadratic L mod q.

    Each quadratic character's L is sampled on a grid of interior points;
    a sign change triggers bisection, and |L| below zero_tol anywhere is
    declared a zero.  A grid value below tolerance without a sign change is
    reported with a diagnostic instead of silently passing.
    """
    if q < 3:
        raise DomainError("zero scan requires q >= 3")
    if c <= 0:
        raise DomainError("the zero-region constant c must be positive")
    lo = max(0.5, 1.0 - c / math.log(q))
    hi = 1.0
    grid = np.linspace(lo, hi, grid_points + 2)[1:-1]
    min_abs = math.inf
    for idx, chi in enumerate(enumerate_quadratic_characters(q)):
        vals = np.asarray(l_function_real(chi, grid), dtype=np.float64)
        min_abs = min(min_abs, float(np.min(np.abs(vals))))
        hit = np.flatnonzero(np.abs(vals) < zero_tol)
        sign_change = np.flatnonzero(vals[:-1] * vals[1:] < 0)
        if sign_change.size:
            a, b = grid[sign_change[0]], grid[sign_change[0] + 1]
            fa = float(l_function_real(chi, a))
            for _ in range(bisect_steps):
                m = 0.5 * (a + b)
                fm = float(l_function_real(chi, m))
                if fa * fm <= 0:
                    b = m
                else:
                    a, fa = m, fm
            beta = 0.5 * (a + b)
            return ExceptionalZeroResult(modulus=q, found=True, beta=beta,
                                         character_index=idx, min_abs_l=min_abs, c=c)
        if hit.size:
            return ExceptionalZeroResult(modulus=q, found=True, beta=float(grid[hit[0]]),
                                         character_index=idx,
                                         diagnostic="below-tolerance-without-sign-change",
                                         min_abs_l=min_abs, c=c)
    return ExceptionalZeroResult(modulus=q, found=False, min_abs_l=min_abs, c=c)


def synthetic_exceptional(q: int, beta: float) -> tuple[DirichletCharacter, float]:
    """A manufactured exceptional pair (chi, beta) for sensitivity runs.

    Picks the first primitive quadratic character mod q.  beta must sit in
    [1/2, 1).  This never comes out of the scan; callers opt in explicitly.
    """
    if not 0.5 <= beta < 1.0:
        raise DomainError("synthetic beta must lie in [1/2, 1)")
    for chi in enumerate_quadratic_characters(q):
        if is_primitive(chi):
            return chi, beta
    raise DomainError(f"no primitive quadratic character mod {q}")
