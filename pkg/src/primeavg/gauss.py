"""Normalized Gauss sums and their closed forms.

The normalized Gauss sum here is

    G(chi, n) = (1/phi(q)) * sum over units r mod q of chi(r) e(r n / q),

with e(x) = exp(2 pi i x).  tau(chi) = phi(q) G(chi, 1) is the classical
(unnormalized) sum; for a primitive character mod q0 it satisfies
|tau| = sqrt(q0) and tau^2 = q0 chi(-1) when chi is quadratic.

Every closed form below has a brute-force counterpart so the two routes can
be compared exhaustively:

  * gauss_sum_closed: G(chi, a) for a coprime to q through the primitive
    character chi_star mod q0 and mu(q/q0).
  * twisted_character_sum_closed: sum over units a of chi(a) e(a x / q) for
    arbitrary integer x, nonzero only when gcd(q, x) divides q/q0.
  * gauss_exponential_sum: sum over units a of G(chi, a) e(x a / q), nonzero
    only when q/q0 is square-free and coprime to q0.
  * ramanujan_gauss_principal: G for the principal character, which reduces
    to the Ramanujan sum, G(1_q, a) = mu(q/g) / phi(q/g) with g = gcd(q, a).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .characters import DirichletCharacter, conductor
from .ntheory import DomainError, euler_phi, is_squarefree, mobius


@lru_cache(maxsize=1024)
def roots_of_unity(q: int) -> np.ndarray:
    """exp(2 pi i k / q) for k in [0, q)."""
    return np.exp(2j * np.pi * np.arange(q) / q)


def gauss_sum_bruteforce(chi: DirichletCharacter, n: int) -> complex:
    """G(chi, n) summed directly over the units mod q."""
    q = chi.modulus
    units = chi.unit_residues()
    roots = roots_of_unity(q)
    val = chi.values[units] @ roots[(units * (n % q)) % q]
    return complex(val) / euler_phi(q)


def gauss_sum_bruteforce_all(chi: DirichletCharacter) -> np.ndarray:
    """G(chi, n) for every n in [0, q), as one matrix product."""
    q = chi.modulus
    units = chi.unit_residues()
    roots = roots_of_unity(q)
    idx = (units[:, None] * np.arange(q)[None, :]) % q
    return (chi.values[units] @ roots[idx]) / euler_phi(q)


def tau(chi: DirichletCharacter) -> complex:
    """tau(chi) = phi(q) G(chi, 1).  The |tau| = sqrt(q0) law needs chi primitive."""
    return euler_phi(chi.modulus) * gauss_sum_bruteforce(chi, 1)


def gauss_sum_closed(chi: DirichletCharacter, a: int) -> complex:
    """Closed form for G(chi, a), a coprime to q.

    G(chi, a) = mu(q/q0)/phi(q) * chi_star(a) chi_star(q/q0) tau(chi_star),
    which vanishes unless q/q0 is square-free and coprime to q0.
    """
    q = chi.modulus
    if math.gcd(a, q) != 1:
        raise DomainError("gauss_sum_closed requires gcd(a, q) = 1")
    dec = conductor(chi)
    q0 = dec.conductor
    star = dec.primitive_char
    m = q // q0
    mu = mobius(m)
    if mu == 0:
        return 0.0 + 0.0j
    val = mu * complex(star(a)) * complex(star(m)) * tau(star)
    return val / euler_phi(q)


def twisted_character_sum_bruteforce(chi: DirichletCharacter, x: int) -> complex:
    """sum over units a mod q of chi(a) e(a x / q), summed directly."""
    q = chi.modulus
    units = chi.unit_residues()
    roots = roots_of_unity(q)
    return complex(chi.values[units] @ roots[(units * (x % q)) % q])


def twisted_character_sum_closed(chi: DirichletCharacter, x: int) -> complex:
    """Closed form for sum over units a of chi(a) e(a x / q), any integer x.

    With r = gcd(q, x): zero unless r divides q/q0, in which case the sum is
    phi(q)/phi(q/r) * chi_star(x/r) chi_star(q/(r q0)) mu(q/(r q0)) tau(chi_star).
    """
    q = chi.modulus
    dec = conductor(chi)
    q0 = dec.conductor
    star = dec.primitive_char
    r = math.gcd(q, x)  # gcd(q, 0) = q
    if (q // q0) % r != 0:
        return 0.0 + 0.0j
    m = q // (r * q0)
    mu = mobius(m)
    if mu == 0:
        return 0.0 + 0.0j
    # r | x, so x // r is exact; chi_star reduces it mod q0
    val = (euler_phi(q) // euler_phi(q // r)) * complex(star(x // r)) \
        * complex(star(m)) * mu * tau(star)
    return val


def gauss_exponential_sum_bruteforce(chi: DirichletCharacter, x: int) -> complex:
    """sum over units a mod q of G(chi, a) e(x a / q), with G computed directly."""
    q = chi.modulus
    units = chi.unit_residues()
    roots = roots_of_unity(q)
    g_all = gauss_sum_bruteforce_all(chi)
    return complex(g_all[units] @ roots[(units * (x % q)) % q])


def gauss_exponential_sum(chi: DirichletCharacter, x: int) -> complex:
    """Closed form for sum over units a of G(chi, a) e(x a / q).

    With r = gcd(q, x), the sum equals mu(r) q0 phi(r)/phi(q) chi_star(-x)
    provided q/q0 is square-free, coprime to q0, and r divides q/q0;
    otherwise it vanishes.
    """
    q = chi.modulus
    dec = conductor(chi)
    q0 = dec.conductor
    star = dec.primitive_char
    m = q // q0
    r = math.gcd(q, x)
    if not is_squarefree(m) or math.gcd(m, q0) != 1 or m % r != 0:
        return 0.0 + 0.0j
    return mobius(r) * q0 * euler_phi(r) / euler_phi(q) * complex(star(-x))


def ramanujan_gauss_principal(q: int, a: int) -> float:
    """G(1_q, a) = c_q(a)/phi(q) = mu(q/g)/phi(q/g), g = gcd(q, a)."""
    if q < 1:
        raise DomainError("modulus must be >= 1")
    g = math.gcd(q, a)
    m = q // g
    return mobius(m) / euler_phi(m)


def gauss_bound_ratio(chi: DirichletCharacter) -> float:
    """max over units a of |G(chi, a)| * phi(q) / sqrt(q0).

    The closed form gives |G(chi, a)| <= sqrt(q0)/phi(q), so this ratio
    never exceeds 1 (up to roundoff).
    """
    q0 = conductor(chi).conductor
    units = chi.unit_residues()
    g_all = gauss_sum_bruteforce_all(chi)
    if units.size == 0:
        return 0.0
    return float(np.max(np.abs(g_all[units])) * euler_phi(chi.modulus) / math.sqrt(q0))


def verify_quadratic_range(q_max: int, tol_scale: float = 1e-9,
                           q_min: int = 1) -> list[dict]:
    """Exhaustive closed-form vs brute-force audit over all quadratic characters.

    For every modulus q_min <= q <= q_max and every character with chi^2 principal
    (the principal character included), compares the three closed forms
    against direct summation: G(chi, a) over all units a, the twisted sum
    over every x in [0, q), and the Gauss exponential sum over every
    x in [0, q); checks the tau laws on the induced primitive character and
    the Ramanujan evaluation for the principal character; and counts the
    vanishing cases where the closed form is structurally zero.  A check
    fails when the absolute error exceeds tol_scale * q.

    Returns one record per (q, character) with the maximum errors, the
    modulus bound ratio, and check/failure counts.
    """
    from .characters import enumerate_quadratic_characters, principal_character

    records = []
    for q in range(q_min, q_max + 1):
        roots = roots_of_unity(q)
        mat = roots[np.outer(np.arange(q), np.arange(q)) % q]
        tol = tol_scale * q
        chars = [principal_character(q)] + enumerate_quadratic_characters(q)
        for idx, chi in enumerate(chars):
            units = chi.unit_residues()
            checks = failures = 0
            vanish_checks = vanish_failures = 0

            g_brute = gauss_sum_bruteforce_all(chi)
            g_err = 0.0
            for a in units:
                g_err = max(g_err, abs(gauss_sum_closed(chi, int(a)) - g_brute[a]))
                checks += 1

            twisted_brute = mat @ chi.values
            t_err = 0.0
            e_err = 0.0
            gvec = np.zeros(q, dtype=np.complex128)
            gvec[units] = g_brute[units]
            exp_brute = mat @ gvec
            for x in range(q):
                closed_t = twisted_character_sum_closed(chi, x)
                closed_e = gauss_exponential_sum(chi, x)
                t_err = max(t_err, abs(closed_t - twisted_brute[x]))
                e_err = max(e_err, abs(closed_e - exp_brute[x]))
                checks += 2
                if closed_e == 0:
                    vanish_checks += 1
                    if abs(exp_brute[x]) > tol:
                        vanish_failures += 1

            dec = conductor(chi)
            star = dec.primitive_char
            t = tau(star)
            tau_mod_err = abs(abs(t) - math.sqrt(dec.conductor))
            tau_sq_err = abs(t * t - dec.conductor * complex(star(-1)))
            checks += 2

            principal_err = 0.0
            if chi.kind == "principal":
                for a in range(q):
                    principal_err = max(
                        principal_err,
                        abs(ramanujan_gauss_principal(q, a) - g_brute[a]))
                    checks += 1

            errs = (g_err, t_err, e_err, tau_mod_err, tau_sq_err, principal_err)
            failures = sum(e > tol for e in errs) + vanish_failures
            records.append({
                "q": q, "index": idx, "kind": chi.kind,
                "gauss_err": g_err, "twisted_err": t_err, "expsum_err": e_err,
                "tau_mod_err": tau_mod_err, "tau_sq_err": tau_sq_err,
                "principal_err": principal_err,
                "bound_ratio": gauss_bound_ratio(chi),
                "vanish_checks": vanish_checks, "vanish_failures": vanish_failures,
                "checks": checks, "failures": failures,
            })
    return records


def verify_quadratic_rows(q_max: int, tol_scale: float = 1e-9,
                          q_min: int = 1):
    """Per-check rows of the quadratic-character audit, for report emission.

    Yields (q, q0, point, abs_err, ok) tuples, one per comparison: point is
    'a=<n>' for the Gauss closed form, 'S x=<n>' for the twisted sum,
    'E x=<n>' for the exponential sum, and 'tau'/'tau^2' for the primitive
    laws.  ok means abs_err <= tol_scale * q.
    """
    from .characters import enumerate_quadratic_characters, principal_character

    for q in range(q_min, q_max + 1):
        roots = roots_of_unity(q)
        mat = roots[np.outer(np.arange(q), np.arange(q)) % q]
        tol = tol_scale * q
        for chi in [principal_character(q)] + enumerate_quadratic_characters(q):
            units = chi.unit_residues()
            dec = conductor(chi)
            q0 = dec.conductor
            g_brute = gauss_sum_bruteforce_all(chi)
            for a in units:
                err = abs(gauss_sum_closed(chi, int(a)) - g_brute[a])
                yield q, q0, f"a={int(a)}", err, err <= tol
            twisted_brute = mat @ chi.values
            gvec = np.zeros(q, dtype=np.complex128)
            gvec[units] = g_brute[units]
            exp_brute = mat @ gvec
            for x in range(q):
                err = abs(twisted_character_sum_closed(chi, x) - twisted_brute[x])
                yield q, q0, f"S x={x}", err, err <= tol
                err = abs(gauss_exponential_sum(chi, x) - exp_brute[x])
                yield q, q0, f"E x={x}", err, err <= tol
            t = tau(dec.primitive_char)
            err = abs(abs(t) - math.sqrt(q0))
            yield q, q0, "tau", err, err <= tol
            err = abs(t * t - q0 * complex(dec.primitive_char(-1)))
            yield q, q0, "tau^2", err, err <= tol
