import numpy as np
import pytest

from primeavg.ntheory import sieve_primes


@pytest.fixture(scope="session")
def table_small():
    """Primes up to 2^16: enough for kernel and multiplier tests."""
    return sieve_primes(1 << 16)


@pytest.fixture(scope="session")
def table_big():
    """Primes up to 2^22: maximal sweeps and long orbits."""
    return sieve_primes(1 << 22)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
