"""Decreasing rearrangements and the L log^2 L log log L functional.

scipy.integrate.quad is the oracle for every integral here, computed from
the definition without going through the package's panel quadrature.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

import primeavg.orlicz as oz
from primeavg.ntheory import DomainError


def _phi(t: float) -> float:
    return math.log1p(t) ** 2 * math.log1p(math.log(t))


def _norm_oracle(steps):
    """integral of f*(t) phi(1/t) over [0, 1] for [(value, lo, hi), ...]."""
    total = 0.0
    for a, lo, hi in steps:
        val, err = quad(lambda t: a * _phi(1.0 / t), max(lo, 1e-300), hi,
                        epsabs=1e-13, limit=400)
        assert err < 5e-8  # quad's own estimate near the t = 0 singularity
        total += val
    return total


def test_phi_weight_values_and_domain():
    assert oz.phi_weight(1.0) == 0.0
    want = math.log1p(math.e) ** 2 * math.log(2.0)
    assert oz.phi_weight(math.e) == pytest.approx(want, rel=1e-14)
    arr = oz.phi_weight(np.array([1.0, 2.0, 10.0]))
    assert arr[0] == 0.0 and np.all(np.diff(arr) > 0)
    with pytest.raises(DomainError):
        oz.phi_weight(0.5)


def test_rearrangement_of_two_step_example():
    # |f| = 3 on measure 1/4, 1 on measure 1/2, 0 on the rest
    r = oz.decreasing_rearrangement([(3.0, 0.25), (-1.0, 0.5), (0.0, 0.25)])
    assert r.values.tolist() == [3.0, 1.0]
    assert r.measures.tolist() == [0.25, 0.5]
    assert r.cuts.tolist() == [0.0, 0.25, 0.75]
    assert r.total_measure == 0.75
    # right-continuous evaluation, zero past the support
    assert r.evaluate(0.0) == 3.0
    assert r.evaluate(0.25) == 1.0   # breakpoint takes the right value
    assert r.evaluate(0.74) == 1.0
    assert r.evaluate(0.75) == 0.0
    assert r.evaluate(2.0) == 0.0


def test_rearrangement_merges_equal_magnitudes():
    r = oz.decreasing_rearrangement([(2.0, 0.1), (-2.0, 0.2), (1.0, 0.3)])
    assert r.values.tolist() == [2.0, 1.0]
    assert r.measures.tolist() == [pytest.approx(0.3), pytest.approx(0.3)]


def test_rearrangement_preserves_distribution():
    pairs = [(0.7, 0.2), (2.5, 0.1), (1.0, 0.25), (0.7, 0.05)]
    r = oz.decreasing_rearrangement(pairs)
    for s in [0.0, 0.5, 0.7, 0.9, 1.0, 2.4, 2.5, 3.0]:
        want = sum(m for v, m in pairs if abs(v) > s)
        assert r.distribution(s) == pytest.approx(want)


def test_rearrangement_validation():
    with pytest.raises(DomainError):
        oz.decreasing_rearrangement([(1.0, 0.6), (2.0, 0.6)])  # mass > 1
    with pytest.raises(DomainError):
        oz.decreasing_rearrangement([(1.0, -0.1)])
    with pytest.raises(DomainError):
        oz.StepRearrangement(values=np.array([1.0, 2.0]),
                             measures=np.array([0.1, 0.1]))  # not decreasing
    with pytest.raises(DomainError):
        oz.StepRearrangement(values=np.array([1.0, -2.0]),
                             measures=np.array([0.1, 0.1]))
    empty = oz.decreasing_rearrangement([])
    assert empty.total_measure == 0.0
    assert oz.orlicz_norm(empty) == 0.0


def test_weight_integral_against_quad():
    for lo, hi in [(0.0, 1.0), (0.0, 0.5), (0.25, 0.75), (1e-6, 1e-3)]:
        want, _ = quad(lambda t: _phi(1.0 / t), max(lo, 1e-300), hi,
                       epsabs=1e-13, limit=400)
        assert oz.weight_integral(lo, hi) == pytest.approx(want, abs=1e-9)


@pytest.mark.parametrize("mu", [1.0, 0.5, 0.25])
def test_indicator_norm_against_quad(mu):
    r = oz.decreasing_rearrangement([(1.0, mu)])
    want = _norm_oracle([(1.0, 0.0, mu)])
    assert oz.orlicz_norm(r) == pytest.approx(want, abs=1e-6)


def test_two_step_norm_against_quad():
    r = oz.decreasing_rearrangement([(3.0, 0.25), (1.0, 0.5)])
    want = _norm_oracle([(3.0, 0.0, 0.25), (1.0, 0.25, 0.75)])
    assert oz.orlicz_norm(r) == pytest.approx(want, abs=1e-8)


def test_norm_is_homogeneous_in_value_scale():
    r = oz.decreasing_rearrangement([(2.0, 0.125), (0.5, 0.25)])
    base = oz.orlicz_norm(r)
    assert oz.orlicz_norm(r.scale(3.0)) == pytest.approx(3.0 * base, rel=1e-9)
    with pytest.raises(DomainError):
        r.scale(0.0)


def test_dyadic_layers_right_continuous_heights():
    r = oz.decreasing_rearrangement([(3.0, 0.25), (1.0, 0.5)])
    layers = oz.dyadic_layers(r, j_max=4)
    assert [a for a, _m in layers] == [1.0, 1.0, 3.0, 3.0]
    assert [m for _a, m in layers] == [0.5, 0.25, 0.125, 0.0625]
    with pytest.raises(DomainError):
        oz.dyadic_layers(r, j_max=0)


def test_layer_bound_sits_below_norm_on_random_inputs(rng):
    for _ in range(50):
        k = int(rng.integers(1, 12))
        raw_m = rng.random(k)
        m = raw_m / raw_m.sum() * float(rng.uniform(0.3, 1.0))
        v = rng.lognormal(mean=0.0, sigma=2.0, size=k)
        r = oz.decreasing_rearrangement(list(zip(v, m)))
        norm = oz.orlicz_norm(r)
        bound = oz.layer_lower_bound(r)
        assert bound <= norm + 1e-9


def test_layer_bound_zero_for_empty():
    assert oz.layer_lower_bound(oz.decreasing_rearrangement([])) == 0.0
