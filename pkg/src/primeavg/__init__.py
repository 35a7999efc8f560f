"""Prime-average multipliers, dyadic maximal operators, and their audits.

The package splits along the structure of the underlying argument:

- ntheory: sieve, prime counting, Chebyshev sums, arithmetic functions.
- characters: Dirichlet characters with exact phase arithmetic, conductors,
  real L-values, and the real-zero scan.
- gauss: Gauss/Ramanujan sums, closed forms with brute-force oracles.
- multipliers: averaging kernels and their Fourier transforms, the smooth
  frequency cutoffs, rational arcs, and the glued approximants.
- maximal: signals on Z, dyadic maximal operators, weak-type and ell^p
  measurements, the low/high frequency split.
- orlicz: decreasing rearrangements and the L log^2 L log log L functional.
- ergodic: rotations and cyclic shifts, prime orbit averages, transference.
- cli: the `primeavg` command.
"""

__version__ = "0.1.0"

__all__ = ["characters", "cli", "ergodic", "gauss", "maximal", "multipliers",
           "ntheory", "orlicz"]
