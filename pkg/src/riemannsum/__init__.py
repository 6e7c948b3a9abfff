"""Generalized Riemann sums, densities of primitive lattice points,
Pythagorean triples and Poisson summation on lattices and model sets."""

from ._backend import BACKEND
from .arith import (coprime_fraction, derangement_stats, iep_mobius_identity_check,
                    iep_odd_identity_check, mobius, mobius_sieve, primitive_points, zeta)
from .core import (DensityEstimate, ExplicitPointSource, IntegerPointSet, TestFunction,
                   WeightedPointSource, ball_indicator, box_indicator, combination,
                   estimate_density, integral, partition_riemann_sum, riemann_sum,
                   sector_indicator, smooth_bump)
from .fourier import (CutProjectScheme, Lattice, ModelSet, dual_lattice, fibonacci_scheme,
                      generalized_poisson_check, model_set, poisson_check, prim_expansion,
                      prim_poisson_check, qc_spectrum, twisted_density_check)
from .pythagoras import (enumerate_ppt, equidistribution_stat, fermat_characterization_check,
                         lehmer_ratio, ppt_from_pair, rational_circle_points, sector_count)

__version__ = "0.1.0"
