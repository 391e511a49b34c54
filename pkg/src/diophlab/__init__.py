"""diophlab: a computational laboratory for diophantine approximation.

Continued fractions with certified error enclosures, Ostrowski numeration,
three-gap arithmetic, Bohr sets and GAPs, congruence lattices, shift-reduced
totients, an exact interval-measure engine, and log-averaged sum experiments.
Every nontrivial formula ships next to a brute-force oracle.
"""

from .numbers import (BigRational, DepthError, ParameterError,
                      PrecisionError, RealEnclosure, UndecidableError,
                      Rat, Surd, CFSpec, decide_cmp, dist_nearest_integer,
                      log_enclosure, paper_log_enclosure, refinement_budget,
                      spec_from_json, tree_sum)
from .contfrac import (ContinuedFraction, cf_of_rational, convergents,
                       d_value, omega_estimate)
from .threegap import (brute_gaps, brute_largest_gap_form, find_small_shift,
                       gap_decomposition, largest_gap, largest_gap_form)
from .ostrowski import (GammaDigits, OstrowskiDigits, cylinder_elements,
                        certify_dandy_pair, dandy_check, gamma_from_digits,
                        ostrowski_decode, ostrowski_encode,
                        sharpness_construct, sigma_decompose, sud_partial_sum,
                        validate_digits)
from .shiftred import (anchor_convergent, is_shift_reduced, phi_shift,
                       phi_shift_closed, phi_sweep, totient)
from .bohr import (GAP, BohrParams, bohr_cardinality_check,
                   count_divisible_in_gap, davenport_check, enumerate_bohr,
                   enumerate_gap, lattice_basis, verify_containment)
from .measure import (ApproxSetSpec, IntervalSet, build_approx_set,
                      density_profile, divergence_sum, intersect, measure,
                      overlap_matrix_sum, union)
from .sums import (ApproxFunction, dyadic_ratio_check, figure1,
                   gallagher_counter, log_avg_sum, paper_log, phi_big)

__version__ = "0.1.0"
