"""Desk-scale numerical laboratory for primes in quadratic progressions n^2 + k."""

from .arith import (PrimeTable, SieveWindow, euler_phi, integer_sqrt, is_prime,
                    kronecker, mobius, primes_up_to, sieve_window, von_mangoldt)
from .characters import (Character, CharacterTable, build_character_group,
                         evaluate, primitive_characters)
from .dispersion import (DispersionParams, DispersionSample, dispersion_profile,
                         identity_check, m_tilde, u_term, v_term, w_term)
from .lemmas import (LemmaReport, large_sieve_avg_check, large_sieve_single_check,
                     legendre_sum_check, mean_square_check,
                     mean_square_twisted_check, phi_average_check,
                     polya_vinogradov_check, short_ap_check)
from .scan import (MomentReport, ProgressionRow, ScanConfig, exceptional_set,
                   scan_all_k, theorem1_moment, theorem2_moment, window_count,
                   window_lambda_sum)
from .singular import (SingularValue, batch_singular_series, batch_singular_values,
                       lower_bound_diagnostic, main_term_constant, singular_series,
                       truncated_singular_series)

__version__ = "0.1.0"

__all__ = [
    "PrimeTable", "SieveWindow", "euler_phi", "integer_sqrt", "is_prime",
    "kronecker", "mobius", "primes_up_to", "sieve_window", "von_mangoldt",
    "Character", "CharacterTable", "build_character_group", "evaluate",
    "primitive_characters",
    "SingularValue", "batch_singular_series", "batch_singular_values",
    "lower_bound_diagnostic", "main_term_constant", "singular_series",
    "truncated_singular_series",
    "MomentReport", "ProgressionRow", "ScanConfig", "exceptional_set",
    "scan_all_k", "theorem1_moment", "theorem2_moment", "window_count",
    "window_lambda_sum",
    "DispersionParams", "DispersionSample", "dispersion_profile",
    "identity_check", "m_tilde", "u_term", "v_term", "w_term",
    "LemmaReport", "large_sieve_avg_check", "large_sieve_single_check",
    "legendre_sum_check", "mean_square_check", "mean_square_twisted_check",
    "phi_average_check", "polya_vinogradov_check", "short_ap_check",
    "__version__",
]
