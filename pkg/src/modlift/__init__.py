"""Weighted modulation spaces, Toeplitz and Weyl operators on the finite phase space Z_n x Z_n."""

from .errors import (DegenerateWindowError, GridMismatchError, ModliftError, ParameterError,
                     SingularOperatorError, SpecParseError)
from .lifting import (LiftReport, SpectralReport, draw_samples, frame_bound_ratio,
                      gaussian_lift_factorize, gaussian_window, invert_toeplitz,
                      lift_ratio_report, m2_isomorphism_check, parse_window_spec,
                      quadratic_identity_check, semigroup_error, smooth_weight_isomorphism_suite,
                      spectral_invariance_report, toeplitz_factorization_error,
                      wigner_bridge_error)
from .modspace import (MixedExponents, amalgam_norm, bump, dual_norm_lower_bound, h_omega_norm,
                       h_omega_norms, holder_extremal, mixed_norm, mod_norm, mod_norms,
                       window_equivalence)
from .phase_space import (Grid, PhaseFn, Signal, delta_phase_fn, delta_signal, dft, idft,
                          random_phase_fn, random_signal, reconstruct, reflect, shift_phase_fn,
                          stft, stft_factorized, stft_wigner_phase, symplectic_fourier,
                          symplectic_stft, tf_atoms, tf_shift, wigner)
from .quantize import (WEYL, LinOp, TParam, calculus_transform, m_infty1_norm, quantize,
                       s_omega_seminorms, symbol_of, toeplitz, toeplitz_via_weyl,
                       twisted_convolution, weyl_product)
from .weights import (DoubleWeight, Weight, convolve, corweyl_weights, doubled,
                      equivalence_constants, gaussian_phase_weight, moderate_constant,
                      omega3_weight, omega_0t, parse_weight_spec, periodized_gaussian,
                      polynomial_weight, submultiplicative_constant, weyl_product_weight_check)

__version__ = "0.1.0"
