"""Indefinite Schur-class toolkit: inertia, Toeplitz identities, extension and interpolation."""

from .classifier import classify_cf, classify_trig, cf_solvable_in, trig_solvable_in, verdict
from .colligation import InterpolationInstance, certify_schur_class, solve, two_kernel_solve
from .extension import extend_to_class, rank_preserving_step, unique_extension_stream
from .inertia import HermitianMatrix, Inertia, TolerancePolicy, inertia
from .io import __version__
from .scalars import QQi, parse_exact
from .toeplitz import coeffs_to_moments, moments_to_coeffs, verify_identities

__all__ = [
    "HermitianMatrix", "Inertia", "InterpolationInstance", "QQi", "TolerancePolicy",
    "__version__", "certify_schur_class", "cf_solvable_in", "classify_cf", "classify_trig",
    "coeffs_to_moments", "extend_to_class", "inertia", "moments_to_coeffs", "parse_exact",
    "rank_preserving_step", "solve", "trig_solvable_in", "two_kernel_solve",
    "unique_extension_stream", "verdict", "verify_identities",
]
