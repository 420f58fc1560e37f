"""Numerical laboratory for zeta-zero sums twisted by rational phases.

Zeros of zeta, the chi-factor of the functional equation, twisted von
Mangoldt sums and Dirichlet characters, plus a harness that measures
residual growth exponents at desk scale.
"""

__version__ = "0.1.0"
