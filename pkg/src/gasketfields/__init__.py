"""Fractional stable random fields on the Sierpinski gasket.

Builds finite gasket approximations, solves the renormalized-energy
eigenproblem under Neumann or Dirichlet boundary conditions, evaluates
heat and fractional Riesz kernels spectrally, simulates symmetric
alpha-stable fields via LePage series, and verifies the governing
scaling, symmetry and regularity laws at desk scale.
"""

__version__ = "0.1.0"

from .constants import D_H, D_W
from .geometry import build_mesh, apply_contraction, reflect, sample_mu, quadrature
from .spectral import assemble_form, solve_spectrum, build_spectrum, heat_kernel
from .riesz import KernelEvaluator, riesz_kernel, fractional_laplacian_inv
from .stable import standard_stable, d_alpha, make_draw, lepage_integral, direct_integral
from .fields import simulate_field, distributional_field, hurst_index

__all__ = [
    "D_H",
    "D_W",
    "build_mesh",
    "apply_contraction",
    "reflect",
    "sample_mu",
    "quadrature",
    "assemble_form",
    "solve_spectrum",
    "build_spectrum",
    "heat_kernel",
    "KernelEvaluator",
    "riesz_kernel",
    "fractional_laplacian_inv",
    "standard_stable",
    "d_alpha",
    "make_draw",
    "lepage_integral",
    "direct_integral",
    "simulate_field",
    "distributional_field",
    "hurst_index",
]
