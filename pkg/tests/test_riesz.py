import numpy as np
import pytest

from gasketfields import geometry, riesz, spectral
from gasketfields.constants import D_H, D_W
from gasketfields.errors import DomainError

CRIT = D_H / D_W


def test_kernel_symmetry(spec_n):
    ev = riesz.KernelEvaluator(spec_n, 0.9)
    assert ev.value(10, 800) == ev.value(800, 10)


def test_kernel_row_integrates_to_zero(mesh6, spec_n):
    ev = riesz.KernelEvaluator(spec_n, 0.7)
    for xi in (0, 123, 1000):
        assert abs(ev.row(xi) @ mesh6.mu_weights) <= 1e-7


def test_dirichlet_kernel_vanishes_at_corners(mesh6, spec_d):
    ev = riesz.KernelEvaluator(spec_d, 0.9)
    for b in mesh6.boundary:
        assert np.max(np.abs(ev.row(b))) == 0.0


def test_diagonal_policy(spec_n):
    ev_low = riesz.KernelEvaluator(spec_n, 0.5)
    with pytest.raises(DomainError):
        ev_low.value(7, 7)
    ev_high = riesz.KernelEvaluator(spec_n, 0.9)
    assert np.isfinite(ev_high.value(7, 7))


def test_order_must_be_positive(spec_n):
    with pytest.raises(DomainError):
        riesz.KernelEvaluator(spec_n, 0.0)


def test_fractional_laplacian_on_eigenfunction(spec_n):
    phi1 = spec_n.eigenvectors[:, 0]
    lam1 = spec_n.eigenvalues[0]
    out = riesz.fractional_laplacian_inv(0.6, phi1, spec_n)
    assert np.max(np.abs(out - lam1 ** -0.6 * phi1)) <= 1e-10


def test_fractional_laplacian_s0_identity():
    # full truncation at a small level: s = 0 is the mean-zero projection
    mesh = geometry.build_mesh(4)
    spec = spectral.build_spectrum(4, "neumann")
    rng = np.random.default_rng(8)
    f = rng.standard_normal(mesh.n_vertices)
    f0 = f - f @ mesh.mu_weights
    out = riesz.fractional_laplacian_inv(0.0, f, spec)
    assert np.max(np.abs(out - f0)) <= 1e-9


def test_fractional_laplacian_composition(mesh6, spec_n):
    rng = np.random.default_rng(9)
    f = rng.standard_normal(mesh6.n_vertices)
    once = riesz.fractional_laplacian_inv(0.9, f, spec_n)
    twice = riesz.fractional_laplacian_inv(
        0.5, riesz.fractional_laplacian_inv(0.4, f, spec_n), spec_n)
    assert np.max(np.abs(once - twice)) <= 1e-9


def test_fractional_laplacian_domain(spec_n):
    with pytest.raises(DomainError):
        riesz.fractional_laplacian_inv(-0.1, np.zeros(1095), spec_n)


def test_kernel_route_matches_coefficient_route(mesh6, spec_n):
    rng = np.random.default_rng(10)
    f = rng.standard_normal(mesh6.n_vertices)
    via_coeff = riesz.fractional_laplacian_inv(0.8, f, spec_n)
    ev = riesz.KernelEvaluator(spec_n, 0.8)
    via_kernel = riesz.kernel_integral(ev, f - f @ mesh6.mu_weights)
    assert np.max(np.abs(via_coeff - via_kernel)) <= 1e-6


@pytest.mark.parametrize("s,t", [(0.9, 0.9), (0.5, 0.5), (0.7, 1.1)])
def test_semigroup_residual(mesh6, spec_n, s, t):
    rng = np.random.default_rng(11)
    ev_st = riesz.KernelEvaluator(spec_n, s + t)
    for _ in range(10):
        a, b = rng.choice(mesh6.n_vertices, 2, replace=False)
        resid = riesz.kernel_semigroup_residual(s, t, a, b, spec_n)
        assert resid <= 1e-3 * max(abs(ev_st.value(a, b)), 1e-30)


def test_semigroup_degenerate_order_rejected(spec_n):
    with pytest.raises(DomainError):
        riesz.kernel_semigroup_residual(0.9, 0.0, 1, 2, spec_n)


@pytest.mark.parametrize("s", [0.4, 0.6])
def test_kernel_exponent_fit(mesh6, spec_n, s):
    ev = riesz.KernelEvaluator(spec_n, s)
    fit = riesz.kernel_exponent_fit(ev, mesh6, np.random.default_rng(12))
    assert abs(fit - (s * D_W - D_H)) <= 0.1


def test_dirichlet_kernel_exponent_and_positivity(mesh6, spec_d):
    # lower bound carries the first eigenfunction: check exponent and sign
    # away from the corners, not the constant
    d_corner = np.min([np.hypot(*(mesh6.vertices - mesh6.vertices[b]).T)
                       for b in mesh6.boundary], axis=0)
    interior = d_corner >= 0.25
    for s in (0.4, 0.6):
        ev = riesz.KernelEvaluator(spec_d, s)
        fit = riesz.kernel_exponent_fit(ev, mesh6, np.random.default_rng(15))
        assert abs(fit - (s * D_W - D_H)) <= 0.1
        assert ev.matrix()[np.ix_(interior, interior)].min() > 0.0


def test_kernel_exponent_fit_requires_subcritical(mesh6, spec_n):
    with pytest.raises(DomainError):
        riesz.kernel_exponent_fit(riesz.KernelEvaluator(spec_n, 0.9), mesh6)


def test_kernel_log_fit_at_critical_order(mesh6, spec_n):
    ev = riesz.KernelEvaluator(spec_n, CRIT)
    slope, r2 = riesz.kernel_log_fit(ev, mesh6)
    assert slope > 0.0
    assert r2 >= 0.9


def test_holder_ratio_bounded_across_levels():
    for s in (0.8, 1.0):
        ratios = []
        for m in (5, 6):
            mesh = geometry.build_mesh(m)
            spec = spectral.build_spectrum(m, "neumann", j_max=200)
            ev = riesz.KernelEvaluator(spec, s)
            ratios.append(riesz.kernel_holder_ratio(ev, mesh, np.random.default_rng(13)))
        assert ratios[1] <= 1.2 * ratios[0]


def test_holder_ratio_requires_supercritical(mesh6, spec_n):
    with pytest.raises(DomainError):
        riesz.kernel_holder_ratio(riesz.KernelEvaluator(spec_n, 0.5), mesh6,
                                  np.random.default_rng(0))


def test_reflection_invariance(spec_n):
    ev = riesz.KernelEvaluator(spec_n, 0.9)
    for i in range(3):
        assert riesz.reflection_defect(ev, i) <= 1e-8


def test_subcell_scaling_identity(spec_n):
    ev = riesz.KernelEvaluator(spec_n, 0.9)
    rng = np.random.default_rng(14)
    for n in (1, 2, 3):
        for _ in range(20):
            a, b = rng.choice(1095, 2, replace=False)
            lhs = riesz.subcell_kernel_value(spec_n, 0.9, n, a, b)
            rhs = 3.0 ** n * 5.0 ** (-n * 0.9) * ev.value(a, b)
            assert abs(lhs - rhs) <= 1e-9


def test_monotone_truncation_bound(spec_n_full):
    s = 0.9
    lam = spec_n_full.eigenvalues
    phi = spec_n_full.eigenvectors
    for j in (50, 120, 300):
        ev_j = riesz.KernelEvaluator(spec_n_full, s, j)
        ev_j1 = riesz.KernelEvaluator(spec_n_full, s, ev_j.j_terms + 1)
        jj = ev_j.j_terms
        bound = lam[jj] ** -s * np.max(phi[:, : jj + 1] ** 2)
        diff = np.max(np.abs(ev_j1.matrix() - ev_j.matrix()))
        assert diff <= bound + 1e-12


def test_time_integral_cross_check(spec_n):
    ev = riesz.KernelEvaluator(spec_n, 0.9)
    for (a, b) in ((0, 1), (100, 700)):
        quad = riesz.riesz_kernel_time_integral(spec_n, 0.9, a, b)
        assert quad == pytest.approx(ev.value(a, b), rel=1e-8)


def test_tail_bound_reported(spec_n):
    ev = riesz.KernelEvaluator(spec_n, 0.9, 150)
    assert ev.tail_bound() > 0.0
