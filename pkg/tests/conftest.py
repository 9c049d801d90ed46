import pytest

from gasketfields import geometry, spectral


@pytest.fixture(scope="session")
def mesh6():
    return geometry.build_mesh(6)


@pytest.fixture(scope="session")
def spec_n(mesh6):
    return spectral.build_spectrum(6, "neumann", j_max=200)


@pytest.fixture(scope="session")
def spec_d(mesh6):
    return spectral.build_spectrum(6, "dirichlet", j_max=200)


@pytest.fixture(scope="session")
def spec_n_full(mesh6):
    return spectral.build_spectrum(6, "neumann")
