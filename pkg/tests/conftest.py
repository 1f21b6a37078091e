"""Fixtures compartilhadas: parâmetros unitários e autopares em grades pequenas."""

import numpy as np
import pytest

from scripts.eigen import solve
from scripts.model import PendulumParams
from scripts.spectral import assemble_hamiltonian, assemble_single_pendulum, make_grid


@pytest.fixture
def unit_params():
    return PendulumParams()


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(scope="session")
def small_eig():
    """Espectro completo do pêndulo duplo numa grade 10×12 (dim 120)."""
    h = assemble_hamiltonian(PendulumParams(), make_grid(10, 12))
    return solve(h)


@pytest.fixture(scope="session")
def small_eig_prime():
    """Mesmo grid de small_eig, com ℓ₁(1+ε) e ℓ₂(1−ε), ε = 1e-3."""
    params = PendulumParams(l1=1.001, l2=0.999)
    return solve(assemble_hamiltonian(params, make_grid(10, 12)))


@pytest.fixture(scope="session")
def single_eig():
    """Pêndulo simples (θ₂ congelado) com 32 pontos."""
    return solve(assemble_single_pendulum(PendulumParams(), 32))
