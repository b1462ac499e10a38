import numpy as np
import pytest

from fsgrating import PmlConfig, ProblemConfig, select_pml_parameters


@pytest.fixture(scope="session")
def ex1_cfg():
    """Flat interface, the configuration with a closed-form solution."""
    return ProblemConfig(omega=np.pi, rho=1.0, rho_f=1.0, lam=1.0, mu=1.0,
                         theta=np.pi / 6, kappa=1.0, period=1.0,
                         h1=1.0, h2=-1.0, profile=[(0.0, 0.0), (1.0, 0.0)])


@pytest.fixture(scope="session")
def corner_cfg():
    """Sawtooth interface with a sharp apex and a corner at the seam."""
    return ProblemConfig(omega=2 * np.pi, rho=1.0, rho_f=1.0, lam=1.0, mu=2.0,
                         theta=np.pi / 6, kappa=1.0, period=1.0,
                         h1=1.0, h2=-1.0,
                         profile=[(0.0, 0.0), (0.5, 0.5), (1.0, 0.0)])


@pytest.fixture(scope="session")
def highfreq_cfg():
    """Two sharp peaks per period at wavenumber 20."""
    return ProblemConfig(omega=2 * np.pi, rho=1.0, rho_f=1.0, lam=1.0, mu=2.0,
                         theta=np.pi / 6, kappa=20.0, period=2.0,
                         h1=2.0, h2=-2.0,
                         profile=[(0.0, 0.0), (0.5, 0.4), (1.0, 0.0),
                                  (1.5, 0.4), (2.0, 0.0)])


def pml_for(cfg, delta, target=1e-8):
    template = PmlConfig(delta1=delta, delta2=delta,
                         sigma1=1 + 1j, sigma2=1 + 1j, t=2.0)
    return select_pml_parameters(cfg, target, template)


@pytest.fixture(scope="session")
def ex1_pml(ex1_cfg):
    return pml_for(ex1_cfg, 3.0)


@pytest.fixture(scope="session")
def corner_pml(corner_cfg):
    return pml_for(corner_cfg, 3.0)
