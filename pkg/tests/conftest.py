import numpy as np
import pytest

from dapt import GammaModel, Grid, SpinHalfModel, Workspace


@pytest.fixture(scope="session")
def gamma():
    return GammaModel(gap=1.0, cone_angle=np.pi / 3)


@pytest.fixture(scope="session")
def spin():
    return SpinHalfModel(gap=1.0, cone_angle=np.pi / 3)


@pytest.fixture(scope="session")
def grid801():
    return Grid.uniform(801)


@pytest.fixture(scope="session")
def ws_gamma(gamma, grid801):
    """Shared numeric-transport workspace; treat as read-only."""
    return Workspace.build(model=gamma, grid=grid801, order=2,
                           model_holonomy=False)
