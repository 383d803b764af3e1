import pytest

from latent_graph.defaults import reset_defaults, set_defaults
from latent_graph.generators import clear_cache


@pytest.fixture(autouse=True)
def quiet_defaults():
    reset_defaults()
    set_defaults(verbose=0)
    clear_cache()
    yield
    reset_defaults()
