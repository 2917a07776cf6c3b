import pytest

from finbound import spaces


@pytest.fixture(scope="session")
def small_spaces():
    """Shared small builds; tests must treat them as immutable."""
    cache = {}

    def get(name, **params):
        key = (name, tuple(sorted(params.items())))
        if key not in cache:
            cache[key] = spaces.BUILDERS[name](**params)
        return cache[key]

    return get


SMALL_PARAMS = {
    "halfline_r2": {"T": 60.0, "h": 0.1, "n_terms": 40},
    "punctured_disk": {"h_r": 0.02, "h_theta": 3.141592653589793 / 60,
                       "n_terms": 24},
    "staircase_fig1": {"T": 12.0},
    "cylinder_fig2": {"T": 12.0},
    "comb_basic": {"n_teeth": 16},
    "comb_extended": {"n_teeth": 16},
    "staircase_fig6": {"T": 16.0},
    "chimney1": {"T": 12.0},
    "chimney2": {"T": 12.0},
    "double_fig2": {"T": 12.0},
    "flat_square": {"L": 1.0, "h": 0.1},
}


@pytest.fixture(scope="session")
def all_small_builders(small_spaces):
    return {name: small_spaces(name, **params)
            for name, params in SMALL_PARAMS.items()}
