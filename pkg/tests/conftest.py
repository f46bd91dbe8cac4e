import json
from pathlib import Path

import pytest

from helmsplit.geometry import ArcLength, starfish_curve
from helmsplit.system import assemble, discretize, solve
from helmsplit.testbench import default_sources, exact_field

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def oracles():
    return json.loads((DATA / "oracles.json").read_text())


@pytest.fixture(scope="session")
def starfish():
    return starfish_curve()


@pytest.fixture(scope="session")
def starfish_arclength(starfish):
    return ArcLength(starfish)


@pytest.fixture(scope="session")
def solved():
    """Solved k=28 problems keyed by (scheme, n_pan), built on demand."""
    cache = {}
    curve = starfish_curve()
    arclength = ArcLength(curve)
    sources = default_sources()

    def get(scheme, n_pan, k=28.0, n_pt=16):
        key = (scheme, n_pan, k, n_pt)
        if key not in cache:
            disc = discretize(curve, n_pan, n_pt, scheme, arclength=arclength)
            op = assemble(disc, k, 0.5 * k)
            rhs = 2.0 * exact_field(sources, k, disc.coarse.points)
            cache[key] = (op, solve(op, rhs), rhs)
        return cache[key]

    return get
