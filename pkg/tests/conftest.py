import random

import pytest

from prefixauth.mdag import TableGraph
from prefixauth.vertices import chain, sink


def make_items(n: int, seed: int = 0) -> list[bytes]:
    rng = random.Random(seed)
    return [rng.randbytes(rng.randrange(0, 24)) for _ in range(n)]


@pytest.fixture
def items64() -> list[bytes]:
    return make_items(64, seed=7)


# The worked example graph: sinks a, b, c, h; inner vertices d, e, f, g.
# d derives from a; e from b and c; f from e; g from f, d, and h.
FIG_A, FIG_B, FIG_C, FIG_H = sink(1), sink(2), sink(3), sink(4)
FIG_D, FIG_E, FIG_F, FIG_G = chain(1), chain(2), chain(3), chain(4)


@pytest.fixture
def fig_graph() -> TableGraph:
    return TableGraph(
        {
            FIG_D: [FIG_A],
            FIG_E: [FIG_B, FIG_C],
            FIG_F: [FIG_E],
            FIG_G: [FIG_F, FIG_D, FIG_H],
        }
    )
