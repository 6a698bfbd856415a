import random

import pytest

from walkstore.graph import (
    Graph,
    complete,
    directed_cycle,
    fibonacci_digraph,
    triangle,
)


def enumerate_walks(g, l, x=None, y=None):
    """Brute-force list of all length-l walks (as vertex tuples)."""
    starts = [x] if x is not None else range(g.k)
    out = []
    for s in starts:
        stack = [(s,)]
        while stack:
            verts = stack.pop()
            if len(verts) == l + 1:
                if y is None or verts[-1] == y:
                    out.append(verts)
                continue
            for z in g.successors(verts[-1]):
                stack.append(verts + (z,))
    return out


def two_scc_dag():
    """Two nontrivial SCCs joined by a single bridge edge."""
    return Graph(
        4,
        [(0, 1), (1, 0), (0, 0), (1, 2), (2, 3), (3, 2), (2, 2)],
        directed=True,
    )


def four_vertex_aperiodic():
    """Strongly connected aperiodic 4-vertex digraph for the general store."""
    return Graph(
        4,
        [(0, 1), (1, 2), (2, 3), (3, 0), (0, 0), (1, 3), (2, 0), (3, 1), (0, 2)],
        directed=True,
    )


def random_digraph(k, seed, extra=None):
    """Random digraph with all out-degrees >= 1 (every vertex can walk on)."""
    rng = random.Random(seed)
    edges = set()
    for u in range(k):
        edges.add((u, rng.randrange(k)))
    n_extra = rng.randrange(k * k // 2 + 1) if extra is None else extra
    for _ in range(n_extra):
        edges.add((rng.randrange(k), rng.randrange(k)))
    return Graph(k, sorted(edges), directed=True)


def small_corpus():
    """The exhaustive-test corpus: every graph with k <= 5 used in acceptance."""
    graphs = [
        triangle(),
        complete(4),
        fibonacci_digraph(),
        directed_cycle(2),
        two_scc_dag(),
    ]
    graphs.extend(random_digraph(k, seed) for k, seed in [(3, 11), (4, 5), (5, 23)])
    return graphs


@pytest.fixture
def c3():
    return triangle()


@pytest.fixture
def k4():
    return complete(4)


@pytest.fixture
def fib():
    return fibonacci_digraph()
