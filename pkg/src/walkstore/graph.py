"""Graphs, exact walk counting, structural analysis and walk generation.

All quantities that stores depend on (walk counts, benchmarks, admissibility
checks) are exact arbitrary-precision integers.  Floating-point spectral data
is computed only as a diagnostic and nothing binds on it.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .config import MAX_WALK_LENGTH, COUNT_MEMO_LIMIT, vertex_cap
from .errors import (
    GenerationError,
    InvalidWalkError,
    ParameterError,
    RangeError,
    ResourceError,
    UnsupportedGraphError,
)


class Graph:
    """A fixed graph on dense vertex ids 0..k-1 with a 0/1 adjacency matrix.

    Undirected graphs are stored symmetrically; ``out_deg`` is then the plain
    degree.  Instances are immutable after construction and safe to share.
    """

    __slots__ = ("k", "directed", "adj", "out_deg", "_out", "_in", "_counts")

    def __init__(self, k: int, edges: Iterable[tuple[int, int]], directed: bool = False):
        cap = vertex_cap()
        if k < 1:
            raise UnsupportedGraphError("graph needs at least one vertex")
        if k > cap:
            raise UnsupportedGraphError(f"graph has {k} vertices, cap is {cap}")
        mat = [[0] * k for _ in range(k)]
        for u, v in edges:
            if not (0 <= u < k and 0 <= v < k):
                raise UnsupportedGraphError(f"edge ({u},{v}) outside [0,{k})")
            mat[u][v] = 1
            if not directed:
                mat[v][u] = 1
        self.k = k
        self.directed = directed
        self.adj = tuple(tuple(row) for row in mat)
        self.out_deg = tuple(sum(row) for row in self.adj)
        self._out = tuple(tuple(v for v in range(k) if self.adj[u][v]) for u in range(k))
        self._in = tuple(tuple(u for u in range(k) if self.adj[u][v]) for v in range(k))
        self._counts = None

    def successors(self, u: int) -> tuple[int, ...]:
        return self._out[u]

    def predecessors(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u][v])

    def edge_list(self) -> list[tuple[int, int]]:
        """Canonical edge list: sorted, one entry per undirected edge."""
        edges = []
        for u in range(self.k):
            for v in range(self.k):
                if self.adj[u][v] and (self.directed or u <= v):
                    edges.append((u, v))
        return edges

    def counts(self) -> "CountTable":
        """Shared lazily-built count table for this graph."""
        if self._counts is None:
            self._counts = CountTable(self)
        return self._counts

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.k == other.k
            and self.directed == other.directed
            and self.adj == other.adj
        )

    def __hash__(self):
        return hash((self.k, self.directed, self.adj))

    def __repr__(self):
        kind = "digraph" if self.directed else "graph"
        return f"Graph({kind}, k={self.k}, edges={len(self.edge_list())})"


class Walk:
    """A vertex sequence v_0..v_n with every consecutive pair an edge."""

    __slots__ = ("graph", "verts")

    def __init__(self, graph: Graph, verts: Sequence[int]):
        verts = tuple(verts)
        if not verts:
            raise InvalidWalkError("a walk has at least one vertex")
        for v in verts:
            if not (0 <= v < graph.k):
                raise InvalidWalkError(f"vertex {v} outside [0,{graph.k})")
        for i in range(len(verts) - 1):
            if not graph.adj[verts[i]][verts[i + 1]]:
                raise InvalidWalkError(
                    f"({verts[i]},{verts[i + 1]}) at step {i} is not an edge"
                )
        self.graph = graph
        self.verts = verts

    @property
    def length(self) -> int:
        """Number of steps n (the walk has n+1 vertices)."""
        return len(self.verts) - 1

    def __len__(self):
        return len(self.verts)

    def __getitem__(self, i):
        return self.verts[i]

    def __eq__(self, other):
        return isinstance(other, Walk) and self.verts == other.verts and self.graph == other.graph

    def __repr__(self):
        return f"Walk(n={self.length}, verts={self.verts[:8]}{'...' if len(self.verts) > 8 else ''})"


def _identity(k: int):
    return tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k))


def _mat_mult(a, b, k: int):
    bt = list(zip(*b))
    out = []
    for row in a:
        out.append(tuple(sum(x * y for x, y in zip(row, col) if x and y) for col in bt))
    return tuple(out)


class CountTable:
    """Exact powers A^l of the adjacency matrix, memoized by length.

    N_l(x, y) = A^l[x][y] is the number of length-l walks from x to y.
    Lengths up to ``memo_limit`` are kept in a dense list; larger powers are
    recombined from cached power-of-two squares.
    """

    def __init__(self, graph: Graph, memo_limit: int = COUNT_MEMO_LIMIT):
        self.graph = graph
        self.memo_limit = memo_limit
        self._seq = [_identity(graph.k)]
        self._pow2 = {}

    def power(self, l: int):
        if l < 0:
            raise RangeError("walk length must be >= 0")
        if l > MAX_WALK_LENGTH:
            raise ResourceError(f"walk length {l} beyond configured max {MAX_WALK_LENGTH}")
        if l < len(self._seq):
            return self._seq[l]
        if l <= self.memo_limit:
            self._extend_seq(l)
            return self._seq[l]
        return self._pow_binary(l)

    def _extend_seq(self, l: int):
        g = self.graph
        preds = g._in
        while len(self._seq) <= l:
            prev = self._seq[-1]
            nxt = tuple(
                tuple(sum(row[z] for z in preds[y]) for y in range(g.k)) for row in prev
            )
            self._seq.append(nxt)

    def _pow2_of(self, j: int):
        if j not in self._pow2:
            if j == 0:
                self._pow2[0] = self.power(1)
            else:
                half = self._pow2_of(j - 1)
                self._pow2[j] = _mat_mult(half, half, self.graph.k)
        return self._pow2[j]

    def _pow_binary(self, l: int):
        result = None
        j = 0
        while l:
            if l & 1:
                p = self._pow2_of(j)
                result = p if result is None else _mat_mult(result, p, self.graph.k)
            l >>= 1
            j += 1
        return result if result is not None else _identity(self.graph.k)

    def count(self, x: int, y: int, l: int) -> int:
        """Number of length-l walks from x to y."""
        return self.power(l)[x][y]

    def row_total(self, x: int, l: int) -> int:
        """Number of length-l walks starting at x (free end)."""
        return sum(self.power(l)[x])

    def col_total(self, y: int, l: int) -> int:
        """Number of length-l walks ending at y (free start)."""
        m = self.power(l)
        return sum(m[x][y] for x in range(self.graph.k))

    def total(self, l: int) -> int:
        """Number of length-l walks with both endpoints free."""
        return sum(sum(row) for row in self.power(l))


def count_walks(g: Graph, l: int):
    """Exact k x k matrix of length-l walk counts (A^l)."""
    return g.counts().power(l)

def total_walks(g: Graph, n: int) -> int:
    """Total number of length-n walks on g."""
    return g.counts().total(n)


def log2_int(v: int) -> float:
    """lg2 of a positive integer, accurate to well below 1e-9 relative."""
    if v <= 0:
        raise RangeError("log2 of non-positive integer")
    b = v.bit_length()
    if b <= 53:
        return math.log2(v)
    # Keep 64 high bits; the truncation error is < 2^-63 in the mantissa.
    shift = b - 64
    return shift + math.log2(v >> shift)


def ceil_log2(v: int) -> int:
    """Smallest w with 2^w >= v, for v >= 1."""
    if v < 1:
        raise RangeError("ceil_log2 needs a positive integer")
    return (v - 1).bit_length()


def benchmark_worstcase_bits(g: Graph, n: int) -> float:
    """lg2 of the number of length-n walks: the worst-case space benchmark."""
    return log2_int(total_walks(g, n))


def benchmark_pointwise_bits(w: Walk) -> float:
    """lg2|G| + sum of lg2 out-degrees along the walk (last vertex excluded)."""
    g = w.graph
    bits = math.log2(g.k)
    for i in range(w.length):
        d = g.out_deg[w.verts[i]]
        if d == 0:
            raise InvalidWalkError(f"vertex {w.verts[i]} at step {i} has out-degree 0")
        bits += math.log2(d)
    return bits


# ---------------------------------------------------------------------------
# Structural analysis


@dataclass(frozen=True)
class GraphAnalysis:
    scc_list: tuple            # vertex partition, topological order
    period: tuple              # per-SCC gcd of cycle lengths; 0 for trivial SCCs
    is_strongly_connected: bool
    is_aperiodic: bool
    is_bipartite: bool
    is_regular: bool
    degree: int | None         # common out-degree when regular


def _tarjan_sccs(g: Graph) -> list[list[int]]:
    """Iterative Tarjan; components come out in reverse topological order."""
    index = {}
    lowlink = {}
    on_stack = [False] * g.k
    stack = []
    sccs = []
    counter = 0
    for root in range(g.k):
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            succ = g._out[v]
            for i in range(pi, len(succ)):
                w = succ[i]
                if w not in index:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    lowlink[v] = min(lowlink[v], index[w])
            if recurse:
                continue
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(sorted(comp))
            work.pop()
            if work:
                u = work[-1][0]
                lowlink[u] = min(lowlink[u], lowlink[v])
    sccs.reverse()
    return sccs


def _scc_period(g: Graph, comp: list[int]) -> int:
    """gcd of cycle lengths inside one SCC; 0 for a trivial loop-free SCC."""
    if len(comp) == 1:
        u = comp[0]
        return 1 if g.adj[u][u] else 0
    members = set(comp)
    root = comp[0]
    level = {root: 0}
    queue = [root]
    g_period = 0
    while queue:
        u = queue.pop()
        for v in g._out[u]:
            if v not in members:
                continue
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
            else:
                g_period = math.gcd(g_period, level[u] + 1 - level[v])
    return abs(g_period)


def _is_bipartite_undirected(g: Graph) -> bool:
    """2-colorability of the underlying undirected graph."""
    color = [-1] * g.k
    for root in range(g.k):
        if color[root] != -1:
            continue
        color[root] = 0
        queue = [root]
        while queue:
            u = queue.pop()
            for v in range(g.k):
                if not (g.adj[u][v] or g.adj[v][u]):
                    continue
                if color[v] == -1:
                    color[v] = color[u] ^ 1
                    queue.append(v)
                elif color[v] == color[u]:
                    return False
    return True


def analyze(g: Graph) -> GraphAnalysis:
    """SCC decomposition, per-SCC periods, and the standard structure flags."""
    sccs = _tarjan_sccs(g)
    periods = tuple(_scc_period(g, comp) for comp in sccs)
    strongly = len(sccs) == 1
    aperiodic = strongly and periods[0] == 1
    regular = len(set(g.out_deg)) == 1
    return GraphAnalysis(
        scc_list=tuple(tuple(c) for c in sccs),
        period=periods,
        is_strongly_connected=strongly,
        is_aperiodic=aperiodic,
        is_bipartite=_is_bipartite_undirected(g),
        is_regular=regular,
        degree=g.out_deg[0] if regular else None,
    )


# ---------------------------------------------------------------------------
# Spectral diagnostics (advisory only; nothing binding uses these)


@dataclass(frozen=True)
class SpectralData:
    leading: float             # leading eigenvalue of A
    left: tuple                # left eigenvector (sums to 1)
    right: tuple               # right eigenvector (sums to 1)
    stationary: tuple          # stationary distribution of the transition matrix
    gap: float                 # 1 - |lambda_2| / lambda


def _power_iterate(mat_vec, k: int, tol: float = 1e-12, max_iter: int = 500_000):
    vec = [1.0 / k] * k
    value = 1.0
    for _ in range(max_iter):
        nxt = mat_vec(vec)
        norm = sum(nxt)
        nxt = [x / norm for x in nxt]
        value = norm
        if max(abs(a - b) for a, b in zip(nxt, vec)) < tol:
            return value, nxt
        vec = nxt
    return value, vec


def spectral(g: Graph) -> SpectralData:
    """Leading eigen-data via power iteration on A + I (diagnostics only)."""
    info = analyze(g)
    if not info.is_strongly_connected:
        raise UnsupportedGraphError("spectral data needs a strongly connected graph")
    k = g.k
    adj = g.adj

    def av(vec):  # (A + I) v
        return [vec[u] + sum(vec[v] for v in g._out[u]) for u in range(k)]

    def atv(vec):  # (A + I)^T v
        return [vec[v] + sum(vec[u] for u in g._in[v]) for v in range(k)]

    val_r, right = _power_iterate(av, k)
    _, left = _power_iterate(atv, k)
    leading = val_r - 1.0

    deg = g.out_deg

    def ptv(vec):  # ((P + I)/2)^T v
        out = []
        for v in range(k):
            acc = vec[v]
            for u in g._in[v]:
                acc += vec[u] / deg[u]
            out.append(acc / 2.0)
        return out

    _, stationary = _power_iterate(ptv, k)

    import numpy as np

    eigvals = sorted(abs(x) for x in np.linalg.eigvals(np.array(adj, dtype=float)))
    second = eigvals[-2] if k > 1 else 0.0
    gap = 1.0 - second / leading if leading > 0 else 0.0
    return SpectralData(
        leading=leading,
        left=tuple(left),
        right=tuple(right),
        stationary=tuple(stationary),
        gap=gap,
    )


# ---------------------------------------------------------------------------
# Walk generation


def gen_walk(g: Graph, n: int, mode: str = "markov", seed: int = 0) -> Walk:
    """Generate a length-n walk; deterministic for a given seed.

    markov: uniform start, each step uniform over out-neighbors.
    uniform: uniform over all length-n walks, by unranking a random integer.
    """
    if n < 0:
        raise RangeError("walk length must be >= 0")
    rng = random.Random(seed)
    if mode == "markov":
        verts = [rng.randrange(g.k)]
        for i in range(n):
            succ = g._out[verts[-1]]
            if not succ:
                raise GenerationError(
                    f"vertex {verts[-1]} reached at step {i} has no outgoing edge"
                )
            verts.append(succ[rng.randrange(len(succ))])
        return Walk(g, verts)
    if mode == "uniform":
        total = total_walks(g, n)
        if total == 0:
            raise GenerationError(f"graph has no length-{n} walks")
        rank = rng.randrange(total) + 1
        from .codec import CodecTables, walk_from_global_rank

        return walk_from_global_rank(CodecTables(g), n, rank)
    raise ParameterError(f"unknown walk generation mode {mode!r}")


# ---------------------------------------------------------------------------
# Shared test/bench graphs


def triangle() -> Graph:
    return Graph(3, [(0, 1), (1, 2), (0, 2)])


def complete(k: int = 4) -> Graph:
    return Graph(k, [(u, v) for u in range(k) for v in range(u + 1, k)])


def fibonacci_digraph() -> Graph:
    """Two vertices, edges 0->0, 0->1, 1->0; walk counts are Fibonacci."""
    return Graph(2, [(0, 0), (0, 1), (1, 0)], directed=True)


def directed_cycle(k: int = 2) -> Graph:
    return Graph(k, [(i, (i + 1) % k) for i in range(k)], directed=True)
