"""Store matching the per-walk entropy benchmark lg|G| + sum lg deg(v_i).

The walk is viewed as the leaves of a balanced binary tree.  Every node
carries a label (first vertex, last vertex, S) where S adds up, over the
steps inside the node's range, the integer cost ceil(P * lg deg(v)) of the
step leaving v (P is a precision factor, P = n by default).  Labels of
invalid ranges (children whose boundary vertices are not adjacent) count as
zero, so the number of leaf arrays with a given root label counts exactly
the valid walks with those endpoints and cost sum.

The payload is a single integer: the rank of the walk among all walks
sharing the root label, packed in ceil(lg N) bits.  Since a uniformly
random walk with that label has entropy lg N <= lg|G| + S/P, the payload
stays within a couple of bits of the per-walk benchmark.  Queries descend
the implicit tree, peeling the rank by enumerating the (boundary pair,
cost split) choices in canonical order; resolved nodes are cached on the
store so scattered queries do not redo the arithmetic.

Count tables are dictionaries keyed by cost sum, built by convolving child
tables.  When every step cost is a multiple of a common lattice the
convolution runs as one big-integer multiply (coefficients packed into
fixed-width limbs), which keeps builds at dictionary-bridge scale fast;
gmpy2 provides the multiply when available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidWalkError, ParameterError, RangeError
from .fileio import Cursor, write_varbig, write_varint
from .graph import Graph, Walk, ceil_log2

try:
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _mpz = int

MAGIC = b"RWP1"

# Plain dict convolution below this many coefficient pairs.
_KRONECKER_CUTOFF = 1024


@dataclass(frozen=True)
class NodeLabel:
    first: int
    last: int
    cost: int


def _step_cost(deg: int, precision: int) -> int:
    """ceil(precision * lg2(deg)), exactly (0 for deg <= 1)."""
    if deg <= 1:
        return 0
    return (deg**precision - 1).bit_length()


class LabelCounts:
    """Count tables N(size, x, y)[S] for one graph and precision factor."""

    def __init__(self, graph: Graph, precision: int):
        if precision < 1:
            raise ParameterError("precision factor must be >= 1")
        self.graph = graph
        self.precision = precision
        self.costs = [_step_cost(d, precision) for d in graph.out_deg]
        positive = [c for c in self.costs if c]
        self.lattice = math.gcd(*positive) if positive else 1
        self.edges = sorted(
            (u, v) for u in range(graph.k) for v in graph.successors(u)
        )
        self._maps = {}
        self._sorted_keys = {}

    def split(self, size: int) -> tuple:
        return (size + 1) // 2, size // 2

    def label_of(self, verts) -> NodeLabel:
        cost = 0
        for i in range(len(verts) - 1):
            if not self.graph.adj[verts[i]][verts[i + 1]]:
                raise InvalidWalkError(f"({verts[i]},{verts[i + 1]}) is not an edge")
            cost += self.costs[verts[i]]
        return NodeLabel(verts[0], verts[-1], cost)

    def count_map(self, size: int, x: int, y: int) -> dict:
        key = (size, x, y)
        cached = self._maps.get(key)
        if cached is not None:
            return cached
        if size == 1:
            result = {0: 1} if x == y else {}
        else:
            a, b = self.split(size)
            result = {}
            for u, w in self.edges:
                left = self.count_map(a, x, u)
                if not left:
                    continue
                right = self.count_map(b, w, y)
                if not right:
                    continue
                self._conv_into(result, left, right, self.costs[u])
        self._maps[key] = result
        return result

    def sorted_keys(self, size: int, x: int, y: int):
        key = (size, x, y)
        if key not in self._sorted_keys:
            self._sorted_keys[key] = sorted(self.count_map(size, x, y))
        return self._sorted_keys[key]

    def count(self, size: int, x: int, y: int, cost: int) -> int:
        return self.count_map(size, x, y).get(cost, 0)

    def count_root(self, size: int, cost: int) -> int:
        """Count with free endpoints (root labels carry only the cost sum)."""
        k = self.graph.k
        return sum(self.count(size, x, y, cost) for x in range(k) for y in range(k))

    # -- convolution ------------------------------------------------------------

    def _conv_into(self, result: dict, left: dict, right: dict, shift: int):
        if len(left) * len(right) <= _KRONECKER_CUTOFF:
            for sl, nl in left.items():
                for sr, nr in right.items():
                    s = sl + sr + shift
                    result[s] = result.get(s, 0) + nl * nr
            return
        g = self.lattice
        il = [s // g for s in left]
        ir = [s // g for s in right]
        lo_l, hi_l = min(il), max(il)
        lo_r, hi_r = min(ir), max(ir)
        width = (
            max(left.values()).bit_length()
            + max(right.values()).bit_length()
            + (min(len(left), len(right)) + 1).bit_length()
        )
        width = (width + 7) // 8 * 8
        packed_l = _pack(left, g, lo_l, hi_l, width)
        packed_r = _pack(right, g, lo_r, hi_r, width)
        product = int(_mpz(packed_l) * _mpz(packed_r))
        nbytes = width // 8
        raw = product.to_bytes((hi_l - lo_l + hi_r - lo_r + 2) * nbytes, "little")
        base = lo_l + lo_r
        for idx in range(len(raw) // nbytes):
            coeff = int.from_bytes(raw[idx * nbytes : (idx + 1) * nbytes], "little")
            if coeff:
                s = (base + idx) * g + shift
                result[s] = result.get(s, 0) + coeff


def _pack(table: dict, g: int, lo: int, hi: int, width: int) -> int:
    nbytes = width // 8
    buf = bytearray((hi - lo + 1) * nbytes)
    for s, value in table.items():
        idx = s // g - lo
        buf[idx * nbytes : idx * nbytes + (value.bit_length() + 7) // 8] = value.to_bytes(
            (value.bit_length() + 7) // 8, "little"
        )
    return int.from_bytes(buf, "little")


# ---------------------------------------------------------------------------
# Ranking


def _rank_walk(engine: LabelCounts, verts, cum, lo: int, size: int) -> int:
    """0-based rank of the subwalk among walks sharing its node label."""
    if size == 1:
        return 0
    a, b = engine.split(size)
    x, y = verts[lo], verts[lo + size - 1]
    total = cum[lo + size - 1] - cum[lo]
    u, w = verts[lo + a - 1], verts[lo + a]
    s_left = cum[lo + a - 1] - cum[lo]
    s_right = total - s_left - engine.costs[u]
    rank = 0
    for u2, w2 in engine.edges:
        if (u2, w2) > (u, w):
            break
        left = engine.count_map(a, x, u2)
        if not left:
            continue
        right = engine.count_map(b, w2, y)
        if not right:
            continue
        c2 = engine.costs[u2]
        if (u2, w2) < (u, w):
            for sl, nl in left.items():
                nr = right.get(total - c2 - sl)
                if nr:
                    rank += nl * nr
        else:
            for sl in engine.sorted_keys(a, x, u2):
                if sl >= s_left:
                    break
                nr = right.get(total - c2 - sl)
                if nr:
                    rank += left[sl] * nr
    n_right = engine.count(b, w, y, s_right)
    rank_left = _rank_walk(engine, verts, cum, lo, a)
    rank_right = _rank_walk(engine, verts, cum, lo + a, b)
    return rank + rank_left * n_right + rank_right


def _resolve_node(engine: LabelCounts, size, x, y, total, rank):
    """Invert the canonical (boundary pair, cost split) enumeration."""
    a, b = engine.split(size)
    for u2, w2 in engine.edges:
        left = engine.count_map(a, x, u2)
        if not left:
            continue
        right = engine.count_map(b, w2, y)
        if not right:
            continue
        c2 = engine.costs[u2]
        for sl in engine.sorted_keys(a, x, u2):
            nr = right.get(total - c2 - sl)
            if not nr:
                continue
            mass = left[sl] * nr
            if rank < mass:
                rank_left, rank_right = divmod(rank, nr)
                return u2, w2, sl, total - c2 - sl, rank_left, rank_right
            rank -= mass
    raise RangeError("rank beyond label count")


# ---------------------------------------------------------------------------
# Store


class PointwiseStore:
    """Entropy-ranked walk store; query time O(lg n) tree levels."""

    def __init__(self, graph, n, precision, branching, first, last, cost, rank0,
                 engine=None):
        self.graph = graph
        self.n = n
        self.precision = precision
        self.branching = branching
        self.first = first
        self.last = last
        self.cost = cost
        self.rank0 = rank0
        self.engine = engine or LabelCounts(graph, precision)
        self._resolved = {}

    @property
    def root_count(self) -> int:
        return self.engine.count(self.n + 1, self.first, self.last, self.cost)

    @property
    def payload_bits(self) -> int:
        total = self.root_count
        return ceil_log2(total) if total > 1 else 0

    @property
    def header_bits(self) -> int:
        out = bytearray()
        write_varint(out, self.n)
        write_varint(out, self.precision)
        write_varbig(out, self.cost)
        return 8 * (len(out) + 3)  # + branching and two endpoint bytes

    def vertex_at(self, q: int, probes: set | None = None) -> int:
        if not 0 <= q <= self.n:
            raise RangeError(f"index {q} outside [0,{self.n}]")
        lo, size = 0, self.n + 1
        x, y, total, rank = self.first, self.last, self.cost, self.rank0
        while size > 1:
            node = self._resolved.get((lo, size))
            if node is None:
                node = _resolve_node(self.engine, size, x, y, total, rank)
                self._resolved[(lo, size)] = node
            u, w, s_left, s_right, rank_left, rank_right = node
            a, _ = self.engine.split(size)
            if q < a:
                size, y, total, rank = a, u, s_left, rank_left
            else:
                lo, q, size, x, total, rank = lo + a, q - a, size - a, w, s_right, rank_right
        return x

    def decode_walk(self) -> Walk:
        return Walk(self.graph, [self.vertex_at(i) for i in range(self.n + 1)])

    def body_bytes(self) -> bytes:
        out = bytearray()
        write_varint(out, self.n)
        write_varint(out, self.precision)
        out.append(self.branching)
        out.append(self.first)
        out.append(self.last)
        write_varbig(out, self.cost)
        write_varbig(out, self.rank0)
        return bytes(out)

    @classmethod
    def from_body(cls, cur: Cursor, graph: Graph) -> "PointwiseStore":
        n = cur.varint()
        precision = cur.varint()
        branching = cur.u8()
        first = cur.u8()
        last = cur.u8()
        cost = cur.varbig()
        rank0 = cur.varbig()
        return cls(graph, n, precision, branching, first, last, cost, rank0)


def build_pointwise(g: Graph, w: Walk, precision: int | None = None,
                    branching: int = 2, engine: LabelCounts | None = None) -> PointwiseStore:
    """Rank the walk among all walks sharing its root label.

    Passing a shared ``engine`` reuses count tables across builds with the
    same graph and precision.
    """
    if w.graph != g:
        raise InvalidWalkError("walk was built on a different graph")
    if branching != 2:
        raise ParameterError(
            "only branching 2 is supported; wider nodes blow the tuple "
            "enumeration past the configured cap"
        )
    n = w.length
    precision = n if precision is None else precision
    if precision < 1:
        precision = 1
    if engine is None:
        engine = LabelCounts(g, precision)
    elif engine.graph != g or engine.precision != precision:
        raise ParameterError("shared engine disagrees with graph or precision")
    cum = [0]
    for v in w.verts[:-1]:
        cum.append(cum[-1] + engine.costs[v])
    rank0 = _rank_walk(engine, w.verts, cum, 0, n + 1)
    return PointwiseStore(
        g, n, precision, branching, w.verts[0], w.verts[-1],
        cum[n], rank0, engine,
    )


def walk_from_rank(g: Graph, n: int, first: int, last: int, cost: int,
                   rank0: int, precision: int | None = None) -> Walk:
    """Full unranking; inverse of build_pointwise for a fixed root label."""
    store = PointwiseStore(
        g, n, n if precision is None else precision, 2, first, last, cost, rank0
    )
    total = store.root_count
    if not 0 <= rank0 < max(total, 1):
        raise RangeError(f"rank {rank0} outside [0,{total})")
    return store.decode_walk()


# ---------------------------------------------------------------------------
# Module-level operations mirroring the store's primitives


def label_of(g: Graph, verts, precision: int) -> NodeLabel:
    return LabelCounts(g, precision).label_of(verts)


def count_labeled(g: Graph, size: int, label, precision: int) -> int:
    """Number of vertex arrays of ``size`` leaves with the given label.

    ``label`` is a NodeLabel / (first, last, cost) triple, or a bare cost
    sum for root-style labels with free endpoints.
    """
    engine = LabelCounts(g, precision)
    if isinstance(label, NodeLabel):
        return engine.count(size, label.first, label.last, label.cost)
    if isinstance(label, tuple):
        first, last, cost = label
        return engine.count(size, first, last, cost)
    return engine.count_root(size, label)
