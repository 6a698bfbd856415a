"""Succinct store for walks on general directed graphs.

Core construction (strongly connected aperiodic graphs): milestones sit
every 2l' steps with a midpoint between each pair.  The walk code of each
half-block is sliced into near-equal groups per milestone vertex, so that
the (vertex, incoming-slice, outgoing-slice) bundle index is nearly uniform
and one succinct array of bundle indices carries almost exactly the
milestone entropy.  A second array stores, per block, the rank of the
triple (midpoint, within-slice index out, within-slice index in) among the
triples its two bundles allow.  Wrappers reduce periodic strongly connected
graphs (walk re-read over the graph of length-p subwalks) and arbitrary
digraphs (split at SCC switches) to the core case.

All slicing arithmetic is exact; the slice of a code K among s groups is
(K-1)*s // N + 1 and its within-slice index is K - ceil((j-1)*N/s).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .bitpack import RadixSpec, SuccinctArray, normalize_strategy
from .codec import CodecTables, WalkCode, decode_vertex, encode_walk
from .errors import (
    FormatError,
    InvalidWalkError,
    ParameterError,
    RangeError,
    UnsupportedGraphError,
)
from .fileio import Cursor, write_varbig, write_varint
from .graph import CountTable, Graph, Walk, analyze, ceil_log2

MAGIC = b"RWG1"


def _cdiv(a: int, b: int) -> int:
    return -(-a // b)


# ---------------------------------------------------------------------------
# Bundle tables


class BundleTable:
    """Group counts and slicing for half-blocks of one length.

    ``groups_out[x]`` (s_x) is the number of slices for walk codes leaving
    milestone vertex x, proportional to x's share of all length-L walks;
    ``groups_in[x]`` (t_x) the same for codes arriving at x.
    """

    def __init__(self, graph: Graph, n: int, half_len: int, counts: CountTable | None = None):
        if half_len < 1:
            raise ParameterError("half-block length must be >= 1")
        self.graph = graph
        self.n = n
        self.half_len = half_len
        self.counts = counts if counts is not None else graph.counts()
        total = self.counts.total(half_len)
        if total == 0:
            raise ParameterError(f"graph has no length-{half_len} walks")
        nn = n * n
        k = graph.k
        self.groups_out = [self.counts.row_total(x, half_len) * nn // total for x in range(k)]
        self.groups_in = [self.counts.col_total(x, half_len) * nn // total for x in range(k)]
        if min(self.groups_out) < 1 or min(self.groups_in) < 1:
            raise ParameterError(
                f"a vertex gets zero groups at half-block {half_len}; increase it"
            )
        self.sum_out = sum(self.groups_out)
        self.sum_in = sum(self.groups_in)
        self.pair = [s * t for s, t in zip(self.groups_out, self.groups_in)]
        self.sum_pair = sum(self.pair)
        self._prefix_out = _prefix(self.groups_out)
        self._prefix_in = _prefix(self.groups_in)
        self._prefix_pair = _prefix(self.pair)

    # -- slicing ---------------------------------------------------------------

    def _count(self, x: int, y: int, side: str) -> int:
        if side == "out":
            return self.counts.count(x, y, self.half_len)
        if side == "in":
            return self.counts.count(y, x, self.half_len)
        raise ParameterError(f"side must be 'out' or 'in', got {side!r}")

    def _groups(self, x: int, side: str) -> int:
        return self.groups_out[x] if side == "out" else self.groups_in[x]

    def slice_of(self, code: int, x: int, y: int, side: str) -> tuple:
        """(slice j, within-slice index k) of a half-block code.

        side 'out': code ranks a walk x -> y leaving milestone x.
        side 'in':  code ranks a walk y -> x entering milestone x.
        """
        total = self._count(x, y, side)
        if not 1 <= code <= total:
            raise RangeError(f"code {code} outside [1,{total}]")
        s = self._groups(x, side)
        j = (code - 1) * s // total + 1
        k = code - _cdiv((j - 1) * total, s)
        return j, k

    def code_of(self, j: int, k: int, x: int, y: int, side: str) -> int:
        """Inverse of slice_of."""
        total = self._count(x, y, side)
        s = self._groups(x, side)
        if not 1 <= j <= s:
            raise RangeError(f"slice {j} outside [1,{s}]")
        code = _cdiv((j - 1) * total, s) + k
        if not 1 <= k <= self.slice_size(x, j, y, side):
            raise RangeError(f"within-slice index {k} out of range")
        return code

    def slice_size(self, x: int, j: int, y: int, side: str) -> int:
        """Number of codes endpoint y contributes to slice j at vertex x."""
        total = self._count(x, y, side)
        s = self._groups(x, side)
        return _cdiv(j * total, s) - _cdiv((j - 1) * total, s)

    # -- bundle packing ----------------------------------------------------------

    def pack_interior(self, x: int, slice_in: int, slice_out: int) -> int:
        return (
            self._prefix_pair[x]
            + (slice_in - 1) * self.groups_out[x]
            + (slice_out - 1)
        )

    def unpack_interior(self, value: int) -> tuple:
        x = _bucket(self._prefix_pair, value)
        rem = value - self._prefix_pair[x]
        slice_in, slice_out = divmod(rem, self.groups_out[x])
        return x, slice_in + 1, slice_out + 1

    def pack_end(self, x: int, j: int, side: str) -> int:
        prefix = self._prefix_out if side == "out" else self._prefix_in
        return prefix[x] + (j - 1)

    def unpack_end(self, value: int, side: str) -> tuple:
        prefix = self._prefix_out if side == "out" else self._prefix_in
        x = _bucket(prefix, value)
        return x, value - prefix[x] + 1

    # -- triples --------------------------------------------------------------

    def triple_count(self, x: int, slice_out: int, x_next: int, slice_in: int) -> int:
        """Number of (midpoint, k_out, k_in) triples a context allows."""
        return sum(
            self.slice_size(x, slice_out, y, "out")
            * self.slice_size(x_next, slice_in, y, "in")
            for y in range(self.graph.k)
        )

    def triple_radix(self) -> int:
        """Upper bound on triple counts over every realizable context."""
        k = self.graph.k
        best = 1
        two = self.counts.power(2 * self.half_len)
        for x in range(k):
            for x_next in range(k):
                if two[x][x_next] == 0:
                    continue
                bound = sum(
                    _cdiv(self.counts.count(x, y, self.half_len), self.groups_out[x])
                    * _cdiv(self.counts.count(y, x_next, self.half_len), self.groups_in[x_next])
                    for y in range(k)
                )
                best = max(best, bound)
        return best

    def triple_rank(self, x, slice_out, x_next, slice_in, y, k_out, k_in) -> int:
        rank = 0
        for y2 in range(y):
            rank += self.slice_size(x, slice_out, y2, "out") * self.slice_size(
                x_next, slice_in, y2, "in"
            )
        size_in = self.slice_size(x_next, slice_in, y, "in")
        return rank + (k_out - 1) * size_in + k_in

    def triple_unrank(self, x, slice_out, x_next, slice_in, rank) -> tuple:
        for y in range(self.graph.k):
            block = self.slice_size(x, slice_out, y, "out") * self.slice_size(
                x_next, slice_in, y, "in"
            )
            if rank <= block:
                size_in = self.slice_size(x_next, slice_in, y, "in")
                k_out, k_in = divmod(rank - 1, size_in)
                return y, k_out + 1, k_in + 1
            rank -= block
        raise RangeError("triple rank beyond context count")


def _prefix(values):
    out = [0]
    for v in values:
        out.append(out[-1] + v)
    return out


def _bucket(prefix, value):
    for x in range(len(prefix) - 1):
        if value < prefix[x + 1]:
            return x
    raise RangeError(f"packed value {value} beyond {prefix[-1]}")


@dataclass(frozen=True)
class BundleCoords:
    vertex: int
    slice_in: int | None   # None at the first milestone
    slice_out: int | None  # None at the last milestone
    packed: int


def build_bundle_table(g: Graph, n: int, half_len: int) -> BundleTable:
    return BundleTable(g, n, half_len)


# ---------------------------------------------------------------------------
# Half-block admissibility


def choose_half_block(g: Graph, n: int) -> int | None:
    """Smallest half-block length meeting the exact admissibility conditions.

    (i) every vertex gets at least one group; (ii) every pairwise count is
    at least n^2 times the group counts it is sliced by, so each slice holds
    >= n^2 codes; (iii) the count-to-group ratios at full-block distance are
    uniform within a factor 1 + 4/n^2.  Returns None (plain mode) when no
    length up to n/4, capped at mixing scale O(lg n), qualifies.
    """
    counts = g.counts()
    k = g.k
    nn = n * n
    cap = 64 * max(1, (max(n, 2) - 1).bit_length())
    for half in range(1, min(n // 4, cap) + 1):
        total = counts.total(half)
        s = [counts.row_total(x, half) * nn // total for x in range(k)]
        t = [counts.col_total(x, half) * nn // total for x in range(k)]
        if min(s) < 1 or min(t) < 1:
            continue
        mat = counts.power(half)
        ok = True
        for x in range(k):
            for y in range(k):
                if mat[x][y] < nn * s[x] or mat[x][y] < nn * t[y]:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        two = counts.power(2 * half)
        ratios = [
            (two[x][xn], s[x] * t[xn]) for x in range(k) for xn in range(k)
        ]
        for num1, den1 in ratios:
            for num2, den2 in ratios:
                # num1/den1 <= (num2/den2) * (1 + 4/n^2), exactly
                if num1 * den2 * nn > num2 * den1 * (nn + 4):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return half
    return None


# ---------------------------------------------------------------------------
# Free-end tail coding (start vertex known, end free)


def tail_rank(counts: CountTable, verts) -> int:
    """Rank of a walk among all walks from verts[0] of the same length,
    ordered lexicographically by successor choice; 0-based."""
    g = counts.graph
    length = len(verts) - 1
    rank = 0
    for step in range(length):
        u, nxt = verts[step], verts[step + 1]
        remaining = length - 1 - step
        for w in g.successors(u):
            if w == nxt:
                break
            rank += counts.row_total(w, remaining)
    return rank


def tail_vertex(counts: CountTable, start: int, length: int, rank: int, q: int) -> int:
    """Vertex at position q of the rank-th length-``length`` walk from start."""
    g = counts.graph
    u = start
    for step in range(q):
        remaining = length - 1 - step
        for w in g.successors(u):
            c = counts.row_total(w, remaining)
            if rank < c:
                u = w
                break
            rank -= c
        else:
            raise RangeError("tail rank beyond walk count")
    return u


def tail_max_rank(counts: CountTable, length: int) -> int:
    return max(counts.row_total(x, length) for x in range(counts.graph.k))


# ---------------------------------------------------------------------------
# Core store (strongly connected aperiodic)


class GeneralStore:
    """Bundled store over a strongly connected aperiodic digraph."""

    def __init__(self, graph, n, branching, strategy, half_len=None,
                 bundles=None, triples=None, tail_len=0, tail_code=0,
                 plain=None, table=None, tables=None):
        self.graph = graph
        self.n = n
        self.branching = branching
        self.strategy = strategy
        self.half_len = half_len
        self.bundles = bundles
        self.triples = triples
        self.tail_len = tail_len
        self.tail_code = tail_code
        self.plain = plain
        self.table = table
        self.tables = tables or CodecTables(graph, branching=branching)

    @property
    def is_plain(self) -> bool:
        return self.plain is not None

    @property
    def block_count(self) -> int:
        return self.n // (2 * self.half_len) if self.half_len else 0

    # -- queries ---------------------------------------------------------------

    def _bundle_at(self, i: int, probes=None) -> BundleCoords:
        m = self.block_count
        value = self.bundles.get(i, probes)
        if i == 0:
            x, j = self.table.unpack_end(value, "out")
            return BundleCoords(x, None, j, value)
        if i == m:
            x, j = self.table.unpack_end(value, "in")
            return BundleCoords(x, j, None, value)
        x, j_in, j_out = self.table.unpack_interior(value)
        return BundleCoords(x, j_in, j_out, value)

    def vertex_at(self, q: int, probes: set | None = None) -> int:
        if not 0 <= q <= self.n:
            raise RangeError(f"index {q} outside [0,{self.n}]")
        if self.plain is not None:
            return self.plain.get(q, probes)
        L = self.half_len
        m = self.block_count
        block_span = 2 * L
        if q > m * block_span:
            anchor = self._bundle_at(m, probes).vertex
            return tail_vertex(self.table.counts, anchor, self.tail_len,
                               self.tail_code, q - m * block_span)
        if q % block_span == 0:
            return self._bundle_at(q // block_span, probes).vertex
        i = q // block_span
        here = self._bundle_at(i, probes)
        there = self._bundle_at(i + 1, probes)
        rank = self.triples.get(i, probes) + 1
        mid, k_out, k_in = self.table.triple_unrank(
            here.vertex, here.slice_out, there.vertex, there.slice_in, rank
        )
        offset = q - i * block_span
        if offset == L:
            return mid
        if offset < L:
            code = self.table.code_of(here.slice_out, k_out, here.vertex, mid, "out")
            wc = WalkCode(code, here.vertex, mid, L)
            return decode_vertex(self.tables, wc, offset)
        code = self.table.code_of(there.slice_in, k_in, there.vertex, mid, "in")
        wc = WalkCode(code, mid, there.vertex, L)
        return decode_vertex(self.tables, wc, offset - L)

    def decode_walk(self) -> Walk:
        return Walk(self.graph, [self.vertex_at(i) for i in range(self.n + 1)])

    # -- accounting -------------------------------------------------------------

    @property
    def payload_bits(self) -> int:
        if self.plain is not None:
            return self.plain.data_bits
        tail_bits = 0
        if self.tail_len:
            mx = tail_max_rank(self.table.counts, self.tail_len)
            tail_bits = ceil_log2(mx) if mx > 1 else 0
        return self.bundles.data_bits + self.triples.data_bits + tail_bits

    @property
    def header_bits(self) -> int:
        if self.plain is not None:
            return 8 * (_vlen(self.n) + 2) + self.plain.header_bits
        return (
            8 * (_vlen(self.n) + _vlen(self.half_len) + _vlen(self.tail_len) + 2)
            + self.bundles.header_bits
            + self.triples.header_bits
        )

    # -- serialization ------------------------------------------------------------

    def body_bytes(self) -> bytes:
        out = bytearray()
        out.append(0 if self.plain is not None else 1)
        write_varint(out, self.n)
        out.append(self.branching)
        if self.plain is not None:
            out.extend(self.plain.to_bytes())
            return bytes(out)
        write_varint(out, self.half_len)
        write_varint(out, self.tail_len)
        write_varbig(out, self.tail_code)
        out.extend(self.bundles.to_bytes())
        out.extend(self.triples.to_bytes())
        return bytes(out)

    @classmethod
    def from_body(cls, cur: Cursor, graph: Graph) -> "GeneralStore":
        mode = cur.u8()
        n = cur.varint()
        branching = cur.u8()
        if mode == 0:
            plain = SuccinctArray.read_from(cur)
            return cls(graph, n, branching, plain.strategy, plain=plain)
        half_len = cur.varint()
        tail_len = cur.varint()
        tail_code = cur.varbig()
        bundles = SuccinctArray.read_from(cur)
        triples = SuccinctArray.read_from(cur)
        if half_len < 1 or n // (2 * half_len) < 1:
            raise FormatError(f"half-block {half_len} inconsistent with length {n}")
        table = BundleTable(graph, n, half_len)
        m = n // (2 * half_len)
        expect = (table.sum_out,) + (table.sum_pair,) * (m - 1) + (table.sum_in,)
        if bundles.spec.radices != expect or triples.spec.t != m:
            raise FormatError("bundle arrays disagree with the declared layout")
        if tail_len != n - 2 * m * half_len:
            raise FormatError("tail length disagrees with the declared layout")
        return cls(graph, n, branching, bundles.strategy, half_len=half_len,
                   bundles=bundles, triples=triples, tail_len=tail_len,
                   tail_code=tail_code, table=table)


def _vlen(v: int) -> int:
    out = bytearray()
    write_varint(out, v)
    return len(out)


def _build_plain_general(g: Graph, w: Walk, branching=2) -> GeneralStore:
    spec = RadixSpec.uniform_spec(g.k, w.length + 1)
    arr = SuccinctArray.build(spec, list(w.verts), "packed")
    return GeneralStore(g, w.length, branching, ("packed", None), plain=arr)


def build_general_core(g: Graph, w: Walk, strategy="spill_tree", branching=2) -> GeneralStore:
    """Bundled store; falls back to plain packing when the walk is shorter
    than two full blocks."""
    info = analyze(g)
    if not (info.is_strongly_connected and info.is_aperiodic):
        raise UnsupportedGraphError(
            "core general store needs a strongly connected aperiodic graph"
        )
    n = w.length
    half = choose_half_block(g, n) if n >= 4 else None
    if half is None or n < 4 * half:
        return _build_plain_general(g, w, branching)
    table = BundleTable(g, n, half)
    tables = CodecTables(g, branching=branching)
    m = n // (2 * half)
    span = 2 * half

    packed_bundles = []
    slices = []  # (slice_in, slice_out) per milestone, for triple contexts
    for i in range(m + 1):
        x = w.verts[i * span]
        j_in = k_in = j_out = k_out = None
        if i > 0:
            seg = w.verts[i * span - half : i * span + 1]
            code = encode_walk(tables, seg).value
            j_in, k_in = table.slice_of(code, x, seg[0], "in")
        if i < m:
            seg = w.verts[i * span : i * span + half + 1]
            code = encode_walk(tables, seg).value
            j_out, k_out = table.slice_of(code, x, seg[-1], "out")
        if i == 0:
            packed_bundles.append(table.pack_end(x, j_out, "out"))
        elif i == m:
            packed_bundles.append(table.pack_end(x, j_in, "in"))
        else:
            packed_bundles.append(table.pack_interior(x, j_in, j_out))
        slices.append((j_in, k_in, j_out, k_out))

    triple_vals = []
    radix = table.triple_radix()
    for i in range(m):
        x, x_next = w.verts[i * span], w.verts[(i + 1) * span]
        mid = w.verts[i * span + half]
        _, _, j_out, k_out = slices[i]
        j_in, k_in, _, _ = slices[i + 1]
        rank = table.triple_rank(x, j_out, x_next, j_in, mid, k_out, k_in)
        if rank > radix:
            raise ParameterError("triple radix undershoots a realizable context")
        triple_vals.append(rank - 1)

    bundle_radices = (
        [table.sum_out] + [table.sum_pair] * (m - 1) + [table.sum_in]
    )
    bundle_spec = RadixSpec(tuple(bundle_radices))
    triple_spec = RadixSpec.uniform_spec(radix, m)
    bundles = SuccinctArray.build(
        bundle_spec, packed_bundles, normalize_strategy(strategy, bundle_spec)
    )
    triples = SuccinctArray.build(
        triple_spec, triple_vals, normalize_strategy(strategy, triple_spec)
    )
    tail_len = n - m * span
    tail_code = tail_rank(table.counts, w.verts[m * span :]) if tail_len else 0
    return GeneralStore(
        g, n, branching, bundles.strategy, half_len=half, bundles=bundles,
        triples=triples, tail_len=tail_len, tail_code=tail_code,
        plain=None, table=table, tables=tables,
    )


# ---------------------------------------------------------------------------
# Periodic wrapper: re-read the walk over the graph of length-p subwalks


class ProductGraph:
    """Derived graph whose vertices are the length-p subwalks starting in
    layer 0; deterministic given the base graph."""

    def __init__(self, base: Graph, period: int):
        self.base = base
        self.period = period
        level = {0: 0}
        queue = [0]
        while queue:
            u = queue.pop(0)
            for v in base.successors(u):
                if v not in level:
                    level[v] = (level[u] + 1) % period
                    queue.append(v)
        self.layer = [level[v] for v in range(base.k)]
        start_layer = [v for v in range(base.k) if self.layer[v] == 0]
        tuples = []
        for s in sorted(start_layer):
            stack = [(s,)]
            while stack:
                verts = stack.pop()
                if len(verts) == period + 1:
                    tuples.append(verts)
                    continue
                for z in sorted(base.successors(verts[-1]), reverse=True):
                    stack.append(verts + (z,))
        tuples.sort()
        self.tuples = tuples
        self.index = {t: i for i, t in enumerate(tuples)}
        if not tuples:
            raise UnsupportedGraphError("no length-p subwalks start in layer 0")
        edges = [
            (i, j)
            for i, ti in enumerate(tuples)
            for j, tj in enumerate(tuples)
            if ti[-1] == tj[0]
        ]
        self.graph = Graph(len(tuples), edges, directed=True)


class PeriodicStore:
    """General store for periodic strongly connected graphs: plain prefix
    and suffix of length < p, middle stored over the product graph."""

    def __init__(self, graph, n, period, prefix, suffix, inner, product=None):
        self.graph = graph
        self.n = n
        self.period = period
        self.prefix = prefix      # SuccinctArray of leading vertices (may be len 0)
        self.suffix = suffix
        self.inner = inner        # GeneralStore over the product graph, or None
        self.product = product

    @property
    def start(self) -> int:
        return self.prefix.spec.t

    @property
    def strategy(self):
        return self.inner.strategy if self.inner is not None else ("packed", None)

    def vertex_at(self, q: int, probes: set | None = None) -> int:
        if not 0 <= q <= self.n:
            raise RangeError(f"index {q} outside [0,{self.n}]")
        if q < self.start:
            return self.prefix.get(q, probes)
        if self.inner is None or q >= self.n + 1 - self.suffix.spec.t:
            return self.suffix.get(q - (self.n + 1 - self.suffix.spec.t), probes)
        j, r = divmod(q - self.start, self.period)
        return self.product.tuples[self.inner.vertex_at(j, probes)][r]

    def decode_walk(self) -> Walk:
        return Walk(self.graph, [self.vertex_at(i) for i in range(self.n + 1)])

    @property
    def payload_bits(self) -> int:
        inner = self.inner.payload_bits if self.inner else 0
        return self.prefix.data_bits + self.suffix.data_bits + inner

    @property
    def header_bits(self) -> int:
        inner = self.inner.header_bits if self.inner else 0
        return (
            8 * (_vlen(self.n) + _vlen(self.period))
            + self.prefix.header_bits + self.suffix.header_bits + inner
        )

    def body_bytes(self) -> bytes:
        out = bytearray()
        write_varint(out, self.n)
        write_varint(out, self.period)
        out.extend(self.prefix.to_bytes())
        out.extend(self.suffix.to_bytes())
        out.append(1 if self.inner is not None else 0)
        if self.inner is not None:
            out.extend(self.inner.body_bytes())
        return bytes(out)

    @classmethod
    def from_body(cls, cur: Cursor, graph: Graph) -> "PeriodicStore":
        n = cur.varint()
        period = cur.varint()
        prefix = SuccinctArray.read_from(cur)
        suffix = SuccinctArray.read_from(cur)
        inner = None
        product = None
        if cur.u8():
            product = ProductGraph(graph, period)
            inner = GeneralStore.from_body(cur, product.graph)
        return cls(graph, n, period, prefix, suffix, inner, product)


def wrap_periodic(g: Graph, w: Walk, strategy="spill_tree", branching=2):
    """Store a walk on a strongly connected graph of any period."""
    info = analyze(g)
    if not info.is_strongly_connected:
        raise UnsupportedGraphError("periodic wrapper needs strong connectivity")
    if info.is_aperiodic:
        return build_general_core(g, w, strategy, branching)
    period = info.period[0]
    if period == 0:  # single vertex, no self-loop: the walk is one vertex
        return _build_plain_general(g, w, branching)
    product = ProductGraph(g, period)
    n = w.length
    start = (period - product.layer[w.verts[0]]) % period
    blocks = (n - start) // period if n >= start else 0
    if blocks < 1:
        return _build_plain_general(g, w, branching)
    mid_end = start + blocks * period
    inner_walk = Walk(
        product.graph,
        [
            product.index[tuple(w.verts[start + j * period : start + (j + 1) * period + 1])]
            for j in range(blocks)
        ],
    )
    inner = build_general_core(product.graph, inner_walk, strategy, branching)
    k = g.k
    prefix = SuccinctArray.build(
        RadixSpec.uniform_spec(k, start), list(w.verts[:start]), "packed"
    )
    suffix_verts = list(w.verts[mid_end:])
    suffix = SuccinctArray.build(
        RadixSpec.uniform_spec(k, len(suffix_verts)), suffix_verts, "packed"
    )
    return PeriodicStore(g, n, period, prefix, suffix, inner, product)


# ---------------------------------------------------------------------------
# SCC wrapper: arbitrary directed graphs


class SccStore:
    """Splits the walk at SCC switches; per-SCC segments go through the
    periodic wrapper on the induced subgraph, switch positions are plain."""

    def __init__(self, graph, n, starts, scc_ids, segments, scc_list):
        self.graph = graph
        self.n = n
        self.starts = starts        # segment start positions, ascending
        self.scc_ids = scc_ids      # SCC index per segment
        self.segments = segments    # per-segment stores over local ids
        self.scc_list = scc_list

    @property
    def strategy(self):
        return self.segments[0].strategy

    def vertex_at(self, q: int, probes: set | None = None) -> int:
        if not 0 <= q <= self.n:
            raise RangeError(f"index {q} outside [0,{self.n}]")
        seg = bisect.bisect_right(self.starts, q) - 1
        local = self.segments[seg].vertex_at(q - self.starts[seg], probes)
        return self.scc_list[self.scc_ids[seg]][local]

    def decode_walk(self) -> Walk:
        return Walk(self.graph, [self.vertex_at(i) for i in range(self.n + 1)])

    @property
    def payload_bits(self) -> int:
        return sum(s.payload_bits for s in self.segments)

    @property
    def header_bits(self) -> int:
        switch_bits = 8 * sum(_vlen(s) for s in self.starts)
        return switch_bits + sum(s.header_bits for s in self.segments)

    def body_bytes(self) -> bytes:
        out = bytearray()
        write_varint(out, self.n)
        write_varint(out, len(self.segments))
        for start, scc_id, seg in zip(self.starts, self.scc_ids, self.segments):
            write_varint(out, start)
            write_varint(out, scc_id)
            out.append(0 if isinstance(seg, GeneralStore) else 1)
            out.extend(seg.body_bytes())
        return bytes(out)

    @classmethod
    def from_body(cls, cur: Cursor, graph: Graph) -> "SccStore":
        n = cur.varint()
        count = cur.varint()
        info = analyze(graph)
        scc_list = info.scc_list
        starts, scc_ids, segments = [], [], []
        for _ in range(count):
            starts.append(cur.varint())
            scc_id = cur.varint()
            scc_ids.append(scc_id)
            sub = _induced_subgraph(graph, scc_list[scc_id])
            if cur.u8() == 0:
                segments.append(GeneralStore.from_body(cur, sub))
            else:
                segments.append(PeriodicStore.from_body(cur, sub))
        return cls(graph, n, starts, scc_ids, segments, scc_list)


def _induced_subgraph(g: Graph, comp) -> Graph:
    local = {v: i for i, v in enumerate(comp)}
    edges = [
        (local[u], local[v])
        for u in comp
        for v in comp
        if g.adj[u][v]
    ]
    return Graph(len(comp), edges, directed=True)


def wrap_scc(g: Graph, w: Walk, strategy="spill_tree", branching=2):
    """Store a walk on an arbitrary directed graph."""
    info = analyze(g)
    if info.is_strongly_connected:
        return wrap_periodic(g, w, strategy, branching)
    scc_of = {}
    for idx, comp in enumerate(info.scc_list):
        for v in comp:
            scc_of[v] = idx
    starts = [0]
    for i in range(w.length):
        if scc_of[w.verts[i]] != scc_of[w.verts[i + 1]]:
            starts.append(i + 1)
    ends = starts[1:] + [w.length + 1]
    scc_ids, segments = [], []
    for start, end in zip(starts, ends):
        scc_id = scc_of[w.verts[start]]
        comp = info.scc_list[scc_id]
        sub = _induced_subgraph(g, comp)
        local = {v: i for i, v in enumerate(comp)}
        seg_walk = Walk(sub, [local[v] for v in w.verts[start:end]])
        scc_ids.append(scc_id)
        segments.append(wrap_periodic(sub, seg_walk, strategy, branching))
    return SccStore(g, w.length, starts, scc_ids, segments, info.scc_list)


def build_general(g: Graph, w: Walk, strategy="spill_tree", branching=2):
    """Entry point: routes to the core or the periodic/SCC wrappers."""
    if w.graph != g:
        raise InvalidWalkError("walk was built on a different graph")
    return wrap_scc(g, w, strategy, branching)
