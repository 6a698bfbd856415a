"""Bijective ranking of fixed-endpoint walks with positional decoding.

A length-l walk from x to y is encoded as an integer in [1, N_l(x,y)] where
N_l(x,y) is the exact number of such walks.  Encoding is a B-way divide and
conquer: the interior split vertices form a tuple Z, ranked through a
directory of tuples sorted by how many walks pass through them, and the
per-segment codes K_1..K_B are mixed-radix-packed after it.  Decoding a
single position recovers Z by predecessor search over the directory prefix
sums and recurses only into the segment holding the position, so it touches
O(lg l) recursion levels instead of unranking the whole walk.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Sequence

from .config import CODEC_TUPLE_CAP
from .errors import InvalidWalkError, ParameterError, RangeError
from .graph import CountTable, Graph, Walk


def predecessor_monotone(prefix_sums: Sequence[int], key: int) -> int:
    """Index of the bucket containing ``key``.

    ``prefix_sums`` is strictly increasing; bucket i covers the value range
    (prefix_sums[i-1], prefix_sums[i]].  Raises for keys outside [1, last].
    """
    if not prefix_sums:
        raise RangeError("empty prefix sums")
    if key < 1 or key > prefix_sums[-1]:
        raise RangeError(f"key {key} outside [1,{prefix_sums[-1]}]")
    return bisect.bisect_left(prefix_sums, key)


class MonotonePredecessor:
    """Bucket search tuned for non-decreasing gaps.

    A sampled jump table narrows the candidate range before a local binary
    search; with sorted gaps the expected number of probes stays small.  The
    answers always match ``predecessor_monotone``; the probe count is
    measured, not proven.
    """

    def __init__(self, prefix_sums: Sequence[int]):
        if not prefix_sums:
            raise RangeError("empty prefix sums")
        self.prefix_sums = list(prefix_sums)
        total = self.prefix_sums[-1]
        m = len(self.prefix_sums)
        self.cell = max(1, total // m)
        self.table = [
            bisect.bisect_left(self.prefix_sums, c * self.cell + 1) for c in range(m + 1)
        ]
        self.probes = 0

    def query(self, key: int) -> int:
        if key < 1 or key > self.prefix_sums[-1]:
            raise RangeError(f"key {key} outside [1,{self.prefix_sums[-1]}]")
        m = len(self.prefix_sums)
        c_true = (key - 1) // self.cell
        c = min(c_true, m - 1)
        lo = self.table[c]
        hi = min(self.table[c + 1] + 1, m) if c == c_true and c + 1 <= m else m
        self.probes += 2 + max(1, (hi - lo).bit_length())
        return bisect.bisect_left(self.prefix_sums, key, lo, hi)


@dataclass(frozen=True)
class WalkCode:
    """Rank of a fixed-endpoint walk: 1 <= value <= N_l(x, y)."""

    value: int
    x: int
    y: int
    l: int


class _Directory:
    """All interior-vertex tuples for one (x, y, l), sorted by walk count."""

    __slots__ = ("tuples", "index", "prefix", "seg_counts", "suffix")

    def __init__(self, tuples, prefix, seg_counts, suffix):
        self.tuples = tuples
        self.index = {tup: i for i, tup in enumerate(tuples)}
        self.prefix = prefix
        self.seg_counts = seg_counts
        self.suffix = suffix


class CodecTables:
    """Graph-derived ranking tables; immutable once built, safe to share.

    Directories are deterministic functions of (graph, branching) and are
    never serialized alongside walk data.  ``leaf_table_max`` optionally
    memoizes full enumerations for segments up to that length, trading
    lookup-table space for recursion depth.
    """

    def __init__(
        self,
        graph: Graph,
        branching: int = 2,
        count_table: CountTable | None = None,
        leaf_table_max: int = 0,
    ):
        if branching < 2:
            raise ParameterError("branching must be >= 2")
        self.graph = graph
        self.branching = branching
        self.counts = count_table if count_table is not None else graph.counts()
        self.leaf_table_max = leaf_table_max
        self._dirs = {}
        self._bounds = {}
        self._leaf_decode = {}
        self._leaf_encode = {}

    def segment_bounds(self, l: int):
        """Split positions 0 = b_0 <= ... <= b_B = l with b_i = floor(i*l/B)."""
        if l not in self._bounds:
            B = self.branching
            self._bounds[l] = tuple((i * l) // B for i in range(B + 1))
        return self._bounds[l]

    def walk_count(self, x: int, y: int, l: int) -> int:
        return self.counts.count(x, y, l)

    def directory(self, x: int, y: int, l: int) -> _Directory:
        key = (x, y, l)
        cached = self._dirs.get(key)
        if cached is not None:
            return cached
        B = self.branching
        k = self.graph.k
        if k ** (B - 1) > CODEC_TUPLE_CAP:
            raise ParameterError(
                f"directory of {k}^{B - 1} tuples exceeds cap {CODEC_TUPLE_CAP}"
            )
        bounds = self.segment_bounds(l)
        seg_lens = [bounds[i + 1] - bounds[i] for i in range(B)]
        entries = []
        tup = [0] * (B - 1)

        def fill(pos: int, partial: int, first: int):
            if partial == 0:
                return
            if pos == B - 1:
                last = self.walk_count(first, y, seg_lens[B - 1])
                if last:
                    counts = tuple(
                        self.walk_count(
                            (x, *tup)[i], (*tup, y)[i], seg_lens[i]
                        )
                        for i in range(B)
                    )
                    entries.append((partial * last, tuple(tup), counts))
                return
            for z in range(k):
                tup[pos] = z
                fill(pos + 1, partial * self.walk_count(first, z, seg_lens[pos]), z)

        fill(0, 1, x)
        entries.sort(key=lambda e: (e[0], e[1]))
        tuples = []
        prefix = []
        seg_counts = []
        suffix = []
        acc = 0
        for product, t, counts in entries:
            acc += product
            tuples.append(t)
            prefix.append(acc)
            seg_counts.append(counts)
            sfx = [1] * B
            for i in range(B - 2, -1, -1):
                sfx[i] = sfx[i + 1] * counts[i + 1]
            suffix.append(tuple(sfx))
        directory = _Directory(tuples, prefix, seg_counts, suffix)
        self._dirs[key] = directory
        return directory

    def _leaf_table(self, x: int, y: int, l: int):
        key = (x, y, l)
        if key not in self._leaf_decode:
            total = self.walk_count(x, y, l)
            table = [None] * total
            for verts in _enumerate_walks(self.graph, x, y, l):
                code = self._encode(verts, 0, l, use_leaf=False)
                table[code - 1] = verts
            self._leaf_decode[key] = table
            self._leaf_encode[key] = {w: i + 1 for i, w in enumerate(table)}
        return self._leaf_decode[key], self._leaf_encode[key]

    # -- encoding ------------------------------------------------------------

    def _encode(self, verts, lo: int, hi: int, use_leaf: bool = True) -> int:
        l = hi - lo
        if l <= 1:
            return 1
        x, y = verts[lo], verts[hi]
        if use_leaf and l <= self.leaf_table_max:
            _, enc = self._leaf_table(x, y, l)
            return enc[tuple(verts[lo : hi + 1])]
        bounds = self.segment_bounds(l)
        tup = tuple(verts[lo + b] for b in bounds[1:-1])
        directory = self.directory(x, y, l)
        z = directory.index.get(tup)
        if z is None:
            raise InvalidWalkError(f"no walks pass through {tup} between {x} and {y}")
        counts = directory.seg_counts[z]
        rank = 0
        for i in range(self.branching):
            k_i = self._encode(verts, lo + bounds[i], lo + bounds[i + 1], use_leaf)
            rank = rank * counts[i] + (k_i - 1)
        base = directory.prefix[z - 1] if z else 0
        return base + rank + 1

    # -- decoding ------------------------------------------------------------

    def _decode_vertex(self, x, y, l, code, q, depth_box, use_leaf=True) -> int:
        if q == 0:
            return x
        if q == l:
            return y
        depth_box[0] += 1
        if use_leaf and l <= self.leaf_table_max:
            dec, _ = self._leaf_table(x, y, l)
            return dec[code - 1][q]
        directory = self.directory(x, y, l)
        z = predecessor_monotone(directory.prefix, code)
        rest = code - (directory.prefix[z - 1] if z else 0) - 1
        tup = directory.tuples[z]
        bounds = self.segment_bounds(l)
        for i in range(1, self.branching):
            if q == bounds[i]:
                return tup[i - 1]
        i = bisect.bisect_right(bounds, q) - 1
        counts = directory.seg_counts[z]
        k_i = (rest // directory.suffix[z][i]) % counts[i] + 1
        ends = (x, *tup, y)
        return self._decode_vertex(
            ends[i], ends[i + 1], bounds[i + 1] - bounds[i], k_i, q - bounds[i],
            depth_box, use_leaf,
        )

    def _decode_full(self, x, y, l, code, out, use_leaf=True) -> None:
        if l == 0:
            return
        if l == 1:
            out.append(y)
            return
        if use_leaf and l <= self.leaf_table_max:
            dec, _ = self._leaf_table(x, y, l)
            out.extend(dec[code - 1][1:])
            return
        directory = self.directory(x, y, l)
        z = predecessor_monotone(directory.prefix, code)
        rest = code - (directory.prefix[z - 1] if z else 0) - 1
        tup = directory.tuples[z]
        bounds = self.segment_bounds(l)
        counts = directory.seg_counts[z]
        ends = (x, *tup, y)
        for i in range(self.branching):
            k_i = (rest // directory.suffix[z][i]) % counts[i] + 1
            self._decode_full(ends[i], ends[i + 1], bounds[i + 1] - bounds[i], k_i, out, use_leaf)


def _enumerate_walks(g: Graph, x: int, y: int | None, l: int):
    """Brute-force generator of walks (as vertex tuples) for small l."""
    stack = [(x,)]
    while stack:
        verts = stack.pop()
        if len(verts) == l + 1:
            if y is None or verts[-1] == y:
                yield verts
            continue
        for z in g.successors(verts[-1]):
            stack.append(verts + (z,))


def _check_segment(tables: CodecTables, verts: Sequence[int]) -> None:
    g = tables.graph
    for v in verts:
        if not 0 <= v < g.k:
            raise InvalidWalkError(f"vertex {v} outside [0,{g.k})")
    for a, b in zip(verts, verts[1:]):
        if not g.adj[a][b]:
            raise InvalidWalkError(f"({a},{b}) is not an edge")


def encode_walk(tables: CodecTables, verts: Sequence[int]) -> WalkCode:
    """Rank a walk segment (endpoints included in ``verts``)."""
    verts = tuple(verts)
    if not verts:
        raise InvalidWalkError("empty segment")
    _check_segment(tables, verts)
    l = len(verts) - 1
    value = tables._encode(verts, 0, l)
    return WalkCode(value=value, x=verts[0], y=verts[-1], l=l)


def _check_code(tables: CodecTables, code: WalkCode) -> None:
    total = tables.walk_count(code.x, code.y, code.l)
    if not 1 <= code.value <= total:
        raise RangeError(f"code {code.value} outside [1,{total}]")


def decode_vertex(tables: CodecTables, code: WalkCode, q: int, stats: dict | None = None) -> int:
    """Vertex at position q of the walk with this code, without full unranking."""
    if not 0 <= q <= code.l:
        raise RangeError(f"position {q} outside [0,{code.l}]")
    _check_code(tables, code)
    depth_box = [0]
    v = tables._decode_vertex(code.x, code.y, code.l, code.value, q, depth_box)
    if stats is not None:
        stats["depth"] = max(stats.get("depth", 0), depth_box[0])
    return v


def decode_full(tables: CodecTables, code: WalkCode) -> Walk:
    """Inverse of encode_walk."""
    _check_code(tables, code)
    out = [code.x]
    tables._decode_full(code.x, code.y, code.l, code.value, out)
    return Walk(tables.graph, out)


# ---------------------------------------------------------------------------
# Global (free-endpoint) walk ranking, used by uniform walk generation


def _pair_offsets(tables: CodecTables, n: int):
    pairs = []
    acc = 0
    k = tables.graph.k
    for x in range(k):
        for y in range(k):
            c = tables.walk_count(x, y, n)
            if c:
                pairs.append((x, y, acc))
                acc += c
    return pairs, acc


def global_rank(tables: CodecTables, walk: Walk) -> int:
    """Rank of a walk among all length-n walks, ordered by (start, end, code)."""
    n = walk.length
    pairs, _ = _pair_offsets(tables, n)
    x, y = walk.verts[0], walk.verts[-1]
    offset = next(off for px, py, off in pairs if (px, py) == (x, y))
    return offset + tables._encode(walk.verts, 0, n)


def walk_from_global_rank(tables: CodecTables, n: int, rank: int) -> Walk:
    """Inverse of global_rank: the rank-th length-n walk."""
    pairs, total = _pair_offsets(tables, n)
    if not 1 <= rank <= total:
        raise RangeError(f"rank {rank} outside [1,{total}]")
    x = y = None
    offset = 0
    for px, py, off in pairs:
        if off < rank:
            x, y, offset = px, py, off
        else:
            break
    return decode_full(tables, WalkCode(value=rank - offset, x=x, y=y, l=n))
