"""Succinct store for walks on connected non-bipartite regular graphs.

Milestones every l steps go into one succinct array (radix |G|), the walk
code of each length-l block goes into a second (radix close to d^l / |G|).
A query reads two milestones and one block code, then decodes a single
position of the block.  The block length l is the smallest one for which
every pairwise walk count N_l(x,y) fits under (1/|G| + 1/n^2) d^l, checked
with exact integer arithmetic; short walks fall back to plain packing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bitpack import AppendableArray, RadixSpec, SuccinctArray, normalize_strategy
from .codec import CodecTables, WalkCode, decode_vertex, encode_walk
from .errors import (
    FormatError,
    InvalidWalkError,
    ParameterError,
    RangeError,
    UnsupportedGraphError,
    UnsupportedOperationError,
)
from .fileio import Cursor, write_varint
from .graph import Graph, Walk, analyze

MAGIC = b"RWR1"


def _require_regular(g: Graph):
    info = analyze(g)
    if not info.is_regular:
        raise UnsupportedGraphError("graph is not regular")
    if not info.is_strongly_connected:
        raise UnsupportedGraphError("graph is not connected")
    if g.directed:
        if not info.is_aperiodic:
            raise UnsupportedGraphError("directed regular graph must be aperiodic")
    elif info.is_bipartite and g.k > 1:
        raise UnsupportedGraphError("bipartite graph; use the general store")
    return info.degree


def _scan_cap(n: int) -> int:
    # block lengths scale with lg n on mixing graphs; graphs that need more
    # than this are effectively non-mixing and fall back to plain storage
    # rather than stalling the build on an O(n)-length scan
    return 64 * max(1, (max(n, 2) - 1).bit_length())


def choose_l(g: Graph, n: int) -> int | None:
    """Smallest block length l whose walk counts all fit the block radix.

    Returns None when no l below n/2 (or the mixing-scale cap) works; the
    caller then stores plainly.  The admissibility test
    max_xy N_l(x,y) <= (1/|G| + 1/n^2) d^l runs on cross-multiplied
    integers, never floats.
    """
    d = _require_regular(g)
    if n < 1:
        raise RangeError("walk length must be >= 1")
    counts = g.counts()
    k = g.k
    nn = n * n
    power = 1
    for l in range(1, min(max(1, (n + 1) // 2), _scan_cap(n)) + 1):
        if 2 * l > n:
            return None
        power *= d
        num = (nn + k) * power
        mat = counts.power(l)
        if all(mat[x][y] * k * nn <= num for x in range(k) for y in range(k)):
            return l
    return None


@dataclass(frozen=True)
class RegularLayout:
    n: int
    l: int
    m: int            # full blocks
    rem: int          # n mod l
    block_radix: int  # floor((1/|G| + 1/n^2) d^l)
    rem_radix: int    # max_xy N_rem(x,y), 0 when rem == 0


def _layout_for(g: Graph, n: int, l: int) -> RegularLayout:
    d = g.out_deg[0]
    m, rem = divmod(n, l)
    block_radix = ((n * n + g.k) * d**l) // (g.k * n * n)
    rem_radix = 0
    if rem:
        mat = g.counts().power(rem)
        rem_radix = max(max(row) for row in mat)
    return RegularLayout(n=n, l=l, m=m, rem=rem, block_radix=block_radix, rem_radix=rem_radix)


def _check_admissible(g: Graph, layout: RegularLayout):
    mat = g.counts().power(layout.l)
    worst = max(max(row) for row in mat)
    if worst > layout.block_radix:
        raise ParameterError(
            f"block radix {layout.block_radix} below max count {worst}"
        )


def _block_spec(g: Graph, layout: RegularLayout) -> RadixSpec:
    radices = [layout.block_radix] * layout.m
    if layout.rem:
        radices.append(layout.rem_radix)
    return RadixSpec(tuple(radices))


def _milestone_spec(g: Graph, layout: RegularLayout) -> RadixSpec:
    t = layout.m + 1 + (1 if layout.rem else 0)
    return RadixSpec.uniform_spec(g.k, t)


class RegularStore:
    """Immutable encoded walk over a regular graph; query with vertex_at."""

    def __init__(self, graph, n, strategy, branching, layout=None,
                 milestones=None, blocks=None, plain=None, tables=None):
        self.graph = graph
        self.n = n
        self.strategy = strategy
        self.branching = branching
        self.layout = layout
        self.milestones = milestones
        self.blocks = blocks
        self.plain = plain
        self.tables = tables or CodecTables(graph, branching=branching)

    @property
    def is_plain(self) -> bool:
        return self.plain is not None

    def vertex_at(self, i: int, probes: set | None = None) -> int:
        if not 0 <= i <= self.n:
            raise RangeError(f"index {i} outside [0,{self.n}]")
        if self.plain is not None:
            return self.plain.get(i, probes)
        lay = self.layout
        if i % lay.l == 0 and i <= lay.m * lay.l:
            return self.milestones.get(i // lay.l, probes)
        if i == lay.n:
            return self.milestones.get(lay.m + 1, probes)
        b = min(i // lay.l, lay.m - 1) if i < lay.m * lay.l else lay.m
        x = self.milestones.get(b, probes)
        y = self.milestones.get(b + 1, probes)
        length = lay.l if b < lay.m else lay.rem
        code = WalkCode(self.blocks.get(b, probes) + 1, x, y, length)
        return decode_vertex(self.tables, code, i - b * lay.l)

    def decode_walk(self) -> Walk:
        return Walk(self.graph, [self.vertex_at(i) for i in range(self.n + 1)])

    @property
    def payload_bits(self) -> int:
        if self.plain is not None:
            return self.plain.data_bits
        return self.milestones.data_bits + self.blocks.data_bits

    @property
    def header_bits(self) -> int:
        arrays = [self.plain] if self.plain is not None else [self.milestones, self.blocks]
        param_bits = 8 * (_varint_len(self.n) + 2)  # n + mode/branching bytes
        if self.layout is not None:
            param_bits += 8 * _varint_len(self.layout.l)
        return param_bits + sum(a.header_bits for a in arrays)

    # -- serialization --------------------------------------------------------

    def body_bytes(self) -> bytes:
        out = bytearray()
        out.append(0 if self.plain is not None else 1)
        write_varint(out, self.n)
        out.append(self.branching)
        if self.plain is not None:
            out.extend(self.plain.to_bytes())
        else:
            write_varint(out, self.layout.l)
            out.extend(self.milestones.to_bytes())
            out.extend(self.blocks.to_bytes())
        return bytes(out)

    @classmethod
    def from_body(cls, cur: Cursor, graph: Graph) -> "RegularStore":
        mode = cur.u8()
        n = cur.varint()
        branching = cur.u8()
        if mode == 0:
            plain = SuccinctArray.read_from(cur)
            return cls(graph, n, plain.strategy, branching, plain=plain)
        l = cur.varint()
        if not 1 <= l <= max(1, n // 2):
            raise FormatError(f"block length {l} inconsistent with walk length {n}")
        layout = _layout_for(graph, n, l)
        milestones = SuccinctArray.read_from(cur)
        blocks = SuccinctArray.read_from(cur)
        if milestones.spec.radices != _milestone_spec(graph, layout).radices:
            raise FormatError("milestone array disagrees with the declared layout")
        if blocks.spec.radices != _block_spec(graph, layout).radices:
            raise FormatError("block array disagrees with the declared layout")
        return cls(graph, n, blocks.strategy, branching,
                   layout=layout, milestones=milestones, blocks=blocks)


def _varint_len(v: int) -> int:
    out = bytearray()
    write_varint(out, v)
    return len(out)


def build_plain(g: Graph, w: Walk) -> RegularStore:
    """Degenerate fallback: vertices packed at ceil(lg |G|) bits each."""
    spec = RadixSpec.uniform_spec(g.k, w.length + 1)
    arr = SuccinctArray.build(spec, list(w.verts), "packed")
    return RegularStore(g, w.length, ("packed", None), 2, plain=arr)


def build_regular(g: Graph, w: Walk, strategy="spill_tree", branching: int = 2) -> RegularStore:
    """Encode a walk on a regular graph; falls back to plain packing when the
    walk is too short for milestone blocks to pay off."""
    if w.graph != g:
        raise InvalidWalkError("walk was built on a different graph")
    n = w.length
    if n < 1:
        return build_plain(g, w)
    l = choose_l(g, n)
    if l is None or n < 2 * l:
        return build_plain(g, w)
    layout = _layout_for(g, n, l)
    _check_admissible(g, layout)
    tables = CodecTables(g, branching=branching)
    ms_values = [w.verts[i * l] for i in range(layout.m + 1)]
    if layout.rem:
        ms_values.append(w.verts[n])
    codes = []
    for i in range(layout.m):
        seg = w.verts[i * l : (i + 1) * l + 1]
        codes.append(encode_walk(tables, seg).value - 1)
    if layout.rem:
        codes.append(encode_walk(tables, w.verts[layout.m * l :]).value - 1)
    ms_spec = _milestone_spec(g, layout)
    blk_spec = _block_spec(g, layout)
    milestones = SuccinctArray.build(ms_spec, ms_values, normalize_strategy(strategy, ms_spec))
    blocks = SuccinctArray.build(blk_spec, codes, normalize_strategy(strategy, blk_spec))
    return RegularStore(
        g, n, blocks.strategy, branching,
        layout=layout, milestones=milestones, blocks=blocks, tables=tables,
    )


class RegularStoreBuilder:
    """Online (append-only) construction; blocked strategy only.

    The final walk length must be declared up front since the block radix
    depends on it.  After the last append, ``finalize()`` yields a store
    whose payload is byte-identical to a batch build with the same
    parameters.  Queries between appends serve flushed blocks from the
    arrays and the unflushed tail from a small buffer.
    """

    def __init__(self, g: Graph, n: int, branching: int = 2, strategy="blocked"):
        name, _ = strategy if not isinstance(strategy, str) else (strategy, None)
        if name not in ("blocked", "packed"):
            raise UnsupportedOperationError("online mode needs an appendable strategy")
        self.graph = g
        self.n = n
        self.branching = branching
        self.tables = CodecTables(g, branching=branching)
        self.count = 0
        self.pending = []
        l = choose_l(g, n) if n >= 1 else None
        if l is None or n < 2 * l:
            self.layout = None
            self.plain = AppendableArray(lambda i: g.k, "packed")
            self.milestones = None
            self.blocks = None
            return
        self.layout = _layout_for(g, n, l)
        _check_admissible(g, self.layout)
        self.plain = None
        ms_spec = _milestone_spec(g, self.layout)
        blk_spec = _block_spec(g, self.layout)
        ms_strategy = normalize_strategy(strategy, ms_spec)
        blk_strategy = normalize_strategy(strategy, blk_spec)
        self.milestones = AppendableArray(lambda i: g.k, ms_strategy)
        blk_radices = list(blk_spec.radices)
        self.blocks = AppendableArray(lambda i: blk_radices[i], blk_strategy)

    def append(self, v: int) -> None:
        if self.count > self.n:
            raise RangeError("walk already complete")
        if not 0 <= v < self.graph.k:
            raise InvalidWalkError(f"vertex {v} outside [0,{self.graph.k})")
        if self.pending and not self.graph.adj[self.pending[-1]][v]:
            raise InvalidWalkError(f"({self.pending[-1]},{v}) is not an edge")
        if self.plain is not None:
            self.plain.append(v)
            self.count += 1
            self.pending = [v]
            return
        pos = self.count
        self.count += 1
        lay = self.layout
        if pos == 0:
            self.milestones.append(v)
            self.pending = [v]
            return
        self.pending.append(v)
        if pos % lay.l == 0 and pos <= lay.m * lay.l:
            self.milestones.append(v)
            self.blocks.append(encode_walk(self.tables, self.pending).value - 1)
            self.pending = [v]
        elif pos == lay.n and lay.rem:
            self.milestones.append(v)
            self.blocks.append(encode_walk(self.tables, self.pending).value - 1)
            self.pending = [v]

    def vertex_at(self, i: int) -> int:
        if not 0 <= i < self.count:
            raise RangeError(f"index {i} outside appended range [0,{self.count})")
        if self.plain is not None:
            return self.plain.get(i)
        lay = self.layout
        flushed_through = (self.count - len(self.pending)) if self.pending else self.count
        if i >= flushed_through:
            return self.pending[i - flushed_through]
        if i % lay.l == 0 and i <= lay.m * lay.l:
            return self.milestones.get(i // lay.l)
        b = i // lay.l
        x = self.milestones.get(b)
        y = self.milestones.get(b + 1)
        code = WalkCode(self.blocks.get(b) + 1, x, y, lay.l)
        return decode_vertex(self.tables, code, i - b * lay.l)

    def finalize(self) -> RegularStore:
        if self.count != self.n + 1:
            raise InvalidWalkError(
                f"appended {self.count} vertices, declared walk needs {self.n + 1}"
            )
        if self.plain is not None:
            arr = self.plain.finalize()
            return RegularStore(self.graph, self.n, arr.strategy, self.branching, plain=arr)
        ms = self.milestones.finalize()
        blocks = self.blocks.finalize()
        return RegularStore(
            self.graph, self.n, blocks.strategy, self.branching,
            layout=self.layout, milestones=ms, blocks=blocks, tables=self.tables,
        )
