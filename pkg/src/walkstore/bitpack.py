"""Bit-level storage: bit vectors, mixed-radix coding, succinct arrays.

A SuccinctArray stores one bounded integer per position under a pluggable
packing strategy:

  packed        one field of ceil(lg M_i) bits per position; O(1) probes,
                up to 1 bit of rounding per element (0 for power-of-two
                radices).
  blocked(b)    groups of b consecutive positions share one mixed-radix
                field of ceil(lg prod M_i) bits; O(1) probes, at most 1
                rounding bit per group.
  spill_tree(K) a balanced binary combine tree; each internal node emits
                its value's low bits down to a spill of range about K and
                passes the spill upward, the root spill lands in the
                header.  Total size is within O(lg t) bits of the exact
                information content, reads walk one root-to-leaf path.

All field offsets are functions of the radix spec alone, never of the
stored values, so readers can locate any field without scanning.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .config import BLOCKED_TARGET_WIDTH
from .errors import (
    FormatError,
    ParameterError,
    RangeError,
    UnsupportedOperationError,
)
from .fileio import Cursor, write_varbig, write_varint
from .graph import ceil_log2

WORD_BITS = 64
_WORD_MASK = (1 << WORD_BITS) - 1

SA_MAGIC = b"SAR1"


class BitVec:
    """A growable bit vector addressed in 64-bit words.

    Reads and writes take arbitrary widths; out-of-range access raises,
    values never wrap silently.  ``probes`` collects the indices of words a
    read touches, for cell-probe instrumentation.
    """

    __slots__ = ("words", "nbits")

    def __init__(self, nbits: int = 0):
        self.nbits = nbits
        self.words = [0] * ((nbits + WORD_BITS - 1) // WORD_BITS)

    def write(self, pos: int, width: int, value: int) -> None:
        if width < 0 or pos < 0 or pos + width > self.nbits:
            raise RangeError(f"write of {width} bits at {pos} outside {self.nbits}")
        if value < 0 or value >> width:
            raise RangeError(f"value {value} does not fit in {width} bits")
        while width > 0:
            wi, bi = divmod(pos, WORD_BITS)
            take = min(width, WORD_BITS - bi)
            mask = ((1 << take) - 1) << bi
            self.words[wi] = (self.words[wi] & ~mask) | ((value << bi) & mask)
            value >>= take
            pos += take
            width -= take

    def read(self, pos: int, width: int, probes: set | None = None) -> int:
        if width < 0 or pos < 0 or pos + width > self.nbits:
            raise RangeError(f"read of {width} bits at {pos} outside {self.nbits}")
        value = 0
        shift = 0
        while width > 0:
            wi, bi = divmod(pos, WORD_BITS)
            if probes is not None:
                probes.add(wi)
            take = min(width, WORD_BITS - bi)
            value |= ((self.words[wi] >> bi) & ((1 << take) - 1)) << shift
            shift += take
            pos += take
            width -= take
        return value

    def append(self, width: int, value: int) -> None:
        pos = self.nbits
        self.nbits += width
        need = (self.nbits + WORD_BITS - 1) // WORD_BITS
        if need > len(self.words):
            self.words.extend([0] * (need - len(self.words)))
        self.write(pos, width, value)

    def to_bytes(self) -> bytes:
        nbytes = (self.nbits + 7) // 8
        out = bytearray(nbytes)
        for wi, word in enumerate(self.words):
            chunk = word.to_bytes(8, "little")
            start = wi * 8
            out[start : start + 8] = chunk[: max(0, min(8, nbytes - start))]
        return bytes(out)

    @classmethod
    def from_bytes(cls, raw: bytes, nbits: int) -> "BitVec":
        if len(raw) != (nbits + 7) // 8:
            raise FormatError("bit payload length mismatch")
        vec = cls(nbits)
        for wi in range(len(vec.words)):
            chunk = raw[wi * 8 : wi * 8 + 8]
            vec.words[wi] = int.from_bytes(chunk, "little")
        return vec

    def __eq__(self, other):
        return (
            isinstance(other, BitVec)
            and self.nbits == other.nbits
            and self.to_bytes() == other.to_bytes()
        )


# ---------------------------------------------------------------------------
# Radix specs and mixed-radix coding


@dataclass(frozen=True)
class RadixSpec:
    """Per-position radices M_0..M_{t-1}; values at i live in [0, M_i)."""

    radices: tuple

    def __post_init__(self):
        for m in self.radices:
            if m < 1:
                raise ParameterError("radices must be >= 1")

    @classmethod
    def uniform_spec(cls, radix: int, t: int) -> "RadixSpec":
        return cls((radix,) * t)

    @property
    def t(self) -> int:
        return len(self.radices)

    @property
    def uniform(self) -> bool:
        return len(set(self.radices)) <= 1

    def product(self) -> int:
        p = 1
        for m in self.radices:
            p *= m
        return p

    def info_bits(self) -> int:
        """ceil(sum of lg M_i): the exact information content, in bits."""
        p = self.product()
        return ceil_log2(p) if p > 1 else 0


def mixed_radix_rank(values: Sequence[int], spec: RadixSpec) -> int:
    """Big-endian positional value of ``values`` under ``spec``'s radices."""
    if len(values) != spec.t:
        raise RangeError("value count does not match spec")
    rank = 0
    for v, m in zip(values, spec.radices):
        if not 0 <= v < m:
            raise RangeError(f"value {v} outside radix {m}")
        rank = rank * m + v
    return rank


def mixed_radix_unrank(value: int, spec: RadixSpec) -> list:
    """Inverse of mixed_radix_rank."""
    if value < 0 or value >= spec.product():
        raise RangeError(f"rank {value} outside radix product")
    out = [0] * spec.t
    for i in range(spec.t - 1, -1, -1):
        value, out[i] = divmod(value, spec.radices[i])
    return out


# ---------------------------------------------------------------------------
# Strategies


def normalize_strategy(strategy, spec: RadixSpec | None = None):
    """Accepts 'packed' | 'blocked' | 'spill_tree' or ('blocked', b) /
    ('spill_tree', k_min) and fills in defaults from the spec."""
    if isinstance(strategy, str):
        name, param = strategy, None
    else:
        name, param = strategy
    if name == "packed":
        return ("packed", None)
    if name == "blocked":
        if param is None:
            param = _default_block_len(spec)
        if param < 1:
            raise ParameterError("blocked group size must be >= 1")
        return ("blocked", param)
    if name == "spill_tree":
        if param is None:
            param = max(2, (spec.t if spec else 2) ** 2)
        if param < 2:
            raise ParameterError("spill_tree K_min must be >= 2")
        return ("spill_tree", param)
    raise ParameterError(f"unknown strategy {name!r}")


def _default_block_len(spec: RadixSpec | None) -> int:
    if spec is None or spec.t == 0:
        return 8
    widest = max(ceil_log2(m) if m > 1 else 1 for m in spec.radices)
    return max(1, BLOCKED_TARGET_WIDTH // widest)


# --- packed -----------------------------------------------------------------


class _PackedLayout:
    def __init__(self, spec: RadixSpec):
        self.widths = [ceil_log2(m) if m > 1 else 0 for m in spec.radices]
        self.offsets = [0] * (spec.t + 1)
        for i, w in enumerate(self.widths):
            self.offsets[i + 1] = self.offsets[i] + w

    @property
    def payload_bits(self):
        return self.offsets[-1]


# --- blocked ----------------------------------------------------------------


class _BlockedLayout:
    def __init__(self, spec: RadixSpec, b: int):
        self.b = b
        t = spec.t
        self.group_of = lambda i: i // b
        self.group_widths = []
        self.group_offsets = [0]
        self.suffix = [1] * t  # product of radices after i within its group
        for lo in range(0, t, b):
            hi = min(lo + b, t)
            prod = 1
            for i in range(hi - 1, lo - 1, -1):
                self.suffix[i] = prod
                prod *= spec.radices[i]
            width = ceil_log2(prod) if prod > 1 else 0
            self.group_widths.append(width)
            self.group_offsets.append(self.group_offsets[-1] + width)

    @property
    def payload_bits(self):
        return self.group_offsets[-1]


# --- spill tree ---------------------------------------------------------------


class _SpillNode:
    __slots__ = ("lo", "hi", "left", "right", "range_", "bits", "offset")

    def __init__(self, lo, hi, left, right, range_, bits):
        self.lo = lo
        self.hi = hi
        self.left = left
        self.right = right
        self.range_ = range_   # spill range after emitting ``bits`` low bits
        self.bits = bits
        self.offset = 0


class _SpillLayout:
    """Balanced combine tree; per-node bit counts and offsets derive from the
    spec and K_min alone."""

    def __init__(self, spec: RadixSpec, k_min: int):
        self.k_min = k_min
        self.root = self._build(spec.radices, 0, spec.t)
        offset = 0
        stack = [self.root]
        while stack:  # pre-order offset assignment
            node = stack.pop()
            if node.left is None:
                continue
            node.offset = offset
            offset += node.bits
            stack.append(node.right)
            stack.append(node.left)
        self.payload_bits = offset
        self.root_range = self.root.range_

    def _build(self, radices, lo, hi):
        if hi - lo == 1:
            return _SpillNode(lo, hi, None, None, radices[lo], 0)
        mid = (lo + hi) // 2
        left = self._build(radices, lo, mid)
        right = self._build(radices, mid, hi)
        combined = left.range_ * right.range_
        if combined >= self.k_min:
            bits = (combined // self.k_min).bit_length() - 1
        else:
            bits = 0
        range_ = (combined + (1 << bits) - 1) >> bits
        return _SpillNode(lo, hi, left, right, range_, bits)


# ---------------------------------------------------------------------------
# SuccinctArray


class SuccinctArray:
    """Immutable sequence of bounded integers under one packing strategy.

    ``payload_bits`` is the bit vector length; for spill trees the root spill
    is accounted separately in ``spill_bits`` and the two together form
    ``data_bits``, the figure space claims are measured against.
    ``header_bits`` covers strategy parameters only.
    """

    def __init__(self, spec, strategy, payload, layout, root_spill=0):
        self.spec = spec
        self.strategy = strategy
        self.payload = payload
        self._layout = layout
        self.root_spill = root_spill

    # -- construction --------------------------------------------------------

    @classmethod
    def build(cls, spec: RadixSpec, values: Sequence[int], strategy="packed"):
        strategy = normalize_strategy(strategy, spec)
        if len(values) != spec.t:
            raise RangeError("value count does not match spec")
        for v, m in zip(values, spec.radices):
            if not 0 <= v < m:
                raise RangeError(f"value {v} outside radix {m}")
        name, param = strategy
        if name == "packed":
            layout = _PackedLayout(spec)
            vec = BitVec(layout.payload_bits)
            for i, v in enumerate(values):
                vec.write(layout.offsets[i], layout.widths[i], v)
            return cls(spec, strategy, vec, layout)
        if name == "blocked":
            layout = _BlockedLayout(spec, param)
            vec = BitVec(layout.payload_bits)
            for gi, lo in enumerate(range(0, spec.t, param)):
                hi = min(lo + param, spec.t)
                rank = 0
                for i in range(lo, hi):
                    rank = rank * spec.radices[i] + values[i]
                vec.write(layout.group_offsets[gi], layout.group_widths[gi], rank)
            return cls(spec, strategy, vec, layout)
        layout = _SpillLayout(spec, param)
        vec = BitVec(layout.payload_bits)
        root_spill = cls._spill_encode(layout.root, values, vec)
        return cls(spec, strategy, vec, layout, root_spill)

    @staticmethod
    def _spill_encode(node, values, vec) -> int:
        if node.left is None:
            return values[node.lo]
        s_left = SuccinctArray._spill_encode(node.left, values, vec)
        s_right = SuccinctArray._spill_encode(node.right, values, vec)
        v = s_left * node.right.range_ + s_right
        if node.bits:
            vec.write(node.offset, node.bits, v & ((1 << node.bits) - 1))
        return v >> node.bits

    # -- access ---------------------------------------------------------------

    def get(self, i: int, probes: set | None = None) -> int:
        if not 0 <= i < self.spec.t:
            raise RangeError(f"index {i} outside [0,{self.spec.t})")
        name, _ = self.strategy
        if name == "packed":
            lay = self._layout
            width = lay.widths[i]
            return self.payload.read(lay.offsets[i], width, probes) if width else 0
        if name == "blocked":
            lay = self._layout
            gi = lay.group_of(i)
            rank = self.payload.read(lay.group_offsets[gi], lay.group_widths[gi], probes)
            return (rank // lay.suffix[i]) % self.spec.radices[i]
        node = self._layout.root
        spill = self.root_spill
        while node.left is not None:
            v = spill << node.bits
            if node.bits:
                v |= self.payload.read(node.offset, node.bits, probes)
            s_left, s_right = divmod(v, node.right.range_)
            if i < node.left.hi:
                node, spill = node.left, s_left
            else:
                node, spill = node.right, s_right
        return spill

    def values(self) -> list:
        return [self.get(i) for i in range(self.spec.t)]

    # -- accounting -------------------------------------------------------------

    @property
    def payload_bits(self) -> int:
        return self.payload.nbits

    @property
    def spill_bits(self) -> int:
        if self.strategy[0] != "spill_tree":
            return 0
        r = self._layout.root_range
        return ceil_log2(r) if r > 1 else 0

    @property
    def data_bits(self) -> int:
        return self.payload_bits + self.spill_bits

    @property
    def header_bits(self) -> int:
        if self.strategy[0] == "spill_tree":
            return 16 + 2 * self.spill_bits
        return 16

    # -- serialization ------------------------------------------------------------

    _TAGS = {"packed": 0, "blocked": 1, "spill_tree": 2}
    _NAMES = {v: k for k, v in _TAGS.items()}

    def to_bytes(self) -> bytes:
        out = bytearray(SA_MAGIC)
        name, param = self.strategy
        out.append(self._TAGS[name])
        write_varint(out, self.spec.t)
        if self.spec.uniform and self.spec.t:
            out.append(1)
            write_varbig(out, self.spec.radices[0])
        else:
            out.append(0)
            for m in self.spec.radices:
                write_varbig(out, m)
        if name == "blocked":
            write_varint(out, param)
        elif name == "spill_tree":
            write_varbig(out, param)
            write_varbig(out, self.root_spill)
        write_varint(out, self.payload.nbits)
        out.extend(self.payload.to_bytes())
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "SuccinctArray":
        cur = Cursor(data)
        arr = cls.read_from(cur)
        if not cur.done():
            raise FormatError("trailing bytes after succinct array")
        return arr

    @classmethod
    def read_from(cls, cur: Cursor) -> "SuccinctArray":
        cur.expect(SA_MAGIC)
        tag = cur.u8()
        if tag not in cls._NAMES:
            raise FormatError(f"unknown strategy tag {tag}")
        name = cls._NAMES[tag]
        t = cur.varint()
        if cur.u8() == 1:
            spec = RadixSpec.uniform_spec(cur.varbig(), t)
        else:
            spec = RadixSpec(tuple(cur.varbig() for _ in range(t)))
        param = None
        root_spill = 0
        if name == "blocked":
            param = cur.varint()
        elif name == "spill_tree":
            param = cur.varbig()
            root_spill = cur.varbig()
        nbits = cur.varint()
        payload = BitVec.from_bytes(cur.take((nbits + 7) // 8), nbits)
        strategy = normalize_strategy((name, param), spec)
        if name == "packed":
            layout = _PackedLayout(spec)
        elif name == "blocked":
            layout = _BlockedLayout(spec, strategy[1])
        else:
            layout = _SpillLayout(spec, strategy[1])
        if layout.payload_bits != nbits:
            raise FormatError("payload length disagrees with spec")
        return cls(spec, strategy, payload, layout, root_spill)

    def __eq__(self, other):
        return isinstance(other, SuccinctArray) and self.to_bytes() == other.to_bytes()


def sa_build(spec: RadixSpec, values: Sequence[int], strategy="packed") -> SuccinctArray:
    return SuccinctArray.build(spec, values, strategy)


def sa_get(arr: SuccinctArray, i: int, probes: set | None = None) -> int:
    return arr.get(i, probes)


# ---------------------------------------------------------------------------
# Append-capable arrays (packed and blocked only)


class AppendableArray:
    """Append-only packed/blocked array over a radix generator.

    ``radix_fn(i)`` declares the radix of position i.  Gets serve flushed
    positions from the bit vector and the unflushed tail from the buffer;
    ``finalize()`` flushes the partial group and seals the array, producing
    a payload bit-for-bit identical to a batch build over the same spec.
    """

    def __init__(self, radix_fn: Callable[[int], int], strategy="blocked"):
        if isinstance(strategy, str):
            name, param = strategy, None
        else:
            name, param = strategy
        if name == "spill_tree":
            raise UnsupportedOperationError("spill_tree arrays do not support append")
        if name not in ("packed", "blocked"):
            raise ParameterError(f"unknown strategy {name!r}")
        if name == "blocked":
            param = 8 if param is None else param
            if param < 1:
                raise ParameterError("blocked group size must be >= 1")
        self.strategy = (name, param)
        self.radix_fn = radix_fn
        self.payload = BitVec()
        self.radices = []
        self.buffer = []
        self.flushed = 0
        self.sealed = False
        self._offsets = [0]    # packed: per position; blocked: per group
        self._widths = []      # same granularity as _offsets
        self._suffix = []      # blocked: per flushed position

    def __len__(self):
        return len(self.radices)

    def append(self, value: int) -> None:
        if self.sealed:
            raise UnsupportedOperationError("array already finalized")
        i = len(self.radices)
        m = self.radix_fn(i)
        if m < 1:
            raise ParameterError("radix generator produced radix < 1")
        if not 0 <= value < m:
            raise RangeError(f"value {value} outside radix {m} at position {i}")
        self.radices.append(m)
        name, b = self.strategy
        if name == "packed":
            width = ceil_log2(m) if m > 1 else 0
            self._widths.append(width)
            self._offsets.append(self._offsets[-1] + width)
            self.payload.append(width, value)
            self.flushed += 1
            return
        self.buffer.append(value)
        if len(self.buffer) == b:
            self._flush_group()

    def _flush_group(self):
        lo = self.flushed
        rank = 0
        width_prod = 1
        suffix = [1] * len(self.buffer)
        for off in range(len(self.buffer) - 1, -1, -1):
            suffix[off] = width_prod
            width_prod *= self.radices[lo + off]
        for off, v in enumerate(self.buffer):
            rank = rank * self.radices[lo + off] + v
        width = ceil_log2(width_prod) if width_prod > 1 else 0
        self._widths.append(width)
        self._offsets.append(self._offsets[-1] + width)
        self._suffix.extend(suffix)
        self.payload.append(width, rank)
        self.flushed += len(self.buffer)
        self.buffer = []

    def get(self, i: int, probes: set | None = None) -> int:
        if not 0 <= i < len(self.radices):
            raise RangeError(f"index {i} outside [0,{len(self.radices)})")
        if i >= self.flushed:
            return self.buffer[i - self.flushed]
        name, b = self.strategy
        if name == "packed":
            width = self._widths[i]
            return self.payload.read(self._offsets[i], width, probes) if width else 0
        gi = i // b
        rank = self.payload.read(self._offsets[gi], self._widths[gi], probes)
        return (rank // self._suffix[i]) % self.radices[i]

    def finalize(self) -> SuccinctArray:
        if self.sealed:
            raise UnsupportedOperationError("array already finalized")
        if self.buffer:
            self._flush_group()
        self.sealed = True
        spec = RadixSpec(tuple(self.radices))
        name, param = self.strategy
        if name == "packed":
            layout = _PackedLayout(spec)
        else:
            layout = _BlockedLayout(spec, param)
        if layout.payload_bits != self.payload.nbits:
            raise RangeError("append bookkeeping out of sync with layout")
        return SuccinctArray(spec, self.strategy, self.payload, layout)
