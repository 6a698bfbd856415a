"""On-disk store container: magic, version, embedded graph, digest, body.

Every store file embeds the canonical graph JSON plus its digest, so
queries are self-contained; when a caller supplies a graph alongside the
file, a digest mismatch refuses the store rather than decoding garbage.
"""

from __future__ import annotations

import hashlib

from . import dictionary as dict_mod
from . import general as general_mod
from . import pointwise as pointwise_mod
from . import regular as regular_mod
from .errors import FormatError, UnsupportedGraphError
from .fileio import Cursor, graph_from_json, graph_to_json, write_bytes
from .general import GeneralStore, PeriodicStore, SccStore, build_general
from .graph import Graph, Walk, analyze
from .pointwise import PointwiseStore, build_pointwise
from .regular import RegularStore, build_regular

STORE_VERSION = 1

_GENERAL_TAGS = {GeneralStore: 0, PeriodicStore: 1, SccStore: 2}
_GENERAL_TYPES = {v: k for k, v in _GENERAL_TAGS.items()}


def graph_digest(g: Graph) -> bytes:
    return hashlib.sha256(graph_to_json(g).encode("utf-8")).digest()


def magic_of(store) -> bytes:
    if isinstance(store, RegularStore):
        return regular_mod.MAGIC
    if isinstance(store, (GeneralStore, PeriodicStore, SccStore)):
        return general_mod.MAGIC
    if isinstance(store, PointwiseStore):
        return pointwise_mod.MAGIC
    raise FormatError(f"cannot serialize {type(store).__name__}")


def mode_of(store) -> str:
    if isinstance(store, RegularStore):
        return "regular"
    if isinstance(store, (GeneralStore, PeriodicStore, SccStore)):
        return "general"
    if isinstance(store, PointwiseStore):
        return "pointwise"
    return "dictionary"


def store_to_bytes(store) -> bytes:
    out = bytearray(magic_of(store))
    out.append(STORE_VERSION)
    write_bytes(out, graph_to_json(store.graph).encode("utf-8"))
    out.extend(graph_digest(store.graph))
    if isinstance(store, (GeneralStore, PeriodicStore, SccStore)):
        out.append(_GENERAL_TAGS[type(store)])
    out.extend(store.body_bytes())
    return bytes(out)


def store_from_bytes(data: bytes, graph: Graph | None = None):
    cur = Cursor(data)
    magic = cur.take(4)
    if magic not in (regular_mod.MAGIC, general_mod.MAGIC, pointwise_mod.MAGIC):
        raise FormatError(f"unknown store magic {magic!r}")
    version = cur.u8()
    if version != STORE_VERSION:
        raise FormatError(f"unsupported store version {version}")
    embedded = graph_from_json(cur.blob().decode("utf-8"))
    digest = cur.take(32)
    if digest != graph_digest(embedded):
        raise FormatError("embedded graph fails its digest check")
    if graph is not None and graph_digest(graph) != digest:
        raise UnsupportedGraphError(
            "store was built for a different graph (digest mismatch)"
        )
    g = embedded
    if magic == regular_mod.MAGIC:
        store = RegularStore.from_body(cur, g)
    elif magic == general_mod.MAGIC:
        tag = cur.u8()
        if tag not in _GENERAL_TYPES:
            raise FormatError(f"unknown general-store tag {tag}")
        store = _GENERAL_TYPES[tag].from_body(cur, g)
    else:
        store = PointwiseStore.from_body(cur, g)
    if not cur.done():
        raise FormatError("trailing bytes after store body")
    return store


def save_store(store, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(store_to_bytes(store))


def load_store(path: str, graph: Graph | None = None):
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] == dict_mod.MAGIC:
        return dict_mod.SuccinctDictionary.from_bytes(data)
    return store_from_bytes(data, graph)


def regular_suitable(g: Graph) -> bool:
    info = analyze(g)
    if not (info.is_regular and info.is_strongly_connected):
        return False
    if g.directed:
        return info.is_aperiodic
    return not info.is_bipartite or g.k == 1


def build_store(g: Graph, w: Walk, mode: str = "auto", strategy="spill_tree",
                branching: int = 2):
    """Mode routing: auto picks the regular store for regular non-bipartite
    connected graphs and the general store otherwise."""
    if mode == "auto":
        mode = "regular" if regular_suitable(g) else "general"
    if mode == "regular":
        return build_regular(g, w, strategy=strategy, branching=branching)
    if mode == "general":
        return build_general(g, w, strategy=strategy, branching=branching)
    if mode == "pointwise":
        return build_pointwise(g, w, branching=branching)
    raise FormatError(f"unknown mode {mode!r}")
