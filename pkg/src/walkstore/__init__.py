"""Succinct storage for walks on fixed graphs with fast positional queries."""

from .bitpack import (
    AppendableArray,
    BitVec,
    RadixSpec,
    SuccinctArray,
    mixed_radix_rank,
    mixed_radix_unrank,
    sa_build,
    sa_get,
)
from .codec import (
    CodecTables,
    WalkCode,
    decode_full,
    decode_vertex,
    encode_walk,
    predecessor_monotone,
)
from .dictionary import (
    DyadicDist,
    HuffmanGraph,
    SuccinctDictionary,
    build_dictionary,
    build_huffman_graph,
)
from .errors import (
    FormatError,
    GenerationError,
    InvalidWalkError,
    ParameterError,
    RangeError,
    ResourceError,
    UnsupportedGraphError,
    UnsupportedOperationError,
    WalkstoreError,
)
from .general import (
    BundleTable,
    GeneralStore,
    PeriodicStore,
    SccStore,
    build_bundle_table,
    build_general,
    choose_half_block,
    wrap_periodic,
    wrap_scc,
)
from .graph import (
    CountTable,
    Graph,
    GraphAnalysis,
    SpectralData,
    Walk,
    analyze,
    benchmark_pointwise_bits,
    benchmark_worstcase_bits,
    count_walks,
    gen_walk,
    spectral,
    total_walks,
)
from .pointwise import (
    LabelCounts,
    NodeLabel,
    PointwiseStore,
    build_pointwise,
    count_labeled,
    label_of,
)
from .regular import (
    RegularStore,
    RegularStoreBuilder,
    build_regular,
    choose_l,
)
from .report import SpaceReport, build_report
from .storefile import build_store, load_store, save_store

__version__ = "0.1.0"
