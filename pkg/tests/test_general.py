import math
import random

import pytest

from conftest import enumerate_walks, four_vertex_aperiodic, two_scc_dag
from walkstore.errors import ParameterError, RangeError
from walkstore.fileio import Cursor
from walkstore.general import (
    BundleTable,
    GeneralStore,
    PeriodicStore,
    SccStore,
    build_bundle_table,
    build_general,
    build_general_core,
    choose_half_block,
    tail_max_rank,
    tail_rank,
    tail_vertex,
    wrap_periodic,
    wrap_scc,
)
from walkstore.graph import (
    Graph,
    Walk,
    benchmark_worstcase_bits,
    directed_cycle,
    gen_walk,
)


def test_bundle_table_fib_example(fib):
    table = build_bundle_table(fib, 4, 3)
    assert table.groups_out == [10, 6]
    # slices of the three codes from 0 to 0
    slices = [table.slice_of(K, 0, 0, "out") for K in (1, 2, 3)]
    assert [j for j, _ in slices] == [1, 4, 7]
    for j in range(1, 11):
        expect = 1 if j in (1, 4, 7) else 0
        assert table.slice_size(0, j, 0, "out") == expect


def test_bundle_slice_example_k(fib):
    table = build_bundle_table(fib, 4, 3)
    assert table.slice_of(2, 0, 0, "out") == (4, 1)


def test_single_group_is_identity():
    g = directed_cycle(3)
    # a 3-cycle has exactly one walk per (x, y, L): s_x = floor(n^2/3) = 1
    table = BundleTable(g, 2, 3)
    assert table.groups_out == [1, 1, 1]
    assert table.slice_of(1, 0, 0, "out") == (1, 1)


def test_regular_graph_groups_equal(c3):
    table = build_bundle_table(c3, 32, 4)
    assert len(set(table.groups_out)) == 1
    assert len(set(table.groups_in)) == 1


@pytest.mark.parametrize("g", [None, "c3"], ids=["fib", "c3"])
def test_slice_roundtrip_exhaustive(g, fib, c3):
    graph = fib if g is None else c3
    for L in range(1, 6):
        table = BundleTable(graph, 6, L)
        counts = graph.counts()
        for x in range(graph.k):
            for y in range(graph.k):
                for side in ("out", "in"):
                    total = (
                        counts.count(x, y, L) if side == "out" else counts.count(y, x, L)
                    )
                    for K in range(1, total + 1):
                        j, k = table.slice_of(K, x, y, side)
                        assert table.code_of(j, k, x, y, side) == K


def test_slice_conservation(fib):
    table = BundleTable(fib, 8, 4)
    counts = fib.counts()
    for x in range(2):
        for y in range(2):
            total = sum(
                table.slice_size(x, j, y, "out") for j in range(1, table.groups_out[x] + 1)
            )
            assert total == counts.count(x, y, 4)


def test_triple_count_bruteforce(fib):
    L = 3
    table = BundleTable(fib, 4, L)
    counts = fib.counts()
    for x in range(2):
        for xn in range(2):
            for j_out in range(1, table.groups_out[x] + 1):
                for j_in in range(1, table.groups_in[xn] + 1):
                    brute = 0
                    for y in range(2):
                        outs = sum(
                            1
                            for K in range(1, counts.count(x, y, L) + 1)
                            if table.slice_of(K, x, y, "out")[0] == j_out
                        )
                        ins = sum(
                            1
                            for K in range(1, counts.count(y, xn, L) + 1)
                            if table.slice_of(K, xn, y, "in")[0] == j_in
                        )
                        brute += outs * ins
                    assert table.triple_count(x, j_out, xn, j_in) == brute


def test_triple_conservation(fib):
    # summing triple_count over all slice pairs recovers the 2L-step count
    L = 3
    table = BundleTable(fib, 4, L)
    counts = fib.counts()
    for x in range(2):
        for xn in range(2):
            total = sum(
                table.triple_count(x, j_out, xn, j_in)
                for j_out in range(1, table.groups_out[x] + 1)
                for j_in in range(1, table.groups_in[xn] + 1)
            )
            assert total == counts.count(x, xn, 2 * L)


def test_triple_rank_roundtrip(fib):
    table = BundleTable(fib, 6, 3)
    for x in range(2):
        for xn in range(2):
            for j_out in range(1, table.groups_out[x] + 1):
                for j_in in range(1, table.groups_in[xn] + 1):
                    count = table.triple_count(x, j_out, xn, j_in)
                    for r in range(1, count + 1):
                        y, k_out, k_in = table.triple_unrank(x, j_out, xn, j_in, r)
                        assert table.triple_rank(x, j_out, xn, j_in, y, k_out, k_in) == r


def test_triple_radix_dominates(fib):
    table = BundleTable(fib, 6, 3)
    radix = table.triple_radix()
    worst = max(
        table.triple_count(x, j_out, xn, j_in)
        for x in range(2)
        for xn in range(2)
        for j_out in range(1, table.groups_out[x] + 1)
        for j_in in range(1, table.groups_in[xn] + 1)
    )
    assert radix >= worst


def test_zero_group_guard():
    # skewed graph at tiny n: some vertex's share of walks rounds to zero
    g = Graph(3, [(0, 0), (0, 1), (1, 2), (2, 0), (1, 0), (2, 1)], directed=True)
    with pytest.raises(ParameterError):
        BundleTable(g, 1, 1)


def test_tail_rank_roundtrip(fib):
    counts = fib.counts()
    for L in range(5):
        for verts in enumerate_walks(fib, L):
            r = tail_rank(counts, verts)
            assert 0 <= r < counts.row_total(verts[0], L)
            for q in range(L + 1):
                assert tail_vertex(counts, verts[0], L, r, q) == verts[q]
    assert tail_max_rank(counts, 4) == 8


def test_choose_half_block_scales(fib):
    h = choose_half_block(fib, 2**12)
    assert h is not None
    # small walks have no admissible half-block
    assert choose_half_block(fib, 16) is None


def test_core_roundtrip_fib_small_real_mode(fib):
    n = 2**12
    w = gen_walk(fib, n, seed=7)
    store = build_general_core(fib, w)
    assert not store.is_plain
    rng = random.Random(1)
    for q in rng.sample(range(n + 1), 400):
        assert store.vertex_at(q) == w.verts[q]
    # milestones, midpoints and tail boundaries exactly
    span = 2 * store.half_len
    for i in range(store.block_count + 1):
        assert store.vertex_at(i * span) == w.verts[i * span]
    for q in range(store.block_count * span, n + 1):
        assert store.vertex_at(q) == w.verts[q]


def test_core_space_bound(fib):
    n = 2**12
    w = gen_walk(fib, n, seed=7)
    store = build_general_core(fib, w)
    bench = benchmark_worstcase_bits(fib, n)
    assert store.payload_bits <= bench + 96 + 8 * math.log2(n)


def test_core_plain_fallback(fib):
    w = gen_walk(fib, 40, seed=2)
    store = build_general_core(fib, w)
    assert store.is_plain
    assert [store.vertex_at(i) for i in range(41)] == list(w.verts)


def test_periodic_two_cycle_roundtrip():
    g = directed_cycle(2)
    w = Walk(g, [i % 2 for i in range(11)])
    store = wrap_periodic(g, w)
    assert isinstance(store, PeriodicStore)
    assert store.period == 2
    for q in range(11):
        assert store.vertex_at(q) == w.verts[q]


def test_periodic_pass_through(fib):
    w = gen_walk(fib, 60, seed=3)
    store = wrap_periodic(fib, w)
    assert isinstance(store, GeneralStore)


def test_scc_dag_roundtrip():
    g = two_scc_dag()
    rng = random.Random(5)
    for seed in range(6):
        w = gen_walk(g, 80, seed=seed)
        store = wrap_scc(g, w)
        for q in range(81):
            assert store.vertex_at(q) == w.verts[q]


def test_scc_counts_one_switch():
    g = Graph(2, [(0, 0), (0, 1), (1, 1)], directed=True)
    w = Walk(g, [0, 0, 0, 1, 1, 1, 1])
    store = wrap_scc(g, w)
    assert isinstance(store, SccStore)
    assert store.starts == [0, 3]
    for q in range(7):
        assert store.vertex_at(q) == w.verts[q]


def test_build_general_routes(fib, c3):
    w = gen_walk(c3, 100, seed=8)
    store = build_general(c3, w)
    for q in range(101):
        assert store.vertex_at(q) == w.verts[q]


def test_undirected_bipartite_via_periodic():
    c4 = Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    w = gen_walk(c4, 300, seed=12)
    store = build_general(c4, w)
    assert isinstance(store, PeriodicStore)
    assert store.period == 2
    for q in range(301):
        assert store.vertex_at(q) == w.verts[q]


def test_disconnected_undirected():
    g = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    w = gen_walk(g, 120, seed=6)
    store = build_general(g, w)
    assert isinstance(store, SccStore)
    for q in range(121):
        assert store.vertex_at(q) == w.verts[q]


def test_general_on_regular_crosscheck(c3):
    from walkstore.regular import build_regular

    n = 2**12
    w = gen_walk(c3, n, seed=9)
    general = build_general(c3, w)
    regular = build_regular(c3, w)
    assert abs(general.payload_bits - regular.payload_bits) <= 8
    rng = random.Random(3)
    for q in rng.sample(range(n + 1), 150):
        assert general.vertex_at(q) == w.verts[q]


def test_four_vertex_digraph(seed=4):
    g = four_vertex_aperiodic()
    n = 2**12
    w = gen_walk(g, n, seed=seed)
    store = build_general_core(g, w)
    assert not store.is_plain
    rng = random.Random(seed)
    for q in rng.sample(range(n + 1), 300):
        assert store.vertex_at(q) == w.verts[q]
    bench = benchmark_worstcase_bits(g, n)
    assert store.payload_bits <= bench + 96 + 8 * math.log2(n)


def test_serialization_roundtrip_core(fib):
    n = 2**12
    w = gen_walk(fib, n, seed=11)
    store = build_general_core(fib, w)
    blob = store.body_bytes()
    back = GeneralStore.from_body(Cursor(blob), fib)
    rng = random.Random(7)
    for q in rng.sample(range(n + 1), 100):
        assert back.vertex_at(q) == w.verts[q]
    assert back.payload_bits == store.payload_bits


def test_serialization_roundtrip_wrappers():
    g = two_scc_dag()
    w = gen_walk(g, 60, seed=13)
    store = wrap_scc(g, w)
    blob = store.body_bytes()
    back = SccStore.from_body(Cursor(blob), g)
    assert [back.vertex_at(q) for q in range(61)] == list(w.verts)

    g2 = directed_cycle(2)
    w2 = Walk(g2, [i % 2 for i in range(13)])
    store2 = wrap_periodic(g2, w2)
    back2 = PeriodicStore.from_body(Cursor(store2.body_bytes()), g2)
    assert [back2.vertex_at(q) for q in range(13)] == list(w2.verts)


def test_query_probe_reads(fib):
    n = 2**12
    w = gen_walk(fib, n, seed=17)
    store = build_general_core(fib, w, strategy="blocked")
    rng = random.Random(1)
    span = 2 * store.half_len
    for q in rng.sample(range(store.block_count * span), 100):
        probes = set()
        store.vertex_at(q, probes)
        # 2 bundle reads + 1 triple read, each <= 3 words in blocked mode
        assert len(probes) <= 9


def test_out_of_range(fib):
    w = gen_walk(fib, 50, seed=1)
    store = build_general(fib, w)
    with pytest.raises(RangeError):
        store.vertex_at(51)
