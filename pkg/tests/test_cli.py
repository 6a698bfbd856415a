import json

import pytest

from walkstore.cli import main
from walkstore.fileio import dist_to_json, save_graph, save_walk
from walkstore.graph import Graph, complete, gen_walk, triangle


@pytest.fixture
def workspace(tmp_path):
    g = triangle()
    save_graph(g, str(tmp_path / "c3.json"))
    walk = gen_walk(g, 64, seed=1)
    save_walk(walk, str(tmp_path / "w.wlk"))
    return tmp_path, g, walk


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_encode_query_stats(workspace, capsys, tmp_path):
    ws, g, walk = workspace
    code, out, _ = run(
        ["encode", "--graph", str(ws / "c3.json"), "--walk", str(ws / "w.wlk"),
         "--out", str(ws / "s.rws"), "--mode", "auto"],
        capsys,
    )
    assert code == 0
    report = json.loads(out)
    assert report["mode"] == "regular"
    assert report["payload_bits"] >= 1

    code, out, err = run(
        ["query", str(ws / "s.rws"), "--index", "0", "--index", "5", "--probe-stats"],
        capsys,
    )
    assert code == 0
    values = [int(x) for x in out.split()]
    assert values == [walk.verts[0], walk.verts[5]]
    assert "probe_words_max" in err

    code, out, _ = run(["stats", str(ws / "s.rws")], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["benchmark_pointwise_bits"] is not None


def test_query_positional_indices(workspace, capsys):
    ws, g, walk = workspace
    run(["encode", "--graph", str(ws / "c3.json"), "--walk", str(ws / "w.wlk"),
         "--out", str(ws / "s.rws")], capsys)
    code, out, _ = run(["query", str(ws / "s.rws"), "3", "7", "11"], capsys)
    assert code == 0
    assert [int(x) for x in out.split()] == [walk.verts[i] for i in (3, 7, 11)]


def test_exit_code_unsupported_mode(tmp_path, capsys):
    from walkstore import Walk

    g = Graph(2, [(0, 1)], directed=True)
    save_graph(g, str(tmp_path / "dag.json"))
    walk_path = tmp_path / "w.wlk"
    save_walk(Walk(g, (0, 1)), str(walk_path))
    code, _, err = run(
        ["encode", "--graph", str(tmp_path / "dag.json"), "--walk", str(walk_path),
         "--out", str(tmp_path / "s.rws"), "--mode", "regular"],
        capsys,
    )
    assert code == 3
    assert "error" in err


def test_exit_code_parse_error(workspace, capsys):
    ws, _, _ = workspace
    bad = ws / "bad.rws"
    bad.write_bytes(b"XXXX" + b"\x00" * 20)
    code, _, err = run(["query", str(bad), "0"], capsys)
    assert code == 2

    badjson = ws / "bad.json"
    badjson.write_text("{not json")
    code, _, _ = run(
        ["encode", "--graph", str(badjson), "--walk", str(ws / "w.wlk"),
         "--out", str(ws / "x.rws")],
        capsys,
    )
    assert code == 2


def test_exit_code_invalid_walk(workspace, capsys):
    ws, g, _ = workspace
    (ws / "bad.txt").write_text("0\n0\n")  # no self-loop in the triangle
    code, _, _ = run(
        ["encode", "--graph", str(ws / "c3.json"), "--walk", str(ws / "bad.txt"),
         "--walk-format", "text", "--out", str(ws / "x.rws")],
        capsys,
    )
    assert code == 4


def test_exit_code_index_range(workspace, capsys):
    ws, _, _ = workspace
    run(["encode", "--graph", str(ws / "c3.json"), "--walk", str(ws / "w.wlk"),
         "--out", str(ws / "s.rws")], capsys)
    code, _, _ = run(["query", str(ws / "s.rws"), "65"], capsys)
    assert code == 5


def test_graph_digest_mismatch(workspace, tmp_path, capsys):
    ws, _, _ = workspace
    run(["encode", "--graph", str(ws / "c3.json"), "--walk", str(ws / "w.wlk"),
         "--out", str(ws / "s.rws")], capsys)
    save_graph(complete(4), str(tmp_path / "k4.json"))
    code, _, err = run(
        ["query", str(ws / "s.rws"), "0", "--graph", str(tmp_path / "k4.json")],
        capsys,
    )
    assert code == 3
    assert "digest" in err


def test_gen_and_verify(workspace, capsys):
    ws, _, _ = workspace
    code, _, _ = run(
        ["gen", "--graph", str(ws / "c3.json"), "--length", "100", "--seed", "7",
         "--out", str(ws / "g.wlk")],
        capsys,
    )
    assert code == 0
    code, out, _ = run(
        ["verify", "--graph", str(ws / "c3.json"), "--walk", str(ws / "g.wlk")],
        capsys,
    )
    assert code == 0
    assert "OK" in out


def test_gen_deterministic(workspace, capsys):
    ws, _, _ = workspace
    for name in ("a.wlk", "b.wlk"):
        run(["gen", "--graph", str(ws / "c3.json"), "--length", "50", "--seed", "3",
             "--out", str(ws / name)], capsys)
    assert (ws / "a.wlk").read_bytes() == (ws / "b.wlk").read_bytes()


def test_encode_deterministic(workspace, capsys):
    ws, _, _ = workspace
    for name in ("s1.rws", "s2.rws"):
        run(["encode", "--graph", str(ws / "c3.json"), "--walk", str(ws / "w.wlk"),
             "--out", str(ws / name)], capsys)
    assert (ws / "s1.rws").read_bytes() == (ws / "s2.rws").read_bytes()


def test_text_walk_roundtrip(workspace, capsys):
    ws, g, _ = workspace
    run(["gen", "--graph", str(ws / "c3.json"), "--length", "30", "--seed", "2",
         "--out", str(ws / "t.txt"), "--format", "text"], capsys)
    code, out, _ = run(
        ["verify", "--graph", str(ws / "c3.json"), "--walk", str(ws / "t.txt"),
         "--walk-format", "text", "--mode", "pointwise"],
        capsys,
    )
    assert code == 0


def test_dict_commands(tmp_path, capsys):
    (tmp_path / "d.json").write_text(dist_to_json(["a", "b", "c"], [1, 2, 2]))
    (tmp_path / "x.txt").write_text("abacabcaab\n")
    code, out, _ = run(
        ["dict", "--dist", str(tmp_path / "d.json"), "--text", str(tmp_path / "x.txt"),
         "--out", str(tmp_path / "d.rwd")],
        capsys,
    )
    assert code == 0
    report = json.loads(out)
    assert report["mode"] == "dictionary"
    code, out, _ = run(["dict-get", str(tmp_path / "d.rwd"), "0", "3", "9"], capsys)
    assert code == 0
    assert out.split() == ["a", "c", "b"]


def test_bench_grid(tmp_path, capsys):
    code, out, _ = run(
        ["bench", "--graphs", "c3,fib", "--sizes", "256", "--modes", "auto",
         "--strategies", "blocked", "--csv", str(tmp_path / "bench.csv")],
        capsys,
    )
    assert code == 0
    assert "payload_bits" in out
    lines = (tmp_path / "bench.csv").read_text().strip().splitlines()
    assert len(lines) == 3  # header + 2 graphs
