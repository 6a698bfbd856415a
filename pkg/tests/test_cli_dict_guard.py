import json

from walkstore.cli import main
from walkstore.fileio import dist_to_json


def test_walk_commands_reject_dictionary(tmp_path, capsys):
    (tmp_path / "d.json").write_text(dist_to_json(["a", "b"], [1, 1]))
    (tmp_path / "x.txt").write_text("abba")
    assert main(["dict", "--dist", str(tmp_path / "d.json"),
                 "--text", str(tmp_path / "x.txt"),
                 "--out", str(tmp_path / "d.rwd")]) == 0
    capsys.readouterr()

    assert main(["query", str(tmp_path / "d.rwd"), "0"]) == 3
    capsys.readouterr()

    code = main(["stats", str(tmp_path / "d.rwd")])
    out = capsys.readouterr().out
    assert code == 0
    assert json.loads(out)["mode"] == "dictionary"
