import io
import json

import pytest

from app import __version__
from app.errors import DefectError
from app.gadgets import build_gadget_base
from app.graph import (
    GreatPartition,
    complete_graph,
    cycle_graph,
    disjoint_cliques,
    k5_minus_edge,
    to_graph6,
)
from app.main import run
from app.models import dump, partition_to_model


def _out(capsys):
    return json.loads(capsys.readouterr().out)


class TestUsage:
    def test_missing_verb(self):
        assert run([]) == 2

    def test_version(self, capsys):
        assert run(["--version"]) == 0
        assert __version__ in capsys.readouterr().out

    def test_malformed_graph6(self, write_graph6):
        assert run(["partition", "find", "--in", write_graph6("bad.g6", "D~~")]) == 2

    def test_more_than_one_graph(self, write_graph6):
        assert run(["partition", "find", "--in", write_graph6("two.g6", "C~\nDhc")]) == 2

    def test_missing_file(self, tmp_path):
        assert run(["partition", "find", "--in", str(tmp_path / "nope.g6")]) == 2


class TestPartitionVerbs:
    def test_find(self, write_graph6, capsys):
        assert run(["partition", "find", "--in", write_graph6("c5.g6", "Dhc")]) == 0
        out = _out(capsys)
        assert out["graph6"] == "Dhc"
        assert out["X1"] == [0, 1]
        assert out["n"] == 5

    def test_not_great(self, write_graph6, capsys):
        assert run(["partition", "find", "--in", write_graph6("e6.g6", "E???")]) == 1
        assert _out(capsys) == {"graph6": "E???", "great": False}

    def test_reads_stdin(self, monkeypatch, capsys):
        monkeypatch.setattr("sys.stdin", io.StringIO("Dhc\n"))
        assert run(["partition", "count"]) == 0
        assert _out(capsys)["count"] > 0

    def test_pstar_with_partition_file(self, tmp_path, write_graph6, capsys):
        g = disjoint_cliques([2, 2, 2, 2])
        p = GreatPartition(8, 0b11, 0b1100, 0b110000, 0b11000000, 0)
        partition_file = tmp_path / "partition.json"
        partition_file.write_text(dump(partition_to_model(g, p)), encoding="ascii")
        code = run(["pstar", "check", "--in", write_graph6("g.g6", to_graph6(g)), "--partition", str(partition_file)])
        assert code == 1
        assert _out(capsys)["failure_counts"]["c"] == 24

    def test_pstar_with_flat_partition_file(self, tmp_path, write_graph6, capsys):
        g = disjoint_cliques([2, 2, 2, 2])
        partition_file = tmp_path / "flat.json"
        partition_file.write_text('{"X1": [0, 1], "X2": [2, 3], "X3": [4, 5], "X4a": [6, 7]}', encoding="ascii")
        code = run(["pstar", "check", "--in", write_graph6("g.g6", to_graph6(g)), "--partition", str(partition_file)])
        assert code == 1
        assert _out(capsys)["failure_counts"]["c"] == 24

    @pytest.mark.parametrize(
        "text",
        ['{"X1": "zero"}', '{"X1": [-1]}', '{"X1": [0, 1]}', '{"X1": [0, 9]}', '{"n": 5, "X1": [0]}', "[1, 2"],
    )
    def test_pstar_rejects_bad_partition_file(self, tmp_path, write_graph6, text):
        partition_file = tmp_path / "bad.json"
        partition_file.write_text(text, encoding="ascii")
        g6 = write_graph6("g.g6", to_graph6(disjoint_cliques([2, 2, 2, 2])))
        assert run(["pstar", "check", "--in", g6, "--partition", str(partition_file)]) == 2


class TestGeometryVerbs:
    def test_pack_with_svg(self, tmp_path, write_graph6, capsys):
        svg = tmp_path / "pack.svg"
        assert run(["pack", "--in", write_graph6("k.g6", to_graph6(k5_minus_edge())), "--svg", str(svg)]) == 0
        assert len(_out(capsys)["circles"]) == 5
        assert svg.exists()

    def test_pack_non_planar(self, write_graph6):
        assert run(["pack", "--in", write_graph6("k5.g6", to_graph6(complete_graph(5)))]) == 1

    def test_represent_then_verify(self, tmp_path, write_graph6, capsys):
        assert run(["represent", "--in", write_graph6("c5.g6", "Dhc")]) == 0
        rep_file = tmp_path / "rep.json"
        rep_file.write_text(capsys.readouterr().out, encoding="ascii")
        assert run(["verify", "--in", str(rep_file)]) == 0
        assert _out(capsys)["ok"] is True
        assert run(["verify", "--in", str(rep_file), "--graph", write_graph6("k5.g6", to_graph6(complete_graph(5)))]) == 1

    @pytest.mark.parametrize(
        "path, value",
        [(("sets", 0, "points", 0, 1), 0), (("params", "delta", 1), 0), (("params", "delta", 0), -1)],
    )
    def test_verify_rejects_bad_rationals(self, tmp_path, write_graph6, capsys, path, value):
        assert run(["represent", "--in", write_graph6("c5.g6", "Dhc")]) == 0
        data = _out(capsys)
        target = data
        for key in path[:-1]:
            target = target[key]
        target[path[-1]] = value
        rep_file = tmp_path / "rep.json"
        rep_file.write_text(json.dumps(data), encoding="ascii")
        assert run(["verify", "--in", str(rep_file)]) == 2

    def test_represent_not_great(self, write_graph6, capsys):
        assert run(["represent", "--in", write_graph6("e6.g6", "E???")]) == 1
        assert _out(capsys)["great"] is False

    def test_strings(self, tmp_path, write_graph6, capsys):
        svg = tmp_path / "strings.svg"
        assert run(["strings", "--in", write_graph6("c5.g6", "Dhc"), "--svg", str(svg)]) == 0
        out = _out(capsys)
        assert out["max_crossings"] <= 10
        assert {(i, j) for i, j, c in out["crossings"] if c} == set(cycle_graph(5).edges())
        assert svg.exists()


class TestGadgetVerbs:
    def test_build(self, capsys):
        assert run(["gadget", "build", "--optional", "1,2-1,3"]) == 0
        out = _out(capsys)
        assert out["edges"] == 21
        assert out["witness"]["hubs"] == [0, 1, 2, 3, 4]

    @pytest.mark.parametrize("optional", ["1,2-3,4", "junk", "1,2-1,9"])
    def test_build_rejects_bad_edges(self, optional):
        assert run(["gadget", "build", "--optional", optional]) == 2

    def test_find_from_golden_files(self, capsys):
        assert run(["gadget", "find", "--type", "a"]) == 0
        out = _out(capsys)
        assert out["type"] == "a"
        assert out["witness"]["hubs"] == [0, 1, 2, 3, 4]

    def test_certify_string(self, write_graph6, capsys):
        assert run(["certify", "string", "--k", "2", "--in", write_graph6("k3.g6", to_graph6(complete_graph(3)))]) == 0
        assert _out(capsys)["string"] is True

    def test_certify_nonstring(self, write_graph6, capsys):
        assert run(["certify", "nonstring", "--in", write_graph6("base.g6", to_graph6(build_gadget_base()))]) == 0
        assert _out(capsys)["string"] is False
        assert run(["certify", "nonstring", "--in", write_graph6("c5.g6", "Dhc")]) == 1


class TestLabVerbs:
    def test_count(self, capsys):
        assert run(["lab", "count", "--n", "4"]) == 0
        assert _out(capsys) == {"canonical_graphs": 64, "n": 4}

    def test_speed_text(self, capsys):
        assert run(["lab", "speed", "--n", "4", "--text"]) == 0
        assert "Result: PASS" in capsys.readouterr().out

    def test_partitions_docx(self, tmp_path, capsys):
        docx = tmp_path / "report.docx"
        assert run(["lab", "partitions", "--sizes", "0,0,0,3", "--docx", str(docx)]) == 0
        assert _out(capsys)["passed"] is True
        assert docx.exists()

    def test_json_is_deterministic_without_timing(self, capsys):
        run(["lab", "speed", "--n", "5"])
        first = capsys.readouterr().out
        run(["lab", "speed", "--n", "5"])
        assert capsys.readouterr().out == first
        assert "runtime_seconds" not in first


class TestFailureMapping:
    def test_defect_exits_3(self, monkeypatch, write_graph6):
        def broken(g):
            raise DefectError("boom")

        monkeypatch.setattr("app.main.represent_canonical", broken)
        assert run(["represent", "--in", write_graph6("c5.g6", "Dhc")]) == 3

    def test_unexpected_error_exits_3(self, monkeypatch, write_graph6):
        def broken(g):
            raise RuntimeError("boom")

        monkeypatch.setattr("app.main.find_great_partition", broken)
        assert run(["partition", "find", "--in", write_graph6("c5.g6", "Dhc")]) == 3

    def test_bad_environment_exits_2(self, monkeypatch):
        monkeypatch.setenv("CANONCONV_SEED", "-4")
        assert run(["lab", "count", "--n", "3"]) == 2
