import json

import numpy as np
import pytest

from multinet.cli import fmt, main, parse_ranks
from multinet.netcore import InputError
from multinet.spectral import hits
from multinet.tensor import Tensor3, write_tensor


@pytest.fixture(autouse=True)
def _cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("MULTINET_SEED", raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def edge_file(tmp_path, rows, name="layer.csv", header="src,dst,weight"):
    p = tmp_path / name
    p.write_text(header + "\n" + "".join(f"{a},{b},{w}\n" for a, b, w in rows))
    return p


def table_rows(out):
    return [line.split() for line in out.strip().splitlines()[1:]]


class TestHits:
    def test_chain_example_matches_library(self, tmp_path, capsys):
        p = edge_file(tmp_path, [("x", "y", 1), ("x", "z", 1), ("y", "z", 1)])
        code, out, _ = run(capsys, "hits", str(p))
        assert code == 0
        rows = table_rows(out)
        res = hits(np.array([[0, 1, 1], [0, 0, 1], [0, 0, 0]], float))
        assert rows[0] == ["x", fmt(res.hubs[0]), "z", fmt(res.authorities[2])]
        assert rows[0][1] == "0.85065" and rows[1][1] == "0.52573"

    def test_symmetric_columns_identical(self, tmp_path, capsys):
        pairs = [("a", "b", 1), ("b", "c", 2), ("a", "c", 3), ("c", "d", 1)]
        p = edge_file(tmp_path, pairs + [(y, x, w) for x, y, w in pairs])
        _, out, _ = run(capsys, "hits", str(p))
        for row in table_rows(out):
            assert row[:2] == row[2:]

    def test_top_one(self, tmp_path, capsys):
        p = edge_file(tmp_path, [("a", "b", 1), ("b", "c", 1)])
        _, out, _ = run(capsys, "hits", str(p), "--top", "1")
        assert len(table_rows(out)) == 1

    def test_json_full_precision(self, tmp_path, capsys):
        p = edge_file(tmp_path, [("x", "y", 1), ("x", "z", 1), ("y", "z", 1)])
        _, out, _ = run(capsys, "hits", str(p), "--format", "json")
        doc = json.loads(out)
        res = hits(np.array([[0, 1, 1], [0, 0, 1], [0, 0, 0]], float))
        assert doc["hubs"] == res.hubs.tolist()

    def test_parse_error_has_row_number(self, tmp_path, capsys):
        p = edge_file(tmp_path, [("a", "b", 1), ("b", "c", "oops")])
        code, _, err = run(capsys, "hits", str(p))
        assert code == 1 and ":3:" in err

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run(capsys, "hits", str(tmp_path / "nope.csv"))
        assert code == 1 and "error" in err

    def test_non_convergence_exit_code(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        rows = [(f"n{i}", f"n{j}", round(rng.random(), 3)) for i in range(8) for j in range(8) if i != j]
        p = edge_file(tmp_path, rows)
        out_path = tmp_path / "out.txt"
        code, _, err = run(capsys, "hits", str(p), "--max-iter", "1", "-o", str(out_path))
        assert code == 2 and "converge" in err
        assert out_path.read_text().startswith("company")


class TestEigencentrality:
    def test_path_centre_first(self, tmp_path, capsys):
        p = edge_file(tmp_path, [("a", "b", 1), ("b", "c", 1)])
        code, out, _ = run(capsys, "eigencentrality", str(p))
        rows = table_rows(out)
        assert code == 0
        assert rows[0] == ["b", "0.70711", "2"]
        assert out.splitlines()[0].split() == ["company", "eigencentrality", "degree"]

    def test_k4_ties_by_label_order(self, tmp_path, capsys):
        labels = "abcd"
        p = edge_file(tmp_path, [(labels[i], labels[j], 1) for i in range(4) for j in range(i + 1, 4)])
        _, out, _ = run(capsys, "eigencentrality", str(p))
        rows = table_rows(out)
        assert [r[0] for r in rows] == list(labels)
        assert {r[1] for r in rows} == {"0.5"}

    def test_star_hub_first(self, tmp_path, capsys):
        p = edge_file(tmp_path, [("leaf1", "hub", 1), ("hub", "leaf2", 1), ("hub", "leaf3", 1), ("hub", "leaf4", 1)])
        _, out, _ = run(capsys, "eigencentrality", str(p))
        assert table_rows(out)[0][0] == "hub"

    def test_board_membership_file(self, tmp_path, capsys):
        p = tmp_path / "bd.csv"
        p.write_text("company,director\nX,d1\nY,d1\nY,d2\nZ,d2\n")
        _, out, _ = run(capsys, "eigencentrality", str(p))
        assert table_rows(out)[0][0] == "Y"

    def test_non_symmetric_rejected(self, tmp_path, capsys):
        p = edge_file(tmp_path, [("a", "b", 1), ("b", "a", 2)])
        code, _, err = run(capsys, "eigencentrality", str(p))
        assert code == 1 and "symmetric" in err


class TestTophits:
    def test_fixture_output_and_topics(self, fixture_dir, capsys):
        code, out, _ = run(capsys, "tophits", str(fixture_dir), "--rank", "1")
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("TOPHITS factor 1 of 1 (3 layers")
        assert lines[-1].startswith("topic scores: SH ")
        _, js, _ = run(capsys, "tophits", str(fixture_dir), "--rank", "1", "--format", "json")
        doc = json.loads(js)
        assert abs(sum(doc["topics_normalized"]) - 1.0) <= 1e-12
        assert doc["layers"] == ["SH", "BD", "CORR"] and len(doc["labels"]) == 8
        assert len(doc["top_hubs"]) == 8

    def test_byte_identical_runs(self, fixture_dir, tmp_path, capsys):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        for path in (a, b):
            assert run(capsys, "tophits", str(fixture_dir), "--rank", "2", "--restarts", "3", "--seed", "4", "-o", str(path))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_seed_from_environment(self, fixture_dir, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("MULTINET_SEED", "17")
        run(capsys, "tophits", str(fixture_dir), "--rank", "2", "-o", str(tmp_path / "o.txt"))
        manifest = json.loads((tmp_path / "o.txt.manifest.json").read_text())
        assert manifest["config"]["seed"] == 17

    def test_factor_exceeds_rank(self, fixture_dir, capsys):
        code, _, err = run(capsys, "tophits", str(fixture_dir), "--rank", "1", "--factor", "2")
        assert code == 1 and "factor index exceeds rank" in err

    def test_single_layer_equals_hits(self, tmp_path, capsys):
        rng = np.random.default_rng(3)
        labels = [f"c{i}" for i in range(6)]
        a = rng.random((6, 6)) * (rng.random((6, 6)) < 0.6)
        np.fill_diagonal(a, 0)
        for i in range(6):  # cycle keeps the layer strongly connected
            a[i, (i + 1) % 6] = max(a[i, (i + 1) % 6], 0.3)
        layer = edge_file(tmp_path, [(labels[i], labels[j], repr(float(a[i, j]))) for i in range(6) for j in range(6) if a[i, j]])
        d = tmp_path / "ds"
        d.mkdir()
        write_tensor(Tensor3(a[:, :, None] / np.linalg.norm(a)), d / "tensor.txt")
        (d / "labels.txt").write_text("\n".join(labels) + "\n")
        (d / "layers.txt").write_text("SH\n")
        _, hits_out, _ = run(capsys, "hits", str(layer))
        _, top_out, _ = run(capsys, "tophits", str(d), "--rank", "1")
        table = "\n".join(top_out.splitlines()[1:-1]) + "\n"
        assert table == hits_out
        assert top_out.splitlines()[-1] == "topic scores: SH 1"

    def test_subgroup_default_five(self, fixture_dir, capsys):
        code, out, _ = run(capsys, "subgroup", str(fixture_dir), "--rank", "2", "--factor", "2")
        assert code == 0
        assert len(out.splitlines()) == 1 + 1 + 5 + 1

    def test_tsv_output(self, fixture_dir, capsys):
        _, out, _ = run(capsys, "tophits", str(fixture_dir), "--rank", "1", "--format", "tsv")
        assert out.splitlines()[0] == "company\thubs score\tcompany\tauthority score"
        assert "layer\ttopic score" in out


class TestRankSweep:
    def exact_dataset(self, tmp_path):
        rng = np.random.default_rng(21)
        # exact nonnegative rank-3 tensor with distinct topic profiles
        A, B, C = rng.random((6, 3)) + 0.1, rng.random((6, 3)) + 0.1, np.eye(4)[:, :3] + 0.2
        x = np.einsum("ir,jr,kr->ijk", A, B, C)
        d = tmp_path / "exact"
        d.mkdir()
        write_tensor(Tensor3(x), d / "tensor.txt")
        (d / "labels.txt").write_text("".join(f"n{i}\n" for i in range(6)))
        (d / "layers.txt").write_text("".join(f"L{k}\n" for k in range(4)))
        return d

    def test_exact_rank_three(self, tmp_path, capsys):
        d = self.exact_dataset(tmp_path)
        code, out, _ = run(capsys, "rank-sweep", str(d), "--ranks", "1..4", "--restarts", "5", "--tol", "1e-14",
                           "--max-iter", "5000", "--format", "json")
        assert code in (0, 2)
        rows = json.loads(out)
        assert [r["rank"] for r in rows] == [1, 2, 3, 4]
        assert rows[2]["fit"] >= 0.999
        assert rows[2]["corcondia"] == pytest.approx(100.0, abs=1e-3)

    def test_single_rank_table(self, fixture_dir, capsys):
        code, out, _ = run(capsys, "rank-sweep", str(fixture_dir), "--ranks", "1..1")
        assert code == 0
        assert len(table_rows(out)) == 1
        assert table_rows(out)[0][2] == "100.0000"

    def test_parse_ranks(self):
        assert parse_ranks("2..4") == [2, 3, 4]
        assert parse_ranks("1,3,5") == [1, 3, 5]
        with pytest.raises(InputError):
            parse_ranks("4..2")


class TestIngestAndManifest:
    def test_ingest_round_trip(self, fixture_dir, tmp_path, capsys):
        out_dir = tmp_path / "ds"
        code, out, _ = run(capsys, "ingest", str(fixture_dir), "--out-dir", str(out_dir))
        assert code == 0 and "12 -> 8 nodes" in out
        assert (out_dir / "labels.txt").read_text().split() == [
            "Alfa", "Bravo", "Charlie", "Delta", "Echo", "Foxtrot", "Golf", "Hotel"
        ]
        report = json.loads((out_dir / "report.json").read_text())
        assert sorted(report["removed"]) == ["India", "Juliett", "Kilo", "Lima"]
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["command"] == "ingest"
        assert len(manifest["inputs"]) >= 3 and all(len(v) == 64 for v in manifest["inputs"].values())
        _, raw_out, _ = run(capsys, "tophits", str(fixture_dir), "--rank", "1")
        _, ing_out, _ = run(capsys, "tophits", str(out_dir), "--rank", "1")
        assert raw_out == ing_out

    def test_default_manifest_location(self, tmp_path, capsys):
        p = edge_file(tmp_path, [("a", "b", 1), ("b", "a", 1)])
        run(capsys, "hits", str(p))
        doc = json.loads((tmp_path / "multinet_manifest.json").read_text())
        assert doc["command"] == "hits" and doc["config"]["sh_threshold"] == 0.02
        assert "version" in doc and "timestamp" in doc

    def test_config_flags_recorded(self, fixture_dir, tmp_path, capsys):
        m = tmp_path / "m.json"
        run(capsys, "tophits", str(fixture_dir), "--rank", "1", "--no-normalize", "--sh-threshold", "0.03",
            "--manifest", str(m))
        cfg = json.loads(m.read_text())["config"]
        assert cfg["normalize_layers"] is False and cfg["sh_threshold"] == 0.03

    def test_no_scc_restrict_keeps_all_nodes(self, fixture_dir, capsys):
        _, out, _ = run(capsys, "tophits", str(fixture_dir), "--rank", "1", "--no-scc-restrict", "--format", "json")
        assert len(json.loads(out)["labels"]) == 12
