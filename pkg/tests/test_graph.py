import numpy as np
import pytest

from tgcl.errors import DomainError, ParseError, SchemaError
from tgcl.graph import build_graph, extract_ego_subgraph
from tgcl.io import load_dataset, load_samples, load_texts


def path_graph(n):
    return build_graph([(i, i + 1) for i in range(n - 1)])


class TestBuildGraph:
    def test_path_degrees(self):
        g = build_graph([(0, 1), (1, 2)])
        assert g.node_count == 3
        assert [g.degree(v) for v in range(3)] == [1, 2, 1]

    def test_duplicate_and_reversed_edges_collapse(self):
        g = build_graph([(0, 1), (1, 0), (0, 1)])
        assert g.edges == ((0, 1),)
        assert [g.degree(v) for v in range(2)] == [1, 1]

    def test_self_loop_rejected(self):
        with pytest.raises(SchemaError, match="self-loop"):
            build_graph([(1, 1)])

    def test_adjacency_symmetric_and_sorted(self):
        g = build_graph([(0, 2), (0, 1), (2, 1), (2, 3)])
        for u in range(g.node_count):
            assert list(g.adjacency[u]) == sorted(g.adjacency[u])
            for v in g.adjacency[u]:
                assert u in g.adjacency[v]

    def test_feature_shape_checked(self):
        with pytest.raises(SchemaError):
            build_graph([(0, 1)], features=[[1.0]])


class TestLoadDataset:
    def test_load_edge_list(self, tmp_path):
        p = tmp_path / "edges.txt"
        p.write_text("# comment\n0 1\n1\t2\n")
        g = load_dataset(p)
        assert g.node_count == 3
        assert [g.degree(v) for v in range(3)] == [1, 2, 1]

    def test_self_loop_is_parse_error_with_line(self, tmp_path):
        p = tmp_path / "edges.txt"
        p.write_text("0 1\n1 1\n")
        with pytest.raises(ParseError, match=r":2: self-loop"):
            load_dataset(p)

    def test_malformed_line_number_reported(self, tmp_path):
        p = tmp_path / "edges.txt"
        p.write_text("0 1\nnot an edge line\n")
        with pytest.raises(ParseError, match=":2:"):
            load_dataset(p)

    def test_unknown_feature_node_rejected(self, tmp_path):
        edges = tmp_path / "edges.txt"
        edges.write_text("0 1\n")
        feats = tmp_path / "features.csv"
        feats.write_text("node,f0\n0,1.0\n5,2.0\n")
        with pytest.raises(SchemaError, match="unknown node id 5"):
            load_dataset(edges, feature_path=feats)

    def test_unknown_label_node_rejected(self, tmp_path):
        edges = tmp_path / "edges.txt"
        edges.write_text("0 1\n")
        labels = tmp_path / "labels.txt"
        labels.write_text("0 0\n9 1\n")
        with pytest.raises(SchemaError, match="unknown node id 9"):
            load_dataset(edges, label_path=labels)

    def test_texts_roundtrip(self, tmp_path):
        p = tmp_path / "texts.tsv"
        p.write_text("0\thello world\n1\tsecond text, with comma\n")
        texts = load_texts(p, node_count=2)
        assert texts == {0: "hello world", 1: "second text, with comma"}

    def test_link_samples(self, tmp_path):
        edges = tmp_path / "edges.txt"
        edges.write_text("0 1\n1 2\n")
        samples = tmp_path / "samples.tsv"
        samples.write_text("0 1 1 train\n0 2 0 validation\n")
        g = load_dataset(edges)
        out = load_samples(samples, "link_prediction", g)
        assert [s.targets for s in out] == [(0, 1), (0, 2)]
        assert [s.split for s in out] == ["train", "validation"]


class TestEgoExtraction:
    def test_path_one_hop(self):
        g = path_graph(4)
        sg = extract_ego_subgraph(g, {1}, hops=1)
        assert sg.node_ids == (0, 1, 2)
        assert sg.edge_count == 2

    def test_triangle_whole(self):
        g = build_graph([(0, 1), (1, 2), (0, 2)])
        sg = extract_ego_subgraph(g, {0}, hops=1)
        assert sg.node_ids == (0, 1, 2)
        assert sg.edge_count == 3

    def test_star_cap_tie_break_by_id(self):
        g = build_graph([(0, leaf) for leaf in range(1, 11)])
        sg = extract_ego_subgraph(g, {0}, hops=1, node_cap=5)
        assert sg.node_ids == (0, 1, 2, 3, 4)

    def test_target_not_in_graph(self):
        g = path_graph(3)
        with pytest.raises(DomainError):
            extract_ego_subgraph(g, {7}, hops=1)

    def test_deterministic(self):
        rng = np.random.default_rng(0)
        edges = [(int(u), int(v)) for u, v in rng.integers(0, 30, size=(80, 2))
                 if u != v]
        g = build_graph(edges)
        a = extract_ego_subgraph(g, {3, 14}, hops=2, node_cap=12)
        b = extract_ego_subgraph(g, {3, 14}, hops=2, node_cap=12)
        assert a == b

    def test_large_hops_reaches_component(self):
        g = build_graph([(0, 1), (1, 2), (3, 4)])
        sg = extract_ego_subgraph(g, {0}, hops=10)
        assert sg.node_ids == (0, 1, 2)

    def test_induced_adjacency_property(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = int(rng.integers(2, 8))
            edges = [(u, v) for u in range(n) for v in range(u + 1, n)
                     if rng.random() < 0.4]
            if not edges:
                continue
            g = build_graph(edges, node_count=n)
            target = int(rng.integers(n))
            sg = extract_ego_subgraph(g, {target}, hops=2, node_cap=5)
            ids = sg.node_ids
            for li, row in enumerate(sg.adjacency):
                for lj in row:
                    assert (min(ids[li], ids[lj]), max(ids[li], ids[lj])) in g.edges
            member = set(ids)
            for u, v in g.edges:
                if u in member and v in member:
                    lu, lv = ids.index(u), ids.index(v)
                    assert lv in sg.adjacency[lu]

    def test_targets_always_kept_under_cap(self):
        g = build_graph([(0, i) for i in range(1, 9)] + [(8, 9)])
        sg = extract_ego_subgraph(g, {9, 0}, hops=2, node_cap=3)
        assert 0 in sg.node_ids and 9 in sg.node_ids
        assert len(sg.node_ids) == 3
