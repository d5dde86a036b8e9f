import json

import numpy as np
import pytest

from concepthmm.triples import (
    Document,
    TripleParseError,
    parse_triples,
    serialize_triples,
    vectorize_relation,
    write_triples,
)

TWO_LINES = b"""\
{"s": "db", "r": [0.9, -0.1], "o": "cloud"}
{"s": "app", "r": [0.5, 0.3], "o": "cloud"}
"""


class TestParse:
    def test_basic_two_lines(self):
        doc = parse_triples(TWO_LINES)
        assert len(doc) == 2
        assert doc.n_entities == 3
        assert doc.dim == 2
        assert doc.entity_names == ("db", "cloud", "app")
        np.testing.assert_array_equal(doc.subjects, [0, 2])
        np.testing.assert_array_equal(doc.objects, [1, 1])

    def test_comments_and_blank_lines_skipped(self):
        doc = parse_triples(b"# header\n\n" + TWO_LINES)
        assert len(doc) == 2

    def test_label_lines_are_vectorized(self):
        doc = parse_triples(b'{"s": "a", "r_label": "for", "o": "b"}\n', d=4, label_seed=7)
        np.testing.assert_array_equal(doc.relations[0], vectorize_relation("for", 4, 7))

    def test_dimension_mismatch_reports_line(self):
        src = TWO_LINES + b'{"s": "x", "r": [1.0, 2.0, 3.0], "o": "y"}\n'
        with pytest.raises(TripleParseError, match="line 3"):
            parse_triples(src)

    def test_malformed_json_reports_line(self):
        with pytest.raises(TripleParseError, match="line 2"):
            parse_triples(b'{"s": "a", "r": [1.0], "o": "b"}\nnot json\n')

    def test_both_r_and_label_rejected(self):
        with pytest.raises(TripleParseError, match="exactly one"):
            parse_triples(b'{"s": "a", "r": [1.0], "r_label": "x", "o": "b"}\n')

    def test_empty_file_rejected(self):
        with pytest.raises(TripleParseError, match="empty"):
            parse_triples(b"# only a comment\n")

    def test_mixed_explicit_and_label_share_dimension(self):
        src = b'{"s": "a", "r": [1.0, 2.0], "o": "b"}\n{"s": "a", "r_label": "to", "o": "b"}\n'
        doc = parse_triples(src)
        assert doc.dim == 2
        assert np.linalg.norm(doc.relations[1]) == pytest.approx(1.0, abs=1e-12)

    def test_duplicate_triples_kept(self):
        line = b'{"s": "a", "r": [0.5], "o": "b"}\n'
        assert len(parse_triples(line * 3)) == 3


class TestRoundTrip:
    def test_serialize_parse_preserves_everything(self, tmp_path):
        rng = np.random.default_rng(0)
        doc = Document(
            subjects=[0, 1, 2, 0],
            relations=rng.normal(size=(4, 3)),
            objects=[1, 2, 0, 2],
            entity_names=("alpha", "beta", "gamma"),
        )
        back = parse_triples(serialize_triples(doc))
        assert len(back) == len(doc)
        assert back.n_entities == doc.n_entities
        assert back.dim == doc.dim
        # bit-exact vectors: JSON float text round-trips doubles
        np.testing.assert_array_equal(back.relations, doc.relations)
        path = tmp_path / "t.jsonl"
        write_triples(doc, path)
        assert path.read_bytes() == serialize_triples(doc)

    def test_entity_ids_stable_under_suffix_permutation(self):
        head = [
            {"s": "a", "r": [0.1], "o": "b"},
            {"s": "c", "r": [0.2], "o": "a"},
        ]
        tail = [
            {"s": "d", "r": [0.3], "o": "e"},
            {"s": "f", "r": [0.4], "o": "d"},
        ]
        def build(order):
            text = "\n".join(json.dumps(r) for r in head + order) + "\n"
            return parse_triples(text.encode())

        one = build(tail)
        two = build(tail[::-1])
        for name in ("a", "b", "c"):
            assert one.entity_names.index(name) == two.entity_names.index(name)


class TestVectorizeRelation:
    def test_deterministic(self):
        np.testing.assert_array_equal(
            vectorize_relation("for", 2, 7), vectorize_relation("for", 2, 7)
        )

    def test_unit_norm(self):
        for label in ("for", "to ensure", "runs on", "über"):
            assert np.linalg.norm(vectorize_relation(label, 5, 3)) == pytest.approx(
                1.0, abs=1e-12
            )

    def test_distinct_labels_distinct_vectors(self):
        a = vectorize_relation("for", 2, 7)
        b = vectorize_relation("to ensure", 2, 7)
        assert not np.array_equal(a, b)

    def test_seed_changes_vector(self):
        a = vectorize_relation("for", 4, 7)
        b = vectorize_relation("for", 4, 8)
        assert not np.array_equal(a, b)

    def test_empty_label_rejected(self):
        with pytest.raises(ValueError, match="nonempty"):
            vectorize_relation("", 4, 7)


class TestDocument:
    def test_needs_at_least_one_observation(self):
        with pytest.raises(ValueError):
            Document(subjects=[], relations=np.empty((0, 2)), objects=[])

    def test_ids_must_resolve(self):
        with pytest.raises(ValueError, match="out of range"):
            Document(subjects=[0], relations=[[0.0]], objects=[5], entity_names=("a",))

    def test_observations_view(self):
        doc = parse_triples(TWO_LINES)
        obs = doc.observations
        assert obs[0].subject == 0 and obs[0].object == 1
        np.testing.assert_array_equal(obs[1].relation, [0.5, 0.3])
