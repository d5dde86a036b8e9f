import math

import numpy as np
import pytest

from concepthmm.conceptgraph import parse_structured
from concepthmm.evaluation import (
    EvalReport,
    SilverStandard,
    case1_scores,
    case2_scores,
    closeness,
    concept_prf,
    evaluate,
    harmonic_mean,
    parse_silver,
)


class TestConceptPrf:
    def test_identical_sets(self):
        assert concept_prf({"a", "b"}, {"a", "b"}) == (1.0, 1.0, 1.0)

    def test_half_overlap(self):
        assert concept_prf({"a", "b"}, {"b", "c"}) == (0.5, 0.5, 0.5)

    def test_disjoint_sets_are_zero(self):
        assert concept_prf({"a"}, {"b"}) == (0.0, 0.0, 0.0)

    def test_empty_computed_set(self):
        assert concept_prf(set(), {"a"}) == (0.0, 0.0, 0.0)

    def test_closeness_symmetric(self):
        pairs = [({"a", "b"}, {"b", "c", "d"}), ({"x"}, {"x", "y"})]
        for a, s in pairs:
            assert closeness(a, s) == pytest.approx(closeness(s, a))

    def test_scores_within_unit_interval(self):
        rng = np.random.default_rng(0)
        universe = list("abcdefgh")
        for _ in range(50):
            a = {u for u in universe if rng.random() < 0.5}
            s = {u for u in universe if rng.random() < 0.5} or {"a"}
            p, r, f = concept_prf(a, s)
            assert 0.0 <= p <= 1.0 and 0.0 <= r <= 1.0 and 0.0 <= f <= 1.0


class TestCase1:
    def test_identity(self):
        c = [{"a", "b"}, {"c"}]
        assert case1_scores(c, c) == (1.0, 1.0, 1.0)

    def test_split_against_merged(self):
        # closenesses 0.8 and 0.5, precision (0.8 + 0.5) / 2, recall 0.8
        p, r, f = case1_scores([{"a", "b"}, {"c"}], [{"a", "b", "c"}])
        assert p == pytest.approx(0.65, abs=1e-12)
        assert r == pytest.approx(0.8, abs=1e-12)
        assert f == pytest.approx(2 * 0.65 * 0.8 / 1.45, abs=1e-12)

    def test_disjoint(self):
        assert case1_scores([{"a"}], [{"b"}, {"c"}]) == (0.0, 0.0, 0.0)

    def test_order_invariance(self):
        ca = [{"a", "b"}, {"c", "d"}, {"e"}]
        cs = [{"a"}, {"c", "d", "e"}]
        base = case1_scores(ca, cs)
        assert case1_scores(ca[::-1], cs) == pytest.approx(base)
        assert case1_scores(ca, cs[::-1]) == pytest.approx(base)

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            case1_scores([], [{"a"}])


def graph_of(concept_members, relations, vartheta=0.0):
    return parse_structured(
        {
            "concepts": [
                {
                    "id": c,
                    "members": [{"entity": e, "prob": 1.0} for e in sorted(ms)],
                }
                for c, ms in enumerate(concept_members)
            ],
            "relations": [
                {"from": i, "to": j, "vector": list(vec), "score": 1.0}
                for i, j, vec in relations
            ],
            "theta": 1.0,
            "vartheta": vartheta,
        }
    )


class TestCase2:
    def test_identical_graphs(self):
        g = graph_of([{"a"}, {"b"}], [(0, 1, (0.5, -0.5))])
        silver = SilverStandard(
            concepts=({"a"}, {"b"}), relations=((0, 1, (0.5, -0.5)),)
        )
        assert case2_scores(g, silver) == (1.0, 1.0, 1.0)

    def test_hand_value(self):
        # endpoint closenesses 1 and 0.5; vector distance ln 2 gives e^-d = 0.5;
        # HM(1, 0.5, 0.5) = 3 / (1 + 2 + 2) = 0.6
        g = graph_of([{"a"}, {"b", "x"}], [(0, 1, (math.log(2.0),))])
        silver = SilverStandard(
            concepts=({"a"}, {"b", "y"}), relations=((0, 1, (0.0,)),)
        )
        p, r, f = case2_scores(g, silver)
        assert p == pytest.approx(0.6, abs=1e-12)
        assert r == pytest.approx(0.6, abs=1e-12)
        assert f == pytest.approx(0.6, abs=1e-12)

    def test_zero_endpoint_annihilates(self):
        g = graph_of([{"a"}, {"zzz"}], [(0, 1, (0.0,))])
        silver = SilverStandard(concepts=({"a"}, {"b"}), relations=((0, 1, (0.0,)),))
        assert case2_scores(g, silver) == (0.0, 0.0, 0.0)

    def test_dimension_mismatch_rejected(self):
        g = graph_of([{"a"}, {"b"}], [(0, 1, (0.0, 1.0))])
        silver = SilverStandard(concepts=({"a"}, {"b"}), relations=((0, 1, (0.0,)),))
        with pytest.raises(ValueError, match="dimensions"):
            case2_scores(g, silver)

    def test_harmonic_mean_conventions(self):
        assert harmonic_mean(1.0, 0.5, 0.5) == pytest.approx(0.6)
        assert harmonic_mean(1.0, 0.0, 0.5) == 0.0


class TestEvaluate:
    def test_case2_omitted_without_silver_relations(self):
        g = graph_of([{"a"}, {"b"}], [(0, 1, (0.0,))])
        report = evaluate(g, SilverStandard(concepts=({"a"}, {"b"})))
        assert report.case2 is None
        assert report.case1 == (1.0, 1.0, 1.0)

    def test_closeness_matrix_shape(self):
        g = graph_of([{"a"}, {"b"}, {"c"}], [])
        report = evaluate(g, SilverStandard(concepts=({"a"}, {"b", "c"})))
        assert report.closeness.shape == (3, 2)
        assert report.closeness[0, 0] == 1.0

    def test_report_dict_is_json_ready(self):
        import json

        g = graph_of([{"a"}], [])
        report = evaluate(g, SilverStandard(concepts=({"a"},)))
        json.dumps(report.to_dict())


class TestSilverFile:
    def test_parse_with_relations(self):
        blob = b"""
        {"concepts": [["a", "b"], ["c"]],
         "relations": [{"from_index": 0, "to_index": 1, "vector": [0.1, 0.2]}]}
        """
        silver = parse_silver(blob)
        assert silver.concepts == (frozenset({"a", "b"}), frozenset({"c"}))
        assert silver.relations == ((0, 1, (0.1, 0.2)),)

    def test_unresolved_names_listed(self):
        blob = b'{"concepts": [["a", "nope", "also-nope"]]}'
        with pytest.raises(ValueError) as err:
            parse_silver(blob, known_entities=("a", "b"))
        assert "also-nope" in str(err.value) and "nope" in str(err.value)

    def test_relation_endpoints_validated(self):
        with pytest.raises(ValueError, match="out of range"):
            SilverStandard(concepts=({"a"},), relations=((0, 3, (0.0,)),))

    def test_empty_concept_rejected(self):
        with pytest.raises(ValueError, match="nonempty"):
            SilverStandard(concepts=({"a"}, set()))
