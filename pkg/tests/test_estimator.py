import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from concepthmm import ConceptHMM, ModelParams
from concepthmm.sampling import sample_document
from concepthmm.validation import as_document

from conftest import random_document


def small_planted():
    return ModelParams(
        sigma=0.3,
        pi=[1.0],
        trans=[[1.0]],
        f=[[0.7, 0.3]],
        q=[[0.9, 0.1, 0.0], [0.0, 0.2, 0.8]],
        v=[[1.0, 0.0], [-1.0, 0.5]],
    )


@pytest.fixture(scope="module")
def fitted():
    doc, _ = sample_document(small_planted(), T=120, seed=1)
    est = ConceptHMM(
        n_contexts=1, n_concepts=2, sigma=0.3, restarts=3, seed=5, max_iters=60
    )
    return est.fit(doc), doc


class TestSklearnSurface:
    def test_get_params_roundtrip(self):
        est = ConceptHMM(n_contexts=3, sigma=0.2)
        params = est.get_params()
        assert params["n_contexts"] == 3
        assert params["sigma"] == 0.2
        cloned = clone(est)
        assert cloned.get_params() == params

    def test_set_params(self):
        est = ConceptHMM().set_params(n_concepts=5, restarts=2)
        assert est.n_concepts == 5 and est.restarts == 2

    def test_unfitted_access_raises(self):
        with pytest.raises(NotFittedError):
            ConceptHMM().score(np.zeros((3, 4)))


class TestFitSurface:
    def test_fit_sets_attributes(self, fitted):
        est, doc = fitted
        assert est.params_.b == 1 and est.params_.k == 2
        assert est.n_entities_ == doc.n_entities
        assert est.dim_ == 2
        assert len(est.result_.restart_logliks) == 3

    def test_score_matches_fit_trace_end(self, fitted):
        est, doc = fitted
        assert est.score(doc) == pytest.approx(est.result_.loglik_trace[-1])

    def test_predict_proba_rows_normalized(self, fitted):
        est, doc = fitted
        proba = est.predict_proba(doc)
        assert proba.shape == (len(doc), est.params_.n_states)
        np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-8)

    def test_transform_gives_pair_features(self, fitted):
        est, doc = fitted
        feats = est.transform(doc)
        assert feats.shape == (len(doc), 2)
        np.testing.assert_allclose(feats.sum(axis=1), 1.0, atol=1e-8)

    def test_sample_roundtrip(self, fitted):
        est, _ = fitted
        doc, states = est.sample(25, seed=3)
        assert len(doc) == 25 and len(states) == 25

    def test_conceptual_graph(self, fitted):
        est, doc = fitted
        graph = est.conceptual_graph(doc, vartheta=0.05)
        assert graph.k == 2

    def test_array_input(self):
        rng = np.random.default_rng(2)
        X = np.column_stack(
            [
                rng.integers(0, 3, 40),
                rng.normal(size=(40, 2)),
                rng.integers(0, 3, 40),
            ]
        )
        est = ConceptHMM(
            n_contexts=1, n_concepts=2, sigma=0.5, restarts=2, max_iters=30
        ).fit(X)
        assert np.isfinite(est.score(X))

    def test_mismatched_dimension_rejected(self, fitted):
        est, _ = fitted
        bad = random_document(np.random.default_rng(0), n=3, d=5, T=4)
        with pytest.raises(ValueError, match="dim"):
            est.score(bad)

    def test_unknown_entity_rejected(self, fitted):
        est, _ = fitted
        bad = random_document(np.random.default_rng(0), n=20, d=2, T=30)
        with pytest.raises(ValueError, match="entit"):
            est.score(bad)


class TestAsDocument:
    def test_triple_iterable(self):
        doc = as_document([(0, [0.5, 0.5], 1), (1, [0.1, 0.2], 0)])
        assert len(doc) == 2 and doc.dim == 2

    def test_non_integer_ids_rejected(self):
        X = np.array([[0.5, 1.0, 1.0], [1.0, 2.0, 0.0]])
        with pytest.raises(ValueError, match="integer"):
            as_document(X)

    def test_too_narrow_array_rejected(self):
        with pytest.raises(ValueError, match=r"\(T, d \+ 2\)"):
            as_document(np.zeros((4, 2)))
