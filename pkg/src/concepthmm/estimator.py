"""Scikit-learn style front end for the whole pipeline.

``ConceptHMM`` wraps random-restart EM fitting behind the familiar
``fit`` / ``score`` / ``transform`` surface so the model slots into
sklearn tooling (``get_params`` / ``set_params``, cloning, pipelines that
accept sequence-shaped inputs).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import conceptgraph, learning, sampling
from .inference import posteriors
from .learning import FitConfig
from .validation import as_document, check_document_matches


class ConceptHMM(BaseEstimator):
    """Conceptual knowledge extractor over entity-relation triple sequences.

    Parameters
    ----------
    n_contexts : int
        Number of latent writing contexts (the Markov chain size).
    n_concepts : int
        Number of concepts; must be at least 2.
    sigma : float
        Fixed noise scale of the relation vectors.
    epsilon : float
        Convergence threshold on the largest parameter change per iteration.
    max_iters : int
        Iteration cap per restart.
    restarts : int
        Number of random restarts; the best final log-likelihood wins.
    seed : int
        Master seed; restart r uses ``seed + r``.
    smoothing_floor : float
        Lower bound applied to membership rows each update.
    n_jobs : int
        Worker cap for parallel restarts.

    Attributes
    ----------
    params_ : ModelParams
        Fitted parameter set.
    result_ : FitResult
        Full fit bookkeeping (traces, per-restart log-likelihoods).
    n_entities_ : int
        Entity dictionary size seen during fit.
    """

    def __init__(
        self,
        n_contexts: int = 2,
        n_concepts: int = 3,
        sigma: float = 0.1,
        epsilon: float = 1e-4,
        max_iters: int = 500,
        restarts: int = 10,
        seed: int = 0,
        smoothing_floor: float = 1e-9,
        n_jobs: int = 1,
    ):
        self.n_contexts = n_contexts
        self.n_concepts = n_concepts
        self.sigma = sigma
        self.epsilon = epsilon
        self.max_iters = max_iters
        self.restarts = restarts
        self.seed = seed
        self.smoothing_floor = smoothing_floor
        self.n_jobs = n_jobs

    def _config(self) -> FitConfig:
        return FitConfig(
            epsilon=self.epsilon,
            max_iters=self.max_iters,
            restarts=self.restarts,
            seed=self.seed,
            smoothing_floor=self.smoothing_floor,
        )

    def fit(self, X, y=None):
        """Fit to one triple sequence (Document, (T, d+2) array, or triples)."""
        doc = as_document(X)
        result = learning.fit(
            doc,
            b=self.n_contexts,
            k=self.n_concepts,
            d=doc.dim,
            sigma=self.sigma,
            config=self._config(),
            n_jobs=self.n_jobs,
        )
        self.params_ = result.params
        self.result_ = result
        self.n_entities_ = doc.n_entities
        self.dim_ = doc.dim
        return self

    def _posteriors(self, X):
        check_is_fitted(self, "params_")
        doc = check_document_matches(as_document(X, d=self.dim_), self.params_)
        return posteriors(self.params_, doc)

    def score(self, X, y=None) -> float:
        """Log-likelihood of a triple sequence under the fitted model."""
        return self._posteriors(X).log_likelihood

    def predict_proba(self, X) -> np.ndarray:
        """Posterior state occupancies, shape (T, n_states)."""
        return self._posteriors(X).gamma

    def transform(self, X) -> np.ndarray:
        """Per-step concept-pair posteriors as features, shape (T, k*(k-1)).

        Columns follow the packed ordered-pair index of the model.
        """
        post = self._posteriors(X)
        pairs = self.params_.pairs
        return post.gamma_pair[:, pairs[:, 0], pairs[:, 1]]

    def sample(self, n_samples: int, seed: int = 0):
        """Sample a document of ``n_samples`` triples from the fitted model."""
        check_is_fitted(self, "params_")
        return sampling.sample_document(self.params_, n_samples, seed)

    def conceptual_graph(self, X, theta: float = None, vartheta: float = 0.05):
        """Posterior-filtered conceptual graph for a triple sequence."""
        check_is_fitted(self, "params_")
        doc = check_document_matches(as_document(X, d=self.dim_), self.params_)
        post = posteriors(self.params_, doc)
        return conceptgraph.build_conceptual_graph(
            self.params_, post, theta=theta, vartheta=vartheta
        )
