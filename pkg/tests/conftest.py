import numpy as np
import pytest

from concepthmm import Document, ModelParams
from concepthmm.learning import init_random


@pytest.fixture
def toy_params():
    """b=1, k=2, n=2, d=1, sigma=1: identity-like memberships, centered vectors.

    State (0, (0, 1)) is the only one that can emit (e0, r, e1).
    """
    return ModelParams(
        sigma=1.0,
        pi=[1.0],
        trans=[[1.0]],
        f=[[0.5, 0.5]],
        q=[[1.0, 0.0], [0.0, 1.0]],
        v=[[0.0], [0.0]],
    )


@pytest.fixture
def toy_doc():
    return Document(subjects=[0], relations=[[0.0]], objects=[1])


def random_document(rng, n, d, T):
    return Document(
        subjects=rng.integers(0, n, T),
        relations=rng.normal(size=(T, d)),
        objects=rng.integers(0, n, T),
    )


def random_instance(seed, b=2, k=3, n=4, d=1, T=4, sigma=0.7):
    """A valid random model plus a random document of matching shape."""
    rng = np.random.default_rng(seed)
    doc = random_document(rng, n, d, T)
    params = init_random(b, k, n, d, sigma, doc, seed=seed + 1)
    return params, doc
