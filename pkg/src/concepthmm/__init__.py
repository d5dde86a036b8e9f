"""Conceptual knowledge graph learning from entity-relation triple sequences.

The package fits a layered generative model (latent context chain, ordered
concept pairs, probabilistic entity memberships, Gaussian relation vectors)
to an observed triple sequence by multi-restart EM over the equivalent
composite-state HMM, then filters the result into a concise conceptual
graph and scores it against reference conceptualizations.
"""

from .conceptgraph import (
    ConceptualGraph,
    build_conceptual_graph,
    export_graph,
    load_graph,
    relevance_scores,
)
from .estimator import ConceptHMM
from .evaluation import (
    EvalReport,
    SilverStandard,
    case1_scores,
    case2_scores,
    concept_prf,
    evaluate,
)
from .inference import (
    ForwardResult,
    Posteriors,
    ZeroLikelihoodError,
    backward,
    forward,
    joint_density,
    posteriors,
    xi_context_fast,
)
from .learning import FitConfig, FitResult, fit, init_random, reestimate
from .model import (
    ModelParams,
    StateIndex,
    emission_density,
    initial_probability,
    load_model,
    save_model,
    transition_probability,
    validate,
)
from .sampling import sample_document, sequence_probability
from .triples import Document, Observation, parse_triples, vectorize_relation, write_triples

__version__ = "0.1.0"

__all__ = [
    "ConceptHMM",
    "ConceptualGraph",
    "Document",
    "EvalReport",
    "FitConfig",
    "FitResult",
    "ForwardResult",
    "ModelParams",
    "Observation",
    "Posteriors",
    "SilverStandard",
    "StateIndex",
    "ZeroLikelihoodError",
    "backward",
    "build_conceptual_graph",
    "case1_scores",
    "case2_scores",
    "concept_prf",
    "emission_density",
    "evaluate",
    "export_graph",
    "fit",
    "forward",
    "init_random",
    "initial_probability",
    "joint_density",
    "load_graph",
    "load_model",
    "parse_triples",
    "posteriors",
    "reestimate",
    "relevance_scores",
    "sample_document",
    "save_model",
    "sequence_probability",
    "transition_probability",
    "validate",
    "vectorize_relation",
    "write_triples",
    "xi_context_fast",
]
