"""Simplicial secrecy models: validation, model checking, SSL derivations,
share models and bounded countermodel search."""

from .checker import Evaluator, satisfies, truth_set, valid_on
from .complex import AUX_COLOUR, ChromaticComplex, facet_id, facet_key, parse_facet_key, validate_complex
from .documents import dumps_model, load_model, loads_model, save_model
from .logic import Formula, parse, to_text
from .model import SecrecyModel, SNViolation, check_SN, normalize_owner_local, validate_model
from .proof import Derivation, StepError, check_derivation, fixture_library
from .search import SearchBounds, SearchResult, check_validity_bounded, enumerate_models, random_model
from .share import ShareModel, build_share_model, check_representation, to_aux

__version__ = "0.1.0"
