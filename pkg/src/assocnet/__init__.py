"""Word-association network toolkit.

Builds weighted word graphs from free-association norms, simulates spreading
activation from prime nodes, and quantifies implicit social biases through
stereotype differences, valence regressions, and emotion differences, with
qualitative prime-to-target path extraction.
"""

from .activation import (
    ActivationMatrix,
    SpreadParams,
    normalize_matrix,
    spread,
    spread_batch,
)
from .bias import (
    BiasReport,
    PairedDifferenceSet,
    emotion_bias,
    stereotype_bias,
    valence_bias,
)
from .errors import (
    AssocnetError,
    ComputeError,
    ConfigError,
    DataError,
    ParseError,
    ValidationError,
)
from .ingest import (
    EMOTION_NAMES,
    Lexicon,
    NormRecord,
    PrimeSpec,
    load_lexicons,
    load_prime_spec,
    load_vocabulary,
    parse_trials,
)
from .network import (
    AssociationNetwork,
    NetworkStats,
    build_network,
    diameter,
    load_network,
    network_stats,
    save_network,
)
from .stats import (
    GlmFit,
    TestResult,
    ols_fit,
    wald_equal_coefficients,
    wilcoxon_signed_rank,
)
from .streams import MindsetStream, extract_stream, render_dot

__all__ = [
    "ActivationMatrix",
    "AssocnetError",
    "AssociationNetwork",
    "BiasReport",
    "ComputeError",
    "ConfigError",
    "DataError",
    "EMOTION_NAMES",
    "GlmFit",
    "Lexicon",
    "MindsetStream",
    "NetworkStats",
    "NormRecord",
    "PairedDifferenceSet",
    "ParseError",
    "PrimeSpec",
    "SpreadParams",
    "TestResult",
    "ValidationError",
    "build_network",
    "diameter",
    "emotion_bias",
    "extract_stream",
    "load_lexicons",
    "load_network",
    "load_prime_spec",
    "load_vocabulary",
    "network_stats",
    "normalize_matrix",
    "ols_fit",
    "parse_trials",
    "render_dot",
    "save_network",
    "spread",
    "spread_batch",
    "stereotype_bias",
    "valence_bias",
    "wald_equal_coefficients",
    "wilcoxon_signed_rank",
]

__version__ = "0.1.0"
