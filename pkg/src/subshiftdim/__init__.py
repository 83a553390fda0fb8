"""Dimension bounds for subfractals of IFS attractors cut out by SFTs and sofic shifts."""

__version__ = "0.1.0"

from .contractions import ContractionSystem  # noqa: E402
from .errors import (  # noqa: E402
    ContractViolation,
    ConvergenceError,
    EmptyLanguageError,
    InputError,
    NotApplicableError,
    PresentationError,
    PresentationWarning,
    ResourceLimitError,
    SubshiftDimError,
)
from .geometry import AffineIFS, PointCloud, attractor_points, box_count_dimension, render_cloud  # noqa: E402
from .pressure import (  # noqa: E402
    DimensionReport,
    PressureFunction,
    boundedness_diagnostics,
    cylinder_measure,
    dimension_bounds,
    find_pressure_zero,
    word_sum_via_transfer,
)
from .sofic import LabeledGraph, lemma51_sandwich, validate_right_resolving, weighted_adjacency  # noqa: E402
from .spectral import is_irreducible, scc_decompose, spectral_radius  # noqa: E402
from .symbolic import (  # noqa: E402
    Alphabet,
    ForbiddenSet,
    TransitionMatrix,
    build_transition_matrix,
    enumerate_allowed_words,
    normalize_forbidden_set,
)
