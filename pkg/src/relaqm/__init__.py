"""relaqm: observer-relative finite-dimensional quantum mechanics.

Every state assignment in this package is relative to a named observer;
nothing is ever described "from nowhere".  The library covers the full
chain from elementary Hilbert-space numerics to declarative multi-observer
scenarios:

* :mod:`relaqm.hilbert` -- tagged states, verified operators, tensor
  products, Born probabilities, seeded sampling;
* :mod:`relaqm.measurement` -- the collapse and entangling descriptions of
  one measurement, the pointer-correlation projector and its expectation;
* :mod:`relaqm.questions` -- yes/no questions as subspaces, the orthomodular
  lattice, complete families and their Boolean algebras;
* :mod:`relaqm.kernels` -- doubly stochastic transition matrices, their
  unitary realizations, composite-question interference, and the
  unistochasticity search;
* :mod:`relaqm.dynamics` -- Heisenberg-picture propagators and picture
  duality;
* :mod:`relaqm.scenario` -- the declarative scenario runner and report
  emitter behind the ``relaqm`` command-line tool.
"""

from .errors import (
    DescriptionUnavailable,
    DimensionMismatch,
    FamilyMismatch,
    IndexOutOfRange,
    InvalidDimension,
    MissingUnitary,
    NormalizationError,
    NotAPartition,
    NotDoublyStochastic,
    NotHermitian,
    ParseError,
    PreconditionViolated,
    RelaqmError,
    TooLarge,
    ValidationError,
    ZeroBranch,
)
from .hilbert import (
    ATOL,
    OPT_ATOL,
    RANK_TOL,
    Operator,
    StateVector,
    apply,
    basis_state,
    born_probabilities,
    conditional_state,
    haar_unitary,
    identity,
    projector_onto,
    random_hermitian,
    random_state,
    sample_outcome,
    tensor,
)
from .measurement import (
    MeasurementSetup,
    collapse_description,
    completion_probability,
    consistency_check,
    correlation_operator,
    entangling_description,
    premeasurement_unitary,
    standard_setup,
)
from .questions import (
    AnswerString,
    CompleteFamily,
    Question,
    ask_sequence,
    boolean_algebra,
    complete_questions,
    implies,
    info_capacity,
    join,
    meet,
    negate,
    orthogonal,
    orthomodular_check,
    redundant_flags,
    same_question,
)
from .kernels import (
    TransitionKernel,
    UnistochasticResult,
    classical_composite_probability,
    compose,
    composite_probability,
    interference_gap,
    kernel_from_families,
    phase_fix,
    triangle_criterion_3x3,
    unistochastic_search,
    verify_double_stochastic,
)
from .dynamics import Propagator, heisenberg_evolve, propagator, schrodinger_evolve
from .scenario import (
    Report,
    Scenario,
    emit_report,
    fixture_path,
    lint_report,
    load_scenario,
    parse_scenario,
    run,
)

__version__ = "0.1.0"
