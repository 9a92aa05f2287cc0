"""Floquet exponents of periodic linear ODEs by harmonic balance.

The package computes characteristic exponents and Fourier-form approximate
solutions for ``p(t) x'' + q(t) x' + r(t) x = 0`` and planar systems
``z' = A(t) z`` with periodic coefficients, three independent ways:

* harmonic balance with variational exponent selection (:mod:`.harmonic_balance`),
* a fixed-step RK4 monodromy baseline (:mod:`.monodromy`),
* exact closed forms for systems commuting with their integral (:mod:`.commuting`).

:mod:`.jobs` cross-tabulates the methods; :mod:`.cli` and :mod:`.service`
expose them as a command line and an HTTP service.
"""

from ._version import __version__
from .commuting import (
    Classification,
    CommutingSystem,
    average_matrix_exponents,
    classify,
    closed_form_exponents,
    detect_structure,
    fundamental_matrix,
    verify_commutation,
)
from .harmonic_balance import (
    FloquetSolution,
    QuadraticPencil,
    assemble,
    candidate_roots,
    det_polynomial,
    expected_exponent_sum,
    null_vector,
    pencil_eigenvalues,
    reconstruct,
    residual,
    second_moment,
    select_exponents,
)
from .monodromy import (
    MonodromyResult,
    fundamental_on_grid,
    integrate_rk4,
    monodromy_matrix,
    reference_solution,
)
from .problems import (
    Boundedness,
    CompanionForm,
    DecoupledSystemError,
    HillForm,
    PlanarSystem,
    ProblemError,
    ScalarODE,
    boundedness_criterion,
    catalog,
    catalog_entries,
    hill_transform,
    scalar_to_system,
    system_to_scalar,
)
from .trigpoly import (
    FrequencyMismatchError,
    SecularFunction,
    TrigPoly,
    align,
)

__all__ = [
    "__version__",
    "TrigPoly",
    "SecularFunction",
    "FrequencyMismatchError",
    "align",
    "ScalarODE",
    "PlanarSystem",
    "CompanionForm",
    "HillForm",
    "ProblemError",
    "DecoupledSystemError",
    "Boundedness",
    "hill_transform",
    "scalar_to_system",
    "system_to_scalar",
    "boundedness_criterion",
    "catalog",
    "catalog_entries",
    "QuadraticPencil",
    "FloquetSolution",
    "assemble",
    "det_polynomial",
    "pencil_eigenvalues",
    "candidate_roots",
    "null_vector",
    "residual",
    "expected_exponent_sum",
    "select_exponents",
    "reconstruct",
    "second_moment",
    "MonodromyResult",
    "integrate_rk4",
    "monodromy_matrix",
    "fundamental_on_grid",
    "reference_solution",
    "CommutingSystem",
    "Classification",
    "detect_structure",
    "verify_commutation",
    "fundamental_matrix",
    "closed_form_exponents",
    "average_matrix_exponents",
    "classify",
]
