"""Covariance-matrix toolkit for two-mode Gaussian states.

Quadratures are ordered ``(x1, p1, x2, p2)`` and the vacuum covariance
matrix is the identity.
"""

__version__ = "0.1.0"

from .core import (
    Physicality,
    TwoModeBlocks,
    as_cm,
    blocks,
    delta_invariant,
    local_invariants,
    purity,
    require_physical,
    squeezed_thermal_state,
    standard_form_matrix,
    symplectic_form,
    thermal_fock_distribution,
    thermal_state,
    to_db,
    vacuum,
    validate_physical,
)
from .coupling import (
    CoupledStateParams,
    NoiseEllipse,
    coupled_cm_entangled_basis,
    coupled_cm_squeezed_basis,
    logneg_analytic,
    noise_ellipse,
    nu_tilde_sq_analytic,
    sweep_logneg_surface,
)
from .entanglement import (
    EntanglementReport,
    analyze,
    entanglement_of_formation,
    eof_function,
    log_negativity,
    negativity,
    nu_tilde,
    nu_tilde_symmetric,
    ppt_separable,
)
from .errors import (
    CmFormatError,
    DomainError,
    GaussianStateError,
    InvariantInconsistencyError,
    MalformedMatrixError,
    NotSymmetricStateError,
    NumericalDegeneracyError,
    UnphysicalStateError,
)
from .passive import (
    PassiveCorrection,
    WaveplateSequence,
    optimize_passive,
    passive_bound,
    passive_transform,
    waveplate_decomposition,
)
from .symplectic import (
    StandardForm,
    apply,
    beam_splitter,
    direct_sum,
    embed,
    partial_transpose,
    phase_shift,
    single_mode_squeezer,
    standard_form,
    symplectic_spectrum,
    two_mode_squeezer,
    williamson,
)
