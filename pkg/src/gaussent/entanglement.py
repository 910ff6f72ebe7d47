"""PPT separability and entanglement measures of two-mode Gaussian states.

Everything here is a function of the smallest symplectic eigenvalue
``nu_tilde_minus`` of the partially transposed covariance matrix. Logarithms
are base 2.
"""

import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .core import as_two_mode, local_invariants, purity, require_physical
from .errors import InvariantInconsistencyError, NotSymmetricStateError, NumericalDegeneracyError

SEPARABILITY_TOL = 1e-9
SYMMETRY_TOL = 1e-6
DISCRIMINANT_TOL = 1e-9


def nu_tilde(gamma):
    """Symplectic eigenvalues ``(nu_minus, nu_plus)`` of the partial transpose.

    Evaluated from the invariants ``Delta~ = det a + det b - 2 det c`` and
    ``det Gamma``; no physicality check is made, so rounded measured matrices
    can be analysed as long as the invariants stay consistent.

    Raises:
        InvariantInconsistencyError: ``Delta~^2 - 4 det Gamma`` is negative
            beyond rounding (``1e-9`` relative to ``Delta~^2``), or ``det Gamma <= 0``.
    """
    da, db, dc, det = local_invariants(as_two_mode(gamma))
    if det <= 0:
        raise InvariantInconsistencyError(f"det Gamma = {det:.6g} is not positive")
    delta_t = da + db - 2.0 * dc
    disc = delta_t * delta_t - 4.0 * det
    if disc < -DISCRIMINANT_TOL * max(1.0, delta_t * delta_t):
        raise InvariantInconsistencyError(f"Delta~^2 - 4 det Gamma = {disc:.3g} < 0")
    root = np.sqrt(max(disc, 0.0))
    hi = 0.5 * (delta_t + root)
    if hi <= 0:
        raise InvariantInconsistencyError("partially transposed spectrum is not positive")
    # nu_minus^2 nu_plus^2 = det Gamma avoids the cancellation in delta_t - root
    return float(np.sqrt(det / hi)), float(np.sqrt(hi))


def nu_tilde_symmetric(sf):
    """``nu_tilde_minus`` of a symmetric standard form.

    For ``c_plus * c_minus <= 0`` (the only case that can be entangled) this
    is ``sqrt((a - |c+|)(a - |c-|))``, the geometric mean of the two smallest
    eigenvalues of the beam-splitter-rotated matrix.
    """
    if abs(sf.a - sf.b) > SYMMETRY_TOL:
        raise NotSymmetricStateError(f"standard form is not symmetric: a = {sf.a}, b = {sf.b}")
    sign = -1.0 if sf.c_plus * sf.c_minus > 0 else 1.0
    a = 0.5 * (sf.a + sf.b)
    return float(np.sqrt((a - abs(sf.c_plus)) * (a - sign * abs(sf.c_minus))))


def ppt_separable(gamma):
    """PPT verdict: separable iff ``nu_tilde_minus >= 1``.

    The verdict is cross-checked against ``Delta~ <= det Gamma + 1``; an
    entangled verdict also requires ``det gamma < 0``.
    """
    g = require_physical(gamma)
    nu_minus, _ = nu_tilde(g)
    separable = nu_minus >= 1.0 - SEPARABILITY_TOL
    da, db, dc, det = local_invariants(g)
    by_delta = da + db - 2.0 * dc <= det + 1.0
    if by_delta != separable and abs(nu_minus - 1.0) > 1e-6:
        raise NumericalDegeneracyError(f"PPT tests disagree at nu_tilde_minus = {nu_minus:.9g}")
    if not separable and dc >= 0:
        raise InvariantInconsistencyError(f"entangled verdict with det gamma = {dc:.6g} >= 0")
    return bool(separable)


# within SEPARABILITY_TOL of the boundary the measures report exactly zero,
# consistent with the separable verdict
def _log_negativity(nu_minus):
    if nu_minus >= 1.0 - SEPARABILITY_TOL:
        return 0.0
    return -float(np.log2(nu_minus))


def _negativity(nu_minus):
    if nu_minus >= 1.0 - SEPARABILITY_TOL:
        return 0.0
    return (1.0 - nu_minus) / (2.0 * nu_minus)


def log_negativity(gamma):
    """``E_N = max(0, -log2 nu_tilde_minus)``."""
    return _log_negativity(nu_tilde(require_physical(gamma))[0])


def negativity(gamma):
    return _negativity(nu_tilde(require_physical(gamma))[0])


def _xlog2x(x):
    return 0.0 if x <= 0.0 else x * np.log2(x)


def eof_function(x):
    """Gaussian entanglement of formation as a function of ``nu_tilde_minus``.

    Returns 0 for ``x >= 1``; diverges as ``x -> 0``.
    """
    x = float(x)
    if x <= 0:
        raise ValueError(f"nu_tilde_minus must be positive, got {x}")
    if x >= 1.0:
        return 0.0
    plus = (1.0 + x) ** 2 / (4.0 * x)
    minus = (1.0 - x) ** 2 / (4.0 * x)
    return max(0.0, float(_xlog2x(plus) - _xlog2x(minus)))


def _symmetric_locals(g):
    da, db, _, _ = local_invariants(g)
    a, b = np.sqrt(da), np.sqrt(db)
    return bool(abs(a - b) <= SYMMETRY_TOL), float(a), float(b)


def entanglement_of_formation(gamma):
    """Entanglement of formation of a symmetric two-mode Gaussian state.

    Raises:
        NotSymmetricStateError: if ``sqrt(det alpha)`` and ``sqrt(det beta)``
            differ by more than ``1e-6``; no closed form is used outside the
            symmetric case.
    """
    g = require_physical(gamma)
    symmetric, a, b = _symmetric_locals(g)
    if not symmetric:
        raise NotSymmetricStateError(f"entanglement of formation needs a symmetric state (a = {a:.9g}, b = {b:.9g})")
    return eof_function(nu_tilde(g)[0])


@dataclass(frozen=True)
class EntanglementReport:
    nu_tilde_minus: float
    nu_tilde_plus: float
    negativity: float
    log_negativity: float
    eof: Optional[float]
    purity: float
    separable: bool
    symmetric: bool

    def to_dict(self):
        return asdict(self)

    def to_text(self):
        lines = []
        for key, value in self.to_dict().items():
            if value is None:
                value = "NA"
            elif isinstance(value, bool):
                value = str(value).lower()
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{key}={value}")
        return "\n".join(lines)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)


def analyze(gamma):
    """Full entanglement report for a physical two-mode CM."""
    g = require_physical(as_two_mode(gamma))
    nu_minus, nu_plus = nu_tilde(g)
    symmetric, _, _ = _symmetric_locals(g)
    return EntanglementReport(
        nu_tilde_minus=nu_minus,
        nu_tilde_plus=nu_plus,
        negativity=_negativity(nu_minus),
        log_negativity=_log_negativity(nu_minus),
        eof=eof_function(nu_minus) if symmetric else None,
        purity=purity(g),
        separable=ppt_separable(g),
        symmetric=symmetric,
    )
