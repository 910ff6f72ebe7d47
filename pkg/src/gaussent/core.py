"""Phase-space conventions, physicality checks and canonical Gaussian states.

Conventions used throughout the package:

* quadratures are ordered ``(x1, p1, x2, p2, ..., xn, pn)``;
* ``x = a + a^dagger`` so the vacuum (and any coherent state) has the
  identity as covariance matrix and ``[x, p] = 2i``;
* first moments are always taken to be zero and are never stored.

Covariance matrices and symplectic transforms are plain ``numpy`` arrays.
Functions never modify their inputs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MalformedMatrixError, UnphysicalStateError

SYMMETRY_TOL = 1e-10
PHYSICAL_TOL = 1e-9

_OMEGA_1 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def symplectic_form(n):
    """Return the ``2n x 2n`` symplectic form, block diagonal in ``[[0, 1], [-1, 0]]``."""
    if n < 1:
        raise DomainError(f"mode count must be positive, got {n}")
    return np.kron(np.eye(n), _OMEGA_1)


def as_cm(gamma, tol=SYMMETRY_TOL):
    """Validate ``gamma`` as a covariance matrix and return a float copy.

    The matrix must be real, square, of even dimension and symmetric within
    ``tol`` (absolute, entrywise). The returned matrix is exactly symmetric.

    Raises:
        MalformedMatrixError: if any of the structural checks fails.
    """
    g = np.array(gamma, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise MalformedMatrixError(f"covariance matrix must be square, got shape {g.shape}")
    if g.shape[0] == 0 or g.shape[0] % 2:
        raise MalformedMatrixError(f"covariance matrix dimension must be even, got {g.shape[0]}")
    if not np.all(np.isfinite(g)):
        raise MalformedMatrixError("covariance matrix has non-finite entries")
    asym = np.max(np.abs(g - g.T))
    if asym > tol:
        raise MalformedMatrixError(f"covariance matrix is not symmetric (max |G - G^T| = {asym:.3g})")
    return 0.5 * (g + g.T)


def num_modes(gamma):
    return np.shape(gamma)[0] // 2


def as_two_mode(gamma):
    g = as_cm(gamma)
    if g.shape != (4, 4):
        raise MalformedMatrixError(f"two-mode covariance matrix expected, got shape {g.shape}")
    return g


@dataclass(frozen=True)
class TwoModeBlocks:
    """The ``alpha | gamma / gamma^T | beta`` partition of a two-mode CM."""

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    def assemble(self):
        return np.block([[self.alpha, self.gamma], [self.gamma.T, self.beta]])


def blocks(gamma):
    g = as_two_mode(gamma)
    return TwoModeBlocks(alpha=g[:2, :2].copy(), beta=g[2:, 2:].copy(), gamma=g[:2, 2:].copy())


def local_invariants(gamma):
    """Return ``(det alpha, det beta, det gamma, det Gamma)`` of a two-mode CM."""
    b = blocks(gamma)
    return (
        float(np.linalg.det(b.alpha)),
        float(np.linalg.det(b.beta)),
        float(np.linalg.det(b.gamma)),
        float(np.linalg.det(b.assemble())),
    )


def delta_invariant(gamma, transposed=False):
    """``Delta = det alpha + det beta + 2 det gamma``; the sign of the last term flips when ``transposed``."""
    da, db, dc, _ = local_invariants(gamma)
    return da + db + (-2.0 if transposed else 2.0) * dc


@dataclass(frozen=True)
class Physicality:
    physical: bool
    min_eigenvalue: float

    def __bool__(self):
        return self.physical


def validate_physical(gamma, tol=PHYSICAL_TOL):
    """Check the uncertainty principle ``Gamma + i Omega >= 0``.

    Returns a :class:`Physicality` verdict carrying the smallest eigenvalue of
    the Hermitian matrix ``Gamma + i Omega``; the state is physical when it is
    no smaller than ``-tol``.
    """
    g = as_cm(gamma)
    omega = symplectic_form(num_modes(g))
    min_ev = float(np.linalg.eigvalsh(g + 1j * omega)[0])
    return Physicality(physical=min_ev >= -tol, min_eigenvalue=min_ev)


def require_physical(gamma):
    g = as_cm(gamma)
    verdict = validate_physical(g)
    if not verdict.physical:
        raise UnphysicalStateError(
            f"unphysical covariance matrix (min eigenvalue of G + i Omega = {verdict.min_eigenvalue:.6g})"
        )
    return g


def purity(gamma):
    """Purity ``tr(rho^2) = det(Gamma)^(-1/2)``."""
    g = as_cm(gamma)
    det = np.linalg.det(g)
    if det <= 0:
        raise UnphysicalStateError(f"det Gamma = {det:.6g} is not positive")
    return float(det ** -0.5)


def _check_nus(nus):
    nus = np.atleast_1d(np.asarray(nus, dtype=float))
    if nus.ndim != 1 or nus.size == 0:
        raise DomainError("need a non-empty sequence of symplectic eigenvalues")
    if np.any(nus < 1.0):
        raise DomainError(f"symplectic eigenvalues must be >= 1, got {nus.tolist()}")
    return nus


def thermal_state(nus):
    """Product of thermal states: ``diag(nu1, nu1, ..., nun, nun)``."""
    return np.diag(np.repeat(_check_nus(nus), 2))


def thermal_fock_distribution(nu, k_max):
    """Photon-number probabilities ``p_0 .. p_kmax`` of a thermal mode with CM ``nu * 1``."""
    nu = float(_check_nus(nu)[0])
    if k_max < 0:
        raise DomainError(f"k_max must be non-negative, got {k_max}")
    ratio = (nu - 1.0) / (nu + 1.0)
    return 2.0 / (nu + 1.0) * ratio ** np.arange(k_max + 1)


def squeezed_thermal_state(nu_minus, nu_plus, r):
    """Two-mode squeezed thermal state in standard form.

    Thermal symplectic spectrum ``(nu_minus, nu_plus)`` squeezed by a two-mode
    squeezer of strength ``r``. For ``nu_minus == nu_plus == 1`` this is the
    two-mode squeezed vacuum with ``a = cosh 2r`` and ``c = +-sinh 2r``.
    """
    nm, npl = _check_nus([nu_minus, nu_plus])
    ch2, sh2 = np.cosh(r) ** 2, np.sinh(r) ** 2
    a = nm * ch2 + npl * sh2
    b = nm * sh2 + npl * ch2
    c = 0.5 * (nm + npl) * np.sinh(2.0 * r)
    return standard_form_matrix(a, b, c, -c)


def standard_form_matrix(a, b, c_plus, c_minus):
    return np.array(
        [
            [a, 0.0, c_plus, 0.0],
            [0.0, a, 0.0, c_minus],
            [c_plus, 0.0, b, 0.0],
            [0.0, c_minus, 0.0, b],
        ]
    )


def vacuum(n=2):
    return np.eye(2 * n)


def to_db(variance):
    """Shot-noise normalized variance in decibels, ``10 log10(variance)``."""
    return 10.0 * np.log10(variance)
