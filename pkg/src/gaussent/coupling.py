"""Two squeezed modes with tilted squeezing axes and their beam-splitter image.

Mode ``A+`` is squeezed in ``p`` (variances ``a, 1/a``); mode ``A-`` carries
the same squeezing with its axes tilted by ``theta`` away from orthogonality.
Mixing both on a balanced beam splitter gives the entangled pair ``A1, A2``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvariantInconsistencyError
from .symplectic import apply, beam_splitter


@dataclass(frozen=True)
class CoupledStateParams:
    """Anti-squeezed variance ``a >= 1`` (squeezed variance ``1/a``) and tilt ``theta`` [rad]."""

    a: float
    theta: float

    def __post_init__(self):
        if not self.a >= 1.0:
            raise DomainError(f"squeezing factor a must be >= 1, got {self.a}")

    @property
    def squeezing_db(self):
        return -10.0 * np.log10(self.a)


def _minus_block(a, theta):
    c, s = np.cos(theta), np.sin(theta)
    b = c * c / a + a * s * s
    b_prime = a * c * c + s * s / a
    cross = (a - 1.0 / a) * s * c
    return np.array([[b, cross], [cross, b_prime]])


def coupled_cm_squeezed_basis(p):
    """CM in the ``A+, A-`` basis; the intermodal block is exactly zero."""
    g = np.zeros((4, 4))
    g[:2, :2] = np.diag([p.a, 1.0 / p.a])
    g[2:, 2:] = _minus_block(p.a, p.theta)
    return g


def coupled_cm_entangled_basis(p):
    """CM of ``A1, A2`` written out in closed form (entries ``n1, n2, k, k'``)."""
    a, th = p.a, p.theta
    c2, s2, sc = np.cos(th) ** 2, np.sin(th) ** 2, np.sin(th) * np.cos(th)
    n1 = (c2 + a * a * (s2 + 1.0)) / (2.0 * a)
    n2 = (a * a * c2 + s2 + 1.0) / (2.0 * a)
    k = (1.0 - a * a) / (2.0 * a) * c2
    kp = (a * a - 1.0) / (2.0 * a) * sc
    return np.array(
        [
            [n1, kp, k, kp],
            [kp, n2, kp, -k],
            [k, kp, n1, kp],
            [kp, -k, kp, n2],
        ]
    )


def coupled_cm_entangled_by_congruence(p):
    return apply(beam_splitter(np.pi / 4), coupled_cm_squeezed_basis(p))


def _nu_tilde_sq(a, theta):
    a = np.asarray(a, dtype=float)
    theta = np.asarray(theta, dtype=float)
    a2 = a * a
    cos2 = np.cos(theta) ** 2
    radicand = cos2 * (a2 * a2 + 6.0 * a2 + (a2 - 1.0) ** 2 * np.cos(2.0 * theta) + 1.0)
    if np.any(radicand < -1e-12):
        raise InvariantInconsistencyError("negative radicand in nu_tilde^2")
    radical = np.sqrt(np.clip(radicand, 0.0, None))
    lead = 2.0 * (a2 * a2 + 1.0) * cos2 + 4.0 * a2 * np.sin(theta) ** 2
    root = np.sqrt(2.0) * (a2 - 1.0) * radical
    # (lead - root) / (4 a^2) rationalized: lead^2 - root^2 = 16 a^4, so no cancellation for large a
    return 4.0 * a2 / (lead + root)


def nu_tilde_sq_analytic(p):
    """Closed-form ``nu_tilde_minus^2`` between ``A1`` and ``A2``; pi-periodic and even in theta."""
    return float(_nu_tilde_sq(p.a, p.theta))


def logneg_analytic(p):
    return max(0.0, -0.5 * float(np.log2(nu_tilde_sq_analytic(p))))


def sweep_logneg_surface(a_grid, theta_grid):
    """Table of ``(a, theta, E_N)`` rows, ``a``-major, from the closed form.

    Returns:
        ndarray of shape ``(len(a_grid) * len(theta_grid), 3)``.
    """
    a_grid = np.asarray(a_grid, dtype=float)
    theta_grid = np.asarray(theta_grid, dtype=float)
    if a_grid.size == 0 or theta_grid.size == 0:
        raise DomainError("sweep grids must be non-empty")
    if np.any(a_grid < 1.0):
        raise DomainError("squeezing factors must be >= 1")
    aa, tt = np.meshgrid(a_grid, theta_grid, indexing="ij")
    nu2 = _nu_tilde_sq(aa, tt)
    logneg = np.maximum(0.0, -0.5 * np.log2(nu2)) + 0.0  # no negative zeros
    return np.column_stack([aa.ravel(), tt.ravel(), logneg.ravel()])


@dataclass(frozen=True)
class NoiseEllipse:
    """Principal variances of a single-mode block and the angle of its minor (squeezed) axis."""

    minor_axis_variance: float
    major_axis_variance: float
    orientation_angle: float


def ellipse_of_block(block):
    w, v = np.linalg.eigh(block)
    vec = v[:, 0]
    angle = float(np.arctan2(vec[1], vec[0]))
    # axis direction is defined modulo pi; fold into [-pi/2, pi/2)
    angle = (angle + np.pi / 2) % np.pi - np.pi / 2
    if np.isclose(w[0], w[1], rtol=0, atol=1e-12):
        angle = 0.0
    return NoiseEllipse(float(w[0]), float(w[1]), angle)


def noise_ellipse(p, mode):
    """Noise ellipse of mode ``"A+"`` or ``"A-"`` in the squeezed basis."""
    g = coupled_cm_squeezed_basis(p)
    if mode in ("A+", "plus", 0):
        return ellipse_of_block(g[:2, :2])
    if mode in ("A-", "minus", 1):
        return ellipse_of_block(g[2:, 2:])
    raise DomainError(f"mode must be 'A+' or 'A-', got {mode!r}")
