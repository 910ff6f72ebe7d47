"""Entanglement optimization over passive (energy-preserving) two-mode transforms.

The passive group is searched as ``(R(p1) + R(p2)) . BS(t) . (R(p3) + R(p4))``:
a phase layer, a beam splitter and a second phase layer. The second layer
does not change the entanglement; after optimization it is fixed so that
the output intermodal block is diagonal.

The optimal correction can be realized on two co-propagating polarization
modes by a quarter-wave, a half-wave and a quarter-wave plate. Retarders
follow Jones calculus with the retardation applied as ``e^{i delta}`` on the
slow axis; a plate at angle ``t`` is ``Rot(t) diag(1, e^{i delta}) Rot(t)^T``.
"""

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares, minimize, minimize_scalar

from .core import as_two_mode, require_physical
from .errors import DomainError, NumericalDegeneracyError
from .symplectic import (
    _rotation_svd,
    apply,
    beam_splitter,
    direct_sum,
    is_passive,
    passive_from_unitary,
    phase_shift,
    unitary_from_passive,
)

GRID_STEPS = 16
MAX_ITER = 500
XATOL = 1e-8
SUCCESS_GAP = 1e-5


def passive_bound(gamma):
    """Smallest ``nu_tilde_minus`` reachable by passive transforms, ``sqrt(l1 l2)``.

    ``l1 <= l2`` are the two smallest ordinary eigenvalues of ``gamma``.
    """
    g = require_physical(as_two_mode(gamma))
    w = np.linalg.eigvalsh(g)
    return float(np.sqrt(w[0] * w[1]))


def passive_transform(params):
    """Passive transform for ``(phase1, phase2, bs_angle, phase3, phase4)`` in radians."""
    p1, p2, t, p3, p4 = params
    return (
        direct_sum(phase_shift(p1), phase_shift(p2))
        @ beam_splitter(t)
        @ direct_sum(phase_shift(p3), phase_shift(p4))
    )


def _batch_transforms(params):
    params = np.atleast_2d(params)
    n = params.shape[0]
    c = np.cos(params)
    s = np.sin(params)
    left = np.zeros((n, 4, 4))
    right = np.zeros((n, 4, 4))
    for layer, (i, j) in ((left, (0, 1)), (right, (3, 4))):
        for blk, k in ((0, i), (2, j)):
            layer[:, blk, blk] = c[:, k]
            layer[:, blk, blk + 1] = -s[:, k]
            layer[:, blk + 1, blk] = s[:, k]
            layer[:, blk + 1, blk + 1] = c[:, k]
    bs = np.zeros((n, 4, 4))
    ct, st = c[:, 2], s[:, 2]
    for d in (0, 1):
        bs[:, d, d] = ct
        bs[:, d + 2, d + 2] = ct
        bs[:, d, d + 2] = -st
        bs[:, d + 2, d] = st
    return left @ bs @ right


def _det2(m):
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def _nu_minus_batch(g, det):
    delta_t = _det2(g[..., :2, :2]) + _det2(g[..., 2:, 2:]) - 2.0 * _det2(g[..., :2, 2:])
    root = np.sqrt(np.clip(delta_t * delta_t - 4.0 * det, 0.0, None))
    return np.sqrt(det / (0.5 * (delta_t + root)))


def _objective(params, g, det):
    p = _batch_transforms(params)
    out = np.swapaxes(p, -1, -2) @ g @ p
    return _nu_minus_batch(out, det)


@dataclass(frozen=True)
class PassiveCorrection:
    """Result of :func:`optimize_passive`.

    ``corrected`` is ``apply(transform, gamma)``; its two modes are the
    optimally entangled pair.
    """

    transform: np.ndarray
    parameters: tuple
    achieved_nu_tilde: float
    bound_nu_tilde: float
    initial_nu_tilde: float
    corrected: np.ndarray
    converged: bool
    iterations: int

    @property
    def gap(self):
        return self.achieved_nu_tilde - self.bound_nu_tilde


def optimize_passive(gamma, grid_steps=GRID_STEPS, max_iter=MAX_ITER, n_starts=4):
    """Minimize ``nu_tilde_minus`` over passive transforms.

    The output phase layer cannot change the entanglement, so the search
    runs over ``(phase1, phase2, bs_angle)``: a ``grid_steps^3`` grid over
    ``[0, pi)`` seeds Nelder-Mead refinements from the ``n_starts`` best
    grid points. The search is deterministic. ``converged`` is set when the
    result is within ``1e-5`` of :func:`passive_bound`; otherwise the best
    transform found is still returned.
    """
    g = require_physical(as_two_mode(gamma))
    det = float(np.linalg.det(g))
    bound = passive_bound(g)
    initial = float(_nu_minus_batch(g, det))

    axis = np.arange(grid_steps) * np.pi / grid_steps
    grid = np.array(list(itertools.product(axis, repeat=3)))
    values = _objective(_pad(grid), g, det)
    starts = grid[np.argsort(values, kind="stable")[:n_starts]]

    def f(x):
        return float(_objective(_pad(x), g, det)[0])

    best_x, best_val, iterations = None, np.inf, 0
    for x0 in starts:
        res = minimize(f, x0, method="Nelder-Mead",
                       options={"xatol": XATOL, "fatol": 1e-15, "maxiter": max_iter})
        iterations += int(res.nit)
        if res.fun < best_val:
            best_x, best_val = np.array(res.x), float(res.fun)
    if initial <= best_val:
        best_x, best_val = np.zeros(3), initial

    params = _normalize_output_phases(_pad(best_x)[0], g)
    transform = passive_transform(params)
    corrected = apply(transform, g)
    achieved = float(_nu_minus_batch(corrected, det))
    return PassiveCorrection(
        transform=transform,
        parameters=tuple(float(x) for x in params),
        achieved_nu_tilde=achieved,
        bound_nu_tilde=bound,
        initial_nu_tilde=initial,
        corrected=corrected,
        converged=achieved <= bound + SUCCESS_GAP,
        iterations=iterations,
    )


def _pad(x):
    x = np.atleast_2d(x)
    return np.column_stack([x, np.zeros((x.shape[0], 2))])


def _normalize_output_phases(params, g):
    """Choose the output phase layer that diagonalizes the intermodal block."""
    params = np.array(params, dtype=float)
    out = apply(passive_transform(params), g)
    u, _, v = _rotation_svd(out[:2, 2:])
    params[3] += np.arctan2(u[1, 0], u[0, 0])
    params[4] += np.arctan2(v[1, 0], v[0, 0])
    return np.mod(params + np.pi, 2 * np.pi) - np.pi


def phase_correction(gamma_squeezed, mode=1):
    """Best single-mode phase shift on one squeezed mode before a balanced beam splitter.

    Returns ``(angle, nu_tilde_minus)``; a 1-D scan followed by bounded refinement.
    """
    g = require_physical(as_two_mode(gamma_squeezed))
    det = float(np.linalg.det(g))
    bs = beam_splitter(np.pi / 4)

    def f(phi):
        s = np.eye(4)
        s[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2] = phase_shift(phi)
        return float(_nu_minus_batch(apply(s @ bs, g), det))

    scan = np.linspace(-np.pi / 2, np.pi / 2, 181)
    k = int(np.argmin([f(x) for x in scan]))
    step = scan[1] - scan[0]
    res = minimize_scalar(f, bounds=(scan[k] - step, scan[k] + step), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x), float(res.fun)


def retarder(angle, retardation):
    """Jones matrix of a linear retarder with fast axis at ``angle``."""
    c, s = np.cos(angle), np.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return rot @ np.diag([1.0, np.exp(1j * retardation)]) @ rot.T


def quarter_wave(angle):
    return retarder(angle, np.pi / 2)


def half_wave(angle):
    return retarder(angle, np.pi)


@dataclass(frozen=True)
class WaveplateSequence:
    """Quarter, half, quarter plate angles in radians, traversed in that order.

    ``common_phase`` is a phase delay common to both polarization modes. The
    plates alone only produce unit-determinant Jones matrices, so a target
    with a non-trivial determinant needs this extra common delay.
    """

    q1_angle: float
    h_angle: float
    q2_angle: float
    common_phase: float = 0.0

    def jones(self):
        j = quarter_wave(self.q2_angle) @ half_wave(self.h_angle) @ quarter_wave(self.q1_angle)
        return np.exp(1j * self.common_phase) * j

    def transform(self):
        return passive_from_unitary(self.jones())

    def degrees(self):
        return tuple(float(np.degrees(x)) for x in (self.q1_angle, self.h_angle, self.q2_angle, self.common_phase))


def waveplate_decomposition(target, tol=1e-10):
    """Quarter-half-quarter plate angles reproducing a passive two-mode transform.

    Raises:
        DomainError: if ``target`` is not orthogonal symplectic.
        NumericalDegeneracyError: if no plate setting reproduces the target.
    """
    target = np.asarray(target, dtype=float)
    if target.shape != (4, 4) or not is_passive(target, 1e-8):
        raise DomainError("waveplate decomposition needs a passive two-mode transform")
    u = unitary_from_passive(target)
    chi = np.angle(np.linalg.det(u))
    v = np.exp(-0.5j * chi) * u

    def residual(x, w):
        d = quarter_wave(x[2]) @ half_wave(x[1]) @ quarter_wave(x[0]) - w
        return np.concatenate([d.real.ravel(), d.imag.ravel()])

    best, best_cost, best_sign = None, np.inf, 1.0
    starts = np.arange(4) * np.pi / 4
    for sign in (1.0, -1.0):
        for x0 in itertools.product(starts, repeat=3):
            res = least_squares(residual, np.array(x0), args=(sign * v,), xtol=1e-15, ftol=1e-15, gtol=1e-15)
            if res.cost < best_cost:
                best, best_cost, best_sign = res.x, res.cost, sign
            if best_cost < 1e-26:
                break
        if best_cost < 1e-26:
            break
    common = 0.5 * chi + (0.0 if best_sign > 0 else np.pi)
    seq = WaveplateSequence(*(float(np.mod(x, np.pi)) for x in best), common_phase=float(np.mod(common, 2 * np.pi)))
    err = np.max(np.abs(seq.transform() - target))
    if err > max(tol, 1e-8):
        raise NumericalDegeneracyError(f"waveplate solution misses the target by {err:.3g}")
    return seq
