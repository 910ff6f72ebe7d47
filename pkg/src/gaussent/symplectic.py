"""Symplectic transforms, symplectic spectra and two-mode normal forms.

Transforms act on covariance matrices by congruence, ``Gamma -> S^T Gamma S``
(see :func:`apply`). A transform built from a unitary ``U`` acting on mode
operators as ``a_j -> sum_k U_jk a_k`` is ``S = M^T`` where ``M`` is the
Heisenberg map of the quadrature vector.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur
from scipy.stats import unitary_group

from .core import (
    as_cm,
    as_two_mode,
    blocks,
    local_invariants,
    num_modes,
    require_physical,
    standard_form_matrix,
    symplectic_form,
)
from .errors import (
    DomainError,
    InvariantInconsistencyError,
    MalformedMatrixError,
    NumericalDegeneracyError,
    UnphysicalStateError,
)

SYMPLECTIC_TOL = 1e-10
PAIRING_TOL = 1e-7
# relative to the squared scale of the invariants
DISCRIMINANT_TOL = 1e-9


def is_symplectic(s, tol=SYMPLECTIC_TOL):
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
        return False
    omega = symplectic_form(s.shape[0] // 2)
    return bool(np.max(np.abs(s.T @ omega @ s - omega)) <= tol)


def is_passive(s, tol=SYMPLECTIC_TOL):
    """True for orthogonal symplectic matrices (beam splitters, phase shifters)."""
    s = np.asarray(s, dtype=float)
    if not is_symplectic(s, tol):
        return False
    return bool(np.max(np.abs(s.T @ s - np.eye(s.shape[0]))) <= tol)


def as_symplectic(s, tol=SYMPLECTIC_TOL):
    s = np.array(s, dtype=float)
    if not is_symplectic(s, tol):
        raise MalformedMatrixError("matrix is not symplectic (S^T Omega S != Omega)")
    return s


def single_mode_squeezer(r):
    return np.diag([np.exp(r), np.exp(-r)])


def phase_shift(theta):
    """Single-mode rotation; ``theta = pi/2`` maps ``(x, p)`` to ``(-p, x)``."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def beam_splitter(theta):
    """Two-mode phase-space rotation mixing ``(x1, x2)`` and ``(p1, p2)`` by ``theta``."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array(
        [
            [c, 0.0, -s, 0.0],
            [0.0, c, 0.0, -s],
            [s, 0.0, c, 0.0],
            [0.0, s, 0.0, c],
        ]
    )


def two_mode_squeezer(r, phi):
    """Two-mode squeezer with squeezing ``r`` and phase ``phi``.

    Normalized so that ``apply(two_mode_squeezer(r, pi/4), identity)`` is the
    two-mode squeezed vacuum with ``a = cosh 2r`` and ``c = +-sinh 2r``.
    """
    c, s = np.cosh(r), np.sinh(r)
    h, k = np.cos(2.0 * phi), np.sin(2.0 * phi)
    return np.array(
        [
            [c - h * s, 0.0, k * s, 0.0],
            [0.0, c + h * s, 0.0, -k * s],
            [k * s, 0.0, c + h * s, 0.0],
            [0.0, -k * s, 0.0, c - h * s],
        ]
    )


def apply(s, gamma):
    """Congruence action ``S^T Gamma S``."""
    g = as_cm(gamma)
    s = np.asarray(s, dtype=float)
    if s.shape != g.shape:
        raise MalformedMatrixError(f"transform shape {s.shape} does not match CM shape {g.shape}")
    out = s.T @ g @ s
    return 0.5 * (out + out.T)


def direct_sum(*mats):
    size = sum(m.shape[0] for m in mats)
    out = np.zeros((size, size))
    i = 0
    for m in mats:
        k = m.shape[0]
        out[i : i + k, i : i + k] = m
        i += k
    return out


def embed(s, modes, n_total):
    """Place a ``k``-mode transform on the listed modes of an ``n_total``-mode system."""
    s = np.asarray(s, dtype=float)
    modes = [int(m) for m in modes]
    if s.shape != (2 * len(modes), 2 * len(modes)):
        raise MalformedMatrixError(f"transform of shape {s.shape} does not act on {len(modes)} mode(s)")
    if len(set(modes)) != len(modes):
        raise DomainError(f"repeated mode index in {modes}")
    if any(m < 0 or m >= n_total for m in modes):
        raise DomainError(f"mode index out of range 0..{n_total - 1}: {modes}")
    idx = np.array([[2 * m, 2 * m + 1] for m in modes]).ravel()
    out = np.eye(2 * n_total)
    out[np.ix_(idx, idx)] = s
    return out


def passive_from_unitary(u):
    """Orthogonal symplectic transform of the passive unitary ``u`` (``n x n``)."""
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    m = np.zeros((2 * n, 2 * n))
    m[0::2, 0::2] = u.real
    m[0::2, 1::2] = -u.imag
    m[1::2, 0::2] = u.imag
    m[1::2, 1::2] = u.real
    return m.T


def unitary_from_passive(s, tol=1e-8):
    s = np.asarray(s, dtype=float)
    if not is_passive(s, tol):
        raise DomainError("transform is not passive (orthogonal symplectic)")
    m = s.T
    return m[0::2, 0::2] + 1j * m[1::2, 0::2]


def random_passive(n, rng):
    if n == 1:
        u = np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    else:
        u = unitary_group.rvs(n, random_state=rng)
    return passive_from_unitary(u)


def random_symplectic(n, rng, max_squeezing=1.0):
    """Random element of Sp(2n) via the Bloch-Messiah form ``O1 Z O2``."""
    r = rng.uniform(-max_squeezing, max_squeezing, size=n)
    z = direct_sum(*[single_mode_squeezer(x) for x in r])
    return random_passive(n, rng) @ z @ random_passive(n, rng)


def random_cm(n, rng, nu_range=(1.0, 3.0), max_squeezing=1.0):
    """Random physical CM ``S^T nu S`` with thermal spectrum drawn from ``nu_range``."""
    nus = rng.uniform(*nu_range, size=n)
    s = random_symplectic(n, rng, max_squeezing)
    return apply(s, np.diag(np.repeat(nus, 2)))


def symplectic_spectrum(gamma):
    """Symplectic eigenvalues of ``gamma``, ascending.

    The eigenvalues of ``Omega Gamma`` are ``+-i nu``; they are obtained from
    the similar Hermitian matrix ``Gamma^(1/2) (i Omega) Gamma^(1/2)``, which
    stays well conditioned when eigenvalues are degenerate. Positive and
    negative eigenvalues are paired after sorting by modulus.
    """
    g = as_cm(gamma)
    n = num_modes(g)
    if np.linalg.eigvalsh(g)[0] <= 0:
        raise NumericalDegeneracyError("symplectic spectrum needs a positive definite matrix")
    root = _sqrtm_psd(g)
    ev = np.linalg.eigvalsh(root @ (1j * symplectic_form(n)) @ root)
    pos, neg = ev[n:], -ev[:n][::-1]
    if np.any(np.abs(pos - neg) > PAIRING_TOL * np.maximum(1.0, pos)):
        raise NumericalDegeneracyError(f"could not pair symplectic eigenvalues {ev.tolist()}")
    return 0.5 * (pos + neg)


def two_mode_spectrum(gamma):
    """Closed-form ``(nu_minus, nu_plus)`` of a two-mode CM from ``Delta`` and ``det Gamma``."""
    da, db, dc, det = local_invariants(gamma)
    delta = da + db + 2.0 * dc
    disc = delta * delta - 4.0 * det
    if disc < -DISCRIMINANT_TOL * max(1.0, delta * delta):
        raise InvariantInconsistencyError(f"Delta^2 - 4 det Gamma = {disc:.3g} < 0")
    root = np.sqrt(max(disc, 0.0))
    hi = 0.5 * (delta + root)
    return np.sqrt(max(det, 0.0) / hi), np.sqrt(hi)


def _sqrtm_psd(g):
    w, v = np.linalg.eigh(g)
    return (v * np.sqrt(w)) @ v.T


def williamson(gamma):
    """Williamson normal form ``Gamma = S^T diag(nu1, nu1, ..., nun, nun) S``.

    Uses the real Schur form of ``Gamma^(1/2) Omega Gamma^(1/2)``, which is
    antisymmetric and therefore block diagonal with ``2 x 2`` blocks ``nu_k w``.

    Returns:
        tuple: ``(S, nus)`` with ``nus`` ascending and ``S`` symplectic.
    """
    g = as_cm(gamma)
    n = num_modes(g)
    w_min = np.linalg.eigvalsh(g)[0]
    if w_min <= 0:
        raise UnphysicalStateError(f"Williamson decomposition needs a positive definite matrix (min eigenvalue {w_min:.3g})")
    root = _sqrtm_psd(g)
    k = root @ symplectic_form(n) @ root
    k = 0.5 * (k - k.T)
    t, z = schur(k, output="real")
    nus = np.empty(n)
    for i in range(n):
        val = t[2 * i, 2 * i + 1]
        if val < 0:
            z[:, [2 * i, 2 * i + 1]] = z[:, [2 * i + 1, 2 * i]]
            val = -val
        nus[i] = val
    order = np.argsort(nus, kind="stable")
    cols = np.array([[2 * i, 2 * i + 1] for i in order]).ravel()
    z = z[:, cols]
    nus = nus[order]
    d = np.repeat(nus, 2)
    s = (z.T @ root) / np.sqrt(d)[:, None]
    return s, nus


def partial_transpose(gamma, mode=1):
    """Mirror reflection ``p_mode -> -p_mode`` of a two-mode CM (flips ``det gamma``)."""
    g = as_two_mode(gamma)
    if mode not in (0, 1):
        raise DomainError(f"mode must be 0 or 1, got {mode}")
    t = np.ones(4)
    t[2 * mode + 1] = -1.0
    return g * np.outer(t, t)


@dataclass(frozen=True)
class StandardForm:
    """Local-symplectic normal form ``(a, b, c_plus, c_minus)`` of a two-mode CM.

    ``local_transform`` is ``S1 (+) S2`` with ``apply(local_transform, gamma)``
    equal to :meth:`matrix`.
    """

    a: float
    b: float
    c_plus: float
    c_minus: float
    local_transform: np.ndarray

    def matrix(self):
        return standard_form_matrix(self.a, self.b, self.c_plus, self.c_minus)

    @property
    def symmetric(self):
        return abs(self.a - self.b) <= 1e-6


def _rotation_svd(m):
    """``m = U diag(s1, s2) V^T`` with proper rotations ``U, V``; ``s2`` carries the sign of ``det m``."""
    if abs(m[0, 1]) <= 1e-14 and abs(m[1, 0]) <= 1e-14:
        # already diagonal: keep the identity instead of an arbitrary degenerate SVD
        for sign in (1.0, -1.0):
            if sign * m[0, 0] >= abs(m[1, 1]):
                return sign * np.eye(2), sign * np.diag(m), np.eye(2)
    u, s, vt = np.linalg.svd(m)
    v = vt.T
    if np.linalg.det(u) < 0:
        u[:, 1] *= -1
        s = s * np.array([1.0, -1.0])
    if np.linalg.det(v) < 0:
        v[:, 1] *= -1
        s = s * np.array([1.0, -1.0])
    return u, s, v


def _local_reduction(g):
    """Explicit ``S1 (+) S2`` bringing a two-mode CM to standard form."""
    bl = blocks(g)
    a = np.sqrt(np.linalg.det(bl.alpha))
    b = np.sqrt(np.linalg.det(bl.beta))
    l1 = np.linalg.inv(_sqrtm_psd(bl.alpha / a))
    l2 = np.linalg.inv(_sqrtm_psd(bl.beta / b))
    u, _, v = _rotation_svd(l1.T @ bl.gamma @ l2)
    return direct_sum(l1 @ u, l2 @ v)


def standard_form(gamma):
    """Standard form of a physical two-mode CM.

    ``a`` and ``b`` come from the local determinants and ``c_plus, c_minus``
    from ``det gamma`` and ``det Gamma``; the sign convention is
    ``c_plus >= |c_minus|`` with ``sign(c_minus) = sign(det gamma)``.

    Raises:
        UnphysicalStateError: for unphysical input.
        InvariantInconsistencyError: if the invariants admit no real solution.
    """
    g = require_physical(as_two_mode(gamma))
    da, db, dc, det = local_invariants(g)
    a, b = np.sqrt(da), np.sqrt(db)
    ab = a * b
    sum_sq = (ab * ab + dc * dc - det) / ab
    disc = sum_sq * sum_sq - 4.0 * dc * dc
    if disc < -DISCRIMINANT_TOL * max(1.0, sum_sq * sum_sq):
        raise InvariantInconsistencyError(f"standard-form discriminant {disc:.3g} < 0")
    root = np.sqrt(max(disc, 0.0))
    c_plus = np.sqrt(max(0.5 * (sum_sq + root), 0.0))
    c_minus = np.sqrt(max(0.5 * (sum_sq - root), 0.0)) * np.sign(dc)
    return StandardForm(float(a), float(b), float(c_plus), float(c_minus), _local_reduction(g))
