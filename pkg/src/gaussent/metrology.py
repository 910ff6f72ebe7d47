"""Measurement-noise sensitivity and simulated homodyne characterization.

All states handled here are given in the squeezed (``A+, A-``) basis;
entanglement is evaluated between ``A1, A2`` after a balanced beam splitter.
Random numbers come from numpy's ``PCG64`` generator; every scan point uses
its own stream derived from ``(seed, mode, point index)`` so results do not
depend on evaluation order.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import as_cm, as_two_mode, num_modes, require_physical, to_db, validate_physical
from .data import MEASURED_UNTILTED
from .entanglement import analyze, log_negativity
from .errors import DomainError, UnphysicalStateError
from .symplectic import apply, beam_splitter, embed, phase_shift

RNG_ALGORITHM = "PCG64"

BLOCKS = ("diagonal-blocks", "off-diagonal-block")
ENTRY_SETS = ("all", "standard-form-entries", "non-standard-form-entries")

# upper-triangle positions; mirrored entries move together
_ENTRIES = {
    ("diagonal-blocks", "standard-form-entries"): [(0, 0), (1, 1), (2, 2), (3, 3)],
    ("diagonal-blocks", "non-standard-form-entries"): [(0, 1), (2, 3)],
    ("off-diagonal-block", "standard-form-entries"): [(0, 2), (1, 3)],
    ("off-diagonal-block", "non-standard-form-entries"): [(0, 3), (1, 2)],
}
for _b in BLOCKS:
    _ENTRIES[(_b, "all")] = _ENTRIES[(_b, "standard-form-entries")] + _ENTRIES[(_b, "non-standard-form-entries")]

#: the six error curves: three entry sets in each of the two block families
SENSITIVITY_CURVES = [(b, e) for b in BLOCKS for e in ENTRY_SETS]


@dataclass(frozen=True)
class PerturbationSpec:
    """Equal additive error ``delta`` on a set of CM entries.

    ``sign`` flips the error globally; with ``seed`` set, each targeted entry
    instead gets an independent random sign.
    """

    block: str
    entry_set: str
    delta: float
    sign: float = 1.0
    seed: Optional[int] = None

    def __post_init__(self):
        if self.block not in BLOCKS:
            raise DomainError(f"block must be one of {BLOCKS}, got {self.block!r}")
        if self.entry_set not in ENTRY_SETS:
            raise DomainError(f"entry_set must be one of {ENTRY_SETS}, got {self.entry_set!r}")

    def indices(self):
        return list(_ENTRIES[(self.block, self.entry_set)])

    def matrix(self):
        idx = self.indices()
        if self.seed is None:
            signs = np.full(len(idx), float(self.sign))
        else:
            signs = np.random.Generator(np.random.PCG64(self.seed)).choice([-1.0, 1.0], size=len(idx))
        e = np.zeros((4, 4))
        for (i, j), s in zip(idx, signs):
            e[i, j] = e[j, i] = s * self.delta
        return e


def perturb(gamma, spec):
    """Add the perturbation; returns ``(matrix, Physicality)`` and never rejects."""
    g = as_two_mode(gamma) + spec.matrix()
    return g, validate_physical(g)


def entangled_basis(gamma_squeezed):
    """``A1, A2`` covariance matrix of an ``A+, A-`` covariance matrix."""
    return apply(beam_splitter(np.pi / 4), gamma_squeezed)


def squeezed_basis(gamma_entangled):
    return apply(beam_splitter(-np.pi / 4), gamma_entangled)


@dataclass(frozen=True)
class SensitivityRow:
    block: str
    entry_set: str
    delta: float
    physical: bool
    log_negativity: Optional[float]
    delta_log_negativity: Optional[float]


def default_delta_grid():
    return np.round(np.arange(0.0, 0.3 + 1e-12, 0.005), 10)


def sensitivity_sweep(baseline=None, specs=None, delta_grid=None, sign=1.0):
    """Error on ``E_N(A1, A2)`` caused by equal errors on groups of CM entries.

    Args:
        baseline: squeezed-basis CM; defaults to the measured untilted state.
        specs: ``(block, entry_set)`` pairs; defaults to :data:`SENSITIVITY_CURVES`.
        delta_grid: error magnitudes; defaults to ``0 .. 0.3`` in steps of 0.005.
        sign: common sign of the error.

    Returns:
        list of :class:`SensitivityRow`, curve-major. Unphysical points carry
        ``None`` for both logarithmic-negativity columns.
    """
    base = as_two_mode(MEASURED_UNTILTED if baseline is None else baseline)
    curves = SENSITIVITY_CURVES if specs is None else specs
    deltas = default_delta_grid() if delta_grid is None else np.asarray(delta_grid, dtype=float)
    e0 = log_negativity(entangled_basis(base))
    rows = []
    for block, entry_set in curves:
        for d in deltas:
            g, verdict = perturb(base, PerturbationSpec(block, entry_set, float(d), sign=sign))
            if verdict.physical:
                e = log_negativity(entangled_basis(g))
                rows.append(SensitivityRow(block, entry_set, float(d), True, e, abs(e - e0)))
            else:
                rows.append(SensitivityRow(block, entry_set, float(d), False, None, None))
    return rows


def curve(rows, block, entry_set):
    return [r for r in rows if r.block == block and r.entry_set == entry_set]


def first_unphysical_delta(rows, block, entry_set=None):
    """Smallest ``delta`` that produced an unphysical matrix, or ``None``.

    Without ``entry_set`` the minimum over all curves of ``block`` is returned.
    """
    bad = [r.delta for r in rows if r.block == block and not r.physical
           and (entry_set is None or r.entry_set == entry_set)]
    return min(bad) if bad else None


def _generator(*keys):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(keys))))


def _cholesky(g):
    try:
        return np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise UnphysicalStateError("covariance matrix is not positive definite") from exc


def sample_state(gamma, count, seed):
    """Zero-mean Gaussian quadrature samples with covariance ``gamma``, shape ``(count, 2n)``."""
    g = require_physical(gamma)
    if count < 1:
        raise DomainError(f"count must be positive, got {count}")
    chol = _cholesky(g)
    z = _generator(seed).standard_normal((int(count), g.shape[0]))
    return z @ chol.T


@dataclass(frozen=True)
class QuadratureTrace:
    """Homodyne variances of one mode versus local-oscillator phase."""

    mode: int
    phases: np.ndarray
    variances: np.ndarray
    analytic: np.ndarray
    samples_per_phase: int
    seed: int

    @property
    def variances_db(self):
        return to_db(self.variances)

    @property
    def analytic_db(self):
        return to_db(self.analytic)

    def standard_errors(self):
        """Standard deviation of each variance estimate, ``var * sqrt(2 / (N - 1))``."""
        return self.analytic * np.sqrt(2.0 / (self.samples_per_phase - 1))


def quadrature_variance(gamma, mode, phi):
    """Variance of ``x cos(phi) + p sin(phi)`` of ``mode``."""
    g = as_cm(gamma)
    blk = g[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2]
    u = np.stack([np.cos(phi), np.sin(phi)])
    return np.einsum("i...,ij,j...->...", u, blk, u)


def homodyne_scan(gamma, mode, phase_grid, samples_per_phase, seed):
    """Simulated local-oscillator phase scan of one mode."""
    g = require_physical(gamma)
    if not 0 <= mode < num_modes(g):
        raise DomainError(f"mode {mode} out of range")
    if samples_per_phase < 2:
        raise DomainError("need at least two samples per phase")
    phases = np.asarray(phase_grid, dtype=float)
    chol = _cholesky(g[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2])
    variances = np.empty(phases.size)
    for i, phi in enumerate(phases):
        xp = _generator(seed, mode, i).standard_normal((int(samples_per_phase), 2)) @ chol.T
        variances[i] = np.var(xp @ np.array([np.cos(phi), np.sin(phi)]), ddof=1)
    return QuadratureTrace(mode, phases, variances, quadrature_variance(g, mode, phases),
                           int(samples_per_phase), int(seed))


def quadrature_relabel(gamma):
    """Quarter-wave relabelling ``(x1, p1, x2, p2) -> (x1, p1, p2, x2)`` as a pi/2 shift of mode 2."""
    return apply(embed(phase_shift(np.pi / 2), [1], 2), as_two_mode(gamma))


def estimate_cm(samples, zero_offdiag_offblock=False):
    """Unbiased sample covariance of quadrature samples (rows are shots).

    With ``zero_offdiag_offblock`` the intermodal block is forced to zero,
    the usual treatment of noisy intermodal measurements.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise DomainError("need at least two samples to estimate a covariance matrix")
    est = np.cov(x, rowvar=False, ddof=1)
    est = 0.5 * (est + est.T)
    if zero_offdiag_offblock:
        n = est.shape[0] // 2
        for i in range(n):
            for j in range(n):
                if i != j:
                    est[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = 0.0
    return est


@dataclass(frozen=True)
class SimulationResult:
    traces: list
    estimate: np.ndarray
    report: object
    samples: int
    seed: int


def simulate(gamma, samples, seed, phase_grid=None, samples_per_phase=10_000,
             zero_offdiag_offblock=False, rotate=True):
    """Homodyne scans of every mode, CM estimation and entanglement report.

    ``gamma`` is in the squeezed basis; with ``rotate`` the estimate is mixed on
    a balanced beam splitter before analysis.
    """
    g = require_physical(gamma)
    if phase_grid is None:
        phase_grid = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    traces = [homodyne_scan(g, m, phase_grid, samples_per_phase, seed) for m in range(num_modes(g))]
    est = estimate_cm(sample_state(g, samples, seed), zero_offdiag_offblock)
    report = None
    if est.shape == (4, 4) and validate_physical(est).physical:
        report = analyze(entangled_basis(est) if rotate else est)
    return SimulationResult(traces, est, report, int(samples), int(seed))
