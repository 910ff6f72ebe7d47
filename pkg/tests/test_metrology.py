import numpy as np
import pytest

from gaussent.entanglement import log_negativity
from gaussent.errors import DomainError, UnphysicalStateError
from gaussent.metrology import (
    BLOCKS,
    ENTRY_SETS,
    SENSITIVITY_CURVES,
    PerturbationSpec,
    curve,
    default_delta_grid,
    entangled_basis,
    estimate_cm,
    first_unphysical_delta,
    homodyne_scan,
    perturb,
    quadrature_relabel,
    quadrature_variance,
    sample_state,
    sensitivity_sweep,
    simulate,
    squeezed_basis,
)


def test_perturbation_targets():
    spec = PerturbationSpec("off-diagonal-block", "standard-form-entries", 0.1)
    e = spec.matrix()
    np.testing.assert_array_equal(e, e.T)
    assert e[0, 2] == e[1, 3] == 0.1
    assert np.count_nonzero(e) == 4
    diag_all = PerturbationSpec("diagonal-blocks", "all", 0.1).matrix()
    assert np.count_nonzero(diag_all) == 8
    assert np.count_nonzero(diag_all[:2, 2:]) == 0
    with pytest.raises(DomainError):
        PerturbationSpec("nope", "all", 0.1)
    with pytest.raises(DomainError):
        PerturbationSpec("diagonal-blocks", "nope", 0.1)


def test_entry_sets_partition_each_block():
    for block in BLOCKS:
        sf = set(PerturbationSpec(block, "standard-form-entries", 1).indices())
        nsf = set(PerturbationSpec(block, "non-standard-form-entries", 1).indices())
        assert not sf & nsf
        assert sf | nsf == set(PerturbationSpec(block, "all", 1).indices())


def test_random_sign_perturbation_is_seeded():
    a = PerturbationSpec("diagonal-blocks", "all", 0.1, seed=5).matrix()
    b = PerturbationSpec("diagonal-blocks", "all", 0.1, seed=5).matrix()
    np.testing.assert_array_equal(a, b)
    assert set(np.abs(a[a != 0])) == {0.1}


def test_perturb_reports_unphysical(untilted):
    g, verdict = perturb(untilted, PerturbationSpec("off-diagonal-block", "all", 0.25))
    assert not verdict.physical
    assert g[0, 2] == 0.25


def test_basis_changes_are_inverse(untilted):
    np.testing.assert_allclose(squeezed_basis(entangled_basis(untilted)), untilted, atol=1e-14)


def test_sweep_structure(untilted):
    rows = sensitivity_sweep(untilted)
    grid = default_delta_grid()
    assert len(rows) == len(SENSITIVITY_CURVES) * grid.size
    assert len(SENSITIVITY_CURVES) == len(BLOCKS) * len(ENTRY_SETS)
    for b, e in SENSITIVITY_CURVES:
        c = curve(rows, b, e)
        assert c[0].delta == 0 and c[0].delta_log_negativity == 0
        for r in c:
            assert (r.log_negativity is None) == (not r.physical)


def test_sweep_values_match_direct_evaluation(untilted):
    rows = sensitivity_sweep(untilted, [("diagonal-blocks", "all")], [0.05])
    g = untilted + PerturbationSpec("diagonal-blocks", "all", 0.05).matrix()
    base = log_negativity(entangled_basis(untilted))
    assert rows[0].delta_log_negativity == pytest.approx(abs(log_negativity(entangled_basis(g)) - base), abs=1e-14)


def test_first_unphysical(untilted):
    rows = sensitivity_sweep(untilted, [("off-diagonal-block", "all")], np.arange(0, 0.3, 0.001))
    # oracle: bisection on the smallest eigenvalue of G + i Omega
    omega = np.kron(np.eye(2), [[0, 1], [-1, 0]])

    def mineig(d):
        g = untilted + PerturbationSpec("off-diagonal-block", "all", d).matrix()
        return np.linalg.eigvalsh(g + 1j * omega)[0]

    lo, hi = 0.0, 0.3
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if mineig(mid) >= -1e-9 else (lo, mid)
    assert first_unphysical_delta(rows, "off-diagonal-block") == pytest.approx(hi, abs=0.0011)
    assert first_unphysical_delta(rows, "diagonal-blocks") is None


def test_sampling_is_deterministic_and_correct(untilted):
    a = sample_state(untilted, 1000, 7)
    np.testing.assert_array_equal(a, sample_state(untilted, 1000, 7))
    assert not np.array_equal(a, sample_state(untilted, 1000, 8))
    big = sample_state(untilted, 200_000, 1)
    np.testing.assert_allclose(np.cov(big, rowvar=False), untilted, atol=0.1)
    with pytest.raises(UnphysicalStateError):
        sample_state(np.diag([0.5, 0.5, 1, 1]), 10, 0)


def test_quadrature_variance():
    g = np.diag([0.5, 2.0, 1.0, 1.0])
    assert quadrature_variance(g, 0, 0.0) == pytest.approx(0.5)
    assert quadrature_variance(g, 0, np.pi / 2) == pytest.approx(2.0)
    assert quadrature_variance(g, 0, np.pi / 4) == pytest.approx(1.25)


def test_vacuum_scan_flat():
    tr = homodyne_scan(np.eye(4), 0, np.linspace(0, np.pi, 16), 20_000, 3)
    np.testing.assert_allclose(tr.analytic_db, 0.0, atol=1e-12)
    assert np.all(np.abs(tr.variances - 1) < 5 * tr.standard_errors())


def test_scan_statistics_and_determinism(untilted):
    phases = np.linspace(0, 2 * np.pi, 32, endpoint=False)
    tr = homodyne_scan(untilted, 1, phases, 5000, 11)
    z = (tr.variances - tr.analytic) / tr.standard_errors()
    assert np.all(np.abs(z) < 5)
    np.testing.assert_array_equal(tr.variances, homodyne_scan(untilted, 1, phases, 5000, 11).variances)
    with pytest.raises(DomainError):
        homodyne_scan(untilted, 2, phases, 100, 0)


def test_quadrature_relabel_swaps_mode_two():
    g = np.diag([1.0, 2.0, 3.0, 4.0])
    np.testing.assert_allclose(np.diag(quadrature_relabel(g)), [1, 2, 4, 3], atol=1e-15)


def test_estimate_cm(untilted):
    x = sample_state(entangled_basis(untilted), 50_000, 2)
    est = estimate_cm(x)
    np.testing.assert_array_equal(est, est.T)
    assert abs(est[0, 2]) > 3
    z = estimate_cm(x, zero_offdiag_offblock=True)
    np.testing.assert_array_equal(z[:2, 2:], 0)
    np.testing.assert_array_equal(z[:2, :2], est[:2, :2])
    with pytest.raises(DomainError):
        estimate_cm(x[:1])


def test_simulate(untilted):
    res = simulate(untilted, 200_000, 4, np.linspace(0, np.pi, 8), 2000)
    assert len(res.traces) == 2
    assert res.report.log_negativity == pytest.approx(1.60, abs=0.05)
    again = simulate(untilted, 200_000, 4, np.linspace(0, np.pi, 8), 2000)
    np.testing.assert_array_equal(res.estimate, again.estimate)


def test_identical_samples_give_unphysical_estimate():
    from gaussent.core import validate_physical

    est = estimate_cm(np.ones((2, 4)))
    np.testing.assert_array_equal(est, 0)
    assert not validate_physical(est).physical
